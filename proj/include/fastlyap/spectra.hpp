#ifndef FASTLYAP_SPECTRA_HPP
#define FASTLYAP_SPECTRA_HPP

#include <optional>
#include <string>

namespace fastlyap {

enum class AlphaClass { zero, finite, infinite };
enum class SpectrumKind { fast, upper, lower, classical_at_infinity };

const char* to_string(AlphaClass a) noexcept;
const char* to_string(SpectrumKind k) noexcept;

struct SpectrumInputs {
  double gamma = 2;
  double beta = 1, B = 1, b = 1;  // infinity allowed
  bool superlinear = true;
  bool equiv_increasing = true;
};

struct SpectrumQuery {
  SpectrumInputs inputs;
  AlphaClass alpha = AlphaClass::finite;
  SpectrumKind which = SpectrumKind::fast;
};

struct SpectrumValue {
  std::optional<double> dimension;  // absent means the level set is empty
  std::string formula_tag;
  std::string note;
  SpectrumQuery query;

  bool empty_level_set() const { return !dimension.has_value(); }
};

// 1 / ((gamma - 1) x + 1), with x = infinity mapped to 0.
double dimension_formula(double gamma, double x);

SpectrumValue fast_spectrum(const SpectrumInputs& in, AlphaClass alpha);
SpectrumValue upper_lower_spectrum(const SpectrumInputs& in, AlphaClass alpha, SpectrumKind which);
SpectrumValue lyapunov_at_infinity(double gamma);
SpectrumValue evaluate(const SpectrumQuery& q);

// The fast spectrum is continuous at infinity exactly when beta and B agree.
bool continuous_at_infinity(double beta, double B, double tol = 1e-12);

enum class AuxiliaryKind {
  gamma_infinity_bound,  // param beta in [1, inf]
  d_set,                 // param c in (1, inf)
  digits_to_infinity,    // no param
  lambda_infinity,       // no param
  growth_rate            // param xi >= 0
};

SpectrumValue auxiliary_dimensions(double gamma, AuxiliaryKind kind, double param = 0);

}  // namespace fastlyap

#endif  // FASTLYAP_SPECTRA_HPP
