#include "fastlyap/spectra.hpp"

#include <cmath>

#include "fastlyap/error.hpp"

namespace fastlyap {

const char* to_string(AlphaClass a) noexcept {
  switch (a) {
    case AlphaClass::zero: return "0";
    case AlphaClass::finite: return "finite";
    case AlphaClass::infinite: return "inf";
  }
  return "?";
}

const char* to_string(SpectrumKind k) noexcept {
  switch (k) {
    case SpectrumKind::fast: return "fast";
    case SpectrumKind::upper: return "upper";
    case SpectrumKind::lower: return "lower";
    case SpectrumKind::classical_at_infinity: return "classical_at_infinity";
  }
  return "?";
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 1)) throw Error(ErrorKind::out_of_range, "gamma must exceed 1");
}

void check_common(const SpectrumInputs& in) {
  check_gamma(in.gamma);
  if (!in.superlinear)
    throw Error(ErrorKind::hypothesis, "psi(n)/n does not appear to tend to infinity; the spectrum formulas do not apply");
  if (std::isnan(in.beta) || std::isnan(in.B) || std::isnan(in.b) || in.b < 1 || in.B < 1 || in.beta < 1)
    throw Error(ErrorKind::out_of_range, "scaling invariants must lie in [1, inf]");
}

}  // namespace

double dimension_formula(double gamma, double x) {
  if (std::isinf(x)) return 0.0;
  return 1.0 / ((gamma - 1.0) * x + 1.0);
}

SpectrumValue fast_spectrum(const SpectrumInputs& in, AlphaClass alpha) {
  check_common(in);
  SpectrumValue v;
  v.query = {in, alpha, SpectrumKind::fast};
  switch (alpha) {
    case AlphaClass::zero:
      v.dimension = 1.0;
      v.formula_tag = "fast:alpha=0";
      v.note = "level set has full Lebesgue measure sum |I_n|";
      break;
    case AlphaClass::finite:
      v.formula_tag = "fast:finite-alpha";
      if (!in.equiv_increasing) {
        v.note = "empty level set: psi is not equivalent to an increasing function (heuristic envelope test)";
      } else {
        v.dimension = dimension_formula(in.gamma, in.beta);
        v.note = "uses beta; nonemptiness rests on the heuristic equivalence-to-increasing flag";
      }
      break;
    case AlphaClass::infinite:
      v.dimension = dimension_formula(in.gamma, in.B);
      v.formula_tag = "fast:alpha=inf";
      v.note = "uses B";
      break;
  }
  return v;
}

SpectrumValue upper_lower_spectrum(const SpectrumInputs& in, AlphaClass alpha, SpectrumKind which) {
  if (which != SpectrumKind::upper && which != SpectrumKind::lower)
    throw Error(ErrorKind::usage, "upper_lower_spectrum needs which = upper or lower");
  check_common(in);
  SpectrumValue v;
  v.query = {in, alpha, which};
  bool upper = which == SpectrumKind::upper;
  if (alpha == AlphaClass::zero) {
    v.dimension = 1.0;
    v.formula_tag = upper ? "upper:alpha=0" : "lower:alpha=0";
    return v;
  }
  v.dimension = dimension_formula(in.gamma, upper ? in.b : in.B);
  v.formula_tag = upper ? "upper:alpha>0" : "lower:alpha>0";
  v.note = upper ? "uses b" : "uses B";
  return v;
}

SpectrumValue lyapunov_at_infinity(double gamma) {
  check_gamma(gamma);
  SpectrumValue v;
  v.query.inputs.gamma = gamma;
  v.query.alpha = AlphaClass::infinite;
  v.query.which = SpectrumKind::classical_at_infinity;
  v.dimension = 1.0 / gamma;
  v.formula_tag = "classical:L(inf)";
  return v;
}

SpectrumValue evaluate(const SpectrumQuery& q) {
  switch (q.which) {
    case SpectrumKind::fast: return fast_spectrum(q.inputs, q.alpha);
    case SpectrumKind::upper:
    case SpectrumKind::lower: return upper_lower_spectrum(q.inputs, q.alpha, q.which);
    case SpectrumKind::classical_at_infinity: return lyapunov_at_infinity(q.inputs.gamma);
  }
  throw Error(ErrorKind::usage, "unknown spectrum kind");
}

bool continuous_at_infinity(double beta, double B, double tol) {
  if (std::isinf(beta) || std::isinf(B)) return std::isinf(beta) && std::isinf(B);
  return std::fabs(beta - B) < tol;
}

SpectrumValue auxiliary_dimensions(double gamma, AuxiliaryKind kind, double param) {
  check_gamma(gamma);
  SpectrumValue v;
  v.query.inputs.gamma = gamma;
  switch (kind) {
    case AuxiliaryKind::gamma_infinity_bound:
      if (!(param >= 1)) throw Error(ErrorKind::out_of_range, "beta must lie in [1, inf]");
      v.dimension = dimension_formula(gamma, param);
      v.formula_tag = "auxiliary:gamma-infinity-bound";
      break;
    case AuxiliaryKind::d_set:
      if (!(param > 1)) throw Error(ErrorKind::out_of_range, "c must lie in (1, inf)");
      v.dimension = dimension_formula(gamma, param);
      v.formula_tag = "auxiliary:d-set";
      break;
    case AuxiliaryKind::digits_to_infinity:
      v.dimension = 1.0 / gamma;
      v.formula_tag = "auxiliary:digits-to-infinity";
      break;
    case AuxiliaryKind::lambda_infinity:
      v.dimension = 1.0 / gamma;
      v.formula_tag = "auxiliary:lambda-infinity";
      break;
    case AuxiliaryKind::growth_rate:
      if (!(param >= 0)) throw Error(ErrorKind::out_of_range, "xi must be non-negative");
      v.dimension = std::isinf(param) ? 0.0 : 1.0 / (gamma + (gamma - 1.0) * param);
      v.formula_tag = "auxiliary:growth-rate";
      break;
  }
  return v;
}

}  // namespace fastlyap
