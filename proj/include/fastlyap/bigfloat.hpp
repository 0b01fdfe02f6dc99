#ifndef FASTLYAP_BIGFLOAT_HPP
#define FASTLYAP_BIGFLOAT_HPP

#include <mpfr.h>

#include <string>

#include "fastlyap/rational.hpp"

namespace fastlyap {

// Working precision for outward-rounded arithmetic; FASTLYAP_PRECISION_BITS overrides 256.
mpfr_prec_t default_precision();

enum class Round { down, up, nearest };

// Value-semantic wrapper over mpfr_t. Every operation takes an explicit rounding
// direction so enclosures can be built by hand.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = default_precision());
  BigFloat(double x, mpfr_prec_t prec = default_precision());
  BigFloat(const Integer& z, Round r, mpfr_prec_t prec = default_precision());
  BigFloat(const Rational& q, Round r, mpfr_prec_t prec = default_precision());
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  double to_double(Round r = Round::nearest) const;
  // Natural log of a positive value, as a double.
  double log() const;
  std::string to_string(int digits = 30) const;
  bool is_finite() const { return mpfr_number_p(value_) != 0; }

  static BigFloat add(const BigFloat& a, const BigFloat& b, Round r);
  static BigFloat sub(const BigFloat& a, const BigFloat& b, Round r);
  static BigFloat mul(const BigFloat& a, const BigFloat& b, Round r);
  static BigFloat div(const BigFloat& a, const BigFloat& b, Round r);
  static BigFloat exp(const BigFloat& a, Round r);
  static BigFloat log(const BigFloat& a, Round r);

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.value_, b.value_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.value_, b.value_); }

 private:
  mpfr_t value_;
};

mpfr_rnd_t to_mpfr(Round r);

// Closed enclosure [lo, hi] of a real number.
struct Enclosure {
  BigFloat lo, hi;
  double width_upper() const;
};

}  // namespace fastlyap

#endif  // FASTLYAP_BIGFLOAT_HPP
