#include "fastlyap/bigfloat.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace fastlyap {

mpfr_prec_t default_precision() {
  static const mpfr_prec_t prec = [] {
    if (const char* env = std::getenv("FASTLYAP_PRECISION_BITS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= MPFR_PREC_MIN && v <= 1 << 20) return static_cast<mpfr_prec_t>(v);
    }
    return static_cast<mpfr_prec_t>(256);
  }();
  return prec;
}

mpfr_rnd_t to_mpfr(Round r) {
  switch (r) {
    case Round::down: return MPFR_RNDD;
    case Round::up: return MPFR_RNDU;
    default: return MPFR_RNDN;
  }
}

BigFloat::BigFloat(mpfr_prec_t prec) {
  mpfr_init2(value_, prec);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(double x, mpfr_prec_t prec) {
  mpfr_init2(value_, prec);
  mpfr_set_d(value_, x, MPFR_RNDN);
}

BigFloat::BigFloat(const Integer& z, Round r, mpfr_prec_t prec) {
  mpfr_init2(value_, prec);
  mpfr_set_z(value_, z.get_mpz_t(), to_mpfr(r));
}

BigFloat::BigFloat(const Rational& q, Round r, mpfr_prec_t prec) {
  mpfr_init2(value_, prec);
  mpfr_set_q(value_, q.get_mpq_t(), to_mpfr(r));
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

double BigFloat::to_double(Round r) const { return mpfr_get_d(value_, to_mpfr(r)); }

double BigFloat::log() const {
  BigFloat out(precision());
  mpfr_log(out.value_, value_, MPFR_RNDN);
  return out.to_double();
}

std::string BigFloat::to_string(int digits) const {
  if (mpfr_zero_p(value_)) return "0";
  if (!mpfr_number_p(value_)) return mpfr_nan_p(value_) ? "nan" : (mpfr_sgn(value_) > 0 ? "inf" : "-inf");
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, value_);
  return std::string(buf.data());
}

namespace {
mpfr_prec_t max_prec(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }
}  // namespace

BigFloat BigFloat::add(const BigFloat& a, const BigFloat& b, Round r) {
  BigFloat out(max_prec(a, b));
  mpfr_add(out.value_, a.value_, b.value_, to_mpfr(r));
  return out;
}

BigFloat BigFloat::sub(const BigFloat& a, const BigFloat& b, Round r) {
  BigFloat out(max_prec(a, b));
  mpfr_sub(out.value_, a.value_, b.value_, to_mpfr(r));
  return out;
}

BigFloat BigFloat::mul(const BigFloat& a, const BigFloat& b, Round r) {
  BigFloat out(max_prec(a, b));
  mpfr_mul(out.value_, a.value_, b.value_, to_mpfr(r));
  return out;
}

BigFloat BigFloat::div(const BigFloat& a, const BigFloat& b, Round r) {
  BigFloat out(max_prec(a, b));
  mpfr_div(out.value_, a.value_, b.value_, to_mpfr(r));
  return out;
}

BigFloat BigFloat::exp(const BigFloat& a, Round r) {
  BigFloat out(a.precision());
  mpfr_exp(out.value_, a.value_, to_mpfr(r));
  return out;
}

BigFloat BigFloat::log(const BigFloat& a, Round r) {
  BigFloat out(a.precision());
  mpfr_log(out.value_, a.value_, to_mpfr(r));
  return out;
}

double Enclosure::width_upper() const { return BigFloat::sub(hi, lo, Round::up).to_double(Round::up); }

}  // namespace fastlyap
