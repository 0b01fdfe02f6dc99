#include "fastlyap/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fastlyap/error.hpp"
#include "fastlyap/sequence.hpp"

namespace fastlyap {

Digit::Digit(Integer v) : value_(std::move(v)) {
  if (value_ < 1) throw Error(ErrorKind::usage, "digits must be positive integers, got " + value_.get_str());
  log_ = log_abs(value_);
}

Digit Digit::log_only(double log_value) {
  if (!(log_value >= 0) || !std::isfinite(log_value))
    throw Error(ErrorKind::usage, "log-scaled digit needs a finite non-negative log");
  Digit d;
  d.exact_ = false;
  d.log_ = log_value;
  return d;
}

const Integer& Digit::value() const {
  if (!exact_) throw Error(ErrorKind::bit_budget, "digit exp(" + std::to_string(log_) + ") is known only in log scale");
  return value_;
}

std::string Digit::to_string() const {
  if (exact_ && mpz_sizeinbase(value_.get_mpz_t(), 2) <= 63) return value_.get_str();
  char buf[64];
  std::snprintf(buf, sizeof buf, "exp(%.17g)", log_);
  return buf;
}

bool operator==(const Digit& a, const Digit& b) {
  if (a.exact_ != b.exact_) return false;
  return a.exact_ ? a.value_ == b.value_ : a.log_ == b.log_;
}

DigitWord make_word(std::initializer_list<unsigned long> digits) {
  DigitWord w;
  for (auto d : digits) w.emplace_back(d);
  return w;
}

std::string to_string(const DigitWord& word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ',';
    out += word[i].to_string();
  }
  return out;
}

double log_product(const DigitWord& word) {
  CompensatedSum acc;
  for (const auto& d : word) acc.add(d.log());
  return acc.value();
}

namespace {

bool integral_gamma(double gamma) { return gamma == std::floor(gamma) && gamma > 0 && gamma < 64; }

void attach_bounds(const MapSpec& map, CylinderInterval& cyl) {
  double n = static_cast<double>(cyl.word.size());
  double lp = log_product(cyl.word);
  double lc = map.log_distortion();
  cyl.log_bound_lo = -n * lc - map.gamma() * lp;
  cyl.log_bound_hi = n * lc - map.gamma() * lp;
  bool all_exact = std::all_of(cyl.word.begin(), cyl.word.end(), [](const Digit& d) { return d.exact(); });
  if (!all_exact || !integral_gamma(map.gamma())) return;
  Integer prod(1);
  for (const auto& d : cyl.word) prod *= d.value();
  Integer pg;
  mpz_pow_ui(pg.get_mpz_t(), prod.get_mpz_t(), static_cast<unsigned long>(map.gamma()));
  Rational cn(1);
  const Rational& C = map.distortion();
  mpz_pow_ui(cn.get_num_mpz_t(), C.get_num_mpz_t(), cyl.word.size());
  mpz_pow_ui(cn.get_den_mpz_t(), C.get_den_mpz_t(), cyl.word.size());
  cn.canonicalize();
  cyl.bound_lo = Rational(1) / (cn * pg);
  cyl.bound_hi = cn / pg;
  cyl.bound_lo->canonicalize();
  cyl.bound_hi->canonicalize();
}

std::size_t matrix_bits(const IntMobius& m) {
  auto bits = [](const Integer& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); };
  return bits(m.a) + bits(m.b) + bits(m.c) + bits(m.d);
}

// Closed real interval with outward rounding.
struct Ival {
  BigFloat lo, hi;
};

Ival ival(const Integer& z, mpfr_prec_t p) { return {BigFloat(z, Round::down, p), BigFloat(z, Round::up, p)}; }

Ival add(const Ival& a, const Ival& b) {
  return {BigFloat::add(a.lo, b.lo, Round::down), BigFloat::add(a.hi, b.hi, Round::up)};
}

Ival mul(const Ival& a, const Ival& b) {
  const BigFloat* xs[2] = {&a.lo, &a.hi};
  const BigFloat* ys[2] = {&b.lo, &b.hi};
  BigFloat lo = BigFloat::mul(a.lo, b.lo, Round::down), hi = BigFloat::mul(a.lo, b.lo, Round::up);
  for (auto* x : xs)
    for (auto* y : ys) {
      BigFloat d = BigFloat::mul(*x, *y, Round::down), u = BigFloat::mul(*x, *y, Round::up);
      if (d < lo) lo = d;
      if (hi < u) hi = u;
    }
  return {lo, hi};
}

Ival divide(const Ival& a, const Ival& b) {
  bool positive = mpfr_sgn(b.lo.get()) > 0;
  bool negative = mpfr_sgn(b.hi.get()) < 0;
  if (!positive && !negative) throw Error(ErrorKind::boundary, "outward cylinder evaluation crossed a pole");
  BigFloat one(1.0, b.lo.precision());
  Ival r{BigFloat::div(one, b.hi, Round::down), BigFloat::div(one, b.lo, Round::up)};
  return mul(a, r);
}

struct IvalMobius {
  Ival a, b, c, d;
};

IvalMobius compose(const IvalMobius& f, const IvalMobius& g) {
  return {add(mul(f.a, g.a), mul(f.b, g.c)), add(mul(f.a, g.b), mul(f.b, g.d)),
          add(mul(f.c, g.a), mul(f.d, g.c)), add(mul(f.c, g.b), mul(f.d, g.d))};
}

struct InverseFactor {
  IvalMobius m;
  Integer det;
};

InverseFactor interval_inverse(const MapSpec& map, const Digit& digit, mpfr_prec_t p) {
  if (digit.exact()) {
    IntMobius m = map.inverse_branch(digit.value());
    return {{ival(m.a, p), ival(m.b, p), ival(m.c, p), ival(m.d, p)}, m.determinant()};
  }
  if (map.family() == MapFamily::user)
    throw Error(ErrorKind::out_of_range, "log-scaled digit beyond the finite branch list of map '" + map.name() + "'");
  // The digit is known to double precision in log scale; widen accordingly.
  double slack = std::max(1.0, digit.log()) * 4 * std::numeric_limits<double>::epsilon();
  BigFloat ld(digit.log() - slack, p), lu(digit.log() + slack, p);
  Ival n{BigFloat::exp(ld, Round::down), BigFloat::exp(lu, Round::up)};
  Ival zero = ival(Integer(0), p), one = ival(Integer(1), p), minus_one = ival(Integer(-1), p);
  // Builtin inverse branches have determinant -1 (Gauss) and 1 (Renyi) for every digit.
  if (map.family() == MapFamily::gauss) return {{zero, one, one, n}, Integer(-1)};
  return {{one, add(n, minus_one), one, n}, Integer(1)};
}

BigFloat min_abs(const Ival& v) {
  if (mpfr_sgn(v.lo.get()) > 0) return v.lo;
  if (mpfr_sgn(v.hi.get()) < 0) return BigFloat::sub(BigFloat(0.0, v.hi.precision()), v.hi, Round::down);
  throw Error(ErrorKind::boundary, "outward cylinder evaluation crossed a pole");
}

CylinderInterval outward_cylinder(const MapSpec& map, const DigitWord& word, mpfr_prec_t p) {
  CylinderInterval cyl;
  cyl.word = word;
  cyl.exact = false;
  Ival zero = ival(Integer(0), p), one = ival(Integer(1), p);
  IvalMobius m{one, zero, zero, one};
  Integer det = 1;
  for (const auto& digit : word) {
    InverseFactor f = interval_inverse(map, digit, p);
    m = compose(m, f.m);
    det *= f.det;
  }
  Ival e0 = divide(m.b, m.d), e1 = divide(add(m.a, m.b), add(m.c, m.d));
  BigFloat mid0 = BigFloat::add(e0.lo, e0.hi, Round::nearest), mid1 = BigFloat::add(e1.lo, e1.hi, Round::nearest);
  const Ival& lo = mid0 <= mid1 ? e0 : e1;
  const Ival& hi = mid0 <= mid1 ? e1 : e0;
  cyl.lo_down = lo.lo;
  cyl.hi_up = hi.hi;
  // |M(1) - M(0)| = |det| / |d (c + d)|, free of endpoint cancellation.
  BigFloat denom = BigFloat::mul(min_abs(m.d), min_abs(add(m.c, m.d)), Round::down);
  cyl.diameter_up = BigFloat::div(BigFloat(Integer(abs(det)), Round::up, p), denom, Round::up);
  attach_bounds(map, cyl);
  return cyl;
}

Rational apply(const IntMobius& m, const Rational& x) {
  Rational out = Rational(m.a * x + m.b) / Rational(m.c * x + m.d);
  out.canonicalize();
  return out;
}

}  // namespace

double CylinderInterval::log_diameter() const {
  if (exact) return log_abs(diameter);
  return diameter_up->log();
}

double CylinderInterval::midpoint() const {
  if (exact) {
    Rational mid = (lo + hi) / 2;
    return mid.get_d();
  }
  return BigFloat::add(*lo_down, *hi_up, Round::nearest).to_double() / 2;
}

bool CylinderInterval::bounds_hold() const {
  if (exact && bound_lo && bound_hi) return *bound_lo <= diameter && diameter <= *bound_hi;
  double ld = log_diameter();
  double slack = 1e-12 * std::max({1.0, std::fabs(log_bound_lo), std::fabs(log_bound_hi)});
  // Outward mode only knows an upper bound on the diameter.
  bool lower_ok = !exact || log_bound_lo <= ld + slack;
  return lower_ok && ld <= log_bound_hi + slack;
}

bool CylinderInterval::contains(const Rational& x) const {
  if (exact) return lo <= x && x <= hi;
  BigFloat bx(x, Round::nearest, lo_down->precision());
  return *lo_down <= bx && bx <= *hi_up;
}

bool CylinderInterval::contains(const CylinderInterval& inner) const {
  if (!exact || !inner.exact) throw Error(ErrorKind::usage, "containment test needs exact cylinders");
  return lo <= inner.lo && inner.hi <= hi;
}

IntMobius inverse_word(const MapSpec& map, const DigitWord& word) {
  IntMobius m = IntMobius::identity();
  for (const auto& d : word) m = m * map.inverse_branch(d.value());
  return m;
}

CylinderInterval cylinder_from_matrix(const MapSpec& map, DigitWord word, const IntMobius& inverse) {
  CylinderInterval cyl;
  cyl.word = std::move(word);
  Rational y0(inverse.b, inverse.d);
  Rational y1(Integer(inverse.a + inverse.b), Integer(inverse.c + inverse.d));
  y0.canonicalize();
  y1.canonicalize();
  cyl.lo = std::min(y0, y1);
  cyl.hi = std::max(y0, y1);
  cyl.diameter = cyl.hi - cyl.lo;
  attach_bounds(map, cyl);
  return cyl;
}

CylinderInterval cylinder(const MapSpec& map, const DigitWord& word, const CylinderOptions& opts) {
  if (word.empty()) throw Error(ErrorKind::usage, "cylinder needs a nonempty word");
  bool all_exact = std::all_of(word.begin(), word.end(), [](const Digit& d) { return d.exact(); });
  if (all_exact) {
    IntMobius m = IntMobius::identity();
    bool within = true;
    for (const auto& d : word) {
      m = m * map.inverse_branch(d.value());
      if (matrix_bits(m) > opts.bit_budget) {
        within = false;
        break;
      }
    }
    if (within) return cylinder_from_matrix(map, word, m);
  }
  if (!opts.allow_outward)
    throw Error(ErrorKind::bit_budget, "word " + to_string(word) + " exceeds the exact bit budget of " +
                                           std::to_string(opts.bit_budget) + " bits");
  // Endpoints agree to about 2 log2(i1...in) bits; carry enough to resolve the difference.
  double bits = 2 * log_product(word) / std::log(2.0) + 64.0 * static_cast<double>(word.size()) + 128;
  auto p = std::max<mpfr_prec_t>(opts.precision, static_cast<mpfr_prec_t>(std::min(bits, static_cast<double>(opts.bit_budget))));
  return outward_cylinder(map, word, p);
}

void for_each_cylinder(const MapSpec& map, std::size_t max_length, unsigned long max_digit,
                       const std::function<void(const CylinderInterval&)>& visit) {
  std::vector<IntMobius> inverses;
  for (unsigned long d = 1; d <= max_digit; ++d) inverses.push_back(map.inverse_branch(Integer(d)));
  DigitWord word;
  std::vector<IntMobius> stack{IntMobius::identity()};
  std::function<void()> recurse = [&] {
    for (unsigned long d = 1; d <= max_digit; ++d) {
      word.emplace_back(d);
      stack.push_back(stack.back() * inverses[d - 1]);
      visit(cylinder_from_matrix(map, word, stack.back()));
      if (word.size() < max_length) recurse();
      stack.pop_back();
      word.pop_back();
    }
  };
  if (max_length > 0) recurse();
}

OrbitRecord encode(const MapSpec& map, const Rational& x, std::size_t depth) {
  OrbitRecord rec;
  rec.point = x;
  Rational y = x;
  for (std::size_t k = 0; k < depth; ++k) {
    auto n = map.locate(y);
    if (!n)
      throw Error(ErrorKind::exceptional_orbit,
                  "T^" + std::to_string(k) + "(x) = " + to_string(y) + " lies in the exceptional set Q (step " +
                      std::to_string(k) + ")",
                  k);
    BranchSpec b = map.branch(*n);
    rec.orbit.push_back(y);
    rec.word.emplace_back(*n);
    rec.derivative_logs.push_back(log_abs(branch_derivative(b, y)));
    y = apply(b.map, y);
  }
  return rec;
}

DigitStream periodic_stream(DigitWord period) {
  if (period.empty()) throw Error(ErrorKind::usage, "digit stream needs at least one digit");
  return [p = std::move(period)](std::size_t k) { return p[k % p.size()]; };
}

DecodeResult decode(const MapSpec& map, const DigitStream& digits, const DecodeOptions& opts) {
  if (!(opts.tolerance > 0)) throw Error(ErrorKind::usage, "decode tolerance must be positive");
  Rational tol = rational_from_double(opts.tolerance);
  DigitWord word;
  IntMobius m = IntMobius::identity();
  for (std::size_t k = 0; k < opts.iteration_cap; ++k) {
    Digit d = digits(k);
    word.push_back(d);
    m = m * map.inverse_branch(d.value());
    CylinderInterval cyl = cylinder_from_matrix(map, word, m);
    if (cyl.diameter < tol) {
      DecodeResult out;
      out.depth = k + 1;
      out.point = cyl.midpoint();
      out.cylinder = std::move(cyl);
      return out;
    }
  }
  throw Error(ErrorKind::non_contracting,
              "cylinders still wider than the tolerance after " + std::to_string(opts.iteration_cap) +
                  " digits; the map may violate the expansion hypotheses");
}

}  // namespace fastlyap
