#include "fastlyap/rational.hpp"

#include <cmath>
#include <string>

#include "fastlyap/error.hpp"

namespace fastlyap {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::malformed: return "malformed";
    case ErrorKind::boundary: return "boundary";
    case ErrorKind::exceptional_orbit: return "exceptional_orbit";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::construction: return "construction";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::bit_budget: return "bit_budget";
    case ErrorKind::non_contracting: return "non_contracting";
    case ErrorKind::out_of_range: return "out_of_range";
  }
  return "unknown";
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool all_digits(const std::string& s, std::size_t from = 0) {
  if (from >= s.size()) return false;
  for (std::size_t i = from; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace

Integer parse_integer(std::string_view text) {
  std::string s = trim(text);
  std::size_t from = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (!all_digits(s, from)) throw Error(ErrorKind::malformed, "not an integer: '" + s + "'");
  if (s[0] == '+') s.erase(0, 1);
  return Integer(s, 10);
}

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::malformed, "empty rational");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer p = parse_integer(std::string_view(s).substr(0, slash));
    Integer q = parse_integer(std::string_view(s).substr(slash + 1));
    if (q == 0) throw Error(ErrorKind::malformed, "zero denominator in '" + s + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  auto dot = s.find('.');
  auto exp_pos = s.find_first_of("eE");
  if (dot == std::string::npos && exp_pos == std::string::npos) return Rational(parse_integer(s));
  // Decimal with optional exponent, read exactly.
  std::string mantissa = s.substr(0, exp_pos);
  long exponent = 0;
  if (exp_pos != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(exp_pos + 1), &used);
      if (used != s.size() - exp_pos - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::malformed, "bad exponent in '" + s + "'");
    }
  }
  std::string digits = mantissa;
  long frac = 0;
  if (auto d = mantissa.find('.'); d != std::string::npos) {
    frac = static_cast<long>(mantissa.size() - d - 1);
    digits.erase(d, 1);
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
  }
  Integer num = parse_integer(digits);
  long shift = exponent - frac;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational r = shift >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::usage, "non-finite value has no rational form");
  Rational r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

Integer floor(const Rational& q) {
  Integer z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return z;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

double log_abs(const Integer& z) {
  if (z == 0) return -INFINITY;
  long exp2 = 0;
  double m = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(exp2) * std::log(2.0);
}

double log_abs(const Rational& q) { return log_abs(q.get_num()) - log_abs(q.get_den()); }

std::size_t bit_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

}  // namespace fastlyap
