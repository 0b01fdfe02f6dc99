#ifndef FASTLYAP_CODING_HPP
#define FASTLYAP_CODING_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastlyap/bigfloat.hpp"
#include "fastlyap/maps.hpp"

namespace fastlyap {

// Positive integer digit. Digits are exact integers unless they were produced
// from a log-scale description that exceeds the bit budget, in which case only
// their natural log is kept.
class Digit {
 public:
  Digit(unsigned long v) : Digit(Integer(v)) {}  // NOLINT: digits read naturally as integers
  Digit(int v) : Digit(Integer(v)) {}            // NOLINT
  Digit(Integer v);                              // NOLINT
  static Digit log_only(double log_value);

  bool exact() const { return exact_; }
  const Integer& value() const;
  double log() const { return log_; }
  // Decimal for digits below 2^63, "exp(x)" otherwise.
  std::string to_string() const;

  friend bool operator==(const Digit& a, const Digit& b);

 private:
  Digit() = default;
  Integer value_;
  double log_ = 0;
  bool exact_ = true;
};

using DigitWord = std::vector<Digit>;

DigitWord make_word(std::initializer_list<unsigned long> digits);
std::string to_string(const DigitWord& word);
double log_product(const DigitWord& word);

struct CylinderOptions {
  std::size_t bit_budget = std::size_t{1} << 20;
  bool allow_outward = true;
  mpfr_prec_t precision = default_precision();
};

struct CylinderInterval {
  DigitWord word;
  bool exact = true;
  // Exact mode.
  Rational lo, hi, diameter;
  // Outward-rounded mode: lo_down <= true lo, hi_up >= true hi.
  std::optional<BigFloat> lo_down, hi_up, diameter_up;
  // C^-n / (i1...in)^gamma and C^n / (i1...in)^gamma; rational when gamma is an integer.
  std::optional<Rational> bound_lo, bound_hi;
  double log_bound_lo = 0, log_bound_hi = 0;

  double log_diameter() const;
  double midpoint() const;
  bool bounds_hold() const;
  bool contains(const Rational& x) const;
  bool contains(const CylinderInterval& inner) const;
};

// Composition of inverse branches i1 o ... o in, exact.
IntMobius inverse_word(const MapSpec& map, const DigitWord& word);

CylinderInterval cylinder(const MapSpec& map, const DigitWord& word, const CylinderOptions& opts = {});
// Cylinder from a precomputed inverse-word matrix (used by enumerations).
CylinderInterval cylinder_from_matrix(const MapSpec& map, DigitWord word, const IntMobius& inverse);

// Depth-first enumeration of every word with length <= max_length and digits
// in 1..max_digit, reusing prefix products. Visitor sees words in lexicographic order.
void for_each_cylinder(const MapSpec& map, std::size_t max_length, unsigned long max_digit,
                       const std::function<void(const CylinderInterval&)>& visit);

struct OrbitRecord {
  Rational point;
  std::vector<Rational> orbit;  // T^0 x, ..., T^(n-1) x
  DigitWord word;
  std::vector<double> derivative_logs;  // log|T'(T^(k-1) x)|
};

OrbitRecord encode(const MapSpec& map, const Rational& x, std::size_t depth);

using DigitStream = std::function<Digit(std::size_t)>;  // 0-based position -> digit
DigitStream periodic_stream(DigitWord period);

struct DecodeOptions {
  double tolerance = 1e-12;
  std::size_t iteration_cap = 4096;
};

struct DecodeResult {
  double point = 0;
  CylinderInterval cylinder;
  std::size_t depth = 0;
};

DecodeResult decode(const MapSpec& map, const DigitStream& digits, const DecodeOptions& opts = {});

}  // namespace fastlyap

#endif  // FASTLYAP_CODING_HPP
