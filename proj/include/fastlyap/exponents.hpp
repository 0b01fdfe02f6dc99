#ifndef FASTLYAP_EXPONENTS_HPP
#define FASTLYAP_EXPONENTS_HPP

#include <optional>
#include <vector>

#include "fastlyap/coding.hpp"
#include "fastlyap/sequence.hpp"

namespace fastlyap {

// Prefix sums along an orbit; entry i is the sum over the first i+1 steps.
struct ExponentTrace {
  std::size_t n = 0;
  Array log_deriv_sum;
  Array digit_log_sum;
  Array log_pi;  // log of the digit product, identical to digit_log_sum

  Array lyapunov_partials() const;
};

ExponentTrace trace(const MapSpec& map, const Rational& x, std::size_t depth);
ExponentTrace trace(const OrbitRecord& orbit);
// Trace of the exact midpoint of the cylinder of `word` (so the orbit follows the word).
ExponentTrace trace_word(const MapSpec& map, const DigitWord& word);

// |gamma * digit_log_sum - log_deriv_sum| per prefix; at prefix n it is at most n log C.
Array chain_rule_gap(const ExponentTrace& t, double gamma);
// 1-based prefixes where the gap exceeds n log C.
std::vector<std::size_t> chain_rule_violations(const ExponentTrace& t, double gamma, double log_C);

struct FastPartials {
  Array value;  // log_deriv_sum[n] / psi(n)
  Array upper;  // sup of value over [n, depth]
  Array lower;  // inf of value over [n, depth]
};

FastPartials fast_exponent_partials(const ExponentTrace& t, const Sequence& psi);

struct DigitStatistics {
  Array kappa_partial;                       // sum log a_k / n, n = 1..len
  std::vector<std::optional<double>> tau_partial;  // 1 + log a_(n+1) / sum_1^n log a_k, n = 1..len-1
  std::size_t window = 0;
  double kappa_estimate = 0;  // final prefix value
  double kappa_window_sup = 0, kappa_window_inf = 0;
  std::optional<double> tau_estimate;  // sup over the final window of defined entries
};

// window = 0 selects the last quarter of the word.
DigitStatistics digit_statistics(const DigitWord& word, std::size_t window = 0);

}  // namespace fastlyap

#endif  // FASTLYAP_EXPONENTS_HPP
