#include "fastlyap/exponents.hpp"

#include <algorithm>
#include <cmath>

#include "fastlyap/error.hpp"

namespace fastlyap {

Array ExponentTrace::lyapunov_partials() const {
  Array out(log_deriv_sum.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = log_deriv_sum[i] / static_cast<double>(i + 1);
  return out;
}

ExponentTrace trace(const OrbitRecord& orbit) {
  ExponentTrace t;
  t.n = orbit.word.size();
  Array dl(static_cast<Eigen::Index>(t.n)), al(static_cast<Eigen::Index>(t.n));
  for (std::size_t i = 0; i < t.n; ++i) {
    dl[static_cast<Eigen::Index>(i)] = orbit.derivative_logs[i];
    al[static_cast<Eigen::Index>(i)] = orbit.word[i].log();
  }
  t.log_deriv_sum = prefix_sums(dl);
  t.digit_log_sum = prefix_sums(al);
  t.log_pi = t.digit_log_sum;
  return t;
}

ExponentTrace trace(const MapSpec& map, const Rational& x, std::size_t depth) { return trace(encode(map, x, depth)); }

ExponentTrace trace_word(const MapSpec& map, const DigitWord& word) {
  if (word.empty()) return ExponentTrace{0, Array(0), Array(0), Array(0)};
  CylinderInterval cyl = cylinder(map, word, CylinderOptions{std::size_t{1} << 20, false});
  Rational mid = (cyl.lo + cyl.hi) / 2;
  mid.canonicalize();
  return trace(map, mid, word.size());
}

Array chain_rule_gap(const ExponentTrace& t, double gamma) {
  return (gamma * t.digit_log_sum - t.log_deriv_sum).abs();
}

std::vector<std::size_t> chain_rule_violations(const ExponentTrace& t, double gamma, double log_C) {
  Array gap = chain_rule_gap(t, gamma);
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < gap.size(); ++i)
    if (gap[i] > static_cast<double>(i + 1) * log_C) out.push_back(static_cast<std::size_t>(i + 1));
  return out;
}

FastPartials fast_exponent_partials(const ExponentTrace& t, const Sequence& psi) {
  FastPartials f;
  auto n = static_cast<Eigen::Index>(t.n);
  f.value.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lp = psi.log(static_cast<std::size_t>(i + 1));
    if (!std::isfinite(lp)) throw Error(ErrorKind::usage, "psi(" + std::to_string(i + 1) + ") is not a positive finite value");
    f.value[i] = t.log_deriv_sum[i] * std::exp(-lp);
  }
  f.upper.resize(n);
  f.lower.resize(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    f.upper[i] = i + 1 < n ? std::max(f.value[i], f.upper[i + 1]) : f.value[i];
    f.lower[i] = i + 1 < n ? std::min(f.value[i], f.lower[i + 1]) : f.value[i];
  }
  return f;
}

DigitStatistics digit_statistics(const DigitWord& word, std::size_t window) {
  if (word.size() < 2) throw Error(ErrorKind::usage, "digit statistics need a word of length at least 2");
  DigitStatistics s;
  auto len = static_cast<Eigen::Index>(word.size());
  Array logs(len);
  for (Eigen::Index i = 0; i < len; ++i) logs[i] = word[static_cast<std::size_t>(i)].log();
  Array sums = prefix_sums(logs);
  s.kappa_partial.resize(len);
  for (Eigen::Index i = 0; i < len; ++i) s.kappa_partial[i] = sums[i] / static_cast<double>(i + 1);
  for (Eigen::Index i = 0; i + 1 < len; ++i) {
    if (sums[i] > 0)
      s.tau_partial.emplace_back(1.0 + logs[i + 1] / sums[i]);
    else
      s.tau_partial.emplace_back(std::nullopt);
  }
  s.window = window == 0 ? std::max<std::size_t>(1, word.size() / 4) : std::min(window, word.size());
  auto w = static_cast<Eigen::Index>(s.window);
  s.kappa_estimate = s.kappa_partial[len - 1];
  s.kappa_window_sup = s.kappa_partial.tail(w).maxCoeff();
  s.kappa_window_inf = s.kappa_partial.tail(w).minCoeff();
  std::size_t tw = std::min(s.window, s.tau_partial.size());
  for (std::size_t i = s.tau_partial.size() - tw; i < s.tau_partial.size(); ++i)
    if (s.tau_partial[i]) s.tau_estimate = s.tau_estimate ? std::max(*s.tau_estimate, *s.tau_partial[i]) : *s.tau_partial[i];
  return s;
}

}  // namespace fastlyap
