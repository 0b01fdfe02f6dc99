#ifndef FASTLYAP_SEQUENCE_HPP
#define FASTLYAP_SEQUENCE_HPP

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fastlyap/bigfloat.hpp"
#include "fastlyap/rational.hpp"

namespace fastlyap {

using Array = Eigen::ArrayXd;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// out[i] = v[0] + ... + v[i], compensated.
Array prefix_sums(const Array& v);

// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add_exp(double a, double b);

// Extremes of v over index ranges. `window` covers the final `window` entries,
// `running` covers [start, size).
struct TailExtremes {
  double window_sup = 0, window_inf = 0;
  double running_sup = 0, running_inf = 0;
};
TailExtremes tail_extremes(const Array& v, Eigen::Index window, Eigen::Index start = 0);

// Positive real sequence indexed from n = 1, represented through its logarithm so
// that values like b^(c^n) stay usable. Cheap to copy (shared immutable state).
class Sequence {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual double log(std::size_t n) const = 0;
    // log(log value); defaults to std::log(log(n)).
    virtual double log_log(std::size_t n) const;
    // Exact value when it is a rational of modest size.
    virtual std::optional<Rational> exact(std::size_t) const { return std::nullopt; }
    // High-precision log value; defaults to the double.
    virtual BigFloat log_big(std::size_t n, mpfr_prec_t prec) const;
    virtual std::optional<std::size_t> horizon() const { return std::nullopt; }
    virtual std::string describe() const = 0;
  };

  explicit Sequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  // c * n^p
  static Sequence power(double p, double c = 1.0);
  // c * r^n; r and c are read exactly, so integer bases give exact values.
  static Sequence exponential(const Rational& r, const Rational& c = Rational(1));
  // e^(k n)
  static Sequence natural_exp(double k = 1.0);
  // n * log(n + 1)
  static Sequence nlogn();
  // b^(c^n)
  static Sequence tower(const Rational& b, const Rational& c);
  // r_even^n at even n, r_odd^n at odd n.
  static Sequence alternating(const Rational& r_even, const Rational& r_odd);
  // Piecewise block example with blocks at n_k = 1! + ... + k!.
  static Sequence factorial_block();
  static Sequence constant(const Rational& v);
  // Tabulated log-values; entry i is n = i + 1.
  static Sequence table_log(std::vector<double> log_values, std::string label = "table");
  static Sequence table(const std::vector<Rational>& values, std::string label = "table");
  // Arbitrary log-value generator.
  static Sequence from_log(std::function<double(std::size_t)> log_fn, std::string label,
                           std::optional<std::size_t> horizon = std::nullopt);

  double log(std::size_t n) const;
  double log_log(std::size_t n) const { return impl_->log_log(n); }
  double value(std::size_t n) const;
  std::optional<Rational> exact(std::size_t n) const { return impl_->exact(n); }
  BigFloat log_big(std::size_t n, mpfr_prec_t prec = default_precision()) const {
    return impl_->log_big(n, prec);
  }
  std::optional<std::size_t> horizon() const { return impl_->horizon(); }
  std::string describe() const { return impl_->describe(); }

  // log values for n = 1..count.
  Array log_values(std::size_t count) const;

  // n * value(n)
  Sequence star() const;
  // lambda * value(n)
  Sequence scaled(double lambda) const;

 private:
  std::shared_ptr<const Impl> impl_;
};

// Deterministic parallel loop: body(i) for i in [0, count); callers write results
// into preallocated slots so output never depends on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body body, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace fastlyap

#endif  // FASTLYAP_SEQUENCE_HPP
