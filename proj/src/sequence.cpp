#include "fastlyap/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "fastlyap/error.hpp"

namespace fastlyap {

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

Array prefix_sums(const Array& v) {
  Array out(v.size());
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc.add(v[i]);
    out[i] = acc.value();
  }
  return out;
}

double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

TailExtremes tail_extremes(const Array& v, Eigen::Index window, Eigen::Index start) {
  if (v.size() == 0) throw Error(ErrorKind::usage, "tail extremes of an empty sequence");
  window = std::clamp<Eigen::Index>(window, 1, v.size());
  start = std::clamp<Eigen::Index>(start, 0, v.size() - 1);
  TailExtremes t;
  auto tail = v.tail(window);
  t.window_sup = tail.maxCoeff();
  t.window_inf = tail.minCoeff();
  auto run = v.segment(start, v.size() - start);
  t.running_sup = run.maxCoeff();
  t.running_inf = run.minCoeff();
  return t;
}

double Sequence::Impl::log_log(std::size_t n) const { return std::log(log(n)); }

BigFloat Sequence::Impl::log_big(std::size_t n, mpfr_prec_t prec) const { return BigFloat(log(n), prec); }

namespace {

void require_index(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::usage, "sequences are indexed from n = 1");
}

double rat_log(const Rational& q) { return log_abs(q); }

BigFloat rat_log_big(const Rational& q, mpfr_prec_t prec) {
  return BigFloat::log(BigFloat(q, Round::nearest, prec), Round::nearest);
}

Rational rat_pow(const Rational& r, unsigned long e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), r.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), r.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

constexpr std::size_t exact_bit_cap = 1u << 16;

class PowerImpl final : public Sequence::Impl {
 public:
  PowerImpl(double p, double c) : p_(p), c_(c) {}
  double log(std::size_t n) const override { return std::log(c_) + p_ * std::log(static_cast<double>(n)); }
  std::optional<Rational> exact(std::size_t n) const override {
    if (p_ != std::floor(p_) || p_ < 0 || p_ > 64) return std::nullopt;
    return rational_from_double(c_) * rat_pow(Rational(static_cast<unsigned long>(n)), static_cast<unsigned long>(p_));
  }
  BigFloat log_big(std::size_t n, mpfr_prec_t prec) const override {
    BigFloat ln = BigFloat::log(BigFloat(Integer(static_cast<unsigned long>(n)), Round::nearest, prec), Round::nearest);
    BigFloat out = BigFloat::mul(BigFloat(p_, prec), ln, Round::nearest);
    return BigFloat::add(out, BigFloat::log(BigFloat(c_, prec), Round::nearest), Round::nearest);
  }
  std::string describe() const override {
    return "power:" + std::to_string(p_) + (c_ != 1.0 ? ":" + std::to_string(c_) : "");
  }

 private:
  double p_, c_;
};

class ExponentialImpl final : public Sequence::Impl {
 public:
  ExponentialImpl(Rational r, Rational c) : r_(std::move(r)), c_(std::move(c)), log_r_(rat_log(r_)), log_c_(rat_log(c_)) {}
  double log(std::size_t n) const override { return log_c_ + static_cast<double>(n) * log_r_; }
  double log_log(std::size_t n) const override {
    if (log_c_ == 0.0 && log_r_ > 0) return std::log(static_cast<double>(n)) + std::log(log_r_);
    return std::log(log(n));
  }
  std::optional<Rational> exact(std::size_t n) const override {
    if (static_cast<double>(n) * static_cast<double>(bit_size(r_)) > exact_bit_cap) return std::nullopt;
    return c_ * rat_pow(r_, n);
  }
  BigFloat log_big(std::size_t n, mpfr_prec_t prec) const override {
    BigFloat nn(Integer(static_cast<unsigned long>(n)), Round::nearest, prec);
    return BigFloat::add(rat_log_big(c_, prec), BigFloat::mul(nn, rat_log_big(r_, prec), Round::nearest),
                         Round::nearest);
  }
  std::string describe() const override {
    return "exp:" + to_string(r_) + (c_ != 1 ? ":" + to_string(c_) : "");
  }

 private:
  Rational r_, c_;
  double log_r_, log_c_;
};

class NaturalExpImpl final : public Sequence::Impl {
 public:
  explicit NaturalExpImpl(double k) : k_(k) {}
  double log(std::size_t n) const override { return k_ * static_cast<double>(n); }
  double log_log(std::size_t n) const override { return std::log(k_) + std::log(static_cast<double>(n)); }
  BigFloat log_big(std::size_t n, mpfr_prec_t prec) const override {
    return BigFloat::mul(BigFloat(k_, prec), BigFloat(Integer(static_cast<unsigned long>(n)), Round::nearest, prec),
                         Round::nearest);
  }
  std::string describe() const override { return k_ == 1.0 ? "e" : "e:" + std::to_string(k_); }

 private:
  double k_;
};

class NlognImpl final : public Sequence::Impl {
 public:
  double log(std::size_t n) const override {
    double x = static_cast<double>(n);
    return std::log(x) + std::log(std::log1p(x));
  }
  std::string describe() const override { return "nlogn"; }
};

class TowerImpl final : public Sequence::Impl {
 public:
  TowerImpl(Rational b, Rational c) : b_(std::move(b)), c_(std::move(c)), log_b_(rat_log(b_)), log_c_(rat_log(c_)) {
    if (b_ <= 1 || c_ <= 1) throw Error(ErrorKind::out_of_range, "tower b^(c^n) needs b > 1 and c > 1");
  }
  double log(std::size_t n) const override { return std::exp(log_log(n)); }
  double log_log(std::size_t n) const override { return static_cast<double>(n) * log_c_ + std::log(log_b_); }
  std::optional<Rational> exact(std::size_t n) const override {
    if (!is_integer(c_)) return std::nullopt;
    double bits = std::exp(static_cast<double>(n) * log_c_) * static_cast<double>(bit_size(b_));
    if (bits > exact_bit_cap) return std::nullopt;
    Integer e;
    mpz_pow_ui(e.get_mpz_t(), c_.get_num_mpz_t(), n);
    return rat_pow(b_, e.get_ui());
  }
  BigFloat log_big(std::size_t n, mpfr_prec_t prec) const override {
    BigFloat cn(prec);
    BigFloat c(c_, Round::nearest, prec);
    mpfr_pow_ui(cn.get(), c.get(), n, MPFR_RNDN);
    return BigFloat::mul(cn, rat_log_big(b_, prec), Round::nearest);
  }
  std::string describe() const override { return "tower:" + to_string(b_) + ":" + to_string(c_); }

 private:
  Rational b_, c_;
  double log_b_, log_c_;
};

class AlternatingImpl final : public Sequence::Impl {
 public:
  AlternatingImpl(Rational even, Rational odd)
      : even_(std::move(even)), odd_(std::move(odd)), log_even_(rat_log(even_)), log_odd_(rat_log(odd_)) {}
  double log(std::size_t n) const override {
    return static_cast<double>(n) * (n % 2 == 0 ? log_even_ : log_odd_);
  }
  std::optional<Rational> exact(std::size_t n) const override {
    const Rational& r = n % 2 == 0 ? even_ : odd_;
    if (static_cast<double>(n) * static_cast<double>(bit_size(r)) > exact_bit_cap) return std::nullopt;
    return rat_pow(r, n);
  }
  std::string describe() const override { return "alternating:" + to_string(even_) + ":" + to_string(odd_); }

 private:
  Rational even_, odd_;
  double log_even_, log_odd_;
};

// Blocks end at n_k = 1! + ... + k!. On (n_{2k-1}, n_{2k}] the sequence grows by 4
// per step, on (n_{2k}, n_{2k+1}] by 3, and each switch into a ratio-4 block
// carries an extra factor 5/3.
class FactorialBlockImpl final : public Sequence::Impl {
 public:
  FactorialBlockImpl() {
    std::uint64_t fact = 1, total = 0;
    for (std::uint64_t k = 1; k <= 19; ++k) {
      fact *= k;
      total += fact;
      ends_.push_back(total);
      facts_.push_back(fact);
    }
  }
  double log(std::size_t n) const override {
    if (n == 1) return 0.0;
    // Find block k with n_{k-1} < n <= n_k (n_0 = 0).
    std::size_t k = 0;
    while (k < ends_.size() && ends_[k] < n) ++k;
    if (k == ends_.size()) throw Error(ErrorKind::truncation, "factorial-block sequence exceeds its tabulated blocks");
    std::size_t block = k + 1;  // 1-based block number
    const double l53 = std::log(5.0 / 3.0), l4 = std::log(4.0), l3 = std::log(3.0);
    double x = static_cast<double>(n);
    if (block % 2 == 0) {
      std::size_t half = block / 2;
      double so = 0;  // sum of odd factorials (2i-1)!, i <= half
      for (std::size_t i = 1; i <= half; ++i) so += static_cast<double>(facts_[2 * i - 2]);
      return static_cast<double>(half - 1) * l53 + (x - so) * l4 + so * l3;
    }
    std::size_t half = (block - 1) / 2;
    double se = 0;  // sum of even factorials (2i)!, i <= half
    for (std::size_t i = 1; i <= half; ++i) se += static_cast<double>(facts_[2 * i - 1]);
    return static_cast<double>(half) * l53 + se * l4 + (x - se) * l3;
  }
  std::optional<std::size_t> horizon() const override { return static_cast<std::size_t>(ends_.back()); }
  std::string describe() const override { return "factorial_block"; }

 private:
  std::vector<std::uint64_t> ends_, facts_;
};

class ConstantImpl final : public Sequence::Impl {
 public:
  explicit ConstantImpl(Rational v) : v_(std::move(v)), log_v_(rat_log(v_)) {}
  double log(std::size_t) const override { return log_v_; }
  std::optional<Rational> exact(std::size_t) const override { return v_; }
  std::string describe() const override { return "const:" + to_string(v_); }

 private:
  Rational v_;
  double log_v_;
};

class TableImpl final : public Sequence::Impl {
 public:
  TableImpl(std::vector<double> logs, std::vector<Rational> exact, std::string label)
      : logs_(std::move(logs)), exact_(std::move(exact)), label_(std::move(label)) {}
  double log(std::size_t n) const override {
    if (n > logs_.size())
      throw Error(ErrorKind::truncation,
                  label_ + " has " + std::to_string(logs_.size()) + " entries; n = " + std::to_string(n) + " requested", n);
    return logs_[n - 1];
  }
  std::optional<Rational> exact(std::size_t n) const override {
    if (exact_.empty()) return std::nullopt;
    log(n);
    return exact_[n - 1];
  }
  std::optional<std::size_t> horizon() const override { return logs_.size(); }
  std::string describe() const override { return label_ + "[" + std::to_string(logs_.size()) + "]"; }

 private:
  std::vector<double> logs_;
  std::vector<Rational> exact_;
  std::string label_;
};

class FunctionImpl final : public Sequence::Impl {
 public:
  FunctionImpl(std::function<double(std::size_t)> fn, std::string label, std::optional<std::size_t> horizon)
      : fn_(std::move(fn)), label_(std::move(label)), horizon_(horizon) {}
  double log(std::size_t n) const override {
    if (horizon_ && n > *horizon_)
      throw Error(ErrorKind::truncation, label_ + " is defined only up to n = " + std::to_string(*horizon_), n);
    return fn_(n);
  }
  std::optional<std::size_t> horizon() const override { return horizon_; }
  std::string describe() const override { return label_; }

 private:
  std::function<double(std::size_t)> fn_;
  std::string label_;
  std::optional<std::size_t> horizon_;
};

class StarImpl final : public Sequence::Impl {
 public:
  explicit StarImpl(Sequence base) : base_(std::move(base)) {}
  double log(std::size_t n) const override { return std::log(static_cast<double>(n)) + base_.log(n); }
  std::optional<Rational> exact(std::size_t n) const override {
    auto v = base_.exact(n);
    if (!v) return std::nullopt;
    return Rational(static_cast<unsigned long>(n)) * *v;
  }
  std::optional<std::size_t> horizon() const override { return base_.horizon(); }
  std::string describe() const override { return "star(" + base_.describe() + ")"; }

 private:
  Sequence base_;
};

class ScaledImpl final : public Sequence::Impl {
 public:
  ScaledImpl(Sequence base, double lambda) : base_(std::move(base)), log_lambda_(std::log(lambda)), lambda_(lambda) {}
  double log(std::size_t n) const override { return log_lambda_ + base_.log(n); }
  std::optional<std::size_t> horizon() const override { return base_.horizon(); }
  std::string describe() const override { return std::to_string(lambda_) + "*" + base_.describe(); }

 private:
  Sequence base_;
  double log_lambda_, lambda_;
};

}  // namespace

Sequence Sequence::power(double p, double c) {
  if (!(c > 0)) throw Error(ErrorKind::out_of_range, "power family needs c > 0");
  return Sequence(std::make_shared<PowerImpl>(p, c));
}

Sequence Sequence::exponential(const Rational& r, const Rational& c) {
  if (r <= 0 || c <= 0) throw Error(ErrorKind::out_of_range, "exponential family needs r > 0 and c > 0");
  return Sequence(std::make_shared<ExponentialImpl>(r, c));
}

Sequence Sequence::natural_exp(double k) {
  if (!(k > 0)) throw Error(ErrorKind::out_of_range, "e^(k n) needs k > 0");
  return Sequence(std::make_shared<NaturalExpImpl>(k));
}

Sequence Sequence::nlogn() { return Sequence(std::make_shared<NlognImpl>()); }

Sequence Sequence::tower(const Rational& b, const Rational& c) { return Sequence(std::make_shared<TowerImpl>(b, c)); }

Sequence Sequence::alternating(const Rational& r_even, const Rational& r_odd) {
  if (r_even <= 0 || r_odd <= 0) throw Error(ErrorKind::out_of_range, "alternating family needs positive ratios");
  return Sequence(std::make_shared<AlternatingImpl>(r_even, r_odd));
}

Sequence Sequence::factorial_block() { return Sequence(std::make_shared<FactorialBlockImpl>()); }

Sequence Sequence::constant(const Rational& v) {
  if (v <= 0) throw Error(ErrorKind::out_of_range, "constant sequence must be positive");
  return Sequence(std::make_shared<ConstantImpl>(v));
}

Sequence Sequence::table_log(std::vector<double> log_values, std::string label) {
  for (std::size_t i = 0; i < log_values.size(); ++i)
    if (std::isnan(log_values[i]) || log_values[i] == -INFINITY)
      throw Error(ErrorKind::malformed, label + ": entry " + std::to_string(i + 1) + " is not positive");
  return Sequence(std::make_shared<TableImpl>(std::move(log_values), std::vector<Rational>{}, std::move(label)));
}

Sequence Sequence::table(const std::vector<Rational>& values, std::string label) {
  std::vector<double> logs;
  logs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0) throw Error(ErrorKind::malformed, label + ": entry " + std::to_string(i + 1) + " is not positive");
    logs.push_back(log_abs(values[i]));
  }
  return Sequence(std::make_shared<TableImpl>(std::move(logs), values, std::move(label)));
}

Sequence Sequence::from_log(std::function<double(std::size_t)> log_fn, std::string label,
                            std::optional<std::size_t> horizon) {
  return Sequence(std::make_shared<FunctionImpl>(std::move(log_fn), std::move(label), horizon));
}

double Sequence::log(std::size_t n) const {
  require_index(n);
  return impl_->log(n);
}

double Sequence::value(std::size_t n) const { return std::exp(log(n)); }

Array Sequence::log_values(std::size_t count) const {
  Array out(static_cast<Eigen::Index>(count));
  for (std::size_t n = 1; n <= count; ++n) out[static_cast<Eigen::Index>(n - 1)] = log(n);
  return out;
}

Sequence Sequence::star() const { return Sequence(std::make_shared<StarImpl>(*this)); }

Sequence Sequence::scaled(double lambda) const {
  if (!(lambda > 0)) throw Error(ErrorKind::out_of_range, "scale factor must be positive");
  return Sequence(std::make_shared<ScaledImpl>(*this, lambda));
}

}  // namespace fastlyap
