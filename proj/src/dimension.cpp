#include "fastlyap/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fastlyap/error.hpp"

namespace fastlyap {

namespace {

Rational at_zero(const IntMobius& m) {
  Rational q(m.b, m.d);
  q.canonicalize();
  return q;
}

Rational at_one(const IntMobius& m) {
  Rational q(Integer(m.a + m.b), Integer(m.c + m.d));
  q.canonicalize();
  return q;
}

// Hull of the cylinders m o inv(k) for k in [lo, hi].
std::pair<Rational, Rational> window_hull(const MapSpec& map, const IntMobius& m, const DigitWindow& w) {
  IntMobius first = m * map.inverse_branch(w.lo), last = m * map.inverse_branch(w.hi);
  Rational e[4] = {at_zero(first), at_one(first), at_zero(last), at_one(last)};
  return {*std::min_element(e, e + 4), *std::max_element(e, e + 4)};
}

double log_rational(const Rational& q) { return log_abs(q); }

Array running_liminf(const Array& v) {
  Array out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Eigen::Index from = i / 2;
    out[i] = v.segment(from, i - from + 1).minCoeff();
  }
  return out;
}

BoundEstimate finish(Array values) {
  BoundEstimate r;
  r.running_liminf = running_liminf(values);
  auto window = std::max<Eigen::Index>(1, values.size() / 4);
  r.estimate = tail_extremes(values, window).window_inf;
  r.values = std::move(values);
  return r;
}

}  // namespace

std::vector<double> BasicIntervalTree::log_m() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(log_abs(l.m));
  return out;
}

std::vector<double> BasicIntervalTree::log_min_gap() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(log_rational(l.min_gap));
  return out;
}

std::vector<double> BasicIntervalTree::log_count() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(std::log(static_cast<double>(l.intervals.size())));
  return out;
}

std::vector<double> BasicIntervalTree::log_max_diameter() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(log_rational(l.max_diameter));
  return out;
}

BasicIntervalTree enumerate_basic_intervals(const MapSpec& map, const SequencePair& pair, std::size_t depth,
                                            const TreeOptions& opts) {
  if (depth == 0) throw Error(ErrorKind::usage, "depth must be positive");
  std::vector<DigitWindow> windows;
  double nodes = 0, level_nodes = 1;
  for (std::size_t n = 1; n <= depth + 1; ++n) {
    DigitWindow w = digit_window(pair, n);
    if (w.size() < 2)
      throw Error(ErrorKind::construction,
                  "window (s_n, s_n + t_n] holds fewer than two integers at n = " + std::to_string(n), n);
    if (w.hi > Integer(opts.digit_cap))
      throw Error(ErrorKind::construction, "window at n = " + std::to_string(n) + " exceeds the digit cap", n);
    if (auto count = map.branch_count(); count && w.hi > Integer(static_cast<unsigned long>(*count)))
      throw Error(ErrorKind::construction, "window at n = " + std::to_string(n) + " exceeds the branch count", n);
    if (n <= depth) {
      level_nodes *= w.size().get_d();
      nodes += level_nodes;
    }
    windows.push_back(w);
  }
  if (nodes > static_cast<double>(opts.node_budget))
    throw Error(ErrorKind::construction, "basic-interval tree needs " + std::to_string(static_cast<long long>(nodes)) +
                                             " nodes; budget is " + std::to_string(opts.node_budget));

  BasicIntervalTree tree;
  tree.depth = depth;

  // theta = min s_k / t_k over the windows in use.
  std::optional<Rational> theta_exact = Rational(0);
  double log_theta = INFINITY;
  for (std::size_t k = 1; k <= depth + 1; ++k) {
    log_theta = std::min(log_theta, pair.s.log(k) - pair.t.log(k));
    auto s = pair.s.exact(k), t = pair.t.exact(k);
    if (theta_exact && s && t) {
      Rational r = *s / *t;
      if (k == 1 || r < *theta_exact) theta_exact = r;
    } else {
      theta_exact.reset();
    }
  }
  tree.theta = std::exp(log_theta);
  const double gamma = map.gamma();
  const bool gamma_int = gamma == std::floor(gamma) && gamma < 64;

  auto root = window_hull(map, IntMobius::identity(), windows[0]);
  std::vector<BasicInterval> parents{{DigitWord{}, IntMobius::identity(), root.first, root.second, 0}};

  CompensatedSum log_s_prefix;
  std::optional<Rational> s_prefix = Rational(1);
  for (std::size_t n = 1; n <= depth; ++n) {
    const DigitWindow& w = windows[n - 1];
    const DigitWindow& next = windows[n];
    const auto m = static_cast<std::size_t>(w.size().get_ui());
    BasicIntervalLevel level;
    level.n = n;
    level.m = w.size();
    level.children_seen = w.size();
    level.intervals.resize(parents.size() * m);
    std::vector<char> inside(parents.size(), 1);
    parallel_for(
        parents.size(),
        [&](std::size_t p) {
          const BasicInterval& parent = parents[p];
          for (std::size_t j = 0; j < m; ++j) {
            Integer digit = w.lo + j;
            BasicInterval& child = level.intervals[p * m + j];
            child.word = parent.word;
            child.word.emplace_back(digit);
            child.inverse = parent.inverse * map.inverse_branch(digit);
            std::tie(child.lo, child.hi) = window_hull(map, child.inverse, next);
            child.parent = p;
            if (child.lo < parent.lo || child.hi > parent.hi) inside[p] = 0;
          }
        },
        opts.workers);
    level.contained = std::all_of(inside.begin(), inside.end(), [](char c) { return c != 0; });

    // Sibling gaps and level-wide disjointness.
    std::vector<std::size_t> order(level.intervals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return level.intervals[a].lo < level.intervals[b].lo; });
    bool have_gap = false;
    level.max_diameter = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& cur = level.intervals[order[i]];
      Rational diam = cur.hi - cur.lo;
      if (diam > level.max_diameter) level.max_diameter = diam;
      if (i == 0) continue;
      const auto& prev = level.intervals[order[i - 1]];
      if (!(prev.hi < cur.lo)) level.disjoint = false;
      if (prev.parent == cur.parent) {
        Rational gap = cur.lo - prev.hi;
        if (!have_gap || gap < level.min_gap) level.min_gap = gap;
        have_gap = true;
      }
    }

    // Analytic bound on sibling gaps at this level.
    log_s_prefix.add(pair.s.log(n));
    auto s = pair.s.exact(n);
    if (s_prefix && s) *s_prefix *= *s;
    else s_prefix.reset();
    double ng = static_cast<double>(n) * gamma;
    level.log_gap_bound = -static_cast<double>(n + 1) * map.log_distortion() -
                          ng * std::log1p(1.0 / tree.theta) - gamma * log_s_prefix.value();
    if (gamma_int && theta_exact && s_prefix) {
      auto g = static_cast<unsigned long>(gamma);
      Rational factor = (1 + 1 / *theta_exact);
      Rational base = 1;
      for (std::size_t i = 0; i < n + 1; ++i) base *= map.distortion();
      Rational f = 1;
      for (std::size_t i = 0; i < n * g; ++i) f *= factor;
      Rational sp = 1;
      for (unsigned long i = 0; i < g; ++i) sp *= *s_prefix;
      level.gap_bound = 1 / (base * f * sp);
      level.gap_bound_holds = level.min_gap >= *level.gap_bound;
    } else {
      level.gap_bound_holds = log_rational(level.min_gap) >= level.log_gap_bound - 1e-9 * std::fabs(level.log_gap_bound);
    }
    parents = level.intervals;
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

BoundEstimate falconer_lower(const std::vector<double>& log_m, const std::vector<double>& log_eps) {
  if (log_m.size() != log_eps.size() || log_m.empty())
    throw Error(ErrorKind::usage, "child counts and gaps must be non-empty and of equal length");
  Array values(static_cast<Eigen::Index>(log_m.size()));
  CompensatedSum prefix;
  for (std::size_t n = 0; n < log_m.size(); ++n) {
    if (log_m[n] < std::log(2.0) - 1e-12)
      throw Error(ErrorKind::out_of_range, "lower bound needs m_n >= 2; fails at n = " + std::to_string(n + 1), n + 1);
    if (n > 0 && !(log_eps[n] < log_eps[n - 1]))
      throw Error(ErrorKind::out_of_range, "gaps must decrease strictly; fails at n = " + std::to_string(n + 1), n + 1);
    double denom = -(log_m[n] + log_eps[n]);
    if (!(denom > 0))
      throw Error(ErrorKind::out_of_range, "m_n eps_n must be below 1; fails at n = " + std::to_string(n + 1), n + 1);
    values[static_cast<Eigen::Index>(n)] = prefix.value() / denom;
    prefix.add(log_m[n]);
  }
  return finish(std::move(values));
}

BoundEstimate cover_upper(const std::vector<double>& log_N, const std::vector<double>& log_delta) {
  if (log_N.size() != log_delta.size() || log_N.empty())
    throw Error(ErrorKind::usage, "counts and diameters must be non-empty and of equal length");
  Array values(static_cast<Eigen::Index>(log_N.size()));
  for (std::size_t n = 0; n < log_N.size(); ++n) {
    if (n > 0 && log_delta[n] > log_delta[n - 1])
      throw Error(ErrorKind::out_of_range, "cover diameters increase at n = " + std::to_string(n + 1), n + 1);
    if (!(log_delta[n] < 0))
      throw Error(ErrorKind::out_of_range, "cover diameter must be below 1 at n = " + std::to_string(n + 1), n + 1);
    values[static_cast<Eigen::Index>(n)] = log_N[n] / -log_delta[n];
  }
  if (!(log_delta.back() < log_delta.front()))
    throw Error(ErrorKind::out_of_range, "cover diameters do not shrink over the horizon");
  return finish(std::move(values));
}

TruncatedDimension e_set_dimension_formula(const SequencePair& pair, double gamma, std::size_t horizon) {
  if (!(gamma > 1)) throw Error(ErrorKind::out_of_range, "gamma must exceed 1");
  if (horizon < 4) throw Error(ErrorKind::usage, "formula horizon must be at least 4");
  const std::size_t M = horizon + 1;
  bool loglog = true;
  for (std::size_t k = 1; k <= M && loglog; ++k) loglog = pair.s.log(k) > 0 && pair.t.log(k) > 0;

  TruncatedDimension r;
  r.horizon = horizon;
  r.values.resize(static_cast<Eigen::Index>(horizon));
  if (loglog) {
    // u = log log t, v = log log s; sums of logs are kept as log-sum-exp.
    Array u(M), v(M);
    for (std::size_t k = 1; k <= M; ++k) {
      u[static_cast<Eigen::Index>(k - 1)] = pair.t.log_log(k);
      v[static_cast<Eigen::Index>(k - 1)] = pair.s.log_log(k);
    }
    // Growth of the mean of log s_k, compared at horizon/2 and horizon.
    double lse = -INFINITY, half = 0;
    double log_theta = INFINITY;
    for (std::size_t k = 1; k <= horizon; ++k) {
      auto i = static_cast<Eigen::Index>(k - 1);
      lse = log_add_exp(lse, v[i]);
      if (k == horizon / 2) half = lse - std::log(static_cast<double>(k));
      double d = u[i] - v[i];
      if (d > 0) log_theta = std::min(log_theta, -std::exp(u[i]) * -std::expm1(-d));
      else log_theta = std::min(log_theta, 0.0 + (d == 0 ? 0.0 : std::exp(v[i]) * -std::expm1(d)));
    }
    double full = lse - std::log(static_cast<double>(horizon));
    if (!(full > half))
      throw Error(ErrorKind::hypothesis, "mean of log s_k does not grow over the horizon (needs sum log s_k / n -> infinity)");
    if (!(std::exp(log_theta) > 0))
      throw Error(ErrorKind::hypothesis, "inf s_n / t_n is not bounded away from 0 over the horizon");
    double num = -INFINITY, den = -INFINITY;
    den = log_add_exp(den, v[0]);
    for (std::size_t n = 1; n <= horizon; ++n) {
      auto i = static_cast<Eigen::Index>(n - 1);
      num = log_add_exp(num, u[i]);
      den = log_add_exp(den, v[i + 1]);
      double top = std::max({num, den, u[i + 1]});
      double denom = gamma * std::exp(den - top) - std::exp(u[i + 1] - top);
      r.values[i] = std::exp(num - top) / denom;
    }
  } else {
    PairCheck check = check_pair(pair, horizon);
    if (!check.growth_ok)
      throw Error(ErrorKind::hypothesis, "mean of log s_k does not grow over the horizon (needs sum log s_k / n -> infinity)");
    if (!check.ratio_ok)
      throw Error(ErrorKind::hypothesis, "inf s_n / t_n is not bounded away from 0 over the horizon");
    CompensatedSum num, den;
    den.add(pair.s.log(1));
    for (std::size_t n = 1; n <= horizon; ++n) {
      num.add(pair.t.log(n));
      den.add(pair.s.log(n + 1));
      r.values[static_cast<Eigen::Index>(n - 1)] = num.value() / (gamma * den.value() - pair.t.log(n + 1));
    }
  }
  r.running_liminf = running_liminf(r.values);
  r.estimate = tail_extremes(r.values, std::max<Eigen::Index>(1, r.values.size() / 4)).window_inf;
  return r;
}

namespace {

// Number of positive integer n-tuples with product <= x.
class ProductCounter {
 public:
  std::uint64_t operator()(std::size_t n, std::uint64_t x) {
    if (x == 0) return 0;
    if (n == 0) return 1;
    if (n == 1) return x;
    auto key = std::make_pair(n, x);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::uint64_t total = 0;
    // Group first factors sharing the same quotient x / s.
    for (std::uint64_t s = 1; s <= x;) {
      std::uint64_t q = x / s, last = x / q;
      total += (last - s + 1) * (*this)(n - 1, q);
      s = last + 1;
    }
    memo_.emplace(key, total);
    return total;
  }

 private:
  std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> memo_;
};

}  // namespace

TupleCount count_product_tuples(std::size_t n, std::size_t k) {
  if (n < 1 || n > 4) throw Error(ErrorKind::out_of_range, "tuple count needs 1 <= n <= 4");
  if (k > 4) throw Error(ErrorKind::out_of_range, "tuple count needs 0 <= k <= 4");
  ProductCounter count;
  TupleCount r;
  r.n = n;
  r.k = k;
  r.count = count(n, std::uint64_t{1} << ((k + 1) * n)) - count(n, std::uint64_t{1} << (k * n));
  r.bound = std::pow(std::exp(1.0) * static_cast<double>(k + 2) * std::ldexp(1.0, static_cast<int>(k + 1)),
                     static_cast<double>(n));
  return r;
}

}  // namespace fastlyap
