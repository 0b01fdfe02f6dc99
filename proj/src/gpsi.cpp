#include "fastlyap/gpsi.hpp"

#include <algorithm>
#include <cmath>

#include "fastlyap/construct.hpp"
#include "fastlyap/error.hpp"

namespace fastlyap {

const char* to_string(GpsiCase c) noexcept {
  switch (c) {
    case GpsiCase::simple: return "simple";
    case GpsiCase::b_infinite: return "b_infinite";
    case GpsiCase::b_finite: return "b_finite";
    case GpsiCase::b_one: return "b_one";
  }
  return "?";
}

namespace {

bool near(double a, double b, double rel = 1e-12) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

void require_table(const Sequence& psi, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorKind::usage, "horizon must be positive");
  if (auto h = psi.horizon(); h && *h < horizon)
    throw Error(ErrorKind::truncation,
                psi.describe() + " has " + std::to_string(*h) + " values; horizon " + std::to_string(horizon) + " requested",
                *h);
}

}  // namespace

GpsiResult gpsi_simple(const Sequence& psi, double b, double epsilon, std::size_t horizon, const SimpleOptions& opts) {
  if (!(b >= 1) || std::isinf(b)) throw Error(ErrorKind::out_of_range, "simple construction needs a finite b >= 1");
  if (!(epsilon > 0)) throw Error(ErrorKind::out_of_range, "epsilon must be positive");
  require_table(psi, horizon);
  GpsiResult r;
  r.case_label = GpsiCase::simple;
  r.epsilon = epsilon;
  r.b = b;
  r.horizon = horizon;
  const double L = std::log(b + epsilon);
  std::vector<double> logs;
  auto log_psi = [&](std::size_t k) {
    try {
      while (logs.size() < k) logs.push_back(psi.log(logs.size() + 1));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::truncation) throw;
      throw Error(ErrorKind::truncation,
                  "infimum search needs psi beyond its " + std::to_string(logs.size()) + " tabulated values", logs.size());
    }
    return logs[k - 1];
  };
  r.log_g.resize(static_cast<Eigen::Index>(horizon));
  r.log_psi.resize(static_cast<Eigen::Index>(horizon));
  double min1 = INFINITY;  // min_{k<=n} log psi(k) - k L
  std::size_t arg1 = 0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    double cand = log_psi(n) - static_cast<double>(n) * L;
    if (cand < min1 && !near(cand, min1)) {
      min1 = cand;
      arg1 = n;
    }
    double value1 = min1 + static_cast<double>(n) * L;
    double best2 = INFINITY;
    std::size_t arg2 = 0, stale = 0;
    bool stopped = false;
    for (std::size_t k = n + 1; k <= n + opts.scan_cap; ++k) {
      double v = log_psi(k);
      if (v < best2 && !near(v, best2)) {
        best2 = v;
        arg2 = k;
        stale = 0;
      } else {
        ++stale;
      }
      if (stale >= opts.run && v > std::min(value1, best2)) {
        stopped = true;
        break;
      }
    }
    if (!stopped) throw Error(ErrorKind::truncation, "infimum search did not settle within the scan cap at n = " + std::to_string(n), n);
    bool first = value1 <= best2 || near(value1, best2);
    auto i = static_cast<Eigen::Index>(n - 1);
    r.log_g[i] = first ? value1 : best2;
    r.log_psi[i] = log_psi(n);
    r.k.push_back(first ? arg1 : arg2);
  }
  for (auto k : r.k)
    if (k <= horizon) r.contacts.push_back(k);
  std::sort(r.contacts.begin(), r.contacts.end());
  r.contacts.erase(std::unique(r.contacts.begin(), r.contacts.end()), r.contacts.end());
  return r;
}

namespace {

// g(n) = min(g(n+1), psi(n)) for n < first.
void backward_min(GpsiResult& r, std::size_t first) {
  for (std::size_t n = first - 1; n >= 1; --n) {
    auto i = static_cast<Eigen::Index>(n - 1);
    r.log_g[i] = std::min(r.log_g[i + 1], r.log_psi[i]);
  }
}

// Fallback when no anchor is certified: the suffix minimum over the lookahead.
void suffix_min_fallback(GpsiResult& r, const Array& logs) {
  double m = INFINITY;
  Array suffix(logs.size());
  for (Eigen::Index i = logs.size() - 1; i >= 0; --i) suffix[i] = m = std::min(m, logs[i]);
  r.log_g = suffix.head(static_cast<Eigen::Index>(r.horizon));
  for (std::size_t n = 1; n <= r.horizon; ++n)
    if (r.log_g[static_cast<Eigen::Index>(n - 1)] == r.log_psi[static_cast<Eigen::Index>(n - 1)]) r.contacts.push_back(n);
  r.partial = true;
  r.note = "no anchor certified inside the lookahead; suffix-minimum fallback";
}

GpsiCase detect_case(const Array& logs, std::size_t horizon, double b_hat, double tol) {
  auto root = [&](std::size_t n) { return logs[static_cast<Eigen::Index>(n - 1)] / static_cast<double>(n); };
  double late = root(horizon), mid = root(horizon / 2);
  if (late > std::log(4.0) && late - mid > std::log(1.5)) return GpsiCase::b_infinite;
  if (b_hat < 1 + tol) return GpsiCase::b_one;
  return GpsiCase::b_finite;
}

void build_b_infinite(GpsiResult& r, const Array& logs) {
  const auto M = logs.size();
  Array log_root(M);
  for (Eigen::Index i = 0; i < M; ++i) log_root[i] = logs[i] / static_cast<double>(i + 1);
  auto anchors = l_indices(log_root).indices;
  std::vector<std::size_t> used;
  for (auto a : anchors)
    if (log_root[static_cast<Eigen::Index>(a - 1)] > 0) used.push_back(a);
  if (used.empty() || used.front() > r.horizon) return suffix_min_fallback(r, logs);
  std::size_t block = 0;
  for (std::size_t n = used.front(); n <= r.horizon; ++n) {
    while (block + 1 < used.size() && used[block + 1] <= n) ++block;
    std::size_t nk = used[block];
    r.log_g[static_cast<Eigen::Index>(n - 1)] =
        static_cast<double>(n) * logs[static_cast<Eigen::Index>(nk - 1)] / static_cast<double>(nk);
  }
  backward_min(r, used.front());
  for (auto a : used)
    if (a <= r.horizon) r.contacts.push_back(a);
  r.partial = r.contacts.size() < 2;
}

// Shared by the finite-b and b = 1 cases: anchors n_j with per-block factors.
void build_blocks(GpsiResult& r, const Array& logs, bool b_one) {
  const double b = r.b, eps = r.epsilon;
  std::vector<std::size_t> anchors;
  std::vector<double> up_factor;  // log of the h-factor used to certify each anchor
  for (std::size_t j = 1;; ++j) {
    std::size_t N = anchors.empty() ? 0 : anchors.back();
    double e = b_one ? (j == 1 ? eps : 1.0 / static_cast<double>(anchors.back())) : eps / static_cast<double>(j);
    auto k = key_index(logs, b, e, N, b_one ? KeyCase::b_one : KeyCase::finite_b);
    if (!k.index) break;
    anchors.push_back(*k.index);
    up_factor.push_back(b_one ? std::log1p(e) : std::log(b + e));
    if (*k.index > r.horizon) break;
  }
  if (anchors.empty() || anchors.front() > r.horizon) return suffix_min_fallback(r, logs);
  auto lp = [&](std::size_t n) { return logs[static_cast<Eigen::Index>(n - 1)]; };
  auto f = [&](std::size_t j, std::size_t n) {  // j is 0-based block index
    std::size_t nj = anchors[j];
    if (b_one) return std::log(static_cast<double>(n)) + lp(nj) - std::log(static_cast<double>(nj));
    return (static_cast<double>(n) - static_cast<double>(nj)) * std::log(b - eps / static_cast<double>(j + 1)) + lp(nj);
  };
  auto h = [&](std::size_t j, std::size_t n) {
    std::size_t next = anchors[j + 1];
    return (static_cast<double>(n) - static_cast<double>(next)) * up_factor[j + 1] + lp(next);
  };
  for (std::size_t j = 0; j < anchors.size() && anchors[j] <= r.horizon; ++j) {
    std::size_t nj = anchors[j];
    bool closed = j + 1 < anchors.size();
    std::size_t end = closed ? std::min(anchors[j + 1], r.horizon) : r.horizon;
    CrossoverRecord rec;
    if (closed) {
      rec.j = j + 1;
      rec.n_j = nj;
      rec.n_next = anchors[j + 1];
      rec.n_hat = nj;
      rec.f_log_base = b_one ? 0.0 : std::log(b - eps / static_cast<double>(j + 1));
      rec.h_log_base = up_factor[j + 1];
      for (std::size_t n = nj; n < anchors[j + 1] && f(j, n) >= h(j, n); ++n) rec.n_hat = n;
    }
    for (std::size_t n = nj; n <= end; ++n) {
      double v = closed ? std::max(f(j, n), h(j, n)) : f(j, n);
      if (n == nj) v = lp(nj);
      if (closed && n == anchors[j + 1]) v = lp(n);
      r.log_g[static_cast<Eigen::Index>(n - 1)] = v;
    }
    if (closed) r.crossovers.push_back(rec);
    r.contacts.push_back(nj);
  }
  backward_min(r, anchors.front());
  r.partial = r.contacts.size() < 2;
  if (r.partial) r.note = "fewer than two anchors inside the horizon";
}

}  // namespace

GpsiResult gpsi_appendix(const Sequence& psi, double epsilon, std::size_t horizon, const AppendixOptions& opts) {
  if (!(epsilon > 0)) throw Error(ErrorKind::out_of_range, "epsilon must be positive");
  if (horizon < 8) throw Error(ErrorKind::usage, "appendix construction needs horizon >= 8");
  require_table(psi, horizon);
  std::size_t M = opts.lookahead ? opts.lookahead : 2 * horizon;
  if (auto h = psi.horizon()) M = std::min(M, *h);
  M = std::max(M, horizon);
  Array logs = psi.log_values(M);
  GpsiResult r;
  r.epsilon = epsilon;
  r.horizon = horizon;
  r.log_psi = logs.head(static_cast<Eigen::Index>(horizon));
  r.log_g = r.log_psi;
  // b estimate: inf of psi(n)^(1/n) over [H/2, lookahead].
  double b_log = INFINITY;
  for (std::size_t n = horizon / 2; n <= M; ++n)
    b_log = std::min(b_log, logs[static_cast<Eigen::Index>(n - 1)] / static_cast<double>(n));
  r.b = std::exp(b_log);
  r.case_label = opts.force_case ? *opts.force_case : detect_case(logs, horizon, r.b, opts.b_one_tolerance);
  switch (r.case_label) {
    case GpsiCase::b_infinite:
      r.b = INFINITY;
      build_b_infinite(r, logs);
      break;
    case GpsiCase::b_finite:
      if (!(epsilon < r.b - 1))
        throw Error(ErrorKind::out_of_range, "finite-b construction needs epsilon < b - 1 (b estimate " + std::to_string(r.b) + ")");
      build_blocks(r, logs, false);
      break;
    case GpsiCase::b_one:
      r.b = 1;
      build_blocks(r, logs, true);
      break;
    case GpsiCase::simple:
      throw Error(ErrorKind::usage, "use gpsi_simple for the simple construction");
  }
  return r;
}

GpsiCheck check_gpsi(const GpsiResult& g, double log_tol) {
  GpsiCheck c;
  auto H = g.log_g.size();
  for (Eigen::Index i = 0; i + 1 < H; ++i)
    if (g.log_g[i + 1] < g.log_g[i] - log_tol) ++c.not_monotone;
  for (Eigen::Index i = 0; i < H; ++i)
    if (g.log_g[i] > g.log_psi[i] + log_tol * std::max(1.0, std::fabs(g.log_psi[i]))) ++c.above_psi;
  for (auto k : g.contacts) {
    auto i = static_cast<Eigen::Index>(k - 1);
    if (std::fabs(g.log_g[i] - g.log_psi[i]) > log_tol * std::max(1.0, std::fabs(g.log_psi[i]))) ++c.contact_mismatch;
  }
  if (g.case_label == GpsiCase::simple) {
    double L = std::log(g.b + g.epsilon);
    for (Eigen::Index i = 0; i + 1 < H; ++i)
      if (g.log_g[i + 1] - g.log_g[i] > L + log_tol * std::max(1.0, std::fabs(g.log_g[i]))) ++c.ratio_violations;
  }
  Eigen::Index from = std::max<Eigen::Index>(0, H - std::max<Eigen::Index>(2, H / 10));
  double worst = 0;
  for (Eigen::Index i = from; i + 1 < H; ++i) worst = std::max(worst, g.log_g[i + 1] - g.log_g[i]);
  c.final_window_ratio = std::exp(worst);
  return c;
}

}  // namespace fastlyap
