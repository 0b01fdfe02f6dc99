#include "fastlyap/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "fastlyap/error.hpp"

namespace fastlyap {

const char* to_string(EstimateMode m) noexcept { return m == EstimateMode::window ? "window" : "running"; }

namespace {

std::size_t resolve_window(std::size_t window, std::size_t horizon) {
  if (window == 0) return std::max<std::size_t>(1, horizon / 4);
  if (window > horizon / 2)
    throw Error(ErrorKind::usage, "window " + std::to_string(window) + " exceeds horizon/2 = " + std::to_string(horizon / 2));
  return window;
}

void check_horizon(const ScalingFunction& psi, std::size_t horizon) {
  if (horizon < 4) throw Error(ErrorKind::usage, "horizon must be at least 4");
  if (auto h = psi.horizon(); h && *h < horizon)
    throw Error(ErrorKind::truncation, psi.describe() + " is defined only up to n = " + std::to_string(*h), *h);
}

}  // namespace

ScalingInvariants invariants(const ScalingFunction& psi, std::size_t horizon, std::size_t window, std::size_t start) {
  check_horizon(psi, horizon);
  ScalingInvariants inv;
  inv.horizon = horizon;
  inv.window = resolve_window(window, horizon);
  inv.start = std::clamp<std::size_t>(start, 1, horizon - 1);
  Array logs = psi.log_values(horizon);
  auto H = static_cast<Eigen::Index>(horizon);
  auto w = static_cast<Eigen::Index>(inv.window);
  auto s0 = static_cast<Eigen::Index>(inv.start - 1);

  // log of psi(n+1)/psi(n) for n = 1..H-1 and log psi(n)/n for n = 1..H.
  Array log_ratio = logs.tail(H - 1) - logs.head(H - 1);
  Array log_root(H);
  for (Eigen::Index i = 0; i < H; ++i) log_root[i] = logs[i] / static_cast<double>(i + 1);

  TailExtremes r = tail_extremes(log_ratio, std::min(w, H - 1), s0);
  TailExtremes q = tail_extremes(log_root, w, s0);
  inv.beta = {std::exp(r.window_sup), std::exp(r.running_sup)};
  inv.B = {std::exp(q.window_sup), std::exp(q.running_sup)};
  inv.b = {std::exp(q.window_inf), std::exp(q.running_inf)};

  // psi(n)/n over the final window should stay above its value at horizon/2.
  double mid = logs[H / 2 - 1] - std::log(static_cast<double>(H / 2));
  double tail_min = INFINITY;
  for (Eigen::Index i = H - w; i < H; ++i) tail_min = std::min(tail_min, logs[i] - std::log(static_cast<double>(i + 1)));
  inv.superlinear = tail_min > mid;
  inv.equiv_increasing = is_equivalent_increasing(psi, std::max<std::size_t>(horizon, 8), 0.1, 0).flag;
  return inv;
}

EquivalenceResult is_equivalent_increasing(const ScalingFunction& psi, std::size_t horizon, double tol,
                                           std::size_t window) {
  if (horizon < 8) throw Error(ErrorKind::usage, "equivalence test needs horizon >= 8");
  if (auto h = psi.horizon(); h && *h < horizon)
    throw Error(ErrorKind::truncation, psi.describe() + " is defined only up to n = " + std::to_string(*h), *h);
  EquivalenceResult out;
  out.window = window == 0 ? horizon / 4 : std::min(window, horizon);
  Array logs = psi.log_values(horizon);
  out.ratio.resize(logs.size());
  double envelope = -INFINITY;
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    envelope = std::max(envelope, logs[i]);
    out.ratio[i] = std::exp(logs[i] - envelope);
  }
  out.window_min_ratio = out.ratio.tail(static_cast<Eigen::Index>(out.window)).minCoeff();
  out.flag = out.window_min_ratio >= 1.0 - tol;
  return out;
}

TailEstimate xi(const ScalingFunction& phi, std::size_t horizon, std::size_t window) {
  check_horizon(phi, horizon);
  std::size_t w = resolve_window(window, horizon);
  // ratio for n = 1..horizon-1
  Array ratio(static_cast<Eigen::Index>(horizon - 1));
  double log_sum = -INFINITY;
  for (std::size_t n = 1; n < horizon; ++n) {
    log_sum = log_add_exp(log_sum, phi.log(n));
    double next = phi.log(n + 1);
    if (!std::isfinite(log_sum) && !std::isfinite(next))
      throw Error(ErrorKind::truncation, "phi overflows the log domain at n = " + std::to_string(n), n);
    double lr = next - log_sum;
    double r = std::isfinite(lr) ? std::exp(lr) : (lr > 0 ? INFINITY : 0.0);
    if (std::isnan(lr)) r = INFINITY;
    ratio[static_cast<Eigen::Index>(n - 1)] = r > xi_cap ? INFINITY : r;
  }
  TailExtremes t = tail_extremes(ratio, static_cast<Eigen::Index>(std::min(w, horizon - 1)), 0);
  return {t.window_sup, t.running_sup};
}

}  // namespace fastlyap
