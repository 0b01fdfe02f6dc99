#ifndef FASTLYAP_SCALING_HPP
#define FASTLYAP_SCALING_HPP

#include <optional>
#include <string>

#include "fastlyap/sequence.hpp"

namespace fastlyap {

using ScalingFunction = Sequence;

enum class EstimateMode { window, running };
const char* to_string(EstimateMode m) noexcept;

// Both truncations of a tail extreme: over the final window and over [start, horizon].
struct TailEstimate {
  double window = 0;
  double running = 0;
  double get(EstimateMode m) const { return m == EstimateMode::window ? window : running; }
};

struct ScalingInvariants {
  std::size_t horizon = 0, window = 0, start = 1;
  TailEstimate beta;  // sup of psi(n+1)/psi(n)
  TailEstimate B;     // sup of psi(n)^(1/n)
  TailEstimate b;     // inf of psi(n)^(1/n)
  bool superlinear = false;
  bool equiv_increasing = false;  // heuristic
};

// window = 0 selects horizon/4; start is the first index of the running extremes.
ScalingInvariants invariants(const ScalingFunction& psi, std::size_t horizon, std::size_t window = 0,
                             std::size_t start = 2);

struct EquivalenceResult {
  bool flag = false;
  Array ratio;  // psi(n) / max_{k<=n} psi(k)
  double window_min_ratio = 0;
  std::size_t window = 0;
};

// Running-max envelope test over the final quarter of the horizon. Heuristic.
EquivalenceResult is_equivalent_increasing(const ScalingFunction& psi, std::size_t horizon, double tol = 0.1,
                                           std::size_t window = 0);

inline ScalingFunction psi_star(const ScalingFunction& psi) { return psi.star(); }

// Ratios above this are reported as infinite.
inline constexpr double xi_cap = 1e12;

// Tail sup of phi(n+1) / (phi(1) + ... + phi(n)).
TailEstimate xi(const ScalingFunction& phi, std::size_t horizon, std::size_t window = 0);

}  // namespace fastlyap

#endif  // FASTLYAP_SCALING_HPP
