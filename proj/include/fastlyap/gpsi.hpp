#ifndef FASTLYAP_GPSI_HPP
#define FASTLYAP_GPSI_HPP

#include <optional>
#include <string>
#include <vector>

#include "fastlyap/sequence.hpp"

namespace fastlyap {

enum class GpsiCase { simple, b_infinite, b_finite, b_one };
const char* to_string(GpsiCase c) noexcept;

struct CrossoverRecord {
  std::size_t j = 0;
  std::size_t n_j = 0, n_next = 0;  // anchors n_j < n_(j+1)
  std::size_t n_hat = 0;            // last n with f_j(n) >= h_j(n)
  double f_log_base = 0;            // log of the per-step factor of f_j (b case)
  double h_log_base = 0;            // log of the per-step factor of h_j
};

struct GpsiResult {
  GpsiCase case_label = GpsiCase::simple;
  double epsilon = 0;
  double b = 0;  // b estimate used
  std::size_t horizon = 0;
  Array log_g;    // log g(n), n = 1..horizon
  Array log_psi;  // log psi(n), n = 1..horizon
  std::vector<std::size_t> contacts;  // k_n (simple) or anchors n_j (appendix), within the horizon
  std::vector<std::size_t> k;         // simple: k_n per n (may exceed the horizon)
  std::vector<CrossoverRecord> crossovers;
  bool partial = false;  // appendix: fewer than two anchors inside the horizon
  std::string note;
};

struct SimpleOptions {
  std::size_t run = 64;                        // non-improving k before the search may stop
  std::size_t scan_cap = std::size_t{1} << 20;  // hard limit on k - n
};

// g(n) = inf_k c_{n,k}, c_{n,k} = psi(k)(b+eps)^(n-k) for k <= n and psi(k) for k > n.
GpsiResult gpsi_simple(const Sequence& psi, double b, double epsilon, std::size_t horizon, const SimpleOptions& opts = {});

struct AppendixOptions {
  std::optional<GpsiCase> force_case;
  std::size_t lookahead = 0;  // indices used to certify anchors; 0 = 2 * horizon
  double b_one_tolerance = 0.05;
};

GpsiResult gpsi_appendix(const Sequence& psi, double epsilon, std::size_t horizon, const AppendixOptions& opts = {});

// Horizon-restricted checks shared by both constructions.
struct GpsiCheck {
  std::size_t not_monotone = 0;
  std::size_t above_psi = 0;
  std::size_t contact_mismatch = 0;
  std::size_t ratio_violations = 0;  // simple: ratio above b+eps
  double final_window_ratio = 0;     // max g(n+1)/g(n) over the final tenth
  bool ok() const { return not_monotone + above_psi + contact_mismatch + ratio_violations == 0; }
};

GpsiCheck check_gpsi(const GpsiResult& g, double log_tol = 1e-9);

}  // namespace fastlyap

#endif  // FASTLYAP_GPSI_HPP
