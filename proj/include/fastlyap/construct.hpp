#ifndef FASTLYAP_CONSTRUCT_HPP
#define FASTLYAP_CONSTRUCT_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fastlyap/coding.hpp"
#include "fastlyap/sequence.hpp"

namespace fastlyap {

struct SequencePair {
  Sequence s, t;
};

struct PairCheck {
  double theta = 0;           // min s_n / t_n over the horizon
  double growth_half = 0;     // sum log s_k / n at horizon/2
  double growth_full = 0;     // sum log s_k / n at horizon
  bool ratio_ok = false;      // theta > 0
  bool growth_ok = false;     // growth_full > growth_half
};

PairCheck check_pair(const SequencePair& pair, std::size_t horizon);

// Integers in the window (s_n, s_n + t_n], as [lo, hi]; lo > hi means empty.
struct DigitWindow {
  Integer lo, hi;
  bool empty() const { return lo > hi; }
  Integer size() const { return empty() ? Integer(0) : Integer(hi - lo + 1); }
};

// Exact when s_n, t_n are exact rationals, otherwise resolved with MPFR at enough
// precision to separate the values from neighbouring integers.
DigitWindow digit_window(const SequencePair& pair, std::size_t n, std::size_t bit_budget = std::size_t{1} << 20);

enum class DigitRule { smallest, midpoint };

DigitWord e_set_digits(const SequencePair& pair, std::size_t depth, DigitRule rule = DigitRule::smallest,
                       std::size_t bit_budget = std::size_t{1} << 20);

enum class DSetMode { eventually, infinitely_often };

// Minimal digits with log(a_1...a_n) >= c^n log b at every n (eventually) or at the
// indices in `subsequence` (infinitely_often; other digits are 1).
DigitWord d_set_digits(const Rational& b, const Rational& c, std::size_t depth, DSetMode mode,
                       const std::set<std::size_t>& subsequence = {}, std::size_t bit_budget = std::size_t{1} << 20);

// All n with Pi_(n+1) > max(Pi_n^d, b^(d^(n+1))), compared in log scale.
std::vector<std::size_t> luczak_witnesses(const DigitWord& word, double b, double c, double d);

struct LPIndexReport {
  std::vector<std::size_t> indices;  // 1-based
  std::size_t horizon = 0;
  // Indices at or beyond this point rest on a short tail and are provisional.
  std::size_t provisional_from = 0;
};

LPIndexReport l_indices(const Array& a);
LPIndexReport p_indices(const Array& c);

struct JointIndexResult {
  std::optional<std::size_t> index;
  // First n from which a/c was observed strictly increasing up to the horizon.
  std::optional<std::size_t> monotone_from;
};

// Smallest n* > N that is an L-index of a and a P-index of c (sequences are 1-based,
// given as log values so that huge sequences compare safely).
JointIndexResult joint_index(const Array& log_a, const Array& log_c, std::size_t N);

enum class KeyCase { finite_b, b_one };

struct KeyIndexResult {
  std::optional<std::size_t> index;
  std::optional<std::size_t> monotone_from;
  bool verified = false;  // both inequalities checked over the whole horizon
};

// finite_b: psi(n) > (b-eps)^(n-n*) psi(n*) for n > n*, psi(n) > (b+eps)^(n-n*) psi(n*) for n < n*.
// b_one:    n* psi(n) > n psi(n*) for n > n*,     psi(n) > (1+eps)^(n-n*) psi(n*) for n < n*.
KeyIndexResult key_index(const Array& log_psi, double b, double epsilon, std::size_t N, KeyCase which);

struct FswResult {
  Array log_d;         // log d_n
  Array log_envelope;  // log E_n = sum_{k<=n} log d_k
  double B_plus_eps = 0;
};

// log E_n = max(max_{k<=n} alpha psi(k), sup_{k>n} alpha psi(k) (B+eps)^(n-k)).
FswResult fsw_sequence(const Sequence& psi, double alpha, double epsilon, std::size_t horizon, double B,
                       std::size_t run = 64, std::size_t scan_cap = std::size_t{1} << 20);

}  // namespace fastlyap

#endif  // FASTLYAP_CONSTRUCT_HPP
