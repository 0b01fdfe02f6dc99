#ifndef FASTLYAP_DIMENSION_HPP
#define FASTLYAP_DIMENSION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "fastlyap/coding.hpp"
#include "fastlyap/construct.hpp"

namespace fastlyap {

struct BasicInterval {
  DigitWord word;    // i_1..i_n
  IntMobius inverse; // inverse-branch product for word
  Rational lo, hi;   // hull of the next-level cylinders in the window
  std::size_t parent = 0;  // index in the previous level
};

struct BasicIntervalLevel {
  std::size_t n = 0;
  std::vector<BasicInterval> intervals;
  Integer m;               // window size, floor(s_n + t_n) - floor(s_n)
  Integer children_seen;   // smallest child count over parents
  Rational min_gap;        // between neighbouring siblings
  Rational max_diameter;
  // C^-(n+1) (1 + 1/theta)^(-n gamma) (s_1...s_n)^-gamma; exact when every factor is rational.
  std::optional<Rational> gap_bound;
  double log_gap_bound = 0;
  bool contained = true;   // every child inside its parent
  bool disjoint = true;    // intervals on the level pairwise disjoint
  bool gap_bound_holds = true;
};

struct BasicIntervalTree {
  std::size_t depth = 0;
  double theta = 0;
  std::vector<BasicIntervalLevel> levels;  // levels[i] has n = i + 1

  std::vector<double> log_m() const;
  std::vector<double> log_min_gap() const;
  std::vector<double> log_count() const;
  std::vector<double> log_max_diameter() const;
};

struct TreeOptions {
  unsigned long digit_cap = 1ul << 20;
  std::size_t node_budget = 1'000'000;
  unsigned workers = 0;
};

BasicIntervalTree enumerate_basic_intervals(const MapSpec& map, const SequencePair& pair, std::size_t depth,
                                            const TreeOptions& opts = {});

struct BoundEstimate {
  Array values;          // entry i is n = i + 1
  Array running_liminf;  // min over [n/2, n]
  double estimate = 0;   // inf over the final quarter
};

// log(m_1...m_{n-1}) / -log(m_n eps_n)
BoundEstimate falconer_lower(const std::vector<double>& log_m, const std::vector<double>& log_eps);
// log N_n / -log delta_n
BoundEstimate cover_upper(const std::vector<double>& log_N, const std::vector<double>& log_delta);

struct TruncatedDimension {
  std::size_t horizon = 0;
  Array values;  // entry i is n = i + 1
  Array running_liminf;
  double estimate = 0;
};

// sum_{k<=n} log t_k / (gamma sum_{k<=n+1} log s_k - log t_{n+1})
TruncatedDimension e_set_dimension_formula(const SequencePair& pair, double gamma, std::size_t horizon);

struct TupleCount {
  std::size_t n = 0, k = 0;
  std::uint64_t count = 0;
  double bound = 0;  // (e (k+2) 2^(k+1))^n
  bool within_bound() const { return static_cast<double>(count) <= bound; }
};

// #{(s_1..s_n) positive integers : 2^(kn) < s_1...s_n <= 2^((k+1)n)}
TupleCount count_product_tuples(std::size_t n, std::size_t k);

}  // namespace fastlyap

#endif  // FASTLYAP_DIMENSION_HPP
