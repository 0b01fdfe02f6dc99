#ifndef FASTLYAP_MAPS_HPP
#define FASTLYAP_MAPS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fastlyap/mobius.hpp"
#include "fastlyap/rational.hpp"

namespace fastlyap {

using IntMobius = Mobius<Integer>;

enum class BranchForm { mobius, affine };
enum class Orientation { increasing, decreasing };

struct BranchSpec {
  Integer index;
  Rational lo, hi;  // open interval (lo, hi)
  IntMobius map;    // affine branches are stored with cleared denominators
  BranchForm form = BranchForm::mobius;
  Orientation orientation = Orientation::increasing;

  // Inverse branch, [0,1] -> closure of (lo, hi), up to projective scale.
  IntMobius inverse() const { return map.adjugate(); }
};

enum class MapFamily { gauss, renyi, user };

class MapSpec {
 public:
  static MapSpec gauss();
  static MapSpec renyi();
  // Validates the structural load-time requirements (ordering, overlap, constants).
  static MapSpec from_branches(std::vector<BranchSpec> branches, double gamma, const Rational& C,
                               std::optional<Rational> parabolic_point, int m, std::string name = "user");

  MapFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  double gamma() const { return gamma_; }
  const Rational& distortion() const { return C_; }
  double log_distortion() const;
  const std::optional<Rational>& parabolic_point() const { return parabolic_; }
  int expansion_power() const { return m_; }

  // nullopt for the infinite builtin families.
  std::optional<std::size_t> branch_count() const;
  BranchSpec branch(const Integer& n) const;
  BranchSpec branch(std::size_t n) const { return branch(Integer(static_cast<unsigned long>(n))); }
  IntMobius inverse_branch(const Integer& n) const;

  // Index of the branch whose open interval contains x; nullopt on boundaries or outside.
  std::optional<Integer> locate(const Rational& x) const;

 private:
  MapFamily family_ = MapFamily::user;
  std::string name_;
  double gamma_ = 2.0;
  Rational C_{4};
  std::optional<Rational> parabolic_;
  int m_ = 1;
  std::vector<BranchSpec> branches_;
};

struct Evaluation {
  Rational value;
  Integer branch;
};

// T(x) exactly; throws ErrorKind::boundary when x is in the exceptional set.
Evaluation evaluate(const MapSpec& map, const Rational& x);
// |T'(x)| exactly.
Rational derivative(const MapSpec& map, const Rational& x);
// |T_n'(x)| for branch n extended to the closed interval.
Rational branch_derivative(const BranchSpec& branch, const Rational& x);

enum class CheckStatus { pass, fail, unverifiable };
const char* to_string(CheckStatus s) noexcept;

struct HypothesisCheck {
  int hypothesis = 0;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
  std::vector<std::string> witnesses;
};

struct HypothesisReport {
  std::array<HypothesisCheck, 5> checks;
  bool parabolic = false;
  int m = 1;
  std::size_t branches_checked = 0;
  std::size_t samples_per_branch = 0;

  const HypothesisCheck& check(int hypothesis) const { return checks.at(static_cast<std::size_t>(hypothesis - 1)); }
  bool all_pass() const;
  // A failure of (1) or (5) blocks spectrum evaluation unless overridden.
  bool blocks_spectrum() const;
};

HypothesisReport validate_hypotheses(const MapSpec& map, int samples_per_branch = 16, int branch_horizon = 64);

}  // namespace fastlyap

#endif  // FASTLYAP_MAPS_HPP
