#include "fastlyap/maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fastlyap/bigfloat.hpp"
#include "fastlyap/error.hpp"

namespace fastlyap {

namespace {

Rational apply(const IntMobius& m, const Rational& x) {
  Rational den = m.c * x + m.d;
  if (den == 0) throw Error(ErrorKind::boundary, "pole of branch map at x = " + to_string(x));
  Rational out = Rational(m.a * x + m.b) / den;
  out.canonicalize();
  return out;
}

std::string interval_text(const BranchSpec& b) { return "(" + to_string(b.lo) + ", " + to_string(b.hi) + ")"; }

bool pole_outside_closure(const BranchSpec& b) {
  Rational dl = b.map.c * b.lo + b.map.d;
  Rational dh = b.map.c * b.hi + b.map.d;
  return sgn(dl) != 0 && sgn(dl) == sgn(dh);
}

// |T'| lies in [n^gamma / C, C n^gamma]; exact when gamma is an integer.
bool derivative_in_bounds(const Rational& deriv, const Integer& n, double gamma, const Rational& C) {
  if (gamma == std::floor(gamma) && gamma > 0 && gamma < 64) {
    Integer scale;
    mpz_pow_ui(scale.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(gamma));
    return deriv * C >= scale && deriv <= C * scale;
  }
  BigFloat lhs = BigFloat::log(BigFloat(deriv, Round::nearest), Round::nearest);
  BigFloat lnn = BigFloat::log(BigFloat(n, Round::nearest), Round::nearest);
  BigFloat scale = BigFloat::mul(BigFloat(gamma), lnn, Round::nearest);
  BigFloat lc = BigFloat::log(BigFloat(C, Round::nearest), Round::nearest);
  return BigFloat::sub(scale, lc, Round::nearest) <= lhs && lhs <= BigFloat::add(scale, lc, Round::nearest);
}

}  // namespace

MapSpec MapSpec::gauss() {
  MapSpec m;
  m.family_ = MapFamily::gauss;
  m.name_ = "gauss";
  m.gamma_ = 2.0;
  m.C_ = 4;
  m.m_ = 2;
  return m;
}

MapSpec MapSpec::renyi() {
  MapSpec m;
  m.family_ = MapFamily::renyi;
  m.name_ = "renyi";
  m.gamma_ = 2.0;
  m.C_ = 4;
  m.parabolic_ = Rational(0);
  m.m_ = 1;
  return m;
}

MapSpec MapSpec::from_branches(std::vector<BranchSpec> branches, double gamma, const Rational& C,
                               std::optional<Rational> parabolic_point, int m, std::string name) {
  if (!(gamma > 1)) throw Error(ErrorKind::malformed, "gamma must exceed 1");
  if (C <= 1) throw Error(ErrorKind::malformed, "distortion constant C must exceed 1");
  if (m < 1) throw Error(ErrorKind::malformed, "expansion power m must be at least 1");
  if (branches.empty()) throw Error(ErrorKind::malformed, "map has no branches");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    BranchSpec& b = branches[i];
    b.index = Integer(static_cast<unsigned long>(i + 1));
    if (!(b.lo < b.hi)) throw Error(ErrorKind::malformed, "branch " + std::to_string(i + 1) + " has empty interval");
    if (b.lo < 0 || b.hi > 1)
      throw Error(ErrorKind::malformed, "branch " + std::to_string(i + 1) + " leaves [0,1]");
    if (b.map.determinant() == 0)
      throw Error(ErrorKind::malformed, "branch " + std::to_string(i + 1) + " is a degenerate Mobius map");
    b.orientation = b.map.determinant() > 0 ? Orientation::increasing : Orientation::decreasing;
  }
  std::vector<const BranchSpec*> sorted;
  for (const auto& b : branches) sorted.push_back(&b);
  std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->lo < y->lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i]->hi > sorted[i + 1]->lo)
      throw Error(ErrorKind::malformed, "overlapping intervals " + interval_text(*sorted[i]) + " and " +
                                            interval_text(*sorted[i + 1]));
  // A family whose derivative never exceeds 1 cannot carry n^gamma growth with gamma > 1.
  bool expands = false;
  for (const auto& b : branches) {
    if (!pole_outside_closure(b)) {
      expands = true;  // reported by the hypothesis check instead
      continue;
    }
    if (branch_derivative(b, b.lo) > 1 || branch_derivative(b, b.hi) > 1) expands = true;
  }
  if (!expands || branches.size() < 2)
    throw Error(ErrorKind::malformed,
                "gamma > 1 unsatisfiable: the branch list shows no derivative growth across branches");
  MapSpec out;
  out.family_ = MapFamily::user;
  out.name_ = std::move(name);
  out.gamma_ = gamma;
  out.C_ = C;
  out.parabolic_ = std::move(parabolic_point);
  out.m_ = m;
  out.branches_ = std::move(branches);
  return out;
}

double MapSpec::log_distortion() const { return log_abs(C_); }

std::optional<std::size_t> MapSpec::branch_count() const {
  if (family_ == MapFamily::user) return branches_.size();
  return std::nullopt;
}

BranchSpec MapSpec::branch(const Integer& n) const {
  if (n < 1) throw Error(ErrorKind::usage, "branch indices start at 1");
  BranchSpec b;
  b.index = n;
  switch (family_) {
    case MapFamily::gauss:
      // x -> 1/x - n on (1/(n+1), 1/n)
      b.lo = Rational(Integer(1), Integer(n + 1));
      b.hi = Rational(Integer(1), n);
      b.map = IntMobius{Integer(-n), Integer(1), Integer(1), Integer(0)};
      b.orientation = Orientation::decreasing;
      return b;
    case MapFamily::renyi:
      // x -> 1/(1-x) - n on ((n-1)/n, n/(n+1))
      b.lo = Rational(Integer(n - 1), n);
      b.hi = Rational(n, Integer(n + 1));
      b.lo.canonicalize();
      b.hi.canonicalize();
      b.map = IntMobius{n, Integer(1 - n), Integer(-1), Integer(1)};
      b.orientation = Orientation::increasing;
      return b;
    case MapFamily::user:
      break;
  }
  if (n > static_cast<unsigned long>(branches_.size()))
    throw Error(ErrorKind::out_of_range, "digit " + n.get_str() + " beyond the " + std::to_string(branches_.size()) +
                                             " branches of map '" + name_ + "'");
  return branches_[n.get_ui() - 1];
}

IntMobius MapSpec::inverse_branch(const Integer& n) const {
  switch (family_) {
    case MapFamily::gauss:
      return IntMobius{Integer(0), Integer(1), Integer(1), n};  // y -> 1/(n+y)
    case MapFamily::renyi:
      return IntMobius{Integer(1), Integer(n - 1), Integer(1), n};  // y -> (y+n-1)/(y+n)
    case MapFamily::user:
      break;
  }
  return branch(n).inverse();
}

std::optional<Integer> MapSpec::locate(const Rational& x) const {
  switch (family_) {
    case MapFamily::gauss: {
      if (x <= 0 || x > 1) return std::nullopt;
      Rational inv = 1 / x;
      if (is_integer(inv)) return std::nullopt;
      return floor(inv);
    }
    case MapFamily::renyi: {
      if (x < 0 || x >= 1) return std::nullopt;
      Rational y = 1 / (1 - x);
      if (is_integer(y)) return std::nullopt;
      return floor(y);
    }
    case MapFamily::user:
      break;
  }
  for (const auto& b : branches_)
    if (b.lo < x && x < b.hi) return b.index;
  return std::nullopt;
}

Evaluation evaluate(const MapSpec& map, const Rational& x) {
  auto n = map.locate(x);
  if (!n)
    throw Error(ErrorKind::boundary, "point " + to_string(x) + " lies in the exceptional set Q (branch boundary or outside the domain)");
  return Evaluation{apply(map.branch(*n).map, x), *n};
}

Rational branch_derivative(const BranchSpec& branch, const Rational& x) {
  Rational den = branch.map.c * x + branch.map.d;
  if (den == 0) throw Error(ErrorKind::boundary, "pole of branch map at x = " + to_string(x));
  Integer det = branch.map.determinant();
  Rational out = Rational(abs(det)) / (den * den);
  out.canonicalize();
  return out;
}

Rational derivative(const MapSpec& map, const Rational& x) {
  auto n = map.locate(x);
  if (!n)
    throw Error(ErrorKind::boundary, "point " + to_string(x) + " lies in the exceptional set Q (branch boundary or outside the domain)");
  return branch_derivative(map.branch(*n), x);
}

const char* to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::unverifiable: return "unverifiable-at-finite-scale";
  }
  return "unknown";
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::pass; });
}

bool HypothesisReport::blocks_spectrum() const {
  return check(1).status == CheckStatus::fail || check(5).status == CheckStatus::fail;
}

namespace {

constexpr std::size_t max_witnesses = 8;

void fail(HypothesisCheck& c, std::string witness) {
  c.status = CheckStatus::fail;
  if (c.witnesses.size() < max_witnesses) c.witnesses.push_back(std::move(witness));
}

std::vector<Rational> sample_points(const BranchSpec& b, int samples) {
  std::vector<Rational> xs;
  xs.reserve(static_cast<std::size_t>(samples));
  Rational width = b.hi - b.lo;
  for (int j = 0; j < samples; ++j) {
    Rational x = b.lo + width * Rational(j, samples - 1);
    x.canonicalize();
    xs.push_back(x);
  }
  return xs;
}

// |(T^m)'(x)| along the orbit, or nullopt if the orbit meets Q first.
std::optional<Rational> iterate_derivative(const MapSpec& map, Rational x, int m) {
  Rational prod(1);
  for (int k = 0; k < m; ++k) {
    auto n = map.locate(x);
    if (!n) return std::nullopt;
    BranchSpec b = map.branch(*n);
    prod *= branch_derivative(b, x);
    x = apply(b.map, x);
  }
  prod.canonicalize();
  return prod;
}

}  // namespace

HypothesisReport validate_hypotheses(const MapSpec& map, int samples_per_branch, int branch_horizon) {
  if (samples_per_branch < 2) throw Error(ErrorKind::usage, "validate_hypotheses needs at least 2 samples per branch");
  if (branch_horizon < 1) throw Error(ErrorKind::usage, "branch horizon must be positive");
  HypothesisReport report;
  for (int h = 1; h <= 5; ++h) report.checks[static_cast<std::size_t>(h - 1)].hypothesis = h;
  report.samples_per_branch = static_cast<std::size_t>(samples_per_branch);
  report.m = map.expansion_power();
  report.parabolic = map.parabolic_point().has_value();

  std::size_t horizon = static_cast<std::size_t>(branch_horizon);
  if (auto count = map.branch_count()) horizon = std::min(horizon, *count);
  report.branches_checked = horizon;

  auto& h1 = report.checks[0];
  auto& h2 = report.checks[1];
  auto& h3 = report.checks[2];
  auto& h4 = report.checks[3];
  auto& h5 = report.checks[4];

  std::vector<BranchSpec> branches;
  for (std::size_t n = 1; n <= horizon; ++n) branches.push_back(map.branch(n));

  for (std::size_t i = 0; i + 1 < branches.size(); ++i) {
    const auto& a = branches[i];
    const auto& b = branches[i + 1];
    int shared = (a.lo == b.lo) + (a.lo == b.hi) + (a.hi == b.lo) + (a.hi == b.hi);
    if (shared != 1)
      fail(h1, "I_" + std::to_string(i + 1) + "=" + interval_text(a) + " and I_" + std::to_string(i + 2) + "=" +
                   interval_text(b) + " share " + std::to_string(shared) + " endpoints");
  }
  h1.detail = "consecutive branch intervals share exactly one endpoint (exact rational comparison)";

  for (const auto& b : branches) {
    if (b.map.determinant() == 0)
      fail(h2, "branch " + b.index.get_str() + " is degenerate");
    else if (!pole_outside_closure(b))
      fail(h2, "branch " + b.index.get_str() + " has its pole inside the closed interval " + interval_text(b));
  }
  h2.detail = map.family() == MapFamily::user
                  ? "non-degenerate Mobius branches with poles outside each closed interval"
                  : "structural: builtin branches are Mobius with poles outside each closed interval";

  for (const auto& b : branches) {
    if (!pole_outside_closure(b)) continue;
    Rational y0 = apply(b.map, b.lo), y1 = apply(b.map, b.hi);
    bool onto = (y0 == 0 && y1 == 1) || (y0 == 1 && y1 == 0);
    if (!onto)
      fail(h4, "branch " + b.index.get_str() + " maps " + interval_text(b) + " onto [" + to_string(std::min(y0, y1)) +
                   ", " + to_string(std::max(y0, y1)) + "]");
  }
  h4.detail = "each closed branch interval maps onto [0,1]";

  for (const auto& b : branches) {
    if (!pole_outside_closure(b)) continue;
    for (const auto& x : sample_points(b, samples_per_branch)) {
      Rational d = branch_derivative(b, x);
      if (!derivative_in_bounds(d, b.index, map.gamma(), map.distortion())) {
        std::ostringstream w;
        w << "n=" << b.index.get_str() << " x=" << to_string(x) << " |T'|=" << to_string(d);
        fail(h5, w.str());
      }
    }
  }
  h5.detail = "C^-1 n^gamma <= |T_n'| <= C n^gamma at " + std::to_string(samples_per_branch) +
              " points per branch (endpoints included)";

  switch (map.family()) {
    case MapFamily::gauss:
      h3.detail = "structural: |(G^2)'(x)| = 1/(x G(x))^2 >= 4 on every branch, m = 2";
      break;
    case MapFamily::renyi:
      h3.detail = "structural: parabolic fixed point p = 0 with |R'(0)| = 1; |R'(x)| = 1/(1-x)^2 > 1 for x != 0";
      break;
    case MapFamily::user: {
      std::size_t usable = 0;
      if (const auto& p = map.parabolic_point()) {
        bool found = false;
        for (const auto& b : branches) {
          if (*p < b.lo || *p > b.hi || !pole_outside_closure(b)) continue;
          if (apply(b.map, *p) == *p) {
            found = true;
            if (branch_derivative(b, *p) < 1) fail(h3, "parabolic point " + to_string(*p) + " has |T'(p)| < 1");
          }
        }
        if (!found) fail(h3, "declared point " + to_string(*p) + " is not a fixed point of any branch");
      }
      for (const auto& b : branches) {
        auto xs = sample_points(b, samples_per_branch);
        for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
          if (map.parabolic_point() && xs[j] == *map.parabolic_point()) continue;
          auto d = iterate_derivative(map, xs[j], map.expansion_power());
          if (!d) continue;
          ++usable;
          if (*d <= 1) fail(h3, "x=" + to_string(xs[j]) + " |(T^m)'|=" + to_string(*d));
        }
      }
      h3.detail = "sampled |(T^m)'(x)| > 1 at interior points, m = " + std::to_string(map.expansion_power());
      if (usable == 0 && h3.status == CheckStatus::pass) h3.status = CheckStatus::unverifiable;
      break;
    }
  }
  return report;
}

}  // namespace fastlyap
