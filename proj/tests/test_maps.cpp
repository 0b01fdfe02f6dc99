#include <doctest.h>

#include <cmath>
#include <random>

#include "fastlyap/error.hpp"
#include "fastlyap/io.hpp"
#include "fastlyap/maps.hpp"

using namespace fastlyap;

namespace {

Rational q(const char* s) { return parse_rational(s); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::usage;
}

// Extended precision keeps cancellation near 1/n below the comparison tolerance.
long double mobius_float(const IntMobius& m, long double x) {
  auto ld = [](const Integer& z) { return static_cast<long double>(z.get_d()); };
  return (ld(m.a) * x + ld(m.b)) / (ld(m.c) * x + ld(m.d));
}

}  // namespace

TEST_CASE("builtin Gauss intervals and gamma") {
  MapSpec g = MapSpec::gauss();
  auto b2 = g.branch(2);
  CHECK(b2.lo == q("1/3"));
  CHECK(b2.hi == q("1/2"));
  CHECK(g.gamma() == 2.0);
  CHECK(g.distortion() == 4);
  CHECK_FALSE(g.parabolic_point());
}

TEST_CASE("builtin Renyi intervals and parabolic point") {
  MapSpec r = MapSpec::renyi();
  auto b1 = r.branch(1);
  CHECK(b1.lo == 0);
  CHECK(b1.hi == q("1/2"));
  REQUIRE(r.parabolic_point());
  CHECK(*r.parabolic_point() == 0);
  CHECK(r.branch(3).lo == q("2/3"));
  CHECK(r.branch(3).hi == q("3/4"));
}

TEST_CASE("evaluate and derivative, exact") {
  auto g = evaluate(MapSpec::gauss(), q("2/5"));
  CHECK(g.value == q("1/2"));
  CHECK(g.branch == 2);
  auto r = evaluate(MapSpec::renyi(), q("3/5"));
  CHECK(r.value == q("1/2"));
  CHECK(r.branch == 2);
  CHECK(derivative(MapSpec::gauss(), q("2/5")) == q("25/4"));
  CHECK(derivative(MapSpec::renyi(), q("3/5")) == q("25/4"));
  Rational d = derivative(MapSpec::gauss(), q("2/5"));
  CHECK(Rational(4) / 4 <= d);  // 4^-1 * 2^2
  CHECK(d <= Rational(16));     // 4 * 2^2
}

TEST_CASE("boundary points are exceptional") {
  CHECK(kind_of([] { evaluate(MapSpec::gauss(), q("1/2")); }) == ErrorKind::boundary);
  CHECK(kind_of([] { derivative(MapSpec::gauss(), q("1/3")); }) == ErrorKind::boundary);
  CHECK(kind_of([] { evaluate(MapSpec::renyi(), q("1/2")); }) == ErrorKind::boundary);
  CHECK(kind_of([] { evaluate(MapSpec::gauss(), q("3/2")); }) == ErrorKind::boundary);
  try {
    evaluate(MapSpec::gauss(), q("1/2"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("exceptional set") != std::string::npos);
  }
}

TEST_CASE("load rejects degenerate and malformed specs") {
  Json one = Json::parse(R"({"gamma": 2, "C": 4, "branches": [{"interval": ["0", "1"], "affine": {"slope": "1", "intercept": "0"}}]})");
  CHECK(kind_of([&] { map_from_json(one); }) == ErrorKind::malformed);
  Json overlap = Json::parse(R"({"gamma": 2, "C": 4, "branches": [
      {"interval": ["0", "1/2"], "affine": {"slope": "2", "intercept": "0"}},
      {"interval": ["1/3", "1"], "affine": {"slope": "3/2", "intercept": "-1/2"}}]})");
  CHECK(kind_of([&] { map_from_json(overlap); }) == ErrorKind::malformed);
  Json low_gamma = Json::parse(R"({"gamma": 1, "C": 4, "branches": []})");
  CHECK(kind_of([&] { map_from_json(low_gamma); }) == ErrorKind::malformed);
  Json low_c = Json::parse(R"({"gamma": 2, "C": "1", "branches": []})");
  CHECK(kind_of([&] { map_from_json(low_c); }) == ErrorKind::malformed);
  CHECK(kind_of([] { map_from_json(Json::parse(R"({"builtin": "tent"})")); }) == ErrorKind::malformed);
  CHECK(map_from_json(Json::parse(R"({"builtin": "renyi"})")).parabolic_point());
}

TEST_CASE("hypothesis reports") {
  auto g = validate_hypotheses(MapSpec::gauss(), 16, 50);
  CHECK(g.all_pass());
  CHECK_FALSE(g.parabolic);
  auto r = validate_hypotheses(MapSpec::renyi(), 16, 50);
  CHECK(r.all_pass());
  CHECK(r.parabolic);
  CHECK_THROWS_AS(validate_hypotheses(MapSpec::gauss(), 1, 10), Error);
}

TEST_CASE("Cantor-gap branches fail the adjacency hypothesis") {
  // Gaps of the middle-third Cantor set, each mapped affinely onto [0,1].
  Json doc = Json::parse(R"({"gamma": 2, "C": 9, "branches": [
      {"interval": ["1/3", "2/3"], "affine": {"slope": "3", "intercept": "-1"}},
      {"interval": ["1/9", "2/9"], "affine": {"slope": "9", "intercept": "-1"}},
      {"interval": ["7/9", "8/9"], "affine": {"slope": "9", "intercept": "-7"}}]})");
  auto rep = validate_hypotheses(map_from_json(doc), 4, 3);
  CHECK(rep.check(1).status == CheckStatus::fail);
  CHECK_FALSE(rep.check(1).witnesses.empty());
  CHECK(rep.blocks_spectrum());
}

TEST_CASE("user Mobius map equal to Gauss passes") {
  Json doc = Json::parse(R"({"gamma": 2, "C": 4, "branches": [
      {"interval": ["1/2", "1"], "mobius": [-1, 1, 1, 0]},
      {"interval": ["1/3", "1/2"], "mobius": [-2, 1, 1, 0]},
      {"interval": ["1/4", "1/3"], "mobius": [-3, 1, 1, 0]}]})");
  MapSpec m = map_from_json(doc);
  CHECK(evaluate(m, q("2/5")).value == q("1/2"));
  CHECK(evaluate(m, q("2/5")).branch == 2);
  auto rep = validate_hypotheses(m, 8, 3);
  CHECK(rep.check(1).status == CheckStatus::pass);
  CHECK(rep.check(4).status == CheckStatus::pass);
  CHECK(rep.check(5).status == CheckStatus::pass);
}

TEST_CASE("property: exact and floating evaluation agree on Mobius branches") {
  std::mt19937_64 rng(7);
  for (const MapSpec& map : {MapSpec::gauss(), MapSpec::renyi()}) {
    for (int trial = 0; trial < 400; ++trial) {
      unsigned long n = 1 + rng() % 200;
      auto br = map.branch(n);
      // A rational strictly inside the branch interval.
      unsigned long num = 1 + rng() % 999;
      Rational t(num, 1000ul);
      Rational x = br.lo + (br.hi - br.lo) * t;
      auto e = evaluate(map, x);
      long double xd = static_cast<long double>(x.get_num().get_d()) / static_cast<long double>(x.get_den().get_d());
      double fd = static_cast<double>(mobius_float(br.map, xd));
      CHECK(std::fabs(e.value.get_d() - fd) <= 1e-12 * std::max(1.0, std::fabs(fd)));
      double den = static_cast<double>(static_cast<long double>(br.map.c.get_d()) * xd + static_cast<long double>(br.map.d.get_d()));
      double dd = std::fabs(br.map.determinant().get_d()) / (den * den);
      CHECK(std::fabs(derivative(map, x).get_d() - dd) <= 1e-12 * dd);
    }
  }
}

TEST_CASE("property: builtin derivative bounds hold exactly at branch endpoints, n <= 1000") {
  for (const MapSpec& map : {MapSpec::gauss(), MapSpec::renyi()}) {
    std::size_t bad = 0;
    for (unsigned long n = 1; n <= 1000; ++n) {
      auto br = map.branch(n);
      Rational n2 = Rational(n * n);
      for (const Rational& x : {br.lo, br.hi}) {
        Rational d = branch_derivative(br, x);
        if (!(n2 / map.distortion() <= d && d <= map.distortion() * n2)) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("property: consecutive builtin branches share exactly one endpoint") {
  for (const MapSpec& map : {MapSpec::gauss(), MapSpec::renyi()}) {
    for (unsigned long n = 1; n < 300; ++n) {
      auto a = map.branch(n), b = map.branch(n + 1);
      int shared = (a.lo == b.hi) + (a.hi == b.lo);
      CHECK(shared == 1);
    }
  }
}
