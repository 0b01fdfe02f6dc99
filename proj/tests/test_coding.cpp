#include <doctest.h>

#include <cmath>
#include <random>

#include "fastlyap/coding.hpp"
#include "fastlyap/error.hpp"
#include "fastlyap/io.hpp"

using namespace fastlyap;

namespace {

Rational q(const char* s) { return parse_rational(s); }

// Continued-fraction convergent denominators q_1..q_n of [0; a_1, ..., a_n].
std::vector<Integer> denominators(const std::vector<unsigned long>& a) {
  std::vector<Integer> out;
  Integer prev = 1, cur = a[0];
  out.push_back(cur);
  for (std::size_t i = 1; i < a.size(); ++i) {
    Integer next = a[i] * cur + prev;
    prev = cur;
    cur = next;
    out.push_back(cur);
  }
  return out;
}

// Continued-fraction digits of x in (0,1), oracle independent of the map code.
std::vector<unsigned long> cf_digits(Rational x, std::size_t depth) {
  std::vector<unsigned long> out;
  for (std::size_t i = 0; i < depth && x != 0; ++i) {
    Rational inv = 1 / x;
    Integer a = inv.get_num() / inv.get_den();
    out.push_back(a.get_ui());
    x = inv - a;
  }
  return out;
}

}  // namespace

TEST_CASE("encode examples") {
  MapSpec g = MapSpec::gauss();
  try {
    encode(g, q("2/5"), 2);
    FAIL("expected exceptional orbit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::exceptional_orbit);
    REQUIRE(e.step());
    CHECK(*e.step() == 1);
  }
  auto rec = encode(g, q("5/13"), 3);
  CHECK(to_string(rec.word) == "2,1,1");
  CHECK(rec.orbit.size() == 3);
  CHECK(rec.orbit[1] == q("3/5"));
  CHECK(cf_digits(q("5/13"), 10) == std::vector<unsigned long>{2, 1, 1, 2});
  CHECK_THROWS_AS(encode(g, q("5/13"), 4), Error);
  CHECK(to_string(encode(MapSpec::renyi(), q("3/5"), 1).word) == "2");
}

TEST_CASE("cylinder examples") {
  MapSpec g = MapSpec::gauss();
  auto c1 = cylinder(g, make_word({1}));
  CHECK(c1.lo == q("1/2"));
  CHECK(c1.hi == 1);
  CHECK(c1.diameter == q("1/2"));
  auto c11 = cylinder(g, make_word({1, 1}));
  CHECK(c11.lo == q("1/2"));
  CHECK(c11.hi == q("2/3"));
  CHECK(c11.diameter == q("1/6"));
  REQUIRE(c11.bound_lo);
  CHECK(*c11.bound_lo == q("1/16"));
  CHECK(*c11.bound_hi == 16);
  CHECK(c11.bounds_hold());
  CHECK(cylinder(g, make_word({2, 3})).diameter == q("1/63"));
}

TEST_CASE("decode examples") {
  MapSpec g = MapSpec::gauss();
  DecodeOptions loose;
  loose.tolerance = 1e-6;
  CHECK(std::fabs(decode(g, periodic_stream(make_word({1})), loose).point - (std::sqrt(5.0) - 1) / 2) < 1e-6);
  CHECK(std::fabs(decode(g, periodic_stream(make_word({2})), loose).point - (std::sqrt(2.0) - 1)) < 1e-6);
  DecodeOptions one;
  one.tolerance = 1;
  for (const MapSpec& m : {MapSpec::gauss(), MapSpec::renyi()}) {
    auto r = decode(m, periodic_stream(make_word({1})), one);
    CHECK(r.depth == 1);
    auto b = m.branch(1);
    CHECK(r.point == doctest::Approx(Rational((b.lo + b.hi) / 2).get_d()));
  }
}

TEST_CASE("huge digits use log-scaled cylinders") {
  DigitWord w{Digit(3), Digit::log_only(5000.0)};
  auto c = cylinder(MapSpec::gauss(), w);
  CHECK_FALSE(c.exact);
  CHECK(c.log_diameter() == doctest::Approx(-2 * (std::log(3.0) + 5000.0)).epsilon(0.01));
  CHECK(Digit::log_only(100.0).to_string().rfind("exp(", 0) == 0);
  CHECK(Digit(Integer("123456789012")).to_string() == "123456789012");
}

TEST_CASE("word text round trip") {
  DigitWord w = parse_word("3, 8,21");
  CHECK(to_string(w) == "3,8,21");
  CHECK_THROWS_AS(parse_word("3,0"), Error);
}

TEST_CASE("property: encode/decode round trip contains the point") {
  std::mt19937_64 rng(11);
  MapSpec g = MapSpec::gauss();
  int done = 0;
  while (done < 60) {
    Rational x(Integer(1 + rng() % 1000000), Integer(1000003));
    x.canonicalize();
    OrbitRecord rec;
    try {
      rec = encode(g, x, 20);
    } catch (const Error&) {
      continue;
    }
    auto cyl = cylinder(g, rec.word);
    CHECK(cyl.contains(x));
    CHECK(rec.word == [&] {
      DigitWord w;
      for (auto d : cf_digits(x, 20)) w.emplace_back(d);
      return w;
    }());
    ++done;
  }
}

TEST_CASE("property: nesting and Gauss exact diameter law") {
  MapSpec g = MapSpec::gauss();
  std::size_t checked = 0, nest_bad = 0, law_bad = 0, bound_bad = 0;
  std::vector<CylinderInterval> stack;
  for_each_cylinder(g, 4, 6, [&](const CylinderInterval& c) {
    while (!stack.empty() && stack.back().word.size() >= c.word.size()) stack.pop_back();
    if (!stack.empty() && !stack.back().contains(c)) ++nest_bad;
    stack.push_back(c);
    std::vector<unsigned long> a;
    for (const auto& d : c.word) a.push_back(d.value().get_ui());
    auto qs = denominators(a);
    Integer qn = qs.back(), qm = qs.size() > 1 ? qs[qs.size() - 2] : Integer(1);
    if (c.diameter != Rational(Integer(1), Integer(qn * (qn + qm)))) ++law_bad;
    if (!c.bounds_hold()) ++bound_bad;
    ++checked;
  });
  CHECK(checked == 6 + 36 + 216 + 1296);
  CHECK(nest_bad == 0);
  CHECK(law_bad == 0);
  CHECK(bound_bad == 0);
}

TEST_CASE("property: Renyi cylinders nest and satisfy the diameter sandwich") {
  MapSpec r = MapSpec::renyi();
  std::size_t bad = 0, nest_bad = 0;
  std::vector<CylinderInterval> stack;
  for_each_cylinder(r, 3, 8, [&](const CylinderInterval& c) {
    while (!stack.empty() && stack.back().word.size() >= c.word.size()) stack.pop_back();
    if (!stack.empty() && !stack.back().contains(c)) ++nest_bad;
    stack.push_back(c);
    if (!c.bounds_hold() || !(c.lo < c.hi)) ++bad;
  });
  CHECK(bad == 0);
  CHECK(nest_bad == 0);
}

TEST_CASE("cylinder CSV rows carry exact rationals") {
  auto row = cylinder_csv_row(cylinder(MapSpec::gauss(), make_word({1, 1})));
  CHECK(row == "\"1,1\",1/2,2/3,1/6,1/16,16");
}
