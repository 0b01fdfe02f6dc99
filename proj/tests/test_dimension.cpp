#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fastlyap/dimension.hpp"
#include "fastlyap/error.hpp"

using namespace fastlyap;

namespace {

std::uint64_t brute_tuples(std::size_t n, std::uint64_t lo, std::uint64_t hi, std::uint64_t prod = 1) {
  if (n == 0) return prod > lo && prod <= hi ? 1 : 0;
  std::uint64_t total = 0;
  for (std::uint64_t s = 1; prod * s <= hi; ++s) total += brute_tuples(n - 1, lo, hi, prod * s);
  return total;
}

SequencePair two_n() { return {Sequence::exponential(2), Sequence::exponential(2)}; }

}  // namespace

TEST_CASE("basic intervals for s = t = 2^n") {
  auto tree = enumerate_basic_intervals(MapSpec::gauss(), two_n(), 3);
  REQUIRE(tree.levels.size() == 3);
  CHECK(tree.theta == doctest::Approx(1.0));
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto& lv = tree.levels[n - 1];
    Integer expected = (Integer(1) << (n + 1)) - (Integer(1) << n);
    CHECK(lv.m == expected);
    CHECK(lv.children_seen == expected);
    CHECK(lv.contained);
    CHECK(lv.disjoint);
    CHECK(lv.gap_bound_holds);
    REQUIRE(lv.gap_bound);
    // Independent: 4^-(n+1) 2^(-2n) (s_1...s_n)^-2 with theta = 1.
    Rational prod = 1;
    for (std::size_t k = 1; k <= n; ++k) prod *= Rational(Integer(1) << k);
    Rational bound = 1 / (Rational(Integer(1) << (2 * (n + 1))) * Rational(Integer(1) << (2 * n)) * prod * prod);
    CHECK(*lv.gap_bound == bound);
    // Recompute the minimum sibling gap from sorted endpoints.
    auto iv = lv.intervals;
    std::sort(iv.begin(), iv.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    std::optional<Rational> min_gap;
    for (std::size_t i = 1; i < iv.size(); ++i)
      if (iv[i].parent == iv[i - 1].parent) {
        Rational g = iv[i].lo - iv[i - 1].hi;
        if (!min_gap || g < *min_gap) min_gap = g;
      }
    REQUIRE(min_gap);
    CHECK(*min_gap == lv.min_gap);
    CHECK(lv.min_gap >= bound);
  }
}

TEST_CASE("depth 1 with window (2, 4]") {
  SequencePair p{Sequence::constant(2), Sequence::constant(2)};
  auto tree = enumerate_basic_intervals(MapSpec::gauss(), p, 1);
  const auto& lv = tree.levels[0];
  REQUIRE(lv.intervals.size() == 2);
  std::vector<unsigned long> first;
  for (const auto& b : lv.intervals) first.push_back(b.word[0].value().get_ui());
  std::sort(first.begin(), first.end());
  CHECK(first == std::vector<unsigned long>{3, 4});
  // J_1(a) is the hull of the cylinders I_2(a, 3) and I_2(a, 4).
  for (const auto& b : lv.intervals) {
    auto c3 = cylinder(MapSpec::gauss(), DigitWord{b.word[0], Digit(3)});
    auto c4 = cylinder(MapSpec::gauss(), DigitWord{b.word[0], Digit(4)});
    CHECK(b.lo == std::min(c3.lo, c4.lo));
    CHECK(b.hi == std::max(c3.hi, c4.hi));
  }
}

TEST_CASE("tree enumeration limits") {
  TreeOptions o;
  o.node_budget = 100;
  CHECK_THROWS_AS(enumerate_basic_intervals(MapSpec::gauss(), two_n(), 5, o), Error);
  SequencePair single{Sequence::constant(2), Sequence::constant(Rational(1, 2))};
  CHECK_THROWS_AS(enumerate_basic_intervals(MapSpec::gauss(), single, 2), Error);
}

TEST_CASE("Falconer lower bound") {
  std::vector<double> lm(1000, std::log(2.0)), le;
  for (int n = 1; n <= 1000; ++n) le.push_back(-n * std::log(4.0));
  auto f = falconer_lower(lm, le);
  CHECK(std::fabs(f.estimate - 0.5) < 1e-2);
  // (n-1) log 2 / (2n log 2 - log 2)
  for (int n = 1; n <= 1000; ++n) CHECK(f.values[n - 1] == doctest::Approx(double(n - 1) / (2 * n - 1)).epsilon(1e-12));

  std::vector<double> lm3(500, std::log(3.0)), le3;
  for (int n = 1; n <= 500; ++n) le3.push_back(-2 * n * std::log(3.0));
  CHECK(std::fabs(falconer_lower(lm3, le3).estimate - 0.5) < 1e-2);

  std::vector<double> ones(10, 0.0), eps10;
  for (int n = 1; n <= 10; ++n) eps10.push_back(-n * 1.0);
  CHECK_THROWS_AS(falconer_lower(ones, eps10), Error);
  std::vector<double> flat(10, -1.0);
  CHECK_THROWS_AS(falconer_lower(std::vector<double>(10, std::log(2.0)), flat), Error);
}

TEST_CASE("cover upper bound") {
  std::vector<double> lN, ld;
  for (int n = 1; n <= 200; ++n) {
    lN.push_back(n * std::log(2.0));
    ld.push_back(-n * std::log(4.0));
  }
  auto c = cover_upper(lN, ld);
  CHECK(c.estimate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(cover_upper(lN, std::vector<double>(200, -1.0)), Error);
}

TEST_CASE("sandwich on one tree") {
  auto tree = enumerate_basic_intervals(MapSpec::gauss(), two_n(), 4);
  auto lo = falconer_lower(tree.log_m(), tree.log_min_gap());
  auto up = cover_upper(tree.log_count(), tree.log_max_diameter());
  CHECK(lo.estimate <= up.estimate);
  CHECK(lo.estimate > 0);
}

TEST_CASE("truncated E-set dimension formula") {
  SequencePair e{Sequence::natural_exp(), Sequence::natural_exp()};
  auto d = e_set_dimension_formula(e, 2, 100);
  CHECK(d.values[99] == doctest::Approx(5050.0 / 10201).epsilon(1e-12));
  for (double g : {1.5, 2.0, 3.0}) CHECK(std::fabs(e_set_dimension_formula(e, g, 10000).values[9999] - 1 / g) < 1e-3);
  for (auto [b, c] : {std::pair{2, 2}, std::pair{2, 3}}) {
    SequencePair t{Sequence::tower(b, c), Sequence::tower(b, c)};
    double expect = 1.0 / ((2 - 1) * c + 1);
    CHECK(std::fabs(e_set_dimension_formula(t, 2, 10000).estimate - expect) < 1e-3);
  }
  SequencePair flat{Sequence::constant(3), Sequence::constant(3)};
  try {
    e_set_dimension_formula(flat, 2, 100);
    FAIL("expected a hypothesis error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::hypothesis);
  }
}

TEST_CASE("product tuple counts") {
  CHECK(count_product_tuples(1, 1).count == 2);
  CHECK(count_product_tuples(1, 1).bound == doctest::Approx(12 * std::exp(1.0)));
  CHECK(count_product_tuples(1, 0).count == 1);
  CHECK(count_product_tuples(2, 1).count <= 1064);
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t k = 0; k <= 3; ++k) {
      auto t = count_product_tuples(n, k);
      CHECK(t.within_bound());
      CHECK(t.count == brute_tuples(n, std::uint64_t{1} << (k * n), std::uint64_t{1} << ((k + 1) * n)));
    }
  for (std::size_t k = 0; k <= 4; ++k) CHECK(count_product_tuples(4, k).within_bound());
  CHECK_THROWS_AS(count_product_tuples(0, 1), Error);
  CHECK_THROWS_AS(count_product_tuples(5, 1), Error);
  CHECK_THROWS_AS(count_product_tuples(1, 5), Error);
}
