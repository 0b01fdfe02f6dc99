#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fastlyap/error.hpp"
#include "fastlyap/scaling.hpp"

using namespace fastlyap;

namespace {

std::size_t factorial_sum(int k) {
  std::size_t s = 0, f = 1;
  for (int i = 1; i <= k; ++i) {
    f *= static_cast<std::size_t>(i);
    s += f;
  }
  return s;
}

}  // namespace

TEST_CASE("factorial-block invariants near (3, 4, 5)") {
  std::size_t H = factorial_sum(7);
  auto inv = invariants(Sequence::factorial_block(), H);
  CHECK(std::fabs(inv.b.running - 3) / 3 < 0.05);
  CHECK(std::fabs(inv.B.running - 4) / 4 < 0.05);
  CHECK(std::fabs(inv.beta.running - 5) / 5 < 0.05);
  CHECK(inv.superlinear);
}

TEST_CASE("exponential and power invariants") {
  auto e = invariants(Sequence::exponential(2), 200);
  CHECK(e.beta.window == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.B.window == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.b.window == doctest::Approx(2.0).epsilon(1e-12));
  auto p = invariants(Sequence::power(2), 10000);
  CHECK(std::fabs(p.beta.window - 1) < 1e-2);
  CHECK(std::fabs(p.B.window - 1) < 1e-2);
  CHECK(std::fabs(p.b.window - 1) < 1e-2);
  CHECK(p.superlinear);
  CHECK_FALSE(invariants(Sequence::power(0.5), 1000).superlinear);
  CHECK_THROWS_AS(invariants(Sequence::exponential(2), 3), Error);
  CHECK_THROWS_AS(invariants(Sequence::exponential(2), 100, 60), Error);
}

TEST_CASE("equivalence to increasing heuristic") {
  CHECK(is_equivalent_increasing(Sequence::power(2), 1000).flag);
  auto osc = Sequence::from_log([](std::size_t n) { return 2 * std::log(double(n)) + std::log(n % 2 ? 1.0 : 3.0); }, "osc");
  auto r = is_equivalent_increasing(osc, 1000, 0.1);
  CHECK_FALSE(r.flag);
  CHECK(r.window_min_ratio == doctest::Approx(1.0 / 3).epsilon(0.02));
  CHECK(is_equivalent_increasing(Sequence::factorial_block(), 1000).flag);
  CHECK_THROWS_AS(is_equivalent_increasing(Sequence::power(2), 4), Error);
}

TEST_CASE("psi star") {
  auto s = psi_star(Sequence::exponential(2));
  CHECK(s.value(3) == doctest::Approx(24.0));
  CHECK(invariants(s, 2000).B.window == doctest::Approx(2.0).epsilon(0.01));
  std::vector<Rational> vals;
  for (int i = 1; i <= 10; ++i) vals.emplace_back(i * i + 1);
  auto t = psi_star(Sequence::table(vals));
  REQUIRE(t.horizon());
  CHECK(*t.horizon() == 10);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(t.value(n) == doctest::Approx(double(n) * (n * n + 1)));
  std::size_t H = factorial_sum(7);
  auto a = invariants(Sequence::factorial_block(), H, 0, 200), b = invariants(psi_star(Sequence::factorial_block()), H, 0, 200);
  CHECK(std::fabs(a.b.running - b.b.running) / a.b.running < 0.05);
  CHECK(std::fabs(a.B.running - b.B.running) / a.B.running < 0.05);
}

TEST_CASE("xi growth rates") {
  CHECK(xi(Sequence::power(1), 1000).window < 1e-2);
  CHECK(std::fabs(xi(Sequence::exponential(2), 1000).window - 1) < 1e-2);
  CHECK(std::isinf(xi(Sequence::tower(2, 2), 100).window));
}

TEST_CASE("property: b <= B <= beta on builtins and random tables") {
  std::vector<Sequence> seqs = {Sequence::power(2), Sequence::exponential(3), Sequence::nlogn(), Sequence::factorial_block(),
                                Sequence::alternating(4, 2), Sequence::tower(2, 2), Sequence::natural_exp()};
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> logs;
    double acc = 0;
    for (int n = 0; n < 400; ++n) {
      acc += std::uniform_real_distribution<double>(-0.5, 1.5)(rng);
      logs.push_back(acc);
    }
    seqs.push_back(Sequence::table_log(logs));
  }
  for (const auto& s : seqs) {
    std::size_t H = std::min<std::size_t>(s.horizon().value_or(400), 400);
    if (s.describe().find("tower") != std::string::npos) H = 60;
    auto inv = invariants(s, H);
    CHECK(inv.b.window <= inv.B.window * (1 + 1e-12));
    CHECK(inv.b.running <= inv.B.running * (1 + 1e-12));
    CHECK(inv.B.running <= inv.beta.running * (1 + 1e-12));
  }
}

TEST_CASE("property: scaling by a constant") {
  for (double lambda : {0.01, 0.5, 7.0, 1000.0}) {
    for (const auto& s : {Sequence::power(3), Sequence::exponential(2), Sequence::factorial_block()}) {
      auto a = invariants(s, 1000), b = invariants(s.scaled(lambda), 1000);
      CHECK(b.beta.window == doctest::Approx(a.beta.window).epsilon(1e-12));
      CHECK(std::fabs(b.B.window / a.B.window - 1) <= 0.01);
      CHECK(std::fabs(b.b.window / a.b.window - 1) <= 0.01);
    }
  }
}
