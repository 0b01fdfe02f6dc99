#include <doctest.h>

#include <cmath>
#include <random>

#include "fastlyap/error.hpp"
#include "fastlyap/exponents.hpp"

using namespace fastlyap;

namespace {

Rational q(const char* s) { return parse_rational(s); }

// ceil(e^n), exact.
Integer ceil_exp(std::size_t n) {
  BigFloat v = BigFloat::exp(BigFloat(static_cast<double>(n), 512), Round::up);
  Integer z;
  mpfr_get_z(z.get_mpz_t(), v.get(), MPFR_RNDU);
  return z;
}

Rational random_rational(gmp_randclass& rng, unsigned bits) {
  Integer den = rng.get_z_bits(bits) + 2;
  Integer num = rng.get_z_range(den - 1) + 1;
  Rational x(num, den);
  x.canonicalize();
  return x;
}

}  // namespace

TEST_CASE("golden-mean cylinder orbit has Lyapunov partial near 2 log phi") {
  auto d = decode(MapSpec::gauss(), periodic_stream(DigitWord{Digit(1)}), DecodeOptions{1e-15});
  Rational mid = (d.cylinder.lo + d.cylinder.hi) / 2;
  mid.canonicalize();
  CHECK(std::fabs(d.point - (std::sqrt(5.0) - 1) / 2) < 1e-12);
  auto t = trace(MapSpec::gauss(), mid, 20);
  double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(std::fabs(t.lyapunov_partials()[19] - 2 * std::log(phi)) < 1e-3);
}

TEST_CASE("exact orbit sums and empty traces") {
  auto t = trace(MapSpec::gauss(), q("5/13"), 3);
  // Orbit 5/13, 3/5, 2/3; |G'| = 1/x^2.
  double expected = 2 * (std::log(13.0 / 5) + std::log(5.0 / 3) + std::log(3.0 / 2));
  CHECK(t.log_deriv_sum[2] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(t.digit_log_sum[2] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK((t.log_pi == t.digit_log_sum).all());
  auto empty = trace(MapSpec::gauss(), q("5/13"), 0);
  CHECK(empty.n == 0);
  CHECK(chain_rule_gap(empty, 2).size() == 0);
}

TEST_CASE("chain-rule gap for a single digit") {
  auto t = trace(MapSpec::gauss(), q("2/3"), 1);
  auto gap = chain_rule_gap(t, 2.0);
  CHECK(gap[0] == doctest::Approx(std::log(9.0 / 4)));
  CHECK(gap[0] <= std::log(4.0));
}

TEST_CASE("property: chain-rule bound on random rational orbits") {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(3);
  for (const MapSpec& map : {MapSpec::gauss(), MapSpec::renyi()}) {
    int done = 0, violations = 0;
    while (done < 40) {
      Rational x = random_rational(rng, 200);
      try {
        auto t = trace(map, x, 30);
        violations += static_cast<int>(chain_rule_violations(t, map.gamma(), map.log_distortion()).size());
        for (Eigen::Index i = 1; i < t.log_pi.size(); ++i) CHECK(t.log_pi[i] >= t.log_pi[i - 1]);
        ++done;
      } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::exceptional_orbit);
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("fast partials with e^n digits and psi = n^2") {
  DigitWord w;
  for (std::size_t n = 1; n <= 200; ++n) w.emplace_back(ceil_exp(n));
  auto t = trace_word(MapSpec::gauss(), w);
  auto f = fast_exponent_partials(t, Sequence::power(2));
  CHECK(f.value[199] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fast partials vanish for bounded digits over n 2^n") {
  DigitWord w(40, Digit(2));
  auto t = trace_word(MapSpec::gauss(), w);
  auto psi = Sequence::from_log([](std::size_t n) { return std::log(static_cast<double>(n)) + n * std::log(2.0); }, "n2^n");
  auto f = fast_exponent_partials(t, psi);
  CHECK(f.value[39] < 1e-9);
}

TEST_CASE("identity scaling gives partials equal to 1") {
  DigitWord w(12, Digit(3));
  auto t = trace_word(MapSpec::gauss(), w);
  std::vector<double> logs;
  for (Eigen::Index i = 0; i < t.log_deriv_sum.size(); ++i) logs.push_back(std::log(t.log_deriv_sum[i]));
  auto f = fast_exponent_partials(t, Sequence::table_log(logs));
  for (Eigen::Index i = 0; i < f.value.size(); ++i) CHECK(f.value[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: fast upper >= lower, equal only on a constant tail") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    DigitWord w;
    for (int i = 0; i < 25; ++i) w.emplace_back(1 + rng() % 9);
    auto t = trace_word(MapSpec::gauss(), w);
    auto f = fast_exponent_partials(t, Sequence::power(1.5));
    for (Eigen::Index i = 0; i < f.value.size(); ++i) {
      CHECK(f.upper[i] >= f.lower[i]);
      bool constant_tail = (f.value.tail(f.value.size() - i) == f.value[i]).all();
      CHECK((f.upper[i] == f.lower[i]) == constant_tail);
    }
  }
}

TEST_CASE("Renyi orbits near the parabolic point expand more slowly") {
  // Start near 0 (digits 1 repeatedly) versus a generic orbit away from 0.
  auto slow = trace_word(MapSpec::renyi(), DigitWord(15, Digit(1)));
  auto fast = trace_word(MapSpec::renyi(), DigitWord(15, Digit(3)));
  CHECK(slow.lyapunov_partials()[14] < fast.lyapunov_partials()[14]);
}

TEST_CASE("digit statistics") {
  DigitWord e;
  for (std::size_t n = 1; n <= 60; ++n) e.emplace_back(ceil_exp(n));
  auto s = digit_statistics(e);
  CHECK(s.kappa_partial[59] == doctest::Approx(61.0 / 2).epsilon(0.02));
  CHECK(s.tau_estimate);
  CHECK(*s.tau_estimate < 1.1);

  auto twos = digit_statistics(DigitWord(200, Digit(2)));
  CHECK(twos.kappa_estimate == doctest::Approx(std::log(2.0)));
  CHECK(*twos.tau_estimate < 1.03);

  DigitWord tower;
  for (std::size_t n = 1; n <= 30; ++n) tower.push_back(Digit::log_only(std::ldexp(1.0, static_cast<int>(n)) * std::log(2.0)));
  auto ts = digit_statistics(tower);
  CHECK(*ts.tau_estimate == doctest::Approx(2.0).epsilon(1e-6));

  auto ones = digit_statistics(DigitWord(5, Digit(1)));
  CHECK_FALSE(ones.tau_partial[0]);
  CHECK_FALSE(ones.tau_estimate);
  CHECK_THROWS_AS(digit_statistics(DigitWord(1, Digit(2))), Error);
}

TEST_CASE("property: tau partial is at least 1") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    DigitWord w;
    for (int i = 0; i < 30; ++i) w.emplace_back(1 + rng() % 50);
    for (const auto& t : digit_statistics(w).tau_partial)
      if (t) CHECK(*t >= 1.0);
  }
}
