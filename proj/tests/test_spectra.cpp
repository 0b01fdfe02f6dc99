#include <doctest.h>

#include <cmath>

#include "fastlyap/error.hpp"
#include "fastlyap/spectra.hpp"

using namespace fastlyap;

namespace {

SpectrumInputs inputs(double gamma, double beta, double B, double b) {
  SpectrumInputs in;
  in.gamma = gamma;
  in.beta = beta;
  in.B = B;
  in.b = b;
  return in;
}

}  // namespace

TEST_CASE("fast spectrum examples") {
  CHECK(*fast_spectrum(inputs(2, 1, 1, 1), AlphaClass::finite).dimension == 0.5);
  auto fb = inputs(2, 5, 4, 3);
  CHECK(*fast_spectrum(fb, AlphaClass::finite).dimension == 1.0 / 6);
  CHECK(*fast_spectrum(fb, AlphaClass::infinite).dimension == 1.0 / 5);
  for (double g : {1.2, 2.0, 3.5}) CHECK(*fast_spectrum(inputs(g, 3, 2, 1), AlphaClass::zero).dimension == 1.0);
  auto v = fast_spectrum(inputs(2, 1, 1, 1), AlphaClass::zero);
  CHECK(v.note.find("Lebesgue") != std::string::npos);
}

TEST_CASE("empty level set without equivalence to an increasing function") {
  auto in = inputs(2, 2, 2, 2);
  in.equiv_increasing = false;
  auto v = fast_spectrum(in, AlphaClass::finite);
  CHECK(v.empty_level_set());
  CHECK_FALSE(fast_spectrum(in, AlphaClass::infinite).empty_level_set());
}

TEST_CASE("superlinear hypothesis is enforced") {
  auto in = inputs(2, 1, 1, 1);
  in.superlinear = false;
  CHECK_THROWS_AS(fast_spectrum(in, AlphaClass::finite), Error);
  CHECK_THROWS_AS(upper_lower_spectrum(in, AlphaClass::finite, SpectrumKind::upper), Error);
}

TEST_CASE("upper and lower spectra") {
  auto fb = inputs(2, 5, 4, 3);
  CHECK(*upper_lower_spectrum(fb, AlphaClass::finite, SpectrumKind::upper).dimension == 0.25);
  CHECK(*upper_lower_spectrum(fb, AlphaClass::finite, SpectrumKind::lower).dimension == 0.2);
  auto two = inputs(2, 2, 2, 2);
  CHECK(*upper_lower_spectrum(two, AlphaClass::finite, SpectrumKind::upper).dimension == doctest::Approx(1.0 / 3));
  CHECK(*upper_lower_spectrum(two, AlphaClass::infinite, SpectrumKind::lower).dimension == doctest::Approx(1.0 / 3));
  CHECK(*fast_spectrum(two, AlphaClass::finite).dimension == doctest::Approx(1.0 / 3));
  auto sq = inputs(2, 1, 1, 1);
  CHECK(*upper_lower_spectrum(sq, AlphaClass::finite, SpectrumKind::upper).dimension == 0.5);
  CHECK(*upper_lower_spectrum(sq, AlphaClass::finite, SpectrumKind::lower).dimension == 0.5);
  CHECK(*upper_lower_spectrum(sq, AlphaClass::zero, SpectrumKind::upper).dimension == 1.0);
}

TEST_CASE("Lyapunov spectrum at infinity") {
  CHECK(*lyapunov_at_infinity(2).dimension == 0.5);
  double g = std::log(3.0) / std::log(2.0);
  CHECK(*lyapunov_at_infinity(g).dimension == doctest::Approx(std::log(2.0) / std::log(3.0)));
  CHECK_THROWS_AS(lyapunov_at_infinity(1.0), Error);
  SpectrumQuery q;
  q.which = SpectrumKind::classical_at_infinity;
  q.inputs.gamma = 2;
  CHECK(*evaluate(q).dimension == 0.5);
}

TEST_CASE("infinite invariants give dimension 0") {
  CHECK(*fast_spectrum(inputs(2, INFINITY, INFINITY, INFINITY), AlphaClass::finite).dimension == 0.0);
  CHECK(dimension_formula(2, INFINITY) == 0.0);
}

TEST_CASE("auxiliary dimensions") {
  CHECK(*auxiliary_dimensions(2, AuxiliaryKind::d_set, 3).dimension == 0.25);
  CHECK(*auxiliary_dimensions(2, AuxiliaryKind::gamma_infinity_bound, 1).dimension == 0.5);
  CHECK(*auxiliary_dimensions(2, AuxiliaryKind::lambda_infinity).dimension == 0.5);
  CHECK(*auxiliary_dimensions(2, AuxiliaryKind::digits_to_infinity).dimension == 0.5);
  CHECK(*auxiliary_dimensions(2, AuxiliaryKind::growth_rate, 0).dimension == 0.5);
  CHECK(*auxiliary_dimensions(3, AuxiliaryKind::growth_rate, 1).dimension == doctest::Approx(0.2));
  CHECK_THROWS_AS(auxiliary_dimensions(2, AuxiliaryKind::d_set, 1), Error);
  CHECK_THROWS_AS(auxiliary_dimensions(2, AuxiliaryKind::gamma_infinity_bound, 0.5), Error);
  CHECK_THROWS_AS(auxiliary_dimensions(2, AuxiliaryKind::growth_rate, -1), Error);
}

TEST_CASE("continuity at infinity") {
  CHECK_FALSE(continuous_at_infinity(5, 4));
  CHECK(continuous_at_infinity(2, 2));
  for (double beta : {1.0, 1.5, 2.0, 7.0})
    for (double B : {1.0, 1.5, 2.0, 7.0}) {
      auto in = inputs(2, beta, B, 1);
      bool equal = *fast_spectrum(in, AlphaClass::finite).dimension == *fast_spectrum(in, AlphaClass::infinite).dimension;
      CHECK(equal == continuous_at_infinity(beta, B));
    }
}

TEST_CASE("property: monotone formulas, consistency chain and range") {
  for (double g : {1.1, 1.5, 2.0, 3.0, 6.0}) {
    double prev_beta = 2, prev_B = 2;
    for (double x = 1; x <= 40; x *= 1.3) {
      double f = *fast_spectrum(inputs(g, x, 1, 1), AlphaClass::finite).dimension;
      double h = *fast_spectrum(inputs(g, x, x, 1), AlphaClass::infinite).dimension;
      CHECK(f <= prev_beta);
      CHECK(h <= prev_B);
      prev_beta = f;
      prev_B = h;
    }
    for (double b = 1; b <= 10; b += 1.5)
      for (double B = b; B <= 12; B += 1.7)
        for (double beta = B; beta <= 15; beta += 2.3) {
          auto in = inputs(g, beta, B, b);
          double up = *upper_lower_spectrum(in, AlphaClass::finite, SpectrumKind::upper).dimension;
          double lo = *upper_lower_spectrum(in, AlphaClass::finite, SpectrumKind::lower).dimension;
          double inf = *fast_spectrum(in, AlphaClass::infinite).dimension;
          double fin = *fast_spectrum(in, AlphaClass::finite).dimension;
          CHECK(up >= inf);
          CHECK(inf >= lo);
          for (double v : {up, lo, inf, fin}) {
            CHECK(v > 0);
            CHECK(v <= 1 / g + 1e-15);
          }
        }
  }
}
