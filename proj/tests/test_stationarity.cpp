#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sparseload/rng.hpp"
#include "sparseload/stationarity.hpp"

using namespace sparseload;

namespace {

// Frozen fixtures, regenerated bit-for-bit from the seeded stream. The
// expected statistics were computed once with an independent reference
// implementation (statsmodels 0.14.6: adfuller with regression="c",
// autolag=None; kpss with regression="c") at the same lag settings.
std::vector<double> fixture_iid_500() {
  Rng rng(42);
  std::vector<double> x;
  for (int i = 0; i < 500; ++i) x.push_back(rng.normal());
  return x;
}

std::vector<double> fixture_walk_500() {
  auto x = fixture_iid_500();
  double acc = 0.0;
  for (double& v : x) {
    acc += v;
    v = acc;
  }
  return x;
}

std::vector<double> fixture_ar1_300() {
  Rng rng(7);
  std::vector<double> x;
  double v = rng.normal();
  x.push_back(v);
  for (int i = 1; i < 300; ++i) {
    v = 0.6 * v + rng.normal();
    x.push_back(v);
  }
  return x;
}

}  // namespace

TEST_CASE("adf statistic matches the reference implementation", "[stationarity]") {
  const auto f1 = adf_test(fixture_iid_500());
  CHECK(f1.statistic == Catch::Approx(-5.286419952796).margin(1e-6));
  CHECK(f1.nuisance.at("lags") == 17);
  CHECK(f1.nuisance.at("crit_1pct") == Catch::Approx(-3.4439899743408136).margin(1e-6));
  CHECK(f1.nuisance.at("crit_5pct") == Catch::Approx(-2.8675550551408353).margin(1e-6));
  CHECK(f1.nuisance.at("crit_10pct") == Catch::Approx(-2.569973792117904).margin(1e-6));

  const auto f2 = adf_test(fixture_walk_500());
  CHECK(f2.statistic == Catch::Approx(-2.086450226099).margin(1e-6));

  const auto f3 = adf_test(fixture_ar1_300());
  CHECK(f3.statistic == Catch::Approx(-4.431502714602).margin(1e-6));
  CHECK(f3.nuisance.at("lags") == 15);
  CHECK(f3.nuisance.at("crit_5pct") == Catch::Approx(-2.871771355211212).margin(1e-6));
}

TEST_CASE("kpss statistic matches the reference implementation", "[stationarity]") {
  const auto f1 = kpss_test(fixture_iid_500());
  CHECK(f1.statistic == Catch::Approx(0.067591953829).margin(1e-6));
  CHECK(f1.nuisance.at("lags") == 5);

  const auto f2 = kpss_test(fixture_walk_500());
  CHECK(f2.statistic == Catch::Approx(4.285893588644).margin(1e-6));

  const auto f3 = kpss_test(fixture_ar1_300());
  CHECK(f3.statistic == Catch::Approx(0.068668567713).margin(1e-6));
}

TEST_CASE("stationarity decisions on noise and random walk", "[stationarity]") {
  SECTION("iid noise: ADF rejects the unit root, KPSS keeps stationarity") {
    const auto adf = adf_test(fixture_iid_500());
    CHECK(adf.reject_at_5pct);
    REQUIRE(adf.p_bracket.has_value());
    CHECK(adf.p_bracket->second <= 0.01);

    const auto kp = kpss_test(fixture_iid_500());
    CHECK_FALSE(kp.reject_at_5pct);
    CHECK(kp.p_bracket->first >= 0.10);
  }

  SECTION("random walk: ADF keeps the unit root, KPSS rejects") {
    const auto adf = adf_test(fixture_walk_500());
    CHECK_FALSE(adf.reject_at_5pct);
    CHECK(adf.p_bracket->first >= 0.10);

    const auto kp = kpss_test(fixture_walk_500());
    CHECK(kp.reject_at_5pct);
    CHECK(kp.p_bracket->second <= 0.01);
  }
}

TEST_CASE("stationarity guards", "[stationarity]") {
  CHECK_THROWS_AS(adf_test(std::vector<double>(10, 1.0)), RangeError);
  CHECK_THROWS_AS(kpss_test(std::vector<double>(10, 1.0)), RangeError);
  CHECK_THROWS_AS(kpss_test(std::vector<double>(50, 3.0)), DegenerateError);
  // a constant series makes the ADF regressors collinear
  CHECK_THROWS_AS(adf_test(std::vector<double>(50, 3.0)), NumericalError);
}
