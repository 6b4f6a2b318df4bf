#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparseload/interpolation.hpp"
#include "sparseload/synthetic.hpp"

using namespace sparseload;

namespace {

// Frame with chosen loads at a single hour-of-day, all other hours empty.
TimeSeriesFrame frame_with_hour_values(int hour, const std::vector<double>& values) {
  TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), values.size() * 24);
  for (std::size_t d = 0; d < values.size(); ++d) {
    frame.set_load(d * 24 + static_cast<std::size_t>(hour), values[d]);
  }
  return frame;
}

}  // namespace

TEST_CASE("hourly gaussian estimation", "[interpolation]") {
  SECTION("two-point sample stats") {
    const auto frame = frame_with_hour_values(9, {400.0, 600.0});
    const auto table = estimate_hourly_gaussians(frame);
    CHECK(table.at(9).mu == Catch::Approx(500.0));
    CHECK(table.at(9).sigma == Catch::Approx(std::sqrt(2.0 * 100.0 * 100.0 / 1.0)).epsilon(1e-9));
    CHECK(table.at(9).count == 2);
    CHECK_FALSE(table.at(9).fallback_used);
  }

  SECTION("single observation takes the global fallback") {
    auto frame = frame_with_hour_values(9, {400.0, 600.0});
    frame.set_load(10, 800.0);  // one observation at hour 10 on day 0
    const auto table = estimate_hourly_gaussians(frame);
    CHECK(table.at(10).fallback_used);
    CHECK(table.at(10).mu == table.global_mu);
    CHECK(table.at(10).sigma == table.global_sigma);
    CHECK(table.at(10).count == 1);
  }

  SECTION("constant observations give sigma 0") {
    const auto frame = frame_with_hour_values(9, {500.0, 500.0, 500.0});
    const auto table = estimate_hourly_gaussians(frame);
    CHECK(table.at(9).mu == 500.0);
    CHECK(table.at(9).sigma == 0.0);
  }

  SECTION("no observations anywhere") {
    TimeSeriesFrame empty(make_hourstamp(2021, 1, 1, 0), 24);
    CHECK_THROWS_AS(estimate_hourly_gaussians(empty), EstimationError);
  }
}

TEST_CASE("gaussian imputation fills exactly the missing operating rows", "[interpolation]") {
  SyntheticSpec spec = SyntheticSpec::plant_default();
  spec.n_days = 30;
  spec.seed = 21;
  auto frame = apply_sparsity_mask(generate_synthetic_wss(spec), 0.6245, 4);
  const auto table = estimate_hourly_gaussians(frame, spec.capacity);
  const auto imputed = impute_gaussian(frame, table, 9);

  CHECK(imputed.sparsity() == 0.0);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.load(i).has_value()) {
      CHECK(*imputed.load(i) == *frame.load(i));  // observed untouched
      CHECK_FALSE(imputed.imputed(i));
    } else if (frame.operating(i)) {
      REQUIRE(imputed.load(i).has_value());
      CHECK(imputed.imputed(i));
      CHECK(*imputed.load(i) >= 0.0);
      CHECK(*imputed.load(i) <= spec.capacity);
    } else {
      CHECK_FALSE(imputed.load(i).has_value());  // never imputes off-hours
    }
  }

  SECTION("deterministic for a fixed seed") {
    const auto again = impute_gaussian(frame, table, 9);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (imputed.load(i)) CHECK(*again.load(i) == *imputed.load(i));
    }
  }

  SECTION("idempotent on a complete frame") {
    const auto twice = impute_gaussian(imputed, table, 77);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      if (imputed.load(i)) CHECK(*twice.load(i) == *imputed.load(i));
    }
  }
}

TEST_CASE("zero-variance hour imputes the mean exactly", "[interpolation]") {
  auto frame = frame_with_hour_values(9, {700.0, 700.0, 700.0});
  frame.clear_load(9);  // knock out day 0
  auto table = estimate_hourly_gaussians(frame);
  REQUIRE(table.at(9).sigma == 0.0);
  const auto imputed = impute_gaussian(frame, table, 1);
  CHECK(*imputed.load(9) == 700.0);
}

TEST_CASE("imputation clips to the capacity bounds", "[interpolation]") {
  // mu close to the cap: a large share of draws must clip to exactly hi.
  HourlyGaussianTable table;
  table.hi = 2000.0;
  for (auto& h : table.hours) {
    h.mu = 1990.0;
    h.sigma = 100.0;
    h.count = 100;
  }
  TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 10000);
  const auto imputed = impute_gaussian(frame, table, 31);
  std::size_t at_cap = 0;
  for (std::size_t i = 0; i < imputed.size(); ++i) {
    REQUIRE(imputed.load(i).has_value());
    CHECK(*imputed.load(i) <= 2000.0);
    CHECK(*imputed.load(i) >= 0.0);
    if (*imputed.load(i) == 2000.0) ++at_cap;
  }
  CHECK(at_cap > 0);

  // mu near zero: negative pre-clip draws appear as exactly 0.
  for (auto& h : table.hours) {
    h.mu = 5.0;
    h.sigma = 100.0;
  }
  const auto low = impute_gaussian(frame, table, 32);
  std::size_t at_zero = 0;
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (*low.load(i) == 0.0) ++at_zero;
  }
  CHECK(at_zero > 0);
}

TEST_CASE("imputed moments converge to the table parameters", "[interpolation]") {
  // 3000 missing cells at one hour, bounds far from mu.
  const int n_days = 3000;
  TimeSeriesFrame frame(make_hourstamp(2015, 1, 1, 0), n_days * 24);
  HourlyGaussianTable table;
  table.hi = 1e9;
  for (auto& h : table.hours) {
    h.mu = 900.0;
    h.sigma = 80.0;
  }
  const auto imputed = impute_gaussian(frame, table, 55);
  std::vector<double> at_hour;
  for (int d = 0; d < n_days; ++d) at_hour.push_back(*imputed.load(d * 24 + 12));

  const double n = static_cast<double>(at_hour.size());
  double mean = 0.0;
  for (double v : at_hour) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : at_hour) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  CHECK(std::abs(mean - 900.0) < 4.0 * 80.0 / std::sqrt(n));
  CHECK(std::abs(sd - 80.0) < 0.1 * 80.0);
}

TEST_CASE("linear interpolation baseline", "[interpolation]") {
  SECTION("midpoint") {
    TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 3);
    frame.set_load(0, 100.0);
    frame.set_load(2, 300.0);
    const auto out = impute_linear(frame);
    CHECK(*out.load(1) == Catch::Approx(200.0));
    CHECK(out.imputed(1));
  }

  SECTION("leading and trailing gaps extend the nearest observation") {
    TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 5);
    frame.set_load(1, 150.0);
    frame.set_load(3, 250.0);
    const auto out = impute_linear(frame);
    CHECK(*out.load(0) == 150.0);
    CHECK(*out.load(2) == Catch::Approx(200.0));
    CHECK(*out.load(4) == 250.0);
  }

  SECTION("no gaps is identity") {
    TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 3);
    for (std::size_t i = 0; i < 3; ++i) frame.set_load(i, 10.0 * (i + 1));
    const auto out = impute_linear(frame);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(*out.load(i) == *frame.load(i));
      CHECK_FALSE(out.imputed(i));
    }
  }

  SECTION("fewer than two observations throws") {
    TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 3);
    frame.set_load(0, 1.0);
    CHECK_THROWS_AS(impute_linear(frame), EstimationError);
  }
}
