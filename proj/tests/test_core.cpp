#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "sparseload/datetime.hpp"
#include "sparseload/features.hpp"
#include "sparseload/frame.hpp"
#include "sparseload/rng.hpp"
#include "sparseload/scaling.hpp"

using namespace sparseload;

namespace {

// Independent calendar oracle built on std::chrono.
CalendarFields chrono_oracle(int y, int m, int d, int h) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  const weekday wd{sys_days{ymd}};
  CalendarFields f{};
  f.year = y;
  f.month = m;
  f.day = d;
  f.weekday = static_cast<int>(wd.iso_encoding()) - 1;  // ISO Monday=1 -> 0
  f.hour = h;
  return f;
}

TimeSeriesFrame ramp_frame(std::size_t n, double start_load = 100.0) {
  TimeSeriesFrame frame(make_hourstamp(2021, 3, 1, 0), n);
  for (std::size_t i = 0; i < n; ++i) frame.set_load(i, start_load + 10.0 * i);
  return frame;
}

}  // namespace

TEST_CASE("calendar features match the chrono oracle", "[core]") {
  struct Case {
    int y, m, d, h;
  };
  const Case cases[] = {{2021, 3, 12, 14}, {2016, 2, 29, 0}, {2015, 1, 1, 8},
                        {2004, 12, 31, 1}, {1999, 12, 31, 23}, {2038, 6, 15, 12}};
  for (const auto& c : cases) {
    const CalendarFields got = calendar_features(make_hourstamp(c.y, c.m, c.d, c.h));
    const CalendarFields want = chrono_oracle(c.y, c.m, c.d, c.h);
    CHECK(got.year == want.year);
    CHECK(got.month == want.month);
    CHECK(got.day == want.day);
    CHECK(got.weekday == want.weekday);
    CHECK(got.hour == want.hour);
  }
}

TEST_CASE("calendar features fixed values", "[core]") {
  const CalendarFields a = calendar_features(make_hourstamp(2021, 3, 12, 14));
  CHECK(a.weekday == 4);
  const CalendarFields b = calendar_features(make_hourstamp(2016, 2, 29, 0));
  CHECK(b.weekday == 0);
  const CalendarFields c = calendar_features(make_hourstamp(2015, 1, 1, 8));
  CHECK(c.weekday == 3);
}

TEST_CASE("hourstamp parse and format round-trip", "[core]") {
  const HourStamp ts = parse_hourstamp("2004-12-31 01:00:00", "%Y-%m-%d %H:%M:%S");
  CHECK(format_hourstamp(ts) == "2004-12-31 01:00:00");
  CHECK(ts + 1 == parse_hourstamp("2004-12-31 02:00:00", "%Y-%m-%d %H:%M:%S"));
  CHECK_THROWS_AS(parse_hourstamp("2004-12-31 01:30:00", "%Y-%m-%d %H:%M:%S"), IngestError);
  CHECK_THROWS_AS(parse_hourstamp("not a date", "%Y-%m-%d %H:%M:%S"), IngestError);
  CHECK(parse_date("2021-03-12") == make_hourstamp(2021, 3, 12, 0));
}

TEST_CASE("fit_minmax basics", "[core]") {
  auto frame = ramp_frame(3);
  frame.clear_load(0);
  frame.set_load(0, 100.0);
  frame.set_load(1, 300.0);
  frame.set_load(2, 200.0);
  const MinMaxParams p = fit_minmax(frame, 0, 3);
  CHECK(p.min[kLoadFeature] == 100.0);
  CHECK(p.max[kLoadFeature] == 300.0);
  CHECK_FALSE(p.constant[kLoadFeature]);

  SECTION("single value is constant-flagged") {
    TimeSeriesFrame one(make_hourstamp(2021, 1, 1, 0), 1);
    one.set_load(0, 42.0);
    const MinMaxParams q = fit_minmax(one, 0, 1);
    CHECK(q.min[kLoadFeature] == 42.0);
    CHECK(q.max[kLoadFeature] == 42.0);
    CHECK(q.constant[kLoadFeature]);
    CHECK(q.transform_load(42.0) == 0.0);
  }

  SECTION("midpoint symmetry") {
    TimeSeriesFrame two(make_hourstamp(2021, 1, 1, 0), 2);
    two.set_load(0, 0.0);
    two.set_load(1, 2000.0);
    const MinMaxParams q = fit_minmax(two, 0, 2);
    CHECK(q.transform_load(1000.0) == Catch::Approx(0.5));
    CHECK(q.transform_load(500.0) == Catch::Approx(0.25));
    CHECK(q.transform_load(0.0) == 0.0);
    CHECK(q.transform_load(2000.0) == 1.0);
  }

  SECTION("empty range throws") {
    CHECK_THROWS_AS(fit_minmax(frame, 2, 2), RangeError);
  }
}

TEST_CASE("minmax round-trip is identity", "[core]") {
  auto frame = ramp_frame(48);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    frame.weather(i).avg_temperature = 20.0 + 0.3 * i;
    frame.weather(i).wind_speed = 2.0 + 0.05 * i;
    frame.weather(i).relative_humidity = 60.0 + 0.1 * i;
  }
  const MinMaxParams p = fit_minmax(frame, 0, 48);

  const FeatureVector v = feature_row(frame, 17);
  const FeatureVector inv = invert_minmax(p, apply_minmax(p, v));
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    if (p.constant[j]) continue;
    CHECK(inv[j] == Catch::Approx(v[j]).epsilon(1e-12));
  }
  CHECK(p.invert_load(p.transform_load(1234.5)) == Catch::Approx(1234.5).epsilon(1e-12));
  CHECK(p.invert_load(0.0) == p.min[kLoadFeature]);
  CHECK(p.invert_load(1.0) == p.max[kLoadFeature]);
}

TEST_CASE("fit_minmax is permutation-invariant over rows", "[core]") {
  // Two frames holding the same loads in different row order.
  TimeSeriesFrame a(make_hourstamp(2021, 5, 1, 0), 4);
  TimeSeriesFrame b(make_hourstamp(2021, 5, 1, 0), 4);
  const double loads[] = {120.0, 800.0, 445.0, 300.0};
  for (std::size_t i = 0; i < 4; ++i) {
    a.set_load(i, loads[i]);
    b.set_load(i, loads[3 - i]);
  }
  const MinMaxParams pa = fit_minmax(a, 0, 4);
  const MinMaxParams pb = fit_minmax(b, 0, 4);
  CHECK(pa.min[kLoadFeature] == pb.min[kLoadFeature]);
  CHECK(pa.max[kLoadFeature] == pb.max[kLoadFeature]);
}

TEST_CASE("frame sparsity accounting", "[core]") {
  TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 10);
  for (std::size_t i = 0; i < 10; ++i) frame.set_load(i, 50.0);
  CHECK(frame.sparsity() == 0.0);
  for (std::size_t i = 0; i < 10; ++i) frame.clear_load(i);
  CHECK(frame.sparsity() == 1.0);
  frame.set_load(3, 70.0);
  CHECK(frame.sparsity() == Catch::Approx(0.9));
  // non-operating rows are excluded from the accounting
  frame.set_operating(0, false);
  CHECK(frame.sparsity() == Catch::Approx(8.0 / 9.0));
}

TEST_CASE("load values must be finite and non-negative", "[core]") {
  TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 1);
  CHECK_THROWS_AS(frame.set_load(0, -1.0), DomainError);
  CHECK_THROWS_AS(frame.set_load(0, std::nan("")), DomainError);
}

TEST_CASE("weather fill forward then backward", "[core]") {
  TimeSeriesFrame frame(make_hourstamp(2021, 1, 1, 0), 5);
  frame.weather(2).avg_temperature = 25.0;
  frame.fill_weather_gaps();
  CHECK(frame.weather(0).avg_temperature == 25.0);  // back-filled
  CHECK(frame.weather(4).avg_temperature == 25.0);  // forward-filled
  CHECK(frame.weather(1).wind_speed == 0.0);        // absent channel -> 0
}

TEST_CASE("rng stream is deterministic and well-behaved", "[core]") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

  Rng r(7);
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) {
    draws[i] = r.normal();
    mean += draws[i];
  }
  mean /= n;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= n - 1;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == Catch::Approx(1.0).margin(0.05));
}
