#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparseload/density.hpp"
#include "sparseload/rng.hpp"
#include "sparseload/special_math.hpp"

using namespace sparseload;

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return acc;
}

// Independent chi-squared survival oracle: Simpson quadrature of the pdf.
double chi2_sf_quadrature(double x, double k) {
  const double upper = std::max(x * 4.0, x + 40.0 * std::sqrt(2.0 * k) + 100.0);
  const int steps = 200000;
  const double h = (upper - x) / steps;
  auto pdf = [k](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp((0.5 * k - 1.0) * std::log(t) - 0.5 * t - std::lgamma(0.5 * k) -
                    0.5 * k * std::log(2.0));
  };
  double acc = pdf(x) + pdf(upper);
  for (int i = 1; i < steps; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * pdf(x + i * h);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("special functions", "[density]") {
  CHECK(normal_cdf(0.0) == Catch::Approx(0.5));
  CHECK(normal_ppf(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_ppf(normal_cdf(1.234)) == Catch::Approx(1.234).epsilon(1e-9));

  // chi-squared survival vs quadrature oracle at a few (x, k)
  for (const auto& [x, k] : std::vector<std::pair<double, double>>{
           {3.84, 1.0}, {11.07, 5.0}, {50.0, 30.0}, {120.0, 100.0}}) {
    CHECK(chi2_sf(x, k) == Catch::Approx(chi2_sf_quadrature(x, k)).epsilon(1e-6));
  }
}

TEST_CASE("kde single kernel and symmetry", "[density]") {
  SECTION("single point, bandwidth one") {
    const auto d = kde({0.0}, {0.0}, 1.0);
    CHECK(d[0] == Catch::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  }

  SECTION("symmetric data gives a symmetric density") {
    const std::vector<double> data = {-2.0, -1.0, 1.0, 2.0};
    const std::vector<double> grid = {-1.5, 1.5};
    const auto d = kde(data, grid, 0.7);
    CHECK(std::abs(d[0] - d[1]) < 1e-12);
  }

  SECTION("constant data has no bandwidth") {
    CHECK_THROWS_AS(kde(std::vector<double>(10, 5.0), {5.0}), DegenerateError);
  }
}

TEST_CASE("kde approximates the true density and integrates to one", "[density]") {
  Rng rng(9);
  std::vector<double> data;
  const int n = 10000;
  for (int i = 0; i < n; ++i) data.push_back(rng.normal());

  const double h = silverman_bandwidth(data);
  const auto grid = kde_grid(data, h, 1001);
  const auto d = kde(data, grid, h);

  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(d[i] - normal_pdf(grid[i])));
    CHECK(d[i] >= 0.0);
  }
  CHECK(max_dev < 0.02);

  const double mass = trapezoid(grid, d);
  CHECK(mass > 0.99);
  CHECK(mass < 1.01);
}

TEST_CASE("distribution fits", "[density]") {
  SECTION("gaussian moments") {
    const auto fit = fit_distribution({1.0, 2.0, 3.0}, DistributionKind::Gaussian);
    CHECK(fit.mu == Catch::Approx(2.0));
    CHECK(fit.sigma == Catch::Approx(1.0));
  }

  SECTION("rayleigh closed form on a singleton") {
    const double scale = 7.5;
    const auto fit = fit_distribution({scale * std::sqrt(2.0)}, DistributionKind::Rayleigh);
    CHECK(fit.sigma == Catch::Approx(scale).epsilon(1e-12));
  }

  SECTION("rayleigh rejects negative data") {
    CHECK_THROWS_AS(fit_distribution({1.0, -0.5}, DistributionKind::Rayleigh), DomainError);
  }

  SECTION("gaussian beats rayleigh on gaussian load data") {
    Rng rng(9);
    std::vector<double> data;
    for (int i = 0; i < 10000; ++i) data.push_back(rng.normal(500.0, 100.0));
    const auto g = fit_distribution(data, DistributionKind::Gaussian);
    const auto r = fit_distribution(data, DistributionKind::Rayleigh);
    CHECK(g.log_likelihood > r.log_likelihood);
  }
}

TEST_CASE("chi-squared goodness of fit", "[density]") {
  SECTION("well-specified null rejects at roughly the nominal rate") {
    int rejects = 0;
    for (int seed = 0; seed < 100; ++seed) {
      Rng rng(1000 + seed);
      std::vector<double> data;
      for (int i = 0; i < 10000; ++i) data.push_back(rng.normal(500.0, 100.0));
      const auto fit = fit_distribution(data, DistributionKind::Gaussian);
      const auto res = chi_squared_gof(data, fit);
      if (res.reject_at_5pct) ++rejects;
    }
    CHECK(rejects >= 1);
    CHECK(rejects <= 13);  // binomial(100, 0.05): P(X > 13) < 1e-3
  }

  SECTION("uniform data against a gaussian fit rejects, p matches oracle") {
    Rng rng(2);
    std::vector<double> data;
    for (int i = 0; i < 5000; ++i) data.push_back(rng.uniform(0.0, 1.0));
    const auto fit = fit_distribution(data, DistributionKind::Gaussian);
    const auto res = chi_squared_gof(data, fit);
    CHECK(res.reject_at_5pct);
    REQUIRE(res.p_value.has_value());
    const double oracle = chi2_sf_quadrature(res.statistic, res.nuisance.at("dof"));
    CHECK(*res.p_value == Catch::Approx(oracle).margin(1e-9));
  }

  SECTION("too-small sample throws") {
    const std::vector<double> tiny(20, 1.0);
    DistributionFit fit;
    fit.mu = 1.0;
    fit.sigma = 1.0;
    CHECK_THROWS_AS(chi_squared_gof(tiny, fit), RangeError);
  }
}
