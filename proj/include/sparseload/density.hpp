#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparseload/errors.hpp"
#include "sparseload/special_math.hpp"
#include "sparseload/statistics.hpp"

namespace sparseload {

enum class DistributionKind { Gaussian, Rayleigh };

/// Maximum-likelihood fit of a Gaussian or Rayleigh density, with the log
/// likelihood recorded so the two can be compared directly.
struct DistributionFit {
  DistributionKind kind = DistributionKind::Gaussian;
  double mu = 0.0;      // Gaussian mean
  double sigma = 0.0;   // Gaussian std (n-1) or Rayleigh scale
  double log_likelihood = 0.0;

  double pdf(double x) const {
    if (kind == DistributionKind::Gaussian) return normal_pdf(x, mu, sigma);
    if (x < 0.0) return 0.0;
    const double s2 = sigma * sigma;
    return x / s2 * std::exp(-0.5 * x * x / s2);
  }

  double cdf(double x) const {
    if (kind == DistributionKind::Gaussian) return normal_cdf(x, mu, sigma);
    if (x < 0.0) return 0.0;
    return 1.0 - std::exp(-0.5 * x * x / (sigma * sigma));
  }

  double quantile(double p) const {
    if (kind == DistributionKind::Gaussian) return mu + sigma * normal_ppf(p);
    return sigma * std::sqrt(-2.0 * std::log1p(-p));
  }
};

namespace density_detail {

// Type-7 (linear interpolation) quantile of a sorted copy.
inline double quantile_type7(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace density_detail

/// Silverman's rule of thumb: 0.9 * min(std, IQR/1.34) * n^(-1/5).
inline double silverman_bandwidth(const std::vector<double>& series) {
  if (series.empty()) throw RangeError("silverman_bandwidth: empty series");
  const double sd = stats_detail::sample_std(series);
  const double iqr = density_detail::quantile_type7(series, 0.75) -
                     density_detail::quantile_type7(series, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(series.size()), -0.2);
}

/// Gaussian-kernel density estimate evaluated on a sorted grid.
inline std::vector<double> kde(const std::vector<double>& series, const std::vector<double>& grid,
                               double bandwidth = 0.0) {
  if (series.empty()) throw RangeError("kde: empty series");
  if (!std::is_sorted(grid.begin(), grid.end())) throw RangeError("kde: grid must be sorted");
  double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(series);
  if (!(h > 0.0)) throw DegenerateError("kde: zero bandwidth (constant data)");

  const double norm = 1.0 / (static_cast<double>(series.size()) * h * std::sqrt(2.0 * M_PI));
  std::vector<double> density(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double x : series) {
      const double z = (grid[g] - x) / h;
      acc += std::exp(-0.5 * z * z);
    }
    density[g] = acc * norm;
  }
  return density;
}

/// Grid spanning the data range widened by five bandwidths on each side.
inline std::vector<double> kde_grid(const std::vector<double>& series, double bandwidth,
                                    std::size_t points = 512) {
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it - 5.0 * bandwidth;
  const double hi = *hi_it + 5.0 * bandwidth;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

inline DistributionFit fit_distribution(const std::vector<double>& series,
                                        DistributionKind kind) {
  if (series.empty()) throw RangeError("fit_distribution: empty series");
  DistributionFit fit;
  fit.kind = kind;
  if (kind == DistributionKind::Gaussian) {
    fit.mu = stats_detail::mean_of(series);
    fit.sigma = stats_detail::sample_std(series);
    if (fit.sigma == 0.0) throw DegenerateError("fit_distribution: constant data");
  } else {
    double msq = 0.0;
    for (double x : series) {
      if (x < 0.0) throw DomainError("fit_distribution: Rayleigh requires non-negative data");
      msq += x * x;
    }
    msq /= static_cast<double>(series.size());
    fit.sigma = std::sqrt(0.5 * msq);
    if (fit.sigma == 0.0) throw DegenerateError("fit_distribution: all-zero data");
  }
  double ll = 0.0;
  for (double x : series) ll += std::log(fit.pdf(x));
  fit.log_likelihood = ll;
  return fit;
}

/// Chi-squared goodness of fit with ceil(sqrt(n)) equal-probability bins
/// under the fitted CDF; degrees of freedom are reduced by the number of
/// fitted parameters.
inline TestResult chi_squared_gof(const std::vector<double>& series, const DistributionFit& fit) {
  const std::size_t n = series.size();
  if (n < 50) throw RangeError("chi_squared_gof: need at least 50 observations");
  const int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double expected = static_cast<double>(n) / k;
  if (expected < 1.0) throw BinningError("chi_squared_gof: expected count below 1");

  std::vector<double> edges(static_cast<std::size_t>(k) - 1);
  for (int i = 1; i < k; ++i) {
    edges[static_cast<std::size_t>(i) - 1] = fit.quantile(static_cast<double>(i) / k);
  }

  std::vector<double> observed(static_cast<std::size_t>(k), 0.0);
  for (double x : series) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    observed[static_cast<std::size_t>(it - edges.begin())] += 1.0;
  }

  double stat = 0.0;
  for (double o : observed) stat += (o - expected) * (o - expected) / expected;

  const int n_params = fit.kind == DistributionKind::Gaussian ? 2 : 1;
  const int dof = k - 1 - n_params;
  if (dof < 1) throw BinningError("chi_squared_gof: non-positive degrees of freedom");

  TestResult result;
  result.name = "chi_squared_gof";
  result.statistic = stat;
  result.p_value = chi2_sf(stat, dof);
  result.reject_at_5pct = *result.p_value < 0.05;
  result.nuisance["bins"] = k;
  result.nuisance["dof"] = dof;
  return result;
}

}  // namespace sparseload
