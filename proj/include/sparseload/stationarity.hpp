#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sparseload/errors.hpp"
#include "sparseload/statistics.hpp"

namespace sparseload {

namespace ols_detail {

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd stderr_;
  double s2 = 0.0;  // residual variance, RSS / (n - k)
};

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) throw NumericalError("ols: singular regressor matrix");
  OlsFit fit;
  fit.coef = qr.solve(y);
  const Eigen::VectorXd resid = y - X * fit.coef;
  fit.s2 = resid.squaredNorm() / static_cast<double>(n - k);
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.stderr_ = (fit.s2 * xtx_inv.diagonal()).cwiseSqrt();
  return fit;
}

}  // namespace ols_detail

/// Schwert lag rule used by both tests' defaults.
inline int schwert_lag(std::size_t n, double scale) {
  return static_cast<int>(std::floor(scale * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// Augmented Dickey-Fuller unit-root test, constant-only regression:
///   dx_t = alpha + rho * x_{t-1} + sum_i gamma_i dx_{t-i} + e_t
/// The statistic is the t-ratio of rho, compared against MacKinnon (2010)
/// finite-sample critical values for the constant case. Rejecting the null
/// (statistic below the 5% value) indicates stationarity.
inline TestResult adf_test(const std::vector<double>& series, int lags = -1) {
  const std::size_t n = series.size();
  if (n < 20) throw RangeError("adf_test: need at least 20 observations");
  const int k = lags >= 0 ? lags : schwert_lag(n, 12.0);

  const std::size_t ndiff = n - 1;
  if (ndiff <= static_cast<std::size_t>(k) + 1) {
    throw RangeError("adf_test: too many lags for series length");
  }
  std::vector<double> d(ndiff);
  for (std::size_t t = 0; t < ndiff; ++t) d[t] = series[t + 1] - series[t];

  const std::size_t nobs = ndiff - static_cast<std::size_t>(k);
  const std::size_t ncols = static_cast<std::size_t>(k) + 2;
  Eigen::MatrixXd X(nobs, ncols);
  Eigen::VectorXd y(nobs);
  for (std::size_t j = 0; j < nobs; ++j) {
    const std::size_t t = static_cast<std::size_t>(k) + j;  // diff index
    y(j) = d[t];
    X(j, 0) = 1.0;
    X(j, 1) = series[t];  // level preceding the step
    for (int i = 1; i <= k; ++i) {
      X(j, 1 + static_cast<std::size_t>(i)) = d[t - static_cast<std::size_t>(i)];
    }
  }

  const auto fit = ols_detail::ols(X, y);
  const double stat = fit.coef(1) / fit.stderr_(1);

  // MacKinnon (2010) response surfaces, one variable, constant case.
  const double T = static_cast<double>(nobs);
  auto crit = [T](double b0, double b1, double b2, double b3) {
    return b0 + b1 / T + b2 / (T * T) + b3 / (T * T * T);
  };
  const double cv1 = crit(-3.43035, -6.5393, -16.786, -79.433);
  const double cv5 = crit(-2.86154, -2.8903, -4.234, -40.040);
  const double cv10 = crit(-2.56677, -1.5384, -2.809, 0.0);

  TestResult result;
  result.name = "adf";
  result.statistic = stat;
  result.reject_at_5pct = stat < cv5;
  if (stat < cv1) result.p_bracket = {0.0, 0.01};
  else if (stat < cv5) result.p_bracket = {0.01, 0.05};
  else if (stat < cv10) result.p_bracket = {0.05, 0.10};
  else result.p_bracket = {0.10, 1.0};
  result.nuisance["lags"] = k;
  result.nuisance["nobs"] = static_cast<double>(nobs);
  result.nuisance["crit_1pct"] = cv1;
  result.nuisance["crit_5pct"] = cv5;
  result.nuisance["crit_10pct"] = cv10;
  return result;
}

/// KPSS level-stationarity test. The statistic is n^-2 sum S_t^2 / s^2 with
/// the long-run variance from a Bartlett kernel of bandwidth
/// floor(4 (n/100)^(1/4)). Rejecting the null (statistic above 0.463)
/// indicates non-stationarity.
inline TestResult kpss_test(const std::vector<double>& series, int lags = -1) {
  const std::size_t n = series.size();
  if (n < 20) throw RangeError("kpss_test: need at least 20 observations");
  const int L = lags >= 0 ? lags : schwert_lag(n, 4.0);

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  std::vector<double> e(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = series[i] - mean;
    ss += e[i] * e[i];
  }
  if (ss == 0.0) throw DegenerateError("kpss_test: zero-variance series");

  double cum = 0.0, eta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += e[i];
    eta += cum * cum;
  }
  eta /= static_cast<double>(n) * static_cast<double>(n);

  double s_hat = ss;
  for (int l = 1; l <= L; ++l) {
    double gamma = 0.0;
    for (std::size_t t = static_cast<std::size_t>(l); t < n; ++t) {
      gamma += e[t] * e[t - static_cast<std::size_t>(l)];
    }
    s_hat += 2.0 * gamma * (1.0 - static_cast<double>(l) / (L + 1.0));
  }
  s_hat /= static_cast<double>(n);

  const double stat = eta / s_hat;

  TestResult result;
  result.name = "kpss";
  result.statistic = stat;
  result.reject_at_5pct = stat > 0.463;
  if (stat > 0.739) result.p_bracket = {0.0, 0.01};
  else if (stat > 0.574) result.p_bracket = {0.01, 0.025};
  else if (stat > 0.463) result.p_bracket = {0.025, 0.05};
  else if (stat > 0.347) result.p_bracket = {0.05, 0.10};
  else result.p_bracket = {0.10, 1.0};
  result.nuisance["lags"] = L;
  result.nuisance["crit_10pct"] = 0.347;
  result.nuisance["crit_5pct"] = 0.463;
  result.nuisance["crit_2_5pct"] = 0.574;
  result.nuisance["crit_1pct"] = 0.739;
  return result;
}

}  // namespace sparseload
