#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "evt/limits.hpp"

namespace evt {

using Cdf = std::function<double(double)>;

/// Limiting Kolmogorov distribution K(x) = 1 - 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_cdf(double x);
/// 1 - K(x), accurate in the far tail.
double kolmogorov_sf(double x);

struct KsResult {
  double statistic;
  double pvalue;
  std::size_t n;
  /// The reference has jumps; the asymptotic p-value is then conservative.
  bool reference_has_jumps = false;
};

/// sup_x |ECDF(x) - F(x)| evaluated at the order statistics. left_cdf gives
/// F(x-) and is needed only when F has jumps; by default F is treated as
/// continuous.
double ks_statistic(std::span<const double> sample, const Cdf& cdf, const Cdf& left_cdf = {});

/// One-sample KS test with p-value 1 - K(sqrt(n) D).
KsResult ks_test(std::span<const double> sample, const Cdf& cdf, const Cdf& left_cdf = {});
/// KS test against the right-continuous form of a limit law.
KsResult ks_test(std::span<const double> sample, const LimitLaw& law);

/// Distribution-free half-width: P(sup |ECDF_n - F| > eps) <= delta.
double dkw_bound(std::size_t n, double delta);

struct Chi2Result {
  double statistic;
  int dof;
  double pvalue;
};

/// Pearson chi-squared test of independence between x_t and x_{t+lag}, both
/// binned by the empirical quantiles of the series into `bins` classes.
Chi2Result chi2_independence(std::span<const double> series, std::size_t lag = 1,
                             std::size_t bins = 4);

/// Empirical quantile (linear interpolation between order statistics).
double sample_quantile(std::span<const double> sorted, double level);

}  // namespace evt
