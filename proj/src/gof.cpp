#include "evt/gof.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

namespace evt {

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    // Jacobi theta form, which converges fast where the alternating series does not.
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi * pi / (8.0 * x * x));
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return std::sqrt(2.0 * pi) / x * sum;
  }
  return 1.0 - kolmogorov_sf(x);
}

double kolmogorov_sf(double x) {
  if (x < 1.0) return 1.0 - kolmogorov_cdf(x);
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sample, const Cdf& cdf, const Cdf& left_cdf) {
  if (sample.empty()) throw DomainError("ks: sample is empty");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    const double f_left = left_cdf ? left_cdf(xs[i]) : f;
    d = std::max({d, (i + 1) / n - f, f_left - i / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sample, const Cdf& cdf, const Cdf& left_cdf) {
  const double d = ks_statistic(sample, cdf, left_cdf);
  const double n = static_cast<double>(sample.size());
  return {d, kolmogorov_sf(std::sqrt(n) * d), sample.size(), static_cast<bool>(left_cdf)};
}

KsResult ks_test(std::span<const double> sample, const LimitLaw& law) {
  const LimitCdf rc{law, LimitCdf::Mode::RightContinuous};
  const bool jumps = !limit_atoms(law).empty();
  Cdf left = jumps ? Cdf([&](double x) { return limit_cdf_left(rc, x); }) : Cdf{};
  return ks_test(sample, [&](double x) { return limit_cdf(rc, x); }, left);
}

double dkw_bound(std::size_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double sample_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw DomainError("sample_quantile: empty sample");
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Chi2Result chi2_independence(std::span<const double> series, std::size_t lag, std::size_t bins) {
  if (bins < 2 || lag < 1) throw DomainError("chi2: need bins >= 2 and lag >= 1");
  if (series.size() <= bins * bins * 5 + lag) {
    throw DomainError("chi2: series too short for expected cell counts >= 5");
  }
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (std::size_t j = 1; j < bins; ++j) {
    edges.push_back(sample_quantile(sorted, static_cast<double>(j) / static_cast<double>(bins)));
  }
  if (sorted.front() == sorted.back() ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw DomainError("chi2: degenerate binning (repeated quantile edges)");
  }
  auto bin_of = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
  };

  std::vector<double> table(bins * bins, 0.0);
  const std::size_t pairs = series.size() - lag;
  for (std::size_t t = 0; t < pairs; ++t) table[bin_of(series[t]) * bins + bin_of(series[t + lag])] += 1.0;

  std::vector<double> rows(bins, 0.0), cols(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      rows[i] += table[i * bins + j];
      cols[j] += table[i * bins + j];
    }
  }
  if (std::find(rows.begin(), rows.end(), 0.0) != rows.end() ||
      std::find(cols.begin(), cols.end(), 0.0) != cols.end()) {
    throw DomainError("chi2: degenerate binning (empty class)");
  }
  double stat = 0.0;
  const double total = static_cast<double>(pairs);
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      const double expected = rows[i] * cols[j] / total;
      const double diff = table[i * bins + j] - expected;
      stat += diff * diff / expected;
    }
  }
  const int dof = static_cast<int>((bins - 1) * (bins - 1));
  return {stat, dof, boost::math::gamma_q(dof / 2.0, stat / 2.0)};
}

}  // namespace evt
