#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/sequences.hpp"

namespace evt {

/// Raised when an estimator has no finite solution for the given data.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Returns {
  std::vector<double> positive;
  std::vector<double> abs_negative;
};

/// r_t = log(p_{t+1}/p_t), split by sign; zero returns are dropped.
Returns log_returns(std::span<const double> prices);

struct EpsGrid {
  double lo = 0.0;
  double hi = 0.5;
  double step = 0.001;

  std::vector<double> points() const;
};

struct CurvePoint {
  double eps;
  double pvalue;
};

struct SeparationResult {
  double eps_hat;
  std::vector<CurvePoint> pvalue_curve;
  std::size_t split_index;  // upper order statistics assigned to the impurity
  bool impurity_detected;
};

/// An interior peak must beat both edge p-values by this much to count.
inline constexpr double kPeakProminence = 0.1;

/// For each grid eps, KS p-value of a Weibull fit to the lower n - floor(n eps)
/// order statistics; eps_hat at the maximum. Grid points are processed in
/// fixed blocks in parallel, so the result does not depend on the worker count.
SeparationResult separate_components(std::span<const double> sample, const EpsGrid& grid = {});
/// Reference: one pass over the grid, each fit warm-started from the previous.
SeparationResult separate_components_serial(std::span<const double> sample,
                                            const EpsGrid& grid = {});

/// Hill estimate from the top r+1 order statistics (any order).
double hill_estimate(std::span<const double> top);

/// Max-based test of a non-truncated Pareto tail against truncation, on the
/// top r+1 order statistics. Small p-values indicate truncation.
double aban_truncation_test(std::span<const double> top);
/// Same test written in terms of its inputs: r, X_(r+1), X_(1) and alpha_hat.
double aban_pvalue(std::size_t r, double x_r1, double x_max, double alpha_hat);

struct AbanPoint {
  std::size_t r;
  double pvalue;
};
/// Test p-values for r = r_min..r_max on one sample.
std::vector<AbanPoint> aban_curve(std::span<const double> sample, std::size_t r_min,
                                  std::size_t r_max);

struct WeibullFit {
  WeibullParams params;
  int iterations;
};

/// Profile-likelihood MLE: tau solves sum x^tau log x / sum x^tau - 1/tau = mean log x
/// by safeguarded Newton on [0.05, 50]; lambda = n / sum x^tau.
WeibullFit fit_weibull_mle(std::span<const double> sample, double tau_start = 1.0);

double weibull_loglik(std::span<const double> sample, const WeibullParams& p);
/// (d/d lambda, d/d tau) of the log-likelihood.
std::pair<double, double> weibull_loglik_gradient(std::span<const double> sample,
                                                  const WeibullParams& p);

struct ParetoFit {
  double alpha;
  double m;
};

/// alpha = n / sum log(x_i / m); m defaults to the sample minimum.
ParetoFit fit_pareto_mle(std::span<const double> tail, std::optional<double> m = std::nullopt);

struct TruncatedParetoFit {
  double alpha;
  double m;      // sample minimum
  double upper;  // sample maximum
};

/// Conditional MLE of a Pareto law truncated to [min, max] of the data.
TruncatedParetoFit fit_truncated_pareto_mle(std::span<const double> tail);

struct EpsPathPoint {
  std::size_t n;
  double eps;
};

enum class EpsPathMode {
  Proportion,  // share of the first n points that the full-sample split put in the impurity
  Recompute,   // separation re-run on every ceil(N/50)-th prefix, linear in between
};

std::vector<EpsPathPoint> eps_path(std::span<const double> series, const SeparationResult& full,
                                   EpsPathMode mode = EpsPathMode::Proportion,
                                   const EpsGrid& grid = {});

struct BetaPoint {
  std::size_t n;
  double ratio;
};

/// log k_n / (k_n eps_n)^beta along the path, skipping eps_n = 0.
std::vector<BetaPoint> beta_diagnostic(const LogPolySeq& k, std::span<const EpsPathPoint> path,
                                       double beta);

/// Fitted mixture; no tail part when eps = 0.
struct FittedModel {
  double eps = 0.0;
  WeibullParams weibull{1.0, 1.0};
  std::optional<ParetoFit> tail;
  std::optional<double> truncation;

  double cdf(double x) const;
  std::vector<double> sample(RandomStream& rng, std::size_t count) const;
};

struct QuantileRow {
  double level;
  double lower;
  double estimate;
  double upper;
};

struct Validation {
  std::vector<QuantileRow> quantile_cis;
  double mixture_ks_pvalue;
  bool degenerate_ci;  // n_sims = 1
};

std::vector<double> default_levels();

/// Simulates n_sims samples of the data's size from the fitted model; per level
/// the band is (min, max) of the simulated sample quantiles around the data quantile.
Validation validate_model(const FittedModel& model, std::span<const double> sample,
                          std::size_t n_sims = 100, std::span<const double> levels = {},
                          std::uint64_t seed = 1);

struct PipelineOptions {
  EpsGrid grid{};
  double beta = 0.45;
  LogPolySeq k = LogPolySeq::identity();
  EpsPathMode path_mode = EpsPathMode::Proportion;
  std::optional<std::size_t> aban_r;  // defaults to split_index
  double aban_level = 0.05;
  std::size_t n_sims = 100;
  std::uint64_t seed = 1;
};

struct FitReport {
  std::size_t n;
  SeparationResult separation;
  FittedModel model;
  std::string tail_model;  // "non-truncated", "truncated" or "none"
  double lambda_hat;
  double tau_hat;
  std::optional<double> alpha_hat;
  std::optional<double> m_hat;
  double eps_hat;
  std::optional<double> aban_pvalue;
  std::vector<AbanPoint> aban_curve;
  std::optional<double> chi2_pvalue;
  double bulk_ks_pvalue;
  std::optional<double> tail_ks_pvalue;
  std::optional<double> tau_over_alpha;
  double mixture_ks_pvalue;
  std::vector<QuantileRow> quantile_cis;
  bool degenerate_ci;
  std::vector<EpsPathPoint> eps_path;
  std::vector<BetaPoint> beta_diagnostic;
  std::vector<std::string> notes;
};

/// Separation, truncation test, MLE and simulation-based validation on one
/// positive series given in time order.
FitReport run_pipeline(std::span<const double> series, const PipelineOptions& opt = {});

}  // namespace evt
