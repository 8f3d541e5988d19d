#include "evt/fitpipe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evt/gof.hpp"

namespace evt {

namespace {

constexpr double kTauLo = 0.05;
constexpr double kTauHi = 50.0;
constexpr double kTauTol = 1e-10;
constexpr std::size_t kBlock = 25;
constexpr std::size_t kMinFit = 10;

struct ProfileEval {
  double g;
  double dg;
  double log_sum_pow;  // log sum x^tau
};

// Profile equation in tau on log-data, with x^tau scaled by the largest value.
ProfileEval profile(std::span<const double> logs, double mean_log, double max_log, double tau) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (double l : logs) {
    const double d = l - max_log;
    const double w = std::exp(tau * d);
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
  }
  const double m1 = s1 / s0;
  const double var = std::max(0.0, s2 / s0 - m1 * m1);
  // Shifting the logs by max_log leaves the weighted variance unchanged.
  return {m1 + max_log - 1.0 / tau - mean_log, var + 1.0 / (tau * tau),
          std::log(s0) + tau * max_log};
}

WeibullFit fit_logs(std::span<const double> logs, double tau_start) {
  if (logs.size() < kMinFit) throw FitError("fit_weibull_mle: need at least 10 observations");
  const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
  if (*mn == *mx) throw FitError("fit_weibull_mle: all observations are equal");
  const double max_log = *mx;
  const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();

  double a = kTauLo, b = kTauHi;
  if (profile(logs, mean_log, max_log, a).g > 0.0 || profile(logs, mean_log, max_log, b).g < 0.0) {
    throw FitError("fit_weibull_mle: no sign change of the profile equation on [0.05, 50]");
  }
  double tau = std::clamp(tau_start, a, b);
  ProfileEval e = profile(logs, mean_log, max_log, tau);
  int it = 0;
  for (; it < 200; ++it) {
    (e.g < 0.0 ? a : b) = tau;
    double next = tau - e.g / e.dg;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - tau);
    tau = next;
    e = profile(logs, mean_log, max_log, tau);
    if (step < kTauTol * std::max(1.0, tau) || e.g == 0.0) break;
  }
  const double lambda = std::exp(std::log(static_cast<double>(logs.size())) - e.log_sum_pow);
  return {WeibullParams(lambda, tau), it + 1};
}

double ks_pvalue_sorted(std::span<const double> sorted, const WeibullParams& w) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = weibull_cdf(sorted[i], w);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return kolmogorov_sf(std::sqrt(n) * d);
}

struct Prepared {
  std::vector<double> sorted;
  std::vector<double> logs;
  std::vector<double> eps;
};

Prepared prepare(std::span<const double> sample, const EpsGrid& grid) {
  if (sample.size() < 100) throw DomainError("separate_components: need at least 100 observations");
  Prepared p{{sample.begin(), sample.end()}, {}, grid.points()};
  if (p.eps.empty()) throw DomainError("separate_components: empty eps grid");
  std::sort(p.sorted.begin(), p.sorted.end());
  if (p.sorted.front() <= 0.0) throw DomainError("separate_components: observations must be positive");
  p.logs.resize(p.sorted.size());
  std::transform(p.sorted.begin(), p.sorted.end(), p.logs.begin(), [](double x) { return std::log(x); });
  return p;
}

std::size_t split_count(std::size_t n, double eps) {
  // Grid points are multiples of the step; the nudge keeps n*eps = 57.000...01 from flooring to 56.
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * eps * (1.0 + 1e-12)));
}

double grid_pvalue(const Prepared& p, double eps, double& tau) {
  const std::size_t cut = split_count(p.sorted.size(), eps);
  const std::size_t keep = p.sorted.size() - std::min(cut, p.sorted.size());
  if (keep < kMinFit) return 0.0;
  try {
    const WeibullFit fit = fit_logs(std::span(p.logs).first(keep), tau);
    tau = fit.params.tau;
    return ks_pvalue_sorted(std::span(p.sorted).first(keep), fit.params);
  } catch (const FitError&) {
    return 0.0;
  }
}

SeparationResult summarize(const Prepared& p, std::vector<CurvePoint> curve) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].pvalue > curve[best].pvalue) best = i;
  }
  const double edge = std::max(curve.front().pvalue, curve.back().pvalue);
  const bool interior = best != 0 && best + 1 != curve.size();
  const bool detected = interior && curve[best].pvalue - edge >= kPeakProminence;
  const double eps_hat = curve[best].eps;
  return {eps_hat, std::move(curve), split_count(p.sorted.size(), eps_hat), detected};
}

}  // namespace

Returns log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw DomainError("log_returns: need at least two prices");
  Returns r;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices[t] > 0.0)) throw DomainError("log_returns: prices must be positive");
    if (t == 0) continue;
    const double x = std::log(prices[t] / prices[t - 1]);
    if (x > 0.0) r.positive.push_back(x);
    if (x < 0.0) r.abs_negative.push_back(-x);
  }
  return r;
}

std::vector<double> EpsGrid::points() const {
  std::vector<double> out;
  if (!(step > 0.0) || hi < lo) return out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

SeparationResult separate_components(std::span<const double> sample, const EpsGrid& grid) {
  const Prepared p = prepare(sample, grid);
  std::vector<CurvePoint> curve(p.eps.size());
  const auto blocks = static_cast<std::int64_t>((p.eps.size() + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < blocks; ++b) {
    double tau = 1.0;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, p.eps.size());
    for (std::size_t i = lo; i < hi; ++i) curve[i] = {p.eps[i], grid_pvalue(p, p.eps[i], tau)};
  }
  return summarize(p, std::move(curve));
}

SeparationResult separate_components_serial(std::span<const double> sample, const EpsGrid& grid) {
  const Prepared p = prepare(sample, grid);
  std::vector<CurvePoint> curve;
  double tau = 1.0;
  for (double e : p.eps) curve.push_back({e, grid_pvalue(p, e, tau)});
  return summarize(p, std::move(curve));
}

double hill_estimate(std::span<const double> top) {
  if (top.size() < 2) throw DomainError("hill_estimate: need at least two order statistics");
  std::vector<double> xs(top.begin(), top.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  if (xs.back() <= 0.0) throw DomainError("hill_estimate: values must be positive");
  const std::size_t r = xs.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i < r; ++i) s += std::log(xs[i] / xs[r]);
  if (!(s > 0.0)) throw FitError("hill_estimate: tied order statistics give an infinite estimate");
  return static_cast<double>(r) / s;
}

double aban_pvalue(std::size_t r, double x_r1, double x_max, double alpha_hat) {
  return std::exp(-static_cast<double>(r) * std::pow(x_r1 / x_max, alpha_hat));
}

double aban_truncation_test(std::span<const double> top) {
  if (top.size() < 11) throw DomainError("aban_truncation_test: need r >= 10");
  const double alpha = hill_estimate(top);
  const auto [mn, mx] = std::minmax_element(top.begin(), top.end());
  return aban_pvalue(top.size() - 1, *mn, *mx, alpha);
}

std::vector<AbanPoint> aban_curve(std::span<const double> sample, std::size_t r_min,
                                  std::size_t r_max) {
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  r_min = std::max<std::size_t>(r_min, 10);
  r_max = std::min(r_max, xs.size() - 1);
  std::vector<AbanPoint> out;
  double log_sum = 0.0;
  for (std::size_t r = 1; r <= r_max; ++r) {
    log_sum += std::log(xs[r - 1]);
    if (r < r_min) continue;
    const double s = log_sum - static_cast<double>(r) * std::log(xs[r]);
    if (!(s > 0.0)) continue;
    out.push_back({r, aban_pvalue(r, xs[r], xs[0], static_cast<double>(r) / s)});
  }
  return out;
}

WeibullFit fit_weibull_mle(std::span<const double> sample, double tau_start) {
  std::vector<double> logs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!(sample[i] > 0.0)) throw DomainError("fit_weibull_mle: observations must be positive");
    logs[i] = std::log(sample[i]);
  }
  return fit_logs(logs, tau_start);
}

double weibull_loglik(std::span<const double> sample, const WeibullParams& p) {
  const double n = static_cast<double>(sample.size());
  double sum_log = 0.0, sum_pow = 0.0;
  for (double x : sample) {
    sum_log += std::log(x);
    sum_pow += std::pow(x, p.tau);
  }
  return n * std::log(p.lambda) + n * std::log(p.tau) + (p.tau - 1.0) * sum_log - p.lambda * sum_pow;
}

std::pair<double, double> weibull_loglik_gradient(std::span<const double> sample,
                                                  const WeibullParams& p) {
  const double n = static_cast<double>(sample.size());
  double sum_log = 0.0, sum_pow = 0.0, sum_pow_log = 0.0;
  for (double x : sample) {
    const double l = std::log(x);
    const double xp = std::exp(p.tau * l);
    sum_log += l;
    sum_pow += xp;
    sum_pow_log += xp * l;
  }
  return {n / p.lambda - sum_pow, n / p.tau + sum_log - p.lambda * sum_pow_log};
}

ParetoFit fit_pareto_mle(std::span<const double> tail, std::optional<double> m) {
  if (tail.empty()) throw DomainError("fit_pareto_mle: empty tail");
  const double lo = *std::min_element(tail.begin(), tail.end());
  const double scale = m.value_or(lo);
  if (!(scale > 0.0)) throw DomainError("fit_pareto_mle: m must be positive");
  if (lo < scale) throw DomainError("fit_pareto_mle: tail value below m");
  double s = 0.0;
  for (double x : tail) s += std::log(x / scale);
  if (!(s > 0.0)) throw FitError("fit_pareto_mle: all values equal m, alpha is infinite");
  return {static_cast<double>(tail.size()) / s, scale};
}

TruncatedParetoFit fit_truncated_pareto_mle(std::span<const double> tail) {
  if (tail.size() < 3) throw DomainError("fit_truncated_pareto_mle: need at least three values");
  const auto [mn, mx] = std::minmax_element(tail.begin(), tail.end());
  if (!(*mn > 0.0)) throw DomainError("fit_truncated_pareto_mle: values must be positive");
  if (*mn == *mx) throw FitError("fit_truncated_pareto_mle: all values are equal");
  const double n = static_cast<double>(tail.size());
  const double log_ratio = std::log(*mn / *mx);
  double s = 0.0;
  for (double x : tail) s += std::log(x / *mn);
  // Score in alpha; it falls from n|log_ratio|/2 - s at 0 to -s at infinity.
  auto score = [&](double a) {
    const double q = std::exp(a * log_ratio);
    return n / a + n * q * log_ratio / -std::expm1(a * log_ratio) - s;
  };
  if (n * -log_ratio / 2.0 - s <= 0.0) {
    throw FitError("fit_truncated_pareto_mle: data show no decreasing density, no positive root");
  }
  double lo = 1e-8, hi = 1.0;
  while (score(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw FitError("fit_truncated_pareto_mle: root not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), *mn, *mx};
}

std::vector<EpsPathPoint> eps_path(std::span<const double> series, const SeparationResult& full,
                                   EpsPathMode mode, const EpsGrid& grid) {
  const std::size_t N = series.size();
  std::vector<EpsPathPoint> out;
  if (mode == EpsPathMode::Proportion) {
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return series[a] > series[b]; });
    std::vector<char> impurity(N, 0);
    for (std::size_t i = 0; i < std::min(full.split_index, N); ++i) impurity[idx[i]] = 1;
    std::size_t count = 0;
    for (std::size_t t = 0; t < N; ++t) {
      count += impurity[t];
      out.push_back({t + 1, static_cast<double>(count) / static_cast<double>(t + 1)});
    }
    return out;
  }
  const std::size_t step = (N + 49) / 50;
  std::vector<EpsPathPoint> knots;
  for (std::size_t n = step; n <= N; n += step) {
    if (n < 100) continue;
    knots.push_back({n, n == N ? full.eps_hat : separate_components(series.first(n), grid).eps_hat});
  }
  if (knots.empty() || knots.back().n != N) knots.push_back({N, full.eps_hat});
  out.push_back(knots.front());
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const auto& [n0, e0] = knots[k - 1];
    const auto& [n1, e1] = knots[k];
    for (std::size_t n = n0 + 1; n <= n1; ++n) {
      const double w = static_cast<double>(n - n0) / static_cast<double>(n1 - n0);
      out.push_back({n, e0 + w * (e1 - e0)});
    }
  }
  return out;
}

std::vector<BetaPoint> beta_diagnostic(const LogPolySeq& k, std::span<const EpsPathPoint> path,
                                       double beta) {
  std::vector<BetaPoint> out;
  for (const auto& [n, e] : path) {
    if (n < 2 || !(e > 0.0)) continue;
    const double kn = seq_eval(k, static_cast<double>(n));
    out.push_back({n, std::log(kn) / std::pow(kn * e, beta)});
  }
  return out;
}

double FittedModel::cdf(double x) const {
  if (!tail || eps <= 0.0) return x <= 0.0 ? 0.0 : weibull_cdf(x, weibull);
  const TruncationSpec t = truncation ? TruncationSpec::at(*truncation) : TruncationSpec::none();
  return mixture_cdf(x, MixtureSpec(eps, weibull, TailParams::pareto(tail->alpha, tail->m), t));
}

std::vector<double> FittedModel::sample(RandomStream& rng, std::size_t count) const {
  if (!tail || eps <= 0.0) {
    std::vector<double> out(count);
    for (double& x : out) x = weibull_upper_quantile(rng.open_unit(), weibull);
    return out;
  }
  const TruncationSpec t = truncation ? TruncationSpec::at(*truncation) : TruncationSpec::none();
  return mixture_sample(MixtureSpec(eps, weibull, TailParams::pareto(tail->alpha, tail->m), t), rng,
                        count);
}

std::vector<double> default_levels() {
  std::vector<double> out;
  for (int i = 1; i <= 9; ++i) out.push_back(i / 10.0);
  return out;
}

Validation validate_model(const FittedModel& model, std::span<const double> sample,
                          std::size_t n_sims, std::span<const double> levels, std::uint64_t seed) {
  if (n_sims < 1) throw DomainError("validate_model: need at least one simulation");
  if (sample.empty()) throw DomainError("validate_model: empty sample");
  const std::vector<double> defaults = default_levels();
  if (levels.empty()) levels = defaults;

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<double>> sim_q(n_sims);
  const auto sims = static_cast<std::int64_t>(n_sims);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < sims; ++j) {
    RandomStream rng(seed, static_cast<std::uint64_t>(j));
    std::vector<double> xs = model.sample(rng, sorted.size());
    std::sort(xs.begin(), xs.end());
    auto& q = sim_q[static_cast<std::size_t>(j)];
    for (double l : levels) q.push_back(sample_quantile(xs, l));
  }

  Validation v{{}, ks_test(sample, [&](double x) { return model.cdf(x); }).pvalue, n_sims == 1};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& q : sim_q) {
      lo = std::min(lo, q[i]);
      hi = std::max(hi, q[i]);
    }
    v.quantile_cis.push_back({levels[i], lo, sample_quantile(sorted, levels[i]), hi});
  }
  return v;
}

FitReport run_pipeline(std::span<const double> series, const PipelineOptions& opt) {
  FitReport rep{};
  rep.n = series.size();
  rep.notes.push_back(
      "KS p-values use the plain Kolmogorov distribution although parameters are estimated from "
      "the same data; they are optimistic");

  try {
    rep.chi2_pvalue = chi2_independence(series).pvalue;
  } catch (const DomainError& e) {
    rep.notes.push_back(std::string("independence check skipped: ") + e.what());
  }

  rep.separation = separate_components(series, opt.grid);
  const SeparationResult& sep = rep.separation;
  rep.eps_hat = sep.eps_hat;
  if (!sep.impurity_detected) rep.notes.push_back("no impurity detected");

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t s = sep.split_index;
  const std::span<const double> bulk = std::span(sorted).first(sorted.size() - s);
  const std::span<const double> tail = std::span(sorted).last(s);

  const WeibullFit wf = fit_weibull_mle(bulk);
  rep.lambda_hat = wf.params.lambda;
  rep.tau_hat = wf.params.tau;
  rep.bulk_ks_pvalue = ks_test(bulk, [&](double x) { return weibull_cdf(x, wf.params); }).pvalue;
  rep.model = {0.0, wf.params, std::nullopt, std::nullopt};
  rep.tail_model = "none";

  std::optional<ParetoFit> pf;
  if (s >= 2) {
    try {
      pf = fit_pareto_mle(tail);
    } catch (const FitError& e) {
      rep.notes.push_back(std::string("tail fit failed: ") + e.what());
    }
  }

  const std::size_t r = opt.aban_r.value_or(s);
  if (r >= 10 && r + 1 <= sorted.size()) {
    rep.aban_pvalue = aban_truncation_test(std::span(sorted).last(r + 1));
  } else {
    rep.notes.push_back("truncation test skipped: fewer than 10 tail observations");
  }
  rep.aban_curve = aban_curve(series, 10, std::min(sorted.size() - 1, 2 * std::max<std::size_t>(s, 50)));

  if (pf) {
    rep.model.eps = sep.eps_hat;
    rep.model.tail = *pf;
    rep.tail_model = "non-truncated";
    if (rep.aban_pvalue && *rep.aban_pvalue < opt.aban_level) {
      try {
        const TruncatedParetoFit tf = fit_truncated_pareto_mle(tail);
        rep.model.tail = ParetoFit{tf.alpha, tf.m};
        rep.model.truncation = tf.upper;
        rep.tail_model = "truncated";
      } catch (const FitError& e) {
        rep.notes.push_back(std::string("truncated tail fit failed, keeping Pareto: ") + e.what());
      }
    }
    rep.alpha_hat = rep.model.tail->alpha;
    rep.m_hat = rep.model.tail->m;
    rep.tau_over_alpha = rep.tau_hat / *rep.alpha_hat;
    const TailParams tp = TailParams::pareto(rep.model.tail->alpha, rep.model.tail->m);
    const std::optional<double> level = rep.model.truncation;
    rep.tail_ks_pvalue =
        ks_test(tail, [&](double x) { return level ? trunc_rv_cdf(x, tp, *level) : rv_cdf(x, tp); })
            .pvalue;
  }

  const Validation v = validate_model(rep.model, series, opt.n_sims, {}, opt.seed);
  rep.mixture_ks_pvalue = v.mixture_ks_pvalue;
  rep.quantile_cis = v.quantile_cis;
  rep.degenerate_ci = v.degenerate_ci;

  rep.eps_path = eps_path(series, sep, opt.path_mode, opt.grid);
  rep.beta_diagnostic = beta_diagnostic(opt.k, rep.eps_path, opt.beta);
  return rep;
}

}  // namespace evt
