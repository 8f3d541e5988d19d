#include "evt/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "evt/limits.hpp"
#include "evt/random.hpp"

namespace evt {

namespace {

constexpr double kEpsCeiling = 1.0 - 1e-9;
constexpr std::size_t kChunk = 4096;

void normalize(MaximaBatch& b, const Normalization& norm) {
  const double s = norm.s_at(b.n);
  const double c = norm.c_at(b.n);
  b.normalized.resize(b.raw.size());
  for (std::size_t j = 0; j < b.raw.size(); ++j) b.normalized[j] = (b.raw[j] - c) / s;
}

MaximaBatch empty_batch(const ExperimentConfig& cfg, const Row& row) {
  if (cfg.replicates < 1) throw DomainError("simulate_maxima: need at least one replicate");
  MaximaBatch b{std::vector<double>(cfg.replicates), {}, cfg.n, cfg.seed, row.k_n, {}};
  if (row.eps_clipped) {
    b.warnings.push_back("eps_n >= 1 at this n; clipped below 1");
  }
  return b;
}

}  // namespace

RegimeInputs ArrayModel::regime_inputs() const {
  return {k, eps, M, weibull.lambda, weibull.tau, tail.alpha(), tail.sv()};
}

Row row_at(const ArrayModel& model, double n) {
  double eps = seq_eval(model.eps, n);
  bool clipped = false;
  if (eps >= 1.0) {
    eps = kEpsCeiling;
    clipped = true;
  }
  const double k = seq_eval(model.k, n);
  if (!(k < 9.0e18)) throw DomainError("row_at: block size k_n is too large to represent");
  const auto k_n = static_cast<std::uint64_t>(std::max(1.0, std::llround(k) * 1.0));
  TruncationSpec trunc = TruncationSpec::none();
  if (model.M) {
    const double level = seq_eval(*model.M, n);
    if (!(level > model.tail.m())) {
      throw DomainError("row_at: truncation level M_n does not exceed m at this n");
    }
    trunc = TruncationSpec::at(level);
  }
  return {MixtureSpec(eps, model.weibull, model.tail, trunc), k_n, clipped};
}

MaximaBatch simulate_maxima(const ExperimentConfig& cfg) {
  const Row row = row_at(cfg.model, cfg.n);
  MaximaBatch b = empty_batch(cfg, row);
  const MixtureSpec& spec = row.spec;
  const auto reps = static_cast<std::int64_t>(cfg.replicates);

  // The component quantiles are decreasing in q, so the row maximum is the
  // quantile of the smallest q seen by each component.
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < reps; ++j) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(j));
    double q_bulk = 2.0;
    double q_tail = 2.0;
    for (std::uint64_t i = 0; i < row.k_n; ++i) {
      const bool impurity = rng.unit() < spec.eps;
      const double q = rng.open_unit();
      double& slot = impurity ? q_tail : q_bulk;
      slot = std::min(slot, q);
    }
    double m = -std::numeric_limits<double>::infinity();
    if (q_bulk <= 1.0) m = weibull_upper_quantile(q_bulk, spec.weibull);
    if (q_tail <= 1.0) m = std::max(m, impurity_upper_quantile(q_tail, spec));
    b.raw[static_cast<std::size_t>(j)] = m;
  }
  normalize(b, cfg.norm);
  return b;
}

MaximaBatch simulate_maxima_serial(const ExperimentConfig& cfg) {
  const Row row = row_at(cfg.model, cfg.n);
  MaximaBatch b = empty_batch(cfg, row);
  for (std::size_t j = 0; j < cfg.replicates; ++j) {
    RandomStream rng(cfg.seed, j);
    double m = -std::numeric_limits<double>::infinity();
    for (std::uint64_t done = 0; done < row.k_n; done += kChunk) {
      const auto count = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, row.k_n - done));
      for (double x : mixture_sample(row.spec, rng, count)) m = std::max(m, x);
    }
    b.raw[j] = m;
  }
  normalize(b, cfg.norm);
  return b;
}

std::vector<double> simulate_iid_maxima(const std::function<double(double)>& upper_quantile,
                                        std::uint64_t count, std::size_t replicates,
                                        std::uint64_t seed) {
  std::vector<double> out(replicates);
  const auto reps = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < reps; ++j) {
    RandomStream rng(seed, static_cast<std::uint64_t>(j));
    double q_min = 1.0;
    for (std::uint64_t i = 0; i < count; ++i) q_min = std::min(q_min, rng.open_unit());
    out[static_cast<std::size_t>(j)] = upper_quantile(q_min);
  }
  return out;
}

double exact_max_cdf(const MixtureSpec& spec, double k_n, double x, const Normalization& norm,
                     double n) {
  if (!(k_n >= 1.0)) throw DomainError("exact_max_cdf: k_n must be at least 1");
  const double v = norm.apply(n, x);
  const double surv = mixture_survival(v, spec);
  if (surv >= 1.0) return 0.0;
  return std::exp(k_n * std::log1p(-surv));
}

double exact_max_quantile(const MixtureSpec& spec, double k_n, double p, const Normalization& norm,
                          double n) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("exact_max_quantile: p must lie in (0, 1)");
  auto f = [&](double x) { return exact_max_cdf(spec, k_n, x, norm, n); };
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 2000 && f(lo) >= p; ++i) lo = 2.0 * lo - 1.0;
  for (int i = 0; i < 2000 && f(hi) < p; ++i) hi = 2.0 * hi + 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < p ? lo : hi) = mid;
  }
  return hi;
}

double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double empirical_cdf(const MaximaBatch& batch, double x) {
  std::vector<double> sorted = batch.normalized;
  std::sort(sorted.begin(), sorted.end());
  return empirical_cdf(sorted, x);
}

double sup_distance(const std::function<double(double)>& f, const std::function<double(double)>& g,
                    std::span<const double> grid, std::span<const double> atoms,
                    const std::function<double(double)>& g_left) {
  double d = 0.0;
  for (double x : grid) d = std::max(d, std::abs(f(x) - g(x)));
  for (double a : atoms) {
    d = std::max(d, std::abs(f(a) - g(a)));
    if (g_left) d = std::max(d, std::abs(f(a) - g_left(a)));
  }
  return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

double exact_limit_distance(const Row& row, const Normalization& norm, double n,
                            const LimitLaw& law, std::size_t grid_points) {
  const LimitCdf rc{law, LimitCdf::Mode::RightContinuous};
  const double k = static_cast<double>(row.k_n);
  // Quantile points of both laws: between neighbours neither CDF moves by
  // more than the probability step.
  std::vector<double> grid;
  grid.reserve(2 * grid_points);
  for (std::size_t i = 1; i <= grid_points; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(grid_points + 1);
    grid.push_back(exact_max_quantile(row.spec, k, p, norm, n));
    grid.push_back(limit_quantile(rc, p));
  }
  const auto atoms = limit_atoms(law);
  return sup_distance([&](double x) { return exact_max_cdf(row.spec, k, x, norm, n); },
                      [&](double x) { return limit_cdf(rc, x); }, grid, atoms,
                      [&](double x) { return limit_cdf_left(rc, x); });
}

void write_batch_csv(const MaximaBatch& batch, std::ostream& out) {
  out << "replicate,raw_max,normalized_max\r\n";
  char buf[96];
  for (std::size_t j = 0; j < batch.raw.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\r\n", j, batch.raw[j], batch.normalized[j]);
    out << buf;
  }
}

}  // namespace evt
