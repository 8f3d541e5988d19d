// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance               run all criteria
//   acceptance --criterion N run one criterion
// Exit status is nonzero when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/fitpipe.hpp"
#include "evt/gof.hpp"
#include "evt/io.hpp"
#include "evt/limits.hpp"
#include "evt/mc.hpp"
#include "evt/regimes.hpp"
#include "truth_table.hpp"

using namespace evt;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig config(const std::string& name) {
  return load_config(std::string(EVT_SOURCE_DIR) + "/configs/" + name);
}

const std::vector<std::string> kTable2{"table2_a1m1.json", "table2_a2m1.json", "table2_a1m2.json",
                                       "table2_a2m2.json"};

// 1. Classifier against the hand-derived table.
Outcome regime_truth_table() {
  const auto t0 = Clock::now();
  const auto rows = truth::rows();
  std::size_t agree = 0;
  std::string first_miss;
  for (const truth::Row& r : rows) {
    bool ok = false;
    try {
      const Decision d = classify(truth::inputs_of(r));
      ok = std::string(r.a) != "error" && std::string(to_string(d.a.label)) == r.a &&
           std::string(to_string(d.m.label)) == r.m && d.law.name() == r.law;
    } catch (const ClassificationError&) {
      ok = std::string(r.a) == "error";
    }
    agree += ok;
    if (!ok && first_miss.empty()) first_miss = r.id;
  }
  const double secs = seconds_since(t0);
  const bool pass = rows.size() >= 40 && agree == rows.size() && secs < 1.0;
  return {pass, fmt("%zu/%zu cells agree, %.3f s%s%s", agree, rows.size(), secs,
                    first_miss.empty() ? "" : ", first mismatch: ", first_miss.c_str())};
}

// 2. Simulation study: KS p-value > 0.05 in at least 4 of 5 seeded runs per configuration.
Outcome simulation_study() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const std::string& name : kTable2) {
    RunConfig cfg = config(name);
    const Classified cls = classify_config(cfg);
    const Normalization norm = run_normalization(cfg, cls.law);
    int accepted = 0;
    std::string ps;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const MaximaBatch b = simulate_maxima({cfg.model, 1000.0, 1000, seed, norm});
      const double p = ks_test(b.normalized, cls.law).pvalue;
      accepted += p > 0.05;
      ps += fmt("%s%.3g", ps.empty() ? "" : ",", p);
    }
    pass &= accepted >= 4;
    detail += fmt("%s%s %s %d/5 [%s]", detail.empty() ? "" : "; ", name.substr(7, 4).c_str(),
                  cls.law.name().c_str(), accepted, ps.c_str());
  }
  const double secs = seconds_since(t0);
  pass &= secs < 120.0;
  return {pass, detail + fmt("; %.1f s", secs)};
}

// 3. MC ECDF against the exact finite-n law, and exact-to-limit distance along n.
Outcome exact_oracle() {
  const auto t0 = Clock::now();
  const double bound = dkw_bound(1000, 1e-3);
  bool pass = true;
  std::string detail;
  for (const std::string& name : kTable2) {
    const RunConfig cfg = config(name);
    const Classified cls = classify_config(cfg);
    const Normalization norm = run_normalization(cfg, cls.law);
    double worst = 0.0;
    std::vector<double> to_limit;
    for (double n : {1e2, 1e3, 1e4}) {
      const Row row = row_at(cfg.model, n);
      const MaximaBatch b = simulate_maxima({cfg.model, n, 1000, cfg.seed, norm});
      std::vector<double> s = b.normalized;
      std::sort(s.begin(), s.end());
      std::vector<double> grid = linspace(s.front() - 1.0, s.back() + 1.0, 4001);
      grid.insert(grid.end(), s.begin(), s.end());
      const auto exact = [&](double x) { return exact_max_cdf(row.spec, static_cast<double>(row.k_n), x, norm, n); };
      double d = sup_distance([&](double x) { return empirical_cdf(s, x); }, exact, grid);
      // Left limits of the ECDF at its jumps.
      for (std::size_t i = 0; i < s.size(); ++i) {
        d = std::max(d, std::abs(static_cast<double>(i) / s.size() - exact(std::nextafter(s[i], -INFINITY))));
      }
      worst = std::max(worst, d);
      to_limit.push_back(exact_limit_distance(row, norm, n, cls.law));
    }
    const bool monotone = to_limit[1] <= to_limit[0] && to_limit[2] <= to_limit[1];
    pass &= worst <= bound && monotone;
    detail += fmt("%s%s ecdf %.4f limit %.4f,%.4f,%.4f%s", detail.empty() ? "" : "; ",
                  name.substr(7, 4).c_str(), worst, to_limit[0], to_limit[1], to_limit[2],
                  monotone ? "" : " (not monotone)");
  }
  const double secs = seconds_since(t0);
  pass &= secs < 180.0;
  return {pass, detail + fmt("; DKW bound %.4f; %.1f s", bound, secs)};
}

// 4. Fixed eps: classical normalisation, limit exp(-eps x^-alpha).
Outcome fixed_eps_limit() {
  const auto t0 = Clock::now();
  RunConfig cfg = config("fixed_eps.json");
  const Classified cls = classify_config(cfg);
  const Normalization norm = run_normalization(cfg, cls.law);
  const MaximaBatch b = simulate_maxima({cfg.model, 1e5, 500, cfg.seed, norm});
  const double d = ks_statistic(b.normalized, [](double x) {
    return x <= 0.0 ? 0.0 : std::exp(-0.1 * std::pow(x, -1.5));
  });
  const double secs = seconds_since(t0);
  return {d < 0.05 && secs < 60.0 && norm.scheme() == NormScheme::Classical,
          fmt("KS distance %.4f (< 0.05), %.1f s", d, secs)};
}

// 5. Truncated regularly varying law alone: reversed-Weibull limit.
Outcome truncated_tail_limit() {
  const auto t0 = Clock::now();
  const TailParams t = TailParams::pareto(1.5, 0.1);
  const double M = 1.0, n = 1e4;
  const double a = M - trunc_rv_upper_quantile(1.0 / n, t, M);
  std::vector<double> mx = simulate_iid_maxima([&](double q) { return trunc_rv_upper_quantile(q, t, M); },
                                               static_cast<std::uint64_t>(n), 500, 1);
  for (double& v : mx) v = (v - M) / a;
  const double d = ks_statistic(mx, [](double x) { return reversed_weibull_cdf(x, 1.0); });
  const double secs = seconds_since(t0);
  return {d < 0.05 && secs < 60.0, fmt("KS distance %.4f (< 0.05), %.1f s", d, secs)};
}

// 6. Mass at or below the DistI atom against the jump of the right-continuous CDF.
Outcome atom_mass() {
  const auto t0 = Clock::now();
  const RunConfig cfg = config("dist1_atom.json");
  const Classified cls = classify_config(cfg);
  const auto* d1 = std::get_if<law::DistI>(&cls.law.kind);
  if (!d1) return {false, "configuration does not classify as Distribution I"};
  const Normalization norm = run_normalization(cfg, cls.law);
  const MaximaBatch b = simulate_maxima({cfg.model, cfg.n, cfg.replicates, cfg.seed, norm});
  const double x0 = d1->atom;
  const double mass = static_cast<double>(std::count_if(b.normalized.begin(), b.normalized.end(),
                                                        [&](double v) { return v <= x0; })) /
                      static_cast<double>(b.normalized.size());
  const double predicted = limit_cdf({cls.law, LimitCdf::Mode::RightContinuous}, x0);
  const Row row = row_at(cfg.model, cfg.n);
  const double exact = exact_max_cdf(row.spec, static_cast<double>(row.k_n), x0, norm, cfg.n);
  const double secs = seconds_since(t0);
  return {std::abs(mass - predicted) <= 0.03,
          fmt("atom %.4f, empirical mass %.4f, predicted %.4f (+-0.03), exact finite-n %.4f, %.1f s", x0, mass,
              predicted, exact, secs)};
}

// 7. Pipeline recovery on synthetic mixtures and the truncation test's level and power.
Outcome pipeline_recovery() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  PipelineOptions opt;
  opt.n_sims = 1;
  for (double eps : {0.02, 0.05, 0.1}) {
    for (double alpha : {1.8, 2.6, 3.5}) {
      const MixtureSpec spec(eps, WeibullParams(1.0, 1.3), TailParams::pareto(alpha, 4.0));
      int eps_ok = 0, alpha_ok = 0;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomStream rng(seed, static_cast<std::uint64_t>(eps * 1000 + alpha * 10));
        const std::vector<double> x = mixture_sample(spec, rng, 5000);
        const FitReport r = run_pipeline(x, opt);
        eps_ok += std::abs(r.eps_hat - eps) <= 0.03;
        alpha_ok += r.alpha_hat && std::abs(*r.alpha_hat / alpha - 1.0) <= 0.25;
      }
      pass &= eps_ok >= 80 && alpha_ok >= 80;
      detail += fmt("%s(%.2f,%.1f) %d/%d", detail.empty() ? "" : " ", eps, alpha, eps_ok, alpha_ok);
    }
  }

  const TailParams t = TailParams::pareto(2.0, 1.0);
  const double p90 = rv_upper_quantile(0.1, t);
  int level_rej = 0, power_rej = 0;
  const int reps = 500;
  for (int s = 0; s < reps; ++s) {
    RandomStream rng(7, static_cast<std::uint64_t>(s));
    std::vector<double> h0(2000), h1(2000);
    for (double& v : h0) v = rv_upper_quantile(rng.open_unit(), t);
    for (double& v : h1) v = trunc_rv_upper_quantile(rng.open_unit(), t, p90);
    std::sort(h0.begin(), h0.end(), std::greater<>());
    std::sort(h1.begin(), h1.end(), std::greater<>());
    level_rej += aban_truncation_test(std::span(h0).first(101)) < 0.05;
    power_rej += aban_truncation_test(std::span(h1).first(101)) < 0.05;
  }
  const double level = static_cast<double>(level_rej) / reps;
  const double power = static_cast<double>(power_rej) / reps;
  const double secs = seconds_since(t0);
  pass &= std::abs(level - 0.05) <= 0.02 && power >= 0.8 && secs < 600.0;
  return {pass, fmt("(eps,alpha) eps_ok/alpha_ok of 100: %s; truncation test level %.3f (0.05+-0.02), power %.3f (>= 0.8); %.1f s",
                    detail.c_str(), level, power, secs)};
}

// 8. Gradient, round trips and the Kolmogorov spot value.
Outcome numerical_hygiene() {
  std::vector<std::string> fails;

  RandomStream rng(8);
  std::vector<double> x(5000);
  const WeibullParams truth_w(2.0, 0.7);
  for (double& v : x) v = weibull_upper_quantile(rng.open_unit(), truth_w);
  const WeibullFit f = fit_weibull_mle(x);
  const double h = 1e-5;
  double grad_err = 0.0;
  for (const WeibullParams p : {f.params, WeibullParams(1.5, 0.9), WeibullParams(3.0, 0.5)}) {
    const auto [gl, gt] = weibull_loglik_gradient(x, p);
    const double nl = (weibull_loglik(x, {p.lambda + h, p.tau}) - weibull_loglik(x, {p.lambda - h, p.tau})) / (2 * h);
    const double nt = (weibull_loglik(x, {p.lambda, p.tau + h}) - weibull_loglik(x, {p.lambda, p.tau - h})) / (2 * h);
    const double scale = std::max({std::abs(gl), std::abs(gt), 1.0});
    grad_err = std::max({grad_err, std::abs(gl - nl) / scale, std::abs(gt - nt) / scale});
  }
  const auto [gl, gt] = weibull_loglik_gradient(x, f.params);
  if (grad_err > 1e-4) fails.push_back(fmt("gradient rel err %.2e", grad_err));
  if (std::hypot(gl, gt) > 1e-6 * x.size()) fails.push_back("gradient at MLE not ~0");

  // Probability-scale round trips F(Q(p)) = p and x-scale round trips via the survival function.
  double worst_p = 0.0, worst_x = 0.0;
  const WeibullParams w(0.003, 1.278);
  const TailParams pareto = TailParams::pareto(1.5, 0.1);
  const TailParams logpow = TailParams::from_left_endpoint(2.0, 1.0, SlowVarySpec::Form::LogPow, 0.5);
  const MixtureSpec mix(0.05, WeibullParams(1.0, 1.3), TailParams::pareto(2.6, 4.0), TruncationSpec::at(40.0));
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    worst_p = std::max(worst_p, std::abs(weibull_cdf(weibull_quantile(p, w), w) - p));
    worst_p = std::max(worst_p, std::abs(rv_cdf(rv_quantile(p, pareto), pareto) - p));
    worst_p = std::max(worst_p, std::abs(rv_cdf(rv_quantile(p, logpow), logpow) - p));
    worst_p = std::max(worst_p, std::abs(trunc_rv_cdf(trunc_rv_quantile(p, pareto, 5.0), pareto, 5.0) - p));
    for (const LawKind k : {LawKind{law::Gumbel{}}, LawKind{law::Frechet{1.5, 0.1}}}) {
      const LimitCdf c{{k, NormScheme::Const1}, LimitCdf::Mode::RightContinuous};
      worst_p = std::max(worst_p, std::abs(limit_cdf(c, limit_quantile(c, p)) - p));
    }
    const double q = std::pow(10.0, -12.0 * p);
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double xw = weibull_upper_quantile(q, w);
    worst_x = std::max(worst_x, rel(weibull_upper_quantile(weibull_survival(xw, w), w), xw));
    const double xp = rv_upper_quantile(q, pareto);
    worst_x = std::max(worst_x, rel(rv_upper_quantile(pareto.survival(xp), pareto), xp));
    const double xl = rv_upper_quantile(q, logpow);
    worst_x = std::max(worst_x, rel(rv_upper_quantile(logpow.survival(xl), logpow), xl));
    const double qm = std::pow(10.0, -6.0 * p);
    const double xm = impurity_upper_quantile(qm, mix);
    worst_x = std::max(worst_x, rel(impurity_upper_quantile(impurity_survival(xm, mix), mix), xm));
  }
  if (worst_p > 1e-9) fails.push_back(fmt("F(Q(p)) err %.2e", worst_p));
  if (worst_x > 1e-9) fails.push_back(fmt("Q(S(x)) rel err %.2e", worst_x));

  double series = 0.0;
  for (int k = 1; k <= 200; ++k) series += (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k);
  series = 1.0 - 2.0 * series;
  const double k1 = kolmogorov_cdf(1.0);
  if (std::abs(k1 - series) > 1e-4 || std::abs(k1 - 0.7300) > 1e-4) fails.push_back(fmt("K(1) = %.6f", k1));

  std::string detail = fmt("gradient rel err %.1e, F(Q(p)) err %.1e, Q(S(x)) rel err %.1e, K(1.0) = %.5f (series %.5f)",
                           grad_err, worst_p, worst_x, k1, series);
  for (const auto& s : fails) detail += "; " + s;
  return {fails.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"regime truth table", regime_truth_table}},
      {2, {"simulation study KS", simulation_study}},
      {3, {"exact-law oracle", exact_oracle}},
      {4, {"fixed-eps classical limit", fixed_eps_limit}},
      {5, {"truncated tail reversed-Weibull limit", truncated_tail_limit}},
      {6, {"atom mass", atom_mass}},
      {7, {"pipeline recovery", pipeline_recovery}},
      {8, {"numerical hygiene", numerical_hygiene}},
  };
  bool all = true;
  for (const auto& [id, c] : criteria) {
    if (only && id != only) continue;
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::printf("criterion %d %s: %s: %s\n", id, o.pass ? "PASS" : "FAIL", c.first, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
