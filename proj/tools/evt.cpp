#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "evt/fitpipe.hpp"
#include "evt/gof.hpp"
#include "evt/io.hpp"
#include "evt/limits.hpp"
#include "evt/mc.hpp"
#include "evt/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evt;

namespace {

constexpr double kWideCiHalfWidth = 0.1;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<double> n;
};

RunConfig configure(const std::string& path, const Overrides& o) {
  RunConfig cfg = load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.replicates) cfg.replicates = *o.replicates;
  if (o.n) cfg.n = *o.n;
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

int cmd_classify(const std::string& config) {
  const RunConfig cfg = load_config(config);
  std::cout << classified_to_json(classify_config(cfg)).dump(2) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config, const Overrides& o, const std::string& out_dir) {
  const RunConfig cfg = configure(config, o);
  const Classified cls = classify_config(cfg);
  const Normalization norm = run_normalization(cfg, cls.law);
  const MaximaBatch batch = simulate_maxima({cfg.model, cfg.n, cfg.replicates, cfg.seed, norm});

  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_batch_csv(batch, csv);
  write_file(fs::path(out_dir) / "maxima.csv", csv.str());
  write_file(fs::path(out_dir) / "maxima.json", config_to_json(cfg).dump(2) + "\n");

  json gof = {{"law", law_to_json(cls.law)},
              {"path", cls.path},
              {"n", cfg.n},
              {"k_n", batch.k_n},
              {"replicates", cfg.replicates},
              {"seed", cfg.seed},
              {"normalization", {{"scheme", to_string(norm.scheme())},
                                 {"s_n", norm.s_at(cfg.n)},
                                 {"c_n", norm.c_at(cfg.n)}}}};
  json warnings = batch.warnings;
  const double half = dkw_bound(cfg.replicates, 0.05);
  gof["dkw_half_width_95"] = half;
  if (half > kWideCiHalfWidth) {
    warnings.push_back("wide confidence band: DKW half-width " + std::to_string(half) +
                       " at 95% exceeds 0.1; increase replicates");
  }
  std::function<double(double)> density_cdf;
  if (cls.law.is_degenerate()) {
    gof["ks"] = nullptr;
    warnings.push_back("degenerate limit: no goodness-of-fit test, maxima left unnormalised");
  } else {
    const KsResult ks = ks_test(batch.normalized, cls.law);
    gof["ks"] = {{"statistic", ks.statistic}, {"pvalue", ks.pvalue}, {"reject_at_0.05", ks.pvalue < 0.05}};
    if (ks.reference_has_jumps) {
      warnings.push_back("limit law has atoms: the asymptotic KS p-value is conservative");
    }
    const LimitCdf rc{cls.law, LimitCdf::Mode::RightContinuous};
    density_cdf = [rc](double x) { return limit_cdf(rc, x); };
  }
  gof["warnings"] = warnings;
  write_file(fs::path(out_dir) / "gof.json", gof.dump(2) + "\n");
  write_file(fs::path(out_dir) / "histogram.svg",
             histogram_svg(batch.normalized, density_cdf, "normalised maxima, n = " + std::to_string(cfg.n)));
  std::cout << gof.dump(2) << '\n';
  return 0;
}

std::vector<double> load_series(const std::string& path, const std::optional<std::string>& column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_csv_column(in, column);
}

int cmd_fit(const std::string& data, const std::optional<std::string>& column, bool prices,
            std::uint64_t seed, std::size_t n_sims, const std::string& out_dir) {
  const std::vector<double> raw = load_series(data, column);
  Returns r;
  if (prices) {
    r = log_returns(raw);
  } else {
    for (double x : raw) {
      if (x > 0.0) r.positive.push_back(x);
      if (x < 0.0) r.abs_negative.push_back(-x);
    }
  }
  PipelineOptions opt;
  opt.seed = seed;
  opt.n_sims = n_sims;
  json report = {{"input", data}, {"mode", prices ? "prices" : "returns"}, {"seed", seed}};
  fs::create_directories(out_dir);
  for (const auto& [name, series] : {std::pair{"positive", &r.positive}, std::pair{"negative", &r.abs_negative}}) {
    if (series->size() < 100) {
      throw ConfigError(std::string(name) + " returns: need at least 100 observations, got " +
                        std::to_string(series->size()));
    }
    const FitReport fr = run_pipeline(*series, opt);
    report[name] = report_to_json(fr);
    std::ostringstream csv;
    write_quantile_csv(fr.quantile_cis, csv);
    write_file(fs::path(out_dir) / (std::string("quantiles_") + name + ".csv"), csv.str());
  }
  write_file(fs::path(out_dir) / "fit.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_gof(const std::string& config, const std::string& sample_path,
            const std::optional<std::string>& column) {
  const RunConfig cfg = load_config(config);
  const Classified cls = classify_config(cfg);
  const std::vector<double> sample = load_series(sample_path, column);
  json out = {{"law", law_to_json(cls.law)}, {"n", sample.size()}};
  if (cls.law.is_degenerate()) {
    out["ks"] = nullptr;
  } else {
    const KsResult ks = ks_test(sample, cls.law);
    out["ks"] = {{"statistic", ks.statistic}, {"pvalue", ks.pvalue},
                 {"conservative", ks.reference_has_jumps}};
  }
  try {
    out["chi2_independence_pvalue"] = chi2_independence(sample).pvalue;
  } catch (const DomainError& e) {
    out["chi2_independence_pvalue"] = nullptr;
    out["chi2_note"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("EVT_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) set_worker_count(t);
  }

  CLI::App app{"Extreme-value analysis of Weibull mixtures with a heavy-tailed impurity"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", data, sample;
  std::optional<std::string> column;
  Overrides o;
  std::uint64_t fit_seed = 1;
  std::size_t n_sims = 100;
  bool returns_mode = false;

  auto* classify = app.add_subcommand("classify", "regime and limit law of a configured array");
  classify->add_option("--config", config, "JSON config")->required();

  auto* simulate = app.add_subcommand("simulate", "simulate normalised row maxima and test the limit");
  simulate->add_option("--config", config, "JSON config")->required();
  simulate->add_option("--seed", o.seed, "master seed");
  simulate->add_option("--replicates", o.replicates, "number of replicates R");
  simulate->add_option("--n", o.n, "row index n");
  simulate->add_option("--out", out_dir, "output directory");

  auto* fit = app.add_subcommand("fit", "four-step fitting pipeline on a price or return series");
  fit->add_option("data", data, "single-column CSV")->required();
  fit->add_option("--returns-column", column, "column name when the file has a header");
  auto* as_prices = fit->add_flag("--prices", "input holds prices (default)");
  fit->add_flag("--returns", returns_mode, "input holds log returns")->excludes(as_prices);
  fit->add_option("--seed", fit_seed, "seed for the validation simulations");
  fit->add_option("--sims", n_sims, "validation simulations")->check(CLI::PositiveNumber);
  fit->add_option("--out", out_dir, "output directory");

  auto* gof = app.add_subcommand("gof", "KS test of a sample against the configured limit law");
  gof->add_option("--config", config, "JSON config")->required();
  gof->add_option("--sample", sample, "single-column CSV")->required();
  gof->add_option("--returns-column", column, "column name when the file has a header");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(config);
    if (*simulate) return cmd_simulate(config, o, out_dir);
    if (*fit) return cmd_fit(data, column, !returns_mode, fit_seed, n_sims, out_dir);
    if (*gof) return cmd_gof(config, sample, column);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ClassificationError& e) {
    std::cerr << "error: cannot classify: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
