#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evt/fitpipe.hpp"
#include "evt/mc.hpp"
#include "evt/regimes.hpp"

namespace evt {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// How maxima are normalised when simulating.
struct NormChoice {
  enum class Kind { Auto, Classical, Fixed };
  Kind kind = Kind::Auto;
  double s = 1.0;
  double c = 0.0;
};

/// Everything a CLI run needs besides file paths.
struct RunConfig {
  ArrayModel model;
  double n = 1000;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  NormChoice norm;
};

/// Sequences are expression strings; the tail is given by alpha plus either m
/// or ctilde, with "slowly_varying" {"form": "const" | "log_pow", "p": ...}.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Decision for the configured array. A non-vanishing eps_n without
/// truncation gets the classical (fixed-eps) limit instead of the theorems.
struct Classified {
  LimitLaw law;
  std::optional<Decision> decision;
  std::vector<std::string> path;
};
Classified classify_config(const RunConfig& cfg);

/// Normalisation used for the run; fixed (1, 0) for a degenerate law.
Normalization run_normalization(const RunConfig& cfg, const LimitLaw& law);

nlohmann::json law_to_json(const LimitLaw& law);
nlohmann::json classified_to_json(const Classified& c);
nlohmann::json report_to_json(const FitReport& r);

/// Numeric column from CSV text. A non-numeric first row is a header; with a
/// header the column can be chosen by name, otherwise the first column is used.
/// Malformed rows raise ConfigError naming the line.
std::vector<double> read_csv_column(std::istream& in, const std::optional<std::string>& column);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
void write_quantile_csv(std::span<const QuantileRow> rows, std::ostream& out);

/// Histogram bars plus a density curve derived from `cdf` at 200 points.
std::string histogram_svg(std::span<const double> values, const std::function<double(double)>& cdf,
                          const std::string& title);

}  // namespace evt
