#include "evt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evt/gof.hpp"

namespace evt {

using nlohmann::json;

namespace {

LogPolySeq seq_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing \"") + key + "\"");
  const json& v = j.at(key);
  if (v.is_number()) return LogPolySeq::constant(v.get<double>());
  if (!v.is_string()) throw ConfigError(std::string("config: \"") + key + "\" must be a string");
  try {
    return parse_sequence(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("config: \"") + key + "\": " + e.what() + " at position " +
                      std::to_string(e.position()));
  }
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("config: \"") + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

TailParams parse_tail(const json& t) {
  const double alpha = number(t, "alpha");
  SlowVarySpec::Form form = SlowVarySpec::Form::Const;
  double p = 0.0;
  if (t.contains("slowly_varying")) {
    const json& sv = t.at("slowly_varying");
    const std::string f = sv.value("form", "const");
    if (f == "log_pow") {
      form = SlowVarySpec::Form::LogPow;
      p = number(sv, "p");
    } else if (f != "const") {
      throw ConfigError("config: slowly_varying.form must be \"const\" or \"log_pow\"");
    }
  }
  if (t.contains("m")) return TailParams::from_left_endpoint(alpha, number(t, "m"), form, p);
  if (t.contains("ctilde")) {
    const double ct = number(t, "ctilde");
    return TailParams::from_scale(alpha, form == SlowVarySpec::Form::Const
                                             ? SlowVarySpec::constant(ct)
                                             : SlowVarySpec::log_pow(ct, p));
  }
  throw ConfigError("config: tail needs \"m\" or \"ctilde\"");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

RunConfig parse_config(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    std::optional<LogPolySeq> M;
    if (j.contains("M") && !j.at("M").is_null()) M = seq_field(j, "M");
    const json& w = j.at("weibull");
    RunConfig cfg{ArrayModel{seq_field(j, "k"), seq_field(j, "eps"), M,
                             WeibullParams(number(w, "lambda"), number(w, "tau")),
                             parse_tail(j.at("tail"))},
                  1000.0, 1000, 1, NormChoice{}};
    cfg.n = j.value("n", 1000.0);
    cfg.replicates = j.value("replicates", std::size_t{1000});
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("normalization")) {
      const json& nj = j.at("normalization");
      if (nj.is_string()) {
        const std::string s = nj.get<std::string>();
        if (s == "classical") {
          cfg.norm.kind = NormChoice::Kind::Classical;
        } else if (s != "auto") {
          throw ConfigError("config: normalization must be \"auto\", \"classical\" or {s, c}");
        }
      } else {
        cfg.norm = {NormChoice::Kind::Fixed, number(nj, "s"), number(nj, "c")};
      }
    }
    if (cfg.replicates < 1) throw ConfigError("config: replicates must be at least 1");
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json config_to_json(const RunConfig& cfg) {
  const TailParams& t = cfg.model.tail;
  json sv = {{"form", t.sv().form == SlowVarySpec::Form::Const ? "const" : "log_pow"}};
  if (t.sv().form == SlowVarySpec::Form::LogPow) sv["p"] = t.sv().p;
  json j = {
      {"k", to_string(cfg.model.k)},
      {"eps", to_string(cfg.model.eps)},
      {"M", cfg.model.M ? json(to_string(*cfg.model.M)) : json(nullptr)},
      {"weibull", {{"lambda", cfg.model.weibull.lambda}, {"tau", cfg.model.weibull.tau}}},
      {"tail", {{"alpha", t.alpha()}, {"m", t.m()}, {"slowly_varying", sv}}},
      {"n", cfg.n},
      {"replicates", cfg.replicates},
      {"seed", cfg.seed},
  };
  switch (cfg.norm.kind) {
    case NormChoice::Kind::Auto: j["normalization"] = "auto"; break;
    case NormChoice::Kind::Classical: j["normalization"] = "classical"; break;
    case NormChoice::Kind::Fixed: j["normalization"] = {{"s", cfg.norm.s}, {"c", cfg.norm.c}}; break;
  }
  return j;
}

Classified classify_config(const RunConfig& cfg) {
  if (!cfg.model.M && growth_class(cfg.model.eps).kind == GrowthClass::Kind::ToConst) {
    const double eps = growth_class(cfg.model.eps).value;
    return {classical_limit(eps, cfg.model.tail), std::nullopt,
            {"fixed eps = " + fmt(eps) + ": classical limit exp(-eps x^-alpha)",
             "Frechet (classical normalisation)"}};
  }
  Decision d = classify(cfg.model.regime_inputs());
  return {d.law, d, d.path};
}

Normalization run_normalization(const RunConfig& cfg, const LimitLaw& law) {
  switch (cfg.norm.kind) {
    case NormChoice::Kind::Fixed: return Normalization::fixed(cfg.norm.s, cfg.norm.c);
    case NormChoice::Kind::Classical: return Normalization::classical(cfg.model.tail);
    case NormChoice::Kind::Auto: break;
  }
  if (law.is_degenerate()) return Normalization::fixed(1.0, 0.0);
  const Row row = row_at(cfg.model, cfg.n);
  return normalization(law, row.spec, cfg.model.k, cfg.model.eps);
}

json law_to_json(const LimitLaw& law) {
  struct Params {
    json operator()(const law::Gumbel&) const { return json::object(); }
    json operator()(const law::Frechet& f) const { return {{"alpha", f.alpha}, {"weight", f.weight}}; }
    json operator()(const law::DistI& d) const { return {{"atom", d.atom}, {"alpha", d.alpha}}; }
    json operator()(const law::DistII& d) const {
      return {{"ctilde", d.ctilde}, {"cbreve", d.cbreve}, {"alpha", d.alpha}, {"upper", d.upper()}};
    }
    json operator()(const law::DistIII& d) const {
      return {{"lambda", d.lambda}, {"tau", d.tau},       {"c", d.c},         {"ctilde", d.ctilde},
              {"cbreve", d.cbreve}, {"alpha", d.alpha},   {"atom", d.atom()}, {"upper", d.upper()}};
    }
    json operator()(const law::DistIV& d) const { return {{"atom", d.atom}}; }
    json operator()(const law::Degenerate& d) const { return {{"reason", d.reason}}; }
  };
  return {{"name", law.is_degenerate() ? "Degenerate: no limit under any normalisation" : law.name()},
          {"params", std::visit(Params{}, law.kind)},
          {"normalization", to_string(law.norm)}};
}

json classified_to_json(const Classified& c) {
  json j = {{"law", law_to_json(c.law)}, {"path", c.path}};
  if (!c.decision) {
    j["regime"] = "classical";
    return j;
  }
  const Decision& d = *c.decision;
  json a = {{"label", to_string(d.a.label)}, {"k_eps", to_string(d.a.product.kind)}};
  if (d.a.witness_beta) a["witness_beta"] = *d.a.witness_beta;
  if (d.a.label == ACondition::Label::A3) a["c"] = d.a.c;
  json m = {{"label", to_string(d.m.label)}};
  if (d.m.witness_gamma) m["witness_gamma"] = *d.m.witness_gamma;
  if (d.m.label == MCondition::Label::M3) m["cbreve"] = d.m.cbreve;
  j["a_condition"] = a;
  j["m_condition"] = m;
  j["slowly_varying_limit"] = to_string(d.tail);
  if (d.threshold) j["threshold"] = *d.threshold;
  return j;
}

json report_to_json(const FitReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json curve = json::array();
  for (const auto& p : r.separation.pvalue_curve) curve.push_back({p.eps, p.pvalue});
  json aban = json::array();
  for (const auto& p : r.aban_curve) aban.push_back({p.r, p.pvalue});
  json cis = json::array();
  for (const auto& q : r.quantile_cis) {
    cis.push_back({{"level", q.level}, {"lower", q.lower}, {"estimate", q.estimate},
                   {"upper", q.upper}, {"covered", q.lower <= q.estimate && q.estimate <= q.upper}});
  }
  json path = json::array();
  for (const auto& p : r.eps_path) path.push_back({p.n, p.eps});
  json beta = json::array();
  for (const auto& p : r.beta_diagnostic) beta.push_back({p.n, p.ratio});
  return {
      {"n", r.n},
      {"estimates",
       {{"lambda_hat", r.lambda_hat},
        {"tau_hat", r.tau_hat},
        {"alpha_hat", opt(r.alpha_hat)},
        {"m_hat", opt(r.m_hat)},
        {"eps_hat", r.eps_hat},
        {"truncation_hat", opt(r.model.truncation)}}},
      {"separation",
       {{"split_index", r.separation.split_index},
        {"impurity_detected", r.separation.impurity_detected},
        {"pvalue_curve", curve}}},
      {"tail_model", r.tail_model},
      {"aban_pvalue", opt(r.aban_pvalue)},
      {"aban_curve", aban},
      {"chi2_independence_pvalue", opt(r.chi2_pvalue)},
      {"bulk_ks_pvalue", r.bulk_ks_pvalue},
      {"tail_ks_pvalue", opt(r.tail_ks_pvalue)},
      {"tau_over_alpha", opt(r.tau_over_alpha)},
      {"mixture_ks_pvalue", r.mixture_ks_pvalue},
      {"quantile_cis", cis},
      {"degenerate_ci", r.degenerate_ci},
      {"eps_path", path},
      {"beta_diagnostic", beta},
      {"notes", r.notes},
  };
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw ConfigError("line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(field);
  return out;
}

std::optional<double> to_number(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  s = s.substr(b, s.find_last_not_of(" \t") - b + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> read_csv_column(std::istream& in, const std::optional<std::string>& column) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> index;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line, line_no);
    if (first) {
      first = false;
      const bool header = !to_number(fields.front());
      if (header) {
        if (column) {
          const auto it = std::find(fields.begin(), fields.end(), *column);
          if (it == fields.end()) throw ConfigError("column \"" + *column + "\" not in header");
          index = static_cast<std::size_t>(it - fields.begin());
        } else {
          index = 0;
        }
        continue;
      }
      if (column) throw ConfigError("column \"" + *column + "\" requested but the file has no header");
      index = 0;
    }
    if (*index >= fields.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": missing column");
    }
    const auto v = to_number(fields[*index]);
    if (!v) {
      throw ConfigError("line " + std::to_string(line_no) + ": not a number: \"" + fields[*index] + "\"");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("input has no data rows");
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_quantile_csv(std::span<const QuantileRow> rows, std::ostream& out) {
  out << "level,lower,estimate,upper\r\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\r\n", r.level, r.lower, r.estimate, r.upper);
    out << buf;
  }
}

std::string histogram_svg(std::span<const double> values, const std::function<double(double)>& cdf,
                          const std::string& title) {
  std::vector<double> xs;
  for (double v : values) {
    if (std::isfinite(v)) xs.push_back(v);
  }
  if (xs.empty()) throw DomainError("histogram_svg: no finite values");
  std::sort(xs.begin(), xs.end());
  double lo = sample_quantile(xs, 0.005);
  double hi = sample_quantile(xs, 0.995);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(std::sqrt(xs.size()))), 10, 60);
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> density(bins, 0.0);
  for (double x : xs) {
    if (x < lo || x > hi) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
    density[b] += 1.0;
  }
  for (double& d : density) d /= static_cast<double>(xs.size()) * width;

  std::vector<std::pair<double, double>> curve;
  if (cdf) {
    const double h = (hi - lo) / 400.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / 200.0;
      curve.emplace_back(x, std::max(0.0, (cdf(x + h) - cdf(x - h)) / (2.0 * h)));
    }
  }
  double ymax = *std::max_element(density.begin(), density.end());
  for (const auto& [x, y] : curve) ymax = std::max(ymax, y);
  if (!(ymax > 0.0)) ymax = 1.0;

  const double W = 640, H = 400, L = 50, R = 20, T = 30, B = 40;
  auto px = [&](double x) { return L + (x - lo) / (hi - lo) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  std::string esc;
  for (char ch : title) {
    if (ch == '<') esc += "&lt;";
    else if (ch == '>') esc += "&gt;";
    else if (ch == '&') esc += "&amp;";
    else esc += ch;
  }
  s << "<text x=\"" << L << "\" y=\"20\" font-size=\"14\">" << esc << "</text>\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double x0 = lo + width * static_cast<double>(b);
    s << "<rect x=\"" << px(x0) << "\" y=\"" << py(density[b]) << "\" width=\""
      << px(x0 + width) - px(x0) << "\" height=\"" << py(0.0) - py(density[b])
      << "\" fill=\"#9ab\" stroke=\"#567\"/>\n";
  }
  if (!curve.empty()) {
    s << "<polyline fill=\"none\" stroke=\"#c00\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : curve) s << px(x) << ',' << py(y) << ' ';
    s << "\"/>\n";
  }
  s << "<line x1=\"" << L << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0.0)
    << "\" stroke=\"black\"/>\n";
  s.precision(4);
  s << "<text x=\"" << L << "\" y=\"" << H - 10 << "\" font-size=\"12\">" << lo << "</text>\n";
  s << "<text x=\"" << W - R - 60 << "\" y=\"" << H - 10 << "\" font-size=\"12\">" << hi << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace evt
