#include "evt/distributions.hpp"

#include <cmath>
#include <limits>

namespace evt {

namespace {

constexpr int kBisectionCap = 200;
constexpr double kLogTol = 1e-13;

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

WeibullParams::WeibullParams(double lambda, double tau) : lambda(lambda), tau(tau) {
  require(lambda > 0.0 && std::isfinite(lambda), "weibull: lambda must be positive");
  require(tau > 0.0 && std::isfinite(tau), "weibull: tau must be positive");
}

const char* to_string(TailClass c) {
  switch (c) {
    case TailClass::Zero: return "zero";
    case TailClass::Const: return "const";
    case TailClass::Infinite: return "infinite";
  }
  return "?";
}

SlowVarySpec SlowVarySpec::constant(double ctilde) {
  require(ctilde > 0.0, "slowly varying: ctilde must be positive");
  return {Form::Const, ctilde, 0.0};
}

SlowVarySpec SlowVarySpec::log_pow(double ctilde, double p) {
  require(ctilde > 0.0, "slowly varying: ctilde must be positive");
  require(p != 0.0 && std::isfinite(p), "slowly varying: log power must be nonzero");
  return {Form::LogPow, ctilde, p};
}

double SlowVarySpec::operator()(double x) const { return std::exp(log_value(x)); }

double SlowVarySpec::log_value(double x) const {
  if (form == Form::Const) return std::log(ctilde);
  return std::log(ctilde) + p * std::log(std::log1p(x));
}

TailClass SlowVarySpec::tail_class() const {
  if (form == Form::Const) return TailClass::Const;
  return p < 0.0 ? TailClass::Zero : TailClass::Infinite;
}

TailParams::TailParams(double alpha, double m, SlowVarySpec sv) : alpha_(alpha), m_(m), sv_(sv) {
  require(alpha > 0.0 && std::isfinite(alpha), "tail: alpha must be positive");
  require(m > 0.0 && std::isfinite(m), "tail: m must be positive");
  check_monotone();
}

TailParams TailParams::pareto(double alpha, double m) {
  return from_left_endpoint(alpha, m, SlowVarySpec::Form::Const);
}

TailParams TailParams::from_left_endpoint(double alpha, double m, SlowVarySpec::Form form,
                                          double p) {
  require(alpha > 0.0 && m > 0.0, "tail: alpha and m must be positive");
  if (form == SlowVarySpec::Form::Const) {
    return TailParams(alpha, m, SlowVarySpec::constant(std::pow(m, alpha)));
  }
  // m^(-alpha) * ctilde * log(1+m)^p = 1
  const double ctilde = std::exp(alpha * std::log(m) - p * std::log(std::log1p(m)));
  return TailParams(alpha, m, SlowVarySpec::log_pow(ctilde, p));
}

TailParams TailParams::from_scale(double alpha, const SlowVarySpec& sv) {
  require(alpha > 0.0, "tail: alpha must be positive");
  if (sv.form == SlowVarySpec::Form::Const) {
    return TailParams(alpha, std::pow(sv.ctilde, 1.0 / alpha), sv);
  }
  // Root of h(m) = log l(m) - alpha log m, decreasing on the admissible range.
  auto h = [&](double u) { return sv.log_value(std::exp(u)) - alpha * u; };
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && h(lo) <= 0.0; ++i) lo -= 2.0;
  for (int i = 0; i < 200 && h(hi) >= 0.0; ++i) hi += 2.0;
  require(h(lo) > 0.0 && h(hi) < 0.0, "tail: cannot solve for the left endpoint m");
  for (int i = 0; i < kBisectionCap && hi - lo > kLogTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return TailParams(alpha, std::exp(0.5 * (lo + hi)), sv);
}

void TailParams::check_monotone() const {
  if (sv_.form == SlowVarySpec::Form::Const || sv_.p < 0.0) return;
  // x^(-alpha) log(1+x)^p can increase near m when p is large relative to alpha.
  constexpr int kPoints = 3000;
  const double span = std::log(1e15);
  double prev = log_survival(m_);
  for (int i = 1; i <= kPoints; ++i) {
    const double x = m_ * std::exp(span * i / kPoints);
    const double cur = log_survival(x);
    if (cur > prev + 1e-13 * (1.0 + std::abs(prev))) {
      throw DomainError("tail: F2 is not monotone for this (alpha, p, m)");
    }
    prev = cur;
  }
}

double TailParams::log_survival(double x) const {
  if (x <= m_) return 0.0;
  double v = -alpha_ * std::log(x / m_);
  if (sv_.form == SlowVarySpec::Form::LogPow) {
    v += sv_.p * std::log(std::log1p(x) / std::log1p(m_));
  }
  return v;
}

double TailParams::survival(double x) const { return std::exp(log_survival(x)); }

MixtureSpec::MixtureSpec(double eps, WeibullParams weibull, TailParams tail, TruncationSpec trunc)
    : eps(eps), weibull(weibull), tail(tail), trunc(trunc) {
  require(eps > 0.0 && eps < 1.0, "mixture: eps must lie in (0, 1)");
  if (trunc.enabled) require(trunc.level > tail.m(), "mixture: truncation level must exceed m");
}

double weibull_cdf(double x, const WeibullParams& p) {
  require(x >= 0.0, "weibull_cdf: x must be nonnegative");
  return -std::expm1(-p.lambda * std::pow(x, p.tau));
}

double weibull_survival(double x, const WeibullParams& p) {
  if (x <= 0.0) return 1.0;
  return std::exp(-p.lambda * std::pow(x, p.tau));
}

double weibull_quantile(double prob, const WeibullParams& p) {
  require(prob >= 0.0 && prob < 1.0, "weibull_quantile: prob must lie in [0, 1)");
  return std::pow(-std::log1p(-prob) / p.lambda, 1.0 / p.tau);
}

double weibull_upper_quantile(double q, const WeibullParams& p) {
  require(q > 0.0 && q <= 1.0, "weibull_upper_quantile: q must lie in (0, 1]");
  return std::pow(-std::log(q) / p.lambda, 1.0 / p.tau);
}

double rv_cdf(double x, const TailParams& t) {
  if (x <= t.m()) return 0.0;
  return -std::expm1(t.log_survival(x));
}

double rv_upper_quantile(double q, const TailParams& t) {
  require(q > 0.0 && q <= 1.0, "rv_upper_quantile: q must lie in (0, 1]");
  if (q == 1.0) return t.m();
  const double target = std::log(q);
  if (t.sv().form == SlowVarySpec::Form::Const) {
    return t.m() * std::exp(-target / t.alpha());
  }
  // Bisection on u = log x.
  double lo = std::log(t.m());
  double step = 1.0;
  double hi = lo + step;
  while (t.log_survival(std::exp(hi)) > target) {
    lo = hi;
    step *= 2.0;
    hi += step;
    if (hi > 700.0) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < kBisectionCap && hi - lo > kLogTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t.log_survival(std::exp(mid)) > target ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double rv_quantile(double prob, const TailParams& t) {
  require(prob >= 0.0, "rv_quantile: prob must be nonnegative");
  if (prob >= 1.0) throw DomainError("rv_quantile: quantile at 1 is unbounded");
  return rv_upper_quantile(1.0 - prob, t);
}

double trunc_rv_cdf(double x, const TailParams& t, double level) {
  require(level > t.m(), "trunc_rv_cdf: truncation level must exceed m");
  if (x <= t.m()) return 0.0;
  if (x >= level) return 1.0;
  return rv_cdf(x, t) / rv_cdf(level, t);
}

double trunc_rv_survival(double x, const TailParams& t, double level) {
  require(level > t.m(), "trunc_rv_survival: truncation level must exceed m");
  if (x <= t.m()) return 1.0;
  if (x >= level) return 0.0;
  return (t.survival(x) - t.survival(level)) / rv_cdf(level, t);
}

double trunc_rv_upper_quantile(double q, const TailParams& t, double level) {
  require(level > t.m(), "trunc_rv_quantile: truncation level must exceed m");
  require(q >= 0.0 && q <= 1.0, "trunc_rv_upper_quantile: q must lie in [0, 1]");
  if (q == 0.0) return level;
  const double s = t.survival(level) + q * rv_cdf(level, t);
  return std::min(rv_upper_quantile(std::min(s, 1.0), t), level);
}

double trunc_rv_quantile(double prob, const TailParams& t, double level) {
  require(prob >= 0.0 && prob <= 1.0, "trunc_rv_quantile: prob must lie in [0, 1]");
  return trunc_rv_upper_quantile(1.0 - prob, t, level);
}

double impurity_cdf(double x, const MixtureSpec& s) {
  return s.trunc.enabled ? trunc_rv_cdf(x, s.tail, s.trunc.level) : rv_cdf(x, s.tail);
}

double impurity_survival(double x, const MixtureSpec& s) {
  return s.trunc.enabled ? trunc_rv_survival(x, s.tail, s.trunc.level) : s.tail.survival(x);
}

double impurity_upper_quantile(double q, const MixtureSpec& s) {
  return s.trunc.enabled ? trunc_rv_upper_quantile(q, s.tail, s.trunc.level)
                         : rv_upper_quantile(q, s.tail);
}

double mixture_cdf(double x, const MixtureSpec& s) {
  const double f1 = x <= 0.0 ? 0.0 : weibull_cdf(x, s.weibull);
  return (1.0 - s.eps) * f1 + s.eps * impurity_cdf(x, s);
}

double mixture_survival(double x, const MixtureSpec& s) {
  return (1.0 - s.eps) * weibull_survival(x, s.weibull) + s.eps * impurity_survival(x, s);
}

std::vector<double> mixture_sample(const MixtureSpec& s, RandomStream& rng, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool impurity = rng.unit() < s.eps;
    const double q = rng.open_unit();
    out.push_back(impurity ? impurity_upper_quantile(q, s) : weibull_upper_quantile(q, s.weibull));
  }
  return out;
}

}  // namespace evt
