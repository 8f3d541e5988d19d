#include "evt/limits.hpp"

#include <cmath>

namespace evt {

namespace {

bool pointwise(const LimitCdf& c) { return c.mode == LimitCdf::Mode::Pointwise; }

[[noreturn]] void degenerate() {
  throw DomainError("limit law is degenerate: no distribution function");
}

struct Atoms {
  std::vector<double> operator()(const law::DistI& d) const { return {d.atom}; }
  std::vector<double> operator()(const law::DistIII& d) const { return {d.atom()}; }
  std::vector<double> operator()(const law::DistIV& d) const { return {d.atom}; }
  std::vector<double> operator()(const auto&) const { return {}; }
};

}  // namespace

double limit_cdf(const LimitCdf& c, double x) {
  struct Eval {
    double x;
    bool pw;
    double operator()(const law::Gumbel&) const { return std::exp(-std::exp(-x)); }
    double operator()(const law::Frechet& f) const {
      return x <= 0.0 ? 0.0 : std::exp(-f.weight * std::pow(x, -f.alpha));
    }
    double operator()(const law::DistI& d) const {
      if (x < d.atom) return 0.0;
      const double tail = std::pow(x, -d.alpha);
      return (pw && x == d.atom) ? std::exp(-(1.0 + tail)) : std::exp(-tail);
    }
    double operator()(const law::DistII& d) const {
      if (x <= 0.0) return 0.0;
      if (x >= d.upper()) return 1.0;
      return std::exp(d.ctilde * std::pow(d.cbreve, -d.alpha) - std::pow(x, -d.alpha));
    }
    double operator()(const law::DistIII& d) const {
      const double atom = d.atom();
      if (x < atom) return 0.0;
      if (x > d.upper()) return 1.0;
      const double base = d.ctilde * std::pow(d.cbreve, -d.alpha);
      if (pw && x == atom) {
        return std::exp(-1.0 + base - std::pow(d.lambda, d.alpha / d.tau) * d.c * d.ctilde);
      }
      return std::min(1.0, std::exp(base - std::pow(x, -d.alpha)));
    }
    double operator()(const law::DistIV& d) const {
      if (x < d.atom) return 0.0;
      return (pw && x == d.atom) ? std::exp(-1.0) : 1.0;
    }
    double operator()(const law::Degenerate&) const { degenerate(); }
  };
  return std::visit(Eval{x, pointwise(c)}, c.law.kind);
}

double limit_cdf_left(const LimitCdf& c, double x) {
  const LimitCdf rc{c.law, LimitCdf::Mode::RightContinuous};
  for (double a : limit_atoms(c.law)) {
    if (x == a) return 0.0;
  }
  return limit_cdf(rc, x);
}

std::vector<double> limit_atoms(const LimitLaw& law) {
  return std::visit(Atoms{}, law.kind);
}

double limit_quantile(const LimitCdf& c, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("limit_quantile: p must lie in (0, 1)");
  struct Inv {
    double p;
    double operator()(const law::Gumbel&) const { return -std::log(-std::log(p)); }
    double operator()(const law::Frechet& f) const {
      return std::pow(f.weight / -std::log(p), 1.0 / f.alpha);
    }
    double operator()(const law::DistI& d) const {
      if (p <= std::exp(-std::pow(d.atom, -d.alpha))) return d.atom;
      return std::pow(-std::log(p), -1.0 / d.alpha);
    }
    double operator()(const law::DistII& d) const {
      return std::pow(d.ctilde * std::pow(d.cbreve, -d.alpha) - std::log(p), -1.0 / d.alpha);
    }
    double operator()(const law::DistIII& d) const {
      const double base = d.ctilde * std::pow(d.cbreve, -d.alpha);
      const double atom = d.atom();
      if (p <= std::exp(base - std::pow(atom, -d.alpha))) return atom;
      return std::pow(base - std::log(p), -1.0 / d.alpha);
    }
    double operator()(const law::DistIV& d) const { return d.atom; }
    double operator()(const law::Degenerate&) const { degenerate(); }
  };
  return std::visit(Inv{p}, c.law.kind);
}

std::vector<double> limit_sample(const LimitCdf& c, RandomStream& rng, std::size_t count) {
  const LimitCdf rc{c.law, LimitCdf::Mode::RightContinuous};
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(limit_quantile(rc, rng.interior_unit()));
  return out;
}

double reversed_weibull_cdf(double x, double shape) {
  if (x >= 0.0) return 1.0;
  return std::exp(-std::pow(-x, shape));
}

}  // namespace evt
