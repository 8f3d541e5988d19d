#include "evt/regimes.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace evt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThresholdTol = 1e-12;

LogPolySeq unshifted(LogPolySeq s) {
  s.shift = 0.0;
  return s;
}

/// For R(p) = num / den^p with den -> infinity: the power p* separating
/// R -> infinity (p < p*) from R -> 0 (p > p*), and the behaviour of R at p*.
struct Critical {
  double power;
  int sign_at = 0;       // +1: R -> inf at p*, -1: R -> 0 at p*, 0: R -> const
  double const_at = 0.0;
};

Critical critical_power(const LogPolySeq& num, const LogPolySeq& den) {
  const auto en = num.exponents();
  const auto ed = den.exponents();
  std::size_t i = 0;
  while (i < ed.size() && std::abs(ed[i]) <= kExponentTol) ++i;
  for (std::size_t j = 0; j < i; ++j) {
    if (std::abs(en[j]) > kExponentTol) return {en[j] > 0.0 ? kInf : -kInf};
  }
  Critical cr{en[i] / ed[i]};
  std::array<double, 3> residual{};
  for (std::size_t j = i + 1; j < en.size(); ++j) residual[j] = en[j] - cr.power * ed[j];
  cr.sign_at = leading_sign(residual);
  cr.const_at = num.coeff / std::pow(den.coeff, cr.power);
  return cr;
}

bool near(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(b)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

const char* to_string(ACondition::Label l) {
  switch (l) {
    case ACondition::Label::A1: return "A1";
    case ACondition::Label::A2: return "A2";
    case ACondition::Label::A3: return "A3";
    case ACondition::Label::EpsToZeroOrConst: return "eps_to_zero_or_const";
  }
  return "?";
}

const char* to_string(MCondition::Label l) {
  switch (l) {
    case MCondition::Label::M1: return "M1";
    case MCondition::Label::M2: return "M2";
    case MCondition::Label::M3: return "M3";
    case MCondition::Label::NotApplicable: return "not_applicable";
  }
  return "?";
}

const char* to_string(NormScheme s) {
  switch (s) {
    case NormScheme::Const1: return "const1";
    case NormScheme::Const2: return "const2";
    case NormScheme::Classical: return "classical";
    case NormScheme::Fixed: return "fixed";
    case NormScheme::None: return "none";
  }
  return "?";
}

double law::DistII::upper() const { return cbreve * std::pow(ctilde, -1.0 / alpha); }

double law::DistIII::atom() const {
  return std::pow(lambda, -1.0 / tau) * std::pow(c * ctilde, -1.0 / alpha);
}

double law::DistIII::upper() const { return cbreve * std::pow(ctilde, -1.0 / alpha); }

std::string LimitLaw::name() const {
  struct Namer {
    std::string operator()(const law::Gumbel&) const { return "Gumbel"; }
    std::string operator()(const law::Frechet&) const { return "Frechet"; }
    std::string operator()(const law::DistI&) const { return "Distribution I"; }
    std::string operator()(const law::DistII&) const { return "Distribution II"; }
    std::string operator()(const law::DistIII&) const { return "Distribution III"; }
    std::string operator()(const law::DistIV&) const { return "Distribution IV"; }
    std::string operator()(const law::Degenerate&) const { return "Degenerate"; }
  };
  return std::visit(Namer{}, kind);
}

ACondition classify_A(const LogPolySeq& k_in, const LogPolySeq& eps_in, double tau, double alpha) {
  const LogPolySeq k = unshifted(k_in);
  const LogPolySeq ke = seq_mul(k, unshifted(eps_in));
  if (growth_class(k).kind != GrowthClass::Kind::ToInfinity) {
    throw ClassificationError("k_n must tend to infinity");
  }
  if (growth_class(unshifted(eps_in)).kind != GrowthClass::Kind::ToZero) {
    throw ClassificationError("eps_n must tend to 0; fixed eps has the classical limit");
  }
  const GrowthClass g = growth_class(ke);
  if (g.kind != GrowthClass::Kind::ToInfinity) {
    return {ACondition::Label::EpsToZeroOrConst, std::nullopt, 0.0, g};
  }
  LogPolySeq log_k;
  try {
    log_k = seq_log(k);
  } catch (const DomainError& e) {
    throw ClassificationError(std::string("log k_n is outside the sequence family: ") + e.what());
  }

  const double beta0 = tau / alpha;
  const Critical cr = critical_power(log_k, ke);
  if (!near(cr.power, beta0) && cr.power > beta0) {
    const double w = std::isinf(cr.power) ? beta0 + 1.0 : 0.5 * (beta0 + cr.power);
    return {ACondition::Label::A1, w, 0.0, g};
  }
  if (!near(cr.power, beta0)) {
    return {ACondition::Label::A2, 0.5 * (std::max(cr.power, 0.0) + beta0), 0.0, g};
  }
  if (cr.sign_at != 0) {
    throw ClassificationError(
        "k_n eps_n matches (log k_n)^(alpha/tau) in leading order but not in lower-order "
        "factors; none of A1-A3 holds");
  }
  return {ACondition::Label::A3, std::nullopt, ke.coeff / std::pow(log_k.coeff, alpha / tau), g};
}

MCondition classify_M(const LogPolySeq& k, const LogPolySeq& eps,
                      const std::optional<LogPolySeq>& M_in, double alpha) {
  if (!M_in) return {MCondition::Label::NotApplicable, std::nullopt};
  const LogPolySeq M = unshifted(*M_in);
  if (growth_class(M).kind != GrowthClass::Kind::ToInfinity) {
    throw ClassificationError("truncation level M_n must tend to infinity");
  }
  const LogPolySeq ke = seq_mul(unshifted(k), unshifted(eps));
  if (growth_class(ke).kind != GrowthClass::Kind::ToInfinity) {
    return {MCondition::Label::NotApplicable, std::nullopt};
  }
  const double gamma0 = 1.0 / alpha;
  const Critical cr = critical_power(M, ke);
  if (!near(cr.power, gamma0) && cr.power > gamma0) {
    const double w = std::isinf(cr.power) ? gamma0 + 1.0 : 0.5 * (gamma0 + cr.power);
    return {MCondition::Label::M1, w};
  }
  if (!near(cr.power, gamma0)) {
    return {MCondition::Label::M2, 0.5 * (std::max(cr.power, 0.0) + gamma0)};
  }
  if (cr.sign_at != 0) {
    throw ClassificationError(
        "M_n matches (k_n eps_n)^(1/alpha) in leading order but not in lower-order factors; "
        "none of M1-M3 holds");
  }
  return {MCondition::Label::M3, std::nullopt, M.coeff / std::pow(ke.coeff, gamma0)};
}

bool k_beats_bulk_at_truncation(const LogPolySeq& k, const LogPolySeq& M, double lambda,
                                double tau) {
  const LogPolySeq bulk = seq_scale(seq_pow(unshifted(M), tau), lambda);
  return ratio_limit(seq_log(unshifted(k)), bulk).kind == GrowthClass::Kind::ToInfinity;
}

double m3a3_threshold(double lambda, double tau, double alpha, double c, double cbreve) {
  return std::pow(lambda, 1.0 / tau) * cbreve * std::pow(c, 1.0 / alpha);
}

LimitLaw limit_law_thm1(const ACondition& a, const SlowVarySpec& sv, const LawParams& p) {
  switch (a.label) {
    case ACondition::Label::EpsToZeroOrConst:
    case ACondition::Label::A1:
      return {law::Gumbel{}, NormScheme::Const1};
    case ACondition::Label::A2:
      return {law::Frechet{p.alpha}, NormScheme::Const2};
    case ACondition::Label::A3:
      switch (sv.tail_class()) {
        case TailClass::Zero: return {law::Gumbel{}, NormScheme::Const1};
        case TailClass::Infinite: return {law::Frechet{p.alpha}, NormScheme::Const2};
        case TailClass::Const: {
          const double atom =
              std::pow(p.lambda, -1.0 / p.tau) * std::pow(a.c * sv.ctilde, -1.0 / p.alpha);
          return {law::DistI{atom, p.alpha}, NormScheme::Const2};
        }
      }
  }
  throw ClassificationError("unreachable A-condition");
}

LimitLaw limit_law_thm2(const ACondition& a, const MCondition& m, const SlowVarySpec& sv,
                        const LawParams& p) {
  using AL = ACondition::Label;
  const LimitLaw gumbel{law::Gumbel{}, NormScheme::Const1};
  if (a.label == AL::EpsToZeroOrConst) return gumbel;
  const TailClass tail = sv.tail_class();

  switch (m.label) {
    case MCondition::Label::NotApplicable:
      throw ClassificationError("truncated model requires an M-condition");
    case MCondition::Label::M1:
      return limit_law_thm1(a, sv, p);
    case MCondition::Label::M2:
      if (a.label == AL::A2 && !p.k_beats_bulk_at_truncation) {
        return {law::Degenerate{"(M2, A2) with k_n not >> exp(lambda M_n^tau)"}, NormScheme::None};
      }
      return gumbel;
    case MCondition::Label::M3:
      break;
  }

  if (a.label == AL::A1) return gumbel;
  if (a.label == AL::A2) {
    switch (tail) {
      case TailClass::Zero: return {law::Frechet{p.alpha}, NormScheme::Const2};
      case TailClass::Const:
        return {law::DistII{sv.ctilde, m.cbreve, p.alpha}, NormScheme::Const2};
      case TailClass::Infinite:
        return {law::Degenerate{"(M3, A2) with l -> infinity"}, NormScheme::None};
    }
  }
  // (M3, A3)
  if (tail == TailClass::Zero) return gumbel;
  const double theta = m3a3_threshold(p.lambda, p.tau, p.alpha, a.c, m.cbreve);
  const bool at_one = std::abs(theta - 1.0) <= kThresholdTol;
  if (!at_one && theta < 1.0) return gumbel;
  if (tail == TailClass::Infinite) {
    return {law::Degenerate{"(M3, A3) with l -> infinity and threshold >= 1"}, NormScheme::None};
  }
  if (at_one) {
    return {law::DistIV{m.cbreve * std::pow(sv.ctilde, -1.0 / p.alpha)}, NormScheme::Const2};
  }
  return {law::DistIII{p.lambda, p.tau, a.c, sv.ctilde, m.cbreve, p.alpha}, NormScheme::Const2};
}

Normalization Normalization::const1(const WeibullParams& w, const LogPolySeq& k) {
  return Normalization(NormScheme::Const1, w, std::nullopt, k, LogPolySeq{}, 1.0, 0.0);
}

Normalization Normalization::const2(const TailParams& t, const LogPolySeq& k,
                                    const LogPolySeq& eps) {
  return Normalization(NormScheme::Const2, std::nullopt, t, k, eps, 1.0, 0.0);
}

Normalization Normalization::classical(const TailParams& t) {
  return Normalization(NormScheme::Classical, std::nullopt, t, LogPolySeq{}, LogPolySeq{}, 1.0,
                       0.0);
}

Normalization Normalization::fixed(double s, double c) {
  if (!(s > 0.0)) throw DomainError("normalization: scale must be positive");
  return Normalization(NormScheme::Fixed, std::nullopt, std::nullopt, LogPolySeq{}, LogPolySeq{},
                       s, c);
}

double Normalization::s_at(double n) const {
  switch (scheme_) {
    case NormScheme::Const1: {
      const double lk = std::log(seq_eval(k_, n));
      if (!(lk > 0.0)) throw DomainError("normalization: const1 needs k_n > 1");
      const double lam = weibull_->lambda;
      const double tau = weibull_->tau;
      return std::pow(lk / lam, 1.0 / tau - 1.0) / (lam * tau);
    }
    case NormScheme::Const2: {
      const double ke = seq_eval(k_, n) * seq_eval(eps_, n);
      // F2^<-(y) for y <= 0 is taken as the left endpoint m.
      return rv_upper_quantile(std::min(1.0, 1.0 / ke), *tail_);
    }
    case NormScheme::Classical:
      if (!(n >= 1.0)) throw DomainError("normalization: n must be at least 1");
      return rv_upper_quantile(1.0 / n, *tail_);
    case NormScheme::Fixed:
      return s_;
    case NormScheme::None:
      break;
  }
  throw DomainError("normalization: degenerate law has no normalising sequences");
}

double Normalization::c_at(double n) const {
  switch (scheme_) {
    case NormScheme::Const1: {
      const double lk = std::log(seq_eval(k_, n));
      if (!(lk > 0.0)) throw DomainError("normalization: const1 needs k_n > 1");
      return std::pow(lk / weibull_->lambda, 1.0 / weibull_->tau);
    }
    case NormScheme::Fixed:
      return c_;
    case NormScheme::None:
      throw DomainError("normalization: degenerate law has no normalising sequences");
    default:
      return 0.0;
  }
}

Normalization normalization(const LimitLaw& law, const MixtureSpec& spec, const LogPolySeq& k,
                            const LogPolySeq& eps) {
  switch (law.norm) {
    case NormScheme::Const1: return Normalization::const1(spec.weibull, k);
    case NormScheme::Const2: return Normalization::const2(spec.tail, k, eps);
    case NormScheme::Classical: return Normalization::classical(spec.tail);
    case NormScheme::Fixed:
    case NormScheme::None: break;
  }
  throw DomainError("normalization: degenerate law has no normalising sequences");
}

LimitLaw classical_limit(double eps, const TailParams& t) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("classical_limit: eps must lie in (0, 1]");
  return {law::Frechet{t.alpha(), eps}, NormScheme::Classical};
}

LimitLaw classical_limit(const MixtureSpec& spec) {
  if (spec.trunc.enabled) throw DomainError("classical_limit: truncation must be disabled");
  return classical_limit(spec.eps, spec.tail);
}

Decision classify(const RegimeInputs& in) {
  using AL = ACondition::Label;
  Decision d{classify_A(in.k, in.eps, in.tau, in.alpha),
             classify_M(in.k, in.eps, in.M, in.alpha),
             in.sv.tail_class(),
             std::nullopt,
             {law::Degenerate{}, NormScheme::None},
             {}};
  const bool truncated = in.M.has_value();
  d.path.push_back(truncated ? "truncated model: table over (M-condition, A-condition)"
                             : "non-truncated model: decision tree over k_n eps_n");

  switch (d.a.product.kind) {
    case GrowthClass::Kind::ToZero: d.path.push_back("k_n eps_n -> 0"); break;
    case GrowthClass::Kind::ToConst:
      d.path.push_back("k_n eps_n -> const = " + fmt(d.a.product.value));
      break;
    case GrowthClass::Kind::ToInfinity: d.path.push_back("k_n eps_n -> infinity"); break;
  }

  LawParams p{in.lambda, in.tau, in.alpha};
  if (d.a.label != AL::EpsToZeroOrConst) {
    std::string a = std::string("condition ") + to_string(d.a.label);
    if (d.a.witness_beta) a += " (witness beta = " + fmt(*d.a.witness_beta) + ")";
    if (d.a.label == AL::A3) a += " (c = " + fmt(d.a.c) + ")";
    d.path.push_back(a);
    if (truncated) {
      std::string m = std::string("condition ") + to_string(d.m.label);
      if (d.m.witness_gamma) m += " (witness gamma = " + fmt(*d.m.witness_gamma) + ")";
      if (d.m.label == MCondition::Label::M3) m += " (cbreve = " + fmt(d.m.cbreve) + ")";
      d.path.push_back(m);
    }
    d.path.push_back(std::string("l(u) -> ") + to_string(d.tail) +
                     (d.tail == TailClass::Const ? " (ctilde = " + fmt(in.sv.ctilde) + ")" : ""));
  }

  if (truncated) {
    if (d.m.label == MCondition::Label::M2 && d.a.label == AL::A2) {
      p.k_beats_bulk_at_truncation = k_beats_bulk_at_truncation(in.k, *in.M, in.lambda, in.tau);
      d.path.push_back(p.k_beats_bulk_at_truncation ? "k_n >> exp(lambda M_n^tau)"
                                                    : "k_n >> exp(lambda M_n^tau) fails");
    }
    if (d.m.label == MCondition::Label::M3 && d.a.label == AL::A3 && d.tail != TailClass::Zero) {
      d.threshold = m3a3_threshold(in.lambda, in.tau, in.alpha, d.a.c, d.m.cbreve);
      d.path.push_back("lambda^(1/tau) cbreve c^(1/alpha) = " + fmt(*d.threshold));
    }
    d.law = d.a.label == AL::EpsToZeroOrConst ? limit_law_thm1(d.a, in.sv, p)
                                              : limit_law_thm2(d.a, d.m, in.sv, p);
  } else {
    d.law = limit_law_thm1(d.a, in.sv, p);
  }
  d.path.push_back(d.law.is_degenerate() ? "Degenerate: no limit under any normalisation"
                                         : d.law.name());
  return d;
}

}  // namespace evt
