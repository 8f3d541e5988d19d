#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/sequences.hpp"

namespace evt {

/// Which of the rate conditions on (log k_n, k_n eps_n) holds.
struct ACondition {
  enum class Label { A1, A2, A3, EpsToZeroOrConst };
  Label label;
  std::optional<double> witness_beta;  // A1: > tau/alpha; A2: in (0, tau/alpha)
  double c = 0.0;                      // A3: k_n eps_n ~ c (log k_n)^(alpha/tau)
  GrowthClass product{GrowthClass::Kind::ToInfinity};  // growth of k_n eps_n
};

/// Which of the rate conditions on (M_n, k_n eps_n) holds.
struct MCondition {
  enum class Label { M1, M2, M3, NotApplicable };
  Label label;
  std::optional<double> witness_gamma;  // M1: > 1/alpha; M2: in (0, 1/alpha)
  double cbreve = 0.0;                  // M3: M_n ~ cbreve (k_n eps_n)^(1/alpha)
};

const char* to_string(ACondition::Label l);
const char* to_string(MCondition::Label l);

namespace law {

struct Gumbel {};

/// exp(-weight x^-alpha); weight is 1 except for the fixed-eps classical limit.
struct Frechet {
  double alpha;
  double weight = 1.0;
};

/// Atom at x0 = lambda^(-1/tau) (c ctilde)^(-1/alpha), Frechet above it.
struct DistI {
  double atom;
  double alpha;
};

/// exp(ctilde cbreve^-alpha - x^-alpha) on (0, cbreve ctilde^(-1/alpha)].
struct DistII {
  double ctilde;
  double cbreve;
  double alpha;
  double upper() const;
};

/// Atom at lambda^(-1/tau) (c ctilde)^(-1/alpha), DistII shape above it.
struct DistIII {
  double lambda;
  double tau;
  double c;
  double ctilde;
  double cbreve;
  double alpha;
  double atom() const;
  double upper() const;
};

/// Point mass at cbreve ctilde^(-1/alpha); e^-1 at the atom in the pointwise form.
struct DistIV {
  double atom;
};

struct Degenerate {
  std::string reason;
};

}  // namespace law

using LawKind = std::variant<law::Gumbel, law::Frechet, law::DistI, law::DistII, law::DistIII,
                             law::DistIV, law::Degenerate>;

enum class NormScheme { Const1, Const2, Classical, Fixed, None };

const char* to_string(NormScheme s);

struct LimitLaw {
  LawKind kind;
  NormScheme norm;

  std::string name() const;
  bool is_degenerate() const { return std::holds_alternative<law::Degenerate>(kind); }
};

/// Parameters of the mixture that the limit-law tables depend on.
struct LawParams {
  double lambda;
  double tau;
  double alpha;
  /// Whether k_n >> exp(lambda M_n^tau); only consulted in the (M2, A2) cell.
  bool k_beats_bulk_at_truncation = false;
};

ACondition classify_A(const LogPolySeq& k, const LogPolySeq& eps, double tau, double alpha);
MCondition classify_M(const LogPolySeq& k, const LogPolySeq& eps,
                      const std::optional<LogPolySeq>& M, double alpha);

/// Decides k_n >> exp(lambda M_n^tau) as log k_n / (lambda M_n^tau) -> infinity.
bool k_beats_bulk_at_truncation(const LogPolySeq& k, const LogPolySeq& M, double lambda,
                                double tau);

/// lambda^(1/tau) cbreve c^(1/alpha), compared with 1 in the (M3, A3) cell.
double m3a3_threshold(double lambda, double tau, double alpha, double c, double cbreve);

/// Limit law without truncation (decision tree over k_n eps_n, A1-A3 and l).
LimitLaw limit_law_thm1(const ACondition& a, const SlowVarySpec& sv, const LawParams& p);
/// Limit law with a growing truncation level (table over M1-M3 x A1-A3 and l).
LimitLaw limit_law_thm2(const ACondition& a, const MCondition& m, const SlowVarySpec& sv,
                        const LawParams& p);

/// Normalising sequences s_n, c_n with v_n(x) = s_n x + c_n.
class Normalization {
public:
  /// s_n = (lambda tau)^-1 (log k_n / lambda)^(1/tau - 1), c_n = (log k_n / lambda)^(1/tau)
  static Normalization const1(const WeibullParams& w, const LogPolySeq& k);
  /// s_n = F2^<-(1 - 1/(k_n eps_n)), c_n = 0
  static Normalization const2(const TailParams& t, const LogPolySeq& k, const LogPolySeq& eps);
  /// s_n = F2^<-(1 - 1/n), c_n = 0
  static Normalization classical(const TailParams& t);
  static Normalization fixed(double s, double c);

  NormScheme scheme() const { return scheme_; }
  double s_at(double n) const;
  double c_at(double n) const;
  double apply(double n, double x) const { return s_at(n) * x + c_at(n); }

private:
  Normalization(NormScheme scheme, std::optional<WeibullParams> w, std::optional<TailParams> t,
                LogPolySeq k, LogPolySeq eps, double s, double c)
      : scheme_(scheme), weibull_(w), tail_(t), k_(k), eps_(eps), s_(s), c_(c) {}

  NormScheme scheme_;
  std::optional<WeibullParams> weibull_;
  std::optional<TailParams> tail_;
  LogPolySeq k_;
  LogPolySeq eps_;
  double s_ = 1.0;
  double c_ = 0.0;
};

/// Throws DomainError for a degenerate law.
Normalization normalization(const LimitLaw& law, const MixtureSpec& spec, const LogPolySeq& k,
                            const LogPolySeq& eps);

/// Fixed-eps limit: Frechet-type exp(-eps x^-alpha) under s_n = F2^<-(1 - 1/n).
LimitLaw classical_limit(double eps, const TailParams& t);
LimitLaw classical_limit(const MixtureSpec& spec);

/// Everything needed to classify a triangular array.
struct RegimeInputs {
  LogPolySeq k;
  LogPolySeq eps;
  std::optional<LogPolySeq> M;  // empty: no truncation
  double lambda;
  double tau;
  double alpha;
  SlowVarySpec sv;
};

struct Decision {
  ACondition a;
  MCondition m;
  TailClass tail;
  std::optional<double> threshold;  // set in the (M3, A3) cell
  LimitLaw law;
  std::vector<std::string> path;
};

Decision classify(const RegimeInputs& in);

}  // namespace evt
