#pragma once

#include <cstddef>
#include <vector>

#include "evt/errors.hpp"
#include "evt/random.hpp"

namespace evt {

/// Weibull law F1(x) = 1 - exp(-lambda x^tau); lambda is a rate, not a scale.
struct WeibullParams {
  double lambda;
  double tau;

  WeibullParams(double lambda, double tau);
};

/// Limit behaviour of the slowly varying function at infinity.
enum class TailClass { Zero, Const, Infinite };

const char* to_string(TailClass c);

/// l(x) = ctilde, or l(x) = ctilde * log(1 + x)^p.
struct SlowVarySpec {
  enum class Form { Const, LogPow };

  Form form = Form::Const;
  double ctilde = 1.0;
  double p = 0.0;

  static SlowVarySpec constant(double ctilde);
  static SlowVarySpec log_pow(double ctilde, double p);

  double operator()(double x) const;
  double log_value(double x) const;
  TailClass tail_class() const;
};

/// Regularly varying law on [m, inf): F2(x) = 1 - x^(-alpha) l(x).
/// Construction pins the scale so that F2(m) = 0 and rejects parameter
/// combinations for which F2 would decrease somewhere on [m, inf).
class TailParams {
public:
  /// Pareto with left endpoint m, i.e. l == m^alpha.
  static TailParams pareto(double alpha, double m);
  /// Given alpha, m and the form of l, solve for ctilde.
  static TailParams from_left_endpoint(double alpha, double m, SlowVarySpec::Form form,
                                       double p = 0.0);
  /// Given alpha and a fully specified l, solve for m.
  static TailParams from_scale(double alpha, const SlowVarySpec& sv);

  double alpha() const { return alpha_; }
  double m() const { return m_; }
  const SlowVarySpec& sv() const { return sv_; }

  /// 1 - F2(x); equals 1 below m.
  double survival(double x) const;
  double log_survival(double x) const;

private:
  TailParams(double alpha, double m, SlowVarySpec sv);
  void check_monotone() const;

  double alpha_;
  double m_;
  SlowVarySpec sv_;
};

struct TruncationSpec {
  double level = 0.0;
  bool enabled = false;

  static TruncationSpec none() { return {}; }
  static TruncationSpec at(double level) { return {level, true}; }
};

struct MixtureSpec {
  double eps;
  WeibullParams weibull;
  TailParams tail;
  TruncationSpec trunc;

  MixtureSpec(double eps, WeibullParams weibull, TailParams tail,
              TruncationSpec trunc = TruncationSpec::none());
};

// Weibull component.
double weibull_cdf(double x, const WeibullParams& p);
double weibull_survival(double x, const WeibullParams& p);
double weibull_quantile(double prob, const WeibullParams& p);
/// Quantile at 1 - q, computed without cancellation for small q.
double weibull_upper_quantile(double q, const WeibullParams& p);

// Regularly varying component.
double rv_cdf(double x, const TailParams& t);
double rv_quantile(double prob, const TailParams& t);
/// Solves survival(x) = q for q in (0, 1].
double rv_upper_quantile(double q, const TailParams& t);

// Upper-truncated regularly varying component.
double trunc_rv_cdf(double x, const TailParams& t, double level);
double trunc_rv_survival(double x, const TailParams& t, double level);
double trunc_rv_quantile(double prob, const TailParams& t, double level);
double trunc_rv_upper_quantile(double q, const TailParams& t, double level);

// Second mixture component, truncated or not according to the spec.
double impurity_cdf(double x, const MixtureSpec& s);
double impurity_survival(double x, const MixtureSpec& s);
double impurity_upper_quantile(double q, const MixtureSpec& s);

double mixture_cdf(double x, const MixtureSpec& s);
double mixture_survival(double x, const MixtureSpec& s);

std::vector<double> mixture_sample(const MixtureSpec& s, RandomStream& rng, std::size_t count);

}  // namespace evt
