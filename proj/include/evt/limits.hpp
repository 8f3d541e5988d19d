#pragma once

#include <cstddef>
#include <vector>

#include "evt/random.hpp"
#include "evt/regimes.hpp"

namespace evt {

/// A limit law viewed as a function of x.
///
/// Pointwise reproduces the limits of P(max <= v_n(x)) at every fixed x,
/// including the values at atoms (e.g. e^{-(1 + x^-alpha)} for DistI).
/// RightContinuous is the weak limit: the atom value is replaced by the right
/// limit, which makes it a proper CDF for sampling and goodness of fit.
struct LimitCdf {
  enum class Mode { Pointwise, RightContinuous };

  LimitLaw law;
  Mode mode = Mode::RightContinuous;
};

double limit_cdf(const LimitCdf& c, double x);
/// Left limit H(x-) of the right-continuous CDF.
double limit_cdf_left(const LimitCdf& c, double x);
/// Jump locations of the right-continuous CDF.
std::vector<double> limit_atoms(const LimitLaw& law);

/// inf{x : H(x) >= p} for the right-continuous CDF, p in (0, 1).
double limit_quantile(const LimitCdf& c, double p);
std::vector<double> limit_sample(const LimitCdf& c, RandomStream& rng, std::size_t count);

/// Reversed Weibull law Psi_a(x) = exp(-(-x)^a) for x < 0, 1 otherwise.
double reversed_weibull_cdf(double x, double shape);

}  // namespace evt
