#include <gtest/gtest.h>

#include <algorithm>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "evt/distributions.hpp"
#include "evt/gof.hpp"

using namespace evt;

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

double big_weibull_cdf(const char* x, const char* lambda, const char* tau) {
  const Big bx(x), bl(lambda), bt(tau);
  return static_cast<double>(Big(1) - exp(-bl * pow(bx, bt)));
}

// Survival of l(x) = ct log(1+x)^p tails, written out from the definition.
double oracle_log_tail_survival(double x, double alpha, double m, double p) {
  const double ct = std::pow(m, alpha) / std::pow(std::log1p(m), p);
  return std::pow(x, -alpha) * ct * std::pow(std::log1p(x), p);
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MixtureSpec table2_spec(double eps, TruncationSpec t = TruncationSpec::none()) {
  return MixtureSpec(eps, WeibullParams(1.0, 1.0), TailParams::pareto(1.5, 0.1), t);
}

}  // namespace

TEST(Weibull, ClosedFormValues) {
  EXPECT_NEAR(weibull_cdf(1.0, {1.0, 1.0}), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(weibull_cdf(1.0, {1.0, 1.0}), 0.6321206, 1e-7);
  EXPECT_EQ(weibull_cdf(0.0, {2.5, 0.7}), 0.0);
  EXPECT_THROW(weibull_cdf(-0.1, {1.0, 1.0}), DomainError);
}

TEST(Weibull, MatchesHighPrecisionAtSmallArgument) {
  const double want = big_weibull_cdf("0.01", "0.003", "1.278");
  const double got = weibull_cdf(0.01, {0.003, 1.278});
  EXPECT_NEAR(got, want, 1e-15 * want);
}

TEST(Weibull, RejectsNonPositiveParameters) {
  EXPECT_THROW(WeibullParams(0.0, 1.0), DomainError);
  EXPECT_THROW(WeibullParams(1.0, -1.0), DomainError);
}

TEST(Weibull, QuantileRoundTrip) {
  const WeibullParams w(0.003, 1.278);
  for (double p : {1e-9, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
    EXPECT_NEAR(weibull_cdf(weibull_quantile(p, w), w), p, 1e-12);
  }
  for (double x : {1e-3, 0.5, 3.0, 250.0}) {
    EXPECT_NEAR(weibull_upper_quantile(weibull_survival(x, w), w), x, 1e-9 * x);
  }
}

TEST(RegularlyVarying, ParetoValues) {
  const TailParams std_pareto = TailParams::pareto(1.0, 1.0);
  EXPECT_DOUBLE_EQ(rv_cdf(2.0, std_pareto), 0.5);
  EXPECT_EQ(rv_cdf(1.0, std_pareto), 0.0);
  EXPECT_EQ(rv_cdf(0.5, std_pareto), 0.0);
  const TailParams t = TailParams::pareto(1.5, 0.1);
  EXPECT_NEAR(rv_cdf(0.2, t), 1.0 - std::pow(2.0, -1.5), 1e-14);
  EXPECT_NEAR(rv_cdf(0.2, t), 0.64645, 1e-5);
  EXPECT_DOUBLE_EQ(t.sv().ctilde, std::pow(0.1, 1.5));
}

TEST(RegularlyVarying, ParetoQuantiles) {
  EXPECT_NEAR(rv_quantile(0.5, TailParams::pareto(1.0, 1.0)), 2.0, 1e-12);
  EXPECT_NEAR(rv_quantile(1.0 - 1.0 / 100.0, TailParams::pareto(2.0, 1.0)), 10.0, 1e-10);
  EXPECT_DOUBLE_EQ(rv_quantile(0.0, TailParams::pareto(2.0, 3.0)), 3.0);
  EXPECT_THROW(rv_quantile(1.0, TailParams::pareto(2.0, 1.0)), DomainError);
}

TEST(RegularlyVarying, LogPowerQuantileMatchesBisectionOracle) {
  const TailParams t = TailParams::from_left_endpoint(1.5, 1.0, SlowVarySpec::Form::LogPow, 1.0);
  const double want = bisect(
      [](double lx) { return oracle_log_tail_survival(std::exp(lx), 1.5, 1.0, 1.0) - 0.01; }, 0.0,
      50.0);
  EXPECT_NEAR(rv_quantile(0.99, t), std::exp(want), 1e-10 * std::exp(want));
  EXPECT_NEAR(rv_cdf(rv_quantile(0.99, t), t), 0.99, 1e-12);
}

TEST(RegularlyVarying, LeftEndpointPinsScale) {
  for (double p : {-1.0, 0.5, 2.0}) {
    const TailParams t = TailParams::from_left_endpoint(2.0, 1.5, SlowVarySpec::Form::LogPow, p);
    EXPECT_NEAR(t.survival(1.5), 1.0, 1e-14);
    EXPECT_NEAR(t.survival(10.0), oracle_log_tail_survival(10.0, 2.0, 1.5, p), 1e-14);
  }
  const TailParams s = TailParams::from_scale(2.0, SlowVarySpec::constant(4.0));
  EXPECT_NEAR(s.m(), 2.0, 1e-12);
}

TEST(RegularlyVarying, TailClassFollowsSign) {
  EXPECT_EQ(SlowVarySpec::log_pow(1.0, -0.5).tail_class(), TailClass::Zero);
  EXPECT_EQ(SlowVarySpec::constant(2.0).tail_class(), TailClass::Const);
  EXPECT_EQ(SlowVarySpec::log_pow(1.0, 0.5).tail_class(), TailClass::Infinite);
}

TEST(RegularlyVarying, RejectsNonMonotoneTail) {
  // A large log power with a small alpha makes x^-alpha log(1+x)^p increase just above m.
  EXPECT_THROW(TailParams::from_left_endpoint(0.1, 0.5, SlowVarySpec::Form::LogPow, 5.0),
               DomainError);
  EXPECT_THROW(TailParams::pareto(0.0, 1.0), DomainError);
  EXPECT_THROW(TailParams::pareto(1.0, -1.0), DomainError);
}

TEST(RegularlyVarying, CdfQuantileRoundTripConstTail) {
  const TailParams unit = TailParams::pareto(1.0, 0.1);
  for (double r = 1.0; r <= 1e6; r *= 3.7) {
    const double x = 0.1 * r;
    EXPECT_NEAR(rv_quantile(rv_cdf(x, unit), unit), x, 1e-9 * x) << x;
  }
  // Through the survival function the round trip is exact over the whole range
  // for heavier exponents too; through the CDF it loses digits to 1 - F.
  for (double alpha : {1.5, 2.6}) {
    const TailParams t = TailParams::pareto(alpha, 0.1);
    for (double r = 1.0; r <= 1e6; r *= 3.7) {
      const double x = 0.1 * r;
      EXPECT_NEAR(rv_upper_quantile(t.survival(x), t), x, 1e-9 * x) << x;
    }
  }
}

TEST(Truncated, ClosedFormAndEndpoints) {
  const TailParams t = TailParams::pareto(1.0, 1.0);
  EXPECT_NEAR(trunc_rv_cdf(2.0, t, 4.0), 2.0 / 3.0, 1e-14);
  EXPECT_EQ(trunc_rv_cdf(4.0, t, 4.0), 1.0);
  EXPECT_EQ(trunc_rv_cdf(1.0, t, 4.0), 0.0);
  EXPECT_EQ(trunc_rv_cdf(9.0, t, 4.0), 1.0);
  EXPECT_THROW(trunc_rv_cdf(2.0, t, 1.0), DomainError);
  for (double p : {0.01, 0.5, 0.99}) {
    EXPECT_NEAR(trunc_rv_cdf(trunc_rv_quantile(p, t, 4.0), t, 4.0), p, 1e-12);
  }
}

TEST(Mixture, TwoTermValue) {
  const double want = 0.95 * (1.0 - std::exp(-1.0)) + 0.05 * (1.0 - std::pow(10.0, -1.5));
  EXPECT_NEAR(mixture_cdf(1.0, table2_spec(0.05)), want, 1e-15);
  EXPECT_EQ(mixture_cdf(0.0, table2_spec(0.05)), 0.0);
  EXPECT_EQ(mixture_cdf(-3.0, table2_spec(0.05)), 0.0);
}

TEST(Mixture, WeightLimits) {
  for (double x : {0.05, 0.3, 2.0, 7.0}) {
    EXPECT_NEAR(mixture_cdf(x, table2_spec(1e-12)), weibull_cdf(x, {1.0, 1.0}), 1e-11);
    EXPECT_NEAR(mixture_cdf(x, table2_spec(1.0 - 1e-12)), rv_cdf(x, TailParams::pareto(1.5, 0.1)),
                1e-11);
  }
  EXPECT_THROW(table2_spec(0.0), DomainError);
  EXPECT_THROW(table2_spec(1.0), DomainError);
  EXPECT_THROW(table2_spec(0.1, TruncationSpec::at(0.05)), DomainError);
}

TEST(Mixture, TruncationOnlyActsAboveM) {
  const MixtureSpec plain = table2_spec(0.2);
  const MixtureSpec cut = table2_spec(0.2, TruncationSpec::at(3.0));
  for (double x : {0.01, 0.05, 0.1}) EXPECT_DOUBLE_EQ(mixture_cdf(x, cut), mixture_cdf(x, plain));
  for (double x : {3.0, 4.0, 50.0}) {
    EXPECT_NEAR(mixture_cdf(x, cut), 0.8 * weibull_cdf(x, {1.0, 1.0}) + 0.2, 1e-15);
  }
}

TEST(Mixture, CdfIsMonotoneAndBounded) {
  const std::vector<MixtureSpec> specs = {
      table2_spec(0.05), table2_spec(0.4, TruncationSpec::at(2.0)),
      MixtureSpec(0.1, WeibullParams(0.5, 2.0),
                  TailParams::from_left_endpoint(2.0, 1.0, SlowVarySpec::Form::LogPow, 1.0))};
  for (const auto& s : specs) {
    double prev = 0.0;
    for (double x = 0.0; x < 100.0; x += 0.01) {
      const double f = mixture_cdf(x, s);
      ASSERT_GE(f, prev);
      ASSERT_LE(f, 1.0);
      prev = f;
    }
  }
}

TEST(Mixture, SamplerBasics) {
  RandomStream rng(5);
  EXPECT_TRUE(mixture_sample(table2_spec(0.05), rng, 0).empty());
  RandomStream a(11), b(11);
  EXPECT_EQ(mixture_sample(table2_spec(0.05), a, 100), mixture_sample(table2_spec(0.05), b, 100));
}

TEST(Mixture, ImpurityFractionWithinBinomialBound) {
  // With m = 50 the components do not overlap in practice: P(Exp(1) > 50) = e^-50.
  const MixtureSpec s(0.05, WeibullParams(1.0, 1.0), TailParams::pareto(1.5, 50.0));
  RandomStream rng(2024);
  const auto xs = mixture_sample(s, rng, 1'000'000);
  const double frac =
      std::count_if(xs.begin(), xs.end(), [](double x) { return x >= 50.0; }) / 1e6;
  EXPECT_NEAR(frac, 0.05, 4.0 * std::sqrt(0.05 * 0.95 / 1e6));
}

TEST(Mixture, PureWeibullDrawsPassKs) {
  const MixtureSpec s = table2_spec(1e-12);
  RandomStream rng(99);
  const auto xs = mixture_sample(s, rng, 100'000);
  const KsResult ks = ks_test(xs, [](double x) { return weibull_cdf(std::max(x, 0.0), {1.0, 1.0}); });
  EXPECT_GT(ks.pvalue, 0.01);
}

TEST(Mixture, EcdfWithinDkwBoundAcrossSeeds) {
  const MixtureSpec s = table2_spec(0.3, TruncationSpec::at(5.0));
  const std::size_t n = 20'000;
  const double bound = dkw_bound(n, 1e-3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomStream rng(seed);
    const auto xs = mixture_sample(s, rng, n);
    EXPECT_LE(ks_statistic(xs, [&](double x) { return mixture_cdf(x, s); }), bound) << seed;
  }
}
