#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "evt/distributions.hpp"
#include "evt/regimes.hpp"
#include "evt/sequences.hpp"

namespace evt {

/// Triangular array X_nj ~ F(x; eps_n, M_n, theta), j = 1..k_n.
struct ArrayModel {
  LogPolySeq k;
  LogPolySeq eps;
  std::optional<LogPolySeq> M;
  WeibullParams weibull;
  TailParams tail;

  RegimeInputs regime_inputs() const;
};

/// One row of the array.
struct Row {
  MixtureSpec spec;
  std::uint64_t k_n;
  bool eps_clipped = false;
};

/// eps_n >= 1 is clipped just below 1 and flagged.
Row row_at(const ArrayModel& model, double n);

struct ExperimentConfig {
  ArrayModel model;
  double n;
  std::size_t replicates;
  std::uint64_t seed;
  Normalization norm;
};

struct MaximaBatch {
  std::vector<double> raw;
  std::vector<double> normalized;
  double n;
  std::uint64_t seed;
  std::uint64_t k_n;
  std::vector<std::string> warnings;
};

/// Row maxima, replicate j drawn from substream (seed, j). Parallel over
/// replicates; output does not depend on the worker count.
MaximaBatch simulate_maxima(const ExperimentConfig& cfg);

/// Reference implementation: materialises every draw through mixture_sample
/// and takes the maximum, one replicate after another.
MaximaBatch simulate_maxima_serial(const ExperimentConfig& cfg);

/// Maxima of `count` iid draws given by an upper quantile x(q), q in (0, 1].
std::vector<double> simulate_iid_maxima(const std::function<double(double)>& upper_quantile,
                                        std::uint64_t count, std::size_t replicates,
                                        std::uint64_t seed);

/// P(max_{j<=k_n} X_nj <= s_n x + c_n) = F(v_n(x))^k_n.
double exact_max_cdf(const MixtureSpec& spec, double k_n, double x, const Normalization& norm,
                     double n);
/// Inverse of exact_max_cdf in x, by bisection.
double exact_max_quantile(const MixtureSpec& spec, double k_n, double p, const Normalization& norm,
                          double n);

double empirical_cdf(std::span<const double> sorted, double x);
double empirical_cdf(const MaximaBatch& batch, double x);

/// sup over the grid of |F - G|; at each point of `atoms` G's left limit is also compared.
double sup_distance(const std::function<double(double)>& f, const std::function<double(double)>& g,
                    std::span<const double> grid, std::span<const double> atoms = {},
                    const std::function<double(double)>& g_left = {});

std::vector<double> linspace(double lo, double hi, std::size_t count);

/// KS distance between the exact finite-n law of the normalised maximum and a
/// (right-continuous) limit law.
double exact_limit_distance(const Row& row, const Normalization& norm, double n,
                            const LimitLaw& law, std::size_t grid_points = 4001);

void write_batch_csv(const MaximaBatch& batch, std::ostream& out);

}  // namespace evt
