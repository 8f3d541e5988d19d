#include <benchmark/benchmark.h>

#include "evt/distributions.hpp"
#include "evt/fitpipe.hpp"
#include "evt/mc.hpp"
#include "evt/parallel.hpp"

using namespace evt;

namespace {

ExperimentConfig study(std::size_t reps) {
  ArrayModel m{LogPolySeq::identity(), parse_sequence("n^-1 * log(n)"), parse_sequence("log(n+1)"),
               WeibullParams(1.0, 1.0), TailParams::pareto(1.5, 0.1)};
  const Normalization norm = Normalization::const1(m.weibull, m.k);
  return {m, 1000.0, reps, 1, norm};
}

std::vector<double> mixture(std::size_t n) {
  RandomStream rng(3);
  return mixture_sample(MixtureSpec(0.05, WeibullParams(1.0, 1.3), TailParams::pareto(2.6, 4.0)), rng, n);
}

void BM_SimulateMaxima(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const ExperimentConfig cfg = study(1000);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_maxima(cfg).raw.data());
}

void BM_SimulateMaximaSerial(benchmark::State& state) {
  const ExperimentConfig cfg = study(1000);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_maxima_serial(cfg).raw.data());
}

void BM_Separation(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const std::vector<double> x = mixture(5000);
  for (auto _ : state) benchmark::DoNotOptimize(separate_components(x).eps_hat);
}

void BM_SeparationSerial(benchmark::State& state) {
  const std::vector<double> x = mixture(5000);
  for (auto _ : state) benchmark::DoNotOptimize(separate_components_serial(x).eps_hat);
}

}  // namespace

BENCHMARK(BM_SimulateMaxima)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateMaximaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Separation)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparationSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
