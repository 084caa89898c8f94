#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rhoflow/copula.hpp"
#include "rhoflow/flow.hpp"
#include "rhoflow/spline.hpp"

using namespace rhoflow;

namespace {

MonotoneTransformer jittered_spline() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.3);
  auto raw = identity_spline_raw();
  for (auto& v : raw) v += n(rng);
  return MonotoneTransformer::from_raw(raw);
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.5);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_SplineEvaluate(benchmark::State& state) {
  const auto t = jittered_spline();
  const auto xs = normals(1024, 2);
  for (auto _ : state) {
    double s = 0.0;
    for (double x : xs) s += t.evaluate(x).log_derivative;
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_SplineEvaluate);

void BM_SplineInverse(benchmark::State& state) {
  const auto t = jittered_spline();
  const auto ys = normals(1024, 3);
  for (auto _ : state) {
    double s = 0.0;
    for (double y : ys) s += t.inverse(y);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ys.size()));
}
BENCHMARK(BM_SplineInverse);

void BM_LogLikelihoodGradient(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  RhoGnfModel model(CopulaCorrelation(-0.5), VariableKind::continuous(), VariableKind::continuous(),
                    {32, 32}, 4);
  const auto a = normals(batch, 5);
  const auto y = normals(batch, 6);
  std::vector<double> grad(model.parameter_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood_gradient(model, a, y, grad, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_LogLikelihoodGradient)->Arg(64)->Arg(512);

void BM_NormalQuantile(benchmark::State& state) {
  std::vector<double> us(1024);
  for (std::size_t i = 0; i < us.size(); ++i) us[i] = (static_cast<double>(i) + 0.5) / 1024.0;
  for (auto _ : state) {
    double s = 0.0;
    for (double u : us) s += std_normal_quantile(u);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(us.size()));
}
BENCHMARK(BM_NormalQuantile);

}  // namespace
BENCHMARK_MAIN();
