#include <benchmark/benchmark.h>

#include <numbers>

#include "bifurcade/center_manifold.hpp"
#include "bifurcade/conley.hpp"
#include "bifurcade/continuation.hpp"

using namespace bifurcade;

namespace {

SpectralModel ch(int modes) { return build_cahn_hilliard_1d(std::numbers::pi, 0.5, 1.0, modes); }

void BM_VectorField(benchmark::State& state) {
  const auto m = ch(static_cast<int>(state.range(0)));
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(m.dim(), 0.2, -0.1);
  for (auto _ : state) benchmark::DoNotOptimize(vector_field(m, 1.5, a));
}
BENCHMARK(BM_VectorField)->Arg(4)->Arg(8)->Arg(16);

void BM_Jacobian(benchmark::State& state) {
  const auto m = ch(static_cast<int>(state.range(0)));
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(m.dim(), 0.2, -0.1);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(m, 1.5, a));
}
BENCHMARK(BM_Jacobian)->Arg(4)->Arg(8)->Arg(16);

void BM_Reduce(benchmark::State& state) {
  const auto m = ch(8);
  const auto c = crossing_data(m, 1.0);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reduce(m, c, order));
}
BENCHMARK(BM_Reduce)->DenseRange(2, 5);

void BM_RelativeBetti(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const Field saddle = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(2);
    v << x[0], -x[1];
    return v;
  };
  const auto block = build_isolating_block(saddle, make_box({-1.0, -1.0}, {1.0, 1.0}), {g, g});
  for (auto _ : state) benchmark::DoNotOptimize(relative_betti(block));
}
BENCHMARK(BM_RelativeBetti)->RangeMultiplier(2)->Range(4, 32);

void BM_ContinueBranch(benchmark::State& state) {
  const auto m = ch(8);
  const auto c = crossing_data(m, 1.0);
  const auto sw = switch_branch(m, c, 0.05);
  const Window w{0.0, static_cast<double>(state.range(0)), 50.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(continue_branch(m, BranchStart{sw.lambda, sw.a, 1.0, c.center_modes, 1}, w));
}
BENCHMARK(BM_ContinueBranch)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
