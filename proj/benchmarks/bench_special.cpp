#include <benchmark/benchmark.h>

#include "kmlab/kernels.hpp"
#include "kmlab/special_fn.hpp"

namespace {

void BM_MittagLeffler(benchmark::State& state)
{
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kmlab::mittag_leffler(1.5, x));
}
BENCHMARK(BM_MittagLeffler)->Arg(1)->Arg(50)->Arg(500);

void BM_EpsilonQ(benchmark::State& state)
{
    const auto k = kmlab::AngularKernel::boltzmann_power(3, 1.0);
    const int q = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kmlab::epsilon_q(k, q));
}
BENCHMARK(BM_EpsilonQ)->Arg(4)->Arg(50)->Arg(200);

}  // namespace
