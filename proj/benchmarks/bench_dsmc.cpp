#include <benchmark/benchmark.h>

#include "kmlab/config.hpp"
#include "kmlab/dsmc.hpp"

namespace {

void BM_DsmcStep(benchmark::State& state)
{
    kmlab::ScenarioConfig sc;
    sc.kernel = state.range(1) == 1 ? kmlab::AngularKernel::kac_constant() : kmlab::AngularKernel::boltzmann_constant(3);
    sc.n = state.range(0);
    sc.seed = 3;
    kmlab::ParticleEnsemble ens = kmlab::init_ensemble(sc);
    const kmlab::CollisionStepper stepper(sc.kernel, kmlab::validate_scenario(sc), 1);
    for (auto _ : state) stepper(ens);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DsmcStep)->Args({10000, 1})->Args({10000, 3});

}  // namespace
