#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "kmlab/collisions.hpp"
#include "kmlab/rng.hpp"

namespace {

void BM_KacCollide(benchmark::State& state)
{
    kmlab::Rng rng(1);
    double v = rng.normal();
    double w = rng.normal();
    for (auto _ : state) {
        kmlab::kac_collide_inplace(v, w, rng.uniform(-std::numbers::pi, std::numbers::pi));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_KacCollide);

void BM_BoltzmannCollide3(benchmark::State& state)
{
    kmlab::Rng rng(2);
    double v[3] = {1.0, 0.2, -0.3};
    double w[3] = {-0.5, 0.7, 0.1};
    double u[3];
    double sigma[3];
    for (auto _ : state) {
        double n2 = 0.0;
        for (int j = 0; j < 3; ++j) {
            u[j] = v[j] - w[j];
            n2 += u[j] * u[j];
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (double& x : u) x *= inv;
        kmlab::scattering_direction(u, rng.uniform(0, std::numbers::pi), rng.uniform(0, 2 * std::numbers::pi), sigma);
        kmlab::boltzmann_collide_inplace(v, w, sigma);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_BoltzmannCollide3);

}  // namespace
