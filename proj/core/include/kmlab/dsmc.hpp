#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kmlab/ensemble.hpp"
#include "kmlab/kernels.hpp"
#include "kmlab/moment_table.hpp"
#include "kmlab/rng.hpp"
#include "kmlab/special_fn.hpp"

namespace kmlab {

struct GaussianComponent {
    double weight = 1.0;
    std::vector<double> mean;    ///< size d (empty means the origin)
    std::vector<double> stddev{1.0};  ///< per-axis, size d or 1 (isotropic)
};

struct InitialLaw {
    enum class Kind { GaussianMixture, UniformBall, PointMasses };

    Kind kind = Kind::GaussianMixture;
    std::vector<GaussianComponent> components{GaussianComponent{}};
    double radius = 1.0;
    /// Particles are assigned to the points cyclically.
    std::vector<std::vector<double>> points;

    static InitialLaw gaussian(double stddev = 1.0);
    static InitialLaw uniform_ball(double radius);
    static InitialLaw point_masses(std::vector<std::vector<double>> points);
};

struct Diagnostics {
    std::vector<int> orders{2, 4};  ///< even polynomial orders 2q
    std::vector<MLSpec> exp_specs;  ///< stretched exponential moments
    std::vector<MLSpec> ml_specs;   ///< Mittag-Leffler moments
    double cadence = 0.0;           ///< time between rows; 0 records only t = 0 and t_end
    bool component_moments = false; ///< add var0..var{d-1}
};

struct ScenarioConfig {
    AngularKernel kernel = AngularKernel::kac_constant(1.0);
    std::size_t n = 10000;
    /// 0 selects the largest power of two not above max_collision_probability / total_rate.
    double dt = 0.0;
    double max_collision_probability = 0.5;
    double t_end = 1.0;
    InitialLaw initial;
    Diagnostics diagnostics;
    int max_order = 16;  ///< cap on diagnostic orders (2 Q_max)
    std::uint64_t seed = 1;
    /// Worker count; 0 reads KM_THREADS (default 1).
    unsigned threads = 0;

    Family model() const noexcept { return kernel.family(); }
    int dimension() const noexcept { return kernel.dimension(); }
};

/// Throws ConfigError on an invalid configuration; returns dt with the
/// default rule applied.
double validate_scenario(const ScenarioConfig& config);

/// Worker count from KM_THREADS (unset or invalid gives 1).
unsigned threads_from_env();

ParticleEnsemble init_ensemble(const ScenarioConfig& config, Rng& rng);
/// Samples the initial law from the generator reserved for initialization.
ParticleEnsemble init_ensemble(const ScenarioConfig& config);

/// Collision sampler bound to a kernel, precomputed once per run.
class CollisionStepper {
public:
    CollisionStepper(const AngularKernel& kernel, double dt, unsigned threads = 1);

    double dt() const noexcept { return dt_; }
    double collision_probability() const noexcept { return probability_; }

    /// One Nanbu step: random disjoint pairing, per-pair Bernoulli collision.
    /// Randomness is derived from (ens.seed, ens.step); results do not depend
    /// on the thread count.
    void operator()(ParticleEnsemble& ens) const;

    static constexpr std::size_t kPairsPerBlock = 4096;

private:
    void collide_block(ParticleEnsemble& ens, const std::vector<std::uint32_t>& order,
                       std::size_t block) const;

    AngularKernel kernel_;
    AngleSampler sampler_;
    double dt_;
    double probability_;
    unsigned threads_;
};

void step(ParticleEnsemble& ens, const AngularKernel& kernel, double dt);

struct RunResult {
    MomentTable table;
    ParticleEnsemble final_state;
};

MomentTable make_table(const ScenarioConfig& config);
std::vector<MomentCell> measure(const ParticleEnsemble& ens, const ScenarioConfig& config);

/// Fresh run from t = 0 to t_end.
RunResult run(const ScenarioConfig& config);
/// Continues `state` to config.t_end on the same step grid; the first row is
/// the state it starts from.
RunResult run(const ScenarioConfig& config, ParticleEnsemble state);

}  // namespace kmlab
