#include "kmlab/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include "kmlab/collisions.hpp"
#include "kmlab/errors.hpp"
#include "kmlab/moments.hpp"

namespace kmlab {

namespace {

constexpr std::uint64_t kInitStream = 0xffffffffffffffffull;
constexpr double kDefaultDtWithoutCollisions = 0.01;

double collision_rate(const AngularKernel& kernel)
{
    if (kernel.level() == 0.0) return 0.0;
    return total_rate(kernel);
}

std::uint64_t step_count(double t, double dt) { return static_cast<std::uint64_t>(std::llround(t / dt)); }

}  // namespace

InitialLaw InitialLaw::gaussian(double stddev)
{
    InitialLaw law;
    law.components = {GaussianComponent{1.0, {}, {stddev}}};
    return law;
}

InitialLaw InitialLaw::uniform_ball(double radius)
{
    InitialLaw law;
    law.kind = Kind::UniformBall;
    law.radius = radius;
    return law;
}

InitialLaw InitialLaw::point_masses(std::vector<std::vector<double>> points)
{
    InitialLaw law;
    law.kind = Kind::PointMasses;
    law.points = std::move(points);
    return law;
}

unsigned threads_from_env()
{
    const char* env = std::getenv("KM_THREADS");
    if (env == nullptr) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<unsigned>(std::min<long>(v, 256));
}

double validate_scenario(const ScenarioConfig& config)
{
    const int d = config.dimension();
    if (config.model() == Family::Boltzmann && d != 2 && d != 3) {
        throw ConfigError("Boltzmann simulations support d = 2 or 3, got d = " + std::to_string(d));
    }
    if (config.kernel.is_unbounded()) {
        throw ConfigError("untruncated singular kernel: set theta_min > 0 for simulation");
    }
    if (config.n < 2 || config.n % 2 != 0) {
        throw ConfigError("particle count must be even and at least 2, got " + std::to_string(config.n));
    }
    if (config.n > 0xffffffffull) throw ConfigError("particle count exceeds 2^32 - 1");
    if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be >= 0");
    if (!(config.max_collision_probability > 0.0 && config.max_collision_probability <= 1.0)) {
        throw ConfigError("max_collision_probability must lie in (0, 1]");
    }
    if (config.dt < 0.0 || !std::isfinite(config.dt)) throw ConfigError("dt must be > 0");

    const double rate = collision_rate(config.kernel);
    double dt = config.dt;
    if (dt == 0.0) {
        // largest power of two under the probability cap: independent of t_end, so a
        // resumed run keeps the same grid, and dyadic output times land on steps
        const double cap = rate > 0.0 ? config.max_collision_probability / rate : kDefaultDtWithoutCollisions;
        dt = std::exp2(std::floor(std::log2(cap)));
    }
    if (dt * rate > config.max_collision_probability * (1.0 + 1e-12)) {
        throw ConfigError("dt * total_rate = " + std::to_string(dt * rate) + " exceeds " +
                          std::to_string(config.max_collision_probability));
    }

    const auto& diag = config.diagnostics;
    for (int order : diag.orders) {
        if (order < 0 || order % 2 != 0 || order > config.max_order) {
            throw ConfigError("diagnostic order " + std::to_string(order) +
                              " must be even and within [0, " + std::to_string(config.max_order) + "]");
        }
    }
    if (!(diag.cadence >= 0.0)) throw ConfigError("diagnostic cadence must be >= 0");

    const InitialLaw& law = config.initial;
    switch (law.kind) {
    case InitialLaw::Kind::GaussianMixture: {
        if (law.components.empty()) throw ConfigError("Gaussian mixture needs at least one component");
        double total = 0.0;
        for (const auto& c : law.components) {
            if (!(c.weight > 0.0)) throw ConfigError("mixture weights must be positive");
            if (!c.mean.empty() && c.mean.size() != static_cast<std::size_t>(d)) {
                throw ConfigError("mixture mean has wrong dimension");
            }
            if (c.stddev.size() != 1 && c.stddev.size() != static_cast<std::size_t>(d)) {
                throw ConfigError("mixture stddev must have 1 or d entries");
            }
            for (double s : c.stddev) {
                if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("mixture stddev must be >= 0");
            }
            total += c.weight;
        }
        if (!std::isfinite(total)) throw ConfigError("mixture weights must be finite");
        break;
    }
    case InitialLaw::Kind::UniformBall:
        if (!(law.radius > 0.0) || !std::isfinite(law.radius)) throw ConfigError("ball radius must be > 0");
        break;
    case InitialLaw::Kind::PointMasses:
        if (law.points.empty()) throw ConfigError("point masses need at least one point");
        for (const auto& p : law.points) {
            if (p.size() != static_cast<std::size_t>(d)) throw ConfigError("point mass has wrong dimension");
            for (double x : p) {
                if (!std::isfinite(x)) throw ConfigError("point mass must be finite");
            }
        }
        break;
    }
    return dt;
}

ParticleEnsemble init_ensemble(const ScenarioConfig& config, Rng& rng)
{
    validate_scenario(config);
    const int d = config.dimension();
    const auto du = static_cast<std::size_t>(d);
    ParticleEnsemble ens;
    ens.d = d;
    ens.seed = config.seed;
    ens.velocities.resize(config.n * du);

    const InitialLaw& law = config.initial;
    switch (law.kind) {
    case InitialLaw::Kind::GaussianMixture: {
        std::vector<double> cumulative;
        double total = 0.0;
        for (const auto& c : law.components) cumulative.push_back(total += c.weight);
        for (std::size_t i = 0; i < config.n; ++i) {
            std::size_t j = 0;
            if (cumulative.size() > 1) {
                const double u = rng.uniform() * total;
                j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                             cumulative.begin());
                j = std::min(j, cumulative.size() - 1);
            }
            const auto& c = law.components[j];
            auto v = ens.particle(i);
            for (std::size_t k = 0; k < du; ++k) {
                const double mu = c.mean.empty() ? 0.0 : c.mean[k];
                const double sd = c.stddev.size() == 1 ? c.stddev[0] : c.stddev[k];
                v[k] = mu + sd * rng.normal();
            }
        }
        break;
    }
    case InitialLaw::Kind::UniformBall:
        for (std::size_t i = 0; i < config.n; ++i) {
            auto v = ens.particle(i);
            if (d == 1) {
                v[0] = law.radius * (2.0 * rng.uniform() - 1.0);
                continue;
            }
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (auto& x : v) {
                    x = rng.normal();
                    norm2 += x * x;
                }
            } while (norm2 == 0.0);
            const double r = law.radius * std::pow(rng.uniform(), 1.0 / d) / std::sqrt(norm2);
            for (auto& x : v) x *= r;
        }
        break;
    case InitialLaw::Kind::PointMasses:
        for (std::size_t i = 0; i < config.n; ++i) {
            const auto& p = law.points[i % law.points.size()];
            std::copy(p.begin(), p.end(), ens.particle(i).begin());
        }
        break;
    }
    return ens;
}

ParticleEnsemble init_ensemble(const ScenarioConfig& config)
{
    Rng rng = Rng::substream(config.seed, kInitStream, 0);
    return init_ensemble(config, rng);
}

CollisionStepper::CollisionStepper(const AngularKernel& kernel, double dt, unsigned threads)
    : kernel_(kernel), sampler_(kernel), dt_(dt), threads_(std::max(threads, 1u))
{
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (kernel.level() == 0.0) {
        probability_ = 0.0;
        return;
    }
    if (kernel.is_unbounded()) throw ConfigError("untruncated singular kernel: set theta_min > 0 for simulation");
    probability_ = dt * total_rate(kernel);
    if (probability_ > 1.0) {
        throw ConfigError("collision probability dt * total_rate = " + std::to_string(probability_) +
                          " exceeds 1");
    }
}

void CollisionStepper::collide_block(ParticleEnsemble& ens, const std::vector<std::uint32_t>& order,
                                     std::size_t block) const
{
    const std::size_t pairs = order.size() / 2;
    const std::size_t lo = block * kPairsPerBlock;
    const std::size_t hi = std::min(pairs, lo + kPairsPerBlock);
    Rng rng = Rng::substream(ens.seed, ens.step, 1 + block);
    const bool kac = kernel_.family() == Family::Kac;
    const auto d = static_cast<std::size_t>(ens.d);

    for (std::size_t p = lo; p < hi; ++p) {
        if (!(rng.uniform() < probability_)) continue;
        const AngleSample angle = sampler_(rng);
        const std::size_t i = order[2 * p];
        const std::size_t j = order[2 * p + 1];
        if (kac) {
            kac_collide_inplace(ens.velocities[i], ens.velocities[j], angle.theta);
            continue;
        }
        auto v = ens.particle(i);
        auto w = ens.particle(j);
        double u[3];
        double norm2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            u[k] = v[k] - w[k];
            norm2 += u[k] * u[k];
        }
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t k = 0; k < d; ++k) u[k] *= inv;
        double sigma[3];
        scattering_direction(std::span<const double>(u, d), angle.theta, angle.phi,
                             std::span<double>(sigma, d));
        boltzmann_collide_inplace(v, w, std::span<const double>(sigma, d));
    }
}

void CollisionStepper::operator()(ParticleEnsemble& ens) const
{
    const std::size_t n = ens.size();
    if (n < 2 || n % 2 != 0) throw ConfigError("particle count must be even and at least 2");
    if (ens.d != kernel_.dimension()) throw ConfigError("ensemble dimension does not match the kernel");

    if (probability_ > 0.0) {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        Rng shuffle = Rng::substream(ens.seed, ens.step, 0);
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[shuffle.below(i + 1)]);
        }
        const std::size_t blocks = (n / 2 + kPairsPerBlock - 1) / kPairsPerBlock;
        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, blocks));
        if (workers <= 1) {
            for (std::size_t b = 0; b < blocks; ++b) collide_block(ens, order, b);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < workers; ++t) {
                pool.emplace_back([&, t] {
                    for (std::size_t b = t; b < blocks; b += workers) collide_block(ens, order, b);
                });
            }
            for (auto& th : pool) th.join();
        }
    }
    ++ens.step;
    ens.time = static_cast<double>(ens.step) * dt_;
}

void step(ParticleEnsemble& ens, const AngularKernel& kernel, double dt)
{
    CollisionStepper(kernel, dt)(ens);
}

MomentTable make_table(const ScenarioConfig& config)
{
    std::vector<std::string> keys;
    for (int order : config.diagnostics.orders) keys.push_back(order_key(order));
    for (const auto& spec : config.diagnostics.exp_specs) keys.push_back(exp_key(spec));
    for (const auto& spec : config.diagnostics.ml_specs) keys.push_back(ml_key(spec));
    if (config.diagnostics.component_moments) {
        for (int k = 0; k < config.dimension(); ++k) keys.push_back("var" + std::to_string(k));
    }
    return MomentTable(std::move(keys));
}

std::vector<MomentCell> measure(const ParticleEnsemble& ens, const ScenarioConfig& config)
{
    std::vector<MomentCell> cells;
    auto push = [&cells](const MomentEstimate& e) { cells.push_back({e.value, e.std_err, e.degraded}); };
    for (int order : config.diagnostics.orders) push(poly_moment(ens, order));
    for (const auto& spec : config.diagnostics.exp_specs) push(stretched_exp_moment(ens, spec));
    for (const auto& spec : config.diagnostics.ml_specs) push(ml_moment(ens, spec));
    if (config.diagnostics.component_moments) {
        for (double m : component_second_moments(ens)) cells.push_back({m, 0.0, false});
    }
    return cells;
}

RunResult run(const ScenarioConfig& config)
{
    return run(config, init_ensemble(config));
}

RunResult run(const ScenarioConfig& config, ParticleEnsemble state)
{
    const double dt = validate_scenario(config);
    if (state.d != config.dimension()) throw ConfigError("snapshot dimension does not match the config");
    if (state.size() < 2 || state.size() % 2 != 0) throw ConfigError("snapshot particle count must be even");

    const unsigned threads = config.threads == 0 ? threads_from_env() : config.threads;
    const CollisionStepper stepper(config.kernel, dt, threads);
    const std::uint64_t total = step_count(config.t_end, dt);
    const std::uint64_t cadence =
        config.diagnostics.cadence > 0.0 ? std::max<std::uint64_t>(1, step_count(config.diagnostics.cadence, dt))
                                         : std::max<std::uint64_t>(total, 1);

    RunResult result{make_table(config), {}};
    result.table.add_row(state.time, measure(state, config));
    while (state.step < total) {
        stepper(state);
        if (state.step % cadence == 0 || state.step == total) {
            result.table.add_row(state.time, measure(state, config));
        }
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace kmlab
