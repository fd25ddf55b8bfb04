#include "kmlab/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "kmlab/errors.hpp"
#include "kmlab/kernels.hpp"

namespace kmlab {

namespace {

double log_add(double x, double y)
{
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double log_cq(double m2_initial, const BoundConstants& k, int q)
{
    const double lm2 = std::log(m2_initial);
    const double lq = std::log(static_cast<double>(q) * (q - 1)) + (q - 2) * std::numbers::ln2;
    switch (k.variant) {
    case CqVariant::EpsilonFree:
        if (q < 2) return std::log(k.c) + lm2;
        return std::log(k.c) + log_add(lm2, lq);
    case CqVariant::EpsilonWeighted: {
        if (q < 2) return std::log(k.c) + lm2;
        if (k.eps.size() <= static_cast<std::size_t>(q)) {
            throw DomainError("cq_constant: eps missing for q = " + std::to_string(q));
        }
        const double e = k.eps[static_cast<std::size_t>(q)];
        const double cross = e > 0.0 ? std::log(4.0 * e) + lq : -std::numeric_limits<double>::infinity();
        return log_add(std::log(k.c) + lm2, cross);
    }
    case CqVariant::Rigorous:
        if (q < 2) return std::log(k.c) + lm2;
        return std::log(k.c) + lm2 + log_add(0.0, lq);
    }
    return 0.0;
}

}  // namespace

std::vector<double> epsilon_vector(const AngularKernel& kernel, int q_max)
{
    std::vector<double> eps(static_cast<std::size_t>(std::max(q_max, 1)) + 1, 0.0);
    for (int q = 2; q <= q_max; ++q) eps[static_cast<std::size_t>(q)] = epsilon_q(kernel, q);
    return eps;
}

void hierarchy_rhs(std::span<const double> m, double c, std::span<const double> eps, std::span<double> dm)
{
    const std::size_t n = m.size();
    if (dm.size() != n) throw DomainError("hierarchy_rhs: output size mismatch");
    for (std::size_t q = 0; q < std::min<std::size_t>(n, 2); ++q) dm[q] = 0.0;
    for (std::size_t q = 2; q < n; ++q) {
        if (eps.size() <= q) throw DomainError("hierarchy_rhs: eps missing for q = " + std::to_string(q));
        double cross = 0.0;
        const std::size_t kmax = (q + 1) / 2;
        for (std::size_t k = 1; k <= kmax; ++k) {
            const double binom = std::exp(log_binomial(static_cast<double>(q - 2), static_cast<double>(k - 1)));
            cross += binom * m[k] * m[q - k];
        }
        const double qd = static_cast<double>(q);
        dm[q] = -c * m[0] * m[q] + c * m[1] * m[q - 1] + c * qd * (qd - 1.0) * eps[q] * cross;
    }
}

std::vector<double> hierarchy_rhs(const HierarchyState& state)
{
    std::vector<double> dm(state.m.size());
    hierarchy_rhs(state.m, state.c, state.eps, dm);
    return dm;
}

Trajectory integrate_hierarchy(const HierarchyState& initial, std::span<const double> sample_times,
                               const IntegrationOptions& options)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    for (double x : initial.m) {
        if (!std::isfinite(x) || x < 0.0) throw DomainError("integrate_hierarchy: initial moments must be finite and >= 0");
    }
    if (initial.m.size() > 2 && initial.eps.size() < initial.m.size()) {
        throw DomainError("integrate_hierarchy: eps shorter than the moment vector");
    }

    const double c = initial.c;
    const std::vector<double>& eps = initial.eps;
    auto system = [c, &eps](const State& x, State& dxdt, double) { hierarchy_rhs(x, c, eps, dxdt); };

    auto stepper = odeint::make_controlled(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());

    Trajectory traj;
    State x = initial.m;
    double t = initial.t;
    double dt = options.initial_step;
    State backup;

    for (double target : sample_times) {
        if (target < t) throw DomainError("integrate_hierarchy: sample times must be increasing and >= t0");
        while (t < target) {
            if (traj.accepted_steps + traj.rejected_steps >= options.max_steps) {
                throw AccuracyError("integrate_hierarchy: step budget exhausted at t = " + std::to_string(t));
            }
            const bool last = dt >= target - t;
            double h = last ? target - t : dt;
            const double h_try = h;
            backup = x;
            const double t_before = t;
            if (stepper.try_step(system, x, t, h) == odeint::fail) {
                ++traj.rejected_steps;
                dt = h;
                continue;
            }
            if (std::any_of(x.begin(), x.end(), [](double v) { return v < 0.0; })) {
                x = backup;
                t = t_before;
                stepper.reset();
                dt = 0.5 * h_try;
                ++traj.rejected_steps;
                continue;
            }
            ++traj.accepted_steps;
            if (last && t_before + h_try == t) t = target;
            dt = std::max(h, 1e-300);
            if (std::any_of(x.begin(), x.end(), [&](double v) { return !(v <= options.blowup); })) {
                traj.blew_up = true;
                traj.blowup_time = t;
                return traj;
            }
        }
        traj.times.push_back(target);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory integrate_hierarchy(const HierarchyState& initial, double t_end, std::size_t n_samples,
                               const IntegrationOptions& options)
{
    if (!(t_end >= initial.t)) throw DomainError("integrate_hierarchy: t_end before the initial time");
    std::vector<double> times;
    const std::size_t n = std::max<std::size_t>(n_samples, 1);
    for (std::size_t i = 0; i <= n; ++i) {
        times.push_back(initial.t + (t_end - initial.t) * static_cast<double>(i) / static_cast<double>(n));
    }
    return integrate_hierarchy(initial, times, options);
}

double cq_constant(double m2_initial, const BoundConstants& constants, int q)
{
    if (q < 1) throw DomainError("cq_constant: q must be >= 1");
    if (constants.c == 0.0 && constants.variant != CqVariant::EpsilonWeighted) return 0.0;
    if (constants.c == 0.0) {
        const double e = q >= 2 ? constants.eps.at(static_cast<std::size_t>(q)) : 0.0;
        return q >= 2 ? 4.0 * q * (q - 1) * e * std::ldexp(1.0, q - 2) : 0.0;
    }
    return std::exp(log_cq(m2_initial, constants, q));
}

std::vector<double> log_uniform_bound(std::span<const double> log_m_init, const BoundConstants& constants)
{
    if (log_m_init.empty() || log_m_init[0] == -std::numeric_limits<double>::infinity()) {
        throw DomainError("uniform_bound: zero initial mass");
    }
    std::vector<double> out(log_m_init.begin(), log_m_init.end());
    if (constants.c == 0.0) return out;
    if (out.size() < 2) return out;
    const double lc_m0 = std::log(constants.c) + log_m_init[0];
    const double m2 = std::exp(log_m_init[1]);
    for (std::size_t q = 2; q < out.size(); ++q) {
        const double chained = log_cq(m2, constants, static_cast<int>(q)) - lc_m0 + out[q - 1];
        out[q] = std::max(log_m_init[q], chained);
    }
    return out;
}

std::vector<double> uniform_bound(std::span<const double> m_init, const BoundConstants& constants)
{
    std::vector<double> logs;
    for (double m : m_init) {
        if (m < 0.0) throw DomainError("uniform_bound: negative moment");
        logs.push_back(std::log(m));
    }
    auto out = log_uniform_bound(logs, constants);
    for (double& x : out) x = std::exp(x);
    return out;
}

double derivative_bound(std::span<const double> m_init, const BoundConstants& constants, int q)
{
    if (q < 1 || static_cast<std::size_t>(q) >= m_init.size()) {
        throw DomainError("derivative_bound: q out of range");
    }
    const auto cstar = uniform_bound(m_init.first(static_cast<std::size_t>(q)), constants);
    return cq_constant(m_init[1], constants, q) * cstar[static_cast<std::size_t>(q) - 1];
}

double beta_sum_constant(double a, int p_max)
{
    if (p_max < 3) throw DomainError("beta_sum_constant: p_max must be >= 3");
    double best = 0.0;
    for (int p = 3; p <= p_max; ++p) {
        best = std::max(best, std::pow(static_cast<double>(p), 1.0 + a) * beta_binomial_sum(a, p));
    }
    return best;
}

RecipeResult alpha_recipe(const RecipeInput& in)
{
    if (!(in.s > 0.0 && in.s < 2.0)) throw DomainError("alpha_recipe: s must lie in (0, 2)");
    if (!(in.M0 > 0.0) || !(in.alpha0 > 0.0)) throw DomainError("alpha_recipe: M0 and alpha0 must be positive");
    if (in.log_m_init.size() < 2) throw DomainError("alpha_recipe: need at least m_0 and m_2");
    if (!(in.constants.c > 0.0)) throw DomainError("alpha_recipe: kernel constant must be positive");

    const double a = 2.0 / in.s;
    RecipeResult res;
    res.admissible = in.s <= 4.0 / (2.0 + in.singularity_index) * (1.0 + 1e-12);
    res.c_a = in.c_a > 0.0 ? in.c_a : a * 2.0 * beta_sum_constant(a, 400);

    const double log_m0 = in.log_m_init[0];
    const double m0 = std::exp(log_m0);
    const double log_m2 = in.log_m_init[1];
    const double log_A2 = std::log(in.constants.c);
    const double log_M0 = std::log(in.M0);

    auto eps_at = [&in](int q) {
        const auto qi = static_cast<std::size_t>(q);
        if (qi < in.constants.eps.size()) return in.constants.eps[qi];
        if (in.epsilon) return in.epsilon(q);
        return std::numeric_limits<double>::quiet_NaN();
    };

    int q0 = 0;
    int q_last = 2;
    double worst = std::numeric_limits<double>::infinity();
    for (int q = 3; q <= in.q_max; ++q) {
        const double e = eps_at(q);
        if (std::isnan(e)) break;
        q_last = q;
        const double lhs = 4.0 * res.c_a * std::pow(static_cast<double>(q), 2.0 - a) * e * in.M0 * in.M0 /
                           (in.constants.c * m0);
        worst = std::min(worst, lhs / (0.5 * in.M0));
        if (lhs <= 0.5 * in.M0) {
            q0 = q;
            break;
        }
    }
    if (q0 == 0) {
        res.diagnostics = "no q0 in [3, " + std::to_string(q_last) +
                          "] satisfies the cancellation condition; best ratio to M0/2 = " + std::to_string(worst);
        return res;
    }
    res.q0 = q0;
    if (in.log_m_init.size() < static_cast<std::size_t>(q0)) {
        res.diagnostics = "q0 = " + std::to_string(q0) + " needs initial moments up to order " +
                          std::to_string(2 * (q0 - 1)) + ", got " + std::to_string(2 * (in.log_m_init.size() - 1));
        return res;
    }

    BoundConstants bc = in.constants;
    if (bc.variant == CqVariant::EpsilonWeighted) {
        bc.eps.resize(static_cast<std::size_t>(q0));
        for (int q = 2; q < q0; ++q) bc.eps[static_cast<std::size_t>(q)] = eps_at(q);
    }
    const auto cstar =
        log_uniform_bound(std::span<const double>(in.log_m_init).first(static_cast<std::size_t>(q0)), bc);
    const double m2 = std::exp(log_m2);
    double log_cq0 = -std::numeric_limits<double>::infinity();
    for (int q = 1; q <= q0 - 1; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        log_cq0 = std::max(log_cq0, cstar[qi]);
        log_cq0 = std::max(log_cq0, log_cq(m2, bc, q) + cstar[qi - 1]);
    }
    res.log_c_q0 = log_cq0;

    double log_K = log_add(log_cq0 - log_A2 - log_m0, log_cq0);
    log_K = log_add(log_K, log_m2 + log_M0 - log_m0);
    const double la_exp = std::log(std::numbers::ln2) / a;
    const double la_small = (log_M0 - std::numbers::ln2 - log_K) / a;
    res.log_alpha = std::min({std::log(in.alpha0), la_exp, la_small});
    res.alpha = std::exp(res.log_alpha);
    res.feasible = true;
    res.diagnostics = "q0 = " + std::to_string(q0) + ", ln c_q0 = " + std::to_string(log_cq0);
    return res;
}

}  // namespace kmlab
