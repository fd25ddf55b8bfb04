#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <functional>
#include <vector>

#include "kmlab/kernels.hpp"
#include "kmlab/special_fn.hpp"

namespace kmlab {

/// Which constant C_q drives the max-chain m_{2q} <= max{m_{2q}(0), C_q / (C m_0) m_{2q-2}}.
///
/// EpsilonFree:     C_q = C m_2(0) + C q(q-1) 2^{q-2}
/// EpsilonWeighted: C_q = C m_2(0) + 4 q(q-1) eps_q 2^{q-2}
/// Rigorous:        C_q = C m_2(0) (1 + q(q-1) 2^{q-2})
///
/// Rigorous keeps the m_2 factor that the product ordering
/// m_{2k} m_{2q-2k} <= m_2 m_{2q-2} puts on the cross term; the other two
/// drop it and can sit below the equilibrium of the equality system.
enum class CqVariant { EpsilonFree, EpsilonWeighted, Rigorous };

/// Moment vector m[q] = m_{2q}, q = 0..Q, with the kernel constant C (C_1 or
/// C_2) and the cancellation sequence eps[q] (entries 0 and 1 unused).
struct HierarchyState {
    std::vector<double> m;
    double c = 0.0;
    std::vector<double> eps;
    double t = 0.0;

    int max_index() const noexcept { return static_cast<int>(m.size()) - 1; }
};

/// eps[q] = epsilon_q(kernel) for q = 2..q_max (eps[0] = eps[1] = 0).
std::vector<double> epsilon_vector(const AngularKernel& kernel, int q_max);

/// Right side of the equality system: for q >= 2
///   dm[q] = -C m[0] m[q] + C m[1] m[q-1]
///           + C q(q-1) eps_q sum_{k=1}^{floor((q+1)/2)} C(q-2, k-1) m[k] m[q-k],
/// and dm[0] = dm[1] = 0.
void hierarchy_rhs(std::span<const double> m, double c, std::span<const double> eps,
                   std::span<double> dm);
std::vector<double> hierarchy_rhs(const HierarchyState& state);

struct IntegrationOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double blowup = 1e300;
    double initial_step = 1e-3;
    std::size_t max_steps = 10000000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Adaptive Dormand-Prince integration sampled at `sample_times` (increasing,
/// >= initial.t). A step that would make any component negative is rejected
/// and retried with half the step. Integration stops once any component
/// exceeds options.blowup.
Trajectory integrate_hierarchy(const HierarchyState& initial, std::span<const double> sample_times,
                               const IntegrationOptions& options = {});
/// Samples at n_samples + 1 equally spaced times on [initial.t, t_end].
Trajectory integrate_hierarchy(const HierarchyState& initial, double t_end, std::size_t n_samples,
                               const IntegrationOptions& options = {});

struct BoundConstants {
    double c = 0.0;
    std::vector<double> eps;  ///< needed for EpsilonWeighted only
    CqVariant variant = CqVariant::Rigorous;
};

/// C_q for q >= 1 (zero-index entries use m_init[1] = m_2(0)).
double cq_constant(double m2_initial, const BoundConstants& constants, int q);

/// ln C*_q for q = 0..log_m_init.size() - 1 from ln m_{2q}(0). C*_0 = m_0(0),
/// C*_1 = m_2(0), and C*_q = max{m_{2q}(0), C_q / (C m_0(0)) C*_{q-1}}.
/// With C = 0 the moments are frozen and C*_q = m_{2q}(0).
std::vector<double> log_uniform_bound(std::span<const double> log_m_init,
                                      const BoundConstants& constants);
std::vector<double> uniform_bound(std::span<const double> m_init, const BoundConstants& constants);

/// C_q C*_{q-1}, q >= 1.
double derivative_bound(std::span<const double> m_init, const BoundConstants& constants, int q);

/// max over p in [3, p_max] of p^{1+a} S(p), S the beta-binomial sum.
double beta_sum_constant(double a, int p_max = 400);

struct RecipeInput {
    double M0 = 1.0;                  ///< bound on the initial exponential moment
    std::vector<double> log_m_init;   ///< ln m_{2q}(0), q = 0..q_max at least
    BoundConstants constants;         ///< c is A_2 (C_1 or C_2)
    /// eps_q for q beyond constants.eps; the q0 search stops where neither covers q.
    std::function<double(int)> epsilon;
    double s = 1.0;
    double alpha0 = 1.0;
    double singularity_index = 0.0;
    int q_max = 200000;
    /// c_a = a C_a; 0 estimates C_a as twice beta_sum_constant(a, 400).
    double c_a = 0.0;
};

struct RecipeResult {
    bool feasible = false;
    bool admissible = true;  ///< s <= 4 / (2 + singularity_index)
    int q0 = 0;
    double alpha = 0.0;
    double log_alpha = -std::numeric_limits<double>::infinity();
    double c_a = 0.0;
    double log_c_q0 = 0.0;
    std::string diagnostics;
};

/// Smallest q0 >= 3 with 4 c_a q0^{2-a} eps_{q0} M0^2 / (A_2 m_0) <= M0 / 2, then
/// the largest alpha <= alpha0 with e^{alpha^a} <= 2 and
/// alpha^a (c_{q0} / (A_2 m_0) + c_{q0} + m_2 M0 / m_0) <= M0 / 2, where
/// c_{q0} = max_{q < q0} max{C*_q, C_q C*_{q-1}}. Computed in logs; alpha may
/// underflow while log_alpha stays finite.
RecipeResult alpha_recipe(const RecipeInput& input);

}  // namespace kmlab
