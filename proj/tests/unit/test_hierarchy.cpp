#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kmlab/errors.hpp"
#include "kmlab/hierarchy.hpp"
#include "kmlab/kernels.hpp"
#include "kmlab/rng.hpp"

using namespace kmlab;

namespace {

// Gaussian moments of <v>^2 = 1 + v^2 in d = 1: E(1 + v^2)^q = sum_j C(q, j) (2j - 1)!!
std::vector<double> gaussian_moments(int Q)
{
    std::vector<double> m;
    for (int q = 0; q <= Q; ++q) {
        double sum = 0.0;
        double binom = 1.0;
        double dfact = 1.0;
        for (int j = 0; j <= q; ++j) {
            if (j > 0) {
                binom = binom * (q - j + 1) / j;
                dfact *= 2.0 * j - 1.0;
            }
            sum += binom * dfact;
        }
        m.push_back(sum);
    }
    return m;
}

HierarchyState kac_state(int Q)
{
    const auto k = AngularKernel::kac_constant(1.0);
    return {gaussian_moments(Q), c1_constant(k), epsilon_vector(k, Q), 0.0};
}

}  // namespace

DOCTEST_TEST_CASE("right side by hand at q = 2")
{
    const std::vector<double> m{1.0, 2.0, 6.0};
    const std::vector<double> eps{0.0, 0.0, 1.0};
    std::vector<double> dm(3);
    hierarchy_rhs(m, 1.5, eps, dm);
    DOCTEST_CHECK(dm[0] == 0.0);
    DOCTEST_CHECK(dm[1] == 0.0);
    // -C m0 m4 + C m2 m2 + C 2 eps C(0,0) m2 m2
    DOCTEST_CHECK(dm[2] == doctest::Approx(1.5 * (-6.0 + 4.0 + 2.0 * 4.0)));
}

DOCTEST_TEST_CASE("trajectory stays below the uniform bounds")
{
    auto s = kac_state(8);
    const auto traj = integrate_hierarchy(s, 50.0, 200);
    DOCTEST_REQUIRE(!traj.blew_up);
    const auto bound = uniform_bound(s.m, {s.c, s.eps, CqVariant::Rigorous});
    for (const auto& state : traj.states) {
        DOCTEST_CHECK(state[0] == s.m[0]);
        DOCTEST_CHECK(state[1] == s.m[1]);
        for (std::size_t q = 0; q < state.size(); ++q) {
            DOCTEST_REQUIRE(state[q] >= 0.0);
            DOCTEST_CHECK(state[q] <= bound[q] * (1 + 1e-9));
        }
    }
}

DOCTEST_TEST_CASE("equilibrium of the q = 2 equation sits on the rigorous bound")
{
    // equality system for q = 2 settles at 3 m2^2 / m0 = 12; the rigorous C*_2 is exactly 12
    auto s = kac_state(2);
    const auto traj = integrate_hierarchy(s, 60.0, 10);
    DOCTEST_CHECK(traj.states.back()[2] == doctest::Approx(12.0).epsilon(1e-6));
    const auto rig = uniform_bound(s.m, {s.c, s.eps, CqVariant::Rigorous});
    DOCTEST_CHECK(rig[2] == doctest::Approx(12.0).epsilon(1e-12));
    const auto free = uniform_bound(s.m, {s.c, s.eps, CqVariant::EpsilonFree});
    DOCTEST_CHECK(free[2] == doctest::Approx(8.0).epsilon(1e-12));
    DOCTEST_CHECK(free[2] < traj.states.back()[2]);
}

DOCTEST_TEST_CASE("derivative bound dominates finite differences")
{
    auto s = kac_state(6);
    std::vector<double> times;
    for (int i = 0; i <= 5000; ++i) times.push_back(0.01 * i);
    const auto traj = integrate_hierarchy(s, times);
    const BoundConstants bc{s.c, s.eps, CqVariant::Rigorous};
    for (int q = 2; q <= 6; ++q) {
        const double bound = derivative_bound(s.m, bc, q);
        for (std::size_t i = 1; i < traj.times.size(); ++i) {
            const double fd = (traj.states[i][q] - traj.states[i - 1][q]) / (traj.times[i] - traj.times[i - 1]);
            DOCTEST_REQUIRE(fd <= bound);
        }
    }
    // q = 2 by hand: C_2 = C m2 (1 + 2), C*_1 = m2
    DOCTEST_CHECK(derivative_bound(s.m, bc, 2) == doctest::Approx(s.c * 2.0 * 3.0 * 2.0));
    DOCTEST_CHECK(derivative_bound(s.m, {0.0, {}, CqVariant::Rigorous}, 3) == 0.0);
}

DOCTEST_TEST_CASE("quasi-monotone ordering of trajectories")
{
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int Q = 2 + static_cast<int>(rng.below(5));
        auto lo = kac_state(Q);
        auto hi = lo;
        for (int q = 2; q <= Q; ++q) {
            lo.m[q] *= rng.uniform(0.5, 1.0);
            hi.m[q] = lo.m[q] * rng.uniform(1.0, 2.0);
        }
        const auto a = integrate_hierarchy(lo, 10.0, 50);
        const auto b = integrate_hierarchy(hi, 10.0, 50);
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            for (int q = 0; q <= Q; ++q) DOCTEST_REQUIRE(a.states[i][q] <= b.states[i][q] * (1 + 1e-7));
        }
    }
}

DOCTEST_TEST_CASE("frozen moments when the kernel vanishes")
{
    const auto m = gaussian_moments(5);
    const auto frozen = uniform_bound(m, {0.0, {}, CqVariant::Rigorous});
    for (std::size_t q = 0; q < m.size(); ++q) DOCTEST_CHECK(frozen[q] == doctest::Approx(m[q]).epsilon(1e-14));
    HierarchyState s{m, 0.0, std::vector<double>(6, 0.5), 0.0};
    const auto traj = integrate_hierarchy(s, 3.0, 3);
    DOCTEST_CHECK(traj.states.back() == m);
}

DOCTEST_TEST_CASE("recipe conditions")
{
    const auto k = AngularKernel::kac_constant(1.0);
    RecipeInput in;
    in.M0 = 2.5;
    const auto m = gaussian_moments(40);
    for (double x : m) in.log_m_init.push_back(std::log(x));
    in.constants = {c1_constant(k), {}, CqVariant::Rigorous};
    in.epsilon = [&k](int q) { return epsilon_q(k, q); };
    in.s = 4.0 / 3.0;
    in.alpha0 = 0.5;

    // eps identically zero: q0 = 3 and alpha from the remaining conditions
    RecipeInput zero = in;
    zero.epsilon = [](int) { return 0.0; };
    const auto rz = alpha_recipe(zero);
    DOCTEST_REQUIRE(rz.feasible);
    DOCTEST_CHECK(rz.q0 == 3);

    // huge M0: only alpha^a m2 M0 / m0 <= M0 / 2 binds, giving alpha^a = 1/4 (below ln 2)
    RecipeInput loose = zero;
    loose.M0 = 1e30;
    loose.alpha0 = 10.0;
    const auto rl = alpha_recipe(loose);
    DOCTEST_REQUIRE(rl.feasible);
    DOCTEST_CHECK(rl.alpha == doctest::Approx(std::pow(0.25, 1.0 / 1.5)).epsilon(1e-12));
    DOCTEST_CHECK(std::exp(std::pow(rl.alpha, 1.5)) <= 2.0);
    loose.alpha0 = 0.1;
    DOCTEST_CHECK(alpha_recipe(loose).alpha == doctest::Approx(0.1).epsilon(1e-14));

    const auto r = alpha_recipe(in);
    DOCTEST_CHECK(!r.feasible);  // q0 lies beyond the 40 supplied moments
    DOCTEST_CHECK(r.q0 > 40);
    in.q_max = 20;
    const auto capped = alpha_recipe(in);
    DOCTEST_CHECK(!capped.feasible);
    DOCTEST_CHECK(capped.diagnostics.find("no q0") != std::string::npos);
}

DOCTEST_TEST_CASE("beta sum constant")
{
    DOCTEST_CHECK(beta_sum_constant(2.0, 400) == doctest::Approx(0.5772005772005772).epsilon(1e-12));
    DOCTEST_CHECK_THROWS_AS(beta_sum_constant(2.0, 2), DomainError);
}
