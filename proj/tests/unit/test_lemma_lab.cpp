#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kmlab/errors.hpp"
#include "kmlab/kernels.hpp"
#include "kmlab/lemma_lab.hpp"

using namespace kmlab;
using std::numbers::pi;

namespace {

// Kac LHS by Gauss-Kronrod on the rotation directly
double kac_lhs_oracle(double v, double w, int q, double level)
{
    auto f = [&](double th) {
        const double a = v * std::cos(th) - w * std::sin(th);
        const double b = v * std::sin(th) + w * std::cos(th);
        return level * (std::pow(1 + a * a, q) + std::pow(1 + b * b, q) - std::pow(1 + v * v, q) - std::pow(1 + w * w, q));
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -pi, pi, 20, 1e-14);
}

}  // namespace

DOCTEST_TEST_CASE("Kac angular trial LHS against an independent quadrature")
{
    const auto k = AngularKernel::kac_constant(1.0);
    const AngularSetup setup(k, 12);
    for (double v : {0.0, 0.7, -3.0, 9.5}) {
        for (double w : {0.2, -4.0}) {
            for (int q : {2, 5, 12}) {
                const auto t = angular_kac_trial(v, w, q, setup);
                const double ref = kac_lhs_oracle(v, w, q, 1.0);
                DOCTEST_CHECK(t.lhs == doctest::Approx(ref).epsilon(1e-10));
                DOCTEST_CHECK(t.margin >= -1e-8 * std::max(std::abs(t.lhs), std::abs(t.rhs)));
                DOCTEST_CHECK(std::abs(t.odd_term) <= 1e-12);
            }
        }
    }
}

DOCTEST_TEST_CASE("degenerate pairs")
{
    const auto r = check_angular_kac(0.0, 0.0, 4, AngularKernel::kac_constant());
    DOCTEST_CHECK(r.passed());
    const std::vector<double> v{1.0, -2.0, 0.5};
    const auto b = check_angular_boltzmann(v, v, 3, AngularKernel::boltzmann_constant(3));
    DOCTEST_CHECK(b.passed());
    DOCTEST_CHECK_THROWS_AS(AngularSetup(AngularKernel::kac_power(1.0), 5), ConfigError);
}

DOCTEST_TEST_CASE("Kac sweeps hold for cutoff and truncated singular kernels")
{
    AngularSweep sweep;
    sweep.trials = 300;
    for (auto k : {AngularKernel::kac_constant(), AngularKernel::kac_power(1.0, 1.0, 0.05)}) {
        const auto r = sweep_angular_kac(k, sweep);
        DOCTEST_CHECK(r.report.passed());
        DOCTEST_CHECK(r.max_odd_term <= 1e-12);
    }
}

DOCTEST_TEST_CASE("Boltzmann angular inequality has a q = 2 counterexample")
{
    // v = (R, 0, 0), v_* = 0, constant kernel: LHS - RHS = (4 pi / 3) R^4 - (16 pi / 3)(1 + R^2) in d = 3
    const auto k = AngularKernel::boltzmann_constant(3, 1.0);
    const AngularSetup setup(k, 4);
    const double R = 10.0;
    const std::vector<double> v{R, 0.0, 0.0};
    const std::vector<double> w{0.0, 0.0, 0.0};
    const auto t = angular_boltzmann_trial(v, w, 2, setup);
    const double gap = 4.0 * pi / 3.0 * std::pow(R, 4) - 16.0 * pi / 3.0 * (1.0 + R * R);
    DOCTEST_CHECK(-t.margin == doctest::Approx(gap).epsilon(1e-10));
    // the closed form for q = 2: LHS = -2 pi (A - B)^2 + (32 pi / 3) r^2 |c|^2
    DOCTEST_CHECK(t.lhs == doctest::Approx(-2.0 * pi * std::pow(R * R, 2) + 32.0 * pi / 3.0 * std::pow(R, 4) / 16.0).epsilon(1e-10));
}

DOCTEST_TEST_CASE("convex estimate")
{
    DOCTEST_CHECK(check_convex_estimate(1.3, 2.0, 0.0, 2.5) == doctest::Approx(0.0).epsilon(1e-15));
    DOCTEST_CHECK(std::abs(check_convex_estimate(2.0, 2.0, 0.3, 6.0)) < 1e-12);
    DOCTEST_CHECK_THROWS_AS(check_convex_estimate(1.0, 2.0, 0.5, 1.5), DomainError);
    const auto r = sweep_convex_estimate();
    DOCTEST_CHECK(r.passed());
    DOCTEST_CHECK(r.trials == 51u * 51u * 21u * 5u);
}

DOCTEST_TEST_CASE("binomial split and product monotonicity")
{
    // p = 2, x = y = 1: split sum 6 against (x + y)^2 = 4
    DOCTEST_CHECK(check_binomial_split(1.0, 1.0, 2.0) == doctest::Approx(2.0));
    DOCTEST_CHECK(sweep_binomial_split().passed());
    DOCTEST_CHECK(check_product_monotonicity(2.0, 3.0, 1.0, 1.0, 4.0) == 0.0);
    DOCTEST_CHECK_THROWS_AS(check_product_monotonicity(2.0, 3.0, 1.0, 2.0, 4.0), DomainError);
    DOCTEST_CHECK(sweep_product_monotonicity(20000).passed());
}

DOCTEST_TEST_CASE("beta sum decay slope")
{
    for (double a : {1.25, 1.5, 2.0, 3.0}) {
        const auto r = check_beta_sum_decay(a, 400);
        DOCTEST_CHECK(r.slope_ok);
        DOCTEST_CHECK(r.slope <= -(1.0 + a) + 0.15);
        DOCTEST_CHECK(std::isfinite(r.sup_full));
        DOCTEST_CHECK(r.sup_upper <= r.sup_full);
    }
}

// p^{1+a} S(p) peaks at small p and decays afterwards, so the tail supremum is
// well under 95% of the full one; kept as a visible expected failure.
DOCTEST_TEST_CASE("beta sum supremum is reached on the upper half" * doctest::may_fail())
{
    for (double a : {1.25, 1.5, 2.0, 3.0}) DOCTEST_CHECK(check_beta_sum_decay(a, 400).sup_stable);
}
