#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kmlab/collisions.hpp"
#include "kmlab/errors.hpp"
#include "kmlab/rng.hpp"

using namespace kmlab;
using std::numbers::pi;

DOCTEST_TEST_CASE("Kac rotation by hand")
{
    const auto out = kac_collide({{1.0}, {0.0}}, pi / 2.0);
    DOCTEST_CHECK(out.v[0] == doctest::Approx(0.0));
    DOCTEST_CHECK(out.v_star[0] == doctest::Approx(1.0));
    const auto same = kac_collide({{0.3}, {-2.0}}, 0.0);
    DOCTEST_CHECK(same.v[0] == 0.3);
    DOCTEST_CHECK(same.v_star[0] == -2.0);
    DOCTEST_CHECK_THROWS_AS(kac_collide({{1.0, 2.0}, {0.0, 1.0}}, 0.1), DomainError);
}

DOCTEST_TEST_CASE("sigma representation by hand")
{
    const std::vector<double> sigma{0.0, 1.0};
    const auto out = boltzmann_collide({{1.0, 0.0}, {-1.0, 0.0}}, sigma);
    DOCTEST_CHECK(out.v[0] == doctest::Approx(0.0));
    DOCTEST_CHECK(out.v[1] == doctest::Approx(1.0));
    DOCTEST_CHECK(out.v_star[1] == doctest::Approx(-1.0));
    const std::vector<double> bad{0.0, 1.1};
    DOCTEST_CHECK_THROWS_AS(boltzmann_collide({{1.0, 0.0}, {-1.0, 0.0}}, bad), DomainError);
    // equal velocities are left alone
    const std::vector<double> s3{1.0, 0.0, 0.0};
    const auto eq = boltzmann_collide({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}, s3);
    DOCTEST_CHECK(eq.v == std::vector<double>{0.5, 0.5, 0.5});
}

DOCTEST_TEST_CASE("random collisions conserve the invariants")
{
    Rng rng(3);
    double worst_kac = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double v = rng.uniform(-10, 10);
        double w = rng.uniform(-10, 10);
        const double e0 = v * v + w * w;
        kac_collide_inplace(v, w, rng.uniform(-pi, pi));
        worst_kac = std::max(worst_kac, std::abs(v * v + w * w - e0) / e0);
    }
    DOCTEST_CHECK(worst_kac <= 1e-13);

    for (int d : {2, 3}) {
        double worst = 0.0;
        for (int i = 0; i < 20000; ++i) {
            std::vector<double> v(d), w(d), u(d);
            double n2 = 0.0;
            for (int j = 0; j < d; ++j) {
                v[j] = rng.uniform(-10, 10);
                w[j] = rng.uniform(-10, 10);
                u[j] = v[j] - w[j];
                n2 += u[j] * u[j];
            }
            for (double& x : u) x /= std::sqrt(n2);
            const double theta = rng.uniform(0, pi);
            const double phi = d == 2 ? (rng.uniform() < 0.5 ? 0.0 : pi) : rng.uniform(0, 2 * pi);
            const auto sigma = scattering_direction(u, theta, phi);
            double dot = 0.0;
            double norm = 0.0;
            for (int j = 0; j < d; ++j) {
                dot += u[j] * sigma[j];
                norm += sigma[j] * sigma[j];
            }
            DOCTEST_REQUIRE(std::abs(dot - std::cos(theta)) < 1e-12);
            DOCTEST_REQUIRE(std::abs(norm - 1.0) < 1e-12);
            double e0 = 0.0;
            std::vector<double> p0(d);
            for (int j = 0; j < d; ++j) {
                e0 += v[j] * v[j] + w[j] * w[j];
                p0[j] = v[j] + w[j];
            }
            boltzmann_collide_inplace(v, w, sigma);
            double e1 = 0.0;
            for (int j = 0; j < d; ++j) {
                e1 += v[j] * v[j] + w[j] * w[j];
                worst = std::max(worst, std::abs(v[j] + w[j] - p0[j]) / std::sqrt(e0));
            }
            worst = std::max(worst, std::abs(e1 - e0) / e0);
        }
        DOCTEST_CHECK(worst <= 1e-13);
    }
}

DOCTEST_TEST_CASE("scattering direction frame")
{
    // d = 2: phi = 0 and pi pick opposite sides
    const std::vector<double> u{1.0, 0.0};
    const auto a = scattering_direction(u, pi / 2, 0.0);
    const auto b = scattering_direction(u, pi / 2, pi);
    DOCTEST_CHECK(a[1] == doctest::Approx(1.0));
    DOCTEST_CHECK(b[1] == doctest::Approx(-1.0));
    // d = 3: azimuths a quarter turn apart are orthogonal in the plane normal to u
    const std::vector<double> u3{0.0, 0.6, 0.8};
    const auto s0 = scattering_direction(u3, pi / 2, 0.0);
    const auto s1 = scattering_direction(u3, pi / 2, pi / 2);
    DOCTEST_CHECK(std::abs(s0[0] * s1[0] + s0[1] * s1[1] + s0[2] * s1[2]) < 1e-14);
    DOCTEST_CHECK_THROWS_AS(scattering_direction(std::vector<double>{1, 0, 0, 0}, 0.1, 0.2), ConfigError);
}
