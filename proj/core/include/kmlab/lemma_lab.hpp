#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kmlab/kernels.hpp"

namespace kmlab {

/// Outcome of an inequality sweep. A trial violates when its margin
/// (RHS - LHS) falls below -tolerance * scale, scale being 1 for absolute
/// checks and max(|LHS|, |RHS|) for relative ones.
struct CheckReport {
    std::string id;
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t flagged = 0;  ///< trials whose quadrature did not converge
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_relative_margin = std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    bool relative = false;
    std::string ranges;

    void record(double margin, double scale = 1.0);
    void merge(const CheckReport& other);
    bool passed() const noexcept { return violations == 0 && flagged == 0; }
};

/// One evaluation of the angular averaging inequality for a colliding pair.
struct AngularTrial {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    /// Integral of the first order (theta-odd) Taylor term, divided by
    /// 2q (<v>^2 + <v_*>^2)^{q-1} |v v_*| int b.
    double odd_term = 0.0;
    bool converged = true;
};

/// Constants reused across trials of one kernel.
struct AngularSetup {
    AngularKernel kernel;
    double constant;            ///< C_1 or C_2
    std::vector<double> eps;    ///< eps[q], q <= q_max
    double rate;                ///< int b over the angular domain

    AngularSetup(const AngularKernel& kernel, int q_max);
};

/// Kac: LHS = int_{-pi}^{pi} (<v'>^{2q} + <v'_*>^{2q} - <v>^{2q} - <v_*>^{2q}) b dtheta with the
/// post-collision velocities from kac_collide; RHS
/// = -C_1/2 (A^q + B^q) + C_1/2 (A B^{q-1} + A^{q-1} B) + C_1 q(q-1) eps A B (A + B)^{q-2},
/// A = <v>^2, B = <v_*>^2. Requires a bounded kernel.
AngularTrial angular_kac_trial(double v, double v_star, int q, const AngularSetup& setup);

/// Boltzmann (d = 2, 3): sigma integral over S^{d-1}, the polar angle by
/// adaptive quadrature and the azimuth by an exact trapezoid rule; RHS with
/// factor C_2 in place of C_1/2 and C_1.
AngularTrial angular_boltzmann_trial(std::span<const double> v, std::span<const double> v_star, int q,
                                     const AngularSetup& setup);

CheckReport check_angular_kac(double v, double v_star, int q, const AngularKernel& kernel);
CheckReport check_angular_boltzmann(std::span<const double> v, std::span<const double> v_star, int q,
                                    const AngularKernel& kernel);

struct AngularSweep {
    std::size_t trials = 10000;
    int q_min = 2;
    int q_max = 20;
    double v_max = 10.0;
    std::uint64_t seed = 20160501;
    double tolerance = 1e-8;
};

struct AngularSweepResult {
    CheckReport report;
    double max_odd_term = 0.0;
};

AngularSweepResult sweep_angular_kac(const AngularKernel& kernel, const AngularSweep& sweep = {});
AngularSweepResult sweep_angular_boltzmann(const AngularKernel& kernel, const AngularSweep& sweep = {});

/// (t a + (1-t) b)^p + ((1-t) a + t b)^p - a^p - b^p against
/// -2t(1-t)(a^p + b^p) + 2t(1-t)(a b^{p-1} + a^{p-1} b); returns RHS - LHS
/// evaluated in extended precision. p in (1, 2) throws DomainError.
double check_convex_estimate(double a, double b, double t, double p);
/// Grid a, b in {0, 0.1, ..., 5}, t in {0, 0.05, ..., 1}, p in {0.3, 1, 2, 2.5, 6}.
CheckReport sweep_convex_estimate(double tolerance = 1e-12);

/// sum_{k=0}^{k_p} C(p, k) (x^k y^{p-k} + x^{p-k} y^k) - (x + y)^p, k_p = floor((p+1)/2).
double check_binomial_split(double x, double y, double p);
/// x, y in {0.1, 0.2, ..., 10}, p in {1.5, 2, 3.7, 8}, relative tolerance.
CheckReport sweep_binomial_split(double tolerance = 1e-10);

/// (x^b y^{p-b} + x^{p-b} y^b) - (x^a y^{p-a} + x^{p-a} y^a) for 0 <= b <= a <= p/2.
double check_product_monotonicity(double x, double y, double a, double b, double p);
CheckReport sweep_product_monotonicity(std::size_t trials = 100000, std::uint64_t seed = 7,
                                       double tolerance = 1e-10);

struct BetaDecayReport {
    double a = 0.0;
    int p_max = 0;
    std::vector<double> sums;   ///< S(p) for p = 3..p_max
    double slope = 0.0;         ///< least squares on ln S vs ln p, p in [p_max/2, p_max]
    double intercept = 0.0;
    double sup_full = 0.0;      ///< sup_{3 <= p <= p_max} p^{1+a} S(p)
    double sup_upper = 0.0;     ///< sup over p in [p_max/2, p_max]
    bool slope_ok = false;      ///< slope <= -(1 + a) + 0.15
    bool sup_stable = false;    ///< sup_upper >= 0.95 sup_full
};

BetaDecayReport check_beta_sum_decay(double a, int p_max);

}  // namespace kmlab
