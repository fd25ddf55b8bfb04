#pragma once

#include <cstddef>
#include <vector>

#include "kmlab/quadrature.hpp"
#include "kmlab/rng.hpp"

namespace kmlab {

enum class Family { Kac, Boltzmann };
enum class Profile { Constant, PowerSingular };

/// Angular collision kernel b(theta) for the Kac (d = 1) or Boltzmann
/// (d >= 2) collision operator.
///
/// Constant(level): b = level.
/// PowerSingular(nu): the kernel weighted by the surface factor behaves like
/// level * theta^{-1-nu}; concretely b_K(theta) = level |theta|^{-1-nu} and
/// b_B(cos theta) = level theta^{-(d-1)-nu}, so that b_B sin^{d-2} theta has
/// the same theta^{-1-nu} singularity as the Kac kernel. Then the kernel
/// satisfies the integrability assumption for every kappa (or beta) > nu.
///
/// theta_min > 0 truncates grazing angles: b = 0 for |theta| < theta_min.
class AngularKernel {
public:
    AngularKernel(Family family, int dimension, Profile profile, double level,
                  double nu = 0.0, double theta_min = 0.0);

    static AngularKernel kac_constant(double level = 1.0, double theta_min = 0.0);
    static AngularKernel kac_power(double nu, double level = 1.0, double theta_min = 0.0);
    static AngularKernel boltzmann_constant(int dimension, double level = 1.0,
                                            double theta_min = 0.0);
    static AngularKernel boltzmann_power(int dimension, double nu, double level = 1.0,
                                         double theta_min = 0.0);

    Family family() const noexcept { return family_; }
    int dimension() const noexcept { return dimension_; }
    Profile profile() const noexcept { return profile_; }
    double level() const noexcept { return level_; }
    double nu() const noexcept { return nu_; }
    double theta_min() const noexcept { return theta_min_; }

    /// Unbounded near theta = 0 (singular profile without truncation).
    bool is_unbounded() const noexcept
    {
        return profile_ == Profile::PowerSingular && theta_min_ == 0.0;
    }

    /// b(|theta|) for Kac, b_B(cos theta) for Boltzmann; theta in [0, pi].
    double operator()(double theta) const noexcept;

    AngularKernel with_level(double level) const;
    AngularKernel with_theta_min(double theta_min) const;

private:
    Family family_;
    int dimension_;
    Profile profile_;
    double level_;
    double nu_;
    double theta_min_;
};

/// Minimal singularity index: 0 for Constant, nu for PowerSingular (clamped
/// to [0, 2]). This is the kappa (Kac) or beta (Boltzmann) that enters the
/// admissible order s <= 4 / (2 + index).
double classify_singularity(const AngularKernel& kernel);

/// Largest stretched exponential order whose propagation is covered for this
/// kernel: 4 / (2 + classify_singularity(kernel)).
double max_admissible_order(const AngularKernel& kernel);

/// |S^n|, measure of the unit n-sphere in R^{n+1} (|S^0| = 2, |S^1| = 2 pi).
double sphere_measure(int n);

/// Integral of b(theta) g(theta) over the kernel support [theta_min, pi],
/// handling the singular endpoint when the kernel is unbounded.
QuadratureResult kernel_integral(const AngularKernel& kernel, const Integrand& g,
                                 const QuadratureOptions& opts = {});

/// C_1 = int_{-pi}^{pi} sin^2(2 theta) b_K(|theta|) d theta.
double c1_constant(const AngularKernel& kernel);

/// C_2 = |S^{d-2}| int_0^pi b_B(cos theta) sin^d theta d theta.
double c2_constant(const AngularKernel& kernel);

/// C_1 for Kac kernels, C_2 for Boltzmann kernels.
double angular_constant(const AngularKernel& kernel);

/// int_0^1 t (1 - c t)^n dt for 0 <= c <= 1, evaluated without cancellation.
double cancellation_inner(double c, int n);

/// Cancellation sequence eps_{kappa,q} (Kac) for q >= 2.
double epsilon_kappa(const AngularKernel& kernel, int q);
/// Cancellation sequence eps_{beta,q} (Boltzmann) for q >= 2.
double epsilon_beta(const AngularKernel& kernel, int q);
/// Dispatches on the kernel family.
double epsilon_q(const AngularKernel& kernel, int q);

struct DecayRow {
    int q;
    double epsilon;
    double scaled;  ///< epsilon * q^{1 - xi/2}, xi = classify_singularity
};

/// Rows q = 2..q_max of the cancellation sequence and its decay column.
std::vector<DecayRow> decay_rate_table(const AngularKernel& kernel, int q_max);

/// Collision frequency per particle: int b over the angular domain
/// (with |S^{d-2}| sin^{d-2} theta for Boltzmann). Throws ConfigError for an
/// unbounded kernel.
double total_rate(const AngularKernel& kernel);

struct AngleSample {
    double theta;  ///< signed on [-pi, pi] for Kac, in [0, pi] for Boltzmann
    double phi;    ///< azimuth: uniform on [0, 2 pi) for d >= 3, 0 or pi for d = 2
};

/// Draws scattering angles with density proportional to b (times the
/// Boltzmann surface factor). Kac angles are drawn as |theta| followed by an
/// independent sign so the distribution is exactly symmetric.
class AngleSampler {
public:
    explicit AngleSampler(const AngularKernel& kernel);

    AngleSample operator()(Rng& rng) const;

    const AngularKernel& kernel() const noexcept { return kernel_; }

private:
    double sample_polar_power(Rng& rng) const;

    AngularKernel kernel_;
    double lo_pow_ = 0.0;  // theta_min^{-nu}
    double hi_pow_ = 0.0;  // pi^{-nu}
};

AngleSample sample_angle(const AngularKernel& kernel, Rng& rng);

}  // namespace kmlab
