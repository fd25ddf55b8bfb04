#include "kmlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kmlab/errors.hpp"
#include "kmlab/special_fn.hpp"

namespace kmlab {

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureOptions kernel_quadrature_options()
{
    QuadratureOptions opts;
    opts.abs_tol = 1e-10;
    opts.rel_tol = 1e-9;
    opts.max_intervals = 20000;
    return opts;
}

void require_family(const AngularKernel& kernel, Family family, const char* what)
{
    if (kernel.family() != family) {
        throw DomainError(std::string(what) + ": wrong kernel family");
    }
}

// Dyadic break points theta_min * 2^k inside (theta_min, pi).
std::vector<double> dyadic_breaks(double lo, double hi)
{
    std::vector<double> breaks;
    for (double x = 2.0 * lo; x < hi; x *= 2.0) breaks.push_back(x);
    if (lo < 0.5 * kPi && 0.5 * kPi < hi) {
        breaks.push_back(0.5 * kPi);
        std::sort(breaks.begin(), breaks.end());
    }
    return breaks;
}

}  // namespace

AngularKernel::AngularKernel(Family family, int dimension, Profile profile, double level,
                             double nu, double theta_min)
    : family_(family),
      dimension_(dimension),
      profile_(profile),
      level_(level),
      nu_(profile == Profile::Constant ? 0.0 : nu),
      theta_min_(theta_min)
{
    if (family == Family::Kac && dimension != 1) {
        throw ConfigError("Kac kernel requires dimension 1");
    }
    if (family == Family::Boltzmann && dimension < 2) {
        throw ConfigError("Boltzmann kernel requires dimension >= 2");
    }
    if (!(level >= 0.0) || !std::isfinite(level)) {
        throw ConfigError("kernel level must be finite and nonnegative");
    }
    if (profile == Profile::PowerSingular && !(nu >= 0.0 && nu < 2.0)) {
        throw ConfigError("singular kernel exponent nu must lie in [0, 2)");
    }
    if (!(theta_min >= 0.0 && theta_min < 0.5 * kPi)) {
        throw ConfigError("theta_min must lie in [0, pi/2)");
    }
}

AngularKernel AngularKernel::kac_constant(double level, double theta_min)
{
    return {Family::Kac, 1, Profile::Constant, level, 0.0, theta_min};
}

AngularKernel AngularKernel::kac_power(double nu, double level, double theta_min)
{
    return {Family::Kac, 1, Profile::PowerSingular, level, nu, theta_min};
}

AngularKernel AngularKernel::boltzmann_constant(int dimension, double level, double theta_min)
{
    return {Family::Boltzmann, dimension, Profile::Constant, level, 0.0, theta_min};
}

AngularKernel AngularKernel::boltzmann_power(int dimension, double nu, double level,
                                             double theta_min)
{
    return {Family::Boltzmann, dimension, Profile::PowerSingular, level, nu, theta_min};
}

double AngularKernel::operator()(double theta) const noexcept
{
    theta = std::abs(theta);
    if (theta < theta_min_ || theta > kPi) return 0.0;
    if (profile_ == Profile::Constant) return level_;
    if (theta == 0.0) return std::numeric_limits<double>::infinity();
    const double exponent = family_ == Family::Kac ? -1.0 - nu_ : -(dimension_ - 1.0) - nu_;
    return level_ * std::pow(theta, exponent);
}

AngularKernel AngularKernel::with_level(double level) const
{
    return {family_, dimension_, profile_, level, nu_, theta_min_};
}

AngularKernel AngularKernel::with_theta_min(double theta_min) const
{
    return {family_, dimension_, profile_, level_, nu_, theta_min};
}

double classify_singularity(const AngularKernel& kernel)
{
    if (kernel.profile() == Profile::Constant) return 0.0;
    return std::clamp(kernel.nu(), 0.0, 2.0);
}

double max_admissible_order(const AngularKernel& kernel)
{
    return 4.0 / (2.0 + classify_singularity(kernel));
}

double sphere_measure(int n)
{
    if (n < 0) throw DomainError("sphere_measure: negative dimension");
    const double h = 0.5 * (n + 1);
    return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

QuadratureResult kernel_integral(const AngularKernel& kernel, const Integrand& g,
                                 const QuadratureOptions& opts)
{
    auto integrand = [&](double theta) {
        const double gv = g(theta);
        if (gv == 0.0) return 0.0;
        return kernel(theta) * gv;
    };
    if (kernel.level() == 0.0) return {};
    if (kernel.is_unbounded()) {
        return integrate_left_singular(integrand, 0.0, kPi, opts);
    }
    const double lo = kernel.theta_min();
    std::vector<double> breaks;
    if (kernel.profile() == Profile::PowerSingular) {
        breaks = dyadic_breaks(lo, kPi);
    } else if (lo < 0.5 * kPi) {
        breaks.push_back(0.5 * kPi);
    }
    return integrate_with_breaks(integrand, lo, kPi, breaks, opts);
}

double c1_constant(const AngularKernel& kernel)
{
    require_family(kernel, Family::Kac, "c1_constant");
    const auto r = kernel_integral(
        kernel, [](double th) { const double s = std::sin(2.0 * th); return s * s; },
        kernel_quadrature_options());
    return 2.0 * r.value;
}

double c2_constant(const AngularKernel& kernel)
{
    require_family(kernel, Family::Boltzmann, "c2_constant");
    const int d = kernel.dimension();
    const auto r = kernel_integral(
        kernel, [d](double th) { return std::pow(std::sin(th), d); },
        kernel_quadrature_options());
    return sphere_measure(d - 2) * r.value;
}

double angular_constant(const AngularKernel& kernel)
{
    return kernel.family() == Family::Kac ? c1_constant(kernel) : c2_constant(kernel);
}

double cancellation_inner(double c, int n)
{
    if (n < 0 || !(c >= 0.0 && c <= 1.0)) {
        throw DomainError("cancellation_inner: require n >= 0 and c in [0, 1]");
    }
    if (n == 0 || c == 0.0) return 0.5;
    const double np1 = n + 1.0;
    const double np2 = n + 2.0;
    if (c * np2 < 1.0) {
        // Alternating binomial series sum_k C(n,k) (-c)^k / (k+2); |ratio| < 1.
        double term = 1.0;
        double sum = 0.5;
        for (int k = 0; k < n; ++k) {
            term *= -c * (n - k) / (k + 1.0);
            sum += term / (k + 3.0);
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }
    const double x = np1 * c;
    const double tail = std::exp(np1 * std::log1p(-c)) * (1.0 + x);
    return (1.0 - tail) / (c * c * np1 * np2);
}

double epsilon_kappa(const AngularKernel& kernel, int q)
{
    require_family(kernel, Family::Kac, "epsilon_kappa");
    if (q < 2) throw DomainError("epsilon_kappa: q must be >= 2");
    const auto opts = kernel_quadrature_options();
    const auto weight = [](double th) { const double s = std::sin(2.0 * th); return s * s; };
    const double den = kernel_integral(kernel, weight, opts).value;
    if (den == 0.0) throw DomainError("epsilon_kappa: C1 vanishes for this kernel");
    // Inner t-integral is identically 1/2 at q = 2.
    if (q == 2) return 1.0;
    const auto num = kernel_integral(
        kernel,
        [q](double th) {
            const double s = std::sin(2.0 * th);
            const double s2 = s * s;
            return s2 * cancellation_inner(0.25 * s2, q - 2);
        },
        opts);
    return 2.0 * num.value / den;
}

double epsilon_beta(const AngularKernel& kernel, int q)
{
    require_family(kernel, Family::Boltzmann, "epsilon_beta");
    if (q < 2) throw DomainError("epsilon_beta: q must be >= 2");
    const int d = kernel.dimension();
    const auto opts = kernel_quadrature_options();
    const double den =
        kernel_integral(kernel, [d](double th) { return std::pow(std::sin(th), d); }, opts).value;
    if (den == 0.0) throw DomainError("epsilon_beta: C2 vanishes for this kernel");
    if (q == 2) return 1.0;
    const auto num = kernel_integral(
        kernel,
        [q, d](double th) {
            const double s = std::sin(th);
            return std::pow(s, d) * cancellation_inner(0.5 * s * s, q - 2);
        },
        opts);
    return 2.0 * num.value / den;
}

double epsilon_q(const AngularKernel& kernel, int q)
{
    return kernel.family() == Family::Kac ? epsilon_kappa(kernel, q) : epsilon_beta(kernel, q);
}

std::vector<DecayRow> decay_rate_table(const AngularKernel& kernel, int q_max)
{
    if (q_max < 3) throw DomainError("decay_rate_table: q_max must be >= 3");
    const double xi = classify_singularity(kernel);
    std::vector<DecayRow> rows;
    rows.reserve(static_cast<std::size_t>(q_max - 1));
    for (int q = 2; q <= q_max; ++q) {
        const double eps = epsilon_q(kernel, q);
        rows.push_back({q, eps, eps * std::pow(static_cast<double>(q), 1.0 - 0.5 * xi)});
    }
    return rows;
}

double total_rate(const AngularKernel& kernel)
{
    if (kernel.is_unbounded()) {
        throw ConfigError("untruncated singular kernel has an infinite collision rate");
    }
    const double level = kernel.level();
    const double lo = kernel.theta_min();
    const double nu = kernel.nu();
    if (level == 0.0) return 0.0;

    if (kernel.family() == Family::Kac) {
        if (kernel.profile() == Profile::Constant) return 2.0 * level * (kPi - lo);
        if (nu == 0.0) return 2.0 * level * std::log(kPi / lo);
        return 2.0 * level * (std::pow(lo, -nu) - std::pow(kPi, -nu)) / nu;
    }

    const int d = kernel.dimension();
    if (kernel.profile() == Profile::Constant) {
        if (d == 2) return 2.0 * level * (kPi - lo);
        if (d == 3) return 2.0 * kPi * level * (1.0 + std::cos(lo));
    }
    auto opts = kernel_quadrature_options();
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-12;
    const auto breaks = dyadic_breaks(lo, kPi);
    const auto r = integrate_with_breaks(
        [&](double th) { return kernel(th) * std::pow(std::sin(th), d - 2); }, lo, kPi, breaks, opts);
    return sphere_measure(d - 2) * r.value;
}

AngleSampler::AngleSampler(const AngularKernel& kernel) : kernel_(kernel)
{
    if (kernel.is_unbounded()) {
        throw ConfigError("untruncated singular kernel cannot be sampled; set theta_min > 0");
    }
    if (kernel.profile() == Profile::PowerSingular && kernel.nu() > 0.0) {
        lo_pow_ = std::pow(kernel.theta_min(), -kernel.nu());
        hi_pow_ = std::pow(kPi, -kernel.nu());
    }
}

double AngleSampler::sample_polar_power(Rng& rng) const
{
    const double u = rng.uniform();
    const double lo = kernel_.theta_min();
    if (kernel_.nu() == 0.0) return lo * std::exp(u * std::log(kPi / lo));
    return std::pow(lo_pow_ - u * (lo_pow_ - hi_pow_), -1.0 / kernel_.nu());
}

AngleSample AngleSampler::operator()(Rng& rng) const
{
    const double lo = kernel_.theta_min();
    const int d = kernel_.dimension();
    const bool power = kernel_.profile() == Profile::PowerSingular;

    if (kernel_.family() == Family::Kac) {
        const double magnitude = power ? sample_polar_power(rng) : rng.uniform(lo, kPi);
        const bool negative = (rng.next_u64() >> 63) != 0;
        return {negative ? -magnitude : magnitude, 0.0};
    }

    double theta = 0.0;
    if (power) {
        for (;;) {
            theta = sample_polar_power(rng);
            const double accept = d == 2 ? 1.0 : std::pow(std::sin(theta) / theta, d - 2);
            if (d == 2 || rng.uniform() < accept) break;
        }
    } else if (d == 2) {
        theta = rng.uniform(lo, kPi);
    } else if (d == 3) {
        theta = std::acos(rng.uniform(-1.0, std::cos(lo)));
    } else {
        for (;;) {
            theta = rng.uniform(lo, kPi);
            if (rng.uniform() < std::pow(std::sin(theta), d - 2)) break;
        }
    }

    double phi = 0.0;
    if (d == 2) {
        phi = (rng.next_u64() >> 63) != 0 ? kPi : 0.0;
    } else {
        phi = rng.uniform(0.0, 2.0 * kPi);
    }
    return {theta, phi};
}

AngleSample sample_angle(const AngularKernel& kernel, Rng& rng)
{
    return AngleSampler(kernel)(rng);
}

}  // namespace kmlab
