#include "kmlab/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kmlab/collisions.hpp"
#include "kmlab/errors.hpp"
#include "kmlab/hierarchy.hpp"
#include "kmlab/rng.hpp"
#include "kmlab/special_fn.hpp"

namespace kmlab {

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureOptions angular_options(double scale)
{
    QuadratureOptions opts;
    opts.abs_tol = 1e-14 * scale;
    opts.rel_tol = 1e-12;
    opts.max_intervals = 8000;
    return opts;
}

double bracket2(double x) { return 1.0 + x * x; }

double bracket2(std::span<const double> v)
{
    double s = 1.0;
    for (double x : v) s += x * x;
    return s;
}

// -f (A^q + B^q) + f (A B^{q-1} + A^{q-1} B) + g q(q-1) eps A B (A + B)^{q-2}
double angular_rhs(double A, double B, int q, double f, double g, double eps)
{
    const double qd = q;
    return -f * (std::pow(A, qd) + std::pow(B, qd)) +
           f * (A * std::pow(B, qd - 1.0) + std::pow(A, qd - 1.0) * B) +
           g * qd * (qd - 1.0) * eps * A * B * std::pow(A + B, qd - 2.0);
}

long double times_pow(long double x, long double y, long double e)
{
    if (x == 0.0L) return 0.0L;
    return x * std::pow(y, e);
}

}  // namespace

void CheckReport::record(double margin, double scale)
{
    ++trials;
    if (std::isnan(margin)) {
        ++flagged;
        return;
    }
    worst_margin = std::min(worst_margin, margin);
    const double s = scale > 0.0 ? scale : 1.0;
    worst_relative_margin = std::min(worst_relative_margin, margin / s);
    if (margin < -tolerance * s) ++violations;
}

void CheckReport::merge(const CheckReport& other)
{
    trials += other.trials;
    violations += other.violations;
    flagged += other.flagged;
    worst_margin = std::min(worst_margin, other.worst_margin);
    worst_relative_margin = std::min(worst_relative_margin, other.worst_relative_margin);
}

AngularSetup::AngularSetup(const AngularKernel& k, int q_max) : kernel(k)
{
    if (k.is_unbounded()) {
        throw ConfigError("angular checks need a bounded kernel (Constant or theta_min > 0)");
    }
    constant = angular_constant(k);
    eps = epsilon_vector(k, std::max(q_max, 2));
    const auto r = kernel_integral(k, [](double) { return 1.0; });
    rate = k.family() == Family::Kac ? 2.0 * r.value : r.value;
}

AngularTrial angular_kac_trial(double v, double v_star, int q, const AngularSetup& setup)
{
    if (setup.kernel.family() != Family::Kac) throw DomainError("angular_kac_trial: Kac kernel required");
    if (q < 2 || static_cast<std::size_t>(q) >= setup.eps.size()) {
        throw DomainError("angular_kac_trial: q out of range");
    }
    const double A = bracket2(v);
    const double B = bracket2(v_star);
    const double qd = q;
    const double scale = std::pow(A + B, qd);
    const double base = std::pow(A, qd) + std::pow(B, qd);

    auto jump = [&](double theta) {
        double a = v;
        double b = v_star;
        kac_collide_inplace(a, b, theta);
        return std::pow(bracket2(a), qd) + std::pow(bracket2(b), qd) - base;
    };

    AngularTrial out;
    out.rhs = angular_rhs(A, B, q, 0.5 * setup.constant, setup.constant, setup.eps[static_cast<std::size_t>(q)]);
    try {
        out.lhs = kernel_integral(setup.kernel, [&](double th) { return jump(th) + jump(-th); },
                                  angular_options(scale))
                      .value;

        const double vv = v * v_star;
        if (vv != 0.0) {
            auto odd = [&](double theta) {
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                const double e1 = A * c * c + B * s * s;
                const double e2 = A * s * s + B * c * c;
                const double w = setup.kernel(std::abs(theta));
                return w * 2.0 * qd * vv * s * c * (std::pow(e2, qd - 1.0) - std::pow(e1, qd - 1.0));
            };
            const double tm = setup.kernel.theta_min();
            std::vector<double> breaks;
            if (tm > 0.0) {
                breaks = {-tm, tm};
            } else {
                breaks = {0.0};
            }
            const double odd_scale = 2.0 * qd * std::pow(A + B, qd - 1.0) * std::abs(vv) * setup.rate;
            const auto r = integrate_with_breaks(odd, -kPi, kPi, breaks, angular_options(odd_scale));
            out.odd_term = odd_scale > 0.0 ? r.value / odd_scale : 0.0;
        }
    } catch (const AccuracyError&) {
        out.converged = false;
    }
    out.margin = out.rhs - out.lhs;
    return out;
}

AngularTrial angular_boltzmann_trial(std::span<const double> v, std::span<const double> v_star, int q,
                                     const AngularSetup& setup)
{
    const AngularKernel& k = setup.kernel;
    if (k.family() != Family::Boltzmann) throw DomainError("angular_boltzmann_trial: Boltzmann kernel required");
    const int d = k.dimension();
    if (d != 2 && d != 3) throw ConfigError("angular_boltzmann_trial: d must be 2 or 3");
    if (v.size() != static_cast<std::size_t>(d) || v_star.size() != static_cast<std::size_t>(d)) {
        throw DomainError("angular_boltzmann_trial: velocity dimension mismatch");
    }
    if (q < 2 || static_cast<std::size_t>(q) >= setup.eps.size()) {
        throw DomainError("angular_boltzmann_trial: q out of range");
    }
    const double A = bracket2(v);
    const double B = bracket2(v_star);
    const double qd = q;
    const double eps = setup.eps[static_cast<std::size_t>(q)];

    AngularTrial out;
    out.rhs = angular_rhs(A, B, q, setup.constant, setup.constant, eps);

    const auto du = static_cast<std::size_t>(d);
    double u[3];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < du; ++i) {
        u[i] = v[i] - v_star[i];
        norm2 += u[i] * u[i];
    }
    if (norm2 == 0.0) {
        out.margin = out.rhs;
        return out;
    }
    for (std::size_t i = 0; i < du; ++i) u[i] /= std::sqrt(norm2);

    std::vector<double> phis;
    double weight = 0.0;
    if (d == 2) {
        phis = {0.0, kPi};
        weight = 1.0;
    } else {
        const int m = 2 * q + 4;
        for (int j = 0; j < m; ++j) phis.push_back(2.0 * kPi * j / m);
        weight = 2.0 * kPi / m;
    }

    const double base = std::pow(A, qd) + std::pow(B, qd);
    auto polar = [&](double theta) {
        double sigma[3];
        double a[3];
        double b[3];
        double sum = 0.0;
        for (double phi : phis) {
            scattering_direction(std::span<const double>(u, du), theta, phi, std::span<double>(sigma, du));
            std::copy(v.begin(), v.end(), a);
            std::copy(v_star.begin(), v_star.end(), b);
            boltzmann_collide_inplace(std::span<double>(a, du), std::span<double>(b, du),
                                      std::span<const double>(sigma, du));
            sum += std::pow(bracket2(std::span<const double>(a, du)), qd) +
                   std::pow(bracket2(std::span<const double>(b, du)), qd) - base;
        }
        return weight * sum * std::pow(std::sin(theta), d - 2);
    };
    try {
        out.lhs = kernel_integral(k, polar, angular_options(std::pow(A + B, qd))).value;
    } catch (const AccuracyError&) {
        out.converged = false;
    }
    out.margin = out.rhs - out.lhs;
    return out;
}

namespace {

void record_trial(CheckReport& report, const AngularTrial& t)
{
    if (!t.converged) {
        ++report.trials;
        ++report.flagged;
        return;
    }
    report.record(t.margin, std::max(std::abs(t.rhs), std::abs(t.lhs)));
}

CheckReport angular_report(const char* id, double tolerance, std::string ranges)
{
    CheckReport r;
    r.id = id;
    r.tolerance = tolerance;
    r.relative = true;
    r.ranges = std::move(ranges);
    return r;
}

}  // namespace

CheckReport check_angular_kac(double v, double v_star, int q, const AngularKernel& kernel)
{
    const AngularSetup setup(kernel, q);
    CheckReport r = angular_report("angular_kac", 1e-8, "single trial");
    record_trial(r, angular_kac_trial(v, v_star, q, setup));
    return r;
}

CheckReport check_angular_boltzmann(std::span<const double> v, std::span<const double> v_star, int q,
                                    const AngularKernel& kernel)
{
    const AngularSetup setup(kernel, q);
    CheckReport r = angular_report("angular_boltzmann", 1e-8, "single trial");
    record_trial(r, angular_boltzmann_trial(v, v_star, q, setup));
    return r;
}

namespace {

std::string sweep_ranges(const AngularSweep& s, int d)
{
    return "v components in [-" + std::to_string(s.v_max) + ", " + std::to_string(s.v_max) + "], d = " +
           std::to_string(d) + ", q in [" + std::to_string(s.q_min) + ", " + std::to_string(s.q_max) + "]";
}

}  // namespace

AngularSweepResult sweep_angular_kac(const AngularKernel& kernel, const AngularSweep& sweep)
{
    const AngularSetup setup(kernel, sweep.q_max);
    AngularSweepResult res;
    res.report = angular_report("angular_kac", sweep.tolerance, sweep_ranges(sweep, 1));
    Rng rng(sweep.seed);
    const auto span_q = static_cast<std::uint64_t>(sweep.q_max - sweep.q_min + 1);
    for (std::size_t i = 0; i < sweep.trials; ++i) {
        const double v = rng.uniform(-sweep.v_max, sweep.v_max);
        const double w = rng.uniform(-sweep.v_max, sweep.v_max);
        const int q = sweep.q_min + static_cast<int>(rng.below(span_q));
        const AngularTrial t = angular_kac_trial(v, w, q, setup);
        record_trial(res.report, t);
        res.max_odd_term = std::max(res.max_odd_term, std::abs(t.odd_term));
    }
    return res;
}

AngularSweepResult sweep_angular_boltzmann(const AngularKernel& kernel, const AngularSweep& sweep)
{
    const AngularSetup setup(kernel, sweep.q_max);
    const auto d = static_cast<std::size_t>(kernel.dimension());
    AngularSweepResult res;
    res.report = angular_report("angular_boltzmann", sweep.tolerance, sweep_ranges(sweep, kernel.dimension()));
    Rng rng(sweep.seed);
    const auto span_q = static_cast<std::uint64_t>(sweep.q_max - sweep.q_min + 1);
    std::vector<double> v(d);
    std::vector<double> w(d);
    for (std::size_t i = 0; i < sweep.trials; ++i) {
        for (auto& x : v) x = rng.uniform(-sweep.v_max, sweep.v_max);
        for (auto& x : w) x = rng.uniform(-sweep.v_max, sweep.v_max);
        const int q = sweep.q_min + static_cast<int>(rng.below(span_q));
        record_trial(res.report, angular_boltzmann_trial(v, w, q, setup));
    }
    return res;
}

double check_convex_estimate(double a, double b, double t, double p)
{
    if (!(a >= 0.0 && b >= 0.0)) throw DomainError("check_convex_estimate: a, b must be >= 0");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("check_convex_estimate: t must lie in [0, 1]");
    if (!(p > 0.0) || (p > 1.0 && p < 2.0)) {
        throw DomainError("check_convex_estimate: p must lie in (0, 1] or [2, inf)");
    }
    const long double A = a;
    const long double B = b;
    const long double T = t;
    const long double P = p;
    const long double s = 1.0L - T;
    const long double ap = std::pow(A, P);
    const long double bp = std::pow(B, P);
    const long double lhs = std::pow(T * A + s * B, P) + std::pow(s * A + T * B, P) - ap - bp;
    const long double w = 2.0L * T * s;
    long double rhs = -w * (ap + bp);
    if (w != 0.0L) rhs += w * (times_pow(A, B, P - 1.0L) + times_pow(B, A, P - 1.0L));
    return static_cast<double>(rhs - lhs);
}

CheckReport sweep_convex_estimate(double tolerance)
{
    CheckReport r;
    r.id = "convex_estimate";
    r.tolerance = tolerance;
    r.ranges = "a, b in {0, 0.1, ..., 5}; t in {0, 0.05, ..., 1}; p in {0.3, 1, 2, 2.5, 6}";
    for (double p : {0.3, 1.0, 2.0, 2.5, 6.0}) {
        for (int i = 0; i <= 50; ++i) {
            for (int j = 0; j <= 50; ++j) {
                for (int k = 0; k <= 20; ++k) {
                    r.record(check_convex_estimate(i / 10.0, j / 10.0, k / 20.0, p));
                }
            }
        }
    }
    return r;
}

double check_binomial_split(double x, double y, double p)
{
    if (!(x > 0.0 && y > 0.0)) throw DomainError("check_binomial_split: x, y must be positive");
    if (!(p > 1.0)) throw DomainError("check_binomial_split: p must exceed 1");
    const int kp = static_cast<int>(std::floor((p + 1.0) / 2.0));
    double rhs = 0.0;
    for (int k = 0; k <= kp; ++k) {
        const double c = std::exp(log_binomial(p, k));
        rhs += c * (std::pow(x, k) * std::pow(y, p - k) + std::pow(x, p - k) * std::pow(y, k));
    }
    return rhs - std::pow(x + y, p);
}

CheckReport sweep_binomial_split(double tolerance)
{
    CheckReport r;
    r.id = "binomial_split";
    r.tolerance = tolerance;
    r.relative = true;
    r.ranges = "x, y in {0.1, 0.2, ..., 10}; p in {1.5, 2, 3.7, 8}";
    for (double p : {1.5, 2.0, 3.7, 8.0}) {
        for (int i = 1; i <= 100; ++i) {
            for (int j = 1; j <= 100; ++j) {
                const double x = i / 10.0;
                const double y = j / 10.0;
                r.record(check_binomial_split(x, y, p), std::pow(x + y, p));
            }
        }
    }
    return r;
}

double check_product_monotonicity(double x, double y, double a, double b, double p)
{
    if (!(x >= 0.0 && y >= 0.0)) throw DomainError("check_product_monotonicity: x, y must be >= 0");
    if (!(0.0 <= b && b <= a && a <= 0.5 * p)) {
        throw DomainError("check_product_monotonicity: require 0 <= b <= a <= p/2");
    }
    auto pair = [&](double e) { return std::pow(x, e) * std::pow(y, p - e) + std::pow(x, p - e) * std::pow(y, e); };
    return pair(b) - pair(a);
}

CheckReport sweep_product_monotonicity(std::size_t trials, std::uint64_t seed, double tolerance)
{
    CheckReport r;
    r.id = "product_monotonicity";
    r.tolerance = tolerance;
    r.relative = true;
    r.ranges = "p in (0, 20], 0 <= b <= a <= p/2, x, y in [0, 10]";
    Rng rng(seed);
    for (std::size_t i = 0; i < trials; ++i) {
        const double p = 20.0 * (1.0 - rng.uniform());
        const double a = 0.5 * p * rng.uniform();
        const double b = a * rng.uniform();
        const double x = 10.0 * rng.uniform();
        const double y = 10.0 * rng.uniform();
        const double scale = std::pow(x, b) * std::pow(y, p - b) + std::pow(x, p - b) * std::pow(y, b);
        r.record(check_product_monotonicity(x, y, a, b, p), scale);
    }
    return r;
}

BetaDecayReport check_beta_sum_decay(double a, int p_max)
{
    if (!(a > 1.0)) throw DomainError("check_beta_sum_decay: a must exceed 1");
    if (p_max < 10) throw DomainError("check_beta_sum_decay: p_max must be >= 10");
    BetaDecayReport rep;
    rep.a = a;
    rep.p_max = p_max;
    const int p_lo = p_max / 2;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    int n = 0;
    for (int p = 3; p <= p_max; ++p) {
        const double s = beta_binomial_sum(a, p);
        rep.sums.push_back(s);
        const double scaled = std::pow(static_cast<double>(p), 1.0 + a) * s;
        rep.sup_full = std::max(rep.sup_full, scaled);
        if (p >= p_lo) {
            rep.sup_upper = std::max(rep.sup_upper, scaled);
            const double x = std::log(static_cast<double>(p));
            const double y = std::log(s);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2 || denom == 0.0) throw AccuracyError("check_beta_sum_decay: degenerate fit");
    rep.slope = (n * sxy - sx * sy) / denom;
    rep.intercept = (sy - rep.slope * sx) / n;
    rep.slope_ok = rep.slope <= -(1.0 + a) + 0.15;
    rep.sup_stable = rep.sup_upper >= 0.95 * rep.sup_full;
    return rep;
}

}  // namespace kmlab
