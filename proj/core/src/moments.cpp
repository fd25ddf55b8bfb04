#include "kmlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "kmlab/errors.hpp"
#include "summation.hpp"

namespace kmlab {

namespace {

constexpr double kLinearLimit = 700.0;

double speed2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

std::size_t batch_count(std::size_t n)
{
    const auto nb = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    return std::max<std::size_t>(nb, 1);
}

}  // namespace

MomentEstimate average_weights(std::span<const double> weights)
{
    const std::size_t n = weights.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    const std::size_t nb = batch_count(n);

    detail::CompensatedSum total;
    std::vector<double> batch_means(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * n / nb;
        const std::size_t hi = (b + 1) * n / nb;
        detail::CompensatedSum part;
        for (std::size_t i = lo; i < hi; ++i) part.add(weights[i]);
        total.add(part.value());
        batch_means[b] = part.value() / static_cast<double>(hi - lo);
    }

    MomentEstimate out;
    out.value = total.value() / static_cast<double>(n);
    out.log_value = std::log(out.value);
    if (nb > 1) {
        detail::CompensatedSum mean_of_means;
        for (double m : batch_means) mean_of_means.add(m);
        const double mbar = mean_of_means.value() / static_cast<double>(nb);
        detail::CompensatedSum ss;
        for (double m : batch_means) ss.add((m - mbar) * (m - mbar));
        out.std_err = std::sqrt(ss.value() / static_cast<double>(nb * (nb - 1)));
    }
    return out;
}

MomentEstimate average_log_weights(std::span<const double> log_weights)
{
    if (log_weights.empty()) throw DomainError("moment of an empty ensemble");
    const double wmax = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> w(log_weights.size());
    if (wmax <= kLinearLimit) {
        std::transform(log_weights.begin(), log_weights.end(), w.begin(),
                       [](double x) { return std::exp(x); });
        return average_weights(w);
    }
    std::transform(log_weights.begin(), log_weights.end(), w.begin(),
                   [wmax](double x) { return std::exp(x - wmax); });
    const MomentEstimate scaled = average_weights(w);
    MomentEstimate out;
    out.log_value = wmax + std::log(scaled.value);
    out.value = std::exp(out.log_value);
    out.std_err = scaled.std_err * std::exp(wmax);
    out.degraded = true;
    return out;
}

MomentEstimate poly_moment(const ParticleEnsemble& ens, double q)
{
    if (!(q >= 0.0)) throw DomainError("poly_moment: order must be nonnegative");
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    if (q == 0.0) return {1.0, 0.0, 0.0, false};

    std::vector<double> base(n);
    double wmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        base[i] = 1.0 + speed2(ens.particle(i));
        wmax = std::max(wmax, 0.5 * q * std::log(base[i]));
    }
    if (wmax <= kLinearLimit) {
        for (double& b : base) b = std::pow(b, 0.5 * q);
        return average_weights(base);
    }
    for (double& b : base) b = 0.5 * q * std::log(b);
    return average_log_weights(base);
}

std::vector<double> log_even_moments(const ParticleEnsemble& ens, int q_max)
{
    if (q_max < 0) throw DomainError("log_even_moments: q_max must be nonnegative");
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = std::log1p(speed2(ens.particle(i)));
    std::sort(l.begin(), l.end(), std::greater<>());
    const double log_n = std::log(static_cast<double>(n));

    std::vector<double> out(static_cast<std::size_t>(q_max) + 1, 0.0);
    for (int q = 1; q <= q_max; ++q) {
        const double top = q * l[0];
        detail::CompensatedSum sum;
        for (double li : l) {
            const double x = q * li - top;
            if (x < -50.0) break;
            sum.add(std::exp(x));
        }
        out[static_cast<std::size_t>(q)] = top + std::log(sum.value()) - log_n;
    }
    return out;
}

MomentEstimate stretched_exp_moment(const ParticleEnsemble& ens, const MLSpec& spec)
{
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = spec.alpha() * std::pow(1.0 + speed2(ens.particle(i)), 0.5 * spec.s());
    }
    return average_log_weights(w);
}

MomentEstimate ml_moment(const ParticleEnsemble& ens, const MLSpec& spec)
{
    if (spec.s() == 2.0) return stretched_exp_moment(ens, spec);
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    const double a = spec.a();
    const double scale = std::pow(spec.alpha(), a);

    std::vector<double> values(n);
    std::vector<double> logs(n);
    bool linear = true;
    for (std::size_t i = 0; i < n; ++i) {
        const MittagLefflerValue e =
            mittag_leffler(a, scale * (1.0 + speed2(ens.particle(i))));
        values[i] = e.value;
        logs[i] = e.log_value;
        if (e.log_scaled || e.log_value > kLinearLimit) linear = false;
    }
    return linear ? average_weights(values) : average_log_weights(logs);
}

double ml_partial_sum(std::span<const double> moments, const MLSpec& spec, int n)
{
    if (n < 0) throw DomainError("ml_partial_sum: n must be nonnegative");
    if (moments.size() < static_cast<std::size_t>(n) + 1) {
        throw DomainError("ml_partial_sum: missing moment of order " +
                          std::to_string(2 * (static_cast<int>(moments.size()))));
    }
    if (spec.alpha() == 0.0 || n == 0) return moments[0];

    const double a = spec.a();
    const double log_alpha_a = a * std::log(spec.alpha());
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n) + 1);
    double lmax = -std::numeric_limits<double>::infinity();
    for (int q = 0; q <= n; ++q) {
        const double m = moments[static_cast<std::size_t>(q)];
        if (m < 0.0) throw DomainError("ml_partial_sum: negative moment");
        const double l = q == 0 ? std::log(m)
                                : q * log_alpha_a - log_gamma(a * q + 1.0) + std::log(m);
        log_terms.push_back(l);
        lmax = std::max(lmax, l);
    }
    detail::CompensatedSum sum;
    if (lmax <= kLinearLimit) {
        sum.add(moments[0]);
        for (int q = 1; q <= n; ++q) {
            const double coef = std::exp(q * log_alpha_a - log_gamma(a * q + 1.0));
            sum.add(coef * moments[static_cast<std::size_t>(q)]);
        }
        return sum.value();
    }
    for (double l : log_terms) sum.add(std::exp(l - lmax));
    return std::exp(lmax + std::log(sum.value()));
}

double interpolate_moment(double m_low, double m_high, double p, int q)
{
    if (!(m_low > 0.0) || !(m_high > 0.0)) {
        throw DomainError("interpolate_moment: moments must be positive");
    }
    const double lo = 2.0 * q - 2.0;
    const double hi = 2.0 * q;
    if (q < 1 || !(p >= lo && p <= hi)) {
        throw DomainError("interpolate_moment: p outside [2q-2, 2q]");
    }
    if (p == hi) return m_high;
    if (p == lo) return m_low;
    const double w_low = 0.5 * (hi - p);
    const double w_high = 0.5 * (p - lo);
    return std::exp(w_low * std::log(m_low) + w_high * std::log(m_high));
}

std::vector<double> component_second_moments(const ParticleEnsemble& ens)
{
    const std::size_t n = ens.size();
    if (n == 0) throw DomainError("moment of an empty ensemble");
    std::vector<detail::CompensatedSum> sums(static_cast<std::size_t>(ens.d));
    for (std::size_t i = 0; i < n; ++i) {
        auto v = ens.particle(i);
        for (std::size_t k = 0; k < v.size(); ++k) sums[k].add(v[k] * v[k]);
    }
    std::vector<double> out;
    for (const auto& s : sums) out.push_back(s.value() / static_cast<double>(n));
    return out;
}

}  // namespace kmlab
