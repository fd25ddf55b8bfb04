#include "kmlab/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

__extension__ typedef unsigned __int128 u128;

bool is_small_integer(double x, double limit)
{
    return x >= 0.0 && x <= limit && std::floor(x) == x;
}

// C(n, k) for n <= 66 fits in 64 bits; the running product needs 128.
double exact_binomial(unsigned n, unsigned k)
{
    if (k > n - k) k = n - k;
    u128 r = 1;
    for (unsigned i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return static_cast<double>(r);
}

}  // namespace

double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma: argument must be positive and finite, got " +
                          std::to_string(x));
    }
    return boost::math::lgamma(x);
}

double log_beta(double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0)) {
        throw DomainError("beta_fn: arguments must be positive");
    }
    return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
}

double beta_fn(double x, double y)
{
    // Symmetric by construction: the sum x + y and the two lgamma terms commute.
    if (x > y) std::swap(x, y);
    return std::exp(log_beta(x, y));
}

double log_binomial(double n, double k)
{
    if (!(n >= 0.0) || !(k >= 0.0) || k > n) {
        throw DomainError("log_binomial: require 0 <= k <= n");
    }
    if (is_small_integer(n, 66.0) && std::floor(k) == k) {
        return std::log(exact_binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
    }
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double beta_binomial_sum(double a, int p)
{
    if (p < 2) throw DomainError("beta_binomial_sum: p must be >= 2");
    if (!(a > 0.0)) throw DomainError("beta_binomial_sum: a must be positive");
    const int kmax = (p + 1) / 2;
    std::vector<double> logs;
    for (int k = 1; k <= kmax && k - 1 <= p - 2; ++k) {
        logs.push_back(log_binomial(p - 2, k - 1) + log_beta(a * k + 1.0, a * (p - k) + 1.0));
    }
    const double lmax = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - lmax);
    return std::exp(lmax + std::log(sum));
}

MLSpec::MLSpec(double s, double alpha) : s_(s), alpha_(alpha)
{
    if (!(s > 0.0 && s <= 2.0)) throw DomainError("MLSpec: order s must lie in (0, 2]");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("MLSpec: rate alpha must be positive");
}

namespace {

double series_log_ml(double a, double x, std::size_t& terms)
{
    if (!(a >= 1.0)) {
        throw DomainError("mittag_leffler: index a < 1 is not supported");
    }
    if (!(x >= 0.0)) throw DomainError("mittag_leffler: argument must be nonnegative");
    terms = 1;
    if (x == 0.0) return 0.0;
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();

    const double lx = std::log(x);
    const double cutoff = std::log(1e-16);

    // Streaming log-sum-exp: sum = exp(lmax) * scaled.
    double lmax = 0.0;   // q = 0 term is 1
    double scaled = 1.0;
    double prev = 0.0;
    bool past_peak = false;
    for (std::size_t q = 1; q <= kMittagLefflerMaxTerms; ++q) {
        const double lt = static_cast<double>(q) * lx - boost::math::lgamma(a * static_cast<double>(q) + 1.0);
        if (lt > lmax) {
            scaled = scaled * std::exp(lmax - lt) + 1.0;
            lmax = lt;
        } else {
            scaled += std::exp(lt - lmax);
        }
        if (lt < prev) past_peak = true;
        prev = lt;
        if (past_peak && lt < cutoff + lmax + std::log(scaled)) {
            terms = q + 1;
            return lmax + std::log(scaled);
        }
    }
    throw AccuracyError("mittag_leffler: series did not converge within " +
                        std::to_string(kMittagLefflerMaxTerms) + " terms");
}

}  // namespace

double log_mittag_leffler(double a, double x)
{
    std::size_t terms = 0;
    return series_log_ml(a, x, terms);
}

MittagLefflerValue mittag_leffler(double a, double x)
{
    std::size_t terms = 0;
    const double lv = series_log_ml(a, x, terms);
    if (x == 0.0) return {1.0, 0.0, false, terms};
    const bool scaled = std::pow(x, 1.0 / a) > kMittagLefflerLogThreshold;
    const double v = scaled ? std::numeric_limits<double>::infinity() : std::exp(lv);
    return {v, lv, scaled, terms};
}

}  // namespace kmlab
