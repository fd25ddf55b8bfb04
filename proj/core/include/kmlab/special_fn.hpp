#pragma once

#include <cstddef>

namespace kmlab {

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), evaluated in the
/// log domain.
double beta_fn(double x, double y);
double log_beta(double x, double y);

/// ln C(n, k) for real 0 <= k <= n. Small integer arguments are exact.
double log_binomial(double n, double k);

/// S(p) = sum_{k=1}^{floor((p+1)/2)} C(p-2, k-1) B(a k + 1, a (p-k) + 1) for
/// integer p >= 2, summed in the log domain.
double beta_binomial_sum(double a, int p);

/// Exponential order s and rate alpha of a stretched exponential weight
/// exp(alpha <v>^s), together with the Mittag-Leffler index a = 2/s.
class MLSpec {
public:
    MLSpec(double s, double alpha);

    double s() const noexcept { return s_; }
    double alpha() const noexcept { return alpha_; }
    double a() const noexcept { return 2.0 / s_; }

private:
    double s_;
    double alpha_;
};

/// Result of a Mittag-Leffler evaluation. When `log_scaled` is set the value
/// exceeds double range (x^{1/a} > 700) and only `log_value` is meaningful.
struct MittagLefflerValue {
    double value;
    double log_value;
    bool log_scaled;
    std::size_t terms;
};

/// E_a(x) = sum_q x^q / Gamma(a q + 1) for a >= 1, x >= 0.
///
/// Terms are accumulated in the log domain and the series is cut once past
/// its peak when the next term drops below 1e-16 of the partial sum. More than
/// 1e5 terms raises AccuracyError.
MittagLefflerValue mittag_leffler(double a, double x);

/// ln E_a(x), same series as mittag_leffler but never overflows.
double log_mittag_leffler(double a, double x);

inline constexpr double kMittagLefflerLogThreshold = 700.0;
inline constexpr std::size_t kMittagLefflerMaxTerms = 100000;

}  // namespace kmlab
