#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kmlab {

using Integrand = std::function<double(double)>;

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    std::size_t max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule, computed by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Fixed n-point Gauss-Legendre on [a, b].
double integrate_fixed(const Integrand& f, double a, double b, std::size_t n);

/// Globally adaptive Gauss-Legendre: each panel is evaluated with a 10- and a
/// 20-point rule, the worst panel is bisected until the summed error estimate
/// meets max(abs_tol, rel_tol |I|). Throws AccuracyError when the panel budget
/// is exhausted.
QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// Integral over [a, b] of an integrand with an integrable power-type
/// singularity (or zero) at a. The interval is cut dyadically toward a, each
/// piece integrated adaptively, and the remaining sliver [a, a + h] is
/// closed with a geometric tail estimate from the last two pieces.
QuadratureResult integrate_left_singular(const Integrand& f, double a, double b,
                                         const QuadratureOptions& opts = {});

/// Integral over [a, b] with interior break points (sorted, inside (a, b)).
QuadratureResult integrate_with_breaks(const Integrand& f, double a, double b,
                                       std::span<const double> breaks,
                                       const QuadratureOptions& opts = {});

}  // namespace kmlab
