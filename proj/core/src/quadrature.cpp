#include "kmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

GaussLegendreRule compute_rule(std::size_t n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b, std::size_t& evals)
{
    static const auto& lo = gauss_legendre(10);
    static const auto& hi = gauss_legendre(20);
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s_lo = 0.0;
    double s_hi = 0.0;
    for (std::size_t i = 0; i < lo.nodes.size(); ++i) s_lo += lo.weights[i] * f(c + h * lo.nodes[i]);
    for (std::size_t i = 0; i < hi.nodes.size(); ++i) s_hi += hi.weights[i] * f(c + h * hi.nodes[i]);
    evals += lo.nodes.size() + hi.nodes.size();
    return {a, b, s_hi * h, std::abs(s_hi - s_lo) * h};
}

double tolerance(const QuadratureOptions& opts, double value)
{
    return std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t n)
{
    if (n == 0) throw DomainError("gauss_legendre: rule order must be positive");
    static std::mutex mutex;
    static std::map<std::size_t, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate_fixed(const Integrand& f, double a, double b, std::size_t n)
{
    const auto& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * f(c + h * rule.nodes[i]);
    return sum * h;
}

QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                    const QuadratureOptions& opts)
{
    QuadratureResult out;
    if (a == b) return out;
    std::priority_queue<Panel> heap;
    heap.push(evaluate_panel(f, a, b, out.evaluations));
    double total = heap.top().value;
    double error = heap.top().error;
    const double min_width = std::abs(b - a) * 1e-13;

    std::vector<Panel> frozen;
    while (error > tolerance(opts, total) && !heap.empty()) {
        if (heap.size() + frozen.size() >= opts.max_intervals) {
            throw AccuracyError("integrate_adaptive: panel budget exhausted on [" +
                                std::to_string(a) + ", " + std::to_string(b) +
                                "], error estimate " + std::to_string(error));
        }
        Panel worst = heap.top();
        heap.pop();
        if (std::abs(worst.b - worst.a) < min_width) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate_panel(f, worst.a, mid, out.evaluations);
        Panel right = evaluate_panel(f, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the panels to drop the drift of the running updates.
    total = 0.0;
    error = 0.0;
    for (const auto& p : frozen) total += p.value, error += p.error;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = error;
    return out;
}

QuadratureResult integrate_left_singular(const Integrand& f, double a, double b,
                                         const QuadratureOptions& opts)
{
    QuadratureResult out;
    if (a == b) return out;
    QuadratureOptions piece_opts = opts;
    piece_opts.abs_tol = opts.abs_tol / 8.0;

    double hi = b;
    double prev = 0.0;
    bool have_prev = false;
    constexpr int kMaxPieces = 1000;
    for (int k = 0; k < kMaxPieces; ++k) {
        const double lo = a + 0.5 * (hi - a);
        if (lo == hi || lo == a) break;
        const auto piece = integrate_adaptive(f, lo, hi, piece_opts);
        out.value += piece.value;
        out.abs_error += piece.abs_error;
        out.evaluations += piece.evaluations;
        hi = lo;

        if (have_prev && k >= 6) {
            if (piece.value == 0.0 && prev == 0.0) return out;
            const double ratio = piece.value / prev;
            if (ratio >= 0.0 && ratio < 0.98) {
                const double tail = piece.value * ratio / (1.0 - ratio);
                if (std::abs(tail) <= 0.5 * tolerance(opts, out.value)) {
                    out.value += tail;
                    out.abs_error += std::abs(tail);
                    return out;
                }
            }
        }
        prev = piece.value;
        have_prev = true;
    }
    if (std::abs(prev) > tolerance(opts, out.value)) {
        throw AccuracyError("integrate_left_singular: endpoint contribution did not decay");
    }
    return out;
}

QuadratureResult integrate_with_breaks(const Integrand& f, double a, double b,
                                       std::span<const double> breaks,
                                       const QuadratureOptions& opts)
{
    QuadratureResult out;
    double lo = a;
    auto add = [&](double x0, double x1) {
        if (x1 <= x0) return;
        const auto r = integrate_adaptive(f, x0, x1, opts);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
    };
    for (double x : breaks) {
        if (x <= lo || x >= b) continue;
        add(lo, x);
        lo = x;
    }
    add(lo, b);
    return out;
}

}  // namespace kmlab
