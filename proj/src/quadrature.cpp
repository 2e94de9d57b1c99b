#include "qcm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

GaussLegendreRule compute_rule(std::size_t n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        // Chebyshev-angle starting guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) - 0.25) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // One more evaluation at the converged node for the weight.
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[i - 1] = x;
        rule.weights[i - 1] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussLegendreRule& gauss_legendre_rule(std::size_t n) {
    static std::map<std::size_t, GaussLegendreRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n) {
    const GaussLegendreRule& rule = gauss_legendre_rule(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

namespace {

void integrate_panel(const std::function<double(double)>& f, double a, double b,
                     double tol, int depth, QuadratureResult& out) {
    const double coarse = integrate_gl(f, a, b, 32);
    const double fine = integrate_gl(f, a, b, 64);
    const double err = std::abs(fine - coarse);
    if (err <= tol || depth >= 24) {
        out.value += fine;
        out.error_estimate += err;
        if (err > tol) out.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    integrate_panel(f, a, mid, 0.5 * tol, depth + 1, out);
    integrate_panel(f, mid, b, 0.5 * tol, depth + 1, out);
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol) {
    if (!(abs_tol > 0.0)) throw DomainError("integrate_adaptive: abs_tol must be positive");
    QuadratureResult result;
    result.converged = true;
    if (a == b) return result;
    integrate_panel(f, a, b, abs_tol, 0, result);
    return result;
}

} // namespace qcm
