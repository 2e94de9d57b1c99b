#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qcm {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule of the given order, computed once by Newton iteration on the Legendre
/// polynomial and cached.
const GaussLegendreRule& gauss_legendre_rule(std::size_t n);

/// Fixed-order Gauss-Legendre quadrature of f over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
};

/// Adaptive Gauss-Legendre: panels are bisected until the 32- vs 64-point
/// difference on each panel is below the tolerance share assigned to it.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol = 1e-10);

} // namespace qcm
