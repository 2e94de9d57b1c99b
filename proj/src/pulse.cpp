#include "qcm/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcm/constants.hpp"
#include "qcm/parallel.hpp"
#include "qcm/quadrature.hpp"

namespace qcm {

void PulseSpec::validate() const {
    if (omega_peak_hz < 0.0) throw DomainError("pulse: omega_peak_hz must be >= 0");
    if (sigma_s <= 0.0) throw DomainError("pulse: sigma_s must be positive");
    if (n_trunc <= 0.0) throw DomainError("pulse: n_trunc must be positive");
}

double envelope(double t_s, const PulseSpec& p) {
    if (std::abs(t_s) >= p.n_trunc * p.sigma_s) return 0.0;
    const double u = t_s / p.sigma_s;
    return p.omega_peak_hz * std::exp(-0.5 * u * u);
}

double fringe_calibration(double n_trunc) {
    if (n_trunc <= 0.0) throw DomainError("fringe_calibration: n_trunc must be positive");
    return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * std::erf(n_trunc / std::numbers::sqrt2));
}

double pe_continuous(double omega_hz, double delta_hz, double t_s) {
    if (t_s < 0.0) throw DomainError("pe_continuous: t_s must be >= 0");
    if (omega_hz == 0.0) return 0.0;
    const double o2 = omega_hz * omega_hz;
    const double d2 = delta_hz * delta_hz;
    const double generalized = std::sqrt(o2 + d2);
    const double s = std::sin(std::numbers::pi * generalized * t_s);
    return o2 / (o2 + d2) * s * s;
}

double pe_amplitude_factor(const PulseSpec& p) {
    p.validate();
    const double edge2 =
        p.omega_peak_hz * p.omega_peak_hz * std::exp(-p.n_trunc * p.n_trunc);
    const double d2 = p.detuning_hz * p.detuning_hz;
    if (edge2 == 0.0) return 0.0;
    return edge2 / (edge2 + d2);
}

namespace {

// Dimensionless phase integral J(r) = int_{-n}^{n} sqrt(e^{-tau^2} + r^2) dtau
// with r = |Delta|/Omega. J(0) has the closed form sqrt(2 pi) erf(n/sqrt 2).
double phase_integral(double r, double n) {
    const double tol = 1e-10 * std::max(1.0, std::abs(r));
    const auto f = [r](double tau) {
        return std::sqrt(std::exp(-tau * tau) + r * r);
    };
    const QuadratureResult q = integrate_adaptive(f, -n, n, tol);
    if (!q.converged)
        throw NumericalError("pe_truncated_gaussian: phase quadrature not converged, "
                             "error estimate " + std::to_string(q.error_estimate));
    return q.value;
}

double on_resonance_integral(double n) {
    return std::sqrt(2.0 * std::numbers::pi) * std::erf(n / std::numbers::sqrt2);
}

} // namespace

double pe_truncated_gaussian(const PulseSpec& p, PhaseConvention mode) {
    p.validate();
    if (p.omega_peak_hz == 0.0) return 0.0;
    const double r = std::abs(p.detuning_hz) / p.omega_peak_hz;
    const double j_r = phase_integral(r, p.n_trunc);
    double theta;
    if (mode == PhaseConvention::normalized) {
        theta = std::numbers::pi * p.sigma_s * p.omega_peak_hz * j_r /
                on_resonance_integral(p.n_trunc);
    } else {
        theta = std::numbers::pi * p.sigma_s * p.omega_peak_hz * j_r;
    }
    const double s = std::sin(theta);
    return pe_amplitude_factor(p) * s * s;
}

namespace {

struct BlochState {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0; // ground state
};

struct BlochRates {
    double du, dv, dw;
};

// Drive seen by the integrator. Inside the pulse segment the envelope is
// taken with closed endpoints (the one-sided limit at +-n sigma), so the RK4
// nodes that land exactly on the window edges see the inside value; the
// truncation jump then sits between the pulse and idle segments, never inside
// a step.
double closed_envelope(double t, const PulseSpec& p) {
    const double u = t / p.sigma_s;
    return p.omega_peak_hz * std::exp(-0.5 * u * u);
}

BlochRates bloch_rhs(double t, const BlochState& s, const PulseSpec& p, double drive_scale,
                     double delta_ang, const std::optional<Relaxation>& relax,
                     bool in_pulse) {
    const double drive =
        in_pulse ? constants::two_pi * drive_scale * closed_envelope(t, p) : 0.0;
    BlochRates r{-delta_ang * s.v, delta_ang * s.u - drive * s.w, drive * s.v};
    if (relax) {
        r.du -= s.u / relax->t2_s;
        r.dv -= s.v / relax->t2_s;
        r.dw -= (s.w + 1.0) / relax->t1_s;
    }
    return r;
}

BlochTrajectory integrate_bloch(const PulseSpec& p, std::size_t pulse_steps,
                                std::size_t idle_steps,
                                const std::optional<Relaxation>& relax,
                                double idle_after_s) {
    const double t_start = -p.n_trunc * p.sigma_s;
    const double t_edge = p.n_trunc * p.sigma_s;
    const double drive_scale = fringe_calibration(p.n_trunc);
    const double delta_ang = angular(p.detuning_hz);

    BlochTrajectory traj;
    traj.times_s.reserve(pulse_steps + idle_steps + 1);
    traj.excited_prob.reserve(pulse_steps + idle_steps + 1);
    BlochState s;
    double t = t_start;
    traj.times_s.push_back(t);
    traj.excited_prob.push_back(0.5 * (1.0 + s.w));

    const auto step_rk4 = [&](double h, bool in_pulse) {
        const BlochRates k1 = bloch_rhs(t, s, p, drive_scale, delta_ang, relax, in_pulse);
        const BlochState s2{s.u + 0.5 * h * k1.du, s.v + 0.5 * h * k1.dv,
                            s.w + 0.5 * h * k1.dw};
        const BlochRates k2 =
            bloch_rhs(t + 0.5 * h, s2, p, drive_scale, delta_ang, relax, in_pulse);
        const BlochState s3{s.u + 0.5 * h * k2.du, s.v + 0.5 * h * k2.dv,
                            s.w + 0.5 * h * k2.dw};
        const BlochRates k3 =
            bloch_rhs(t + 0.5 * h, s3, p, drive_scale, delta_ang, relax, in_pulse);
        const BlochState s4{s.u + h * k3.du, s.v + h * k3.dv, s.w + h * k3.dw};
        const BlochRates k4 = bloch_rhs(t + h, s4, p, drive_scale, delta_ang, relax, in_pulse);
        s.u += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
        s.v += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        s.w += h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
        t += h;
        traj.times_s.push_back(t);
        traj.excited_prob.push_back(0.5 * (1.0 + s.w));
    };

    const double h_pulse = (t_edge - t_start) / static_cast<double>(pulse_steps);
    for (std::size_t i = 0; i < pulse_steps; ++i) step_rk4(h_pulse, true);
    if (idle_steps > 0) {
        const double h_idle = idle_after_s / static_cast<double>(idle_steps);
        for (std::size_t i = 0; i < idle_steps; ++i) step_rk4(h_idle, false);
    }
    return traj;
}

} // namespace

BlochTrajectory simulate_bloch(const PulseSpec& p, std::size_t steps,
                               std::optional<Relaxation> relaxation,
                               double idle_after_s) {
    p.validate();
    if (steps < 100) throw DomainError("simulate_bloch: steps must be >= 100");
    if (idle_after_s < 0.0) throw DomainError("simulate_bloch: idle_after_s must be >= 0");
    if (relaxation && (relaxation->t1_s <= 0.0 || relaxation->t2_s <= 0.0))
        throw DomainError("simulate_bloch: relaxation times must be positive");

    std::size_t idle_steps = 0;
    if (idle_after_s > 0.0) {
        const double pulse_len = 2.0 * p.n_trunc * p.sigma_s;
        const double ratio = idle_after_s / pulse_len;
        idle_steps = std::clamp<std::size_t>(
            static_cast<std::size_t>(static_cast<double>(steps) * ratio), 100, 400000);
    }

    const BlochTrajectory coarse =
        integrate_bloch(p, steps, idle_steps, relaxation, idle_after_s);
    const BlochTrajectory fine =
        integrate_bloch(p, 2 * steps, 2 * idle_steps, relaxation, idle_after_s);
    if (std::abs(coarse.final_excited_prob() - fine.final_excited_prob()) >= 1e-8)
        throw NumericalError("simulate_bloch: step-halving check failed; increase steps");
    return fine;
}

Matrix chevron_map(std::span<const double> detuning_grid_hz,
                   std::span<const double> swept_grid, const PulseSpec& base,
                   ChevronMode mode, PhaseConvention convention) {
    if (detuning_grid_hz.empty() || swept_grid.empty())
        throw DomainError("chevron_map: grids must be non-empty");
    Matrix m(detuning_grid_hz.size(), swept_grid.size());
    parallel_for(detuning_grid_hz.size(), [&](std::size_t i) {
        PulseSpec p = base;
        p.detuning_hz = detuning_grid_hz[i];
        for (std::size_t j = 0; j < swept_grid.size(); ++j) {
            if (mode == ChevronMode::amplitude)
                p.omega_peak_hz = swept_grid[j];
            else
                p.sigma_s = swept_grid[j];
            m.at(i, j) = pe_truncated_gaussian(p, convention);
        }
    });
    return m;
}

namespace {

// Vertex of the parabola through three (x, y) samples.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d0 = y0 * (x1 - x2);
    const double d1 = y1 * (x2 - x0);
    const double d2 = y2 * (x0 - x1);
    const double denom = 2.0 * (d0 + d1 + d2);
    if (denom == 0.0) return x1;
    const double num = y0 * (x1 * x1 - x2 * x2) + y1 * (x2 * x2 - x0 * x0) +
                       y2 * (x0 * x0 - x1 * x1);
    const double v = num / denom;
    // Keep the refinement inside the bracketing cell.
    const double lo = std::min(x0, x2), hi = std::max(x0, x2);
    return std::clamp(v, lo, hi);
}

struct AxisExtremum {
    bool is_max = false;
    std::size_t j = 0;
};

} // namespace

std::vector<ContourLine> pi_pulse_contours(const Matrix& map,
                                           std::span<const double> detuning_grid_hz,
                                           std::span<const double> swept_grid) {
    if (map.empty()) throw DomainError("pi_pulse_contours: empty map");
    if (map.rows != detuning_grid_hz.size() || map.cols != swept_grid.size())
        throw DomainError("pi_pulse_contours: grid sizes do not match the map");
    std::vector<ContourLine> contours;
    if (map.cols < 3) return contours; // nothing to bracket

    // Row closest to resonance.
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < map.rows; ++i)
        if (std::abs(detuning_grid_hz[i]) < std::abs(detuning_grid_hz[i0])) i0 = i;

    // Local extrema along the resonance row, left to right.
    std::vector<AxisExtremum> axis;
    for (std::size_t j = 1; j + 1 < map.cols; ++j) {
        const double y0 = map.at(i0, j - 1), y1 = map.at(i0, j), y2 = map.at(i0, j + 1);
        if (y1 >= y0 && y1 >= y2 && y1 > 0.5)
            axis.push_back({true, j});
        else if (y1 <= y0 && y1 <= y2 && y1 < 0.5)
            axis.push_back({false, j});
    }

    const auto trace_direction = [&](const AxisExtremum& ext, int di,
                                     std::vector<std::pair<double, double>>& out) {
        const std::size_t window = std::max<std::size_t>(2, map.cols / 50);
        std::size_t jc = ext.j;
        for (std::size_t step = 1;; ++step) {
            const long long i = static_cast<long long>(i0) + di * static_cast<long long>(step);
            if (i < 0 || i >= static_cast<long long>(map.rows)) break;
            const std::size_t row = static_cast<std::size_t>(i);
            const std::size_t lo = jc > window ? jc - window : 1;
            const std::size_t hi = std::min(jc + window, map.cols - 2);
            if (lo > hi) break;
            std::size_t best = lo;
            for (std::size_t j = lo; j <= hi; ++j) {
                const bool better = ext.is_max ? map.at(row, j) > map.at(row, best)
                                               : map.at(row, j) < map.at(row, best);
                if (better) best = j;
            }
            const double y0 = map.at(row, best - 1), y1 = map.at(row, best),
                         y2 = map.at(row, best + 1);
            const bool is_local = ext.is_max ? (y1 >= y0 && y1 >= y2) : (y1 <= y0 && y1 <= y2);
            if (!is_local) break;
            if (ext.is_max && y1 < 0.02) break; // fringe washed out by detuning
            out.emplace_back(detuning_grid_hz[row],
                             parabola_vertex(swept_grid[best - 1], y0, swept_grid[best], y1,
                                             swept_grid[best + 1], y2));
            jc = best;
        }
    };

    int index = 0;
    for (const AxisExtremum& ext : axis) {
        ContourLine line;
        line.kind = ext.is_max ? "maximum" : "node";
        line.index = ++index;
        std::vector<std::pair<double, double>> down, up;
        trace_direction(ext, -1, down);
        trace_direction(ext, +1, up);
        std::reverse(down.begin(), down.end());
        line.vertices = std::move(down);
        const double y0 = map.at(i0, ext.j - 1), y1 = map.at(i0, ext.j),
                     y2 = map.at(i0, ext.j + 1);
        line.vertices.emplace_back(detuning_grid_hz[i0],
                                   parabola_vertex(swept_grid[ext.j - 1], y0, swept_grid[ext.j],
                                                   y1, swept_grid[ext.j + 1], y2));
        line.vertices.insert(line.vertices.end(), up.begin(), up.end());
        contours.push_back(std::move(line));
    }
    return contours;
}

} // namespace qcm
