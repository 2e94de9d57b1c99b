#include "qcm/sweep.hpp"

#include <cmath>

#include "qcm/parallel.hpp"
#include "qcm/thermal.hpp"

namespace qcm {

void SweepSpec::validate() const {
    if (q_readout <= 0.0) throw DomainError("sweep: q_readout must be positive");
    if (!(chi_lo_gamma > 0.0) || !(chi_hi_gamma >= chi_lo_gamma))
        throw DomainError("sweep: chi range must satisfy 0 < lo <= hi");
    material.validate();
    if (f_grid_hz.empty() || t_grid_k.empty())
        throw DomainError("sweep: f and T grids must be non-empty");
    for (std::size_t i = 1; i < f_grid_hz.size(); ++i)
        if (f_grid_hz[i] <= f_grid_hz[i - 1])
            throw DomainError("sweep: f grid must be increasing");
    for (std::size_t i = 1; i < t_grid_k.size(); ++i)
        if (t_grid_k[i] <= t_grid_k[i - 1])
            throw DomainError("sweep: T grid must be increasing");
}

namespace {

void validate_point_spec(const SweepSpec& spec) {
    if (spec.q_readout <= 0.0) throw DomainError("sweep: q_readout must be positive");
    if (!(spec.chi_lo_gamma > 0.0) || !(spec.chi_hi_gamma >= spec.chi_lo_gamma))
        throw DomainError("sweep: chi range must satisfy 0 < lo <= hi");
    spec.material.validate();
}

} // namespace

BestCaseT2 best_case_t2(double f_q_hz, double t_k, const SweepSpec& spec) {
    validate_point_spec(spec);
    if (f_q_hz <= 0.0) throw DomainError("best_case_t2: f_q_hz must be positive");
    if (t_k < 0.0) throw DomainError("best_case_t2: t_k must be non-negative");
    const double f_r_hz = f_q_hz + spec.resonator_offset_hz;
    if (f_r_hz <= 0.0)
        throw DomainError("best_case_t2: resonator_offset_hz puts f_R below zero");

    const double gamma_ang = angular(f_r_hz) / spec.q_readout;
    const double n_th = thermal_occupation(f_r_hz, t_k);
    const double qp_half =
        t_k < kTemperatureFloorK
            ? 0.0
            : 0.5 * quasiparticle_rate(angular(f_q_hz), spec.material.gap0_j, t_k);

    const auto rate = [&](double chi_units) {
        return gamma_phi(chi_units * gamma_ang, gamma_ang, n_th) + qp_half;
    };

    BestCaseT2 out;
    const double lo = spec.chi_lo_gamma, hi = spec.chi_hi_gamma;

    double chi_star = lo;
    if (hi > lo && n_th > 0.0) {
        // Golden-section minimization of the total rate over log chi, then
        // compared against the endpoints. Relative chi tolerance 1e-4.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = std::log(lo), b = std::log(hi);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = rate(std::exp(c)), fd = rate(std::exp(d));
        while (b - a > 1e-4) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = rate(std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = rate(std::exp(d));
            }
        }
        chi_star = std::exp(0.5 * (a + b));
        if (rate(lo) <= rate(chi_star)) chi_star = lo;
        if (rate(hi) < rate(chi_star)) chi_star = hi;
    }

    out.chi_star_gamma = chi_star;
    out.boundary = chi_star <= lo * (1.0 + 2e-4) || chi_star >= hi * (1.0 - 2e-4);

    const double total = rate(chi_star);
    if (total <= 1.0 / kT2CapSeconds) {
        out.t2_s = kT2CapSeconds;
        out.capped = true;
    } else {
        out.t2_s = 1.0 / total;
    }
    return out;
}

SweepGrid max_t2_map(const SweepSpec& spec) {
    spec.validate();
    const std::size_t rows = spec.t_grid_k.size();
    const std::size_t cols = spec.f_grid_hz.size();
    SweepGrid grid;
    grid.t2_s = Matrix(rows, cols);
    grid.argmax_chi_gamma = Matrix(rows, cols);
    grid.capped.assign(rows * cols, 0);
    grid.boundary.assign(rows * cols, 0);
    parallel_for(rows, [&](std::size_t i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const BestCaseT2 cell = best_case_t2(spec.f_grid_hz[j], spec.t_grid_k[i], spec);
            grid.t2_s.at(i, j) = cell.t2_s;
            grid.argmax_chi_gamma.at(i, j) = cell.chi_star_gamma;
            grid.capped[i * cols + j] = cell.capped ? 1 : 0;
            grid.boundary[i * cols + j] = cell.boundary ? 1 : 0;
        }
    });
    return grid;
}

double max_operating_temperature(double f_q_hz, double threshold_t2_s,
                                 const SweepSpec& spec) {
    validate_point_spec(spec);
    if (threshold_t2_s <= 0.0)
        throw DomainError("max_operating_temperature: threshold_t2_s must be positive");
    double t_lo = kTemperatureFloorK;
    double t_hi = 5.0;
    if (best_case_t2(f_q_hz, t_lo, spec).t2_s < threshold_t2_s)
        throw OutOfRangeError(
            "max_operating_temperature: threshold exceeds the cold-end T2");
    if (best_case_t2(f_q_hz, t_hi, spec).t2_s >= threshold_t2_s)
        throw OutOfRangeError(
            "max_operating_temperature: threshold still met at the 5 K search limit");
    while (t_hi - t_lo > 1e-3) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (best_case_t2(f_q_hz, mid, spec).t2_s >= threshold_t2_s)
            t_lo = mid;
        else
            t_hi = mid;
    }
    return 0.5 * (t_lo + t_hi);
}

} // namespace qcm
