#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcm/thermal.hpp"
#include "qcm/types.hpp"

namespace qcm {

enum class TraceKind { decay, ramsey, echo, rabi_amplitude, temperature_sweep };

TraceKind trace_kind_from_string(const std::string& s);
std::string to_string(TraceKind k);

/// A measured trace: x against excited-state population y, with optional
/// per-point uncertainties.
struct Trace {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma_y; // empty or same length as y
    TraceKind kind = TraceKind::decay;

    void validate() const;
};

/// Result of a nonlinear least-squares fit.
struct FitResult {
    std::vector<std::string> param_order;
    std::map<std::string, double> params;
    std::vector<double> covariance; // row-major, param_order x param_order
    double reduced_chi2 = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> flags;

    double param(const std::string& name) const;
    double stderr_of(const std::string& name) const;
    bool has_flag(const std::string& flag) const;
};

/// A e^{-t/T1} + C by damped Gauss-Newton with analytic Jacobian; initial
/// guesses from log-linear regression on the baseline-subtracted data.
/// Parameters {A, T1, C}.
FitResult fit_exp_decay(const Trace& t);

/// A e^{-t/T2} cos(2 pi f t + phi) + C. The frequency starts from the peak of
/// a discrete spectrum of the mean-subtracted data; traces without a peak
/// above the noise floor raise LowVisibilityError. Parameters
/// {A, T2, f_osc, phase, C}.
FitResult fit_damped_sinusoid(const Trace& t);

/// Rabi fringe versus drive amplitude, C + (P0/2)(1 - cos(2 pi k x + phi)).
/// Parameters {P0, amp_per_unit, phase, C} plus the derived pi_amplitude (the
/// first maximum, half a fringe period from the origin at phi = 0).
FitResult fit_rabi(const Trace& t);

/// Residual excited-state population from the ef-oscillation amplitudes with
/// the g/e populations idle versus swapped: p_e = A_idle/(A_idle + A_swapped).
double population_from_ef_amplitudes(double a_idle, double a_swapped);

/// Intrinsic relative T1 spread after removing the average fit uncertainty:
/// sigma_intrinsic^2 = max(0, var(T1) - mean(sigma_fit^2)).
struct FluctuationStats {
    double mean_t1 = 0.0;
    double sigma_intrinsic_rel = 0.0;
    bool clamped = false; // fit noise exceeded the observed spread
};
FluctuationStats t1_fluctuation_stats(
    std::span<const std::pair<double, double>> t1_and_sigma_fit);

/// Sliding-window mean of a binary error record; output length is
/// len - window + 1.
std::vector<double> windowed_error_rate(std::span<const int> outcomes,
                                        std::size_t window);

/// One temperature point of a coherence-versus-temperature sweep.
struct ThermalSweepPoint {
    double t_k = 0.0;
    double t1_s = 0.0;
    double t2_s = 0.0;
};

/// Parameter-free overlay of the thermal coherence model on measured (T, T1,
/// T2) points, with residuals and reduced chi^2. refine = true additionally
/// fits T1_0 and T2_0 (only those two) to the data.
struct OverlayResult {
    std::vector<double> t1_model_s;
    std::vector<double> t2_model_s;
    std::vector<double> t1_residual_s;
    std::vector<double> t2_residual_s;
    double reduced_chi2 = 0.0;
    bool refined = false;
    double t1_0_s = 0.0; // model scale actually used (refined or input)
    double t2_0_s = 0.0;
    bool converged = true;
};
OverlayResult overlay_thermal_model(std::span<const ThermalSweepPoint> points,
                                    const ThermalModel& m, bool refine = false);

} // namespace qcm
