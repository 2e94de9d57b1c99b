#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcm/types.hpp"

namespace qcm {

/// Truncated-Gaussian drive pulse. omega_peak_hz is the Rabi-fringe parameter
/// Omega in the convention where the on-resonance excited-state probability is
/// sin^2(pi sigma Omega): sweeping it reproduces the amplitude fringes with a
/// pi pulse at sigma*Omega = 1/2. The physical peak drive rate behind it is
/// omega_peak_hz * fringe_calibration(n_trunc).
struct PulseSpec {
    double omega_peak_hz = 0.0; // peak Rabi rate (fringe convention)
    double sigma_s = 0.0;       // Gaussian width
    double n_trunc = 0.0;       // envelope truncated at +-n sigma
    double detuning_hz = 0.0;   // drive minus transition frequency

    void validate() const;
};

/// Gaussian envelope Omega exp(-t^2/2 sigma^2) inside the +-n sigma window,
/// zero outside.
double envelope(double t_s, const PulseSpec& p);

/// Pulse-area calibration 1/(sqrt(2 pi) erf(n/sqrt(2))) relating the fringe
/// parameter to the physical peak drive, so that a full envelope deposits
/// sigma*Omega cycles of rotation on resonance.
double fringe_calibration(double n_trunc);

/// Excited-state probability under a continuous (untruncated) drive,
///   P_e = Omega^2/(Omega^2 + Delta^2) sin^2(pi sqrt(Omega^2 + Delta^2) t).
/// The phase uses the generalized Rabi frequency; on resonance it reduces to
/// sin^2(pi Omega t).
double pe_continuous(double omega_hz, double delta_hz, double t_s);

/// Phase convention for the truncated-Gaussian model.
///   normalized: Theta = pi sigma Omega I(Delta)/I(0); Delta = 0 gives
///               sin^2(pi sigma Omega) exactly for every n.
///   literal:    Theta = (sigma/2) integral of the angular generalized Rabi
///               rate, i.e. pi sigma int sqrt(Omega^2 e^{-tau^2} + Delta^2);
///               this is the physical rotation phase of the raw envelope and
///               is kept for comparison plots.
enum class PhaseConvention { normalized, literal };

/// Amplitude suppression factor Omega^2 e^{-n^2}/(Omega^2 e^{-n^2} + Delta^2).
double pe_amplitude_factor(const PulseSpec& p);

/// Excited-state probability after a truncated-Gaussian pulse,
///   P_e = A(Delta) sin^2(Theta), with A the amplitude factor above and the
/// phase integral evaluated by adaptive Gauss-Legendre quadrature.
double pe_truncated_gaussian(const PulseSpec& p,
                             PhaseConvention mode = PhaseConvention::normalized);

/// Optional relaxation channels for the Bloch integrator.
struct Relaxation {
    double t1_s = 0.0;
    double t2_s = 0.0;
};

struct BlochTrajectory {
    std::vector<double> times_s;
    std::vector<double> excited_prob;

    double final_excited_prob() const { return excited_prob.back(); }
};

/// Independent oracle: fixed-step RK4 integration of the two-level
/// rotating-frame Bloch equations under the calibrated drive
/// 2 pi fringe_calibration(n) envelope(t) and detuning 2 pi Delta, optionally
/// with T1/T2 damping and an idle segment appended after the pulse. The result
/// is accepted only if halving the step changes the final probability by less
/// than 1e-8.
BlochTrajectory simulate_bloch(const PulseSpec& p, std::size_t steps = 4000,
                               std::optional<Relaxation> relaxation = std::nullopt,
                               double idle_after_s = 0.0);

enum class ChevronMode { amplitude, length };

/// Chevron map M[i][j] = pe_truncated_gaussian with detuning_grid[i] and the
/// swept parameter (omega_peak for amplitude mode, sigma for length mode)
/// substituted from swept_grid[j]. Rows follow detuning_grid, columns
/// swept_grid; cells are independent and evaluated in parallel.
Matrix chevron_map(std::span<const double> detuning_grid_hz,
                   std::span<const double> swept_grid, const PulseSpec& base,
                   ChevronMode mode,
                   PhaseConvention convention = PhaseConvention::normalized);

/// One traced fringe line of a chevron map in (detuning, swept-parameter)
/// coordinates. kind is "maximum" for odd-pi ridges and "node" for the zeros
/// between them; index counts half-turns of the on-resonance phase, so nodes
/// sit at sigma*Omega = index/2.
struct ContourLine {
    std::string kind;
    int index = 0;
    std::vector<std::pair<double, double>> vertices; // (detuning, swept value)
};

/// Extract pi-pulse contours from a chevron map by locating the extrema along
/// the Delta = 0 row and tracing each ridge/valley across neighbouring rows.
std::vector<ContourLine> pi_pulse_contours(const Matrix& map,
                                           std::span<const double> detuning_grid_hz,
                                           std::span<const double> swept_grid);

} // namespace qcm
