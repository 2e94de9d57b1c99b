#pragma once

#include "qcm/constants.hpp"

namespace qcm {

/// Qubit transition and its low-temperature coherence scales. t1_0_s is the
/// relaxation scale of the heating model, whose zero-temperature limit is
/// t1_0_s/2; t1_0_from_plateau() converts a measured low-temperature plateau
/// into this convention.
struct QubitParams {
    double f_ge_hz = 0.0;          // g-e transition frequency
    double alpha_hz = 0.0;         // anharmonicity f_ef - f_ge (negative for transmons)
    double t1_0_s = 0.0;           // low-temperature relaxation scale
    double t2_0_s = 0.0;           // environmental dephasing scale
    SuperconductorMaterial material = niobium();

    void validate() const;
};

/// Readout resonator seen by the qubit in the dispersive regime.
struct ResonatorParams {
    double f_r_hz = 0.0;       // fundamental frequency
    double kappa_2pi_hz = 0.0; // linewidth gamma/2pi
    double chi_2pi_hz = 0.0;   // dispersive shift chi/2pi

    void validate() const;
};

/// Whether chi_2pi_hz denotes the qubit-state-dependent pull +-chi
/// (half shift, the convention used internally) or the full peak-to-peak
/// shift 2chi.
enum class ChiConvention { half_shift, full_shift };

/// Everything the temperature-dependent coherence models need.
struct ThermalModel {
    QubitParams qubit;
    ResonatorParams resonator;
    ChiConvention chi_convention = ChiConvention::half_shift;

    void validate() const;

    /// chi in angular units under the half-shift convention used by the
    /// dephasing model.
    double chi_angular() const;
    /// Resonator linewidth in angular units.
    double gamma_angular() const;
};

/// Convert a measured low-temperature T1 plateau into the t1_0_s scale of the
/// heating model (which satisfies T1(0) = t1_0/2).
inline double t1_0_from_plateau(double t1_plateau_s) { return 2.0 * t1_plateau_s; }

} // namespace qcm
