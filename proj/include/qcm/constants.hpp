#pragma once

#include <numbers>
#include <string>

#include "qcm/errors.hpp"

namespace qcm {

/// Fundamental constants in SI units. h, kB and e are the exact defining
/// values of the 2019 SI (CODATA 2018); hbar and Phi0 are derived from them
/// here rather than stored as rounded literals so the identities
/// hbar = h/2pi and Phi0 = h/2e hold to machine precision.
struct PhysicalConstants {
    double h = 6.62607015e-34;                       // Planck constant [J s]
    double kB = 1.380649e-23;                        // Boltzmann constant [J/K]
    double e_charge = 1.602176634e-19;               // elementary charge [C]
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);        // [J s]
    double phi0 = 6.62607015e-34 / (2.0 * 1.602176634e-19);         // h/2e [Wb]
};

inline constexpr PhysicalConstants codata2018{};

namespace constants {
inline constexpr double h = codata2018.h;
inline constexpr double hbar = codata2018.hbar;
inline constexpr double kB = codata2018.kB;
inline constexpr double e_charge = codata2018.e_charge;
inline constexpr double phi0 = codata2018.phi0;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
/// Weak-coupling BCS ratio Delta(0)/(kB Tc).
inline constexpr double bcs_gap_ratio = 1.764;
} // namespace constants

/// Cyclic frequency [Hz] to angular rate [rad/s]. All user-facing quantities
/// are cyclic; model internals work in angular rates, converting only here.
inline constexpr double angular(double f_hz) { return constants::two_pi * f_hz; }

/// Angular rate [rad/s] back to cyclic frequency [Hz].
inline constexpr double cyclic(double omega) { return omega / constants::two_pi; }

/// Frequency-independent qubit quality factor Q1 = 2 pi f_q T1.
double quality_factor(double f_q_hz, double t1_s);

/// Superconducting electrode material: critical temperature and
/// zero-temperature gap.
struct SuperconductorMaterial {
    std::string name;
    double tc_k = 0.0;   // critical temperature [K]
    double gap0_j = 0.0; // zero-temperature gap Delta [J]

    void validate() const;
};

/// Gap from critical temperature via the BCS weak-coupling ratio.
double gap_from_tc(double tc_k);

/// Material with gap derived from Tc.
SuperconductorMaterial material_from_tc(const std::string& name, double tc_k);

/// Default niobium electrode (Tc = 9.2 K).
SuperconductorMaterial niobium();

/// Default aluminium electrode (Tc = 1.2 K).
SuperconductorMaterial aluminium();

} // namespace qcm
