#pragma once

#include "qcm/device.hpp"

namespace qcm {

/// Below this temperature all thermal expressions return their analytic
/// T -> 0 limits instead of evaluating overflow-prone exp/coth.
inline constexpr double kTemperatureFloorK = 1e-3;

/// Bose-Einstein occupation of a mode at frequency f and temperature T.
/// Returns 0 at (and below the floor toward) T = 0.
double thermal_occupation(double f_hz, double t_k);

/// Pure dephasing rate from thermal photons in the readout resonator,
///   Gamma_phi = (gamma/2) Re[sqrt((1 + 2i chi/gamma)^2 + 8i chi n_th/gamma) - 1],
/// principal branch. chi and gamma are angular rates; the result is >= 0 and
/// vanishes for chi = 0 or n_th = 0.
double gamma_phi(double chi_ang, double gamma_ang, double n_th);

/// First-order expansion of gamma_phi in n_th,
///   gamma n_th x^2/(1+x^2) with x = 2 chi/gamma.
/// Reference for the weak-dispersive regime.
double gamma_phi_weak_dispersive(double chi_ang, double gamma_ang, double n_th);

/// Quasiparticle tunneling relaxation rate [1/s] for a qubit at angular
/// frequency omega_q with junction gap gap0 at temperature T:
///   (4 omega_q/pi) e^{-Delta/kT} cosh(z) (K0(z) + (hbar omega_q/4 Delta) K1(z)),
/// z = hbar omega_q / 2kT. Evaluated in exponentially scaled form; returns 0
/// when the Boltzmann factor or Bessel argument underflows.
double quasiparticle_rate(double omega_q_ang, double gap0_j, double t_k);

/// Quasiparticle-limited relaxation time 1/quasiparticle_rate; +infinity when
/// the rate is negligible (rate underflows to zero).
double t_qp(double omega_q_ang, double gap0_j, double t_k);

/// Temperature-dependent relaxation:
///   1/T1(T) = (1 + coth(hbar omega_q/2kT))/T1_0 + 1/T_qp(T).
/// The low-temperature limit is T1_0/2.
double t1_of_temperature(double t_k, const ThermalModel& m);

/// Which T1 enters the T2 composition.
enum class T1Mode {
    fixed_low_temperature, // constant T1_0/2, the measured low-T average
    temperature_dependent  // t1_of_temperature(T)
};

/// Full temperature-dependent coherence prediction at one temperature.
struct CoherencePrediction {
    double t_k = 0.0;
    double t1_s = 0.0;        // T1 used in the composition
    double t2_s = 0.0;
    double gamma_phi = 0.0;   // thermal-photon dephasing rate [1/s]
    double n_th = 0.0;        // resonator occupation
};

/// Dephasing-time composition 1/T2 = Gamma_phi + 1/T2_0 + 1/(2 T1).
CoherencePrediction coherence_at(double t_k, const ThermalModel& m,
                                 T1Mode mode = T1Mode::fixed_low_temperature);

/// T2(T) from coherence_at.
double t2_of_temperature(double t_k, const ThermalModel& m,
                         T1Mode mode = T1Mode::fixed_low_temperature);

/// Pure dephasing solved from measured quantities,
///   Gamma_phi = 1/T2 - 1/(2 T1) - 1/T2_0, clamped at zero.
struct DephasingExtract {
    double gamma_phi = 0.0;
    bool clamped = false; // raw value was negative (noise) and was clamped
};
DephasingExtract pure_dephasing_extract(double t2_meas_s, double t1_meas_s,
                                        double t2_0_s);

/// Thermal excited-state population of a two-level system,
///   p_e = 1/(1 + e^{h f_q/kT}).
double thermal_population(double f_q_hz, double t_k);

/// Effective temperature reproducing a measured excited-state population;
/// exact inverse of thermal_population. Valid for 0 < p_e < 0.5.
struct EffectiveTemperature {
    double kelvin = 0.0;
    bool overflow = false; // p_e so close to 0.5 that T exceeds 1e6 K
};
EffectiveTemperature effective_temperature(double f_q_hz, double p_e);

} // namespace qcm
