#include "qcm/thermal.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "qcm/bessel.hpp"

namespace qcm {

namespace {

constexpr double kExpUnderflow = 700.0;

double check_temperature(double t_k, const char* fn) {
    if (t_k < 0.0 || std::isnan(t_k))
        throw DomainError(std::string(fn) + ": t_k must be non-negative");
    return t_k;
}

} // namespace

double thermal_occupation(double f_hz, double t_k) {
    if (f_hz <= 0.0) throw DomainError("thermal_occupation: f_hz must be positive");
    check_temperature(t_k, "thermal_occupation");
    if (t_k < kTemperatureFloorK) return 0.0;
    const double u = constants::h * f_hz / (constants::kB * t_k);
    if (u > kExpUnderflow) return 0.0;
    return 1.0 / std::expm1(u);
}

double gamma_phi(double chi_ang, double gamma_ang, double n_th) {
    if (gamma_ang <= 0.0) throw DomainError("gamma_phi: gamma_ang must be positive");
    if (n_th < 0.0) throw DomainError("gamma_phi: n_th must be non-negative");
    const double x = 2.0 * chi_ang / gamma_ang;
    const std::complex<double> one_ix(1.0, x);
    const std::complex<double> radicand = one_ix * one_ix + std::complex<double>(0.0, 4.0 * x * n_th);
    const double rate = 0.5 * gamma_ang * (std::sqrt(radicand).real() - 1.0);
    return rate > 0.0 ? rate : 0.0;
}

double gamma_phi_weak_dispersive(double chi_ang, double gamma_ang, double n_th) {
    if (gamma_ang <= 0.0)
        throw DomainError("gamma_phi_weak_dispersive: gamma_ang must be positive");
    const double x = 2.0 * chi_ang / gamma_ang;
    return gamma_ang * n_th * x * x / (1.0 + x * x);
}

double quasiparticle_rate(double omega_q_ang, double gap0_j, double t_k) {
    if (omega_q_ang <= 0.0)
        throw DomainError("quasiparticle_rate: omega_q_ang must be positive");
    if (gap0_j <= 0.0) throw DomainError("quasiparticle_rate: gap0_j must be positive");
    if (t_k <= 0.0) throw DomainError("quasiparticle_rate: t_k must be positive");
    if (t_k < kTemperatureFloorK) return 0.0;

    const double kt = constants::kB * t_k;
    const double a = gap0_j / kt;                       // Delta/kT
    const double z = 0.5 * constants::hbar * omega_q_ang / kt; // hbar w/2kT
    if (a > kExpUnderflow || z > kExpUnderflow) return 0.0;

    // e^{-a} cosh(z) K_nu(z) = e^{-a} (1 + e^{-2z}) e^z K_nu(z) / 2, evaluated
    // with scaled Bessels so cosh never overflows.
    const double bessel_term =
        bessel_k0e(z) + (constants::hbar * omega_q_ang / (4.0 * gap0_j)) * bessel_k1e(z);
    const double scaled_cosh = 0.5 * (1.0 + std::exp(-2.0 * z));
    return (4.0 * omega_q_ang / M_PI) * std::exp(-a) * scaled_cosh * bessel_term;
}

double t_qp(double omega_q_ang, double gap0_j, double t_k) {
    const double rate = quasiparticle_rate(omega_q_ang, gap0_j, t_k);
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rate;
}

namespace {

// coth(hbar w / 2kT) with the analytic limit below the temperature floor.
double heating_coth(double omega_q_ang, double t_k) {
    if (t_k < kTemperatureFloorK) return 1.0;
    const double z = 0.5 * constants::hbar * omega_q_ang / (constants::kB * t_k);
    if (z > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * z);
    return 1.0 / std::tanh(z);
}

} // namespace

double t1_of_temperature(double t_k, const ThermalModel& m) {
    check_temperature(t_k, "t1_of_temperature");
    const double omega_q = angular(m.qubit.f_ge_hz);
    const double heating = (1.0 + heating_coth(omega_q, t_k)) / m.qubit.t1_0_s;
    const double qp = t_k < kTemperatureFloorK
                          ? 0.0
                          : quasiparticle_rate(omega_q, m.qubit.material.gap0_j, t_k);
    return 1.0 / (heating + qp);
}

CoherencePrediction coherence_at(double t_k, const ThermalModel& m, T1Mode mode) {
    check_temperature(t_k, "coherence_at");
    CoherencePrediction out;
    out.t_k = t_k;
    out.n_th = thermal_occupation(m.resonator.f_r_hz, t_k);
    out.gamma_phi = gamma_phi(m.chi_angular(), m.gamma_angular(), out.n_th);
    out.t1_s = mode == T1Mode::fixed_low_temperature ? 0.5 * m.qubit.t1_0_s
                                                     : t1_of_temperature(t_k, m);
    out.t2_s = 1.0 / (out.gamma_phi + 1.0 / m.qubit.t2_0_s + 0.5 / out.t1_s);
    return out;
}

double t2_of_temperature(double t_k, const ThermalModel& m, T1Mode mode) {
    return coherence_at(t_k, m, mode).t2_s;
}

DephasingExtract pure_dephasing_extract(double t2_meas_s, double t1_meas_s,
                                        double t2_0_s) {
    if (t2_meas_s <= 0.0)
        throw DomainError("pure_dephasing_extract: t2_meas_s must be positive");
    if (t1_meas_s <= 0.0)
        throw DomainError("pure_dephasing_extract: t1_meas_s must be positive");
    if (t2_0_s <= 0.0)
        throw DomainError("pure_dephasing_extract: t2_0_s must be positive");
    const double raw = 1.0 / t2_meas_s - 0.5 / t1_meas_s - 1.0 / t2_0_s;
    DephasingExtract out;
    out.clamped = raw < 0.0;
    out.gamma_phi = out.clamped ? 0.0 : raw;
    return out;
}

double thermal_population(double f_q_hz, double t_k) {
    if (f_q_hz <= 0.0) throw DomainError("thermal_population: f_q_hz must be positive");
    if (t_k <= 0.0) throw DomainError("thermal_population: t_k must be positive");
    if (t_k < kTemperatureFloorK) return 0.0;
    const double u = constants::h * f_q_hz / (constants::kB * t_k);
    if (u > kExpUnderflow) return 0.0;
    return 1.0 / (1.0 + std::exp(u));
}

EffectiveTemperature effective_temperature(double f_q_hz, double p_e) {
    if (f_q_hz <= 0.0) throw DomainError("effective_temperature: f_q_hz must be positive");
    if (!(p_e > 0.0 && p_e < 0.5))
        throw DomainError("effective_temperature: p_e must lie in (0, 0.5)");
    EffectiveTemperature out;
    out.kelvin = constants::h * f_q_hz / (constants::kB * std::log((1.0 - p_e) / p_e));
    out.overflow = out.kelvin > 1e6;
    return out;
}

} // namespace qcm
