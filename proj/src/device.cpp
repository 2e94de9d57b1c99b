#include "qcm/device.hpp"

#include <cmath>

namespace qcm {

void QubitParams::validate() const {
    if (f_ge_hz <= 0.0) throw DomainError("qubit: f_ge_hz must be positive");
    if (t1_0_s <= 0.0) throw DomainError("qubit: t1_0_s must be positive");
    if (t2_0_s <= 0.0) throw DomainError("qubit: t2_0_s must be positive");
    if (std::abs(alpha_hz) >= f_ge_hz)
        throw DomainError("qubit: |alpha_hz| must be smaller than f_ge_hz");
    material.validate();
}

void ResonatorParams::validate() const {
    if (f_r_hz <= 0.0) throw DomainError("resonator: f_r_hz must be positive");
    if (kappa_2pi_hz <= 0.0) throw DomainError("resonator: kappa_2pi_hz must be positive");
    if (chi_2pi_hz == 0.0) throw DomainError("resonator: chi_2pi_hz must be nonzero");
}

void ThermalModel::validate() const {
    qubit.validate();
    resonator.validate();
}

double ThermalModel::chi_angular() const {
    const double chi = angular(resonator.chi_2pi_hz);
    return chi_convention == ChiConvention::full_shift ? 0.5 * chi : chi;
}

double ThermalModel::gamma_angular() const { return angular(resonator.kappa_2pi_hz); }

} // namespace qcm
