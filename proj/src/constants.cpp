#include "qcm/constants.hpp"

namespace qcm {

double quality_factor(double f_q_hz, double t1_s) {
    if (f_q_hz <= 0.0) throw DomainError("quality_factor: f_q_hz must be positive");
    if (t1_s <= 0.0) throw DomainError("quality_factor: t1_s must be positive");
    return angular(f_q_hz) * t1_s;
}

void SuperconductorMaterial::validate() const {
    if (tc_k <= 0.0) throw DomainError("material " + name + ": tc_k must be positive");
    if (gap0_j <= 0.0) throw DomainError("material " + name + ": gap0_j must be positive");
}

double gap_from_tc(double tc_k) {
    if (tc_k <= 0.0) throw DomainError("gap_from_tc: tc_k must be positive");
    return constants::bcs_gap_ratio * constants::kB * tc_k;
}

SuperconductorMaterial material_from_tc(const std::string& name, double tc_k) {
    SuperconductorMaterial m{name, tc_k, gap_from_tc(tc_k)};
    m.validate();
    return m;
}

SuperconductorMaterial niobium() { return material_from_tc("Nb", 9.2); }

SuperconductorMaterial aluminium() { return material_from_tc("Al", 1.2); }

} // namespace qcm
