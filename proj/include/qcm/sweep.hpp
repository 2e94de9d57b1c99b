#pragma once

#include <vector>

#include "qcm/constants.hpp"
#include "qcm/types.hpp"

namespace qcm {

/// Best-case dephasing study over a (qubit frequency, temperature) grid for a
/// perfect device (T1_0 = T2_0 = infinity). The readout linewidth follows the
/// qubit through gamma = omega_R/Q with f_R = f_q + resonator_offset, and the
/// dispersive shift is optimized within chi_range (in units of gamma).
struct SweepSpec {
    std::vector<double> f_grid_hz;
    std::vector<double> t_grid_k;
    double q_readout = 2e6;        // omega_R/gamma
    double chi_lo_gamma = 0.3;     // chi search range, units of gamma
    double chi_hi_gamma = 5.0;
    SuperconductorMaterial material = niobium();
    double resonator_offset_hz = 0.0; // f_R - f_q

    void validate() const;
};

/// T2 values above this sentinel are reported as the sentinel with the capped
/// flag set (both rates vanish toward T = 0).
inline constexpr double kT2CapSeconds = 1e6;

struct BestCaseT2 {
    double t2_s = 0.0;
    double chi_star_gamma = 0.0; // argmax of T2 over the chi range
    bool capped = false;         // hit the 1e6 s sentinel
    bool boundary = false;       // argmax on a chi_range endpoint
};

/// Maximum T2 over chi for one (f_q, T) point:
///   1/T2(chi) = gamma_phi(chi, gamma, n_th(f_R, T)) + Gamma_qp(omega_q, T)/2,
/// chi optimized by golden-section search on a log-spaced bracket to 1e-4
/// relative.
BestCaseT2 best_case_t2(double f_q_hz, double t_k, const SweepSpec& spec);

struct SweepGrid {
    Matrix t2_s;            // t_grid rows x f_grid columns
    Matrix argmax_chi_gamma;
    std::vector<unsigned char> capped;   // row-major flags
    std::vector<unsigned char> boundary;
};

/// best_case_t2 over the whole grid; cells are independent and the result
/// does not depend on evaluation order.
SweepGrid max_t2_map(const SweepSpec& spec);

/// Highest temperature at which the best-case T2 still reaches the threshold,
/// by bisection to 1 mK. Throws OutOfRangeError when the threshold is not met
/// even at the cold end of the search range.
double max_operating_temperature(double f_q_hz, double threshold_t2_s,
                                 const SweepSpec& spec);

} // namespace qcm
