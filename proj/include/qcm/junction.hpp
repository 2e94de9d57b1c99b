#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qcm/constants.hpp"

namespace qcm {

struct JunctionGeometry {
    double area_um2 = 0.0;
    void validate() const;
};

/// Barrier process point: critical current density vs oxygen exposure
/// E = P_O2 * t during barrier oxidation.
struct JunctionProcess {
    double jc_a_cm2 = 0.0;
    double exposure_mbar_s = 0.0;
    void validate() const;
};

/// Lumped transmon design: junction inductance and total shunt capacitance.
struct TransmonDesign {
    double l_j_h = 0.0;
    double c_sigma_f = 0.0;
    void validate() const;
};

/// Critical current Ic = Jc * A (1 um^2 = 1e-8 cm^2).
double critical_current(double jc_a_cm2, double area_um2);

/// Josephson inductance L_J = Phi0 / (2 pi Ic).
double josephson_inductance(double ic_a);

/// Ambegaokar-Baratoff critical current from the normal-state resistance,
/// Ic Rn = pi Delta / 2e at T = 0.
double ic_from_resistance(double rn_ohm, double gap0_j);

/// Power-law fit of critical current density versus oxygen exposure,
/// log jc = log c + p log E.
struct JcExposureFit {
    double prefactor = 0.0;        // c, in A/cm^2 per (mbar s)^p
    double exponent = 0.0;         // p
    std::vector<double> covariance; // row-major over (log c, p); 1x1 if constrained
    double residual_norm = 0.0;    // sqrt(SSR) in log space
    bool constrained = false;      // |p| fixed at 1/2, sign chosen by fit

    double evaluate(double exposure_mbar_s) const;
};

/// Unconstrained least squares in log-log space; with constrain_half the
/// exponent magnitude is fixed at 1/2 and only the prefactor (and the sign of
/// the exponent) is fitted.
JcExposureFit fit_jc_exposure(std::span<const JunctionProcess> points,
                              bool constrain_half = false);

/// Critical current density from (area, Rn) pairs, least squares on
/// Ic = Jc * A through the origin. Returns Jc in A/cm^2.
double fit_jc_from_resistance_area(
    std::span<const std::pair<double, double>> area_um2_rn_ohm, double gap0_j);

/// Transmon frequency and anharmonicity from the lumped design,
///   E_J = (Phi0/2pi)^2 / L_J,  E_C = e^2/(2 C_sigma),
///   f_ge = (sqrt(8 E_J E_C) - E_C)/h,  alpha = -E_C/h.
/// Lowest-order expressions, valid in the transmon limit E_J/E_C >= 30;
/// in_transmon_limit is false outside it.
struct TransmonEstimate {
    double f_ge_hz = 0.0;
    double alpha_hz = 0.0;
    double e_j_joule = 0.0;
    double e_c_joule = 0.0;
    double ej_over_ec = 0.0;
    bool in_transmon_limit = false;
};
TransmonEstimate transmon_from_design(const TransmonDesign& d);

} // namespace qcm
