#include "qcm/junction.hpp"

#include <cmath>

namespace qcm {

void JunctionGeometry::validate() const {
    if (area_um2 <= 0.0) throw DomainError("junction: area_um2 must be positive");
}

void JunctionProcess::validate() const {
    if (jc_a_cm2 <= 0.0) throw DomainError("junction: jc_a_cm2 must be positive");
    if (exposure_mbar_s <= 0.0)
        throw DomainError("junction: exposure_mbar_s must be positive");
}

void TransmonDesign::validate() const {
    if (l_j_h <= 0.0) throw DomainError("transmon design: l_j_h must be positive");
    if (c_sigma_f <= 0.0) throw DomainError("transmon design: c_sigma_f must be positive");
}

double critical_current(double jc_a_cm2, double area_um2) {
    if (jc_a_cm2 <= 0.0) throw DomainError("critical_current: jc_a_cm2 must be positive");
    if (area_um2 < 0.0) throw DomainError("critical_current: area_um2 must be non-negative");
    return jc_a_cm2 * area_um2 * 1e-8; // 1 um^2 = 1e-8 cm^2
}

double josephson_inductance(double ic_a) {
    if (ic_a <= 0.0) throw DomainError("josephson_inductance: ic_a must be positive");
    return constants::phi0 / (constants::two_pi * ic_a);
}

double ic_from_resistance(double rn_ohm, double gap0_j) {
    if (rn_ohm <= 0.0) throw DomainError("ic_from_resistance: rn_ohm must be positive");
    if (gap0_j <= 0.0) throw DomainError("ic_from_resistance: gap0_j must be positive");
    return M_PI * gap0_j / (2.0 * constants::e_charge * rn_ohm);
}

double JcExposureFit::evaluate(double exposure_mbar_s) const {
    return prefactor * std::pow(exposure_mbar_s, exponent);
}

namespace {

double log_sse(std::span<const JunctionProcess> pts, double log_c, double p) {
    double sse = 0.0;
    for (const auto& pt : pts) {
        const double r = std::log(pt.jc_a_cm2) - (log_c + p * std::log(pt.exposure_mbar_s));
        sse += r * r;
    }
    return sse;
}

} // namespace

JcExposureFit fit_jc_exposure(std::span<const JunctionProcess> points,
                              bool constrain_half) {
    if (points.size() < 3)
        throw InsufficientDataError("fit_jc_exposure: need at least 3 points");
    for (const auto& pt : points) pt.validate();

    const std::size_t n = points.size();
    JcExposureFit fit;
    fit.constrained = constrain_half;

    if (constrain_half) {
        // One-parameter fit for each exponent sign, keep the better one.
        double best_sse = 0.0;
        for (const double p : {-0.5, 0.5}) {
            double mean = 0.0;
            for (const auto& pt : points)
                mean += std::log(pt.jc_a_cm2) - p * std::log(pt.exposure_mbar_s);
            mean /= static_cast<double>(n);
            const double sse = log_sse(points, mean, p);
            if (fit.covariance.empty() || sse < best_sse) {
                best_sse = sse;
                fit.exponent = p;
                fit.prefactor = std::exp(mean);
                const double var = n > 1 ? sse / static_cast<double>(n - 1) : 0.0;
                fit.covariance = {var / static_cast<double>(n)};
            }
        }
        fit.residual_norm = std::sqrt(best_sse);
        return fit;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : points) {
        const double x = std::log(pt.exposure_mbar_s);
        const double y = std::log(pt.jc_a_cm2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = static_cast<double>(n) * sxx - sx * sx;
    if (det <= 0.0)
        throw DomainError("fit_jc_exposure: exposures must not be all identical");
    const double p = (static_cast<double>(n) * sxy - sx * sy) / det;
    const double log_c = (sy - p * sx) / static_cast<double>(n);
    const double sse = log_sse(points, log_c, p);
    const double var = n > 2 ? sse / static_cast<double>(n - 2) : 0.0;
    fit.exponent = p;
    fit.prefactor = std::exp(log_c);
    fit.residual_norm = std::sqrt(sse);
    // Covariance of (log c, p) from the inverse normal matrix.
    fit.covariance = {var * sxx / det, -var * sx / det, -var * sx / det,
                      var * static_cast<double>(n) / det};
    return fit;
}

double fit_jc_from_resistance_area(
    std::span<const std::pair<double, double>> area_um2_rn_ohm, double gap0_j) {
    if (area_um2_rn_ohm.size() < 2)
        throw InsufficientDataError("fit_jc_from_resistance_area: need at least 2 points");
    double saa = 0.0, sai = 0.0;
    for (const auto& [area_um2, rn_ohm] : area_um2_rn_ohm) {
        if (area_um2 <= 0.0)
            throw DomainError("fit_jc_from_resistance_area: area_um2 must be positive");
        const double ic = ic_from_resistance(rn_ohm, gap0_j);
        const double area_cm2 = area_um2 * 1e-8;
        saa += area_cm2 * area_cm2;
        sai += area_cm2 * ic;
    }
    return sai / saa;
}

TransmonEstimate transmon_from_design(const TransmonDesign& d) {
    d.validate();
    TransmonEstimate out;
    const double phi0_red = constants::phi0 / constants::two_pi;
    out.e_j_joule = phi0_red * phi0_red / d.l_j_h;
    out.e_c_joule =
        constants::e_charge * constants::e_charge / (2.0 * d.c_sigma_f);
    out.ej_over_ec = out.e_j_joule / out.e_c_joule;
    out.in_transmon_limit = out.ej_over_ec >= 30.0;
    out.f_ge_hz =
        (std::sqrt(8.0 * out.e_j_joule * out.e_c_joule) - out.e_c_joule) / constants::h;
    out.alpha_hz = -out.e_c_joule / constants::h;
    return out;
}

} // namespace qcm
