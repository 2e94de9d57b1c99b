#include "qcm/bessel.hpp"

#include <cmath>

#include "qcm/errors.hpp"
#include "qcm/quadrature.hpp"

namespace qcm {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

// Ascending series, A&S 9.6. Converge quickly for x <= 2 with at most one
// digit of cancellation in K0/K1.
struct SeriesK {
    double k0;
    double k1;
};

SeriesK series_k01(double x) {
    const double u = 0.25 * x * x;
    const double lx = std::log(0.5 * x);

    double i0 = 1.0, i1_half = 1.0; // I1 = (x/2) * i1_half
    double s0 = 0.0;                // sum H_k u^k/(k!)^2
    double s1 = 0.0;                // sum [psi(k+1)+psi(k+2)] u^k/(k! (k+1)!)
    double term0 = 1.0;             // u^k/(k!)^2
    double term1 = 1.0;             // u^k/(k! (k+1)!)
    double hk = 0.0;                // H_k
    double psi_a = -kEulerGamma;    // psi(k+1)
    double psi_b = 1.0 - kEulerGamma; // psi(k+2)
    s1 += term1 * (psi_a + psi_b);
    for (int k = 1; k <= 40; ++k) {
        term0 *= u / (static_cast<double>(k) * k);
        term1 *= u / (static_cast<double>(k) * (k + 1));
        hk += 1.0 / k;
        psi_a += 1.0 / k;
        psi_b += 1.0 / (k + 1);
        i0 += term0;
        i1_half += term1;
        s0 += hk * term0;
        s1 += (psi_a + psi_b) * term1;
        if (term0 < 1e-19 * i0) break;
    }

    SeriesK out;
    out.k0 = -(lx + kEulerGamma) * i0 + s0;
    out.k1 = lx * (0.5 * x * i1_half) + 1.0 / x - 0.25 * x * s1;
    return out;
}

// Basset integral for x >= 2, after t = s^2:
//   e^x K0(x) = sqrt(pi/2x) * (2/sqrt(pi)) int_0^inf e^{-s^2} (1+s^2/2x)^{-1/2} ds
//   e^x K1(x) = sqrt(pi/2x) * (4/sqrt(pi)) int_0^inf e^{-s^2} s^2 (1+s^2/2x)^{+1/2} ds
// The integrand is smooth and dies off by s = 8.
template <int Nu>
double basset_scaled(double x) {
    static const double panels[] = {0.0, 1.0, 2.0, 4.0, 8.0};
    const auto f = [x](double s) {
        const double g = std::exp(-s * s);
        const double w = 1.0 + s * s / (2.0 * x);
        if constexpr (Nu == 0)
            return g / std::sqrt(w);
        else
            return g * s * s * std::sqrt(w);
    };
    double integral = 0.0;
    for (int p = 0; p + 1 < 5; ++p)
        integral += integrate_gl(f, panels[p], panels[p + 1], 32);
    const double sqrt_pi = std::sqrt(M_PI);
    const double front = std::sqrt(M_PI / (2.0 * x));
    if constexpr (Nu == 0)
        return front * (2.0 / sqrt_pi) * integral;
    else
        return front * (4.0 / sqrt_pi) * integral;
}

void check_arg(double x, const char* fn) {
    if (!(x > 0.0)) throw DomainError(std::string(fn) + ": x must be positive");
}

} // namespace

double bessel_k0(double x) {
    check_arg(x, "bessel_k0");
    if (x <= 2.0) return series_k01(x).k0;
    return std::exp(-x) * basset_scaled<0>(x);
}

double bessel_k1(double x) {
    check_arg(x, "bessel_k1");
    if (x <= 2.0) return series_k01(x).k1;
    return std::exp(-x) * basset_scaled<1>(x);
}

double bessel_k0e(double x) {
    check_arg(x, "bessel_k0e");
    if (x <= 2.0) return std::exp(x) * series_k01(x).k0;
    return basset_scaled<0>(x);
}

double bessel_k1e(double x) {
    check_arg(x, "bessel_k1e");
    if (x <= 2.0) return std::exp(x) * series_k01(x).k1;
    return basset_scaled<1>(x);
}

double bessel_i0(double x) {
    const double u = 0.25 * x * x;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= u / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

double bessel_i1(double x) {
    const double u = 0.25 * x * x;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= u / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 0.5 * x * sum;
}

} // namespace qcm
