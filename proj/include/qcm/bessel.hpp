#pragma once

namespace qcm {

/// Modified Bessel functions of the second kind, order 0 and 1, for x > 0.
/// Power series below x = 2, Basset integral with fixed Gauss-Legendre panels
/// above. Accurate to well below 1e-12 relative over [1e-3, 700].
double bessel_k0(double x);
double bessel_k1(double x);

/// Exponentially scaled variants e^x K0(x), e^x K1(x). These stay
/// representable at large x where K0/K1 underflow.
double bessel_k0e(double x);
double bessel_k1e(double x);

/// Modified Bessel functions of the first kind (series; intended for
/// moderate x and for identity checks).
double bessel_i0(double x);
double bessel_i1(double x);

} // namespace qcm
