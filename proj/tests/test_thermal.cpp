#include <doctest.h>

#include <cmath>

#include "qcm/constants.hpp"
#include "qcm/thermal.hpp"

using namespace qcm;

namespace {

ThermalModel kband_model() {
    ThermalModel m;
    m.qubit = {20.0e9, -200e6, 2.0e-6, 2.5e-6, niobium()};
    m.resonator = {21.0e9, 9.0e6, 2.0e6};
    return m;
}

} // namespace

TEST_CASE("thermal occupation") {
    CHECK(thermal_occupation(21e9, 0.0) == 0.0);
    // 21 GHz at 250 mK, frozen from direct high-precision evaluation.
    CHECK(thermal_occupation(21e9, 0.25) ==
          doctest::Approx(0.018070858601177523).epsilon(1e-13));
    CHECK_THROWS_AS(thermal_occupation(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(thermal_occupation(1e9, -0.1), DomainError);

    // Classical limit: n_th within 1% of kT/hf - 1/2 once kT >= 100 hf.
    for (const double f : {1e9, 5e9, 21e9}) {
        const double t = 100.0 * constants::h * f / constants::kB;
        const double classical = constants::kB * t / (constants::h * f) - 0.5;
        CHECK(thermal_occupation(f, t) == doctest::Approx(classical).epsilon(0.01));
    }

    // Strictly increasing in T, strictly decreasing in f.
    double prev = thermal_occupation(21e9, 0.02);
    for (double t = 0.04; t < 1.0; t += 0.02) {
        const double cur = thermal_occupation(21e9, t);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = thermal_occupation(2e9, 0.3);
    for (double f = 4e9; f < 1e11; f *= 1.3) {
        const double cur = thermal_occupation(f, 0.3);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("gamma_phi zeros and positivity") {
    const double gamma = angular(5e6);
    CHECK(gamma_phi(0.0, gamma, 0.7) == 0.0);
    CHECK(gamma_phi(angular(3e6), gamma, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_phi(1.0, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(gamma_phi(1.0, 1.0, -0.1), DomainError);
    for (const double chi : {0.1, 1.0, 10.0})
        for (const double n : {1e-4, 0.01, 0.3, 2.0})
            CHECK(gamma_phi(chi * gamma, gamma, n) >= 0.0);
}

TEST_CASE("gamma_phi weak-dispersive expansion agreement") {
    const double gamma = angular(5e6);
    for (const double x : {0.01, 0.05, 0.1}) {
        for (const double n : {1e-5, 1e-4, 1e-3}) {
            const double chi = 0.5 * x * gamma;
            const double exact = gamma_phi(chi, gamma, n);
            const double series = gamma_phi_weak_dispersive(chi, gamma, n);
            CHECK(exact == doctest::Approx(series).epsilon(0.01));
        }
    }
}

TEST_CASE("gamma_phi sign invariance and monotonicity in n_th") {
    const double gamma = angular(4e6);
    for (const double chi_units : {0.2, 0.7, 3.0}) {
        const double chi = chi_units * gamma;
        for (const double n : {1e-3, 0.1, 1.0})
            CHECK(gamma_phi(chi, gamma, n) ==
                  doctest::Approx(gamma_phi(-chi, gamma, n)).epsilon(1e-12));
        double prev = gamma_phi(chi, gamma, 1e-4);
        for (double n = 1e-3; n < 10.0; n *= 2.0) {
            const double cur = gamma_phi(chi, gamma, n);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("gamma_phi strong-dispersive limit is gamma times n_th") {
    // For chi far above the linewidth every thermal photon fully dephases.
    const double gamma = angular(5e6);
    for (const double n : {0.05, 0.37, 1.4})
        CHECK(gamma_phi(500.0 * gamma, gamma, n) ==
              doctest::Approx(gamma * n).epsilon(1e-4));
}

TEST_CASE("quasiparticle rate against high-precision references") {
    // Frozen 30-digit evaluations of the full expression.
    CHECK(quasiparticle_rate(angular(20e9), niobium().gap0_j, 1.0) ==
          doctest::Approx(15754.247119485243).epsilon(1e-12));
    CHECK(quasiparticle_rate(angular(6e9), aluminium().gap0_j, 0.16) ==
          doctest::Approx(63146.54919057023).epsilon(1e-12));
}

TEST_CASE("quasiparticle rate: monotone, exponentially vanishing at low T") {
    const double omega = angular(20e9);
    const double gap = niobium().gap0_j;
    double prev = 0.0;
    for (double t = 0.01; t <= 1.5; t *= 1.3) {
        const double cur = quasiparticle_rate(omega, gap, t);
        CHECK(cur >= prev);
        prev = cur;
    }
    // Faster than any power: halving T from 1.2 K shrinks the rate far more
    // than 2^20 would.
    const double r1 = quasiparticle_rate(omega, gap, 1.2);
    const double r2 = quasiparticle_rate(omega, gap, 0.6);
    CHECK(r2 < r1 / std::pow(2.0, 20));
    CHECK(quasiparticle_rate(omega, gap, 1e-4) == 0.0); // below the floor
    CHECK(std::isinf(t_qp(omega, gap, 1e-4)));
    CHECK_THROWS_AS(quasiparticle_rate(omega, gap, 0.0), DomainError);
}

TEST_CASE("quasiparticle crossovers: Nb-gap 20 GHz and Al-gap 6 GHz") {
    // Reference rate 1/(1 us); negligible means below 1% of it.
    const double ref = 1e6;
    const double omega_nb = angular(20e9);
    const double gap_nb = niobium().gap0_j;
    // Negligible below about 1.0 K: the 1%-of-reference crossing lies inside
    // 1.0 +- 0.15 K.
    CHECK(quasiparticle_rate(omega_nb, gap_nb, 0.85) < 0.01 * ref);
    CHECK(quasiparticle_rate(omega_nb, gap_nb, 1.15) > 0.01 * ref);
    // Dominant above about 1.2 K: the full-reference crossing lies inside
    // 1.2 +- 0.15 K.
    CHECK(quasiparticle_rate(omega_nb, gap_nb, 1.05) < ref);
    CHECK(quasiparticle_rate(omega_nb, gap_nb, 1.35) > ref);

    // Al-gap 6 GHz qubit crosses the same negligibility reference near
    // 160 mK (tolerance +-30 mK).
    const double omega_al = angular(6e9);
    const double gap_al = aluminium().gap0_j;
    CHECK(quasiparticle_rate(omega_al, gap_al, 0.13) < 0.01 * ref);
    CHECK(quasiparticle_rate(omega_al, gap_al, 0.19) > 0.01 * ref);
}

TEST_CASE("t1_of_temperature") {
    const ThermalModel m = kband_model();
    // Low-temperature limit is t1_0/2.
    CHECK(t1_of_temperature(1e-4, m) == doctest::Approx(1.0e-6).epsilon(1e-9));
    // Strictly decreasing on a grid (below ~50 mK the heating correction
    // underflows and the curve is flat to machine precision).
    double prev = t1_of_temperature(0.05, m);
    for (double t = 0.08; t <= 1.4; t += 0.03) {
        const double cur = t1_of_temperature(t, m);
        CHECK(cur < prev);
        prev = cur;
    }
    // Mild decrease regime for Nb parameters.
    CHECK(t1_of_temperature(0.3, m) / t1_of_temperature(0.08, m) >= 0.8);
}

TEST_CASE("t2 composition identity and limits") {
    ThermalModel m = kband_model();
    // Gamma_phi = 0 (T = 0) with negligible environmental dephasing leaves
    // the dissipation limit T2 = 2 T1.
    ThermalModel m2 = m;
    m2.qubit.t2_0_s = 1e30;
    const CoherencePrediction cold = coherence_at(0.0, m2);
    CHECK(cold.gamma_phi == 0.0);
    CHECK(cold.n_th == 0.0);
    CHECK(cold.t2_s == doctest::Approx(2.0 * cold.t1_s).epsilon(1e-12));

    // Composite identity 1/T2 - 1/(2 T1) - 1/T2_0 = Gamma_phi, to 1e-12 of
    // the composed rate.
    for (const double t : {0.05, 0.15, 0.3, 0.45}) {
        const CoherencePrediction p = coherence_at(t, m);
        const double lhs = 1.0 / p.t2_s - 0.5 / p.t1_s - 1.0 / m.qubit.t2_0_s;
        CHECK(std::abs(lhs - p.gamma_phi) <= 1e-12 / p.t2_s);
        CHECK(p.t2_s <= 2.0 * p.t1_s * (1.0 + 1e-9));
    }

    // Monotone non-increasing in T.
    double prev = t2_of_temperature(0.01, m);
    for (double t = 0.03; t <= 1.0; t += 0.02) {
        const double cur = t2_of_temperature(t, m);
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("t1 mode selection changes the composition") {
    const ThermalModel m = kband_model();
    const CoherencePrediction fixed = coherence_at(0.5, m, T1Mode::fixed_low_temperature);
    const CoherencePrediction full = coherence_at(0.5, m, T1Mode::temperature_dependent);
    CHECK(fixed.t1_s == doctest::Approx(0.5 * m.qubit.t1_0_s));
    CHECK(full.t1_s == doctest::Approx(t1_of_temperature(0.5, m)).epsilon(1e-12));
    CHECK(full.t1_s < fixed.t1_s);
    CHECK(full.t2_s < fixed.t2_s);
}

TEST_CASE("thermal dephasing onset for paper-range readout parameters") {
    // chi/2pi = 2 MHz, gamma/2pi = 9 MHz, f_R = 21 GHz, fixed T1 = 1 us,
    // T2_0 = 2.5 us.
    const ThermalModel m = kband_model();
    const double t2_base = t2_of_temperature(0.08, m);
    for (double t = 0.09; t <= 0.2001; t += 0.01)
        CHECK(t2_of_temperature(t, m) > 0.9 * t2_base);
    CHECK(t2_of_temperature(0.35, m) < 0.75 * t2_base);
}

TEST_CASE("pure dephasing extraction") {
    CHECK(pure_dephasing_extract(2.0e-6, 1.0e-6, 1e30).gamma_phi ==
          doctest::Approx(0.0).epsilon(1e-15));
    // Round-trip against the forward composition.
    const ThermalModel m = kband_model();
    for (const double t : {0.1, 0.25, 0.4}) {
        const CoherencePrediction p = coherence_at(t, m);
        const DephasingExtract ex =
            pure_dephasing_extract(p.t2_s, p.t1_s, m.qubit.t2_0_s);
        CHECK(ex.gamma_phi == doctest::Approx(p.gamma_phi).epsilon(1e-9));
        CHECK_FALSE(ex.clamped);
    }
    // T2 slightly above the dissipation limit clamps to zero with a flag.
    const DephasingExtract clamp = pure_dephasing_extract(2.02e-6, 1.0e-6, 1e30);
    CHECK(clamp.gamma_phi == 0.0);
    CHECK(clamp.clamped);
    CHECK_THROWS_AS(pure_dephasing_extract(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("thermal population and effective temperature") {
    // Limits.
    CHECK(thermal_population(21e9, 1e9) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(thermal_population(21e9, 2e-3) == doctest::Approx(0.0).epsilon(1e-12));
    // 21 GHz at 116 mK, frozen from direct evaluation.
    CHECK(thermal_population(21e9, 0.116) ==
          doctest::Approx(0.00016852045702648808).epsilon(1e-12));

    // Exact inverse round-trip.
    for (const double t : {0.05, 0.116, 0.3}) {
        const double p = thermal_population(21e9, t);
        CHECK(effective_temperature(21e9, p).kelvin == doctest::Approx(t).epsilon(1e-12));
    }
    // The measured population anchor maps to 116 +- 3 mK at 21 GHz.
    const EffectiveTemperature eff = effective_temperature(21e9, 1.7e-4);
    CHECK(eff.kelvin == doctest::Approx(0.11611684499537319).epsilon(1e-12));
    CHECK(std::abs(eff.kelvin - 0.116) < 3e-3);
    CHECK_FALSE(eff.overflow);

    // The frequency implied by (116 mK, 0.017%) sits near 21 GHz, which is
    // where the measured pair pins the qubit frequency.
    const double f_implied = 0.116 * constants::kB * std::log((1.0 - 1.7e-4) / 1.7e-4) /
                             constants::h;
    CHECK(std::abs(f_implied / 21.0e9 - 1.0) < 0.02);

    CHECK(effective_temperature(1e9, 0.49999999999).overflow);
    CHECK_THROWS_AS(effective_temperature(21e9, 0.6), DomainError);
    CHECK_THROWS_AS(effective_temperature(21e9, 0.0), DomainError);
    CHECK_THROWS_AS(thermal_population(21e9, 0.0), DomainError);
}
