#include "qcm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace qcm {

TraceKind trace_kind_from_string(const std::string& s) {
    if (s == "decay") return TraceKind::decay;
    if (s == "ramsey") return TraceKind::ramsey;
    if (s == "echo") return TraceKind::echo;
    if (s == "rabi_amplitude") return TraceKind::rabi_amplitude;
    if (s == "temperature_sweep") return TraceKind::temperature_sweep;
    throw DomainError("unknown trace kind '" + s + "'");
}

std::string to_string(TraceKind k) {
    switch (k) {
        case TraceKind::decay: return "decay";
        case TraceKind::ramsey: return "ramsey";
        case TraceKind::echo: return "echo";
        case TraceKind::rabi_amplitude: return "rabi_amplitude";
        case TraceKind::temperature_sweep: return "temperature_sweep";
    }
    return "unknown";
}

namespace {

bool time_like(TraceKind k) {
    return k == TraceKind::decay || k == TraceKind::ramsey || k == TraceKind::echo ||
           k == TraceKind::temperature_sweep;
}

} // namespace

void Trace::validate() const {
    if (x.size() != y.size()) throw DomainError("trace: x and y lengths differ");
    if (!sigma_y.empty() && sigma_y.size() != y.size())
        throw DomainError("trace: sigma_y length differs from y");
    if (x.size() < 4) throw InsufficientDataError("trace: need at least 4 points");
    if (time_like(kind)) {
        for (std::size_t i = 1; i < x.size(); ++i)
            if (x[i] <= x[i - 1])
                throw DomainError("trace: x must be strictly increasing for kind " +
                                  to_string(kind));
    }
    for (const double s : sigma_y)
        if (s <= 0.0) throw DomainError("trace: sigma_y entries must be positive");
}

double FitResult::param(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) throw DomainError("fit result has no parameter '" + name + "'");
    return it->second;
}

double FitResult::stderr_of(const std::string& name) const {
    const auto it = std::find(param_order.begin(), param_order.end(), name);
    if (it == param_order.end() || covariance.empty())
        throw DomainError("fit result has no uncertainty for '" + name + "'");
    const std::size_t k = param_order.size();
    const std::size_t i = static_cast<std::size_t>(it - param_order.begin());
    return std::sqrt(std::max(0.0, covariance[i * k + i]));
}

bool FitResult::has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton (Levenberg-Marquardt) on weighted residuals.
// ---------------------------------------------------------------------------

namespace {

// Residuals r (length m) and optional row-major Jacobian dr/dp (m x k).
// Returns false if the parameter vector is outside the model domain.
using LmEval =
    std::function<bool(std::span<const double> p, std::vector<double>& r, Matrix* jac)>;

struct LmOutcome {
    std::vector<double> p;
    double ssr = 0.0;
    bool converged = false;
    int iterations = 0;
    Matrix jtj; // at the optimum
};

bool cholesky_solve(Matrix a, std::vector<double> b, std::vector<double>& out) {
    const std::size_t n = a.rows;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= a.at(i, k) * a.at(j, k);
            if (i == j) {
                if (sum <= 0.0) return false;
                a.at(i, i) = std::sqrt(sum);
            } else {
                a.at(i, j) = sum / a.at(j, j);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a.at(i, k) * b[k];
        b[i] = sum / a.at(i, i);
    }
    out.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= a.at(k, ii) * out[k];
        out[ii] = sum / a.at(ii, ii);
    }
    return true;
}

bool invert_spd(const Matrix& a, Matrix& inv) {
    const std::size_t n = a.rows;
    inv = Matrix(n, n);
    std::vector<double> e(n, 0.0), col;
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        if (!cholesky_solve(a, e, col)) return false;
        for (std::size_t i = 0; i < n; ++i) inv.at(i, j) = col[i];
    }
    return true;
}

double sum_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (const double v : r) s += v * v;
    return s;
}

LmOutcome levenberg_marquardt(const LmEval& eval, std::vector<double> p,
                              std::size_t n_res, int max_iter = 200,
                              double gtol = 1e-10, double xtol = 1e-12) {
    const std::size_t k = p.size();
    std::vector<double> r;
    Matrix jac(n_res, k);

    LmOutcome out;
    if (!eval(p, r, &jac)) {
        out.p = std::move(p);
        return out;
    }
    double ssr = sum_squares(r);

    double lambda = 1e-3;
    const auto normal_equations = [&](Matrix& jtj, std::vector<double>& g) {
        jtj = Matrix(k, k);
        g.assign(k, 0.0);
        for (std::size_t i = 0; i < n_res; ++i) {
            for (std::size_t a = 0; a < k; ++a) {
                g[a] += jac.at(i, a) * r[i];
                for (std::size_t b = 0; b <= a; ++b)
                    jtj.at(a, b) += jac.at(i, a) * jac.at(i, b);
            }
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) jtj.at(a, b) = jtj.at(b, a);
    };

    Matrix jtj;
    std::vector<double> g;
    normal_equations(jtj, g);

    // Gradient stopping tests: an absolute infinity-norm criterion for
    // well-scaled problems and the scale-invariant cosine between the
    // residual and the Jacobian columns for badly scaled ones.
    const auto gradient_cosine = [&]() {
        if (ssr <= 0.0) return 0.0;
        double worst = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const double col = std::sqrt(jtj.at(a, a));
            if (col > 0.0)
                worst = std::max(worst, std::abs(g[a]) / (col * std::sqrt(ssr)));
        }
        return worst;
    };
    const auto gradient_converged = [&]() {
        if (ssr == 0.0) return true;
        double gmax = 0.0;
        for (const double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax <= gtol * std::max(1.0, ssr)) return true;
        return gradient_cosine() <= 1e-8;
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (gradient_converged()) {
            out.converged = true;
            break;
        }

        Matrix damped = jtj;
        for (std::size_t a = 0; a < k; ++a)
            damped.at(a, a) += lambda * std::max(jtj.at(a, a), 1e-300);
        std::vector<double> neg_g(k);
        for (std::size_t a = 0; a < k; ++a) neg_g[a] = -g[a];
        std::vector<double> step;
        if (!cholesky_solve(damped, neg_g, step)) {
            lambda *= 10.0;
            if (lambda > 1e14) break;
            continue;
        }

        std::vector<double> p_try(k);
        for (std::size_t a = 0; a < k; ++a) p_try[a] = p[a] + step[a];
        double step_rel = 0.0;
        for (std::size_t a = 0; a < k; ++a)
            step_rel = std::max(step_rel,
                                std::abs(step[a]) / std::max(std::abs(p_try[a]), 1e-30));
        std::vector<double> r_try;
        const bool in_domain = eval(p_try, r_try, nullptr);
        const double ssr_try =
            in_domain ? sum_squares(r_try) : std::numeric_limits<double>::infinity();

        if (ssr_try < ssr) { // trust-region acceptance: cost never increases
            const double improvement = (ssr - ssr_try) / std::max(ssr, 1e-300);
            p = std::move(p_try);
            ssr = ssr_try;
            eval(p, r, &jac);
            normal_equations(jtj, g);
            lambda = std::max(lambda / 3.0, 1e-14);
            if (step_rel < xtol || improvement < 1e-14) {
                out.converged = true;
                ++iter;
                break;
            }
        } else {
            // A sub-rounding proposal near a stationary point means there is
            // nothing left to gain.
            if (step_rel < xtol && gradient_cosine() <= 1e-4) {
                out.converged = true;
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e14) break;
        }
    }

    out.p = std::move(p);
    out.ssr = ssr;
    out.iterations = iter;
    out.jtj = std::move(jtj);
    return out;
}

// Covariance from the scaled inverse of the normal-equations matrix. When the
// trace carried no sigma_y the residual variance estimates the noise scale.
void fill_fit_result(FitResult& fr, const LmOutcome& lm, std::size_t n_res,
                     bool weighted) {
    const std::size_t k = fr.param_order.size();
    fr.iterations = lm.iterations;
    fr.converged = lm.converged;
    const double dof = static_cast<double>(n_res > k ? n_res - k : 1);
    fr.reduced_chi2 = lm.ssr / dof;
    Matrix inv;
    if (lm.jtj.rows == k && invert_spd(lm.jtj, inv)) {
        const double scale = weighted ? 1.0 : lm.ssr / dof;
        fr.covariance.resize(k * k);
        for (std::size_t i = 0; i < k * k; ++i) fr.covariance[i] = inv.data[i] * scale;
    } else {
        fr.flags.push_back("singular_normal_equations");
    }
}

std::vector<double> weights_of(const Trace& t) {
    std::vector<double> w(t.y.size(), 1.0);
    if (!t.sigma_y.empty())
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / t.sigma_y[i];
    return w;
}

// Discrete spectrum of mean-subtracted data on an oversampled frequency grid.
struct SpectralPeak {
    double freq = 0.0;
    double amplitude = 0.0; // 2|Z|/N
    double phase = 0.0;     // arg Z
    bool visible = false;
};

SpectralPeak spectral_peak(const std::vector<double>& x, const std::vector<double>& yc) {
    const std::size_t n = x.size();
    const double span = x.back() - x.front();
    SpectralPeak out;
    double scale = 0.0;
    for (const double v : yc) scale = std::max(scale, std::abs(v));
    if (scale <= 0.0 || span <= 0.0) return out;

    const double f_max = 0.5 * static_cast<double>(n - 1) / span; // mean Nyquist
    const std::size_t grid = 8 * n;
    std::vector<double> power(grid, 0.0);
    std::complex<double> z_best = 0.0;
    std::size_t best = 0;
    for (std::size_t j = 1; j <= grid; ++j) {
        const double f = f_max * static_cast<double>(j) / static_cast<double>(grid);
        std::complex<double> z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = -2.0 * std::numbers::pi * f * x[i];
            z += yc[i] * std::complex<double>(std::cos(arg), std::sin(arg));
        }
        power[j - 1] = std::norm(z);
        if (power[j - 1] > power[best]) {
            best = j - 1;
            z_best = z;
            out.freq = f;
        }
    }
    std::vector<double> sorted = power;
    std::nth_element(sorted.begin(), sorted.begin() + grid / 2, sorted.end());
    const double median = sorted[grid / 2];
    if (power[best] < 10.0 * median || power[best] <= 0.0) return out;
    out.amplitude = 2.0 * std::abs(z_best) / static_cast<double>(n);
    out.phase = std::arg(z_best);
    out.visible = true;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Exponential decay
// ---------------------------------------------------------------------------

FitResult fit_exp_decay(const Trace& t) {
    t.validate();
    if (t.kind != TraceKind::decay)
        throw DomainError("fit_exp_decay: trace kind must be decay");
    const std::size_t n = t.x.size();
    const std::vector<double> w = weights_of(t);

    FitResult fr;
    fr.param_order = {"A", "T1", "C"};

    // Degenerate input: no spread at all.
    const double y_mean = std::accumulate(t.y.begin(), t.y.end(), 0.0) / n;
    double spread = 0.0;
    for (const double v : t.y) spread = std::max(spread, std::abs(v - y_mean));
    if (spread <= 1e-14 * std::max(1.0, std::abs(y_mean))) {
        fr.params = {{"A", 0.0}, {"T1", 0.0}, {"C", y_mean}};
        fr.flags = {"degenerate_constant_input", "t1_unbounded"};
        fr.converged = false;
        return fr;
    }

    // Initial guesses: baseline from the tail, decay scale from a log-linear
    // regression on the baseline-subtracted early points.
    double c0 = (t.y[n - 1] + t.y[n - 2] + t.y[n - 3]) / 3.0;
    double a0 = t.y[0] - c0;
    if (std::abs(a0) < 1e-12 * spread) a0 = spread;
    const double span = t.x.back() - t.x.front();
    double t1_0 = span / 3.0;
    {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (t.y[i] - c0) / a0;
            if (z > 0.05) {
                const double ly = std::log(z);
                sx += t.x[i];
                sy += ly;
                sxx += t.x[i] * t.x[i];
                sxy += t.x[i] * ly;
                ++m;
            }
        }
        if (m >= 2) {
            const double det = static_cast<double>(m) * sxx - sx * sx;
            if (det > 0.0) {
                const double slope = (static_cast<double>(m) * sxy - sx * sy) / det;
                if (slope < 0.0) t1_0 = -1.0 / slope;
            }
        }
    }

    const LmEval eval = [&](std::span<const double> p, std::vector<double>& r,
                            Matrix* jac) {
        const double a = p[0], t1 = p[1], c = p[2];
        if (t1 <= 0.0) return false;
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-t.x[i] / t1);
            r[i] = w[i] * (a * e + c - t.y[i]);
            if (jac) {
                jac->at(i, 0) = w[i] * e;
                jac->at(i, 1) = w[i] * a * e * t.x[i] / (t1 * t1);
                jac->at(i, 2) = w[i];
            }
        }
        return true;
    };

    const LmOutcome lm = levenberg_marquardt(eval, {a0, t1_0, c0}, n);
    fr.params = {{"A", lm.p[0]}, {"T1", lm.p[1]}, {"C", lm.p[2]}};
    fill_fit_result(fr, lm, n, !t.sigma_y.empty());
    if (lm.p[1] > 100.0 * span) {
        fr.flags.push_back("t1_unbounded");
        fr.converged = false;
    }
    return fr;
}

// ---------------------------------------------------------------------------
// Damped sinusoid (Ramsey / Hahn echo)
// ---------------------------------------------------------------------------

FitResult fit_damped_sinusoid(const Trace& t) {
    t.validate();
    if (t.kind != TraceKind::ramsey && t.kind != TraceKind::echo)
        throw DomainError("fit_damped_sinusoid: trace kind must be ramsey or echo");
    const std::size_t n = t.x.size();
    if (n < 8)
        throw InsufficientDataError("fit_damped_sinusoid: need at least 8 points");
    const std::vector<double> w = weights_of(t);

    const double y_mean = std::accumulate(t.y.begin(), t.y.end(), 0.0) / n;
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = t.y[i] - y_mean;

    const SpectralPeak peak = spectral_peak(t.x, yc);
    if (!peak.visible)
        throw LowVisibilityError(
            "fit_damped_sinusoid: no spectral peak above the noise floor");

    // Decay scale from the RMS ratio of the two halves of the trace.
    const double span = t.x.back() - t.x.front();
    double t2_0 = span;
    {
        const std::size_t half = n / 2;
        double rms1 = 0.0, rms2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) rms1 += yc[i] * yc[i];
        for (std::size_t i = half; i < n; ++i) rms2 += yc[i] * yc[i];
        rms1 = std::sqrt(rms1 / half);
        rms2 = std::sqrt(rms2 / (n - half));
        if (rms1 > 0.0 && rms2 > 0.0 && rms2 < rms1) {
            const double dt = 0.5 * span;
            t2_0 = std::clamp(-dt / std::log(rms2 / rms1), 0.1 * span, 10.0 * span);
        }
    }

    const LmEval eval = [&](std::span<const double> p, std::vector<double>& r,
                            Matrix* jac) {
        const double a = p[0], t2 = p[1], f = p[2], phi = p[3], c = p[4];
        if (t2 <= 0.0 || f <= 0.0) return false;
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-t.x[i] / t2);
            const double arg = 2.0 * std::numbers::pi * f * t.x[i] + phi;
            const double cosv = std::cos(arg), sinv = std::sin(arg);
            r[i] = w[i] * (a * e * cosv + c - t.y[i]);
            if (jac) {
                jac->at(i, 0) = w[i] * e * cosv;
                jac->at(i, 1) = w[i] * a * e * cosv * t.x[i] / (t2 * t2);
                jac->at(i, 2) = w[i] * (-a * e * sinv * 2.0 * std::numbers::pi * t.x[i]);
                jac->at(i, 3) = w[i] * (-a * e * sinv);
                jac->at(i, 4) = w[i];
            }
        }
        return true;
    };

    const LmOutcome lm = levenberg_marquardt(
        eval, {peak.amplitude, t2_0, peak.freq, peak.phase, y_mean}, n);

    FitResult fr;
    fr.param_order = {"A", "T2", "f_osc", "phase", "C"};
    fr.params = {{"A", lm.p[0]},
                 {"T2", lm.p[1]},
                 {"f_osc", lm.p[2]},
                 {"phase", lm.p[3]},
                 {"C", lm.p[4]}};
    fill_fit_result(fr, lm, n, !t.sigma_y.empty());
    return fr;
}

// ---------------------------------------------------------------------------
// Rabi fringe versus drive amplitude
// ---------------------------------------------------------------------------

FitResult fit_rabi(const Trace& t_in) {
    Trace t = t_in;
    if (t.kind != TraceKind::rabi_amplitude)
        throw DomainError("fit_rabi: trace kind must be rabi_amplitude");

    FitResult fr;
    fr.param_order = {"P0", "amp_per_unit", "phase", "C"};

    // Non-monotone amplitude grids are re-sorted with a warning flag.
    bool sorted_flag = false;
    for (std::size_t i = 1; i < t.x.size() && !sorted_flag; ++i)
        if (t.x[i] <= t.x[i - 1]) sorted_flag = true;
    if (sorted_flag) {
        std::vector<std::size_t> idx(t.x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return t.x[a] < t.x[b]; });
        Trace s;
        s.kind = t.kind;
        for (const std::size_t i : idx) {
            s.x.push_back(t.x[i]);
            s.y.push_back(t.y[i]);
            if (!t.sigma_y.empty()) s.sigma_y.push_back(t.sigma_y[i]);
        }
        t = std::move(s);
        fr.flags.push_back("sorted_input");
    }
    t.validate();
    const std::size_t n = t.x.size();
    const std::vector<double> w = weights_of(t);

    const double y_mean = std::accumulate(t.y.begin(), t.y.end(), 0.0) / n;
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = t.y[i] - y_mean;
    const SpectralPeak peak = spectral_peak(t.x, yc);
    if (!peak.visible)
        throw LowVisibilityError("fit_rabi: no spectral peak above the noise floor");

    const double p0_init = 2.0 * peak.amplitude;
    const double phi_init = peak.phase + std::numbers::pi; // -cos component
    const double c_init = y_mean - 0.5 * p0_init;

    const LmEval eval = [&](std::span<const double> p, std::vector<double>& r,
                            Matrix* jac) {
        const double p0 = p[0], k = p[1], phi = p[2], c = p[3];
        if (k <= 0.0) return false;
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = 2.0 * std::numbers::pi * k * t.x[i] + phi;
            const double cosv = std::cos(arg), sinv = std::sin(arg);
            r[i] = w[i] * (c + 0.5 * p0 * (1.0 - cosv) - t.y[i]);
            if (jac) {
                jac->at(i, 0) = w[i] * 0.5 * (1.0 - cosv);
                jac->at(i, 1) = w[i] * p0 * std::numbers::pi * t.x[i] * sinv;
                jac->at(i, 2) = w[i] * 0.5 * p0 * sinv;
                jac->at(i, 3) = w[i];
            }
        }
        return true;
    };

    const LmOutcome lm =
        levenberg_marquardt(eval, {p0_init, peak.freq, phi_init, c_init}, n);

    fr.params = {{"P0", lm.p[0]},
                 {"amp_per_unit", lm.p[1]},
                 {"phase", lm.p[2]},
                 {"C", lm.p[3]}};
    fill_fit_result(fr, lm, n, !t.sigma_y.empty());

    // pi-pulse amplitude: first maximum of 1 - cos(2 pi k x + phi).
    const double k = lm.p[1];
    double phi = std::fmod(lm.p[2], 2.0 * std::numbers::pi);
    if (phi > std::numbers::pi) phi -= 2.0 * std::numbers::pi;
    if (phi < -std::numbers::pi) phi += 2.0 * std::numbers::pi;
    double x_pi = (std::numbers::pi - phi) / (2.0 * std::numbers::pi * k);
    const double period = 1.0 / k;
    while (x_pi > period) x_pi -= period;
    while (x_pi < 0.0) x_pi += period;
    fr.params["pi_amplitude"] = x_pi;
    return fr;
}

// ---------------------------------------------------------------------------

double population_from_ef_amplitudes(double a_idle, double a_swapped) {
    if (a_idle < 0.0 || a_swapped < 0.0)
        throw DomainError("population_from_ef_amplitudes: amplitudes must be >= 0");
    const double total = a_idle + a_swapped;
    if (total <= 0.0)
        throw DomainError("population_from_ef_amplitudes: both amplitudes are zero");
    return a_idle / total;
}

FluctuationStats t1_fluctuation_stats(
    std::span<const std::pair<double, double>> t1_and_sigma_fit) {
    if (t1_and_sigma_fit.size() < 10)
        throw InsufficientDataError("t1_fluctuation_stats: need at least 10 samples");
    const std::size_t n = t1_and_sigma_fit.size();
    double mean = 0.0;
    for (const auto& [t1, sigma] : t1_and_sigma_fit) {
        if (t1 <= 0.0) throw DomainError("t1_fluctuation_stats: T1 samples must be positive");
        if (sigma < 0.0)
            throw DomainError("t1_fluctuation_stats: sigma_fit must be >= 0");
        mean += t1;
    }
    mean /= static_cast<double>(n);
    double var = 0.0, fit_var = 0.0;
    for (const auto& [t1, sigma] : t1_and_sigma_fit) {
        var += (t1 - mean) * (t1 - mean);
        fit_var += sigma * sigma;
    }
    var /= static_cast<double>(n - 1);
    fit_var /= static_cast<double>(n);

    FluctuationStats out;
    out.mean_t1 = mean;
    const double intrinsic = var - fit_var;
    out.clamped = intrinsic < 0.0;
    out.sigma_intrinsic_rel = intrinsic > 0.0 ? std::sqrt(intrinsic) / mean : 0.0;
    return out;
}

std::vector<double> windowed_error_rate(std::span<const int> outcomes,
                                        std::size_t window) {
    if (window < 1 || window > outcomes.size())
        throw DomainError("windowed_error_rate: window must be in [1, length]");
    for (const int o : outcomes)
        if (o != 0 && o != 1)
            throw DomainError("windowed_error_rate: outcomes must be 0 or 1");
    std::vector<double> rates(outcomes.size() - window + 1);
    long running = 0;
    for (std::size_t i = 0; i < window; ++i) running += outcomes[i];
    rates[0] = static_cast<double>(running) / static_cast<double>(window);
    for (std::size_t i = window; i < outcomes.size(); ++i) {
        running += outcomes[i] - outcomes[i - window];
        rates[i - window + 1] = static_cast<double>(running) / static_cast<double>(window);
    }
    return rates;
}

// ---------------------------------------------------------------------------
// Thermal model overlay
// ---------------------------------------------------------------------------

OverlayResult overlay_thermal_model(std::span<const ThermalSweepPoint> points,
                                    const ThermalModel& m, bool refine) {
    m.validate();
    if (points.size() < 2)
        throw InsufficientDataError("overlay_thermal_model: need at least 2 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].t_k <= 0.0 || points[i].t1_s <= 0.0 || points[i].t2_s <= 0.0)
            throw DomainError("overlay_thermal_model: temperatures and times must be positive");
        if (i > 0 && points[i].t_k <= points[i - 1].t_k)
            throw DomainError("overlay_thermal_model: temperatures must be increasing");
    }

    const std::size_t n = points.size();
    ThermalModel model = m;

    OverlayResult out;
    out.t1_0_s = m.qubit.t1_0_s;
    out.t2_0_s = m.qubit.t2_0_s;

    if (refine) {
        // Fit T1_0 and T2_0 only, on relative residuals for both observables.
        const LmEval eval = [&](std::span<const double> p, std::vector<double>& r,
                                Matrix* jac) {
            const double t1_0 = p[0], t2_0 = p[1];
            if (t1_0 <= 0.0 || t2_0 <= 0.0) return false;
            ThermalModel trial = m;
            trial.qubit.t1_0_s = t1_0;
            trial.qubit.t2_0_s = t2_0;
            r.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) {
                const double t1 = t1_of_temperature(points[i].t_k, trial);
                const CoherencePrediction pred =
                    coherence_at(points[i].t_k, trial, T1Mode::temperature_dependent);
                r[i] = t1 / points[i].t1_s - 1.0;
                r[n + i] = pred.t2_s / points[i].t2_s - 1.0;
                if (jac) {
                    const double z = 0.5 * constants::hbar * angular(m.qubit.f_ge_hz) /
                                     (constants::kB * std::max(points[i].t_k, kTemperatureFloorK));
                    const double coth = z > 20.0 ? 1.0 : 1.0 / std::tanh(z);
                    const double dt1_dt10 = t1 * t1 * (1.0 + coth) / (t1_0 * t1_0);
                    const double t2 = pred.t2_s;
                    const double dt2_dt20 = t2 * t2 / (t2_0 * t2_0);
                    const double dt2_dt10 = t2 * t2 / (2.0 * t1 * t1) * dt1_dt10;
                    jac->at(i, 0) = dt1_dt10 / points[i].t1_s;
                    jac->at(i, 1) = 0.0;
                    jac->at(n + i, 0) = dt2_dt10 / points[i].t2_s;
                    jac->at(n + i, 1) = dt2_dt20 / points[i].t2_s;
                }
            }
            return true;
        };
        const LmOutcome lm =
            levenberg_marquardt(eval, {m.qubit.t1_0_s, m.qubit.t2_0_s}, 2 * n);
        out.refined = true;
        out.converged = lm.converged;
        out.t1_0_s = lm.p[0];
        out.t2_0_s = lm.p[1];
        model.qubit.t1_0_s = lm.p[0];
        model.qubit.t2_0_s = lm.p[1];
    }

    double ssr = 0.0;
    for (const ThermalSweepPoint& pt : points) {
        const double t1 = t1_of_temperature(pt.t_k, model);
        const CoherencePrediction pred =
            coherence_at(pt.t_k, model, T1Mode::temperature_dependent);
        out.t1_model_s.push_back(t1);
        out.t2_model_s.push_back(pred.t2_s);
        out.t1_residual_s.push_back(t1 - pt.t1_s);
        out.t2_residual_s.push_back(pred.t2_s - pt.t2_s);
        const double r1 = t1 / pt.t1_s - 1.0;
        const double r2 = pred.t2_s / pt.t2_s - 1.0;
        ssr += r1 * r1 + r2 * r2;
    }
    const std::size_t k = refine ? 2 : 0;
    const std::size_t dof = 2 * n > k ? 2 * n - k : 1;
    out.reduced_chi2 = ssr / static_cast<double>(dof);
    return out;
}

} // namespace qcm
