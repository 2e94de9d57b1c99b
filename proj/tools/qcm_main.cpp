// Command-line surface for the coherence-model library: fit, thermal,
// chevron, sweep, junction and population subcommands, all emitting a JSON
// result envelope plus plot-ready CSV files.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcm/fit.hpp"
#include "qcm/io.hpp"
#include "qcm/junction.hpp"
#include "qcm/pulse.hpp"
#include "qcm/sweep.hpp"
#include "qcm/thermal.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir; // empty until --out is given; flags beat config
};

qcm::KeyValueConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return {};
    return qcm::KeyValueConfig::from_file(args.config_path);
}

fs::path out_path(const CommonArgs& args, const qcm::KeyValueConfig& cfg,
                  const std::string& name) {
    const fs::path dir = !args.out_dir.empty()
                             ? fs::path(args.out_dir)
                             : fs::path(cfg.get_string_or("output_dir", "."));
    fs::create_directories(dir);
    return dir / name;
}

std::vector<double> linspace(double lo, double hi, std::size_t steps) {
    if (steps < 1) throw qcm::DomainError("grid steps must be >= 1");
    std::vector<double> grid(steps);
    if (steps == 1) {
        grid[0] = lo;
        return grid;
    }
    for (std::size_t i = 0; i < steps; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return grid;
}

std::vector<double> logspace(double lo, double hi, std::size_t steps) {
    if (lo <= 0.0 || hi <= lo) throw qcm::DomainError("log grid needs 0 < lo < hi");
    std::vector<double> grid = linspace(std::log(lo), std::log(hi), steps);
    for (double& v : grid) v = std::exp(v);
    return grid;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::string cell;
    std::istringstream in(csv);
    while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

void report(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

// ---------------------------------------------------------------------------

int run_fit(const CommonArgs& common, const std::string& trace_path,
            const std::string& kind_flag, bool refine) {
    qcm::KeyValueConfig cfg = load_config(common);

    if (kind_flag == "temperature_sweep") {
        const auto points = qcm::read_thermal_sweep_csv(trace_path);
        const qcm::ThermalModel model = qcm::thermal_model_from_config(cfg);
        const qcm::OverlayResult overlay =
            qcm::overlay_thermal_model(points, model, refine);
        ordered_json payload;
        payload["kind"] = "temperature_sweep";
        payload["refined"] = overlay.refined;
        payload["t1_0_s"] = overlay.t1_0_s;
        payload["t2_0_s"] = overlay.t2_0_s;
        payload["reduced_chi2"] = overlay.reduced_chi2;
        payload["t1_model_s"] = overlay.t1_model_s;
        payload["t2_model_s"] = overlay.t2_model_s;
        payload["t1_residual_s"] = overlay.t1_residual_s;
        payload["t2_residual_s"] = overlay.t2_residual_s;
        const fs::path jp = out_path(common, cfg, "fit.json");
        qcm::write_json(jp, qcm::make_envelope("fit", cfg, payload));
        report(jp);
        if (!overlay.converged) {
            std::cerr << "overlay refinement did not converge\n";
            return 2;
        }
        return 0;
    }

    qcm::Trace trace = qcm::read_trace_csv(trace_path);
    if (!kind_flag.empty()) trace.kind = qcm::trace_kind_from_string(kind_flag);

    qcm::FitResult fr;
    switch (trace.kind) {
        case qcm::TraceKind::decay: fr = qcm::fit_exp_decay(trace); break;
        case qcm::TraceKind::ramsey:
        case qcm::TraceKind::echo: fr = qcm::fit_damped_sinusoid(trace); break;
        case qcm::TraceKind::rabi_amplitude: fr = qcm::fit_rabi(trace); break;
        case qcm::TraceKind::temperature_sweep:
            throw qcm::DomainError("temperature_sweep traces need --kind temperature_sweep");
    }

    ordered_json payload;
    payload["kind"] = qcm::to_string(trace.kind);
    payload["fit"] = qcm::fit_result_to_json(fr);
    const fs::path jp = out_path(common, cfg, "fit.json");
    qcm::write_json(jp, qcm::make_envelope("fit", cfg, payload));
    report(jp);

    // Plot-ready curve: x, measured y, fitted y.
    const fs::path cp = out_path(common, cfg, "fit_curve.csv");
    {
        std::ofstream out(cp);
        out << "x,y_data,y_fit\n";
        for (std::size_t i = 0; i < trace.x.size(); ++i) {
            const double x = trace.x[i];
            double yfit = 0.0;
            if (trace.kind == qcm::TraceKind::decay) {
                yfit = fr.param("A") * std::exp(-x / fr.param("T1")) + fr.param("C");
            } else if (trace.kind == qcm::TraceKind::rabi_amplitude) {
                yfit = fr.param("C") +
                       0.5 * fr.param("P0") *
                           (1.0 - std::cos(2.0 * M_PI * fr.param("amp_per_unit") * x +
                                           fr.param("phase")));
            } else {
                yfit = fr.param("A") * std::exp(-x / fr.param("T2")) *
                           std::cos(2.0 * M_PI * fr.param("f_osc") * x + fr.param("phase")) +
                       fr.param("C");
            }
            out << qcm::format_g17(x) << ',' << qcm::format_g17(trace.y[i]) << ','
                << qcm::format_g17(yfit) << "\n";
        }
    }
    report(cp);

    if (!fr.converged) {
        std::cerr << "fit did not converge";
        for (const auto& f : fr.flags) std::cerr << " [" << f << "]";
        std::cerr << "\n";
        return 2;
    }
    return 0;
}

int run_thermal(const CommonArgs& common, const std::string& t_list_flag) {
    qcm::KeyValueConfig cfg = load_config(common);
    const qcm::ThermalModel model = qcm::thermal_model_from_config(cfg);

    std::vector<double> t_grid;
    const std::string t_list =
        !t_list_flag.empty() ? t_list_flag : cfg.get_string_or("thermal.t_list_k", "");
    if (!t_list.empty()) {
        t_grid = parse_list(t_list);
    } else {
        t_grid = linspace(cfg.get_double_or("thermal.t_min_k", 0.0),
                          cfg.get_double_or("thermal.t_max_k", 0.5),
                          static_cast<std::size_t>(cfg.get_long_or("thermal.t_steps", 51)));
    }

    const std::string mode_key = cfg.get_string_or("t2_t1_mode", "fixed");
    qcm::T1Mode mode;
    if (mode_key == "fixed")
        mode = qcm::T1Mode::fixed_low_temperature;
    else if (mode_key == "temperature")
        mode = qcm::T1Mode::temperature_dependent;
    else
        throw qcm::ParseError("config key 't2_t1_mode': expected 'fixed' or 'temperature'");

    ordered_json table = ordered_json::array();
    const fs::path cp = out_path(common, cfg, "thermal_table.csv");
    {
        std::ofstream out(cp);
        out << "t_k,t1_s,t2_s,gamma_phi_per_s,n_th\n";
        for (const double t : t_grid) {
            const double t1 = qcm::t1_of_temperature(t, model);
            const qcm::CoherencePrediction pred = qcm::coherence_at(t, model, mode);
            out << qcm::format_g17(t) << ',' << qcm::format_g17(t1) << ','
                << qcm::format_g17(pred.t2_s) << ',' << qcm::format_g17(pred.gamma_phi)
                << ',' << qcm::format_g17(pred.n_th) << "\n";
            table.push_back({{"t_k", t},
                             {"t1_s", t1},
                             {"t2_s", pred.t2_s},
                             {"gamma_phi_per_s", pred.gamma_phi},
                             {"n_th", pred.n_th}});
        }
    }
    report(cp);

    ordered_json payload;
    payload["t1_mode"] = mode_key;
    payload["table"] = std::move(table);
    const fs::path jp = out_path(common, cfg, "thermal.json");
    qcm::write_json(jp, qcm::make_envelope("thermal", cfg, payload));
    report(jp);
    return 0;
}

int run_chevron(const CommonArgs& common) {
    qcm::KeyValueConfig cfg = load_config(common);

    qcm::PulseSpec base;
    base.omega_peak_hz = cfg.get_double_or("pulse.omega_peak_hz", 10e6);
    base.sigma_s = cfg.get_double_or("pulse.sigma_s", 25e-9);
    base.n_trunc = cfg.get_double_or("pulse.n_trunc", 2.0);
    base.validate();

    const std::string mode_key = cfg.get_string_or("chevron.mode", "amplitude");
    qcm::ChevronMode mode;
    if (mode_key == "amplitude")
        mode = qcm::ChevronMode::amplitude;
    else if (mode_key == "length")
        mode = qcm::ChevronMode::length;
    else
        throw qcm::ParseError("config key 'chevron.mode': expected 'amplitude' or 'length'");

    const double span = cfg.get_double_or("chevron.delta_span_hz", 30e6);
    const std::size_t d_steps =
        static_cast<std::size_t>(cfg.get_long_or("chevron.delta_steps", 201));
    const std::vector<double> delta_grid = linspace(-span, span, d_steps);

    std::vector<double> swept_grid;
    if (mode == qcm::ChevronMode::amplitude) {
        swept_grid =
            linspace(cfg.get_double_or("chevron.omega_min_hz", 0.0),
                     cfg.get_double_or("chevron.omega_max_hz", 40e6),
                     static_cast<std::size_t>(cfg.get_long_or("chevron.omega_steps", 201)));
    } else {
        swept_grid =
            linspace(cfg.get_double_or("chevron.sigma_min_s", 5e-9),
                     cfg.get_double_or("chevron.sigma_max_s", 100e-9),
                     static_cast<std::size_t>(cfg.get_long_or("chevron.sigma_steps", 201)));
    }

    const qcm::Matrix map = qcm::chevron_map(delta_grid, swept_grid, base, mode);
    const auto contours = qcm::pi_pulse_contours(map, delta_grid, swept_grid);

    const fs::path cp = out_path(common, cfg, "chevron_map.csv");
    qcm::write_matrix_csv(cp, map, delta_grid, swept_grid,
                          mode == qcm::ChevronMode::amplitude ? "delta_hz\\omega_hz"
                                                              : "delta_hz\\sigma_s");
    report(cp);

    ordered_json payload;
    payload["mode"] = mode_key;
    payload["pulse"] = {{"omega_peak_hz", base.omega_peak_hz},
                        {"sigma_s", base.sigma_s},
                        {"n_trunc", base.n_trunc}};
    payload["delta_grid_hz"] = delta_grid;
    payload["swept_grid"] = swept_grid;
    payload["matrix"] = map.data; // row-major, delta rows x swept columns
    payload["contours"] = qcm::contours_to_json(contours);
    const fs::path jp = out_path(common, cfg, "chevron.json");
    qcm::write_json(jp, qcm::make_envelope("chevron", cfg, payload));
    report(jp);
    return 0;
}

int run_sweep(const CommonArgs& common) {
    qcm::KeyValueConfig cfg = load_config(common);

    qcm::SweepSpec spec;
    spec.f_grid_hz =
        logspace(cfg.get_double_or("sweep.f_min_hz", 10e9),
                 cfg.get_double_or("sweep.f_max_hz", 100e9),
                 static_cast<std::size_t>(cfg.get_long_or("sweep.f_steps", 50)));
    spec.t_grid_k =
        linspace(cfg.get_double_or("sweep.t_min_k", 0.05),
                 cfg.get_double_or("sweep.t_max_k", 1.5),
                 static_cast<std::size_t>(cfg.get_long_or("sweep.t_steps", 50)));
    spec.q_readout = cfg.get_double_or("sweep.q_readout", 2e6);
    spec.chi_lo_gamma = cfg.get_double_or("sweep.chi_lo_gamma", 0.3);
    spec.chi_hi_gamma = cfg.get_double_or("sweep.chi_hi_gamma", 5.0);
    spec.resonator_offset_hz = cfg.get_double_or("sweep.resonator_offset_hz", 0.0);
    const std::string material = cfg.get_string_or("material", "Nb");
    if (material == "Al" || material == "al")
        spec.material = qcm::aluminium();
    else if (material == "Nb" || material == "nb")
        spec.material = qcm::niobium();
    else
        spec.material = qcm::material_from_tc(material, cfg.get_double("tc_k"));
    if (cfg.has("gap_ev"))
        spec.material.gap0_j = cfg.get_double("gap_ev") * qcm::constants::e_charge;

    const qcm::SweepGrid grid = qcm::max_t2_map(spec);

    const fs::path cp = out_path(common, cfg, "sweep_grid.csv");
    qcm::write_matrix_csv(cp, grid.t2_s, spec.t_grid_k, spec.f_grid_hz, "t_k\\f_hz");
    report(cp);

    ordered_json payload;
    payload["spec"] = {{"f_grid_hz", spec.f_grid_hz},
                       {"t_grid_k", spec.t_grid_k},
                       {"q_readout", spec.q_readout},
                       {"chi_lo_gamma", spec.chi_lo_gamma},
                       {"chi_hi_gamma", spec.chi_hi_gamma},
                       {"material", spec.material.name},
                       {"gap0_j", spec.material.gap0_j},
                       {"resonator_offset_hz", spec.resonator_offset_hz}};
    payload["t2_s"] = grid.t2_s.data;
    payload["argmax_chi_gamma"] = grid.argmax_chi_gamma.data;
    payload["capped"] = grid.capped;
    payload["chi_boundary"] = grid.boundary;
    if (cfg.has("sweep.threshold_t2_s") && cfg.has("sweep.threshold_f_q_hz")) {
        payload["max_operating_temperature_k"] = qcm::max_operating_temperature(
            cfg.get_double("sweep.threshold_f_q_hz"),
            cfg.get_double("sweep.threshold_t2_s"), spec);
    }
    const fs::path jp = out_path(common, cfg, "sweep.json");
    qcm::write_json(jp, qcm::make_envelope("sweep", cfg, payload));
    report(jp);
    return 0;
}

int run_junction(const CommonArgs& common, double jc, double area_um2, double rn_ohm,
                 double lj_h, double csigma_f, const std::string& fit_exposure_csv,
                 bool constrained, const std::string& fit_inductance_csv,
                 const std::string& material, double gap_ev) {
    qcm::KeyValueConfig cfg = load_config(common);

    qcm::SuperconductorMaterial mat =
        (material == "Al" || material == "al") ? qcm::aluminium() : qcm::niobium();
    if (gap_ev > 0.0) mat.gap0_j = gap_ev * qcm::constants::e_charge;

    ordered_json payload;
    payload["material"] = mat.name;
    payload["gap0_j"] = mat.gap0_j;

    double ic = 0.0;
    if (jc > 0.0 && area_um2 > 0.0) {
        ic = qcm::critical_current(jc, area_um2);
        payload["jc_a_cm2"] = jc;
        payload["area_um2"] = area_um2;
        payload["ic_a"] = ic;
    }
    if (rn_ohm > 0.0) {
        ic = qcm::ic_from_resistance(rn_ohm, mat.gap0_j);
        payload["rn_ohm"] = rn_ohm;
        payload["ic_a"] = ic;
    }
    double lj = lj_h;
    if (ic > 0.0) {
        lj = qcm::josephson_inductance(ic);
        payload["l_j_h"] = lj;
    }
    if (lj > 0.0 && csigma_f > 0.0) {
        const qcm::TransmonEstimate est = qcm::transmon_from_design({lj, csigma_f});
        payload["transmon"] = {{"f_ge_hz", est.f_ge_hz},
                               {"alpha_hz", est.alpha_hz},
                               {"ej_over_ec", est.ej_over_ec},
                               {"in_transmon_limit", est.in_transmon_limit}};
        if (!est.in_transmon_limit)
            std::cerr << "warning: E_J/E_C = " << est.ej_over_ec
                      << " is outside the transmon limit (>= 30)\n";
    }
    if (!fit_exposure_csv.empty()) {
        const auto rows = qcm::read_two_column_csv(fit_exposure_csv);
        std::vector<qcm::JunctionProcess> pts;
        for (const auto& [exposure, jc_val] : rows) pts.push_back({jc_val, exposure});
        const qcm::JcExposureFit fit = qcm::fit_jc_exposure(pts, constrained);
        payload["jc_exposure_fit"] = {{"prefactor", fit.prefactor},
                                      {"exponent", fit.exponent},
                                      {"covariance", fit.covariance},
                                      {"residual_norm", fit.residual_norm},
                                      {"constrained", fit.constrained}};
    }
    if (!fit_inductance_csv.empty()) {
        const auto rows = qcm::read_two_column_csv(fit_inductance_csv);
        payload["jc_from_rn_area_a_cm2"] =
            qcm::fit_jc_from_resistance_area(rows, mat.gap0_j);
    }

    const fs::path jp = out_path(common, cfg, "junction.json");
    qcm::write_json(jp, qcm::make_envelope("junction", cfg, payload));
    report(jp);
    return 0;
}

int run_population(const CommonArgs& common, double a_idle, double a_swapped,
                   double f_ge_hz) {
    qcm::KeyValueConfig cfg = load_config(common);
    const double p_e = qcm::population_from_ef_amplitudes(a_idle, a_swapped);
    ordered_json payload;
    payload["a_idle"] = a_idle;
    payload["a_swapped"] = a_swapped;
    payload["p_e"] = p_e;
    if (f_ge_hz <= 0.0 && cfg.has("f_ge_hz")) f_ge_hz = cfg.get_double("f_ge_hz");
    if (f_ge_hz > 0.0 && p_e > 0.0 && p_e < 0.5) {
        const qcm::EffectiveTemperature eff = qcm::effective_temperature(f_ge_hz, p_e);
        payload["f_ge_hz"] = f_ge_hz;
        payload["effective_temperature_k"] = eff.kelvin;
        payload["overflow"] = eff.overflow;
    }
    const fs::path jp = out_path(common, cfg, "population.json");
    qcm::write_json(jp, qcm::make_envelope("population", cfg, payload));
    report(jp);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmon coherence models: junction relations, thermal dephasing, "
                 "Rabi dynamics, trace fitting and design sweeps"};
    app.set_version_flag("--version", qcm::kToolVersion);
    app.require_subcommand(1);

    CommonArgs common;

    std::string trace_path, kind_flag, t_list_flag;
    bool refine = false;
    double jc = 0.0, area = 0.0, rn = 0.0, lj = 0.0, csigma = 0.0, gap_ev = 0.0;
    double a_idle = -1.0, a_swapped = -1.0, f_ge = 0.0;
    std::string fit_exposure_csv, fit_inductance_csv, material = "Nb";
    bool constrained = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "key = value configuration file");
        cmd->add_option("--out", common.out_dir, "output directory (default '.')");
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a measured trace");
    add_common(fit_cmd);
    fit_cmd->add_option("--trace", trace_path, "trace CSV file")->required();
    fit_cmd->add_option("--kind", kind_flag,
                        "decay | ramsey | echo | rabi_amplitude | temperature_sweep "
                        "(default: from the file)");
    fit_cmd->add_flag("--refine", refine, "temperature_sweep: also fit T1_0 and T2_0");

    CLI::App* thermal_cmd =
        app.add_subcommand("thermal", "temperature-dependent coherence table");
    add_common(thermal_cmd);
    thermal_cmd->add_option("--t", t_list_flag, "comma list of temperatures [K]");

    CLI::App* chevron_cmd = app.add_subcommand("chevron", "Rabi chevron map and contours");
    add_common(chevron_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "best-case T2 design sweep");
    add_common(sweep_cmd);

    CLI::App* junction_cmd = app.add_subcommand("junction", "junction electrical relations");
    add_common(junction_cmd);
    junction_cmd->add_option("--jc", jc, "critical current density [A/cm^2]");
    junction_cmd->add_option("--area", area, "junction area [um^2]");
    junction_cmd->add_option("--rn", rn, "normal-state resistance [ohm]");
    junction_cmd->add_option("--lj", lj, "Josephson inductance [H]");
    junction_cmd->add_option("--csigma", csigma, "total shunt capacitance [F]");
    junction_cmd->add_option("--material", material, "Nb or Al (default Nb)");
    junction_cmd->add_option("--gap-ev", gap_ev, "override gap [eV]");
    junction_cmd->add_option("--fit-jc-exposure", fit_exposure_csv,
                             "CSV exposure_mbar_s,jc_A_cm2");
    junction_cmd->add_flag("--constrained", constrained,
                           "fix |exponent| = 1/2 in the exposure fit");
    junction_cmd->add_option("--fit-inductance", fit_inductance_csv,
                             "CSV area_um2,Rn_ohm; extract Jc");

    CLI::App* population_cmd =
        app.add_subcommand("population", "residual population and effective temperature");
    add_common(population_cmd);
    population_cmd->add_option("--a-idle", a_idle, "ef oscillation amplitude, idle")
        ->required();
    population_cmd->add_option("--a-swapped", a_swapped, "ef oscillation amplitude, swapped")
        ->required();
    population_cmd->add_option("--f-ge-hz", f_ge, "qubit frequency for T_eff [Hz]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) return run_fit(common, trace_path, kind_flag, refine);
        if (thermal_cmd->parsed()) return run_thermal(common, t_list_flag);
        if (chevron_cmd->parsed()) return run_chevron(common);
        if (sweep_cmd->parsed()) return run_sweep(common);
        if (junction_cmd->parsed())
            return run_junction(common, jc, area, rn, lj, csigma, fit_exposure_csv,
                                constrained, fit_inductance_csv, material, gap_ev);
        if (population_cmd->parsed())
            return run_population(common, a_idle, a_swapped, f_ge);
    } catch (const qcm::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const qcm::InsufficientDataError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const qcm::DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const qcm::LowVisibilityError& e) {
        std::cerr << "fit failure: " << e.what() << "\n";
        return 2;
    } catch (const qcm::OutOfRangeError& e) {
        std::cerr << "model failure: " << e.what() << "\n";
        return 2;
    } catch (const qcm::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
