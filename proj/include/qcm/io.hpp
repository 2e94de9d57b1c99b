#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcm/device.hpp"
#include "qcm/fit.hpp"
#include "qcm/pulse.hpp"
#include "qcm/sweep.hpp"
#include "qcm/types.hpp"

namespace qcm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Flat key = value configuration with '#' comments. Dotted keys group the
/// command-specific sections (pulse.*, chevron.*, sweep.*, thermal.*).
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::filesystem::path& path);
    static KeyValueConfig from_string(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_long_or(const std::string& key, long fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    std::string origin_ = "<none>";
};

/// Device parameters from the documented config keys (f_ge_hz, alpha_hz,
/// t1_0_s, t2_0_s, f_r_hz, kappa_2pi_hz, chi_2pi_hz, material, tc_k, gap_ev,
/// chi_convention).
ThermalModel thermal_model_from_config(const KeyValueConfig& cfg);

/// Trace CSV: a '# kind: <kind>' line, then an 'x,y[,sigma_y]' header, then
/// rows. Parse errors carry the file name and line number.
Trace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const std::filesystem::path& path, const Trace& t);

/// Two-column CSVs with a mandatory header line.
std::vector<std::pair<double, double>> read_two_column_csv(
    const std::filesystem::path& path);

/// (T, T1, T2) sweep file with header t_k,t1_s,t2_s.
std::vector<ThermalSweepPoint> read_thermal_sweep_csv(const std::filesystem::path& path);

/// Matrix CSV: first row holds the column grid (top-left cell is a label),
/// first column the row grid. Values are printed with 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      std::span<const double> row_grid, std::span<const double> col_grid,
                      const std::string& corner_label);

/// Result envelope shared by all CLI commands. The payload is the
/// deterministic part: identical config and seed give byte-identical payload
/// text; generated_at sits outside it.
nlohmann::ordered_json make_envelope(const std::string& command,
                                     const KeyValueConfig& cfg,
                                     nlohmann::ordered_json payload);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

nlohmann::ordered_json fit_result_to_json(const FitResult& fr);
nlohmann::ordered_json contours_to_json(const std::vector<ContourLine>& contours);

/// Format a double with 17 significant digits (CSV output).
std::string format_g17(double v);

} // namespace qcm
