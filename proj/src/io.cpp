#include "qcm/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qcm {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
            ++pos;
        if (pos != value.size())
            throw ParseError(context + ": trailing characters in number '" + value + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(context + ": cannot parse number '" + value + "'");
    }
}

} // namespace

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config " + path.string() + ": cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path.string());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text,
                                           const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config " + origin + " line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config " + origin + " line " + std::to_string(line_no) +
                             ": empty key or value");
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw ParseError("config " + origin_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_string_or(const std::string& key,
                                          const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    return parse_double(get_string(key), "config key '" + key + "'");
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return parse_double(it->second, "config key '" + key + "'");
}

long KeyValueConfig::get_long_or(const std::string& key, long fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return static_cast<long>(parse_double(it->second, "config key '" + key + "'"));
}

ThermalModel thermal_model_from_config(const KeyValueConfig& cfg) {
    ThermalModel m;
    const std::string material = cfg.get_string_or("material", "Nb");
    if (material == "Nb" || material == "nb")
        m.qubit.material = niobium();
    else if (material == "Al" || material == "al")
        m.qubit.material = aluminium();
    else
        m.qubit.material = material_from_tc(material, cfg.get_double("tc_k"));
    if (cfg.has("tc_k"))
        m.qubit.material = material_from_tc(m.qubit.material.name, cfg.get_double("tc_k"));
    if (cfg.has("gap_ev"))
        m.qubit.material.gap0_j = cfg.get_double("gap_ev") * constants::e_charge;
    m.qubit.material.validate();

    m.qubit.f_ge_hz = cfg.get_double("f_ge_hz");
    m.qubit.alpha_hz = cfg.get_double_or("alpha_hz", -200e6);
    m.qubit.t1_0_s = cfg.get_double("t1_0_s");
    m.qubit.t2_0_s = cfg.get_double("t2_0_s");
    m.resonator.f_r_hz = cfg.get_double("f_r_hz");
    m.resonator.kappa_2pi_hz = cfg.get_double("kappa_2pi_hz");
    m.resonator.chi_2pi_hz = cfg.get_double("chi_2pi_hz");

    const std::string conv = cfg.get_string_or("chi_convention", "half");
    if (conv == "half")
        m.chi_convention = ChiConvention::half_shift;
    else if (conv == "full")
        m.chi_convention = ChiConvention::full_shift;
    else
        throw ParseError("config key 'chi_convention': expected 'half' or 'full'");

    m.validate();
    return m;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    return cells;
}

} // namespace

Trace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("trace " + path.string() + ": cannot open file");
    Trace t;
    bool have_kind = false, have_header = false;
    std::size_t n_cols = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string raw = trim(line);
        if (raw.empty()) continue;
        if (raw[0] == '#') {
            const auto pos = raw.find("kind:");
            if (pos != std::string::npos) {
                t.kind = trace_kind_from_string(trim(raw.substr(pos + 5)));
                have_kind = true;
            }
            continue;
        }
        const std::vector<std::string> cells = split_csv_line(raw);
        if (!have_header) {
            if (cells.size() < 2 || cells.size() > 3 || cells[0] != "x" || cells[1] != "y" ||
                (cells.size() == 3 && cells[2] != "sigma_y"))
                throw ParseError("trace " + path.string() + " line " +
                                 std::to_string(line_no) +
                                 ": expected header 'x,y[,sigma_y]'");
            n_cols = cells.size();
            have_header = true;
            continue;
        }
        if (cells.size() != n_cols)
            throw ParseError("trace " + path.string() + " line " + std::to_string(line_no) +
                             ": expected " + std::to_string(n_cols) + " columns");
        const std::string ctx = "trace " + path.string() + " line " + std::to_string(line_no);
        t.x.push_back(parse_double(cells[0], ctx));
        t.y.push_back(parse_double(cells[1], ctx));
        if (n_cols == 3) t.sigma_y.push_back(parse_double(cells[2], ctx));
    }
    if (!have_kind)
        throw ParseError("trace " + path.string() + ": missing '# kind: <kind>' line");
    if (!have_header)
        throw ParseError("trace " + path.string() + ": missing 'x,y[,sigma_y]' header");
    t.validate();
    return t;
}

void write_trace_csv(const std::filesystem::path& path, const Trace& t) {
    std::ofstream out(path);
    if (!out) throw ParseError("trace " + path.string() + ": cannot open for writing");
    out << "# kind: " << to_string(t.kind) << "\n";
    out << (t.sigma_y.empty() ? "x,y" : "x,y,sigma_y") << "\n";
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        out << format_g17(t.x[i]) << ',' << format_g17(t.y[i]);
        if (!t.sigma_y.empty()) out << ',' << format_g17(t.sigma_y[i]);
        out << "\n";
    }
}

std::vector<std::pair<double, double>> read_two_column_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv " + path.string() + ": cannot open file");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string raw = trim(line);
        if (raw.empty() || raw[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(raw);
        if (cells.size() != 2)
            throw ParseError("csv " + path.string() + " line " + std::to_string(line_no) +
                             ": expected two columns");
        if (!have_header) { // header is mandatory; its names are free-form
            have_header = true;
            continue;
        }
        const std::string ctx = "csv " + path.string() + " line " + std::to_string(line_no);
        rows.emplace_back(parse_double(cells[0], ctx), parse_double(cells[1], ctx));
    }
    if (!have_header) throw ParseError("csv " + path.string() + ": missing header line");
    return rows;
}

std::vector<ThermalSweepPoint> read_thermal_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv " + path.string() + ": cannot open file");
    std::vector<ThermalSweepPoint> rows;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string raw = trim(line);
        if (raw.empty() || raw[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(raw);
        if (!have_header) {
            if (cells.size() != 3 || cells[0] != "t_k" || cells[1] != "t1_s" ||
                cells[2] != "t2_s")
                throw ParseError("csv " + path.string() + " line " +
                                 std::to_string(line_no) + ": expected header 't_k,t1_s,t2_s'");
            have_header = true;
            continue;
        }
        if (cells.size() != 3)
            throw ParseError("csv " + path.string() + " line " + std::to_string(line_no) +
                             ": expected three columns");
        const std::string ctx = "csv " + path.string() + " line " + std::to_string(line_no);
        rows.push_back({parse_double(cells[0], ctx), parse_double(cells[1], ctx),
                        parse_double(cells[2], ctx)});
    }
    if (!have_header) throw ParseError("csv " + path.string() + ": missing header line");
    return rows;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      std::span<const double> row_grid, std::span<const double> col_grid,
                      const std::string& corner_label) {
    if (m.rows != row_grid.size() || m.cols != col_grid.size())
        throw DomainError("write_matrix_csv: grid sizes do not match the matrix");
    std::ofstream out(path);
    if (!out) throw ParseError("csv " + path.string() + ": cannot open for writing");
    out << corner_label;
    for (const double c : col_grid) out << ',' << format_g17(c);
    out << "\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        out << format_g17(row_grid[i]);
        for (std::size_t j = 0; j < m.cols; ++j) out << ',' << format_g17(m.at(i, j));
        out << "\n";
    }
}

nlohmann::ordered_json make_envelope(const std::string& command,
                                     const KeyValueConfig& cfg,
                                     nlohmann::ordered_json payload) {
    nlohmann::ordered_json env;
    env["tool"] = "qcm";
    env["version"] = kToolVersion;
    env["command"] = command;
    env["generated_at"] = []() {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        return std::string(buf);
    }();
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.entries()) echo[k] = v;
    env["config"] = std::move(echo);
    env["payload"] = std::move(payload);
    return env;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("json " + path.string() + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

nlohmann::ordered_json fit_result_to_json(const FitResult& fr) {
    nlohmann::ordered_json j;
    j["param_order"] = fr.param_order;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, value] : fr.params) params[name] = value;
    j["params"] = std::move(params);
    j["covariance"] = fr.covariance;
    j["reduced_chi2"] = fr.reduced_chi2;
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["flags"] = fr.flags;
    return j;
}

nlohmann::ordered_json contours_to_json(const std::vector<ContourLine>& contours) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ContourLine& line : contours) {
        nlohmann::ordered_json item;
        item["kind"] = line.kind;
        item["index"] = line.index;
        nlohmann::ordered_json verts = nlohmann::ordered_json::array();
        for (const auto& [delta, swept] : line.vertices)
            verts.push_back({delta, swept});
        item["vertices"] = std::move(verts);
        arr.push_back(std::move(item));
    }
    return arr;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace qcm
