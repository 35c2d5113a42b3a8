#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraclap/energy.hpp"
#include "fraclap/error.hpp"
#include "fraclap/model.hpp"
#include "fraclap/profiles.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap::io {

using nlohmann::ordered_json;

// 17 significant digits: doubles round-trip exactly.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<double>& v, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += num(v[i]);
    }
    return out;
}

inline std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        item = item.substr(b, e - b + 1);
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
        if (pos != item.size()) throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Profiles: "x,u" CSV plus a JSON sidecar with the closure parameters.

inline std::string profile_csv(const HalfLineProfile& p) {
    std::string out = "x,u\n";
    for (std::size_t i = 0; i < p.nodes().size(); ++i) out += num(p.nodes()[i]) + "," + num(p.values()[i]) + "\n";
    return out;
}

inline ordered_json profile_sidecar(const HalfLineProfile& p) {
    ordered_json j;
    j["s"] = p.s().value();
    j["ell0"] = p.ell0();
    j["rho_tail"] = p.rho_tail();
    j["c_tail"] = p.c_tail();
    j["L"] = p.L();
    j["solution"] = p.is_solution();
    return j;
}

inline void save_profile(const HalfLineProfile& p, const std::string& csv_path, const std::string& json_path) {
    write_text(csv_path, profile_csv(p));
    write_text(json_path, profile_sidecar(p).dump(2) + "\n");
}

inline HalfLineProfile parse_profile(const std::string& csv, const std::string& sidecar) {
    std::stringstream ss(csv);
    std::string line;
    if (!std::getline(ss, line)) throw ProfileError("profile CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,u") throw ProfileError("profile CSV header must be 'x,u'");
    std::vector<double> x, u;
    int row = 1;
    while (std::getline(ss, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> v;
        try {
            v = parse_list(line);
        } catch (const ConfigError& e) {
            throw ProfileError("profile CSV row " + std::to_string(row) + ": " + e.what());
        }
        if (v.size() != 2) throw ProfileError("profile CSV row " + std::to_string(row) + " must have two columns");
        x.push_back(v[0]);
        u.push_back(v[1]);
    }
    ordered_json j;
    try {
        j = ordered_json::parse(sidecar);
        const double s = j.at("s").get<double>();
        const double L = j.at("L").get<double>();
        if (x.empty() || L != x.back()) throw ProfileError("sidecar L does not match the last node");
        return HalfLineProfile(FracOrder(s), x, u, j.at("ell0").get<double>(), j.at("rho_tail").get<double>(),
                               j.at("c_tail").get<double>(), j.value("solution", false));
    } catch (const nlohmann::json::exception& e) {
        throw ProfileError(std::string("profile sidecar: ") + e.what());
    } catch (const DomainError& e) {
        throw ProfileError(std::string("profile sidecar: ") + e.what());
    }
}

inline HalfLineProfile load_profile(const std::string& csv_path, const std::string& json_path) {
    return parse_profile(read_text(csv_path), read_text(json_path));
}

// ---------------------------------------------------------------------------
// Reports

inline const char* constants_csv_header() {
    return "s,kappa_closed,kappa_quad,abs_error,f1,f2,f3,c1s,reduction_rel_error";
}

// reduction_err: max relative error of c(N,s) I(N,s) against c(1,s) over the checked dimensions
inline std::string constants_csv_row(const ConstantsReport& r, double reduction_err) {
    return num(r.s) + "," + num(r.kappa_closed) + "," + num(r.kappa_quad) + "," + num(r.abs_error) + "," + num(r.f1)
           + "," + num(r.f2) + "," + num(r.f3) + "," + num(r.c1s) + "," + num(reduction_err);
}

inline ordered_json to_json(const ConstantsReport& r, double reduction_err) {
    ordered_json j;
    j["s"] = r.s;
    j["kappa_closed"] = r.kappa_closed;
    j["kappa_quad"] = r.kappa_quad;
    j["abs_error"] = r.abs_error;
    j["f1"] = r.f1;
    j["f2"] = r.f2;
    j["f3"] = r.f3;
    j["c1s"] = r.c1s;
    j["reduction_rel_error"] = reduction_err;
    return j;
}

inline ordered_json to_json(const ConditionFReport& r) {
    ordered_json j;
    j["rho"] = r.rho;
    j["holds"] = r.holds;
    j["witness"] = r.witness ? ordered_json(*r.witness) : ordered_json(nullptr);
    j["margin"] = r.margin;
    j["f_at_rho"] = r.f_at_rho;
    const char* kind = r.failure == ConditionFReport::Failure::none         ? "none"
                       : r.failure == ConditionFReport::Failure::not_a_zero ? "not_a_zero"
                                                                            : "primitive_not_below";
    j["failure"] = kind;
    return j;
}

inline ordered_json to_json(const EnergyReport& r) {
    ordered_json j;
    j["a_values"] = r.a_values;
    j["energies"] = r.energies;
    j["f_rho"] = r.f_rho;
    j["max_rel_dev"] = r.max_rel_dev;
    j["ell0_measured"] = r.ell0_measured;
    j["ell0_predicted"] = r.ell0_predicted;
    j["ell0_rel_err"] = r.ell0_rel_err;
    j["tail_uncertainty"] = r.tail_uncertainty;
    j["pass"] = r.pass;
    return j;
}

inline std::string energy_csv(const EnergyReport& r) {
    std::string out = "a,E,F_rho,rel_dev\n";
    const double denom = std::max(std::abs(r.f_rho), 1e-12);
    for (std::size_t i = 0; i < r.a_values.size(); ++i)
        out += num(r.a_values[i]) + "," + num(r.energies[i]) + "," + num(r.f_rho) + ","
               + num(std::abs(r.energies[i] - r.f_rho) / denom) + "\n";
    return out;
}

template <class P>
ordered_json report_core(const SolveReport<P>& r) {
    ordered_json j;
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["discrete_residual"] = r.discrete_residual;
    j["ordered_chain_ok"] = r.ordered_chain_ok;
    j["sup_norm"] = r.sup_norm;
    return j;
}

inline ordered_json to_json(const SolveReport<HalfLineProfile>& r) {
    ordered_json j = report_core(r);
    j["profile"] = profile_sidecar(r.profile);
    j["profile"]["nodes"] = r.profile.nodes().size();
    if (r.diagnostics) {
        const auto& d = *r.diagnostics;
        ordered_json g;
        g["max_node_value"] = d.max_node_value;
        g["condition_margin"] = d.condition_margin;
        g["delta"] = d.delta;
        g["delta_changes"] = d.delta_changes;
        g["tail_model"] = d.tail_conjectural ? "conjectural" : "fitted";
        g["tail_c_exterior"] = d.tail_c_exterior;
        g["rho_fit"] = d.rho_fit;
        g["c_fit"] = d.c_fit;
        g["tail_fit_rms"] = d.tail_fit_rms;
        g["tail_sweeps"] = d.tail_sweeps;
        g["tail_change"] = d.tail_change;
        g["violations_R"] = d.violations_R;
        g["violations_delta"] = d.violations_delta;
        g["violations_comparison"] = d.violations_comparison;
        ordered_json runs = ordered_json::array();
        for (const auto& run : d.interval_runs)
            runs.push_back({{"delta", run.delta}, {"R", run.R}, {"sup_norm", run.sup_norm}, {"iterations", run.iterations}});
        g["interval_runs"] = runs;
        j["diagnostics"] = g;
    }
    return j;
}

inline ordered_json to_json(const SolveReport<IntervalProfile>& r) {
    ordered_json j = report_core(r);
    j["profile"] = {{"s", r.profile.s().value()}, {"a", r.profile.a()}, {"b", r.profile.b()},
                    {"exterior_left", r.profile.exterior_left()}, {"exterior_right", r.profile.exterior_right()},
                    {"nodes", r.profile.nodes().size()}};
    return j;
}

// JSON dump with doubles at 17 significant digits.
inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Run configuration: flat key=value text, '#' comments.

struct RunConfig {
    std::string command;
    std::vector<double> s;
    std::string nonlinearity = "linear-saturation";
    std::map<std::string, std::vector<double>> params;  // lists expand in sweeps
    double rho = 1.0;
    int grid_n = 2048;
    double L = 80.0;
    std::vector<double> R_schedule;
    std::vector<double> delta_schedule;
    std::vector<double> a_values;
    double newton_tol = 1e-9;
    int max_iter = 20000;
    double damping = 1.0;
    std::optional<double> monotone_L;
    double quad_tol = 1e-8;
    double energy_tol = 1e-10;
    std::string profile;  // input profile CSV for energy / residual
    std::string output_dir;
    std::string format = "csv";

    bool operator==(const RunConfig&) const = default;

    SolveParams solve_params() const {
        SolveParams sp;
        sp.grid_n = grid_n;
        sp.L = L;
        sp.newton_tol = newton_tol;
        sp.max_iter = max_iter;
        sp.damping = damping;
        sp.R_schedule = R_schedule;
        sp.delta_schedule = delta_schedule;
        sp.monotone_L = monotone_L;
        sp.validate();
        return sp;
    }

    void set(const std::string& key, const std::string& value) {
        auto one = [&]() {
            auto v = parse_list(value);
            if (v.size() != 1) throw ConfigError("key '" + key + "' expects one number");
            return v[0];
        };
        auto integer = [&]() {
            const double v = one();
            if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError("key '" + key + "' expects an integer");
            return static_cast<int>(v);
        };
        if (key == "command") command = value;
        else if (key == "s") s = parse_list(value);
        else if (key == "f" || key == "nonlinearity") nonlinearity = value;
        else if (key.rfind("param.", 0) == 0) {
            if (key.size() == 6) throw ConfigError("empty parameter name");
            params[key.substr(6)] = parse_list(value);
        } else if (key == "rho") rho = one();
        else if (key == "grid_n") grid_n = integer();
        else if (key == "L") L = one();
        else if (key == "R_schedule") R_schedule = parse_list(value);
        else if (key == "delta_schedule") delta_schedule = parse_list(value);
        else if (key == "a_values") a_values = parse_list(value);
        else if (key == "newton_tol") newton_tol = one();
        else if (key == "max_iter") max_iter = integer();
        else if (key == "damping") damping = one();
        else if (key == "monotone_L") monotone_L = one();
        else if (key == "quad_tol") quad_tol = one();
        else if (key == "energy_tol") energy_tol = one();
        else if (key == "profile") profile = value;
        else if (key == "output_dir" || key == "out") output_dir = value;
        else if (key == "format") {
            if (value != "csv" && value != "json") throw ConfigError("format must be csv or json");
            format = value;
        } else
            throw ConfigError("unknown config key '" + key + "'");
    }

    std::string to_text() const {
        std::string out;
        auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
        line("command", command);
        line("s", join(s));
        line("f", nonlinearity);
        for (const auto& [k, v] : params) line("param." + k, join(v));
        line("rho", num(rho));
        line("grid_n", std::to_string(grid_n));
        line("L", num(L));
        line("R_schedule", join(R_schedule));
        line("delta_schedule", join(delta_schedule));
        line("a_values", join(a_values));
        line("newton_tol", num(newton_tol));
        line("max_iter", std::to_string(max_iter));
        line("damping", num(damping));
        if (monotone_L) line("monotone_L", num(*monotone_L));
        line("quad_tol", num(quad_tol));
        line("energy_tol", num(energy_tol));
        line("profile", profile);
        line("output_dir", output_dir);
        line("format", format);
        return out;
    }

    static RunConfig parse(const std::string& text) {
        RunConfig c;
        c.apply(text);
        return c;
    }

    void apply(const std::string& text) {
        std::stringstream ss(text);
        std::string line;
        int no = 0;
        while (std::getline(ss, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto b = line.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            line = line.substr(b, line.find_last_not_of(" \t") - b + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key=value");
            auto trim = [](std::string t) {
                const auto x = t.find_first_not_of(" \t");
                if (x == std::string::npos) return std::string();
                return t.substr(x, t.find_last_not_of(" \t") - x + 1);
            };
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
};

}  // namespace fraclap::io
