// fraclap: batch front end for the half-line fractional Dirichlet solver.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "fraclap/energy.hpp"
#include "fraclap/io.hpp"
#include "fraclap/model.hpp"
#include "fraclap/solver.hpp"
#include "fraclap/specfun.hpp"

namespace fs = std::filesystem;
using namespace fraclap;
using io::RunConfig;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar parameter map; lists are only meaningful for sweeps.
ParamMap scalar_params(const RunConfig& c) {
    ParamMap m;
    for (const auto& [k, v] : c.params) {
        if (v.size() != 1) throw UsageError("parameter '" + k + "' must be a single value outside sweep");
        m[k] = v[0];
    }
    return m;
}

std::vector<FracOrder> orders(const RunConfig& c, std::vector<double> fallback) {
    const auto& list = c.s.empty() ? fallback : c.s;
    std::vector<FracOrder> out;
    for (double v : list) {
        if (!(v > 0.0 && v < 1.0)) throw UsageError("s = " + io::num(v) + " is outside (0,1)");
        out.emplace_back(v);
    }
    return out;
}

std::string s_tag(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", s);
    return buf;
}

fs::path out_dir(const RunConfig& c) {
    fs::path p = c.output_dir.empty() ? fs::path(".") : fs::path(c.output_dir);
    fs::create_directories(p);
    return p;
}

// Writes text to output_dir/name when an output directory is set, else to stdout.
void emit(const RunConfig& c, const std::string& name, const std::string& text) {
    if (c.output_dir.empty()) {
        std::cout << text;
        return;
    }
    io::write_text((out_dir(c) / name).string(), text);
}

std::string sidecar_path(const std::string& csv) {
    fs::path p(csv);
    p.replace_extension(".json");
    return p.string();
}

QuadratureParams grid_qp(const RunConfig& c, double tol) {
    auto qp = QuadratureParams::for_grid(c.L / c.grid_n, c.L);
    qp.tol = tol;
    return qp;
}

std::vector<double> residual_sample(double L) {
    std::vector<double> x;
    for (int k = 0; k < 20; ++k) x.push_back(L * (k + 1) / 21.0);
    return x;
}

// ---------------------------------------------------------------------------

int cmd_constants(const RunConfig& c) {
    const auto list = orders(c, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    QuadratureParams qp;
    qp.tol = std::min(c.quad_tol, 1e-10);
    bool ok = true;
    std::string csv = std::string(io::constants_csv_header()) + "\n";
    io::ordered_json arr = io::ordered_json::array();
    for (auto s : list) {
        const auto r = kappa_quadrature(s, qp);
        double red = 0.0;
        for (int N : {2, 3, 5}) {
            const auto ri = reduction_integral(N, s);
            red = std::max(red, std::abs(norm_constant(N, s) * ri.quad - norm_constant(1, s)) / norm_constant(1, s));
        }
        ok = ok && r.abs_error <= 1e-6 && red <= 1e-8;
        csv += io::constants_csv_row(r, red) + "\n";
        arr.push_back(io::to_json(r, red));
    }
    if (c.format == "json") emit(c, "constants.json", io::dump(arr));
    else emit(c, "constants.csv", csv);
    return ok ? kPass : kFail;
}

int cmd_check_f(const RunConfig& c) {
    const auto f = model_catalog(c.nonlinearity, scalar_params(c));
    const auto r = check_condition_F(f, c.rho);
    if (c.format == "json") {
        auto j = io::to_json(r);
        j["nonlinearity"] = f.name();
        emit(c, "check_f.json", io::dump(j));
    } else {
        std::string csv = "nonlinearity,rho,holds,failure,witness,margin,f_at_rho\n";
        const auto jr = io::to_json(r);
        csv += f.name() + "," + io::num(r.rho) + "," + (r.holds ? "true" : "false") + ","
               + jr["failure"].get<std::string>() + "," + (r.witness ? io::num(*r.witness) : "") + ","
               + io::num(r.margin) + "," + io::num(r.f_at_rho) + "\n";
        emit(c, "check_f.csv", csv);
    }
    return r.holds ? kPass : kFail;
}

int cmd_solve(const RunConfig& c) {
    const auto f = model_catalog(c.nonlinearity, scalar_params(c));
    const auto cond = check_condition_F(f, c.rho);
    if (!cond.holds) {
        std::cerr << "fraclap: condition (F) fails for " << f.name() << " at rho = " << io::num(c.rho)
                  << " (failure: " << io::to_json(cond)["failure"].get<std::string>() << ")\n";
        return kFail;
    }
    const auto sp = c.solve_params();
    const auto dir = out_dir(c);
    int status = kPass;
    for (auto s : orders(c, {0.5})) {
        const std::string tag = "s" + s_tag(s.value());
        try {
            const auto rep = maximal_halfline(f, c.rho, sp, s);
            io::save_profile(rep.profile, (dir / ("profile_" + tag + ".csv")).string(),
                             (dir / ("profile_" + tag + ".json")).string());
            io::write_text((dir / ("report_" + tag + ".json")).string(), io::dump(io::to_json(rep)));
            std::cout << "s=" << io::num(s.value()) << " sup_norm=" << io::num(rep.sup_norm)
                      << " residual=" << io::num(rep.final_residual) << " ell0=" << io::num(rep.profile.ell0())
                      << " chain_ok=" << (rep.ordered_chain_ok ? "true" : "false") << "\n";
            if (!rep.ordered_chain_ok) status = kFail;
        } catch (const ConvergenceError& e) {
            std::cerr << "fraclap: s=" << io::num(s.value()) << ": " << e.what() << "\n";
            status = kFail;
        } catch (const OrderingError& e) {
            std::cerr << "fraclap: s=" << io::num(s.value()) << ": " << e.what() << "\n";
            status = kFail;
        }
    }
    return status;
}

int cmd_energy(const RunConfig& c) {
    if (c.profile.empty()) throw UsageError("energy requires --profile");
    const auto f = model_catalog(c.nonlinearity, scalar_params(c));
    const auto p = io::load_profile(c.profile, sidecar_path(c.profile));
    const auto a = c.a_values.empty() ? default_a_values(p.L()) : c.a_values;
    const double h = p.nodes()[p.nodes().size() - 1] - p.nodes()[p.nodes().size() - 2];
    auto qp = QuadratureParams::for_grid(h, p.L());
    qp.tol = c.energy_tol;
    const auto rep = energy_report(p, f, a, qp);
    if (c.format == "json") emit(c, "energy.json", io::dump(io::to_json(rep)));
    else emit(c, "energy.csv", io::energy_csv(rep));
    return rep.pass ? kPass : kFail;
}

int cmd_residual(const RunConfig& c) {
    if (c.profile.empty()) throw UsageError("residual requires --profile");
    const auto f = model_catalog(c.nonlinearity, scalar_params(c));
    const auto p = io::load_profile(c.profile, sidecar_path(c.profile));
    const double h = p.nodes()[p.nodes().size() - 1] - p.nodes()[p.nodes().size() - 2];
    auto qp = QuadratureParams::for_grid(h, p.L());
    qp.tol = c.quad_tol;
    const auto xs = residual_sample(p.L());
    const double threshold = 5e-3 * std::max(1.0, f.lipschitz(0.0, c.rho));
    std::string csv = "x,u,flap,f_u,abs_residual\n";
    io::ordered_json pts = io::ordered_json::array();
    double worst = 0.0;
    for (double x : xs) {
        const double u = p.eval(x), L = flap_at(p, x, qp), fu = f(u);
        worst = std::max(worst, std::abs(L - fu));
        csv += io::num(x) + "," + io::num(u) + "," + io::num(L) + "," + io::num(fu) + "," + io::num(std::abs(L - fu)) + "\n";
        pts.push_back({{"x", x}, {"u", u}, {"flap", L}, {"f_u", fu}, {"abs_residual", std::abs(L - fu)}});
    }
    if (c.format == "json")
        emit(c, "residual.json", io::dump({{"max_residual", worst}, {"threshold", threshold}, {"points", pts}}));
    else
        emit(c, "residual.csv", csv);
    return worst <= threshold ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// Sweep

struct Cell {
    double s = 0.0;
    ParamMap params;
};

std::string csv_quote(std::string t) {
    std::replace(t.begin(), t.end(), '\n', ' ');
    std::string out = "\"";
    for (char ch : t) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string run_cell(const RunConfig& c, const Cell& cell, int index, const std::vector<std::string>& keys) {
    std::string row = std::to_string(index) + "," + io::num(cell.s) + "," + c.nonlinearity;
    for (const auto& k : keys) row += "," + io::num(cell.params.at(k));
    // status,sup_norm,max_node_value,residual,ell0_measured,ell0_predicted,ell0_rel_err,energy_max_rel_dev,kappa_abs_error,error
    try {
        const FracOrder s(cell.s);
        const auto f = model_catalog(c.nonlinearity, cell.params);
        const auto cond = check_condition_F(f, c.rho);
        if (!cond.holds) throw DomainError("condition (F) fails");
        const auto rep = maximal_halfline(f, c.rho, c.solve_params(), s);
        auto qp = grid_qp(c, c.energy_tol);
        const auto a = c.a_values.empty() ? default_a_values(c.L) : c.a_values;
        const auto en = energy_report(rep.profile, f, a, qp);
        QuadratureParams kq;
        kq.tol = 1e-10;
        const auto k = kappa_quadrature(s, kq);
        const double mnv = rep.diagnostics ? rep.diagnostics->max_node_value : rep.sup_norm;
        const bool ok = rep.ordered_chain_ok && en.pass && k.abs_error <= 1e-6;
        row += std::string(",") + (ok ? "ok" : "check_failed") + "," + io::num(rep.sup_norm) + "," + io::num(mnv) + ","
               + io::num(rep.final_residual) + "," + io::num(en.ell0_measured) + "," + io::num(en.ell0_predicted) + ","
               + io::num(en.ell0_rel_err) + "," + io::num(en.max_rel_dev) + "," + io::num(k.abs_error) + ",";
    } catch (const std::exception& e) {
        row += ",error,,,,,,,,," + csv_quote(e.what());
    }
    return row + "\n";
}

int thread_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACLAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw UsageError("FRACLAP_THREADS must be a positive integer");
        n = static_cast<int>(v);
    }
    return std::max(1, n);
}

int cmd_sweep(const RunConfig& c) {
    const auto list = orders(c, {0.5});
    std::vector<std::string> keys;
    for (const auto& [k, v] : c.params) {
        if (v.empty()) throw UsageError("parameter '" + k + "' has no values");
        keys.push_back(k);
    }
    // Cartesian product, s outermost, parameters in key order (last key fastest).
    std::vector<Cell> cells;
    std::size_t combos = 1;
    for (const auto& k : keys) combos *= c.params.at(k).size();
    for (auto s : list) {
        for (std::size_t m = 0; m < combos; ++m) {
            Cell cell{s.value(), {}};
            std::size_t rest = m;
            for (std::size_t i = keys.size(); i-- > 0;) {
                const auto& vals = c.params.at(keys[i]);
                cell.params[keys[i]] = vals[rest % vals.size()];
                rest /= vals.size();
            }
            cells.push_back(cell);
        }
    }
    c.solve_params();  // reject bad solver settings before spawning work

    std::vector<std::string> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();)
            rows[i] = run_cell(c, cells[i], static_cast<int>(i), keys);
    };
    const int nt = std::min<int>(thread_count(), static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv = "index,s,nonlinearity";
    for (const auto& k : keys) csv += "," + k;
    csv += ",status,sup_norm,max_node_value,residual,ell0_measured,ell0_predicted,ell0_rel_err,energy_max_rel_dev,"
           "kappa_abs_error,error\n";
    bool ok = true;
    for (const auto& r : rows) {
        csv += r;
        ok = ok && r.find(",ok,") != std::string::npos;
    }
    emit(c, "sweep.csv", csv);
    return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclap: bounded solutions of (-Delta)^s u = f(u) on the half-line"};
    std::string command, config_path, s_list, f_name, out, format, a_list, profile;
    std::vector<std::string> params;
    std::optional<int> grid_n;
    std::optional<double> L, rho, newton_tol, quad_tol, energy_tol;
    bool print_config = false;
    app.add_option("command", command, "constants | check-f | solve | energy | residual | sweep")
        ->check(CLI::IsMember({"constants", "check-f", "solve", "energy", "residual", "sweep"}));
    app.add_option("--config", config_path, "key=value config file (flags override it)");
    app.add_option("--s", s_list, "fractional order(s), comma separated");
    app.add_option("--f", f_name, "nonlinearity: linear-saturation | allen-cahn | custom-polynomial | zero");
    app.add_option("--param", params, "nonlinearity parameter k=v (v may be a comma list for sweep)");
    app.add_option("--grid-n", grid_n, "grid nodes on (0, L]");
    app.add_option("--L", L, "truncation length");
    app.add_option("--rho", rho, "target limit rho");
    app.add_option("--a", a_list, "energy evaluation points, comma separated");
    app.add_option("--profile", profile, "profile CSV (sidecar .json alongside)");
    app.add_option("--newton-tol", newton_tol, "solver tolerance");
    app.add_option("--quad-tol", quad_tol, "quadrature tolerance");
    app.add_option("--energy-tol", energy_tol, "quadrature tolerance for energies");
    app.add_option("--out", out, "output directory (tables go to stdout when omitted)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--print-config", print_config, "print the effective config and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg.apply(io::read_text(config_path));
        if (!command.empty()) cfg.command = command;
        if (!s_list.empty()) cfg.set("s", s_list);
        if (!f_name.empty()) cfg.set("f", f_name);
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects k=v, got '" + kv + "'");
            cfg.set("param." + kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (grid_n) cfg.grid_n = *grid_n;
        if (L) cfg.L = *L;
        if (rho) cfg.rho = *rho;
        if (newton_tol) cfg.newton_tol = *newton_tol;
        if (quad_tol) cfg.quad_tol = *quad_tol;
        if (energy_tol) cfg.energy_tol = *energy_tol;
        if (app.count("--a")) {
            cfg.set("a_values", a_list);
            if (cfg.a_values.empty()) throw ConfigError("--a list is empty");
        }
        if (!profile.empty()) cfg.profile = profile;
        if (!out.empty()) cfg.output_dir = out;
        if (!format.empty()) cfg.format = format;
    } catch (const std::exception& e) {
        std::cerr << "fraclap: " << e.what() << "\n";
        return kUsage;
    }
    if (print_config) {
        std::cout << cfg.to_text();
        return kPass;
    }
    if (cfg.command.empty()) {
        std::cerr << app.help();
        return kUsage;
    }

    try {
        if (cfg.command == "constants") return cmd_constants(cfg);
        if (cfg.command == "check-f") return cmd_check_f(cfg);
        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "energy") return cmd_energy(cfg);
        if (cfg.command == "residual") return cmd_residual(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        std::cerr << "fraclap: unknown command '" << cfg.command << "'\n";
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "fraclap: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "fraclap: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "fraclap: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "fraclap: " << e.what() << "\n";
        return kFail;
    }
}
