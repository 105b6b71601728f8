#include "vshell/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace vshell {

using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw Error("malformed numeric field '" + tok + "' in " + path.string());
    return v;
}

void write_table(const std::filesystem::path& path, const std::vector<const char*>& header,
                 const std::vector<const std::vector<double>*>& cols) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? '\t' : '\n');
    const std::size_t n = cols.front()->size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c)
            out << fmt17((*cols[c])[i]) << (c + 1 < cols.size() ? '\t' : '\n');
    }
    if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::vector<double>> read_table(const std::filesystem::path& path,
                                            const std::vector<const char*>& header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error("empty profile file " + path.string());
    {
        std::istringstream hs(line);
        std::string tok;
        std::size_t c = 0;
        while (hs >> tok) {
            if (c >= header.size() || tok != header[c])
                throw Error("unexpected profile header in " + path.string());
            ++c;
        }
        if (c != header.size()) throw Error("unexpected profile header in " + path.string());
    }
    std::vector<std::vector<double>> cols(header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::size_t c = 0;
        while (ls >> tok) {
            if (c >= header.size()) throw Error("too many columns in " + path.string());
            cols[c].push_back(parse_double(tok, path));
            ++c;
        }
        if (c != header.size()) throw Error("short row in " + path.string());
    }
    if (cols.front().size() < 2) throw Error("profile table too small in " + path.string());
    return cols;
}

json checks_to_json(const ValidationReport& rep) {
    json arr = json::array();
    for (const auto& c : rep.checks) {
        json loc = json::array();
        for (double v : c.locations) loc.push_back(v);
        arr.push_back({{"name", c.name},
                       {"max_residual", c.max_residual},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass},
                       {"locations", loc}});
    }
    return arr;
}

json ansatz_to_json(const AnsatzParams& p) {
    return {{"k", p.k}, {"l", p.l}, {"c0", p.c0}, {"E0", p.E0}, {"L0", p.L0}};
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw Error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

double get_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw DomainError(std::string(where) + ": missing '" + key + "'");
    if (!j.at(key).is_number())
        throw DomainError(std::string(where) + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double get_num_or(const json& j, const char* key, double fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw DomainError(std::string(where) + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) throw DomainError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    if (!j.is_object()) throw DomainError("config: top level must be an object");
    expect_keys(j, {"regime", "ansatz", "center", "solver", "targets", "sweep", "output"},
                "config");

    RunConfig cfg;
    if (!j.contains("regime") || !j.at("regime").is_string())
        throw DomainError("config: 'regime' must be a string");
    cfg.regime = regime_from_string(j.at("regime").get<std::string>());

    if (!j.contains("ansatz") || !j.at("ansatz").is_object())
        throw DomainError("config: 'ansatz' must be an object");
    const json& a = j.at("ansatz");
    expect_keys(a, {"k", "l", "c0", "E0", "L0"}, "config.ansatz");
    cfg.ansatz.regime = cfg.regime;
    cfg.ansatz.k = get_num(a, "k", "config.ansatz");
    cfg.ansatz.l = get_num(a, "l", "config.ansatz");
    cfg.ansatz.c0 = get_num(a, "c0", "config.ansatz");
    cfg.ansatz.E0 = get_num(a, "E0", "config.ansatz");
    cfg.ansatz.L0 = get_num_or(a, "L0", 0.0, "config.ansatz");

    cfg.center = get_num(j, "center", "config");

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        expect_keys(s,
                    {"rel_tol", "abs_tol", "max_radius", "output_grid_size", "outer_margin",
                     "start_radius", "kernel_tol_factor", "horizon_margin"},
                    "config.solver");
        cfg.solver.rel_tol = get_num_or(s, "rel_tol", cfg.solver.rel_tol, "config.solver");
        cfg.solver.abs_tol = get_num_or(s, "abs_tol", cfg.solver.abs_tol, "config.solver");
        cfg.solver.max_radius = get_num_or(s, "max_radius", cfg.solver.max_radius, "config.solver");
        cfg.solver.output_grid_size = static_cast<int>(get_num_or(
            s, "output_grid_size", cfg.solver.output_grid_size, "config.solver"));
        cfg.solver.outer_margin =
            get_num_or(s, "outer_margin", cfg.solver.outer_margin, "config.solver");
        cfg.solver.start_radius =
            get_num_or(s, "start_radius", cfg.solver.start_radius, "config.solver");
        cfg.solver.kernel_tol_factor =
            get_num_or(s, "kernel_tol_factor", cfg.solver.kernel_tol_factor, "config.solver");
        cfg.solver.horizon_margin =
            get_num_or(s, "horizon_margin", cfg.solver.horizon_margin, "config.solver");
    }

    if (j.contains("targets")) {
        const json& t = j.at("targets");
        expect_keys(t, {"M", "R0", "Ri"}, "config.targets");
        cfg.has_targets = true;
        cfg.target_M = get_num_or(t, "M", 0.0, "config.targets");
        cfg.target_R0 = get_num_or(t, "R0", 0.0, "config.targets");
        cfg.target_Ri = get_num_or(t, "Ri", 0.0, "config.targets");
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        expect_keys(s, {"L0_values"}, "config.sweep");
        if (!s.contains("L0_values") || !s.at("L0_values").is_array())
            throw DomainError("config.sweep: 'L0_values' must be an array");
        for (const auto& v : s.at("L0_values")) {
            if (!v.is_number()) throw DomainError("config.sweep: L0 values must be numbers");
            cfg.sweep_L0.push_back(v.get<double>());
        }
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        expect_keys(o, {"dir"}, "config.output");
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw DomainError("config.output: 'dir' must be a string");
            cfg.output_dir = o.at("dir").get<std::string>();
        }
    }
    return cfg;
}

void write_newton_profile(const std::filesystem::path& path, const NewtonProfile& prof) {
    write_table(path, {"r", "U", "dU_dr", "rho", "m"},
                {&prof.r, &prof.U, &prof.dU, &prof.rho, &prof.m});
}

void write_einstein_profile(const std::filesystem::path& path, const EinsteinProfile& prof) {
    write_table(path, {"r", "mu", "lambda", "rho", "p", "m"},
                {&prof.r, &prof.mu, &prof.lambda, &prof.rho, &prof.p, &prof.m});
}

namespace {

json summary_common(Regime regime, const AnsatzParams& params, double Ri, double R0,
                    double plateau, double mass, const ValidationReport& checks,
                    std::size_t grid_n, double grid_rmax) {
    json s;
    s["schema_version"] = 1;
    s["regime"] = to_string(regime);
    s["ansatz"] = ansatz_to_json(params);
    s["support"] = {{"R_i", Ri}, {"R_0", R0}, {"plateau_radius", plateau}};
    s["mass"] = mass;
    s["grid"] = {{"n", grid_n}, {"r_max", grid_rmax}};
    s["validation"] = {{"all_pass", checks.all_pass()},
                       {"digest", report_digest(checks)},
                       {"checks", checks_to_json(checks)}};
    return s;
}

}  // namespace

void write_summary(const std::filesystem::path& path, const NewtonSolution& sol,
                   const ValidationReport& checks) {
    json s = summary_common(Regime::newtonian, sol.params, sol.Ri, sol.R0,
                            sol.profile.plateau_radius, sol.M, checks, sol.profile.r.size(),
                            sol.profile.r.back());
    s["center"] = {{"Uc", sol.Uc}};
    s["boundary"] = {{"U_R0", sol.profile.U_outer}};
    s["flags"] = {{"vacuum", sol.profile.vacuum},
                  {"normalized", sol.normalized},
                  {"single_shell", sol.single_shell}};
    write_json_file(path, s);
}

void write_summary(const std::filesystem::path& path, const EinsteinSolution& sol,
                   const ValidationReport& checks) {
    json s = summary_common(Regime::relativistic, sol.params, sol.Ri, sol.R0,
                            sol.profile.plateau_radius, sol.M, checks, sol.profile.r.size(),
                            sol.profile.r.back());
    s["center"] = {{"mu_c", sol.mu_c}};
    s["boundary"] = {{"mu_R0", sol.mu_outer}};
    s["compactness_max"] = sol.max_compactness;
    s["flags"] = {{"vacuum", sol.profile.vacuum},
                  {"normalized", sol.normalized},
                  {"supports_match", sol.supports_match},
                  {"reignition", sol.reignition}};
    write_json_file(path, s);
}

LoadedSolution load_solution(const std::filesystem::path& profile_path,
                             const std::filesystem::path& summary_path) {
    const json s = read_json_file(summary_path);
    try {
        if (s.at("schema_version").get<int>() != 1)
            throw Error("unsupported summary schema_version");
        LoadedSolution out;
        out.regime = regime_from_string(s.at("regime").get<std::string>());
        AnsatzParams params;
        params.regime = out.regime;
        const json& a = s.at("ansatz");
        params.k = a.at("k").get<double>();
        params.l = a.at("l").get<double>();
        params.c0 = a.at("c0").get<double>();
        params.E0 = a.at("E0").get<double>();
        params.L0 = a.at("L0").get<double>();

        const json& sup = s.at("support");
        const json& flags = s.at("flags");

        if (out.regime == Regime::newtonian) {
            auto cols = read_table(profile_path, {"r", "U", "dU_dr", "rho", "m"});
            NewtonSolution& sol = out.newton;
            sol.params = params;
            sol.profile.r = std::move(cols[0]);
            sol.profile.U = std::move(cols[1]);
            sol.profile.dU = std::move(cols[2]);
            sol.profile.rho = std::move(cols[3]);
            sol.profile.m = std::move(cols[4]);
            sol.profile.plateau_radius = sup.at("plateau_radius").get<double>();
            sol.profile.support_outer = sup.at("R_0").get<double>();
            sol.profile.U_outer = s.at("boundary").at("U_R0").get<double>();
            sol.profile.mass = s.at("mass").get<double>();
            sol.profile.vacuum = flags.at("vacuum").get<bool>();
            sol.Uc = s.at("center").at("Uc").get<double>();
            sol.Ri = sup.at("R_i").get<double>();
            sol.R0 = sup.at("R_0").get<double>();
            sol.M = s.at("mass").get<double>();
            sol.single_shell = flags.at("single_shell").get<bool>();
            sol.normalized = flags.at("normalized").get<bool>();
        } else {
            auto cols = read_table(profile_path, {"r", "mu", "lambda", "rho", "p", "m"});
            EinsteinSolution& sol = out.einstein;
            sol.params = params;
            sol.profile.r = std::move(cols[0]);
            sol.profile.mu = std::move(cols[1]);
            sol.profile.lambda = std::move(cols[2]);
            sol.profile.rho = std::move(cols[3]);
            sol.profile.p = std::move(cols[4]);
            sol.profile.m = std::move(cols[5]);
            const std::size_t n = sol.profile.r.size();
            sol.profile.dmu.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = sol.profile.r[i];
                if (r <= 0.0) continue;
                const double one_minus = 1.0 - 2.0 * sol.profile.m[i] / r;
                sol.profile.dmu[i] = (4.0 * std::numbers::pi * r * sol.profile.p[i] +
                                      sol.profile.m[i] / (r * r)) /
                                     one_minus;
            }
            sol.profile.plateau_radius = sup.at("plateau_radius").get<double>();
            sol.profile.support_outer = sup.at("R_0").get<double>();
            sol.profile.mu_outer = s.at("boundary").at("mu_R0").get<double>();
            sol.profile.mass = s.at("mass").get<double>();
            sol.profile.max_compactness = s.at("compactness_max").get<double>();
            sol.profile.vacuum = flags.at("vacuum").get<bool>();
            sol.profile.exterior_filled = true;
            sol.mu_c = s.at("center").at("mu_c").get<double>();
            sol.Ri = sup.at("R_i").get<double>();
            sol.R0 = sup.at("R_0").get<double>();
            sol.M = s.at("mass").get<double>();
            sol.mu_outer = sol.profile.mu_outer;
            sol.max_compactness = sol.profile.max_compactness;
            sol.supports_match = flags.at("supports_match").get<bool>();
            sol.reignition = flags.at("reignition").get<bool>();
            sol.normalized = flags.at("normalized").get<bool>();
        }
        return out;
    } catch (const json::exception& e) {
        throw Error("summary " + summary_path.string() + " missing fields: " + e.what());
    }
}

void write_report(const std::filesystem::path& path, const ValidationReport& report) {
    json j;
    j["schema_version"] = 1;
    j["all_pass"] = report.all_pass();
    j["digest"] = report_digest(report);
    j["checks"] = checks_to_json(report);
    write_json_file(path, j);
}

void write_trend(const std::filesystem::path& path, const FamilyTrend& trend) {
    json j;
    j["schema_version"] = 1;
    j["base"] = {{"R_0", trend.base_R0}, {"M", trend.base_M}};
    json rows = json::array();
    for (const auto& row : trend.rows) {
        rows.push_back({{"L0", row.L0},
                        {"R_i", row.Ri},
                        {"R_i_closed_form", row.Ri_closed},
                        {"R_0", row.R0},
                        {"M", row.M},
                        {"d", row.d},
                        {"d_over_sqrt_L0", row.ratio}});
    }
    j["rows"] = rows;
    j["all_pass"] = trend.report.all_pass();
    j["digest"] = report_digest(trend.report);
    j["checks"] = checks_to_json(trend.report);
    write_json_file(path, j);
}

void write_error_record(const std::filesystem::path& path, const std::string& error_class,
                        const std::string& message) {
    json j;
    j["schema_version"] = 1;
    j["error"] = {{"class", error_class}, {"message", message}};
    write_json_file(path, j);
}

std::string report_digest(const ValidationReport& report) {
    std::string canon;
    for (const auto& c : report.checks) {
        canon += c.name;
        canon += '\x1f';
        canon += fmt17(c.max_residual);
        canon += '\x1f';
        canon += fmt17(c.tolerance);
        canon += '\x1f';
        canon += c.pass ? '1' : '0';
        for (double v : c.locations) {
            canon += '\x1f';
            canon += fmt17(v);
        }
        canon += '\x1e';
    }
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char byte : canon) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + buf;
}

// (reads may carry 'inf' rho values; strtod handles them and fmt17 writes them back)

}  // namespace vshell
