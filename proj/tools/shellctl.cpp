#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vshell/io.hpp"

namespace fs = std::filesystem;
using namespace vshell;

namespace {

ValidationReport core_checks(const NewtonSolution& sol) {
    ValidationReport rep = field_residuals(sol);
    rep.merge(shell_structure_check(sol));
    return rep;
}

ValidationReport core_checks(const EinsteinSolution& sol) {
    ValidationReport rep = field_residuals(sol);
    rep.merge(shell_structure_check(sol));
    return rep;
}

void write_solution_files(const fs::path& dir, const NewtonSolution& sol) {
    const ValidationReport checks = core_checks(sol);
    write_newton_profile(dir / "profile.tsv", sol.profile);
    write_summary(dir / "summary.json", sol, checks);
    std::printf("solved: regime=newtonian R_i=%.17g R_0=%.17g M=%.17g vacuum=%d checks=%s\n",
                sol.Ri, sol.R0, sol.M, sol.profile.vacuum ? 1 : 0,
                checks.all_pass() ? "pass" : "FAIL");
}

void write_solution_files(const fs::path& dir, const EinsteinSolution& sol) {
    const ValidationReport checks = core_checks(sol);
    write_einstein_profile(dir / "profile.tsv", sol.profile);
    write_summary(dir / "summary.json", sol, checks);
    std::printf(
        "solved: regime=relativistic R_i=%.17g R_0=%.17g M=%.17g 2m_over_r_max=%.17g "
        "vacuum=%d checks=%s\n",
        sol.Ri, sol.R0, sol.M, sol.max_compactness, sol.profile.vacuum ? 1 : 0,
        checks.all_pass() ? "pass" : "FAIL");
}

void solve_into(const RunConfig& cfg, const fs::path& out) {
    if (cfg.regime == Regime::newtonian) {
        NewtonSolution sol;
        if (cfg.has_targets) {
            NewtonTargets t;
            t.M = cfg.target_M;
            t.R0 = cfg.target_R0;
            t.Ri = cfg.target_Ri;
            sol = solve_for_targets_newton(cfg.ansatz, cfg.center, t, cfg.solver);
        } else {
            sol = solve_newton(cfg.ansatz, cfg.center, cfg.solver);
            normalize_potential(sol);
        }
        if (sol.profile.vacuum)
            std::fprintf(stderr,
                         "warning: center potential at or above the cutoff, vacuum profile\n");
        write_solution_files(out, sol);
    } else {
        EinsteinSolution sol;
        if (cfg.has_targets) {
            int given = (cfg.target_M > 0.0) + (cfg.target_R0 > 0.0) + (cfg.target_Ri > 0.0);
            if (given != 1)
                throw DomainError(
                    "relativistic targets: specify exactly one of M, R0, Ri (one scaling "
                    "degree of freedom)");
            RelTargetKind kind = RelTargetKind::mass;
            double value = cfg.target_M;
            if (cfg.target_R0 > 0.0) {
                kind = RelTargetKind::outer_radius;
                value = cfg.target_R0;
            } else if (cfg.target_Ri > 0.0) {
                kind = RelTargetKind::inner_radius;
                value = cfg.target_Ri;
            }
            sol = solve_for_target_rel(cfg.ansatz, cfg.center, kind, value, cfg.solver);
        } else {
            sol = solve_einstein(cfg.ansatz, cfg.center, cfg.solver);
            normalize_mu(sol);
        }
        if (sol.profile.vacuum)
            std::fprintf(stderr,
                         "warning: center redshift at or above the cutoff, vacuum profile\n");
        write_solution_files(out, sol);
    }
}

std::set<std::string> parse_checks(const std::string& list) {
    static const std::set<std::string> known = {"fields", "support", "sources", "orbits"};
    std::set<std::string> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (!known.count(tok)) throw DomainError("unknown check selection '" + tok + "'");
        out.insert(tok);
    }
    if (out.empty()) throw DomainError("empty check selection");
    return out;
}

void print_report(const ValidationReport& rep) {
    for (const auto& c : rep.checks)
        std::printf("check %-32s %s  (max residual %.3e, tolerance %.3e)\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.max_residual, c.tolerance);
}

int validate_into(const fs::path& in, const fs::path& out, const std::set<std::string>& sel) {
    const LoadedSolution loaded = load_solution(in / "profile.tsv", in / "summary.json");
    ValidationReport rep;
    if (loaded.regime == Regime::newtonian) {
        const NewtonSolution& sol = loaded.newton;
        if (sel.count("fields")) rep.merge(field_residuals(sol));
        if (sel.count("support")) rep.merge(shell_structure_check(sol));
        if (sel.count("sources")) rep.merge(source_oracle_check(sol));
        if (sel.count("orbits")) {
            const auto samples = default_orbit_samples(sol);
            rep.merge(characteristic_drift(sol, samples, 50));
        }
    } else {
        const EinsteinSolution& sol = loaded.einstein;
        if (sel.count("fields")) rep.merge(field_residuals(sol));
        if (sel.count("support")) rep.merge(shell_structure_check(sol));
        if (sel.count("sources")) rep.merge(source_oracle_check(sol));
        if (sel.count("orbits")) {
            const auto samples = default_orbit_samples(sol);
            rep.merge(characteristic_drift(sol, samples, 50));
        }
    }
    write_report(out / "report.json", rep);
    print_report(rep);
    std::printf("report digest %s\n", report_digest(rep).c_str());
    if (!rep.all_pass()) {
        int failed = 0;
        for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
        write_error_record(out / "error.json", "validation",
                           std::to_string(failed) + " check(s) failed");
        return 5;
    }
    return 0;
}

void rescale_into(const fs::path& in, const fs::path& out, bool have_lambda, double lambda,
                  bool have_gamma, double gamma, bool have_a, double a) {
    LoadedSolution loaded = load_solution(in / "profile.tsv", in / "summary.json");
    if (loaded.regime == Regime::newtonian) {
        if (!have_lambda || !have_gamma || have_a)
            throw DomainError("newtonian rescale needs --scale-lambda and --scale-gamma");
        rescale_newton(loaded.newton, lambda, gamma);
        write_solution_files(out, loaded.newton);
    } else {
        if (!have_a || have_lambda || have_gamma)
            throw DomainError("relativistic rescale needs --scale-a only");
        rescale_rel(loaded.einstein, a);
        write_solution_files(out, loaded.einstein);
    }
}

int sweep_into(const RunConfig& cfg, const fs::path& out) {
    if (cfg.sweep_L0.empty())
        throw DomainError("sweep needs a config with sweep.L0_values");
    const FamilyTrend trend =
        l0_family_trend(cfg.ansatz, cfg.center, cfg.sweep_L0, cfg.solver);
    write_trend(out / "trend.json", trend);

    auto solve_member = [&](double L0, const fs::path& dir) {
        fs::create_directories(dir);
        RunConfig member = cfg;
        member.ansatz.L0 = L0;
        member.has_targets = false;
        member.sweep_L0.clear();
        solve_into(member, dir);
    };
    solve_member(0.0, out / "L0_base");
    for (std::size_t i = 0; i < trend.rows.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "L0_%03zu", i);
        solve_member(trend.rows[i].L0, out / name);
    }

    print_report(trend.report);
    for (const auto& row : trend.rows)
        std::printf("L0=%.6e  R_i=%.9e  R_0=%.9e  M=%.9e  d=%.9e  d/sqrt(L0)=%.9e\n", row.L0,
                    row.Ri, row.R0, row.M, row.d, row.ratio);
    if (!trend.report.all_pass()) {
        write_error_record(out / "error.json", "validation", "family trend check failed");
        return 5;
    }
    return 0;
}

int run_guarded(const fs::path& out, const std::function<int()>& fn) {
    auto record = [&](const char* cls, const char* msg) {
        std::fprintf(stderr, "error (%s): %s\n", cls, msg);
        try {
            fs::create_directories(out);
            write_error_record(out / "error.json", cls, msg);
        } catch (...) {
        }
    };
    try {
        return fn();
    } catch (const InfeasibleCenterError& e) {
        record("infeasible-center", e.what());
        return 2;
    } catch (const NoFiniteSupportError& e) {
        record("no-finite-support", e.what());
        return 3;
    } catch (const HorizonError& e) {
        record("horizon", e.what());
        return 4;
    } catch (const DomainError& e) {
        record("usage", e.what());
        return 1;
    } catch (const NumericalError& e) {
        record("numerical", e.what());
        return 1;
    } catch (const Error& e) {
        record("io", e.what());
        return 1;
    } catch (const std::exception& e) {
        record("internal", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shellctl: static shell solutions of self-gravitating collisionless matter"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", in_dir, checks_list = "fields,support";
    double scale_lambda = 0.0, scale_gamma = 0.0, scale_a = 0.0;

    auto* solve = app.add_subcommand("solve", "solve a config, write profile.tsv + summary.json");
    solve->add_option("--config", config_path, "JSON run configuration")->required();
    solve->add_option("--out", out_dir, "output directory");

    auto* rescale = app.add_subcommand("rescale", "apply a scaling map to a stored solution");
    rescale->add_option("--in", in_dir, "directory holding profile.tsv + summary.json")
        ->required();
    rescale->add_option("--out", out_dir, "output directory");
    rescale->add_option("--scale-lambda", scale_lambda, "amplitude factor (newtonian)");
    rescale->add_option("--scale-gamma", scale_gamma, "radius contraction factor (newtonian)");
    rescale->add_option("--scale-a", scale_a, "radius contraction factor (relativistic)");

    auto* validate = app.add_subcommand("validate", "re-check a stored solution, write report.json");
    validate->add_option("--in", in_dir, "directory holding profile.tsv + summary.json");
    validate->add_option("--out", out_dir, "directory for report.json (defaults to --in)");
    validate->add_option("--checks", checks_list,
                         "comma list from fields,support,sources,orbits");

    auto* sweep = app.add_subcommand("sweep", "solve an L0 family, write trend.json + members");
    sweep->add_option("--config", config_path, "JSON run configuration with sweep.L0_values")
        ->required();
    sweep->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        fs::path out = out_dir;
        return run_guarded(out, [&]() {
            const RunConfig cfg = load_run_config(config_path);
            const fs::path dest = solve->count("--out") || cfg.output_dir.empty()
                                      ? out
                                      : fs::path(cfg.output_dir);
            fs::create_directories(dest);
            solve_into(cfg, dest);
            return 0;
        });
    }
    if (rescale->parsed()) {
        fs::path out = out_dir;
        return run_guarded(out, [&]() {
            fs::create_directories(out);
            rescale_into(in_dir, out, rescale->count("--scale-lambda") > 0, scale_lambda,
                         rescale->count("--scale-gamma") > 0, scale_gamma,
                         rescale->count("--scale-a") > 0, scale_a);
            return 0;
        });
    }
    if (validate->parsed()) {
        if (in_dir.empty()) in_dir = out_dir;
        if (validate->count("--out") == 0) out_dir = in_dir;
        fs::path out = out_dir;
        return run_guarded(out, [&]() {
            fs::create_directories(out);
            return validate_into(in_dir, out, parse_checks(checks_list));
        });
    }
    fs::path out = out_dir;
    return run_guarded(out, [&]() {
        const RunConfig cfg = load_run_config(config_path);
        const fs::path dest =
            sweep->count("--out") || cfg.output_dir.empty() ? out : fs::path(cfg.output_dir);
        fs::create_directories(dest);
        return sweep_into(cfg, dest);
    });
}
