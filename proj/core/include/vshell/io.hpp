#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vshell/einstein.hpp"
#include "vshell/newton.hpp"
#include "vshell/verify.hpp"

namespace vshell {

// One run request, deserialized from a JSON config file.
struct RunConfig {
    Regime regime = Regime::newtonian;
    AnsatzParams ansatz;
    double center = 0.0;  // Uc in the Newtonian regime, mu_c in the relativistic one
    SolverConfig solver;

    bool has_targets = false;
    double target_M = 0.0;
    double target_R0 = 0.0;
    double target_Ri = 0.0;

    std::vector<double> sweep_L0;
    std::string output_dir;
};

RunConfig load_run_config(const std::filesystem::path& path);

// Delimiter-separated tables, one header line, 17 significant digits per value.
void write_newton_profile(const std::filesystem::path& path, const NewtonProfile& prof);
void write_einstein_profile(const std::filesystem::path& path, const EinsteinProfile& prof);

void write_summary(const std::filesystem::path& path, const NewtonSolution& sol,
                   const ValidationReport& checks);
void write_summary(const std::filesystem::path& path, const EinsteinSolution& sol,
                   const ValidationReport& checks);

// Round-trips a written profile + summary pair back into a solution object;
// the reconstruction is bit-exact.
struct LoadedSolution {
    Regime regime = Regime::newtonian;
    NewtonSolution newton;
    EinsteinSolution einstein;
};
LoadedSolution load_solution(const std::filesystem::path& profile_path,
                             const std::filesystem::path& summary_path);

void write_report(const std::filesystem::path& path, const ValidationReport& report);
void write_trend(const std::filesystem::path& path, const FamilyTrend& trend);
void write_error_record(const std::filesystem::path& path, const std::string& error_class,
                        const std::string& message);

// FNV-1a hash over the canonical serialization of the checks; equal reports
// give equal digests across writes and reloads.
std::string report_digest(const ValidationReport& report);

}  // namespace vshell
