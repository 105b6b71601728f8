#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "vshell/einstein.hpp"
#include "vshell/newton.hpp"

namespace vshell {

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> locations;  // worst-offending radii, largest residual first
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
    void merge(ValidationReport other);
};

// Independent route to the matter sources: 2-D quadrature over velocity space
// of the raw distribution, no closed-form reduction involved.
double velocity_space_oracle_newton(double r, double U, const AnsatzParams& params,
                                    double quad_tol = 1e-9);
MatterSources velocity_space_oracle_rel(double r, double mu, const AnsatzParams& params,
                                        double quad_tol = 1e-9);

// Compares the reduced kernels against the velocity-space oracle at sample
// radii across the matter region.
ValidationReport source_oracle_check(const NewtonSolution& sol, int n_samples = 12,
                                     double tol = 1e-6);
ValidationReport source_oracle_check(const EinsteinSolution& sol, int n_samples = 8,
                                     double tol = 1e-6);

// Fourth-order finite-difference residuals of the field equations on the
// output grid (a few nodes around 0, R_i and R0 excluded, residuals relative
// to the grid maximum of the source side), the integrated mass identity,
// plateau exactness and boundary behavior.
ValidationReport field_residuals(const NewtonSolution& sol);
ValidationReport field_residuals(const EinsteinSolution& sol);

struct OrbitSample {
    std::array<double, 3> x{};
    std::array<double, 3> v{};
};

// Deterministic particle states spread over the matter shell, each with a
// sizable margin below the cutoff and above the angular momentum floor.
std::vector<OrbitSample> default_orbit_samples(const NewtonSolution& sol, int n = 10);
std::vector<OrbitSample> default_orbit_samples(const EinsteinSolution& sol, int n = 10);

// Propagates each state through the frozen field for n_periods radial periods
// (pericenter-to-pericenter) and reports the worst relative drift of E, L and
// of the distribution value along the trajectory.
ValidationReport characteristic_drift(const NewtonSolution& sol,
                                      std::span<const OrbitSample> states, int n_periods = 50,
                                      double tol = 1e-6);
ValidationReport characteristic_drift(const EinsteinSolution& sol,
                                      std::span<const OrbitSample> states, int n_periods = 50,
                                      double tol = 1e-6);

// Vacuum layering, support sanity, single-shell certificate, closed-form
// inner radius, normalization ranges.
ValidationReport shell_structure_check(const NewtonSolution& sol);
ValidationReport shell_structure_check(const EinsteinSolution& sol);

struct TrendRow {
    double L0 = 0.0;
    double Ri = 0.0;
    double Ri_closed = 0.0;
    double R0 = 0.0;
    double M = 0.0;
    double d = 0.0;      // max |field(L0) - field(0)| on [0, R0(0)]
    double ratio = 0.0;  // d / sqrt(L0)
};

struct FamilyTrend {
    std::vector<TrendRow> rows;  // descending L0
    double base_R0 = 0.0;
    double base_M = 0.0;
    ValidationReport report;
};

// Solves the L0 = 0 member and the given L0 > 0 members at a shared center
// value (all unnormalized so the difference field is anchored) and checks the
// shrinking-plateau trend.
FamilyTrend l0_family_trend(const AnsatzParams& params, double center,
                            std::vector<double> L0_values, const SolverConfig& cfg);

}  // namespace vshell
