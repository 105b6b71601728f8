#pragma once

#include "vshell/ansatz.hpp"
#include "vshell/profile.hpp"

namespace vshell {

// r_{L0} = sqrt(L0 / (2 (E0 - Uc))); the effective potential equals E0 there.
// Throws InfeasibleCenterError when Uc >= E0.
double inner_radius_newton(const AnsatzParams& params, double Uc);

// Integrates U' = m/r^2, m' = 4 pi r^2 rho outward from the plateau (or from a
// series start at the center when L0 = 0) until the cutoff event V = E0, then
// tabulates [0, outer_margin * R0]. Uc >= E0 yields a flagged vacuum profile.
NewtonProfile integrate_newton(const AnsatzParams& params, double Uc, const SolverConfig& cfg);

// Re-derives R_i and R0 from the tabulated profile by bisection on the Hermite
// interpolant and certifies the single-shell property (at most one sign change
// of V' past R_i, with closed-form vacuum exterior).
SupportInfo detect_support_newton(const NewtonProfile& profile, const AnsatzParams& params);

struct NewtonSolution {
    AnsatzParams params;
    NewtonProfile profile;
    double Uc = 0.0;
    double Ri = 0.0;
    double R0 = 0.0;
    double M = 0.0;
    bool single_shell = true;
    bool normalized = false;

    // field evaluation anywhere: Hermite inside the grid, closed-form vacuum
    // exterior beyond it, exact plateau values inside r_{L0}
    double potential(double r) const;
    double potential_deriv(double r) const;
};

// Full pipeline: integrate, detect support, assemble.
NewtonSolution solve_newton(const AnsatzParams& params, double Uc, const SolverConfig& cfg);

// Shifts U so that U -> 0 at infinity; E0 and Uc shift along, so the matter
// distribution is untouched. The cutoff comes out negative for any shell.
void normalize_potential(NewtonSolution& sol);

// Scaling family U_new(r) = lambda^2 gamma^{-2} U(gamma r); maps solutions to
// solutions with M -> lambda^2 gamma^{-3} M and radii -> radii / gamma.
void rescale_newton(NewtonSolution& sol, double lambda, double gamma);

struct NewtonTargets {
    double M = 0.0;
    double R0 = 0.0;  // exactly one of R0 / Ri may be positive
    double Ri = 0.0;
};

// Solves, normalizes, then picks lambda and gamma to hit the requested total
// mass and radius. Throws InfeasibleCenterError on a vacuum template.
NewtonSolution solve_for_targets_newton(const AnsatzParams& params, double Uc,
                                        const NewtonTargets& targets, const SolverConfig& cfg);

}  // namespace vshell
