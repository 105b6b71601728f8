#pragma once

#include "vshell/ansatz.hpp"
#include "vshell/profile.hpp"

namespace vshell {

// r_{L0} = sqrt(L0 / (E0^2 e^{-2 mu_c} - 1)). Throws InfeasibleCenterError
// when e^{mu_c} >= E0.
double inner_radius_rel(const AnsatzParams& params, double mu_c);

// Integrates the spherically symmetric field equations for (mu, m) outward
// until e^{mu} sqrt(1 + L0/r^2) = E0, watching for 2m/r -> 1. Fills grid nodes
// up to R0; the vacuum exterior is filled by vacuum_extend.
EinsteinProfile integrate_einstein(const AnsatzParams& params, double mu_c,
                                   const SolverConfig& cfg);

SupportInfo detect_support_rel(const EinsteinProfile& profile, const AnsatzParams& params);

struct EinsteinSolution {
    AnsatzParams params;
    EinsteinProfile profile;
    double mu_c = 0.0;
    double Ri = 0.0;
    double R0 = 0.0;
    double M = 0.0;
    double mu_outer = 0.0;          // mu(R0)
    double max_compactness = 0.0;   // max 2m/r over the grid
    bool supports_match = true;     // supp p == supp rho node-wise
    bool reignition = false;        // cutoff re-crossed in the extended exterior
    bool normalized = false;

    double metric_mu(double r) const;
    double metric_mu_deriv(double r) const;
};

// Full pipeline: integrate, detect support, extend exterior, assemble.
EinsteinSolution solve_einstein(const AnsatzParams& params, double mu_c, const SolverConfig& cfg);

// Fills grid nodes beyond R0 with the exact exterior metric
// e^{2mu} = (1 - 2M/r) e^{2s} and checks whether the matter support would
// reignite outside (flag only, the vacuum extension stays authoritative).
void vacuum_extend(EinsteinSolution& sol);

// Shifts mu so that mu -> 0 at infinity. E0 and c0 absorb the shift
// (E0 -> e^{-s} E0, c0 -> e^{k s} c0), leaving rho, p and m untouched.
void normalize_mu(EinsteinSolution& sol);

// ADM mass of the asymptotically flat solution: m(R0).
double adm_mass(const EinsteinSolution& sol);

// Scaling family mu_a(r) = mu(a r); maps solutions to solutions with
// M -> M/a, radii -> radii/a, rho -> a^2 rho. Compactness is invariant.
void rescale_rel(EinsteinSolution& sol, double a);

enum class RelTargetKind { mass, outer_radius, inner_radius };

EinsteinSolution solve_for_target_rel(const AnsatzParams& params, double mu_c,
                                      RelTargetKind kind, double value,
                                      const SolverConfig& cfg);

}  // namespace vshell
