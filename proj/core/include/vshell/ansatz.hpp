#pragma once

#include "vshell/params.hpp"

namespace vshell {

// Euler beta function B(a,b), a,b > 0.
double euler_beta(double a, double b);

// Closed-form constant in front of the Newtonian source:
//   rho(r) = c_kl * c0 * r^{2l} (E0 - V)_+^{k+l+3/2},
//   c_kl = 2^{l+3/2} pi B(l+1, 1/2) B(l+3/2, k+1).
double beta_const_newton(double k, double l);

// Angular prefactor of the relativistic kernels, c_l = 2 pi B(l+1, 1/2).
double beta_const_rel(double l);

// Newtonian kernel g(u) with u the effective potential value; zero for u >= E0.
double g_newton(double u, const AnsatzParams& params);

// Relativistic kernels as functions of u = e^{mu(r)} sqrt(1 + L0/r^2).
// Evaluated by tanh-sinh quadrature after the substitution E = u cosh s.
double g_rel(double u, const AnsatzParams& params, double quad_tol = 1e-11);
double h_rel(double u, const AnsatzParams& params, double quad_tol = 1e-11);

// Mass density induced by potential U at radius r > 0.
double source_newton(double r, double U, const AnsatzParams& params);

struct MatterSources {
    double rho = 0.0;
    double p = 0.0;
};

// Energy density and radial pressure induced by metric field mu at radius r > 0.
MatterSources source_rel(double r, double mu, const AnsatzParams& params,
                         double quad_tol = 1e-11);

}  // namespace vshell
