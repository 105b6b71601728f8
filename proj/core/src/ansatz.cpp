#include "vshell/ansatz.hpp"

#include <cmath>
#include <numbers>

#include "quad.hpp"

namespace vshell {

namespace {
constexpr double pi = std::numbers::pi;

bool all_finite(const AnsatzParams& p) {
    return std::isfinite(p.k) && std::isfinite(p.l) && std::isfinite(p.c0) &&
           std::isfinite(p.E0) && std::isfinite(p.L0);
}
}  // namespace

const char* to_string(Regime regime) {
    return regime == Regime::newtonian ? "newtonian" : "relativistic";
}

Regime regime_from_string(const std::string& name) {
    if (name == "newtonian") return Regime::newtonian;
    if (name == "relativistic") return Regime::relativistic;
    throw DomainError("unknown regime '" + name + "'");
}

void AnsatzParams::validate() const {
    if (!all_finite(*this)) throw DomainError("ansatz parameters must be finite");
    if (c0 <= 0.0) throw DomainError("c0 must be positive");
    if (L0 < 0.0) throw DomainError("L0 must be nonnegative");
    if (k >= 3.0 * l + 3.5) throw DomainError("k < 3l + 7/2 required for finite radius");
    if (regime == Regime::newtonian) {
        if (k <= -1.0) throw DomainError("k > -1 required");
        if (l <= -1.0) throw DomainError("l > -1 required");
        if (k + l + 0.5 < 0.0) throw DomainError("k + l + 1/2 >= 0 required");
    } else {
        if (k < 0.0) throw DomainError("k >= 0 required in the relativistic regime");
        if (l <= -0.5) throw DomainError("l > -1/2 required in the relativistic regime");
        if (E0 <= 0.0) throw DomainError("cutoff E0 must be positive (particle energies are)");
    }
}

void SolverConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("tolerances must be positive");
    if (!(max_radius > 0.0) || !std::isfinite(max_radius))
        throw DomainError("max_radius must be positive and finite");
    if (output_grid_size < 16) throw DomainError("output_grid_size must be at least 16");
    if (!(outer_margin > 1.0)) throw DomainError("outer_margin must exceed 1");
    if (!(start_radius > 0.0)) throw DomainError("start_radius must be positive");
    if (!(kernel_tol_factor > 0.0) || kernel_tol_factor > 1.0)
        throw DomainError("kernel_tol_factor must be in (0, 1]");
    if (!(horizon_margin > 0.0) || horizon_margin > 1e-2)
        throw DomainError("horizon_margin must be in (0, 1e-2]");
}

double euler_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("euler_beta needs positive arguments");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double beta_const_newton(double k, double l) {
    if (k <= -1.0 || l <= -1.0 || k + l + 0.5 < 0.0)
        throw DomainError("exponents outside the Newtonian range");
    return std::pow(2.0, l + 1.5) * pi * euler_beta(l + 1.0, 0.5) * euler_beta(l + 1.5, k + 1.0);
}

double beta_const_rel(double l) {
    if (l <= -0.5) throw DomainError("l > -1/2 required");
    return 2.0 * pi * euler_beta(l + 1.0, 0.5);
}

double g_newton(double u, const AnsatzParams& params) {
    if (params.regime != Regime::newtonian) throw DomainError("g_newton needs newtonian params");
    if (u >= params.E0) return 0.0;
    return params.c0 * beta_const_newton(params.k, params.l) *
           std::pow(params.E0 - u, params.k + params.l + 1.5);
}

namespace {

// Reduced relativistic kernels after E = u cosh(s); the substitution removes the
// (E^2 - u^2)^(l +- 1/2) endpoint singularity so tanh-sinh converges fast.
double rel_kernel(double u, const AnsatzParams& p, double quad_tol, bool pressure) {
    if (p.regime != Regime::relativistic)
        throw DomainError("relativistic kernel needs relativistic params");
    if (!(u > 0.0)) throw DomainError("kernel argument u must be positive");
    if (u >= p.E0) return 0.0;
    const double s_max = std::acosh(p.E0 / u);
    const double cosh_pow = pressure ? 0.0 : 2.0;
    const double sinh_pow = 2.0 * p.l + (pressure ? 4.0 : 2.0);
    const double u_pow = 2.0 * p.l + 4.0;
    auto f = [&](double s) {
        const double ch = std::cosh(s);
        const double cut = p.E0 - u * ch;
        if (cut <= 0.0) return 0.0;
        const double sh = std::sinh(s);
        double v = std::pow(u, u_pow) * std::pow(sh, sinh_pow) * std::pow(cut, p.k);
        if (cosh_pow != 0.0) v *= ch * ch;
        return v;
    };
    double integral = quadrature::tanh_sinh(f, 0.0, s_max, quad_tol);
    double value = p.c0 * beta_const_rel(p.l) * integral;
    if (pressure) value /= 2.0 * p.l + 3.0;
    return value;
}

}  // namespace

double g_rel(double u, const AnsatzParams& params, double quad_tol) {
    return rel_kernel(u, params, quad_tol, false);
}

double h_rel(double u, const AnsatzParams& params, double quad_tol) {
    return rel_kernel(u, params, quad_tol, true);
}

double source_newton(double r, double U, const AnsatzParams& params) {
    if (!(r > 0.0)) throw DomainError("source_newton needs r > 0");
    const double V = params.L0 > 0.0 ? U + params.L0 / (2.0 * r * r) : U;
    const double g = g_newton(V, params);
    if (g == 0.0) return 0.0;  // avoid inf * 0 from the r^{2l} factor at extreme radii
    return std::pow(r, 2.0 * params.l) * g;
}

MatterSources source_rel(double r, double mu, const AnsatzParams& params, double quad_tol) {
    if (!(r > 0.0)) throw DomainError("source_rel needs r > 0");
    const double u = std::exp(mu) * std::sqrt(1.0 + params.L0 / (r * r));
    const double g = g_rel(u, params, quad_tol);
    const double h = h_rel(u, params, quad_tol);
    if (g == 0.0 && h == 0.0) return {};
    const double pref = std::pow(r, 2.0 * params.l) * std::exp(-(2.0 * params.l + 4.0) * mu);
    return {pref * g, pref * h};
}

}  // namespace vshell
