#pragma once

#include <cstddef>
#include <vector>

#include "vshell/params.hpp"

namespace vshell {

// Tabulated Newtonian solution on a uniform radial grid.
struct NewtonProfile {
    std::vector<double> r, U, dU, rho, m;
    double plateau_radius = 0.0;  // r_{L0}: inner vacuum boundary, 0 when L0 = 0
    double support_outer = 0.0;   // R0 located by the cutoff event during integration
    double U_outer = 0.0;         // U(R0)
    double mass = 0.0;            // m(R0) = total mass
    bool vacuum = false;
};

// Tabulated metric solution on a uniform radial grid.
struct EinsteinProfile {
    std::vector<double> r, mu, dmu, lambda, rho, p, m;
    double plateau_radius = 0.0;
    double support_outer = 0.0;
    double mu_outer = 0.0;  // mu(R0)
    double mass = 0.0;
    double max_compactness = 0.0;  // max over grid of 2m/r
    bool vacuum = false;
    bool exterior_filled = false;
};

struct SupportInfo {
    double inner = 0.0;   // R_i
    double outer = 0.0;   // R0
    bool single_shell = true;
};

// Cubic Hermite interpolation of (value, derivative) samples on the uniform
// grid r. Orbit propagation and energy evaluation both use these, so the
// force field is the exact derivative of the interpolated potential.
double hermite_value(const std::vector<double>& r, const std::vector<double>& y,
                     const std::vector<double>& dy, double x);
double hermite_derivative(const std::vector<double>& r, const std::vector<double>& y,
                          const std::vector<double>& dy, double x);

}  // namespace vshell
