#pragma once

#include <stdexcept>
#include <string>

namespace vshell {

// Failure classes; the CLI maps each to a distinct exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// bad arguments / parameters outside the admissible ranges
struct DomainError : Error {
    using Error::Error;
};
// center value at or beyond the cutoff energy, no matter can exist
struct InfeasibleCenterError : Error {
    using Error::Error;
};
// matter never reaches the cutoff before max_radius
struct NoFiniteSupportError : Error {
    using Error::Error;
};
// 2m(r)/r reached 1 during inward-to-outward integration
struct HorizonError : Error {
    using Error::Error;
};
// quadrature or step-size breakdown
struct NumericalError : Error {
    using Error::Error;
};

enum class Regime { newtonian, relativistic };

const char* to_string(Regime regime);
Regime regime_from_string(const std::string& name);

// Distribution ansatz f = c0 * (E0 - E)_+^k * (L - L0)_+^l with
// E the particle energy and L the squared modulus of angular momentum.
struct AnsatzParams {
    Regime regime = Regime::newtonian;
    double k = 0.0;
    double l = 0.0;
    double c0 = 1.0;
    double E0 = -1.0;  // cutoff energy: negative in the Newtonian regime, in (0,1) after
                       // normalization in the relativistic one
    double L0 = 0.0;   // angular momentum floor, >= 0; > 0 carves out a vacuum center

    void validate() const;  // throws DomainError outside the admissible exponent ranges
};

struct SolverConfig {
    double rel_tol = 1e-10;
    // near-pure relative error control; a larger absolute floor would break
    // the scale invariance of the stored mass accuracy for low-mass models
    double abs_tol = 1e-16;
    double max_radius = 100.0;
    int output_grid_size = 8192;
    double outer_margin = 1.5;        // output grid spans [0, outer_margin * R0]
    double start_radius = 1e-8;       // series start when L0 = 0 (no plateau)
    double kernel_tol_factor = 0.1;   // kernel quadrature tol = rel_tol * this
    double horizon_margin = 1e-10;    // declare a horizon when 1 - 2m/r <= this

    void validate() const;
};

}  // namespace vshell
