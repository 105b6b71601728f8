#pragma once

#include <cstddef>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vshell/params.hpp"

namespace vshell::quadrature {

// Adaptive tanh-sinh on [a,b]. Throws NumericalError when the a-posteriori
// error estimate is far above the requested tolerance.
template <class F>
double tanh_sinh(F&& f, double a, double b, double tol, double* achieved = nullptr) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    double value = integrator.integrate(std::forward<F>(f), a, b, tol, &err, &l1, &levels);
    if (achieved) *achieved = err;
    if (err > 100.0 * tol && err > 1e-14)
        throw NumericalError("tanh-sinh quadrature did not reach the requested tolerance");
    return value;
}

}  // namespace vshell::quadrature
