#include "vshell/profile.hpp"

#include <cmath>

namespace vshell {

namespace {

std::size_t interval_index(const std::vector<double>& r, double x) {
    const std::size_t n = r.size();
    if (n < 2) throw DomainError("interpolation needs at least two grid nodes");
    const double dr = r[1] - r[0];
    long i = static_cast<long>(std::floor((x - r[0]) / dr));
    if (i < 0) i = 0;
    if (i > static_cast<long>(n) - 2) i = static_cast<long>(n) - 2;
    while (i > 0 && x < r[i]) --i;
    while (i < static_cast<long>(n) - 2 && x > r[i + 1]) ++i;
    return static_cast<std::size_t>(i);
}

}  // namespace

double hermite_value(const std::vector<double>& r, const std::vector<double>& y,
                     const std::vector<double>& dy, double x) {
    const std::size_t i = interval_index(r, x);
    const double dr = r[i + 1] - r[i];
    const double t = (x - r[i]) / dr;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y[i] + dr * (t3 - 2.0 * t2 + t) * dy[i] +
           (-2.0 * t3 + 3.0 * t2) * y[i + 1] + dr * (t3 - t2) * dy[i + 1];
}

double hermite_derivative(const std::vector<double>& r, const std::vector<double>& y,
                          const std::vector<double>& dy, double x) {
    const std::size_t i = interval_index(r, x);
    const double dr = r[i + 1] - r[i];
    const double t = (x - r[i]) / dr;
    const double t2 = t * t;
    return (6.0 * t2 - 6.0 * t) / dr * y[i] + (3.0 * t2 - 4.0 * t + 1.0) * dy[i] +
           (6.0 * t - 6.0 * t2) / dr * y[i + 1] + (3.0 * t2 - 2.0 * t) * dy[i + 1];
}

}  // namespace vshell
