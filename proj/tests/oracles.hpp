#pragma once

// Shared test-side reference machinery, deliberately on different numerical
// routes than the library: fixed-order composite Gauss-Legendre on the raw
// reduced integrands, and a fixed-step RK4 for solver cross-checks.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

// 16-point Gauss-Legendre nodes and weights on [-1, 1]
inline constexpr std::array<double, 8> gl16_x = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> gl16_w = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// composite rule: `panels` x 16 nodes; 625 panels gives the 1e4-node oracle
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 625) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double dx = 0.5 * h * gl16_x[i];
            s += gl16_w[i] * (f(mid + dx) + f(mid - dx));
        }
        total += 0.5 * h * s;
    }
    return total;
}

// classic RK4 with a fixed step count, for ODE cross-checks
template <std::size_t N, class Rhs>
std::array<double, N> rk4(Rhs&& rhs, double r0, std::array<double, N> y, double r1,
                          std::size_t steps) {
    const double h = (r1 - r0) / steps;
    std::array<double, N> k1, k2, k3, k4, t;
    for (std::size_t s = 0; s < steps; ++s) {
        const double r = r0 + s * h;
        rhs(r, y, k1);
        for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + 0.5 * h * k1[i];
        rhs(r + 0.5 * h, t, k2);
        for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + 0.5 * h * k2[i];
        rhs(r + 0.5 * h, t, k3);
        for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * k3[i];
        rhs(r + h, t, k4);
        for (std::size_t i = 0; i < N; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace oracles
