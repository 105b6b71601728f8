#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "vshell/params.hpp"

// Dormand-Prince 5(4) with FSAL, quartic dense output and upward-crossing
// event localization on the dense interpolant. Integration runs toward
// increasing abscissa only, which is all the shell construction needs.

namespace vshell {

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
struct DenseSegment {
    double r0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 5>, N> cont{};

    double eval(std::size_t i, double r) const {
        const double th = (r - r0) / h;
        const double th1 = 1.0 - th;
        const auto& c = cont[i];
        return c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4])));
    }

    OdeState<N> eval_all(double r) const {
        OdeState<N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = eval(i, r);
        return y;
    }
};

template <std::size_t N>
class DenseOutput {
public:
    std::vector<DenseSegment<N>> segments;

    bool empty() const { return segments.empty(); }
    double r_begin() const { return segments.front().r0; }
    double r_end() const { return segments.back().r0 + segments.back().h; }

    const DenseSegment<N>& segment_at(double r) const {
        std::size_t lo = 0, hi = segments.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (segments[mid].r0 <= r)
                lo = mid;
            else
                hi = mid - 1;
        }
        return segments[lo];
    }

    double eval(std::size_t i, double r) const {
        r = std::clamp(r, r_begin(), r_end());
        return segment_at(r).eval(i, r);
    }

    OdeState<N> eval_all(double r) const {
        r = std::clamp(r, r_begin(), r_end());
        const auto& seg = segment_at(r);
        OdeState<N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = seg.eval(i, r);
        return y;
    }
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 picks one automatically
    double max_step = 0.0;      // 0 means unbounded
    std::size_t max_steps = 2000000;
    bool store_dense = true;
};

enum class StopReason { reached_end, event };

template <std::size_t N>
struct OdeSolution {
    StopReason reason = StopReason::reached_end;
    double r_stop = 0.0;
    OdeState<N> y_stop{};
    DenseOutput<N> dense;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

// Stops where fn crosses zero from below, after fn has been seen strictly
// negative at least once. The crossing is localized by bisection on the dense
// interpolant of the accepted step.
template <std::size_t N>
struct UpwardCrossing {
    std::function<double(double, const OdeState<N>&)> fn;
    double radius_rel_tol = 1e-12;
    int subsamples = 8;
};

namespace dopri5_detail {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri5_detail

template <std::size_t N, class Rhs>
OdeSolution<N> integrate_dopri5(Rhs&& rhs, double r0, OdeState<N> y0, double r_end,
                                const OdeOptions& opt = {},
                                const UpwardCrossing<N>* event = nullptr) {
    using namespace dopri5_detail;
    if (!(r_end > r0)) throw DomainError("integrate_dopri5 needs r_end > r0");

    OdeSolution<N> sol;
    double r = r0;
    OdeState<N> y = y0;
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, ytmp, y1;
    rhs(r, y, k1);

    const double atol = opt.abs_tol, rtol = opt.rel_tol;
    auto hairer_norm = [&](const OdeState<N>& v, const OdeState<N>& ya, const OdeState<N>& yb) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = atol + rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double q = v[i] / sc;
            s += q * q;
        }
        return std::sqrt(s / N);
    };

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic for order 5
        double d0 = hairer_norm(y, y, y), dd1 = hairer_norm(k1, y, y);
        double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
        h0 = std::min(h0, r_end - r0);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h0 * k1[i];
        rhs(r0 + h0, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) k3[i] = (k2[i] - k1[i]) / h0;
        double d2 = hairer_norm(k3, y, y);
        double h1 = (std::max(dd1, d2) <= 1e-15)
                        ? std::max(1e-6, h0 * 1e-3)
                        : std::pow(0.01 / std::max(dd1, d2), 0.2);
        h = std::min({100.0 * h0, h1, r_end - r0});
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    bool event_armed = false;
    double event_prev = 0.0;
    if (event) {
        event_prev = event->fn(r, y);
        if (event_prev < 0.0) event_armed = true;
    }

    bool last_rejected = false;
    std::size_t nsteps = 0;
    while (true) {
        if (++nsteps > opt.max_steps)
            throw NumericalError("integrate_dopri5 exceeded max_steps");
        if (h < 1e-14 * std::max(1.0, std::abs(r)))
            throw NumericalError("integrate_dopri5 step size underflow");
        bool last_step = false;
        if (r + h >= r_end) {
            h = r_end - r;
            last_step = true;
        }

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(r + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(r + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(r + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(r + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(r + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(r + h, y1, k7);

        OdeState<N> errv;
        for (std::size_t i = 0; i < N; ++i)
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
        const double err = hairer_norm(errv, y, y1);

        if (err <= 1.0) {
            DenseSegment<N> seg;
            seg.r0 = r;
            seg.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                seg.cont[i][0] = y[i];
                seg.cont[i][1] = ydiff;
                seg.cont[i][2] = bspl;
                seg.cont[i][3] = ydiff - h * k7[i] - bspl;
                seg.cont[i][4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
            }
            if (opt.store_dense || event) sol.dense.segments.push_back(seg);
            ++sol.steps_accepted;

            if (event) {
                const int sub = std::max(2, event->subsamples);
                double ra = r, fa = event_prev;
                bool found = false;
                double hit_lo = 0.0, hit_hi = 0.0;
                for (int j = 1; j <= sub; ++j) {
                    const double rb = (j == sub) ? r + h : r + h * j / sub;
                    double fb;
                    if (j == sub) {
                        fb = event->fn(rb, y1);
                    } else {
                        fb = event->fn(rb, seg.eval_all(rb));
                    }
                    if (event_armed && fa <= 0.0 && fb > 0.0) {
                        found = true;
                        hit_lo = ra;
                        hit_hi = rb;
                        break;
                    }
                    if (fb < 0.0) event_armed = true;
                    ra = rb;
                    fa = fb;
                }
                if (found) {
                    double lo = hit_lo, hi = hit_hi;
                    const double rtol_r = event->radius_rel_tol;
                    for (int it = 0; it < 200 && (hi - lo) > rtol_r * std::max(std::abs(hi), 1e-6);
                         ++it) {
                        const double mid = 0.5 * (lo + hi);
                        OdeState<N> ym;
                        for (std::size_t i = 0; i < N; ++i) ym[i] = seg.eval(i, mid);
                        if (event->fn(mid, ym) > 0.0)
                            hi = mid;
                        else
                            lo = mid;
                    }
                    const double r_ev = 0.5 * (lo + hi);
                    sol.reason = StopReason::event;
                    sol.r_stop = r_ev;
                    for (std::size_t i = 0; i < N; ++i) sol.y_stop[i] = seg.eval(i, r_ev);
                    return sol;
                }
                event_prev = event->fn(r + h, y1);
                if (event_prev < 0.0) event_armed = true;
            }

            r += h;
            y = y1;
            k1 = k7;
            if (last_step) {
                sol.reason = StopReason::reached_end;
                sol.r_stop = r;
                sol.y_stop = y;
                return sol;
            }
            double fac = 0.9 * std::pow(err > 0.0 ? err : 1e-16, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h *= fac;
            if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
            last_rejected = false;
        } else {
            double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            h *= fac;
            ++sol.steps_rejected;
            last_rejected = true;
        }
    }
}

}  // namespace vshell
