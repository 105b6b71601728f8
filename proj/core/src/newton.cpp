#include "vshell/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vshell/dopri5.hpp"

namespace vshell {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

double inner_radius_newton(const AnsatzParams& params, double Uc) {
    if (params.regime != Regime::newtonian)
        throw DomainError("inner_radius_newton needs newtonian params");
    params.validate();
    if (!(Uc < params.E0))
        throw InfeasibleCenterError("center potential at or above the cutoff");
    if (params.L0 == 0.0) return 0.0;
    return std::sqrt(params.L0 / (2.0 * (params.E0 - Uc)));
}

namespace {

// rho(0): finite only when the centre carries matter and l >= 0
double center_density_newton(const AnsatzParams& p, double Uc) {
    if (p.L0 > 0.0) return 0.0;
    if (p.l > 0.0) return 0.0;
    if (p.l == 0.0) return g_newton(Uc, p);
    return std::numeric_limits<double>::infinity();
}

double center_slope_newton(const AnsatzParams& p, double Uc) {
    if (p.L0 > 0.0) return 0.0;
    if (p.l > -0.5) return 0.0;
    const double q = 3.0 + 2.0 * p.l;
    if (p.l == -0.5) return four_pi * g_newton(Uc, p) / q;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

NewtonProfile integrate_newton(const AnsatzParams& params, double Uc, const SolverConfig& cfg) {
    if (params.regime != Regime::newtonian)
        throw DomainError("integrate_newton needs newtonian params");
    params.validate();
    cfg.validate();

    NewtonProfile prof;
    const int n = cfg.output_grid_size;

    if (!(Uc < params.E0)) {
        prof.vacuum = true;
        prof.U_outer = Uc;
        prof.r.resize(n);
        prof.U.assign(n, Uc);
        prof.dU.assign(n, 0.0);
        prof.rho.assign(n, 0.0);
        prof.m.assign(n, 0.0);
        for (int i = 0; i < n; ++i) prof.r[i] = static_cast<double>(i) / (n - 1);
        return prof;
    }

    const double r_pl = inner_radius_newton(params, Uc);
    prof.plateau_radius = r_pl;

    double r_begin;
    OdeState<2> y0;
    if (params.L0 > 0.0) {
        r_begin = r_pl;
        y0 = {Uc, 0.0};
    } else {
        // series start: m ~ 4 pi g(Uc) r^q / q with q = 3 + 2l
        r_begin = cfg.start_radius;
        const double gc = g_newton(Uc, params);
        const double q = 3.0 + 2.0 * params.l;
        y0 = {Uc + four_pi * gc * std::pow(r_begin, q - 1.0) / (q * (q - 1.0)),
              four_pi * gc * std::pow(r_begin, q) / q};
    }

    auto rhs = [&params](double r, const OdeState<2>& y, OdeState<2>& dy) {
        dy[0] = y[1] / (r * r);
        dy[1] = four_pi * r * r * source_newton(r, y[0], params);
    };
    UpwardCrossing<2> event;
    event.fn = [&params](double r, const OdeState<2>& y) {
        const double V = params.L0 > 0.0 ? y[0] + params.L0 / (2.0 * r * r) : y[0];
        return V - params.E0;
    };
    event.subsamples = 16;
    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;

    auto ode = integrate_dopri5<2>(rhs, r_begin, y0, cfg.max_radius, opt, &event);
    if (ode.reason != StopReason::event)
        throw NoFiniteSupportError("effective potential never reached the cutoff before max_radius");

    const double R0 = ode.r_stop;
    prof.support_outer = R0;
    prof.U_outer = ode.y_stop[0];
    prof.mass = ode.y_stop[1];

    const double r_max = cfg.outer_margin * R0;
    const double dr = r_max / (n - 1);
    prof.r.resize(n);
    prof.U.resize(n);
    prof.dU.resize(n);
    prof.rho.resize(n);
    prof.m.resize(n);
    const double gc = params.L0 > 0.0 ? 0.0 : g_newton(Uc, params);
    const double q = 3.0 + 2.0 * params.l;
    for (int i = 0; i < n; ++i) {
        const double ri = dr * i;
        prof.r[i] = ri;
        double Ui, mi;
        if (ri <= r_begin) {
            if (params.L0 > 0.0) {
                Ui = Uc;
                mi = 0.0;
            } else {
                Ui = Uc + four_pi * gc * std::pow(ri, q - 1.0) / (q * (q - 1.0));
                mi = four_pi * gc * std::pow(ri, q) / q;
            }
        } else if (ri <= R0) {
            Ui = ode.dense.eval(0, ri);
            mi = ode.dense.eval(1, ri);
        } else {
            Ui = prof.U_outer + prof.mass * (1.0 / R0 - 1.0 / ri);
            mi = prof.mass;
        }
        prof.U[i] = Ui;
        prof.m[i] = mi;
        prof.dU[i] = ri > 0.0 ? mi / (ri * ri) : center_slope_newton(params, Uc);
        prof.rho[i] = ri > 0.0 ? source_newton(ri, Ui, params) : center_density_newton(params, Uc);
    }
    return prof;
}

namespace {

int deadband_sign(double w, double scale) {
    if (std::abs(w) <= 1e-12 * scale) return 0;
    return w > 0.0 ? 1 : -1;
}

}  // namespace

SupportInfo detect_support_newton(const NewtonProfile& prof, const AnsatzParams& params) {
    if (prof.vacuum) throw DomainError("vacuum profile has no shell support");
    SupportInfo info;
    info.inner = prof.plateau_radius;

    auto cutoff_gap = [&](double r) {
        const double U = hermite_value(prof.r, prof.U, prof.dU, r);
        const double V = params.L0 > 0.0 ? U + params.L0 / (2.0 * r * r) : U;
        return V - params.E0;
    };

    const std::size_t n = prof.r.size();
    std::size_t lo_idx = 0;
    bool bracketed = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (prof.r[j] <= info.inner || prof.r[j] <= 0.0) continue;
        const double Fa = prof.U[j] +
                          (params.L0 > 0.0 ? params.L0 / (2.0 * prof.r[j] * prof.r[j]) : 0.0) -
                          params.E0;
        const double Fb = prof.U[j + 1] +
                          (params.L0 > 0.0 ? params.L0 / (2.0 * prof.r[j + 1] * prof.r[j + 1]) : 0.0) -
                          params.E0;
        if (Fa < 0.0 && Fb >= 0.0) {
            lo_idx = j;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw NoFiniteSupportError("no cutoff crossing found on the grid");

    double lo = prof.r[lo_idx], hi = prof.r[lo_idx + 1];
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (cutoff_gap(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    info.outer = 0.5 * (lo + hi);

    // single-shell certificate: w = m r - L0 is the sign of V'; count its sign
    // changes on (R_i, R0] from the grid, then append the closed-form exterior
    // where V' = (M r - L0)/r^3 with the lone root r* = L0/M.
    int changes = 0, prev = 0;
    auto push = [&](int s) {
        if (s == 0) return;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    };
    for (std::size_t j = 0; j < n; ++j) {
        const double rj = prof.r[j];
        if (rj <= info.inner || rj > prof.support_outer) continue;
        const double w = prof.m[j] * rj - params.L0;
        push(deadband_sign(w, std::max({std::abs(prof.m[j] * rj), params.L0, 1e-300})));
    }
    if (params.L0 > 0.0 && prof.mass > 0.0) {
        const double r_star = params.L0 / prof.mass;
        if (r_star > prof.support_outer) {
            push(-1);
            push(1);
        } else {
            push(1);
        }
    } else {
        push(1);
    }
    info.single_shell = changes <= 1;
    return info;
}

double NewtonSolution::potential(double r) const {
    if (profile.vacuum) return Uc;
    if (r <= profile.plateau_radius) return Uc;
    if (r >= profile.r.back()) return profile.U_outer + M * (1.0 / R0 - 1.0 / r);
    return hermite_value(profile.r, profile.U, profile.dU, r);
}

double NewtonSolution::potential_deriv(double r) const {
    if (profile.vacuum) return 0.0;
    if (r <= profile.plateau_radius) return 0.0;
    if (r >= profile.r.back()) return M / (r * r);
    return hermite_derivative(profile.r, profile.U, profile.dU, r);
}

NewtonSolution solve_newton(const AnsatzParams& params, double Uc, const SolverConfig& cfg) {
    NewtonSolution sol;
    sol.params = params;
    sol.Uc = Uc;
    sol.profile = integrate_newton(params, Uc, cfg);
    if (sol.profile.vacuum) return sol;
    const SupportInfo supp = detect_support_newton(sol.profile, params);
    sol.Ri = supp.inner;
    sol.R0 = sol.profile.support_outer;
    sol.M = sol.profile.mass;
    sol.single_shell = supp.single_shell;
    if (std::abs(supp.outer - sol.R0) > 1e-8 * sol.R0)
        throw NumericalError("support detection disagrees with the integration event");
    return sol;
}

void normalize_potential(NewtonSolution& sol) {
    const double shift =
        sol.profile.vacuum ? sol.Uc : sol.profile.U_outer + sol.M / sol.R0;
    if (shift != 0.0) {
        for (auto& u : sol.profile.U) u -= shift;
        sol.profile.U_outer -= shift;
        sol.params.E0 -= shift;
        sol.Uc -= shift;
    }
    sol.normalized = true;
}

void rescale_newton(NewtonSolution& sol, double lambda, double gamma) {
    if (!(lambda > 0.0) || !(gamma > 0.0))
        throw DomainError("scale factors must be positive");
    const double pot = lambda * lambda / (gamma * gamma);
    const double rho_s = lambda * lambda;
    const double m_s = lambda * lambda / (gamma * gamma * gamma);
    const double slope_s = lambda * lambda / gamma;
    auto& pr = sol.profile;
    for (std::size_t i = 0; i < pr.r.size(); ++i) {
        pr.r[i] /= gamma;
        pr.U[i] *= pot;
        pr.dU[i] *= slope_s;
        pr.rho[i] *= rho_s;
        pr.m[i] *= m_s;
    }
    pr.plateau_radius /= gamma;
    pr.support_outer /= gamma;
    pr.U_outer *= pot;
    pr.mass *= m_s;
    const double k = sol.params.k, l = sol.params.l;
    sol.params.E0 *= pot;
    sol.params.L0 *= lambda * lambda / std::pow(gamma, 4);
    sol.params.c0 *= std::pow(gamma, 3.0 + 2.0 * k + 4.0 * l) *
                     std::pow(lambda, -(1.0 + 2.0 * k + 2.0 * l));
    sol.Uc *= pot;
    sol.Ri /= gamma;
    sol.R0 /= gamma;
    sol.M *= m_s;
}

NewtonSolution solve_for_targets_newton(const AnsatzParams& params, double Uc,
                                        const NewtonTargets& targets, const SolverConfig& cfg) {
    if (!(targets.M > 0.0)) throw DomainError("target mass must be positive");
    const bool want_R0 = targets.R0 > 0.0, want_Ri = targets.Ri > 0.0;
    if (want_R0 == want_Ri)
        throw DomainError("specify exactly one of the target radii R0 or Ri");
    NewtonSolution sol = solve_newton(params, Uc, cfg);
    if (sol.profile.vacuum)
        throw InfeasibleCenterError("vacuum template cannot be scaled to targets");
    normalize_potential(sol);
    double gamma;
    if (want_R0) {
        gamma = sol.R0 / targets.R0;
    } else {
        if (!(sol.Ri > 0.0)) throw DomainError("inner-radius target needs L0 > 0");
        gamma = sol.Ri / targets.Ri;
    }
    const double lambda = std::sqrt(targets.M * std::pow(gamma, 3) / sol.M);
    rescale_newton(sol, lambda, gamma);
    return sol;
}

}  // namespace vshell
