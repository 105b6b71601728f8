#include "vshell/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vshell/dopri5.hpp"
#include "quad.hpp"

namespace vshell {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double four_pi = 4.0 * pi;
constexpr double eight_pi = 8.0 * pi;

CheckResult make_check(std::string name, double residual, double tol,
                       std::vector<double> locs = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.max_residual = residual;
    c.tolerance = tol;
    c.pass = residual <= tol;
    c.locations = std::move(locs);
    return c;
}

struct WorstTracker {
    std::vector<std::pair<double, double>> top;  // (residual, radius)

    void add(double res, double r) {
        top.emplace_back(res, r);
        std::sort(top.begin(), top.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        if (top.size() > 3) top.resize(3);
    }
    double worst() const { return top.empty() ? 0.0 : top.front().first; }
    std::vector<double> radii() const {
        std::vector<double> r;
        for (const auto& t : top) r.push_back(t.second);
        return r;
    }
};

bool near_any(double r, std::initializer_list<double> pts, double width) {
    for (double p : pts)
        if (std::abs(r - p) <= width) return true;
    return false;
}

template <class F>
double simpson(F&& f, double a, double b, int sub) {
    const double h = (b - a) / sub;
    double s = f(a) + f(b);
    for (int i = 1; i < sub; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// subdivisions per grid panel for the cumulative mass quadrature; scaled so
// the total number of integrand evaluations (and with it the truncation
// error) stays at the default-resolution level on coarser grids
int mass_quad_sub(std::size_t n) {
    int sub = 4;
    while (static_cast<std::size_t>(sub) * n < 32768 && sub < 512) sub *= 2;
    return sub;
}

}  // namespace

bool ValidationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const CheckResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

void ValidationReport::merge(ValidationReport other) {
    for (auto& c : other.checks) checks.push_back(std::move(c));
}

double velocity_space_oracle_newton(double r, double U, const AnsatzParams& params,
                                    double quad_tol) {
    if (params.regime != Regime::newtonian)
        throw DomainError("velocity_space_oracle_newton needs newtonian params");
    if (!(r > 0.0)) throw DomainError("oracle needs r > 0");
    const double room = params.E0 - U;
    const double tau_min = params.L0 / (r * r);
    const double wmax2 = 2.0 * room - tau_min;
    if (wmax2 <= 0.0) return 0.0;
    const double wmax = std::sqrt(wmax2);
    auto outer = [&](double w) {
        const double tau_max = 2.0 * room - w * w;
        // a degenerate band contributes nothing but drowns the quadrature in
        // cutoff-sign roundoff noise, so it is dropped outright
        if (tau_max - tau_min <= 1e-10 * (1.0 + std::abs(tau_max))) return 0.0;
        auto inner = [&](double tau) {
            const double cut = room - 0.5 * w * w - 0.5 * tau;
            if (cut <= 0.0) return 0.0;
            const double ang = r * r * tau - params.L0;
            if (ang <= 0.0) return 0.0;
            return std::pow(cut, params.k) * std::pow(ang, params.l);
        };
        return quadrature::tanh_sinh(inner, tau_min, tau_max, quad_tol);
    };
    return 2.0 * pi * params.c0 * quadrature::tanh_sinh(outer, 0.0, wmax, quad_tol);
}

MatterSources velocity_space_oracle_rel(double r, double mu, const AnsatzParams& params,
                                        double quad_tol) {
    if (params.regime != Regime::relativistic)
        throw DomainError("velocity_space_oracle_rel needs relativistic params");
    if (!(r > 0.0)) throw DomainError("oracle needs r > 0");
    const double emu = std::exp(mu);
    const double Q = params.E0 * params.E0 * std::exp(-2.0 * mu);
    const double tau_min = params.L0 / (r * r);
    if (Q <= 1.0 + tau_min) return {};
    const double wmax = std::sqrt(Q - 1.0 - tau_min);
    auto cut_kernel = [&](double w, double tau) {
        const double cut = params.E0 - emu * std::sqrt(1.0 + w * w + tau);
        if (cut <= 0.0) return 0.0;
        const double ang = r * r * tau - params.L0;
        if (ang <= 0.0) return 0.0;
        return std::pow(cut, params.k) * std::pow(ang, params.l);
    };
    auto outer_rho = [&](double w) {
        const double tau_max = Q - 1.0 - w * w;
        if (tau_max - tau_min <= 1e-10 * (1.0 + std::abs(tau_max))) return 0.0;
        auto inner = [&](double tau) {
            return std::sqrt(1.0 + w * w + tau) * cut_kernel(w, tau);
        };
        return quadrature::tanh_sinh(inner, tau_min, tau_max, quad_tol);
    };
    auto outer_p = [&](double w) {
        const double tau_max = Q - 1.0 - w * w;
        if (tau_max - tau_min <= 1e-10 * (1.0 + std::abs(tau_max))) return 0.0;
        auto inner = [&](double tau) {
            return w * w / std::sqrt(1.0 + w * w + tau) * cut_kernel(w, tau);
        };
        return quadrature::tanh_sinh(inner, tau_min, tau_max, quad_tol);
    };
    MatterSources s;
    s.rho = 2.0 * pi * params.c0 * quadrature::tanh_sinh(outer_rho, 0.0, wmax, quad_tol);
    s.p = 2.0 * pi * params.c0 * quadrature::tanh_sinh(outer_p, 0.0, wmax, quad_tol);
    return s;
}

ValidationReport source_oracle_check(const NewtonSolution& sol, int n_samples, double tol) {
    ValidationReport rep;
    if (sol.profile.vacuum) {
        rep.checks.push_back(make_check("source_oracle", 0.0, tol));
        return rep;
    }
    WorstTracker tr;
    for (int i = 0; i < n_samples; ++i) {
        const double r = sol.Ri + (sol.R0 - sol.Ri) * (i + 0.5) / n_samples;
        const double U = sol.potential(r);
        const double impl = source_newton(r, U, sol.params);
        const double oracle = velocity_space_oracle_newton(r, U, sol.params);
        const double res = std::abs(impl - oracle) / std::max(std::abs(oracle), 1e-300);
        tr.add(res, r);
    }
    rep.checks.push_back(make_check("source_oracle", tr.worst(), tol, tr.radii()));
    return rep;
}

ValidationReport source_oracle_check(const EinsteinSolution& sol, int n_samples, double tol) {
    ValidationReport rep;
    if (sol.profile.vacuum) {
        rep.checks.push_back(make_check("source_oracle_rho", 0.0, tol));
        rep.checks.push_back(make_check("source_oracle_p", 0.0, tol));
        return rep;
    }
    WorstTracker tr_rho, tr_p;
    for (int i = 0; i < n_samples; ++i) {
        const double r = sol.Ri + (sol.R0 - sol.Ri) * (i + 0.5) / n_samples;
        const double mu = sol.metric_mu(r);
        const MatterSources impl = source_rel(r, mu, sol.params);
        const MatterSources oracle = velocity_space_oracle_rel(r, mu, sol.params);
        tr_rho.add(std::abs(impl.rho - oracle.rho) / std::max(std::abs(oracle.rho), 1e-300), r);
        tr_p.add(std::abs(impl.p - oracle.p) / std::max(std::abs(oracle.p), 1e-300), r);
    }
    rep.checks.push_back(make_check("source_oracle_rho", tr_rho.worst(), tol, tr_rho.radii()));
    rep.checks.push_back(make_check("source_oracle_p", tr_p.worst(), tol, tr_p.radii()));
    return rep;
}

ValidationReport field_residuals(const NewtonSolution& sol) {
    ValidationReport rep;
    const auto& pr = sol.profile;
    if (pr.vacuum) {
        rep.checks.push_back(make_check("poisson_fd", 0.0, 1e-6));
        rep.checks.push_back(make_check("mass_quadrature", 0.0, 1e-8));
        return rep;
    }
    const std::size_t n = pr.r.size();
    const double dr = pr.r[1] - pr.r[0];
    const double excl = 4.5 * dr;

    double rhs_max = 1e-30;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = four_pi * pr.r[j] * pr.r[j] * pr.rho[j];
        if (std::isfinite(v)) rhs_max = std::max(rhs_max, v);
    }

    // (r^2 U')' = 4 pi r^2 rho with a 5-point fourth-order difference on the
    // stored slope; residual relative to the largest source magnitude on the
    // grid. Fourth order matters near the support edges, where the density
    // behaves like a fractional power and lower-order stencils lose accuracy.
    WorstTracker fd;
    auto flux = [&](std::size_t i) { return pr.r[i] * pr.r[i] * pr.dU[i]; };
    for (std::size_t j = 2; j + 2 < n; ++j) {
        const double rj = pr.r[j];
        if (near_any(rj, {0.0, sol.Ri, sol.R0}, excl)) continue;
        const double lhs =
            (-flux(j + 2) + 8.0 * flux(j + 1) - 8.0 * flux(j - 1) + flux(j - 2)) / (12.0 * dr);
        const double rhs = four_pi * rj * rj * pr.rho[j];
        if (!std::isfinite(rhs)) continue;
        fd.add(std::abs(lhs - rhs) / rhs_max, rj);
    }
    rep.checks.push_back(make_check("poisson_fd", fd.worst(), 1e-6, fd.radii()));

    // m(r) against an independent cumulative quadrature of 4 pi s^2 rho
    auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double v = four_pi * s * s * source_newton(s, sol.potential(s), sol.params);
        return std::isfinite(v) ? v : 0.0;
    };
    // relative wherever m carries at least 1e-3 of the total mass; below that
    // the stored m has only the integrator's absolute accuracy, so the check
    // is against 1e-11 of the total mass instead
    WorstTracker mq;
    double acc = 0.0;
    const int sub = mass_quad_sub(n);
    // the integrand is a fractional power at the ignition radius, where m is
    // still tiny, so the panels there need far more subdivisions than the
    // smooth bulk
    auto panel_sub = [&](std::size_t j) {
        if (j == 1) return std::max(64, sub);
        if (sol.params.L0 > 0.0 && pr.r[j] > sol.Ri - dr && pr.r[j - 1] < sol.Ri + 3.0 * dr)
            return std::max(256, sub);
        return sub;
    };
    for (std::size_t j = 1; j < n; ++j) {
        acc += simpson(integrand, pr.r[j - 1], pr.r[j], panel_sub(j));
        const double denom = std::max(pr.m[j], 1e-3 * std::max(pr.mass, 1e-300));
        mq.add(std::abs(pr.m[j] - acc) / denom, pr.r[j]);
    }
    rep.checks.push_back(make_check("mass_quadrature", mq.worst(), 1e-8, mq.radii()));

    // the plateau must be bitwise flat
    if (sol.params.L0 > 0.0) {
        double dev = 0.0;
        const double uscale = std::max(std::abs(sol.Uc), 1e-300);
        for (std::size_t j = 0; j < n; ++j) {
            if (pr.r[j] > pr.plateau_radius) break;
            dev = std::max({dev, std::abs(pr.U[j] - sol.Uc) / uscale, std::abs(pr.dU[j]),
                            std::abs(pr.m[j])});
        }
        rep.checks.push_back(make_check("plateau_exact", dev, 1e-13));
    }

    // the effective potential meets the cutoff at the detected boundary
    const double V_R0 = sol.potential(sol.R0) +
                        (sol.params.L0 > 0.0 ? sol.params.L0 / (2.0 * sol.R0 * sol.R0) : 0.0);
    const double escale = std::max(std::abs(sol.params.E0), 1e-6);
    rep.checks.push_back(make_check("outer_cutoff", std::abs(V_R0 - sol.params.E0) / escale, 1e-10));

    if (sol.normalized) {
        const double U_inf = pr.U_outer + sol.M / sol.R0;
        const double denom = std::max(std::abs(sol.Uc), 1e-6);
        rep.checks.push_back(make_check("asymptotic_potential", std::abs(U_inf) / denom, 1e-10));
    }
    return rep;
}

ValidationReport field_residuals(const EinsteinSolution& sol) {
    ValidationReport rep;
    const auto& pr = sol.profile;
    if (pr.vacuum) {
        rep.checks.push_back(make_check("field_fd_lambda", 0.0, 1e-6));
        rep.checks.push_back(make_check("field_fd_mu", 0.0, 1e-6));
        rep.checks.push_back(make_check("metric_consistency", 0.0, 1e-8));
        return rep;
    }
    const std::size_t n = pr.r.size();
    const double dr = pr.r[1] - pr.r[0];
    const double excl = 4.5 * dr;

    double rho_rhs_max = 1e-30, p_rhs_max = 1e-30;
    for (std::size_t j = 0; j < n; ++j) {
        const double r2 = pr.r[j] * pr.r[j];
        if (std::isfinite(pr.rho[j])) rho_rhs_max = std::max(rho_rhs_max, eight_pi * r2 * pr.rho[j]);
        if (std::isfinite(pr.p[j])) p_rhs_max = std::max(p_rhs_max, eight_pi * r2 * pr.p[j]);
    }

    // e^{-2 lambda} (2 r lambda' - 1) + 1 = 8 pi r^2 rho and
    // e^{-2 lambda} (2 r mu' + 1) - 1 = 8 pi r^2 p, both with 5-point FD
    WorstTracker fdl, fdm;
    auto fd4 = [&](const std::vector<double>& f, std::size_t j) {
        return (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) / (12.0 * dr);
    };
    for (std::size_t j = 2; j + 2 < n; ++j) {
        const double rj = pr.r[j];
        if (near_any(rj, {0.0, sol.Ri, sol.R0}, excl)) continue;
        const double em2l = std::exp(-2.0 * pr.lambda[j]);
        const double lam_fd = fd4(pr.lambda, j);
        const double mu_fd = fd4(pr.mu, j);
        const double lhs_l = em2l * (2.0 * rj * lam_fd - 1.0) + 1.0;
        const double rhs_l = eight_pi * rj * rj * pr.rho[j];
        const double lhs_m = em2l * (2.0 * rj * mu_fd + 1.0) - 1.0;
        const double rhs_m = eight_pi * rj * rj * pr.p[j];
        if (std::isfinite(rhs_l)) fdl.add(std::abs(lhs_l - rhs_l) / rho_rhs_max, rj);
        if (std::isfinite(rhs_m)) fdm.add(std::abs(lhs_m - rhs_m) / p_rhs_max, rj);
    }
    rep.checks.push_back(make_check("field_fd_lambda", fdl.worst(), 1e-6, fdl.radii()));
    rep.checks.push_back(make_check("field_fd_mu", fdm.worst(), 1e-6, fdm.radii()));

    // e^{-2 lambda} == 1 - 2m/r must hold node for node
    WorstTracker mc;
    for (std::size_t j = 0; j < n; ++j) {
        const double rj = pr.r[j];
        const double target = rj > 0.0 ? 1.0 - 2.0 * pr.m[j] / rj : 1.0;
        mc.add(std::abs(std::exp(-2.0 * pr.lambda[j]) - target), rj);
    }
    rep.checks.push_back(make_check("metric_consistency", mc.worst(), 1e-8, mc.radii()));
    rep.checks.push_back(make_check("lambda_origin", std::abs(pr.lambda[0]), 1e-10));

    const double quad_tol = 1e-11;
    auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double v =
            four_pi * s * s * source_rel(s, sol.metric_mu(s), sol.params, quad_tol).rho;
        return std::isfinite(v) ? v : 0.0;
    };
    WorstTracker mq;
    double acc = 0.0;
    const int sub = mass_quad_sub(n);
    auto panel_sub = [&](std::size_t j) {
        if (j == 1) return std::max(64, sub);
        if (sol.params.L0 > 0.0 && pr.r[j] > sol.Ri - dr && pr.r[j - 1] < sol.Ri + 3.0 * dr)
            return std::max(256, sub);
        return sub;
    };
    for (std::size_t j = 1; j < n; ++j) {
        acc += simpson(integrand, pr.r[j - 1], pr.r[j], panel_sub(j));
        const double denom = std::max(pr.m[j], 1e-3 * std::max(pr.mass, 1e-300));
        mq.add(std::abs(pr.m[j] - acc) / denom, pr.r[j]);
    }
    rep.checks.push_back(make_check("mass_quadrature", mq.worst(), 1e-8, mq.radii()));

    if (sol.params.L0 > 0.0) {
        double dev = 0.0;
        const double mscale = std::max(std::abs(sol.mu_c), 1e-300);
        for (std::size_t j = 0; j < n; ++j) {
            if (pr.r[j] > pr.plateau_radius) break;
            dev = std::max({dev, std::abs(pr.mu[j] - sol.mu_c) / mscale, std::abs(pr.dmu[j]),
                            std::abs(pr.m[j])});
        }
        rep.checks.push_back(make_check("plateau_exact", dev, 1e-13));
    }

    const double W_R0 = std::exp(sol.metric_mu(sol.R0)) *
                            std::sqrt(1.0 + sol.params.L0 / (sol.R0 * sol.R0)) -
                        sol.params.E0;
    rep.checks.push_back(make_check("outer_cutoff", std::abs(W_R0) / sol.params.E0, 1e-10));

    // p stays strictly below rho wherever there is matter
    double p_over_rho = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(pr.rho[j] > 0.0) || !std::isfinite(pr.rho[j])) continue;
        p_over_rho = std::max(p_over_rho, pr.p[j] / pr.rho[j]);
    }
    rep.checks.push_back(make_check("pressure_below_density", p_over_rho, 1.0));

    if (sol.normalized) {
        const double mu_inf = pr.mu_outer - 0.5 * std::log1p(-2.0 * sol.M / sol.R0);
        rep.checks.push_back(make_check("asymptotic_flatness", std::abs(mu_inf), 1e-10));
    }
    return rep;
}

namespace {

// common speed-space construction: smin2 < v2 < smax2 with controlled margins
struct SpeedPick {
    double v_r = 0.0, v_perp = 0.0;
    bool ok = false;
};

SpeedPick pick_speeds(double smin2, double smax2) {
    SpeedPick p;
    if (!(smax2 > smin2)) return p;
    const double v2 = 0.5 * (smin2 + smax2);
    const double vperp2 = smin2 + 0.6 * (v2 - smin2);
    p.v_perp = std::sqrt(vperp2);
    p.v_r = std::sqrt(v2 - vperp2);
    p.ok = true;
    return p;
}

}  // namespace

std::vector<OrbitSample> default_orbit_samples(const NewtonSolution& sol, int n) {
    std::vector<OrbitSample> out;
    if (sol.profile.vacuum) return out;
    for (int i = 0; i < n; ++i) {
        const double r = sol.Ri + (sol.R0 - sol.Ri) * (i + 0.5) / n;
        const double smax2 = 2.0 * (sol.params.E0 - sol.potential(r));
        const double smin2 = sol.params.L0 / (r * r);
        const SpeedPick p = pick_speeds(smin2, smax2);
        if (!p.ok) continue;
        out.push_back({{r, 0.0, 0.0}, {p.v_r, p.v_perp, 0.0}});
    }
    return out;
}

std::vector<OrbitSample> default_orbit_samples(const EinsteinSolution& sol, int n) {
    std::vector<OrbitSample> out;
    if (sol.profile.vacuum) return out;
    for (int i = 0; i < n; ++i) {
        const double r = sol.Ri + (sol.R0 - sol.Ri) * (i + 0.5) / n;
        const double smax2 =
            sol.params.E0 * sol.params.E0 * std::exp(-2.0 * sol.metric_mu(r)) - 1.0;
        const double smin2 = sol.params.L0 / (r * r);
        const SpeedPick p = pick_speeds(smin2, smax2);
        if (!p.ok) continue;
        out.push_back({{r, 0.0, 0.0}, {p.v_r, p.v_perp, 0.0}});
    }
    return out;
}

namespace {

struct DriftStats {
    double dE = 0.0, dL = 0.0, df = 0.0;
    double start_radius = 0.0;
};

double norm3(const double* a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double cross_sq(const OdeState<6>& y) {
    const double cx = y[1] * y[5] - y[2] * y[4];
    const double cy = y[2] * y[3] - y[0] * y[5];
    const double cz = y[0] * y[4] - y[1] * y[3];
    return cx * cx + cy * cy + cz * cz;
}

// propagates one state through n_periods pericenter passages, measuring the
// invariants at every passage
template <class Force, class Energy>
DriftStats run_orbit(const OrbitSample& s0, const AnsatzParams& params, Force&& rhs,
                     Energy&& energy, int n_periods) {
    OdeState<6> y = {s0.x[0], s0.x[1], s0.x[2], s0.v[0], s0.v[1], s0.v[2]};
    DriftStats st;
    st.start_radius = norm3(y.data());

    const double E0v = energy(y);
    const double L0v = cross_sq(y);
    const double f0 = std::pow(params.E0 - E0v, params.k) *
                      (params.l != 0.0 ? std::pow(L0v - params.L0, params.l) : 1.0);
    if (!(params.E0 - E0v > 0.0) || !(L0v - params.L0 > 0.0) || !(f0 > 0.0))
        throw DomainError("orbit sample outside the distribution support");

    UpwardCrossing<6> peri;
    peri.fn = [](double, const OdeState<6>& yy) {
        const double r = norm3(yy.data());
        return (yy[0] * yy[3] + yy[1] * yy[4] + yy[2] * yy[5]) / r;
    };
    OdeOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    opt.store_dense = false;

    double t = 0.0;
    double period_guess = 0.0;
    for (int pass = 0; pass < n_periods; ++pass) {
        const double t_end = t + (period_guess > 0.0 ? 50.0 * period_guess : 1e6);
        auto leg = integrate_dopri5<6>(rhs, t, y, t_end, opt, &peri);
        if (leg.reason != StopReason::event)
            throw NumericalError("orbit never returned to pericenter");
        if (pass == 0) period_guess = leg.r_stop - t;
        t = leg.r_stop;
        y = leg.y_stop;

        const double E = energy(y);
        const double L = cross_sq(y);
        const double f = std::pow(params.E0 - E, params.k) *
                         (params.l != 0.0 ? std::pow(L - params.L0, params.l) : 1.0);
        st.dE = std::max(st.dE, std::abs(E - E0v) / std::max(std::abs(E0v), 1e-300));
        st.dL = std::max(st.dL, std::abs(L - L0v) / std::max(std::abs(L0v), 1e-300));
        st.df = std::max(st.df, std::abs(f - f0) / std::max(std::abs(f0), 1e-300));
    }
    return st;
}

ValidationReport drift_report(const std::vector<DriftStats>& stats, double tol) {
    WorstTracker te, tl, tf;
    for (const auto& s : stats) {
        te.add(s.dE, s.start_radius);
        tl.add(s.dL, s.start_radius);
        tf.add(s.df, s.start_radius);
    }
    ValidationReport rep;
    rep.checks.push_back(make_check("orbit_energy_drift", te.worst(), tol, te.radii()));
    rep.checks.push_back(make_check("orbit_angmom_drift", tl.worst(), tol, tl.radii()));
    rep.checks.push_back(make_check("orbit_f_drift", tf.worst(), tol, tf.radii()));
    return rep;
}

}  // namespace

ValidationReport characteristic_drift(const NewtonSolution& sol,
                                      std::span<const OrbitSample> states, int n_periods,
                                      double tol) {
    auto rhs = [&sol](double, const OdeState<6>& y, OdeState<6>& dy) {
        const double r = norm3(y.data());
        const double acc = -sol.potential_deriv(r) / r;
        dy[0] = y[3];
        dy[1] = y[4];
        dy[2] = y[5];
        dy[3] = acc * y[0];
        dy[4] = acc * y[1];
        dy[5] = acc * y[2];
    };
    auto energy = [&sol](const OdeState<6>& y) {
        const double r = norm3(y.data());
        const double v2 = y[3] * y[3] + y[4] * y[4] + y[5] * y[5];
        return 0.5 * v2 + sol.potential(r);
    };
    std::vector<DriftStats> stats;
    for (const auto& s : states) stats.push_back(run_orbit(s, sol.params, rhs, energy, n_periods));
    return drift_report(stats, tol);
}

ValidationReport characteristic_drift(const EinsteinSolution& sol,
                                      std::span<const OrbitSample> states, int n_periods,
                                      double tol) {
    auto rhs = [&sol](double, const OdeState<6>& y, OdeState<6>& dy) {
        const double r = norm3(y.data());
        const double gam = std::sqrt(1.0 + y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
        const double acc = -gam * sol.metric_mu_deriv(r) / r;
        dy[0] = y[3] / gam;
        dy[1] = y[4] / gam;
        dy[2] = y[5] / gam;
        dy[3] = acc * y[0];
        dy[4] = acc * y[1];
        dy[5] = acc * y[2];
    };
    auto energy = [&sol](const OdeState<6>& y) {
        const double r = norm3(y.data());
        const double gam = std::sqrt(1.0 + y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
        return std::exp(sol.metric_mu(r)) * gam;
    };
    std::vector<DriftStats> stats;
    for (const auto& s : states) stats.push_back(run_orbit(s, sol.params, rhs, energy, n_periods));
    return drift_report(stats, tol);
}

namespace {

template <class Sol>
ValidationReport structure_common(const Sol& sol, double closed_inner) {
    ValidationReport rep;
    const auto& r = sol.profile.r;
    const auto& rho = sol.profile.rho;

    double inner_max = 0.0, outer_max = 0.0, interior_max = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] < sol.Ri * (1.0 - 1e-12))
            inner_max = std::max(inner_max, rho[j]);
        else if (r[j] > sol.R0 * (1.0 + 1e-12))
            outer_max = std::max(outer_max, rho[j]);
        else if (std::isfinite(rho[j]))
            interior_max = std::max(interior_max, rho[j]);
    }
    rep.checks.push_back(make_check("inner_vacuum", inner_max, 0.0));
    rep.checks.push_back(make_check("outer_vacuum", outer_max, 0.0));
    rep.checks.push_back(make_check("interior_matter", interior_max > 0.0 ? 0.0 : 1.0, 0.0));

    const bool want_positive = sol.params.L0 > 0.0;
    rep.checks.push_back(
        make_check("inner_radius_iff_floor", (sol.Ri > 0.0) == want_positive ? 0.0 : 1.0, 0.0));
    if (sol.params.L0 > 0.0) {
        const double res = std::abs(sol.Ri - closed_inner) / closed_inner;
        rep.checks.push_back(make_check("inner_radius_closed_form", res, 1e-8));
    }
    return rep;
}

}  // namespace

ValidationReport shell_structure_check(const NewtonSolution& sol) {
    ValidationReport rep;
    if (sol.profile.vacuum) {
        double any = 0.0;
        for (double v : sol.profile.rho) any = std::max(any, v);
        rep.checks.push_back(make_check("vacuum_everywhere", any, 0.0));
        return rep;
    }
    rep = structure_common(sol, inner_radius_newton(sol.params, sol.Uc));
    rep.checks.push_back(make_check("single_shell", sol.single_shell ? 0.0 : 1.0, 0.0));
    if (sol.normalized) {
        rep.checks.push_back(make_check("normalized_cutoff_negative",
                                        sol.params.E0 < 0.0 ? 0.0 : 1.0, 0.0));
    }
    return rep;
}

ValidationReport shell_structure_check(const EinsteinSolution& sol) {
    ValidationReport rep;
    if (sol.profile.vacuum) {
        double any = 0.0;
        for (double v : sol.profile.rho) any = std::max(any, v);
        rep.checks.push_back(make_check("vacuum_everywhere", any, 0.0));
        return rep;
    }
    rep = structure_common(sol, inner_radius_rel(sol.params, sol.mu_c));
    rep.checks.push_back(make_check("supports_match", sol.supports_match ? 0.0 : 1.0, 0.0));
    rep.checks.push_back(make_check("no_reignition", sol.reignition ? 1.0 : 0.0, 0.0));
    rep.checks.push_back(make_check("compactness_below_unity", sol.max_compactness, 1.0));
    if (sol.normalized) {
        const double E0 = sol.params.E0;
        const double res = (E0 > 0.0 && E0 < 1.0) ? 0.0 : 1.0;
        rep.checks.push_back(make_check("normalized_cutoff_in_unit_interval", res, 0.0));
    }
    return rep;
}

FamilyTrend l0_family_trend(const AnsatzParams& params, double center,
                            std::vector<double> L0_values, const SolverConfig& cfg) {
    for (double v : L0_values)
        if (!(v > 0.0)) throw DomainError("sweep L0 values must be positive");
    std::sort(L0_values.begin(), L0_values.end(), std::greater<>());
    for (std::size_t i = 0; i + 1 < L0_values.size(); ++i)
        if (L0_values[i] == L0_values[i + 1]) throw DomainError("duplicate sweep L0 value");
    if (L0_values.empty()) throw DomainError("sweep needs at least one L0 value");

    FamilyTrend trend;
    AnsatzParams base = params;
    base.L0 = 0.0;

    const bool newton = params.regime == Regime::newtonian;
    NewtonSolution base_n;
    EinsteinSolution base_r;
    if (newton) {
        base_n = solve_newton(base, center, cfg);
        if (base_n.profile.vacuum) throw InfeasibleCenterError("sweep base is vacuum");
        trend.base_R0 = base_n.R0;
        trend.base_M = base_n.M;
    } else {
        base_r = solve_einstein(base, center, cfg);
        if (base_r.profile.vacuum) throw InfeasibleCenterError("sweep base is vacuum");
        trend.base_R0 = base_r.R0;
        trend.base_M = base_r.M;
    }

    const int n_eval = 2001;
    for (double L0 : L0_values) {
        AnsatzParams p = params;
        p.L0 = L0;
        TrendRow row;
        row.L0 = L0;
        double d = 0.0;
        if (newton) {
            NewtonSolution s = solve_newton(p, center, cfg);
            row.Ri = s.Ri;
            row.Ri_closed = inner_radius_newton(p, center);
            row.R0 = s.R0;
            row.M = s.M;
            for (int i = 0; i < n_eval; ++i) {
                const double r = trend.base_R0 * i / (n_eval - 1);
                d = std::max(d, std::abs(s.potential(r) - base_n.potential(r)));
            }
        } else {
            EinsteinSolution s = solve_einstein(p, center, cfg);
            row.Ri = s.Ri;
            row.Ri_closed = inner_radius_rel(p, center);
            row.R0 = s.R0;
            row.M = s.M;
            for (int i = 0; i < n_eval; ++i) {
                const double r = trend.base_R0 * i / (n_eval - 1);
                d = std::max(d, std::abs(s.metric_mu(r) - base_r.metric_mu(r)));
            }
        }
        row.d = d;
        row.ratio = d / std::sqrt(L0);
        trend.rows.push_back(row);
    }

    double max_increase = 0.0, d_scale = 1e-300;
    for (const auto& row : trend.rows) d_scale = std::max(d_scale, row.d);
    for (std::size_t i = 0; i + 1 < trend.rows.size(); ++i)
        max_increase = std::max(max_increase, trend.rows[i + 1].d - trend.rows[i].d);
    trend.report.checks.push_back(
        make_check("l0_trend_monotone", std::max(0.0, max_increase) / d_scale, 1e-9));

    double ri_res = 0.0;
    for (const auto& row : trend.rows)
        ri_res = std::max(ri_res, std::abs(row.Ri - row.Ri_closed) / row.Ri_closed);
    trend.report.checks.push_back(make_check("inner_radius_closed_form", ri_res, 1e-8));

    if (newton) {
        trend.report.checks.push_back(
            make_check("l0_trend_smallest", trend.rows.back().d, 1e-4));
    } else {
        const double ratio0 = trend.rows.front().ratio;
        double worst = 0.0;
        for (const auto& row : trend.rows) worst = std::max(worst, row.ratio);
        trend.report.checks.push_back(
            make_check("l0_trend_sqrt_bound", worst / std::max(ratio0, 1e-300), 10.0));
    }
    return trend;
}

}  // namespace vshell
