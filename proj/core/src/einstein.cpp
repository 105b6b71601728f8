#include "vshell/einstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vshell/dopri5.hpp"

namespace vshell {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;
}

double inner_radius_rel(const AnsatzParams& params, double mu_c) {
    if (params.regime != Regime::relativistic)
        throw DomainError("inner_radius_rel needs relativistic params");
    params.validate();
    const double denom = params.E0 * params.E0 * std::exp(-2.0 * mu_c) - 1.0;
    if (!(denom > 0.0))
        throw InfeasibleCenterError("center redshift at or above the cutoff");
    if (params.L0 == 0.0) return 0.0;
    return std::sqrt(params.L0 / denom);
}

namespace {

struct CenterKernels {
    double rho_coeff = 0.0;  // rho ~ rho_coeff * r^{2l} near the center (L0 = 0)
    double p_coeff = 0.0;
};

CenterKernels center_kernels(const AnsatzParams& p, double mu_c, double quad_tol) {
    const double u = std::exp(mu_c);
    const double pref = std::exp(-(2.0 * p.l + 4.0) * mu_c);
    return {pref * g_rel(u, p, quad_tol), pref * h_rel(u, p, quad_tol)};
}

double center_density_rel(const AnsatzParams& p, const CenterKernels& ck, bool pressure) {
    if (p.L0 > 0.0) return 0.0;
    if (p.l > 0.0) return 0.0;
    if (p.l == 0.0) return pressure ? ck.p_coeff : ck.rho_coeff;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

EinsteinProfile integrate_einstein(const AnsatzParams& params, double mu_c,
                                   const SolverConfig& cfg) {
    if (params.regime != Regime::relativistic)
        throw DomainError("integrate_einstein needs relativistic params");
    params.validate();
    cfg.validate();

    EinsteinProfile prof;
    const int n = cfg.output_grid_size;

    if (!(std::exp(mu_c) < params.E0)) {
        prof.vacuum = true;
        prof.exterior_filled = true;
        prof.mu_outer = mu_c;
        prof.r.resize(n);
        prof.mu.assign(n, mu_c);
        prof.dmu.assign(n, 0.0);
        prof.lambda.assign(n, 0.0);
        prof.rho.assign(n, 0.0);
        prof.p.assign(n, 0.0);
        prof.m.assign(n, 0.0);
        for (int i = 0; i < n; ++i) prof.r[i] = static_cast<double>(i) / (n - 1);
        return prof;
    }

    const double quad_tol = cfg.rel_tol * cfg.kernel_tol_factor;
    const double r_pl = inner_radius_rel(params, mu_c);
    prof.plateau_radius = r_pl;

    double r_begin;
    OdeState<2> y0;
    CenterKernels ck;
    if (params.L0 > 0.0) {
        r_begin = r_pl;
        y0 = {mu_c, 0.0};
    } else {
        r_begin = cfg.start_radius;
        ck = center_kernels(params, mu_c, quad_tol);
        const double q = 3.0 + 2.0 * params.l;
        const double m0 = four_pi * ck.rho_coeff * std::pow(r_begin, q) / q;
        const double dmu_coeff = four_pi * (ck.p_coeff + ck.rho_coeff / q);
        y0 = {mu_c + dmu_coeff * std::pow(r_begin, q - 1.0) / (q - 1.0), m0};
    }

    auto rhs = [&params, &cfg, quad_tol](double r, const OdeState<2>& y, OdeState<2>& dy) {
        const double one_minus = 1.0 - 2.0 * y[1] / r;
        if (one_minus <= cfg.horizon_margin)
            throw HorizonError("2m/r reached 1 during integration");
        const MatterSources s = source_rel(r, y[0], params, quad_tol);
        dy[0] = (four_pi * r * s.p + y[1] / (r * r)) / one_minus;
        dy[1] = four_pi * r * r * s.rho;
    };
    UpwardCrossing<2> event;
    event.fn = [&params](double r, const OdeState<2>& y) {
        return std::exp(y[0]) * std::sqrt(1.0 + params.L0 / (r * r)) - params.E0;
    };
    event.subsamples = 16;
    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;

    auto ode = integrate_dopri5<2>(rhs, r_begin, y0, cfg.max_radius, opt, &event);
    if (ode.reason != StopReason::event)
        throw NoFiniteSupportError("particle energy never reached the cutoff before max_radius");

    const double R0 = ode.r_stop;
    prof.support_outer = R0;
    prof.mu_outer = ode.y_stop[0];
    prof.mass = ode.y_stop[1];

    const double r_max = cfg.outer_margin * R0;
    const double dr = r_max / (n - 1);
    prof.r.resize(n);
    prof.mu.assign(n, 0.0);
    prof.dmu.assign(n, 0.0);
    prof.lambda.assign(n, 0.0);
    prof.rho.assign(n, 0.0);
    prof.p.assign(n, 0.0);
    prof.m.assign(n, 0.0);
    const double q = 3.0 + 2.0 * params.l;
    for (int i = 0; i < n; ++i) {
        const double ri = dr * i;
        prof.r[i] = ri;
        if (ri > R0) continue;  // exterior nodes belong to vacuum_extend
        double mu_i, m_i;
        if (ri <= r_begin) {
            if (params.L0 > 0.0) {
                mu_i = mu_c;
                m_i = 0.0;
            } else {
                const double dmu_coeff = four_pi * (ck.p_coeff + ck.rho_coeff / q);
                mu_i = mu_c + dmu_coeff * std::pow(ri, q - 1.0) / (q - 1.0);
                m_i = four_pi * ck.rho_coeff * std::pow(ri, q) / q;
            }
        } else {
            mu_i = ode.dense.eval(0, ri);
            m_i = ode.dense.eval(1, ri);
        }
        prof.mu[i] = mu_i;
        prof.m[i] = m_i;
        if (ri > 0.0) {
            const double one_minus = 1.0 - 2.0 * m_i / ri;
            const MatterSources s = source_rel(ri, mu_i, params, quad_tol);
            prof.rho[i] = s.rho;
            prof.p[i] = s.p;
            prof.dmu[i] = (four_pi * ri * s.p + m_i / (ri * ri)) / one_minus;
            prof.lambda[i] = -0.5 * std::log1p(-2.0 * m_i / ri);
        } else {
            prof.rho[i] = center_density_rel(params, ck, false);
            prof.p[i] = center_density_rel(params, ck, true);
        }
    }
    double cmax = 2.0 * prof.mass / R0;
    for (int i = 1; i < n; ++i) {
        if (prof.r[i] > R0) break;
        cmax = std::max(cmax, 2.0 * prof.m[i] / prof.r[i]);
    }
    prof.max_compactness = cmax;
    return prof;
}

namespace {

bool vacuum_extend_profile(EinsteinProfile& prof, const AnsatzParams& params) {
    if (prof.vacuum) {
        prof.exterior_filled = true;
        return false;
    }
    const double R0 = prof.support_outer, M = prof.mass;
    const double ln_R0 = std::log1p(-2.0 * M / R0);
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
        const double ri = prof.r[i];
        if (ri <= R0) continue;
        const double ln_r = std::log1p(-2.0 * M / ri);
        prof.mu[i] = prof.mu_outer + 0.5 * (ln_r - ln_R0);
        prof.lambda[i] = -0.5 * ln_r;
        prof.dmu[i] = M / (ri * ri * (1.0 - 2.0 * M / ri));
        prof.m[i] = M;
        prof.rho[i] = 0.0;
        prof.p[i] = 0.0;
    }
    prof.exterior_filled = true;
    // would matter reappear outside R0 if the cutoff were consulted there?
    bool reignite = false;
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
        const double ri = prof.r[i];
        if (ri <= R0) continue;
        const double W =
            std::exp(prof.mu[i]) * std::sqrt(1.0 + params.L0 / (ri * ri)) - params.E0;
        if (W < -1e-12 * params.E0) reignite = true;
    }
    const double mu_inf = prof.mu_outer - 0.5 * ln_R0;
    if (std::exp(mu_inf) <= params.E0 * (1.0 - 1e-12)) reignite = true;
    return reignite;
}

}  // namespace

SupportInfo detect_support_rel(const EinsteinProfile& prof, const AnsatzParams& params) {
    if (prof.vacuum) throw DomainError("vacuum profile has no shell support");
    if (!prof.exterior_filled)
        throw DomainError("detect_support_rel needs the exterior filled first");
    SupportInfo info;
    info.inner = prof.plateau_radius;

    auto cutoff_gap = [&](double r) {
        const double mu = hermite_value(prof.r, prof.mu, prof.dmu, r);
        return std::exp(mu) * std::sqrt(1.0 + params.L0 / (r * r)) - params.E0;
    };

    const std::size_t n = prof.r.size();
    std::size_t lo_idx = 0;
    bool bracketed = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (prof.r[j] <= info.inner || prof.r[j] <= 0.0) continue;
        auto node_gap = [&](std::size_t idx) {
            return std::exp(prof.mu[idx]) *
                       std::sqrt(1.0 + params.L0 / (prof.r[idx] * prof.r[idx])) -
                   params.E0;
        };
        if (node_gap(j) < 0.0 && node_gap(j + 1) >= 0.0) {
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

    // structural check: the matter nodes form one contiguous block
    bool in_block = false, block_done = false, contiguous = true;
    for (std::size_t j = 0; j < n; ++j) {
        const bool matter = prof.rho[j] > 0.0;
        if (matter && block_done) contiguous = false;
        if (matter && !in_block) in_block = true;
        if (!matter && in_block) {
            in_block = false;
            block_done = true;
        }
    }
    info.single_shell = contiguous;
    return info;
}

double EinsteinSolution::metric_mu(double r) const {
    if (profile.vacuum) return mu_c;
    if (r <= profile.plateau_radius) return mu_c;
    if (r >= profile.r.back())
        return mu_outer + 0.5 * (std::log1p(-2.0 * M / r) - std::log1p(-2.0 * M / R0));
    return hermite_value(profile.r, profile.mu, profile.dmu, r);
}

double EinsteinSolution::metric_mu_deriv(double r) const {
    if (profile.vacuum) return 0.0;
    if (r <= profile.plateau_radius) return 0.0;
    if (r >= profile.r.back()) return M / (r * r * (1.0 - 2.0 * M / r));
    return hermite_derivative(profile.r, profile.mu, profile.dmu, r);
}

EinsteinSolution solve_einstein(const AnsatzParams& params, double mu_c,
                                const SolverConfig& cfg) {
    EinsteinSolution sol;
    sol.params = params;
    sol.mu_c = mu_c;
    sol.profile = integrate_einstein(params, mu_c, cfg);
    if (sol.profile.vacuum) {
        sol.mu_outer = mu_c;
        return sol;
    }
    sol.reignition = vacuum_extend_profile(sol.profile, params);
    const SupportInfo supp = detect_support_rel(sol.profile, params);
    sol.Ri = supp.inner;
    sol.R0 = sol.profile.support_outer;
    sol.M = sol.profile.mass;
    sol.mu_outer = sol.profile.mu_outer;
    sol.max_compactness = sol.profile.max_compactness;
    if (std::abs(supp.outer - sol.R0) > 1e-8 * sol.R0)
        throw NumericalError("support detection disagrees with the integration event");
    sol.supports_match = true;
    for (std::size_t j = 0; j < sol.profile.r.size(); ++j)
        if ((sol.profile.rho[j] > 0.0) != (sol.profile.p[j] > 0.0)) sol.supports_match = false;
    return sol;
}

void vacuum_extend(EinsteinSolution& sol) {
    sol.reignition = vacuum_extend_profile(sol.profile, sol.params);
}

void normalize_mu(EinsteinSolution& sol) {
    double shift;
    if (sol.profile.vacuum)
        shift = sol.mu_c;
    else
        shift = sol.mu_outer - 0.5 * std::log1p(-2.0 * sol.M / sol.R0);
    if (shift != 0.0) {
        for (auto& v : sol.profile.mu) v -= shift;
        sol.profile.mu_outer -= shift;
        sol.mu_outer -= shift;
        sol.mu_c -= shift;
        sol.params.E0 *= std::exp(-shift);
        sol.params.c0 *= std::exp(sol.params.k * shift);
    }
    sol.normalized = true;
}

double adm_mass(const EinsteinSolution& sol) { return sol.M; }

void rescale_rel(EinsteinSolution& sol, double a) {
    if (!(a > 0.0)) throw DomainError("scale factor must be positive");
    auto& pr = sol.profile;
    const double a2 = a * a;
    for (std::size_t i = 0; i < pr.r.size(); ++i) {
        pr.r[i] /= a;
        pr.dmu[i] *= a;
        pr.rho[i] *= a2;
        pr.p[i] *= a2;
        pr.m[i] /= a;
    }
    pr.plateau_radius /= a;
    pr.support_outer /= a;
    pr.mass /= a;
    sol.params.c0 *= std::pow(a, 2.0 + 2.0 * sol.params.l);
    sol.params.L0 /= a2;
    sol.Ri /= a;
    sol.R0 /= a;
    sol.M /= a;
}

EinsteinSolution solve_for_target_rel(const AnsatzParams& params, double mu_c,
                                      RelTargetKind kind, double value,
                                      const SolverConfig& cfg) {
    if (!(value > 0.0)) throw DomainError("target value must be positive");
    EinsteinSolution sol = solve_einstein(params, mu_c, cfg);
    if (sol.profile.vacuum)
        throw InfeasibleCenterError("vacuum template cannot be scaled to a target");
    normalize_mu(sol);
    double a;
    switch (kind) {
        case RelTargetKind::mass:
            a = sol.M / value;
            break;
        case RelTargetKind::outer_radius:
            a = sol.R0 / value;
            break;
        default:
            if (!(sol.Ri > 0.0)) throw DomainError("inner-radius target needs L0 > 0");
            a = sol.Ri / value;
            break;
    }
    rescale_rel(sol, a);
    return sol;
}

}  // namespace vshell
