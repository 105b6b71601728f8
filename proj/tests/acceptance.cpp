// End-to-end acceptance runs: one line per criterion, nonzero exit unless
// every criterion holds. Tolerances are fixed here and are not tunable.

#include <sys/wait.h>

#include <array>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "vshell/einstein.hpp"
#include "vshell/io.hpp"
#include "vshell/newton.hpp"
#include "vshell/verify.hpp"

using namespace vshell;
namespace fs = std::filesystem;

namespace {

int criteria_passed = 0;
int criteria_total = 0;

void criterion(const char* name, const std::function<bool(std::string&)>& fn) {
  ++criteria_total;
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  criteria_passed += ok ? 1 : 0;
  std::printf("criterion %2d %s  %s%s%s\n", criteria_total, ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : "  -- ", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

AnsatzParams make_params(Regime regime, double k, double l, double c0, double E0, double L0) {
  AnsatzParams p;
  p.regime = regime;
  p.k = k;
  p.l = l;
  p.c0 = c0;
  p.E0 = E0;
  p.L0 = L0;
  return p;
}

const NewtonSolution& newton_ball() {
  static const NewtonSolution sol =
      solve_newton(make_params(Regime::newtonian, 0, 0, 1.0, -1.0, 0.0), -2.0, SolverConfig{});
  return sol;
}

const NewtonSolution& newton_shell() {
  static const NewtonSolution sol = solve_newton(
      make_params(Regime::newtonian, 0.5, 0.25, 0.8, -1.0, 0.3), -2.0, SolverConfig{});
  return sol;
}

const EinsteinSolution& rel_ball() {
  static const EinsteinSolution sol = solve_einstein(
      make_params(Regime::relativistic, 0, 0, 0.1, 0.95, 0.0), -0.3, SolverConfig{});
  return sol;
}

const EinsteinSolution& rel_shell() {
  static const EinsteinSolution sol = solve_einstein(
      make_params(Regime::relativistic, 0.5, 0.25, 0.05, 0.95, 0.05), -0.3, SolverConfig{});
  return sol;
}

double beta_quad(double a, double b) {
  boost::math::quadrature::tanh_sinh<double> quad;
  // two-argument form: tc is the signed complement to the nearest endpoint,
  // which avoids the 1 - t cancellation that otherwise caps accuracy at 1e-8
  return quad.integrate(
      [&](double t, double tc) {
        const double lo = tc < 0 ? -tc : t;
        const double hi = tc < 0 ? 1.0 - t : tc;
        return std::pow(lo, a - 1.0) * std::pow(hi, b - 1.0);
      },
      0.0, 1.0, 1e-15);
}

struct CmdResult {
  int code = -1;
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SHELLCTL_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

bool all_below(const ValidationReport& rep, std::string& detail) {
  double worst = 0.0;
  std::string worst_name = "-";
  for (const auto& c : rep.checks) {
    if (!c.pass) {
      detail = c.name + " residual " + fmt(c.max_residual) + " over " + fmt(c.tolerance);
      return false;
    }
    if (c.tolerance > 0.0 && c.max_residual / c.tolerance > worst) {
      worst = c.max_residual / c.tolerance;
      worst_name = c.name;
    }
  }
  detail = "tightest margin " + worst_name + " at " + fmt(worst) + " of tolerance";
  return true;
}

}  // namespace

int main() {
  const std::array<std::array<double, 2>, 4> kl_pairs = {
      {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.5, 0.25}}};

  criterion("reduced kernels match the velocity-space quadrature", [&](std::string& detail) {
    double worst = 0.0;
    int points = 0;
    for (const auto& pair : kl_pairs) {
      const auto pn =
          make_params(Regime::newtonian, pair[0], pair[1], 0.7, -0.5, 0.1);
      for (int i = 0; i < 5; ++i) {
        const double r = 0.8 + 0.3 * i, U = -1.5 + 0.1 * i;
        const double impl = source_newton(r, U, pn);
        const double oracle = velocity_space_oracle_newton(r, U, pn);
        worst = std::max(worst, std::abs(impl - oracle) / std::abs(oracle));
        ++points;
      }
      const auto pr = make_params(Regime::relativistic, pair[0], pair[1], 0.7, 1.1, 0.1);
      for (int i = 0; i < 5; ++i) {
        const double r = 0.8 + 0.3 * i, mu = -0.4 + 0.06 * i;
        const MatterSources impl = source_rel(r, mu, pr);
        const MatterSources oracle = velocity_space_oracle_rel(r, mu, pr);
        worst = std::max(worst, std::abs(impl.rho - oracle.rho) / std::abs(oracle.rho));
        worst = std::max(worst, std::abs(impl.p - oracle.p) / std::abs(oracle.p));
        ++points;
      }
    }
    detail = std::to_string(points) + " points, worst relative gap " + fmt(worst);
    return worst <= 1e-6;
  });

  criterion("ansatz constants match direct quadrature", [&](std::string& detail) {
    const std::array<std::array<double, 2>, 5> pairs = {
        {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, -0.25}}};
    double worst = 0.0;
    for (const auto& pair : pairs) {
      const double k = pair[0], l = pair[1];
      const double b1 = beta_quad(l + 1.0, 0.5);
      const double b2 = beta_quad(l + 1.5, k + 1.0);
      const double ckl_quad = std::pow(2.0, l + 1.5) * std::numbers::pi * b1 * b2;
      const double cl_quad = 2.0 * std::numbers::pi * b1;
      worst = std::max(worst,
                       std::abs(ckl_quad - beta_const_newton(k, l)) / beta_const_newton(k, l));
      worst = std::max(worst, std::abs(cl_quad - beta_const_rel(l)) / beta_const_rel(l));
    }
    detail = "worst relative gap " + fmt(worst);
    return worst <= 1e-10;
  });

  criterion("field-equation residuals below 1e-6 on all models", [&](std::string& detail) {
    ValidationReport rep = field_residuals(newton_ball());
    rep.merge(field_residuals(newton_shell()));
    rep.merge(field_residuals(rel_ball()));
    rep.merge(field_residuals(rel_shell()));
    return all_below(rep, detail);
  });

  criterion("annulus support structure and closed-form inner radius", [&](std::string& detail) {
    const auto& ns = newton_shell();
    const auto& rs = rel_shell();
    const double ri_n = inner_radius_newton(ns.params, ns.Uc);
    const double ri_r = inner_radius_rel(rs.params, rs.mu_c);
    const double gap_n = std::abs(ns.Ri - ri_n) / ri_n;
    const double gap_r = std::abs(rs.Ri - ri_r) / ri_r;
    if (gap_n > 1e-8 || gap_r > 1e-8) {
      detail = "inner radius gap " + fmt(std::max(gap_n, gap_r));
      return false;
    }
    for (std::size_t j = 0; j < ns.profile.r.size(); ++j)
      if (ns.profile.r[j] <= ns.Ri && ns.profile.rho[j] != 0.0) {
        detail = "matter inside the inner radius";
        return false;
      }
    for (std::size_t j = 0; j < rs.profile.r.size(); ++j)
      if (rs.profile.r[j] <= rs.Ri && rs.profile.rho[j] != 0.0) {
        detail = "matter inside the inner radius";
        return false;
      }
    if (!ns.single_shell) {
      detail = "single-shell certificate failed";
      return false;
    }
    if (!rs.supports_match) {
      detail = "density and pressure supports differ";
      return false;
    }
    ValidationReport rep = shell_structure_check(ns);
    rep.merge(shell_structure_check(rs));
    return all_below(rep, detail);
  });

  criterion("scaling maps and target prescriptions", [&](std::string& detail) {
    const double lam = 1.7, gam = 0.6;
    NewtonSolution scaled = newton_shell();
    rescale_newton(scaled, lam, gam);
    const auto& base = newton_shell();
    const double m_closed =
        std::abs(scaled.M - base.M * lam * lam / (gam * gam * gam)) / scaled.M;
    const double r_closed = std::abs(scaled.R0 - base.R0 / gam) / scaled.R0;
    if (m_closed > 1e-12 || r_closed > 1e-12) {
      detail = "closed-form scaling gap " + fmt(std::max(m_closed, r_closed));
      return false;
    }
    AnsatzParams mapped = base.params;
    const double kk = mapped.k, ll = mapped.l;
    mapped.c0 *= std::pow(gam, 3.0 + 2.0 * kk + 4.0 * ll) *
                 std::pow(lam, -(1.0 + 2.0 * kk + 2.0 * ll));
    mapped.E0 *= lam * lam / (gam * gam);
    mapped.L0 *= lam * lam / (gam * gam * gam * gam);
    const auto resolved = solve_newton(mapped, base.Uc * lam * lam / (gam * gam),
                                       SolverConfig{});
    double worst = std::abs(resolved.M - scaled.M) / scaled.M;
    worst = std::max(worst, std::abs(resolved.R0 - scaled.R0) / scaled.R0);
    worst = std::max(worst, std::abs(resolved.Ri - scaled.Ri) / scaled.Ri);
    for (int i = 0; i <= 200; ++i) {
      const double r = scaled.R0 * i / 200.0;
      worst = std::max(worst, std::abs(resolved.potential(r) - scaled.potential(r)) /
                                  std::abs(scaled.Uc));
    }
    if (worst > 1e-6) {
      detail = "flat-space re-solve gap " + fmt(worst);
      return false;
    }

    const double a = 1.8;
    EinsteinSolution rscaled = rel_shell();
    rescale_rel(rscaled, a);
    const auto& rbase = rel_shell();
    if (std::abs(rscaled.M - rbase.M / a) / rscaled.M > 1e-12 ||
        std::abs(rscaled.R0 - rbase.R0 / a) / rscaled.R0 > 1e-12) {
      detail = "curved-space closed-form scaling gap";
      return false;
    }
    AnsatzParams rmapped = rbase.params;
    rmapped.c0 *= std::pow(a, 2.0 + 2.0 * rmapped.l);
    rmapped.L0 /= a * a;
    const auto rresolved = solve_einstein(rmapped, rbase.mu_c, SolverConfig{});
    double rworst = std::abs(rresolved.M - rscaled.M) / rscaled.M;
    rworst = std::max(rworst, std::abs(rresolved.R0 - rscaled.R0) / rscaled.R0);
    rworst = std::max(rworst, std::abs(rresolved.Ri - rscaled.Ri) / rscaled.Ri);
    if (rworst > 1e-6) {
      detail = "curved-space re-solve gap " + fmt(rworst);
      return false;
    }

    double tworst = 0.0;
    {
      NewtonTargets t;
      t.M = 2.5;
      t.R0 = 1.2;
      const auto hit = solve_for_targets_newton(newton_shell().params, -2.0, t, SolverConfig{});
      tworst = std::max(tworst, std::abs(hit.M - t.M) / t.M);
      tworst = std::max(tworst, std::abs(hit.R0 - t.R0) / t.R0);
    }
    {
      NewtonTargets t;
      t.M = 0.7;
      t.Ri = 0.4;
      const auto hit = solve_for_targets_newton(newton_shell().params, -2.0, t, SolverConfig{});
      tworst = std::max(tworst, std::abs(hit.M - t.M) / t.M);
      tworst = std::max(tworst, std::abs(hit.Ri - t.Ri) / t.Ri);
    }
    {
      const auto hit = solve_for_target_rel(rel_shell().params, -0.3, RelTargetKind::mass, 0.3,
                                            SolverConfig{});
      tworst = std::max(tworst, std::abs(hit.M - 0.3) / 0.3);
    }
    {
      const auto hit = solve_for_target_rel(rel_shell().params, -0.3,
                                            RelTargetKind::outer_radius, 2.0, SolverConfig{});
      tworst = std::max(tworst, std::abs(hit.R0 - 2.0) / 2.0);
    }
    {
      const auto hit = solve_for_target_rel(rel_shell().params, -0.3,
                                            RelTargetKind::inner_radius, 0.2, SolverConfig{});
      tworst = std::max(tworst, std::abs(hit.Ri - 0.2) / 0.2);
    }
    if (tworst > 1e-8) {
      detail = "target prescription gap " + fmt(tworst);
      return false;
    }
    detail = "worst target gap " + fmt(tworst);
    return true;
  });

  criterion("orbit invariants conserved over 50 radial periods", [&](std::string& detail) {
    const auto sn = default_orbit_samples(newton_shell());
    ValidationReport rep = characteristic_drift(newton_shell(), sn, 50);
    const auto sr = default_orbit_samples(rel_shell());
    rep.merge(characteristic_drift(rel_shell(), sr, 50));
    if (sn.size() < 10 || sr.size() < 10) {
      detail = "fewer than 10 orbit samples";
      return false;
    }
    return all_below(rep, detail);
  });

  criterion("vanishing angular-momentum floor recovers the ball", [&](std::string& detail) {
    SolverConfig cfg;
    cfg.output_grid_size = 2048;
    const std::vector<double> floors = {1e-1, 1e-2, 1e-3, 1e-4};
    const auto tn = l0_family_trend(
        make_params(Regime::newtonian, 0, 0, std::sqrt(1e-3), -1e-3, 0.0), -2e-3, floors, cfg);
    for (std::size_t i = 0; i + 1 < tn.rows.size(); ++i)
      if (tn.rows[i + 1].d > tn.rows[i].d) {
        detail = "flat-space distance not non-increasing";
        return false;
      }
    if (tn.rows.back().d > 1e-4) {
      detail = "flat-space distance at the smallest floor " + fmt(tn.rows.back().d);
      return false;
    }
    if (!tn.report.all_pass()) {
      detail = "flat-space trend checks failed";
      return false;
    }
    const auto tr = l0_family_trend(make_params(Regime::relativistic, 0, 0, 0.1, 0.95, 0.0),
                                    -0.3, floors, cfg);
    double ratio_max = 0.0;
    for (const auto& row : tr.rows) ratio_max = std::max(ratio_max, row.ratio);
    if (!tr.report.all_pass()) {
      detail = "curved-space trend checks failed";
      return false;
    }
    detail = "smallest-floor distance " + fmt(tn.rows.back().d) + ", ratio bound " +
             fmt(ratio_max);
    return true;
  });

  criterion("normalized exteriors match the vacuum closed forms", [&](std::string& detail) {
    NewtonSolution ns = newton_shell();
    normalize_potential(ns);
    double worst = 0.0;
    for (std::size_t j = 0; j < ns.profile.r.size(); ++j) {
      const double r = ns.profile.r[j];
      if (r <= ns.R0) continue;
      worst = std::max(worst, std::abs(ns.profile.U[j] + ns.M / r) / std::abs(ns.Uc));
    }
    EinsteinSolution rs = rel_shell();
    normalize_mu(rs);
    for (std::size_t j = 0; j < rs.profile.r.size(); ++j) {
      const double r = rs.profile.r[j];
      if (r <= rs.R0) continue;
      worst = std::max(worst,
                       std::abs(rs.profile.mu[j] - 0.5 * std::log1p(-2.0 * rs.M / r)));
      worst = std::max(worst, std::abs(std::exp(-2.0 * rs.profile.lambda[j]) -
                                       (1.0 - 2.0 * rs.M / r)));
    }
    worst = std::max(worst, std::abs(rs.profile.lambda[0]));
    detail = "worst exterior gap " + fmt(worst);
    return worst <= 1e-10;
  });

  criterion("isotropic balls have non-increasing density", [&](std::string& detail) {
    const auto& nb = newton_ball().profile;
    const auto& rb = rel_ball().profile;
    const double slack_n = 1e-14 * nb.rho[0];
    const double slack_r = 1e-14 * rb.rho[0];
    for (std::size_t j = 0; j + 1 < nb.r.size(); ++j)
      if (nb.rho[j + 1] > nb.rho[j] + slack_n) {
        detail = "flat-space density rises at r=" + fmt(nb.r[j + 1]);
        return false;
      }
    for (std::size_t j = 0; j + 1 < rb.r.size(); ++j)
      if (rb.rho[j + 1] > rb.rho[j] + slack_r) {
        detail = "curved-space density rises at r=" + fmt(rb.r[j + 1]);
        return false;
      }
    detail = "all grid nodes monotone";
    return true;
  });

  criterion("fixed-step integrator cross-check at 10x resolution", [&](std::string& detail) {
    double worst = 0.0;
    {
      const auto& sol = newton_shell();
      const auto& pr = sol.profile;
      std::size_t j0 = 0;
      while (j0 + 1 < pr.r.size() && pr.r[j0 + 1] <= sol.Ri) ++j0;
      std::array<double, 2> y = {pr.U[j0], pr.m[j0]};
      auto rhs = [&](double r, const std::array<double, 2>& s, std::array<double, 2>& d) {
        d[0] = r > 0.0 ? s[1] / (r * r) : 0.0;
        d[1] = 4.0 * std::numbers::pi * r * r * source_newton(r, s[0], sol.params);
      };
      for (std::size_t j = j0 + 1; j < pr.r.size() && pr.r[j] <= sol.R0; ++j) {
        y = oracles::rk4(rhs, pr.r[j - 1], y, pr.r[j], 10);
        worst = std::max(worst, std::abs(y[0] - pr.U[j]) / std::abs(sol.Uc));
        worst = std::max(worst, std::abs(y[1] - pr.m[j]) / sol.M);
      }
    }
    {
      const auto& sol = rel_shell();
      const auto& pr = sol.profile;
      std::size_t j0 = 0;
      while (j0 + 1 < pr.r.size() && pr.r[j0 + 1] <= sol.Ri) ++j0;
      std::array<double, 2> y = {pr.mu[j0], pr.m[j0]};
      auto rhs = [&](double r, const std::array<double, 2>& s, std::array<double, 2>& d) {
        const MatterSources src = source_rel(r, s[0], sol.params, 1e-11);
        const double one_minus = 1.0 - 2.0 * s[1] / r;
        d[0] = (4.0 * std::numbers::pi * r * src.p + s[1] / (r * r)) / one_minus;
        d[1] = 4.0 * std::numbers::pi * r * r * src.rho;
      };
      for (std::size_t j = j0 + 1; j < pr.r.size() && pr.r[j] <= sol.R0; ++j) {
        y = oracles::rk4(rhs, pr.r[j - 1], y, pr.r[j], 10);
        worst = std::max(worst, std::abs(y[0] - pr.mu[j]) / std::abs(sol.mu_c));
        worst = std::max(worst, std::abs(y[1] - pr.m[j]) / sol.M);
      }
    }
    detail = "sup-norm gap " + fmt(worst);
    return worst <= 1e-8;
  });

  criterion("single-node density corruption is caught and located", [&](std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "vshell_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "run.json");
      cfg << R"({"regime": "newtonian",
                 "ansatz": {"k": 0.5, "l": 0.25, "c0": 0.8, "E0": -1.0, "L0": 0.3},
                 "center": -2.0,
                 "solver": {"output_grid_size": 1024}})";
    }
    if (run_cli("solve --config " + (dir / "run.json").string() + " --out " + dir.string())
            .code != 0) {
      detail = "reference solve failed";
      return false;
    }
    auto loaded = load_solution(dir / "profile.tsv", dir / "summary.json");
    auto& prof = loaded.newton.profile;
    const double r_target = loaded.newton.Ri + 0.4 * (loaded.newton.R0 - loaded.newton.Ri);
    std::size_t jt = 0;
    while (jt + 1 < prof.r.size() && prof.r[jt] < r_target) ++jt;
    prof.rho[jt] *= 1.10;
    write_newton_profile(dir / "profile.tsv", prof);

    const auto res = run_cli("validate --in " + dir.string() + " --checks fields");
    if (res.code != 5) {
      detail = "validate exit code " + std::to_string(res.code) + ", expected 5";
      return false;
    }
    std::ifstream in(dir / "report.json");
    const auto rep = nlohmann::ordered_json::parse(in);
    for (const auto& c : rep.at("checks")) {
      if (c.at("name").get<std::string>() != "poisson_fd") continue;
      if (c.at("pass").get<bool>()) {
        detail = "field residual check did not flag the corruption";
        return false;
      }
      const auto& locs = c.at("locations");
      if (locs.empty()) {
        detail = "no offending radius reported";
        return false;
      }
      const double dr = prof.r[1] - prof.r[0];
      const double reported = locs[0].get<double>();
      if (std::abs(reported - prof.r[jt]) > 2.5 * dr) {
        detail = "reported radius " + fmt(reported) + " far from corrupted node " +
                 fmt(prof.r[jt]);
        return false;
      }
      detail = "flagged at r=" + fmt(reported) + ", corrupted node r=" + fmt(prof.r[jt]);
      return true;
    }
    detail = "field residual check missing from the report";
    return false;
  });

  std::printf("ACCEPTANCE: %d/%d criteria passed\n", criteria_passed, criteria_total);
  return criteria_passed == criteria_total ? 0 : 1;
}
