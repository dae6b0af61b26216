#include "vortlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vortlab/fixtures.hpp"
#include "vortlab/ops.hpp"
#include "vortlab/poisson.hpp"

namespace vortlab {

namespace {

void require_full_storage(const Trajectory& traj, const char* where) {
  const std::size_t want = static_cast<std::size_t>(traj.nsteps) + 1;
  bool ok = traj.stored_steps.size() == want;
  if (ok)
    for (int k = 0; k <= traj.nsteps; ++k)
      if (traj.stored_steps[static_cast<std::size_t>(k)] != k) {
        ok = false;
        break;
      }
  if (!ok) {
    std::ostringstream os;
    os << "full-storage-required: " << where << " reads every time level; run with store = all";
    throw HarnessError(os.str());
  }
}

// Trapezoid integral of per-node values over the run's time span.
double trapz(const std::vector<double>& v, double dt) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t k = 1; k + 1 < v.size(); ++k) s += v[k];
  return s * dt;
}

double safe_ratio(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

}  // namespace

// --- energy balance -------------------------------------------------------

EnergyReport energy_identity_check(const Trajectory& traj) {
  require_full_storage(traj, "energy_identity_check");
  EnergyReport rep;
  rep.residual.reserve(static_cast<std::size_t>(traj.nsteps));
  double sum = 0.0;
  for (int n = 0; n < traj.nsteps; ++n) {
    const ScalarField& prev = traj.omega_at(n);
    const ScalarField& next = traj.omega_at(n + 1);
    ScalarField mid(prev.grid);
    for (std::size_t k = 0; k < mid.v.size(); ++k) mid.v[k] = 0.5 * (prev.v[k] + next.v[k]);
    const double l2p = traj.rows[static_cast<std::size_t>(n)].omega_l2;
    const double l2n = traj.rows[static_cast<std::size_t>(n) + 1].omega_l2;
    const double r = 0.5 * (l2n * l2n - l2p * l2p) / traj.dt + edge_gradient_energy(mid);
    rep.residual.push_back(r);
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
    sum += std::abs(r);
  }
  rep.mean_abs = traj.nsteps > 0 ? sum / traj.nsteps : 0.0;
  return rep;
}

// --- a priori bounds ------------------------------------------------------

bool LemmaReport::hard_ok() const {
  for (const LemmaRow& r : rows)
    if (r.hard && !r.satisfied) return false;
  return true;
}

LemmaReport lemma_bounds_check(const Trajectory& traj) {
  require_full_storage(traj, "lemma_bounds_check");
  const std::size_t nn = traj.rows.size();
  const double w0 = traj.rows[0].omega_l2;
  const double t_end = traj.rows.back().t;
  const double mt = std::max(std::sqrt(t_end), 1.0);
  const double mt_lin = std::max(t_end, 1.0);

  std::vector<double> grad_sq(nn), uh2_sq(nn), h_sq(nn), l4_sq(nn);
  double sup_l2 = 0.0, sup_uh1 = 0.0;
  for (std::size_t k = 0; k < nn; ++k) {
    const StepRecord& r = traj.rows[k];
    sup_l2 = std::max(sup_l2, r.omega_l2);
    sup_uh1 = std::max(sup_uh1, r.u_h1);
    grad_sq[k] = r.grad_omega_l2 * r.grad_omega_l2;
    uh2_sq[k] = r.u_h2 * r.u_h2;
    h_sq[k] = r.h * r.h;
    l4_sq[k] = r.omega_l4 * r.omega_l4;
  }

  // Time-derivative and pressure-gradient terms from the stored fields:
  // du/dt on interval midpoints, grad p on nodes.
  std::vector<double> gradp_sq(nn);
  double dtu_sq = 0.0;
  VectorField u_prev = velocity_of(traj.omega_at(0));
  gradp_sq[0] = [&] {
    const double gp = norm_spatial(recover_pressure(u_prev).f, NormKind::GradL2);
    return gp * gp;
  }();
  for (int k = 1; k <= traj.nsteps; ++k) {
    const VectorField u = velocity_of(traj.omega_at(k));
    VectorField du(u.grid);
    for (std::size_t i = 0; i < du.u1.size(); ++i) {
      du.u1[i] = (u.u1[i] - u_prev.u1[i]) / traj.dt;
      du.u2[i] = (u.u2[i] - u_prev.u2[i]) / traj.dt;
    }
    const double dn = norm_spatial(du, NormKind::L2);
    dtu_sq += traj.dt * dn * dn;
    const double gp = norm_spatial(recover_pressure(u).f, NormKind::GradL2);
    gradp_sq[static_cast<std::size_t>(k)] = gp * gp;
    u_prev = u;
  }

  LemmaReport rep;
  const auto add = [&rep](const std::string& name, double lhs, double rhs, bool hard) {
    LemmaRow row;
    row.name = name;
    row.lhs = lhs;
    row.rhs = rhs;
    row.ratio = safe_ratio(lhs, rhs);
    row.hard = hard;
    row.satisfied = hard ? lhs <= rhs : std::isfinite(row.ratio);
    rep.rows.push_back(row);
  };

  add("omega-sup-l2", sup_l2, w0 * (1.0 + 1e-8), true);
  add("grad-omega-l2l2", std::sqrt(trapz(grad_sq, traj.dt)), (1.0 / std::sqrt(2.0)) * w0 * 1.05,
      true);
  add("u-sup-h1", sup_uh1, w0, false);
  add("u-l2h2", std::sqrt(trapz(uh2_sq, traj.dt)), mt * w0, false);
  add("dtu-gradp-l2l2", std::sqrt(dtu_sq) + std::sqrt(trapz(gradp_sq, traj.dt)),
      mt * (w0 * w0 + w0), false);
  add("h-l2", std::sqrt(trapz(h_sq, traj.dt)), mt * w0, false);
  add("omega-l4-sq", trapz(l4_sq, traj.dt), mt_lin * w0 * w0, false);
  return rep;
}

// --- decay rate -----------------------------------------------------------

DecayReport decay_fit(const Trajectory& traj) {
  const double t_end = traj.rows.back().t;
  const double t_lo = 0.5 * t_end - 1e-12;
  const double area = traj.grid.area();
  const double floor = 1e-13 * (1.0 + traj.rows[0].omega_l2);

  // Centering on the stored field avoids the cancellation the norm-level
  // formula |w|^2 - mean^2 |O| suffers once the centered part is small.
  const auto centered = [&](int step) {
    const StepRecord& r = traj.rows[static_cast<std::size_t>(step)];
    if (traj.has_field(step)) {
      ScalarField d = traj.omega_at(step);
      for (double& v : d.v) v -= r.mean_omega;
      return norm_spatial(d, NormKind::L2);
    }
    const double c2 = r.omega_l2 * r.omega_l2 - r.mean_omega * r.mean_omega * area;
    return std::sqrt(std::max(c2, 0.0));
  };

  std::vector<double> ts, cs;
  for (int step = 0; step <= traj.nsteps; ++step) {
    const StepRecord& r = traj.rows[static_cast<std::size_t>(step)];
    if (r.t < t_lo) continue;
    ts.push_back(r.t);
    cs.push_back(centered(step));
  }
  DecayReport rep;
  rep.samples = static_cast<int>(ts.size());
  if (rep.samples < 10) {
    std::ostringstream os;
    os << "insufficient-samples: the window [T/2, T] holds " << rep.samples
       << " rows, need at least 10";
    throw HarnessError(os.str());
  }
  if (*std::min_element(cs.begin(), cs.end()) <= floor) {
    rep.degenerate = true;
    return rep;
  }

  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(rep.samples);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mx += ts[k];
    my += std::log(cs[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dx = ts[k] - mx, dy = std::log(cs[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  rep.lambda_fit = -slope;
  rep.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return rep;
}

// --- Poincare constant ----------------------------------------------------

double poincare_estimate(const Grid& g) {
  const NeumannSolver solver(g);
  const BoundaryTrace no_flux = BoundaryTrace::zero(g);

  // Deterministic start with overlap on the lowest modes in both directions.
  ScalarField v = sample(g, [&](double x, double y) {
    return (x - 0.5 * g.lx) + 0.3 * (y - 0.5 * g.ly);
  });
  const double m0 = mean(v);
  for (double& a : v.v) a -= m0;

  double mu = 0.0;
  for (int it = 0; it < 200; ++it) {
    const ScalarField w = solver.solve(v, no_flux).f;
    double vw = 0.0, ww = 0.0;
    for (std::size_t k = 0; k < w.v.size(); ++k) {
      vw += v.v[k] * w.v[k];
      ww += w.v[k] * w.v[k];
    }
    if (!(ww > 0.0)) throw SolverError("eigensolver-nonconvergence: iterate collapsed to zero");
    const double mu_new = vw / ww;
    const double scale = 1.0 / std::sqrt(ww);
    for (std::size_t k = 0; k < w.v.size(); ++k) v.v[k] = w.v[k] * scale;
    if (it > 0 && std::abs(mu_new - mu) <= 1e-8 * std::abs(mu_new)) return mu_new;
    mu = mu_new;
  }
  throw SolverError(
      "eigensolver-nonconvergence: inverse iteration did not reach relative 1e-8 in 200 steps");
}

// --- elliptic constants ---------------------------------------------------

EllipticProbe elliptic_constant_probe(const Grid& g, int n_samples, unsigned long seed) {
  if (n_samples < 1) throw ConfigError("bad-sample-count: n_samples must be at least 1");
  const int mode_cap = std::min(6, std::min(g.nx, g.ny) - 2);
  EllipticProbe probe;
  double sum1 = 0.0, sum2 = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::ostringstream name;
    name << "random-stream:" << seed + static_cast<unsigned long>(s) << "," << mode_cap;
    const ScalarField omega = make_fixture(g, name.str());
    const double wl2 = norm_spatial(omega, NormKind::L2);
    const double wh1 = norm_spatial(omega, NormKind::H1);
    if (wl2 <= 0.0 || wh1 <= 0.0) continue;
    const VectorField u = velocity_of(omega);
    const double r1 = norm_spatial(u, NormKind::H1) / wl2;
    const double r2 = norm_spatial(u, NormKind::H2) / wh1;
    probe.samples_used += 1;
    probe.max_u_h1_over_omega_l2 = std::max(probe.max_u_h1_over_omega_l2, r1);
    probe.max_u_h2_over_omega_h1 = std::max(probe.max_u_h2_over_omega_h1, r2);
    sum1 += r1;
    sum2 += r2;
  }
  if (probe.samples_used > 0) {
    probe.mean_u_h1_over_omega_l2 = sum1 / probe.samples_used;
    probe.mean_u_h2_over_omega_h1 = sum2 / probe.samples_used;
  }
  return probe;
}

// --- stability of the recovery map ----------------------------------------

StabilityReport stability_pair(const ScalarField& omega01, const ScalarField& omega02,
                               const SolverConfig& cfg) {
  require_same_grid(omega01.grid, omega02.grid, "stability_pair");
  require_same_grid(omega01.grid, cfg.grid, "stability_pair");
  SolverConfig run = cfg;
  run.store = StoreFields::All;
  run.track_pressure = false;

  StabilityReport rep;
  rep.mean_target_1 = mean(omega01);
  rep.mean_target_2 = mean(omega02);
  const InverseResult r1 = recover_projection(omega01, rep.mean_target_1, run);
  const InverseResult r2 = recover_projection(omega02, rep.mean_target_2, run);

  ScalarField d0 = omega01;
  d0 -= omega02;
  rep.d_omega0_l2 = norm_spatial(d0, NormKind::L2);
  rep.m_bound = std::max(norm_spatial(omega01, NormKind::L2),
                         norm_spatial(omega02, NormKind::L2));
  rep.degenerate = rep.d_omega0_l2 <= 1e-14 * (1.0 + rep.m_bound);

  const std::size_t nn = static_cast<std::size_t>(run.nsteps) + 1;
  std::vector<double> dp_sq(nn), dgw_sq(nn), dh_sq(nn);
  for (int k = 0; k <= run.nsteps; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const ScalarField& w1 = r1.trajectory.omega_at(k);
    const ScalarField& w2 = r2.trajectory.omega_at(k);
    ScalarField dw = w1;
    dw -= w2;
    rep.domega_linf_l2 = std::max(rep.domega_linf_l2, norm_spatial(dw, NormKind::L2));
    const double gw = norm_spatial(dw, NormKind::GradL2);
    dgw_sq[ks] = gw * gw;

    const VectorField u1 = velocity_of(w1, run.poisson_tol);
    const VectorField u2 = velocity_of(w2, run.poisson_tol);
    VectorField du(u1.grid);
    for (std::size_t i = 0; i < du.u1.size(); ++i) {
      du.u1[i] = u1.u1[i] - u2.u1[i];
      du.u2[i] = u1.u2[i] - u2.u2[i];
    }
    rep.du_linf_h1 = std::max(rep.du_linf_h1, norm_spatial(du, NormKind::H1));

    ScalarField dp = recover_pressure(u1, run.poisson_tol).f;
    dp -= recover_pressure(u2, run.poisson_tol).f;
    const double ph1 = norm_spatial(dp, NormKind::H1);
    dp_sq[ks] = ph1 * ph1;

    const double dh = r1.h.values[ks] - r2.h.values[ks];
    dh_sq[ks] = dh * dh;
  }
  rep.dp_l2_h1 = std::sqrt(trapz(dp_sq, run.dt));
  rep.dgrad_omega_l2l2 = std::sqrt(trapz(dgw_sq, run.dt));
  rep.dh_l2 = std::sqrt(trapz(dh_sq, run.dt));
  rep.ratio = rep.degenerate
                  ? 0.0
                  : (rep.du_linf_h1 + rep.dp_l2_h1 + rep.dh_l2) / rep.d_omega0_l2;
  return rep;
}

}  // namespace vortlab
