#include "vortlab/forward.hpp"

#include <cmath>
#include <sstream>

#include "vortlab/ops.hpp"

namespace vortlab {

// --- Trajectory accessors -----------------------------------------------------

bool Trajectory::has_field(int step) const {
  for (int s : stored_steps)
    if (s == step) return true;
  return false;
}

const ScalarField& Trajectory::omega_at(int step) const {
  for (std::size_t k = 0; k < stored_steps.size(); ++k)
    if (stored_steps[k] == step) return omega_fields[k];
  std::ostringstream os;
  os << "field-not-stored: step " << step << " was not retained by the store policy";
  throw Error(os.str());
}

const ScalarField& Trajectory::final_omega() const { return omega_at(nsteps); }

// --- velocity recovery --------------------------------------------------------

ScalarField stream_function(const ScalarField& omega, double tol) {
  return poisson_dirichlet(omega, 0.0, tol);
}

VectorField velocity_from_stream(const ScalarField& psi) {
  const BoundaryTrace tr = trace_of(psi);
  double lo = tr.bottom[0], hi = tr.bottom[0], amax = 0.0;
  for (const auto* side : {&tr.bottom, &tr.top, &tr.left, &tr.right})
    for (double v : *side) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  for (double v : psi.v) amax = std::max(amax, std::abs(v));
  if (hi - lo > 1e-10 * (1.0 + amax)) {
    std::ostringstream os;
    os << "boundary-not-constant: stream function varies by " << hi - lo
       << " along the boundary";
    throw BoundaryError(os.str());
  }
  VectorField u(psi.grid);
  const VectorField gp = gradient(psi);
  for (std::size_t k = 0; k < u.u1.size(); ++k) {
    u.u1[k] = gp.u2[k];
    u.u2[k] = -gp.u1[k];
  }
  return u;
}

VectorField velocity_of(const ScalarField& omega, double tol) {
  return velocity_from_stream(stream_function(omega, tol));
}

// --- compatibility ------------------------------------------------------------

CompatibilityReport check_compatibility(const ScalarField& omega0, double h0,
                                        std::optional<double> mean_target, double tol) {
  CompatibilityReport rep;
  const BoundaryTrace tr = trace_of(omega0);
  for (const auto* side : {&tr.bottom, &tr.top, &tr.left, &tr.right})
    for (double v : *side) rep.trace_deviation = std::max(rep.trace_deviation, std::abs(v - h0));
  rep.trace_ok = rep.trace_deviation <= tol * (1.0 + std::abs(h0));
  if (mean_target) {
    rep.mean_checked = true;
    rep.mean_deviation = std::abs(mean(omega0) - *mean_target);
    rep.mean_ok = rep.mean_deviation <= tol * (1.0 + std::abs(*mean_target));
  }
  return rep;
}

namespace {

void require_trace(const ScalarField& omega0, double h0, double tol) {
  const CompatibilityReport rep = check_compatibility(omega0, h0, std::nullopt, tol);
  if (!rep.trace_ok) {
    std::ostringstream os;
    os << "incompatible-initial-data: trace of omega0 deviates from h(0) = " << h0 << " by "
       << rep.trace_deviation;
    throw CompatibilityError(os.str());
  }
}

}  // namespace

// --- one step -----------------------------------------------------------------

StepOperator::StepOperator(const Grid& g, double dt)
    : grid_(g), dt_(dt), solver_(g, 1.0 / dt, 0.5), response_(g), response_mean_(0.0) {
  ScalarField rhs(g);
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) rhs(i, j) = 1.0 / dt;
  const ScalarField s = solver_.solve(rhs);
  for (std::size_t k = 0; k < response_.v.size(); ++k) response_.v[k] = 1.0 - s.v[k];
  response_mean_ = mean(response_);
}

ScalarField StepOperator::base_step(const ScalarField& omega_n,
                                    const ScalarField& advection) const {
  require_same_grid(omega_n.grid, grid_, "step");
  const ScalarField lap = laplacian(omega_n);  // centered five-point inside
  ScalarField b(grid_);
  for (int j = 1; j + 1 < grid_.ny; ++j)
    for (int i = 1; i + 1 < grid_.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * grid_.nx + i;
      b.v[k] = omega_n.v[k] / dt_ + 0.5 * lap.v[k] - advection.v[k];
    }
  return solver_.solve(b);
}

ScalarField StepOperator::complete(const ScalarField& base, double h_next) const {
  ScalarField out = base;
  for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += h_next * response_.v[k];
  return out;
}

double StepOperator::project_h(const ScalarField& base, double mean_target) const {
  if (std::abs(response_mean_) < 1e-14)
    throw DegenerateResponseError(
        "degenerate-response: mean of the boundary response field is below 1e-14; "
        "the mean constraint cannot determine h");
  return (mean_target - mean(base)) / response_mean_;
}

namespace {

double advective_cfl(const VectorField& u, double dt) {
  const Grid& g = u.grid;
  return dt * (1.0 + norm_spatial(u, NormKind::Linf)) / std::min(g.dx, g.dy);
}

void require_cfl(const VectorField& u, double dt, double cfl_safety, int step) {
  const double cfl = advective_cfl(u, dt);
  if (cfl > cfl_safety) {
    std::ostringstream os;
    os << "cfl-violation: step " << step << " has advective number " << cfl
       << " above the ceiling " << cfl_safety;
    throw CflError(os.str());
  }
}

}  // namespace

ScalarField step_vorticity(const ScalarField& omega_n, const VectorField& u_n, double h_next,
                           double dt, double cfl_safety) {
  const Grid& g = omega_n.grid;
  require_same_grid(g, u_n.grid, "step_vorticity");
  require_cfl(u_n, dt, cfl_safety, 0);
  const ScalarField adv = advect(u_n, omega_n);
  StepOperator op(g, dt);
  return op.complete(op.base_step(omega_n, adv), h_next);
}

// --- full integration ---------------------------------------------------------

namespace {

StepRecord make_record(const ScalarField& omega, const VectorField& u, double t, double h,
                       bool track_pressure, double tol) {
  StepRecord r;
  r.t = t;
  r.h = h;
  r.mean_omega = mean(omega);
  r.omega_l2 = norm_spatial(omega, NormKind::L2);
  r.omega_l4 = norm_spatial(omega, NormKind::L4);
  r.grad_omega_l2 = norm_spatial(omega, NormKind::GradL2);
  r.u_h1 = norm_spatial(u, NormKind::H1);
  r.u_h2 = norm_spatial(u, NormKind::H2);
  if (track_pressure) r.p_h1 = norm_spatial(recover_pressure(u, tol).f, NormKind::H1);
  return r;
}

double energy_defect(const ScalarField& prev, const ScalarField& next, const ScalarField& adv,
                     double h_prev, double h_next, double dt) {
  const Grid& g = prev.grid;
  ScalarField mid(g);
  for (std::size_t k = 0; k < mid.v.size(); ++k) mid.v[k] = 0.5 * (prev.v[k] + next.v[k]);
  const double hbar = 0.5 * (h_prev + h_next);
  const double l2p = norm_spatial(prev, NormKind::L2), l2n = norm_spatial(next, NormKind::L2);
  const double dkin = 0.5 * (l2n * l2n - l2p * l2p) / dt;
  const double mean_term = hbar * g.area() * (mean(next) - mean(prev)) / dt;
  ScalarField shifted = mid;
  for (double& v : shifted.v) v -= hbar;
  return dkin + edge_gradient_energy(mid) - mean_term + inner(shifted, adv);
}

}  // namespace

Trajectory forward_solve(const ScalarField& omega0, double h0, const BoundaryPolicy& policy,
                         const SolverConfig& cfg) {
  const Grid& g = cfg.grid;
  require_same_grid(omega0.grid, g, "forward_solve");
  if (cfg.nsteps < 1) throw ConfigError("bad-step-count: nsteps must be at least 1");
  if (!(cfg.dt > 0.0)) throw ConfigError("bad-time-step: dt must be positive");
  require_trace(omega0, h0, 1e-8);

  Trajectory traj;
  traj.grid = g;
  traj.dt = cfg.dt;
  traj.nsteps = cfg.nsteps;
  traj.h.reserve(static_cast<std::size_t>(cfg.nsteps) + 1);
  traj.h.push_back(h0);
  traj.rows.reserve(static_cast<std::size_t>(cfg.nsteps) + 1);
  traj.energy_residual.reserve(static_cast<std::size_t>(cfg.nsteps));

  const auto keep = [&](int step) {
    switch (cfg.store) {
      case StoreFields::None:
        return false;
      case StoreFields::Final:
        return step == cfg.nsteps;
      case StoreFields::All:
        return true;
      case StoreFields::Stride:
        return step % std::max(1, cfg.store_stride) == 0 || step == cfg.nsteps;
    }
    return false;
  };
  const auto store = [&](int step, const ScalarField& f) {
    if (keep(step)) {
      traj.stored_steps.push_back(step);
      traj.omega_fields.push_back(f);
    }
  };

  StepOperator op(g, cfg.dt);
  ScalarField omega = omega0;
  VectorField u = velocity_of(omega, cfg.poisson_tol);
  ScalarField adv(g), adv_prev(g);
  if (cfg.advection_on) adv = advect(u, omega);

  traj.rows.push_back(make_record(omega, u, 0.0, h0, cfg.track_pressure, cfg.poisson_tol));
  store(0, omega);

  for (int n = 0; n < cfg.nsteps; ++n) {
    require_cfl(u, cfg.dt, cfg.cfl_safety, n);
    ScalarField ab2(g);
    if (cfg.advection_on) {
      if (n == 0) {
        ab2 = adv;
      } else {
        for (std::size_t k = 0; k < ab2.v.size(); ++k)
          ab2.v[k] = 1.5 * adv.v[k] - 0.5 * adv_prev.v[k];
      }
    }
    const ScalarField base = op.base_step(omega, ab2);
    const double h_next = policy(n, base, op);
    ScalarField next = op.complete(base, h_next);
    traj.energy_residual.push_back(
        energy_defect(omega, next, ab2, traj.h.back(), h_next, cfg.dt));
    traj.h.push_back(h_next);

    adv_prev = adv;
    omega = std::move(next);
    u = velocity_of(omega, cfg.poisson_tol);
    if (cfg.advection_on) adv = advect(u, omega);

    const double t = (static_cast<double>(n) + 1.0) * cfg.dt;
    traj.rows.push_back(
        make_record(omega, u, t, h_next, cfg.track_pressure, cfg.poisson_tol));
    store(n + 1, omega);
  }
  return traj;
}

Trajectory forward_solve(const ScalarField& omega0, const std::vector<double>& h,
                         const SolverConfig& cfg) {
  if (h.size() != static_cast<std::size_t>(cfg.nsteps) + 1) {
    std::ostringstream os;
    os << "boundary-series-length: got " << h.size() << " values, need nsteps + 1 = "
       << cfg.nsteps + 1;
    throw BoundaryError(os.str());
  }
  return forward_solve(
      omega0, h[0],
      [&h](int n, const ScalarField&, const StepOperator&) {
        return h[static_cast<std::size_t>(n) + 1];
      },
      cfg);
}

// --- pressure -----------------------------------------------------------------

VectorField convective_acceleration(const VectorField& u) {
  const Grid& g = u.grid;
  const VectorField g1 = gradient(ScalarField{g, u.u1});
  const VectorField g2 = gradient(ScalarField{g, u.u2});
  VectorField a(g);
  for (std::size_t k = 0; k < a.u1.size(); ++k) {
    a.u1[k] = u.u1[k] * g1.u1[k] + u.u2[k] * g1.u2[k];
    a.u2[k] = u.u1[k] * g2.u1[k] + u.u2[k] * g2.u2[k];
  }
  return a;
}

NeumannSolution recover_pressure(const VectorField& u, double tol) {
  const Grid& g = u.grid;
  const VectorField a = convective_acceleration(u);
  const ScalarField rhs = divergence(a);

  const ScalarField l1 = laplacian(ScalarField{g, u.u1});
  const ScalarField l2 = laplacian(ScalarField{g, u.u2});
  BoundaryTrace flux = BoundaryTrace::zero(g);
  for (int i = 0; i < g.nx; ++i) {
    const auto k = static_cast<std::size_t>(i);
    flux.bottom[k] = -(l2(i, 0) - a.u2[k]);
    const std::size_t kt = static_cast<std::size_t>(g.ny - 1) * g.nx + i;
    flux.top[k] = l2(i, g.ny - 1) - a.u2[kt];
  }
  for (int j = 0; j < g.ny; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const std::size_t kl = static_cast<std::size_t>(j) * g.nx;
    const std::size_t kr = kl + g.nx - 1;
    flux.left[k] = -(l1(0, j) - a.u1[kl]);
    flux.right[k] = l1(g.nx - 1, j) - a.u1[kr];
  }
  return poisson_neumann(rhs, flux, tol);
}

double pressure_work_defect(const VectorField& u_curr, const VectorField& u_prev, double dt,
                            double tol) {
  require_same_grid(u_curr.grid, u_prev.grid, "pressure_work_defect");
  const ScalarField p = recover_pressure(u_curr, tol).f;
  const VectorField gp = gradient(p);
  VectorField dudt(u_curr.grid);
  for (std::size_t k = 0; k < dudt.u1.size(); ++k) {
    dudt.u1[k] = (u_curr.u1[k] - u_prev.u1[k]) / dt;
    dudt.u2[k] = (u_curr.u2[k] - u_prev.u2[k]) / dt;
  }
  return inner(gp, dudt);
}

}  // namespace vortlab
