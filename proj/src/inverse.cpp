#include "vortlab/inverse.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "vortlab/ops.hpp"

namespace vortlab {

double trace_value(const ScalarField& omega0, double tol) {
  const double ref = omega0.v[0];
  const BoundaryTrace tr = trace_of(omega0);
  double dev = 0.0;
  for (const auto* side : {&tr.bottom, &tr.top, &tr.left, &tr.right})
    for (double v : *side) dev = std::max(dev, std::abs(v - ref));
  if (dev > tol * (1.0 + std::abs(ref))) {
    std::ostringstream os;
    os << "boundary-not-constant: trace varies by " << dev << " around " << ref;
    throw BoundaryError(os.str());
  }
  return ref;
}

std::pair<double, ScalarField> project_h_step(const ScalarField& omega_n, const VectorField& u_n,
                                              double mean_target, double dt) {
  require_same_grid(omega_n.grid, u_n.grid, "project_h_step");
  const ScalarField adv = advect(u_n, omega_n);
  StepOperator op(omega_n.grid, dt);
  const ScalarField base = op.base_step(omega_n, adv);
  const double h_next = op.project_h(base, mean_target);
  return {h_next, op.complete(base, h_next)};
}

InverseResult recover_projection(const ScalarField& omega0, double mean_target,
                                 const SolverConfig& cfg) {
  const double h0 = trace_value(omega0);
  const CompatibilityReport rep = check_compatibility(omega0, h0, mean_target, 1e-8);
  if (!rep.mean_ok) {
    std::ostringstream os;
    os << "incompatible-L: mean(omega0) deviates from the target " << mean_target << " by "
       << rep.mean_deviation << "; the mean is invariant, so the data admit no solution";
    throw CompatibilityError(os.str());
  }

  Trajectory traj = forward_solve(
      omega0, h0,
      [mean_target](int, const ScalarField& base, const StepOperator& op) {
        return op.project_h(base, mean_target);
      },
      cfg);

  InverseResult out;
  const double tol = 1e-10 * (1.0 + std::abs(mean_target));
  out.residual_history.reserve(static_cast<std::size_t>(traj.nsteps));
  for (int k = 1; k <= traj.nsteps; ++k) {
    const double defect = std::abs(traj.rows[static_cast<std::size_t>(k)].mean_omega - mean_target);
    if (defect > tol) {
      std::ostringstream os;
      os << "invariant-defect: step " << k << " mean deviates from L by " << defect;
      throw SolverError(os.str());
    }
    out.residual_history.push_back(defect);
  }
  out.h = BoundaryVorticity{0.0, cfg.dt, traj.h};
  out.converged = true;
  out.iterations_used = traj.nsteps;
  out.trajectory = std::move(traj);
  return out;
}

std::vector<double> forward_map(const BoundaryVorticity& h, const ScalarField& omega0,
                                const SolverConfig& cfg) {
  SolverConfig run = cfg;
  run.store = StoreFields::None;
  run.track_pressure = false;
  const Trajectory traj = forward_solve(omega0, h.values, run);
  std::vector<double> out(static_cast<std::size_t>(traj.nsteps));
  for (int k = 1; k <= traj.nsteps; ++k)
    out[static_cast<std::size_t>(k) - 1] = traj.rows[static_cast<std::size_t>(k)].mean_omega;
  return out;
}

Eigen::MatrixXd sensitivity_jacobian(const BoundaryVorticity& h, const ScalarField& omega0,
                                     const SolverConfig& cfg, JacobianMode mode, double fd_eps) {
  const int n = cfg.nsteps;
  if (n < 1) throw ConfigError("bad-step-count: nsteps must be at least 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);

  if (mode == JacobianMode::FiniteDifference) {
    if (!(fd_eps > 0.0)) throw ConfigError("bad-fd-step: fd_eps must be positive");
    for (int m = 0; m < n; ++m) {
      BoundaryVorticity hp = h, hm = h;
      hp.values[static_cast<std::size_t>(m) + 1] += fd_eps;
      hm.values[static_cast<std::size_t>(m) + 1] -= fd_eps;
      const std::vector<double> yp = forward_map(hp, omega0, cfg);
      const std::vector<double> ym = forward_map(hm, omega0, cfg);
      for (int k = 0; k < n; ++k)
        J(k, m) = (yp[static_cast<std::size_t>(k)] - ym[static_cast<std::size_t>(k)]) /
                  (2.0 * fd_eps);
    }
    return J;
  }

  const Grid& g = cfg.grid;
  const StepOperator op(g, cfg.dt);

  if (!cfg.advection_on) {
    // The propagation is the same linear operator at every step, so a single
    // kicked column determines the whole lower-triangular Toeplitz matrix.
    const ScalarField zero(g);
    std::vector<double> col(static_cast<std::size_t>(n));
    ScalarField xi = op.response();
    col[0] = op.response_mean();
    for (int d = 1; d < n; ++d) {
      xi = op.base_step(xi, zero);
      col[static_cast<std::size_t>(d)] = mean(xi);
    }
    for (int m = 0; m < n; ++m)
      for (int k = m; k < n; ++k) J(k, m) = col[static_cast<std::size_t>(k - m)];
    return J;
  }

  // Velocities along the base trajectory, frozen for the linearization.
  SolverConfig run = cfg;
  run.store = StoreFields::All;
  run.track_pressure = false;
  const Trajectory traj = forward_solve(omega0, h.values, run);
  std::vector<VectorField> u;
  u.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) u.push_back(velocity_of(traj.omega_at(k), cfg.poisson_tol));

  // A unit kick in h_m enters step m-1 -> m as the response field; from
  // there the perturbation obeys the stepped equation with frozen velocity,
  // AB2 weights on the advection of the perturbation (the older level is
  // zero on the first propagated step).
  for (int m = 1; m <= n; ++m) {
    J(m - 1, m - 1) = op.response_mean();
    ScalarField xi = op.response();
    ScalarField adv_prev(g);
    for (int lev = m; lev < n; ++lev) {
      const ScalarField adv_curr = advect(u[static_cast<std::size_t>(lev)], xi);
      ScalarField dab2(g);
      for (std::size_t k = 0; k < dab2.v.size(); ++k)
        dab2.v[k] = 1.5 * adv_curr.v[k] - 0.5 * adv_prev.v[k];
      xi = op.base_step(xi, dab2);
      adv_prev = adv_curr;
      J(lev, m - 1) = mean(xi);
    }
  }
  return J;
}

namespace {

void require_iter_config(const InverseConfig& icfg) {
  if (icfg.max_iters < 0) throw ConfigError("bad-iteration-count: max_iters must be nonnegative");
  if (!(icfg.stop_tol > 0.0)) throw ConfigError("bad-stop-tol: stop_tol must be positive");
  if (icfg.step_size < 0.0) throw ConfigError("bad-step-size: step_size must be nonnegative");
}

BoundaryVorticity initial_guess(const ScalarField& omega0, const SolverConfig& cfg) {
  // Free nodes start at mean(omega0); h(0) is pinned at the trace, which the
  // observable never sees.
  BoundaryVorticity h;
  h.t0 = 0.0;
  h.dt = cfg.dt;
  h.values.assign(static_cast<std::size_t>(cfg.nsteps) + 1, mean(omega0));
  h.values[0] = trace_value(omega0);
  return h;
}

double eval_residual(const BoundaryVorticity& h, const ScalarField& omega0,
                     const SolverConfig& cfg, double target, Eigen::VectorXd& r) {
  const std::vector<double> y = forward_map(h, omega0, cfg);
  r.resize(static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < y.size(); ++k)
    r[static_cast<Eigen::Index>(k)] = y[k] - target;
  return std::sqrt(cfg.dt) * r.norm();
}

double largest_singular_value_sq(const Eigen::MatrixXd& J) {
  const Eigen::Index n = J.cols();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double s2 = 0.0;
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd w = J.transpose() * (J * v);
    s2 = w.norm();
    if (!(s2 > 0.0)) break;
    v = w / s2;
  }
  if (!(s2 > 0.0))
    throw SolverError("degenerate-jacobian: power iteration found no growth direction");
  return s2;
}

}  // namespace

InverseResult landweber(const ScalarField& omega0, const SolverConfig& cfg,
                        const InverseConfig& icfg) {
  require_iter_config(icfg);
  const int n = cfg.nsteps;
  const double target = icfg.mean_target;

  BoundaryVorticity h = initial_guess(omega0, cfg);
  Eigen::VectorXd r;
  double res = eval_residual(h, omega0, cfg, target, r);

  InverseResult out;
  out.residual_history.push_back(res);
  BoundaryVorticity best = h;
  double best_res = res;
  bool converged = res <= icfg.stop_tol;
  int iters = 0;

  if (!converged && icfg.max_iters > 0) {
    const Eigen::MatrixXd J =
        sensitivity_jacobian(h, omega0, cfg, icfg.jacobian_mode, icfg.fd_eps);
    double mu = icfg.step_size;
    if (!(mu > 0.0)) mu = 1.0 / largest_singular_value_sq(J);

    int rises = 0;
    double prev_res = res;
    for (int it = 1; it <= icfg.max_iters; ++it) {
      const Eigen::VectorXd grad = J.transpose() * r;
      for (int k = 0; k < n; ++k) h.values[static_cast<std::size_t>(k) + 1] -= mu * grad[k];
      try {
        res = eval_residual(h, omega0, cfg, target, r);
      } catch (const CflError&) {
        // The update drove the forward run out of its stable region, which
        // only an oversized step can do from a stable starting point.
        std::ostringstream os;
        os << "step-size-too-large: iterate at iteration " << it
           << " left the stable region of the forward solver (mu = " << mu << ")";
        throw StepSizeError(os.str());
      }
      out.residual_history.push_back(res);
      iters = it;
      if (res < best_res) {
        best_res = res;
        best = h;
      }
      if (res > prev_res) {
        if (++rises >= 2) {
          std::ostringstream os;
          os << "step-size-too-large: residual rose on two consecutive iterations (mu = " << mu
             << ", iteration " << it << ")";
          throw StepSizeError(os.str());
        }
      } else {
        rises = 0;
      }
      prev_res = res;
      if (res <= icfg.stop_tol) {
        converged = true;
        break;
      }
    }
  }

  out.h = std::move(best);
  out.converged = converged;
  out.iterations_used = iters;
  out.trajectory = forward_solve(omega0, out.h.values, cfg);
  return out;
}

InverseResult levenberg_marquardt(const ScalarField& omega0, const SolverConfig& cfg,
                                  const InverseConfig& icfg) {
  require_iter_config(icfg);
  if (!(icfg.lambda0 > 0.0)) throw ConfigError("bad-damping: lambda0 must be positive");
  if (!(icfg.lambda_growth > 1.0))
    throw ConfigError("bad-damping: lambda growth factor must exceed 1");
  const int n = cfg.nsteps;
  const double target = icfg.mean_target;

  BoundaryVorticity h = initial_guess(omega0, cfg);
  Eigen::VectorXd r;
  double res = eval_residual(h, omega0, cfg, target, r);

  InverseResult out;
  out.residual_history.push_back(res);
  bool converged = res <= icfg.stop_tol;
  int iters = 0;

  if (!converged && icfg.max_iters > 0) {
    Eigen::MatrixXd J = sensitivity_jacobian(h, omega0, cfg, icfg.jacobian_mode, icfg.fd_eps);
    double lambda = icfg.lambda0;
    Eigen::VectorXd r_trial;
    for (int it = 1; it <= icfg.max_iters; ++it) {
      iters = it;
      const Eigen::MatrixXd A =
          J.transpose() * J + lambda * Eigen::MatrixXd::Identity(n, n);
      const Eigen::VectorXd rhs = -(J.transpose() * r);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success)
        throw SolverError("normal-equation-failure: damped normal matrix is not factorizable");
      const Eigen::VectorXd delta = ldlt.solve(rhs);
      if (!delta.allFinite()) throw SolverError("normal-equation-failure: step is not finite");

      BoundaryVorticity trial = h;
      for (int k = 0; k < n; ++k) trial.values[static_cast<std::size_t>(k) + 1] += delta[k];
      double res_trial;
      try {
        res_trial = eval_residual(trial, omega0, cfg, target, r_trial);
      } catch (const CflError&) {
        // A trial the forward solver cannot even run is a rejection, not a
        // failure: raise the damping and try a shorter step.
        res_trial = std::numeric_limits<double>::infinity();
      }

      if (res_trial < res) {
        h = std::move(trial);
        r = r_trial;
        res = res_trial;
        out.residual_history.push_back(res);
        lambda /= icfg.lambda_growth;
        if (res <= icfg.stop_tol) {
          converged = true;
          break;
        }
        // With advection off the map is affine and J exact, so no rebuild.
        if (cfg.advection_on)
          J = sensitivity_jacobian(h, omega0, cfg, icfg.jacobian_mode, icfg.fd_eps);
      } else {
        lambda *= icfg.lambda_growth;
        if (lambda > 1e18) break;
      }
    }
  }

  out.h = std::move(h);
  out.converged = converged;
  out.iterations_used = iters;
  out.trajectory = forward_solve(omega0, out.h.values, cfg);
  return out;
}

InverseResult run_inverse(const ScalarField& omega0, const SolverConfig& cfg,
                          const InverseConfig& icfg) {
  switch (icfg.method) {
    case InverseMethod::Projection:
      return recover_projection(omega0, icfg.mean_target, cfg);
    case InverseMethod::Landweber:
      return landweber(omega0, cfg, icfg);
    case InverseMethod::LevenbergMarquardt:
      return levenberg_marquardt(omega0, cfg, icfg);
  }
  throw ConfigError("unknown-method: inverse method not recognized");
}

}  // namespace vortlab
