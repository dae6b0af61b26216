#pragma once

// Recovery of the boundary value h(t) from initial vorticity and the
// prescribed mean L.
//
// The mean of the vorticity is invariant in the continuous problem, so the
// data (omega0, L) determine h implicitly: the recovered h must hold the
// discrete mean at L on every step.  Two routes are provided.
//
//   * recover_projection exploits the affine structure of the step: with the
//     zero-boundary candidate `base` and the precomputed response field r,
//     omega_{n+1} = base + h_{n+1} r, so h_{n+1} = (L - mean(base)) /
//     mean(r) pins the mean exactly.  One Helmholtz solve per step, no
//     iteration.
//
//   * The variational solvers treat the map F: (h_1..h_N) -> (mean(omega_1)
//     .. mean(omega_N)) as a least-squares problem with target (L..L) and
//     residual norm sqrt(dt sum r_n^2), the discrete L2(0,T) norm.  h_0 is
//     not free: it is pinned at the trace of omega0, which the observable
//     never sees.  The sensitivity Jacobian propagates a unit kick in h_m
//     (entering as the response field at level m) through the linearized
//     steps with the velocity frozen at the base trajectory; it is lower
//     triangular with constant diagonal mean(r), and is the exact derivative
//     of the discrete map when advection is off.  Landweber iterates
//     h <- h - mu J^T r with J built once at the initial guess;
//     Levenberg-Marquardt solves (J^T J + lambda I) d = -J^T r with an
//     adaptive damping ladder, rebuilding J after each accepted step.

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "vortlab/forward.hpp"

namespace vortlab {

enum class InverseMethod { Projection, Landweber, LevenbergMarquardt };
enum class JacobianMode { Sensitivity, FiniteDifference };

struct InverseConfig {
  InverseMethod method = InverseMethod::Projection;
  double mean_target = 0.0;  // L
  int max_iters = 200;
  double step_size = 0.0;  // Landweber mu; 0 picks 1/|J|^2 by power iteration
  double lambda0 = 1e-3;   // initial Levenberg-Marquardt damping
  double lambda_growth = 10.0;
  double stop_tol = 1e-10;  // absolute tolerance on the residual norm
  JacobianMode jacobian_mode = JacobianMode::Sensitivity;
  double fd_eps = 1e-6;  // step for the finite-difference Jacobian
};

struct InverseResult {
  BoundaryVorticity h;    // nsteps + 1 values; h.values[0] is the trace of omega0
  Trajectory trajectory;  // forward run under the recovered h
  std::vector<double> residual_history;  // one entry per evaluated iterate
  bool converged = false;
  int iterations_used = 0;
};

// The uniform boundary value carried by omega0's trace.  Throws
// BoundaryError("boundary-not-constant: ...") if the trace varies by more
// than tol (1 + |value|).
double trace_value(const ScalarField& omega0, double tol = 1e-8);

// One projected step: h_next pinning mean(omega_next) at L, and the stepped
// field.  Matches step_vorticity(omega_n, u_n, h_next, dt) exactly (forward
// Euler advection; the AB2 loop uses the same affine structure through
// StepOperator).  Throws DegenerateResponseError when the response mean
// collapses.
std::pair<double, ScalarField> project_h_step(const ScalarField& omega_n, const VectorField& u_n,
                                              double mean_target, double dt);

// Step-by-step projection.  residual_history holds the per-step invariant
// defect |mean(omega_k) - L| for k = 1..nsteps, each guaranteed at most
// 1e-10 (1 + |L|) (a larger defect throws SolverError).  Throws
// CompatibilityError("incompatible-L: ...") when mean(omega0) is not L to
// within 1e-8 (1 + |L|).
InverseResult recover_projection(const ScalarField& omega0, double mean_target,
                                 const SolverConfig& cfg);

// Means (mean(omega_1) ... mean(omega_N)) under the boundary series h
// (h.values sized nsteps + 1, h.values[0] matching the trace of omega0).
// Field storage and pressure tracking are disabled for the run.
std::vector<double> forward_map(const BoundaryVorticity& h, const ScalarField& omega0,
                                const SolverConfig& cfg);

// N x N Jacobian J(k, j) = d mean(omega_{k+1}) / d h_{j+1} at the base
// series h.  Sensitivity mode integrates the linearized steps once per
// column (frozen base velocity); FiniteDifference mode applies central
// differences with fd_eps to forward_map.
Eigen::MatrixXd sensitivity_jacobian(const BoundaryVorticity& h, const ScalarField& omega0,
                                     const SolverConfig& cfg, JacobianMode mode,
                                     double fd_eps = 1e-6);

// Landweber iteration from h_init = mean(omega0) on the free nodes.  Returns
// the best iterate; converged = false when max_iters runs out.  Throws
// StepSizeError("step-size-too-large: ...") when the residual rises on two
// consecutive iterations.
InverseResult landweber(const ScalarField& omega0, const SolverConfig& cfg,
                        const InverseConfig& icfg);

// Levenberg-Marquardt with adaptive damping (accept -> lambda / growth,
// reject -> lambda * growth).  residual_history records the initial point
// and accepted iterates, strictly decreasing.  converged = false when
// damping or max_iters run out.
InverseResult levenberg_marquardt(const ScalarField& omega0, const SolverConfig& cfg,
                                  const InverseConfig& icfg);

// Dispatch on icfg.method.
InverseResult run_inverse(const ScalarField& omega0, const SolverConfig& cfg,
                          const InverseConfig& icfg);

}  // namespace vortlab
