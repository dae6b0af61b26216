#pragma once

// Time integration of the vorticity transport equation
//   d_t omega + u . grad omega = Lap omega,   omega|_boundary = h(t),
// with u recovered from omega through the stream function: -Lap psi = omega,
// psi = 0 on the boundary, u = (d_y psi, -d_x psi).
//
// The stepper is Crank-Nicolson in the diffusion term and Adams-Bashforth-2
// in the advection term (forward Euler on the first step).  Writing the
// unknown as omega = theta + h_next with theta zero on the boundary turns
// each step into one constant-coefficient Helmholtz solve; the step is affine
// in h_next, which the inverse solvers exploit.

#include <functional>
#include <optional>
#include <vector>

#include "vortlab/grid.hpp"
#include "vortlab/poisson.hpp"

namespace vortlab {

enum class StoreFields { None, Final, All, Stride };

// Uniformly sampled boundary value series: values[k] = h(t0 + k dt).
struct BoundaryVorticity {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
};

struct SolverConfig {
  Grid grid;
  double dt = 1e-3;
  int nsteps = 0;
  bool advection_on = true;
  // The run enforces dt (1 + max|u|) / min(dx, dy) <= cfl_safety each step
  // and throws CflError past it.
  double cfl_safety = 0.8;
  double poisson_tol = 1e-10;
  bool track_pressure = false;  // fills StepRecord::p_h1 (one Neumann solve per step)
  StoreFields store = StoreFields::Final;
  int store_stride = 1;  // used when store == StoreFields::Stride
};

// Norms and traces sampled at one time level.
struct StepRecord {
  double t = 0.0;
  double h = 0.0;
  double mean_omega = 0.0;
  double omega_l2 = 0.0;
  double omega_l4 = 0.0;
  double grad_omega_l2 = 0.0;
  double u_h1 = 0.0;
  double u_h2 = 0.0;
  double p_h1 = 0.0;
};

struct Trajectory {
  Grid grid;
  double dt = 0.0;
  int nsteps = 0;
  std::vector<StepRecord> rows;  // one per time level, size nsteps + 1
  std::vector<double> h;         // boundary values used, size nsteps + 1
  // Per-step defect in the discrete energy balance
  //   (|w_{n+1}|^2 - |w_n|^2) / (2 dt) + G_e(wbar) - hbar |O| d mean/dt
  //     + <wbar - hbar, A_n> = 0,
  // where wbar is the midpoint field, G_e the edge gradient energy matched to
  // the five-point Laplacian, and A_n the advection field the step used.
  // Zero to rounding by construction of the scheme.
  std::vector<double> energy_residual;  // size nsteps

  std::vector<int> stored_steps;          // ascending time-level indices
  std::vector<ScalarField> omega_fields;  // parallel to stored_steps

  bool has_field(int step) const;
  const ScalarField& omega_at(int step) const;  // throws Error if not stored
  const ScalarField& final_omega() const;
};

// Stream function of a vorticity field: -Lap psi = omega, psi = 0 on the
// boundary.
ScalarField stream_function(const ScalarField& omega, double tol = 1e-10);

// u = (d_y psi, -d_x psi).  The normal component vanishes identically on the
// boundary: the tangential one-sided derivative of a constant trace is zero.
// Throws BoundaryError("boundary-not-constant: ...") when psi varies along
// the boundary beyond 1e-10 (1 + max|psi|).
VectorField velocity_from_stream(const ScalarField& psi);

VectorField velocity_of(const ScalarField& omega, double tol = 1e-10);

// Whether initial data carry the boundary value they claim, and the mean
// they are asked to keep (when a target is supplied).  Report-style; the
// solvers decide what to throw.
struct CompatibilityReport {
  bool trace_ok = false;
  double trace_deviation = 0.0;  // max |trace(omega0) - h0|
  bool mean_checked = false;
  bool mean_ok = true;
  double mean_deviation = 0.0;  // |mean(omega0) - L|
  bool ok() const { return trace_ok && mean_ok; }
};
CompatibilityReport check_compatibility(const ScalarField& omega0, double h0,
                                        std::optional<double> mean_target = std::nullopt,
                                        double tol = 1e-8);

// One Crank-Nicolson step factored through the zero-boundary Helmholtz solve
//   (1/dt - Lap/2) theta = omega_n/dt + Lap_h omega_n / 2 - A_n - h_next/dt,
//   omega_{n+1} = theta + h_next = base + h_next * response,
// where the response field r = 1 - (1/dt) S[1] is independent of the data.
class StepOperator {
 public:
  StepOperator(const Grid& g, double dt);

  // Candidate next field with h_next = 0 (boundary value zero).
  ScalarField base_step(const ScalarField& omega_n, const ScalarField& advection) const;
  // omega_{n+1} = base + h_next * response.
  ScalarField complete(const ScalarField& base, double h_next) const;
  // h_next making mean(omega_{n+1}) equal mean_target exactly.  Throws
  // DegenerateResponseError when the response mean is below 1e-14.
  double project_h(const ScalarField& base, double mean_target) const;

  const ScalarField& response() const { return response_; }
  double response_mean() const { return response_mean_; }
  double dt() const { return dt_; }

 private:
  Grid grid_;
  double dt_;
  DirichletSolver solver_;
  ScalarField response_;
  double response_mean_;
};

// Single step with forward-Euler advection by the given velocity, for
// callers outside the AB2 loop.  Affine in (interior of omega_n, h_next) for
// fixed u_n.  Throws CflError when dt (1 + max|u_n|) / min(dx, dy) exceeds
// cfl_safety.
ScalarField step_vorticity(const ScalarField& omega_n, const VectorField& u_n, double h_next,
                           double dt, double cfl_safety = 1.0);

// Integrate nsteps steps with prescribed boundary values h[0..nsteps]
// (h[0] is the trace of omega0; h[n] applies at time n * dt).
Trajectory forward_solve(const ScalarField& omega0, const std::vector<double>& h,
                         const SolverConfig& cfg);

// Same loop with h chosen on the fly: policy(n, base, op) returns h_{n+1}
// given the zero-boundary candidate for step n -> n+1.  h0 is the boundary
// value at t = 0 (must match the trace of omega0).
using BoundaryPolicy = std::function<double(int, const ScalarField&, const StepOperator&)>;
Trajectory forward_solve(const ScalarField& omega0, double h0, const BoundaryPolicy& policy,
                         const SolverConfig& cfg);

// (u . grad) u, centered stencils (one-sided on the boundary).
VectorField convective_acceleration(const VectorField& u);

// Pressure from the velocity field: -Lap p = div((u . grad) u) with Neumann
// data  dp/dn = n . (Lap u - (u . grad) u)  and mean-zero gauge.  The shift
// in the result records the compatibility defect absorbed by the solver.
NeumannSolution recover_pressure(const VectorField& u, double tol = 1e-10);

// <grad p, (u_curr - u_prev) / dt> with p recovered from u_curr: the
// discrete trace of the pressure-work orthogonality (zero in the continuum
// since the velocity stays divergence free and tangent to the boundary).
double pressure_work_defect(const VectorField& u_curr, const VectorField& u_prev, double dt,
                            double tol = 1e-10);

}  // namespace vortlab
