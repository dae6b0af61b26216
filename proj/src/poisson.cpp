#include "vortlab/poisson.hpp"

#include <cmath>

#include "vortlab/ops.hpp"

namespace vortlab {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::MatrixXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Eigenvalue of the 1D three-point -d2/dx2 for the k-th sine (Dirichlet)
// or cosine (Neumann) mode on N = n-1 cells of width h.
double lam1d(int k, int ncells, double h) {
  return (2.0 - 2.0 * std::cos(kPi * k / ncells)) / (h * h);
}

}  // namespace

// --- Dirichlet ---------------------------------------------------------------

DirichletSolver::DirichletSolver(const Grid& g, double alpha, double beta)
    : grid_(g), alpha_(alpha), beta_(beta) {
  const int mx = g.nx - 2, my = g.ny - 2;
  const int ncx = g.nx - 1, ncy = g.ny - 1;
  sx_.resize(mx, mx);
  for (int k = 0; k < mx; ++k)
    for (int i = 0; i < mx; ++i) sx_(k, i) = std::sin(kPi * (k + 1) * (i + 1) / ncx);
  sy_.resize(my, my);
  for (int k = 0; k < my; ++k)
    for (int j = 0; j < my; ++j) sy_(k, j) = std::sin(kPi * (k + 1) * (j + 1) / ncy);
  denom_.resize(my, mx);
  for (int l = 0; l < my; ++l)
    for (int k = 0; k < mx; ++k)
      denom_(l, k) = alpha + beta * (lam1d(l + 1, ncy, g.dy) + lam1d(k + 1, ncx, g.dx));
}

ScalarField DirichletSolver::solve(const ScalarField& rhs) const {
  const Grid& g = grid_;
  const int mx = g.nx - 2, my = g.ny - 2;
  Eigen::Map<const RowMat> F(rhs.v.data(), g.ny, g.nx);
  MatrixXd bhat = sy_ * F.block(1, 1, my, mx) * sx_;
  bhat.array() /= denom_;
  const double scale = 4.0 / (static_cast<double>(g.nx - 1) * (g.ny - 1));
  MatrixXd z = scale * (sy_ * bhat * sx_);
  ScalarField out(g);
  Eigen::Map<RowMat>(out.v.data(), g.ny, g.nx).block(1, 1, my, mx) = z;
  return out;
}

// --- Neumann -----------------------------------------------------------------

NeumannSolver::NeumannSolver(const Grid& g) : grid_(g) {
  const int ncx = g.nx - 1, ncy = g.ny - 1;
  tx_.resize(g.nx, g.nx);
  for (int k = 0; k < g.nx; ++k)
    for (int i = 0; i < g.nx; ++i) {
      const double w = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      tx_(k, i) = w * std::cos(kPi * k * i / ncx);
    }
  ty_.resize(g.ny, g.ny);
  for (int k = 0; k < g.ny; ++k)
    for (int j = 0; j < g.ny; ++j) {
      const double w = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
      ty_(k, j) = w * std::cos(kPi * k * j / ncy);
    }
  lam_.resize(g.ny, g.nx);
  for (int l = 0; l < g.ny; ++l)
    for (int k = 0; k < g.nx; ++k) lam_(l, k) = lam1d(l, ncy, g.dy) + lam1d(k, ncx, g.dx);
}

NeumannSolution NeumannSolver::solve(const ScalarField& rhs, const BoundaryTrace& flux) const {
  const Grid& g = grid_;
  ScalarField b = rhs;
  // Outward-flux data folded into the boundary rows via the mirror ghosts.
  for (int j = 0; j < g.ny; ++j) {
    b(0, j) += 2.0 * flux.left[static_cast<std::size_t>(j)] / g.dx;
    b(g.nx - 1, j) += 2.0 * flux.right[static_cast<std::size_t>(j)] / g.dx;
  }
  for (int i = 0; i < g.nx; ++i) {
    b(i, 0) += 2.0 * flux.bottom[static_cast<std::size_t>(i)] / g.dy;
    b(i, g.ny - 1) += 2.0 * flux.top[static_cast<std::size_t>(i)] / g.dy;
  }
  const double shift = mean(b);
  for (double& x : b.v) x -= shift;

  Eigen::Map<const RowMat> B(b.v.data(), g.ny, g.nx);
  MatrixXd bhat = ty_ * B * tx_.transpose();
  bhat(0, 0) = 0.0;  // constant mode: removed by the shift, pinned here
  for (int l = 0; l < g.ny; ++l)
    for (int k = 0; k < g.nx; ++k)
      if (l != 0 || k != 0) bhat(l, k) /= lam_(l, k);
  const double scale = 4.0 / (static_cast<double>(g.nx - 1) * (g.ny - 1));
  MatrixXd z = scale * (ty_ * bhat * tx_.transpose());

  NeumannSolution sol{ScalarField(g), shift};
  Eigen::Map<RowMat>(sol.f.v.data(), g.ny, g.nx) = z;
  const double m = mean(sol.f);  // rounding-level cleanup of the gauge
  for (double& x : sol.f.v) x -= m;
  return sol;
}

ScalarField apply_neumann_operator(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double ix = 1.0 / (g.dx * g.dx), iy = 1.0 / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double fw = (i == 0) ? f(1, j) : f(i - 1, j);
      const double fe = (i == g.nx - 1) ? f(g.nx - 2, j) : f(i + 1, j);
      const double fs = (j == 0) ? f(i, 1) : f(i, j - 1);
      const double fn = (j == g.ny - 1) ? f(i, g.ny - 2) : f(i, j + 1);
      out(i, j) = (2.0 * f(i, j) - fw - fe) * ix + (2.0 * f(i, j) - fs - fn) * iy;
    }
  return out;
}

// --- convenience wrappers with residual checks -------------------------------

namespace {

// Backward-error style interior residual of -Lap f = rhs: |r|_inf scaled by
// |rhs|_inf + |A|_inf |f|_inf so zero right-hand sides stay well-posed.
double dirichlet_residual(const ScalarField& f, const ScalarField& rhs) {
  const Grid& g = f.grid;
  const double ix = 1.0 / (g.dx * g.dx), iy = 1.0 / (g.dy * g.dy);
  double rmax = 0.0, bmax = 0.0, fmax = 0.0;
  for (double v : f.v) fmax = std::max(fmax, std::abs(v));
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double lap = (2.0 * f(i, j) - f(i - 1, j) - f(i + 1, j)) * ix +
                         (2.0 * f(i, j) - f(i, j - 1) - f(i, j + 1)) * iy;
      rmax = std::max(rmax, std::abs(lap - rhs(i, j)));
      bmax = std::max(bmax, std::abs(rhs(i, j)));
    }
  return rmax / (bmax + 4.0 * (ix + iy) * fmax + 1e-300);
}

}  // namespace

ScalarField poisson_dirichlet(const ScalarField& rhs, const BoundaryTrace& bc, double tol) {
  const Grid& g = rhs.grid;
  ScalarField b = rhs;
  // Known boundary values migrate to the right-hand side of the interior system.
  for (int j = 1; j + 1 < g.ny; ++j) {
    b(1, j) += bc.left[static_cast<std::size_t>(j)] / (g.dx * g.dx);
    b(g.nx - 2, j) += bc.right[static_cast<std::size_t>(j)] / (g.dx * g.dx);
  }
  for (int i = 1; i + 1 < g.nx; ++i) {
    b(i, 1) += bc.bottom[static_cast<std::size_t>(i)] / (g.dy * g.dy);
    b(i, g.ny - 2) += bc.top[static_cast<std::size_t>(i)] / (g.dy * g.dy);
  }
  ScalarField f = DirichletSolver(g, 0.0, 1.0).solve(b);
  for (int i = 0; i < g.nx; ++i) {
    f(i, 0) = bc.bottom[static_cast<std::size_t>(i)];
    f(i, g.ny - 1) = bc.top[static_cast<std::size_t>(i)];
  }
  for (int j = 1; j + 1 < g.ny; ++j) {
    f(0, j) = bc.left[static_cast<std::size_t>(j)];
    f(g.nx - 1, j) = bc.right[static_cast<std::size_t>(j)];
  }
  if (dirichlet_residual(f, rhs) > tol)
    throw SolverError("solver-nonconvergence: Dirichlet residual above tolerance");
  return f;
}

ScalarField poisson_dirichlet(const ScalarField& rhs, double boundary_value, double tol) {
  return poisson_dirichlet(rhs, BoundaryTrace::constant(rhs.grid, boundary_value), tol);
}

NeumannSolution poisson_neumann(const ScalarField& rhs, const BoundaryTrace& flux, double tol) {
  NeumannSolution sol = NeumannSolver(rhs.grid).solve(rhs, flux);
  // Residual against the shifted data, flux terms included.
  ScalarField b = rhs;
  const Grid& g = rhs.grid;
  for (int j = 0; j < g.ny; ++j) {
    b(0, j) += 2.0 * flux.left[static_cast<std::size_t>(j)] / g.dx;
    b(g.nx - 1, j) += 2.0 * flux.right[static_cast<std::size_t>(j)] / g.dx;
  }
  for (int i = 0; i < g.nx; ++i) {
    b(i, 0) += 2.0 * flux.bottom[static_cast<std::size_t>(i)] / g.dy;
    b(i, g.ny - 1) += 2.0 * flux.top[static_cast<std::size_t>(i)] / g.dy;
  }
  const ScalarField av = apply_neumann_operator(sol.f);
  double rmax = 0.0, bmax = 0.0, fmax = 0.0;
  for (double v : sol.f.v) fmax = std::max(fmax, std::abs(v));
  for (std::size_t k = 0; k < b.v.size(); ++k) {
    rmax = std::max(rmax, std::abs(av.v[k] - (b.v[k] - sol.shift)));
    bmax = std::max(bmax, std::abs(b.v[k] - sol.shift));
  }
  const double opnorm = 4.0 / (g.dx * g.dx) + 4.0 / (g.dy * g.dy);
  if (rmax / (bmax + opnorm * fmax + 1e-300) > tol)
    throw SolverError("solver-nonconvergence: Neumann residual above tolerance");
  return sol;
}

}  // namespace vortlab
