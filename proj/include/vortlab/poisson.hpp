// Direct solvers for the five-point Laplacian on the uniform grid.
//
// Both problems are solved by fast diagonalization: the Dirichlet operator
// on interior nodes is diagonal in the discrete sine basis, and the Neumann
// operator with mirror (ghost-reflection) boundary closure is diagonal in
// the discrete cosine basis.  Solves are direct, deterministic, and leave
// residuals at rounding level; a post-solve stencil check enforces the
// advertised tolerance.

#pragma once

#include <Eigen/Dense>

#include "vortlab/grid.hpp"

namespace vortlab {

// Solve (alpha*I - beta*Lap) z = b with z = 0 on the boundary; b is read on
// interior nodes only.  alpha = 0, beta = 1 gives -Lap z = b.
class DirichletSolver {
 public:
  DirichletSolver(const Grid& g, double alpha, double beta);

  // rhs_interior is indexed like a full field; boundary entries are ignored.
  // Returns a full field with zero boundary values.
  ScalarField solve(const ScalarField& rhs) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  double alpha_, beta_;
  Eigen::MatrixXd sx_, sy_;     // sine transform matrices (symmetric)
  Eigen::ArrayXXd denom_;      // alpha + beta*(lam_x + lam_y)
};

struct NeumannSolution {
  ScalarField f;       // mean-zero solution
  double shift;        // constant removed from the data for compatibility
};

// Solve -Lap f = rhs - shift with outward normal derivative `flux` on the
// boundary (mirror closure), where shift is the quadrature mean of the
// combined data; f is returned mean-zero.
class NeumannSolver {
 public:
  explicit NeumannSolver(const Grid& g);

  NeumannSolution solve(const ScalarField& rhs, const BoundaryTrace& flux) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Eigen::MatrixXd tx_, ty_;    // cosine transform matrices (self-inverse up to 2/N)
  Eigen::ArrayXXd lam_;        // lam_x + lam_y, (0,0) entry zero
};

// One-call conveniences with a relative residual check (default 1e-10).

ScalarField poisson_dirichlet(const ScalarField& rhs, double boundary_value,
                              double tol = 1e-10);
ScalarField poisson_dirichlet(const ScalarField& rhs, const BoundaryTrace& boundary,
                              double tol = 1e-10);
NeumannSolution poisson_neumann(const ScalarField& rhs, const BoundaryTrace& flux,
                                double tol = 1e-10);

// Mirror-closure Neumann operator applied by stencil (for residual checks
// and eigenvalue probes): returns -Lap f with ghost reflection at the walls.
ScalarField apply_neumann_operator(const ScalarField& f);

}  // namespace vortlab
