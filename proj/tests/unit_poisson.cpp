#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "vortlab/grid.hpp"
#include "vortlab/ops.hpp"
#include "vortlab/poisson.hpp"

#include "test_util.hpp"

using namespace vortlab;

namespace {

// Eigenvalue of the 1D three-point -d2/dx2 for mode k on ncells cells of
// width h; shared by the sine (Dirichlet) and cosine (mirror) stencils.
double lam1d(int k, int ncells, double h) {
  return (2.0 - 2.0 * std::cos(M_PI * k / ncells)) / (h * h);
}

// Discrete sine mode with exact zero trace.
ScalarField sine_mode(const Grid& g, int k, int l) {
  ScalarField f(g);
  for (int j = 1; j < g.ny - 1; ++j) {
    for (int i = 1; i < g.nx - 1; ++i) {
      f(i, j) = std::sin(M_PI * k * i / (g.nx - 1.0)) *
                std::sin(M_PI * l * j / (g.ny - 1.0));
    }
  }
  return f;
}

// Discrete cosine mode; an eigenvector of the mirror-closure operator.
ScalarField cosine_mode(const Grid& g, int k, int l) {
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f(i, j) = std::cos(M_PI * k * i / (g.nx - 1.0)) *
                std::cos(M_PI * l * j / (g.ny - 1.0));
    }
  }
  return f;
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (double& x : f.v) x = dist(rng);
  return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k)
    m = std::max(m, std::abs(a.v[k] - b.v[k]));
  return m;
}

}  // namespace

// --- Dirichlet ----------------------------------------------------------------

TEST_CASE("Dirichlet solver inverts (alpha I - beta Lap) exactly on sine modes") {
  const Grid g = make_grid(21, 13, 2.0, 1.0);
  const double alpha = 2.5, beta = 0.7;
  const DirichletSolver solver(g, alpha, beta);
  for (const auto [k, l] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 5}}) {
    const ScalarField u = sine_mode(g, k, l);
    const double lam = lam1d(k, g.nx - 1, g.dx) + lam1d(l, g.ny - 1, g.dy);
    ScalarField rhs = u;
    for (double& x : rhs.v) x *= alpha + beta * lam;
    const ScalarField z = solver.solve(rhs);
    CHECK(max_abs_diff(z, u) < 1e-12);
  }
}

TEST_CASE("Dirichlet convenience solve converges at second order") {
  // sin(pi x) sin(pi y) with the continuum rhs 2 pi^2 sinsin; the discrete
  // answer is (2 pi^2 / lam_h) sinsin, so the error is a pure O(dx^2) factor.
  std::vector<double> errs;
  for (const int n : {17, 33, 65}) {
    const Grid g = make_grid(n, n, 1.0, 1.0);
    ScalarField rhs = sine_mode(g, 1, 1);
    for (double& x : rhs.v) x *= 2.0 * M_PI * M_PI;
    const ScalarField z = poisson_dirichlet(rhs, 0.0);
    const ScalarField u = sine_mode(g, 1, 1);
    ScalarField d = z;
    for (std::size_t k = 0; k < d.v.size(); ++k) d.v[k] -= u.v[k];
    errs.push_back(norm_spatial(d, NormKind::L2) / norm_spatial(u, NormKind::L2));
  }
  for (std::size_t s = 1; s < errs.size(); ++s) {
    const double order = std::log2(errs[s - 1] / errs[s]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
}

TEST_CASE("Dirichlet boundary data enters the solution") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField zero(g);

  // Constant data: the solution is that constant everywhere.
  const ScalarField c = poisson_dirichlet(zero, 4.25);
  for (const double x : c.v) CHECK(x == doctest::Approx(4.25).epsilon(1e-13));

  // x^2 - y^2 is discrete-harmonic (the stencil is exact on quadratics), so
  // its trace reproduces it exactly.
  ScalarField h(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) h(i, j) = g.x(i) * g.x(i) - g.y(j) * g.y(j);
  const ScalarField z = poisson_dirichlet(zero, trace_of(h));
  CHECK(max_abs_diff(z, h) < 1e-11);
}

TEST_CASE("Dirichlet residual guard trips on an impossible tolerance") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  ScalarField rhs = sine_mode(g, 2, 1);
  const std::string msg =
      thrown_message<SolverError>([&] { poisson_dirichlet(rhs, 0.0, -1.0); });
  CHECK(starts_with(msg, "solver-nonconvergence"));
}

// --- Neumann ------------------------------------------------------------------

TEST_CASE("Neumann solver inverts the mirror operator exactly on cosine modes") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const NeumannSolver solver(g);
  for (const auto [k, l] : {std::pair{1, 0}, std::pair{2, 3}}) {
    const ScalarField u = cosine_mode(g, k, l);
    const double lam = lam1d(k, g.nx - 1, g.dx) + lam1d(l, g.ny - 1, g.dy);
    ScalarField rhs = u;
    for (double& x : rhs.v) x *= lam;
    const NeumannSolution sol = solver.solve(rhs, BoundaryTrace::constant(g, 0.0));
    // Nonconstant cosine modes have zero quadrature mean, so no shift and no
    // recentering: the solve returns the mode itself.
    CHECK(std::abs(sol.shift) < 1e-12 * lam);
    CHECK(max_abs_diff(sol.f, u) < 1e-11);
  }
}

TEST_CASE("Neumann solve returns a mean-zero potential and the data mean as shift") {
  const Grid g = make_grid(17, 13, 1.0, 1.5);
  std::mt19937_64 rng(11);
  const ScalarField rhs = random_field(g, rng);
  const NeumannSolution sol = poisson_neumann(rhs, BoundaryTrace::constant(g, 0.0));
  CHECK(std::abs(mean(sol.f)) < 1e-12);
  CHECK(sol.shift == doctest::Approx(mean(rhs)).epsilon(1e-12));
  // The stencil applied to the answer reproduces the shifted data.
  const ScalarField av = apply_neumann_operator(sol.f);
  double rmax = 0.0;
  for (std::size_t k = 0; k < av.v.size(); ++k)
    rmax = std::max(rmax, std::abs(av.v[k] - (rhs.v[k] - sol.shift)));
  const double scale = 4.0 / (g.dx * g.dx) + 4.0 / (g.dy * g.dy);
  CHECK(rmax < 1e-10 * scale);
}

TEST_CASE("Neumann compatibility shift equals the boundary flux integral over the area") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField zero(g);
  const NeumannSolution sol = poisson_neumann(zero, BoundaryTrace::constant(g, 1.0));
  // Unit outward flux along the whole wall: the folded data integrates to the
  // perimeter, so the shift is perimeter / area.
  const double perimeter = 2.0 * (g.lx + g.ly);
  CHECK(sol.shift == doctest::Approx(perimeter / (g.lx * g.ly)).epsilon(1e-12));
  CHECK(std::abs(mean(sol.f)) < 1e-12);
}

TEST_CASE("Neumann solve ignores constant shifts of the data") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  std::mt19937_64 rng(5);
  const ScalarField rhs = random_field(g, rng);
  ScalarField shifted = rhs;
  for (double& x : shifted.v) x += 7.0;
  const NeumannSolution a = poisson_neumann(rhs, BoundaryTrace::constant(g, 0.0));
  const NeumannSolution b = poisson_neumann(shifted, BoundaryTrace::constant(g, 0.0));
  CHECK(b.shift == doctest::Approx(a.shift + 7.0).epsilon(1e-12));
  CHECK(max_abs_diff(a.f, b.f) < 1e-12);
}

TEST_CASE("Neumann residual guard trips on an impossible tolerance") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  std::mt19937_64 rng(7);
  const ScalarField rhs = random_field(g, rng);
  const std::string msg = thrown_message<SolverError>(
      [&] { poisson_neumann(rhs, BoundaryTrace::constant(g, 0.0), -1.0); });
  CHECK(starts_with(msg, "solver-nonconvergence"));
}

TEST_CASE("mirror operator agrees with the negative five-point Laplacian inside") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  std::mt19937_64 rng(3);
  const ScalarField f = random_field(g, rng);
  const ScalarField av = apply_neumann_operator(f);
  const ScalarField lap = laplacian(f);
  const double scale = 4.0 / (g.dx * g.dx) + 4.0 / (g.dy * g.dy);
  for (int j = 1; j < g.ny - 1; ++j) {
    for (int i = 1; i < g.nx - 1; ++i) {
      CHECK(std::abs(av(i, j) + lap(i, j)) < 1e-12 * scale);
    }
  }
}
