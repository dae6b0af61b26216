#include "vortlab/ops.hpp"

#include <algorithm>
#include <cmath>

namespace vortlab {

double quad_weight(const Grid& g, int i, int j) {
  double w = g.dx * g.dy;
  if (i == 0 || i == g.nx - 1) w *= 0.5;
  if (j == 0 || j == g.ny - 1) w *= 0.5;
  return w;
}

double mean(const ScalarField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += quad_weight(g, i, j) * f(i, j);
  return s / g.area();
}

double inner(const ScalarField& f, const ScalarField& h) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += quad_weight(g, i, j) * f(i, j) * h(i, j);
  return s;
}

double inner(const VectorField& a, const VectorField& b) {
  const Grid& g = a.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      s += quad_weight(g, i, j) * (a.u1[k] * b.u1[k] + a.u2[k] * b.u2[k]);
    }
  return s;
}

// --- stencils ---------------------------------------------------------------
// First derivatives: centered inside, (-3, 4, -1)/(2h) one-sided on the
// boundary (exact on quadratics).  Second derivatives: 3-point centered
// inside, (2, -5, 4, -1)/h^2 one-sided (also exact on quadratics).

static double d1x(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid;
  const double h2 = 2.0 * g.dx;
  if (i == 0) return (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / h2;
  if (i == g.nx - 1) {
    const int n = g.nx - 1;
    return (3.0 * f(n, j) - 4.0 * f(n - 1, j) + f(n - 2, j)) / h2;
  }
  return (f(i + 1, j) - f(i - 1, j)) / h2;
}

static double d1y(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid;
  const double h2 = 2.0 * g.dy;
  if (j == 0) return (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / h2;
  if (j == g.ny - 1) {
    const int n = g.ny - 1;
    return (3.0 * f(i, n) - 4.0 * f(i, n - 1) + f(i, n - 2)) / h2;
  }
  return (f(i, j + 1) - f(i, j - 1)) / h2;
}

static double d2x(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid;
  const double hh = g.dx * g.dx;
  if (i == 0) return (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) / hh;
  if (i == g.nx - 1) {
    const int n = g.nx - 1;
    return (2.0 * f(n, j) - 5.0 * f(n - 1, j) + 4.0 * f(n - 2, j) - f(n - 3, j)) / hh;
  }
  return (f(i - 1, j) - 2.0 * f(i, j) + f(i + 1, j)) / hh;
}

static double d2y(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid;
  const double hh = g.dy * g.dy;
  if (j == 0) return (2.0 * f(i, 0) - 5.0 * f(i, 1) + 4.0 * f(i, 2) - f(i, 3)) / hh;
  if (j == g.ny - 1) {
    const int n = g.ny - 1;
    return (2.0 * f(i, n) - 5.0 * f(i, n - 1) + 4.0 * f(i, n - 2) - f(i, n - 3)) / hh;
  }
  return (f(i, j - 1) - 2.0 * f(i, j) + f(i, j + 1)) / hh;
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      out.u1[k] = d1x(f, i, j);
      out.u2[k] = d1y(f, i, j);
    }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = d2x(f, i, j) + d2y(f, i, j);
  return out;
}

ScalarField divergence(const VectorField& u) {
  const Grid& g = u.grid;
  ScalarField c1{}, c2{};
  c1.grid = c2.grid = g;
  c1.v = u.u1;
  c2.v = u.u2;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = d1x(c1, i, j) + d1y(c2, i, j);
  return out;
}

ScalarField curl(const VectorField& u) {
  const Grid& g = u.grid;
  ScalarField c1{}, c2{};
  c1.grid = c2.grid = g;
  c1.v = u.u1;
  c2.v = u.u2;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = d1x(c2, i, j) - d1y(c1, i, j);
  return out;
}

// --- norms ------------------------------------------------------------------

static double lp_norm(const ScalarField& f, int p) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double a = f(i, j);
      const double ap = (p == 2) ? a * a : a * a * a * a;
      s += quad_weight(g, i, j) * ap;
    }
  return (p == 2) ? std::sqrt(s) : std::sqrt(std::sqrt(s));
}

static double grad_l2_sq(const ScalarField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double gx = d1x(f, i, j);
      const double gy = d1y(f, i, j);
      s += quad_weight(g, i, j) * (gx * gx + gy * gy);
    }
  return s;
}

// Hessian seminorm: fxx^2 + 2 fxy^2 + fyy^2, with fxy = d/dx(d/dy f).
static double hess_sq(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField fy(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) fy(i, j) = d1y(f, i, j);
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double fxx = d2x(f, i, j);
      const double fyy = d2y(f, i, j);
      const double fxy = d1x(fy, i, j);
      s += quad_weight(g, i, j) * (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy);
    }
  return s;
}

double norm_spatial(const ScalarField& f, NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return lp_norm(f, 2);
    case NormKind::L4:
      return lp_norm(f, 4);
    case NormKind::GradL2:
      return std::sqrt(grad_l2_sq(f));
    case NormKind::H1: {
      const double l2 = lp_norm(f, 2);
      return std::sqrt(l2 * l2 + grad_l2_sq(f));
    }
    case NormKind::H2: {
      const double l2 = lp_norm(f, 2);
      return std::sqrt(l2 * l2 + grad_l2_sq(f) + hess_sq(f));
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (double a : f.v) m = std::max(m, std::abs(a));
      return m;
    }
  }
  return 0.0;
}

double norm_spatial(const VectorField& u, NormKind kind) {
  ScalarField c1{}, c2{};
  c1.grid = c2.grid = u.grid;
  c1.v = u.u1;
  c2.v = u.u2;
  if (kind == NormKind::Linf) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.u1.size(); ++k)
      m = std::max(m, std::hypot(u.u1[k], u.u2[k]));
    return m;
  }
  const double a = norm_spatial(c1, kind);
  const double b = norm_spatial(c2, kind);
  return std::sqrt(a * a + b * b);
}

// --- advection --------------------------------------------------------------

// Recover a nodal potential phi with d(phi)/dy = v1 and d(phi)/dx = -v2 by
// inverting the first-derivative stencils along one row and then each
// column.  The centered rows give two-term recurrences (even/odd chains);
// the one-sided stencil at the low end pins the odd chain.  The inversion
// reproduces the generating potential exactly (up to one additive constant)
// whenever v came from one, which is how all solver velocities are built.
static ScalarField stream_potential(const VectorField& v) {
  const Grid& g = v.grid;
  ScalarField phi(g);
  const int nx = g.nx, ny = g.ny;

  // Bottom row from d(phi)/dx = -v2(., 0), anchored at phi(0,0) = 0.
  phi(0, 0) = 0.0;
  for (int i = 1; i + 1 < nx; i += 2)
    phi(i + 1, 0) = phi(i - 1, 0) - 2.0 * g.dx * v.u2[static_cast<std::size_t>(i)];
  phi(1, 0) = (-2.0 * g.dx * v.u2[0] + 3.0 * phi(0, 0) + phi(2, 0)) / 4.0;
  for (int i = 2; i + 1 < nx; i += 2)
    phi(i + 1, 0) = phi(i - 1, 0) - 2.0 * g.dx * v.u2[static_cast<std::size_t>(i)];

  // Columns from d(phi)/dy = v1(i, .).
  for (int i = 0; i < nx; ++i) {
    auto v1 = [&](int j) { return v.u1[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 1; j + 1 < ny; j += 2) phi(i, j + 1) = phi(i, j - 1) + 2.0 * g.dy * v1(j);
    phi(i, 1) = (2.0 * g.dy * v1(0) + 3.0 * phi(i, 0) + phi(i, 2)) / 4.0;
    for (int j = 2; j + 1 < ny; j += 2) phi(i, j + 1) = phi(i, j - 1) + 2.0 * g.dy * v1(j);
  }
  return phi;
}

ScalarField advect(const VectorField& v, const ScalarField& f) {
  const Grid& g = f.grid;
  if (!(g == v.grid)) throw GridError("grid-mismatch: fields live on different grids");
  const int nx = g.nx, ny = g.ny;

  const ScalarField phi = stream_potential(v);

  // Nodal products and first derivatives needed at the neighbors of every
  // interior node (boundary values enter the centered interior stencils).
  ScalarField fx(g), fy(g), a(g), b(g), c(g), d(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      fx(i, j) = d1x(f, i, j);
      fy(i, j) = d1y(f, i, j);
      a.v[k] = v.u1[k] * f.v[k];   // flux form, x
      b.v[k] = v.u2[k] * f.v[k];   // flux form, y
      c.v[k] = phi.v[k] * fx.v[k]; // rotational form, y-derivative
      d.v[k] = phi.v[k] * fy.v[k]; // rotational form, x-derivative
    }

  ScalarField out(g);  // boundary rows stay zero
  const double ix = 1.0 / (2.0 * g.dx), iy = 1.0 / (2.0 * g.dy);
  for (int j = 1; j + 1 < ny; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      const double j1 = v.u1[k] * fx.v[k] + v.u2[k] * fy.v[k];
      const double j2 = (a(i + 1, j) - a(i - 1, j)) * ix + (b(i, j + 1) - b(i, j - 1)) * iy;
      const double j3 = (c(i, j + 1) - c(i, j - 1)) * iy - (d(i + 1, j) - d(i - 1, j)) * ix;
      out.v[k] = (j1 + j2 + j3) / 3.0;
    }
  return out;
}

double edge_gradient_energy(const ScalarField& f) {
  const Grid& g = f.grid;
  double ex = 0.0, ey = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double d = f(i + 1, j) - f(i, j);
      ex += d * d;
    }
  for (int i = 1; i + 1 < g.nx; ++i)
    for (int j = 0; j + 1 < g.ny; ++j) {
      const double d = f(i, j + 1) - f(i, j);
      ey += d * d;
    }
  return ex * g.dy / g.dx + ey * g.dx / g.dy;
}

}  // namespace vortlab
