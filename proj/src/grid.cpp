#include "vortlab/grid.hpp"

namespace vortlab {

Grid make_grid(int nx, int ny, double lx, double ly) {
  if (nx < 9 || ny < 9)
    throw GridError("dimension-too-small: need at least 9 nodes per axis, got " +
                    std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0))
    throw GridError("non-positive-extent: lx and ly must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.dx = lx / (nx - 1);
  g.dy = ly / (ny - 1);
  return g;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b))
    throw GridError(std::string("grid-mismatch: fields live on different grids (") + where + ")");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid, o.grid, "field arithmetic");
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid, o.grid, "field arithmetic");
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& x : v) x *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

BoundaryTrace BoundaryTrace::constant(const Grid& g, double c) {
  BoundaryTrace t;
  t.bottom.assign(static_cast<std::size_t>(g.nx), c);
  t.top.assign(static_cast<std::size_t>(g.nx), c);
  t.left.assign(static_cast<std::size_t>(g.ny), c);
  t.right.assign(static_cast<std::size_t>(g.ny), c);
  return t;
}

BoundaryTrace trace_of(const ScalarField& f) {
  const Grid& g = f.grid;
  BoundaryTrace t;
  t.bottom.resize(static_cast<std::size_t>(g.nx));
  t.top.resize(static_cast<std::size_t>(g.nx));
  t.left.resize(static_cast<std::size_t>(g.ny));
  t.right.resize(static_cast<std::size_t>(g.ny));
  for (int i = 0; i < g.nx; ++i) {
    t.bottom[static_cast<std::size_t>(i)] = f(i, 0);
    t.top[static_cast<std::size_t>(i)] = f(i, g.ny - 1);
  }
  for (int j = 0; j < g.ny; ++j) {
    t.left[static_cast<std::size_t>(j)] = f(0, j);
    t.right[static_cast<std::size_t>(j)] = f(g.nx - 1, j);
  }
  return t;
}

}  // namespace vortlab
