// Uniform vertex-centered rectangular grid and field containers.
//
// Nodes include the boundary: x_i = i*dx (i = 0..nx-1), y_j = j*dy, with
// dx = lx/(nx-1).  Scalar samples are stored row-major with y as the slow
// index: value(i, j) = v[j*nx + i].

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortlab {

// All library errors derive from Error; `what()` starts with a stable
// kebab-case tag (e.g. "dimension-too-small: ...") that tests match on.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridError : Error { using Error::Error; };            // dimension-too-small, non-positive-extent
struct SolverError : Error { using Error::Error; };          // solver-nonconvergence, eigensolver-nonconvergence
struct BoundaryError : Error { using Error::Error; };        // boundary-not-constant
struct CflError : Error { using Error::Error; };             // cfl-violation
struct CompatibilityError : Error { using Error::Error; };   // incompatible-initial-data, incompatible-L
struct DegenerateResponseError : Error { using Error::Error; }; // degenerate-response
struct StepSizeError : Error { using Error::Error; };        // step-size-too-large
struct ConfigError : Error { using Error::Error; };          // unknown-key, type-mismatch, missing-file, inconsistent-config
struct HarnessError : Error { using Error::Error; };         // insufficient-samples, full-storage-required

struct Grid {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  double dx = 0.0, dy = 0.0;

  bool operator==(const Grid&) const = default;

  int n_nodes() const { return nx * ny; }
  double area() const { return lx * ly; }
  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }
  int idx(int i, int j) const { return j * nx + i; }
  bool on_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
  }
};

// Fewer than 9 nodes per axis leaves no room for the one-sided boundary
// closures plus a genuine interior; extents must be positive.
Grid make_grid(int nx, int ny, double lx, double ly);

// Throws GridError("grid-mismatch: ...") naming `where` when a != b.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<std::size_t>(g.n_nodes()), fill) {}
  ScalarField(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {}

  double& operator()(int i, int j) { return v[static_cast<std::size_t>(j) * grid.nx + i]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(j) * grid.nx + i]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);

// Two components on one shared grid; u1 is the x-component.
struct VectorField {
  Grid grid;
  std::vector<double> u1, u2;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g),
        u1(static_cast<std::size_t>(g.n_nodes()), 0.0),
        u2(static_cast<std::size_t>(g.n_nodes()), 0.0) {}
};

// Boundary data per side, indexed along the side's own axis; corners appear
// in both adjacent sides (bottom/top run over i = 0..nx-1 at j = 0 / ny-1,
// left/right over j = 0..ny-1 at i = 0 / nx-1).
struct BoundaryTrace {
  std::vector<double> bottom, top, left, right;

  static BoundaryTrace constant(const Grid& g, double c);
  static BoundaryTrace zero(const Grid& g) { return constant(g, 0.0); }
};

BoundaryTrace trace_of(const ScalarField& f);

// Sample an analytic function at the grid nodes.
template <class F>
ScalarField sample(const Grid& g, F&& fn) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = fn(g.x(i), g.y(j));
  return out;
}

}  // namespace vortlab
