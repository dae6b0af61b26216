// Quadrature, norms, and finite-difference operators.
//
// One quadrature rule (trapezoidal: half weights on boundary nodes, quarter
// at corners) backs the mean, the inner products, and every integral norm,
// so discrete identities hold in a single consistent metric.  Derivatives
// use second-order centered stencils inside and second-order one-sided
// closures on the boundary.

#pragma once

#include "vortlab/grid.hpp"

namespace vortlab {

enum class NormKind { L2, L4, GradL2, H1, H2, Linf };

// Trapezoidal quadrature weight of node (i, j), i.e. dx*dy scaled by
// 1/2 per boundary axis.
double quad_weight(const Grid& g, int i, int j);

double mean(const ScalarField& f);

double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& a, const VectorField& b);

// Integral norms by the shared quadrature; Linf is the max over nodes
// (pointwise vector magnitude for VectorField).  Vector integral norms are
// the root of the sum of squared component norms.
double norm_spatial(const ScalarField& f, NormKind kind);
double norm_spatial(const VectorField& u, NormKind kind);

VectorField gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField curl(const VectorField& u);  // d(u2)/dx - d(u1)/dy

// Discrete transport term v.grad(f), an Arakawa-style three-term Jacobian.
//
// The three ingredients are the advective form v.grad(f), the flux form
// div(v f), and a rotational form built from a stream potential recovered
// exactly from v by inverting the one-dimensional difference stencils
// (exact whenever v is the perpendicular gradient of some nodal potential,
// as every velocity produced by this library is).  Averaging the three makes
// <f, advect(v, f)> telescope to zero in the quadrature inner product for
// any f vanishing on the boundary -- the class the vorticity equation needs,
// since omega - h has zero trace -- and the value vanishes to rounding
// pointwise when f is aligned with the potential of v (the three forms
// cancel term by term in exact arithmetic).  Boundary nodes are set to
// zero: the solver overwrites them with Dirichlet data.
ScalarField advect(const VectorField& v, const ScalarField& f);

// Gradient energy on cell edges, the form matched to the five-point
// Laplacian: <-Lap_5 f, f> equals edge_gradient_energy(f) exactly for any f
// vanishing on the boundary (and the value ignores constant shifts always,
// being built from differences).  X-edges run over interior rows, y-edges
// over interior columns; each edge carries weight dx*dy.
double edge_gradient_energy(const ScalarField& f);

}  // namespace vortlab
