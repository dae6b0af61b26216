#pragma once

// Named initial-data generators, selectable from the command line.
//
//   "taylor"                  the decaying vortex pi^2 (1/lx^2 + 1/ly^2)
//                             sin(pi x/lx) sin(pi y/ly); its stream function
//                             is the same product, so the discrete transport
//                             term vanishes identically and the run has a
//                             closed-form decay rate.
//   "constant:c"              omega0 == c.
//   "random-stream:seed,m"    omega = -Lap psi for a random stream function
//                             psi built from the first m x m sine modes with
//                             coefficients from mt19937_64(seed), scaled so
//                             the L2 norm of omega0 is exactly 1.
//   "stream-mode:k,l"         the single mode sin(k pi x/lx) sin(l pi y/ly)
//                             scaled to unit L2 norm; useful as a
//                             perturbation direction.
//
// Every fixture has a spatially constant boundary trace, as the evolution
// equation requires.

#include <string>

#include "vortlab/grid.hpp"

namespace vortlab {

// Throws ConfigError("unknown-fixture: ...") for an unrecognized name and
// ConfigError("bad-fixture-argument: ...") for malformed parameters.
ScalarField make_fixture(const Grid& g, const std::string& name);

}  // namespace vortlab
