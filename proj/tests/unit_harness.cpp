#include "doctest.h"

#include <cmath>
#include <vector>

#include "vortlab/fixtures.hpp"
#include "vortlab/harness.hpp"
#include "vortlab/ops.hpp"

#include "test_util.hpp"

using namespace vortlab;

namespace {

Trajectory projection_run(const ScalarField& w0, double tmax, double dt,
                          StoreFields store = StoreFields::All) {
  SolverConfig cfg;
  cfg.grid = w0.grid;
  cfg.dt = dt;
  cfg.nsteps = static_cast<int>(tmax / dt + 0.5);
  cfg.store = store;
  return recover_projection(w0, mean(w0), cfg).trajectory;
}

Trajectory zero_boundary_run(const ScalarField& w0, double tmax, double dt,
                             StoreFields store = StoreFields::All) {
  SolverConfig cfg;
  cfg.grid = w0.grid;
  cfg.dt = dt;
  cfg.nsteps = static_cast<int>(tmax / dt + 0.5);
  cfg.store = store;
  const std::vector<double> h(static_cast<std::size_t>(cfg.nsteps) + 1, 0.0);
  return forward_solve(w0, h, cfg);
}

}  // namespace

// --- energy identity ------------------------------------------------------------

TEST_CASE("energy identity residual vanishes on the constant solution") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "constant:2");
  const Trajectory traj = projection_run(w0, 0.02, 1e-3);
  const EnergyReport rep = energy_identity_check(traj);
  CHECK(rep.residual.size() == 20);
  CHECK(rep.max_abs < 1e-9);
}

TEST_CASE("energy identity residual shrinks at second order in dt") {
  const Grid g = make_grid(33, 33, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  std::vector<double> maxima;
  for (const double dt : {2e-3, 1e-3, 5e-4}) {
    const EnergyReport rep = energy_identity_check(projection_run(w0, 0.1, dt));
    maxima.push_back(rep.max_abs);
    CHECK(rep.mean_abs <= rep.max_abs);
  }
  for (std::size_t k = 1; k < maxima.size(); ++k) {
    const double order = std::log2(maxima[k - 1] / maxima[k]);
    CHECK(order > 1.8);
    CHECK(order < 3.0);
  }
}

TEST_CASE("energy identity check demands full field storage") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  const Trajectory traj = projection_run(w0, 0.02, 1e-3, StoreFields::Final);
  CHECK(starts_with(thrown_message<HarnessError>([&] { energy_identity_check(traj); }),
                    "full-storage-required"));
}

// --- a priori bounds --------------------------------------------------------------

TEST_CASE("hard bounds hold along an invariant-mode trajectory") {
  const Grid g = make_grid(33, 33, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  const Trajectory traj = projection_run(w0, 0.2, 1e-3);
  const LemmaReport rep = lemma_bounds_check(traj);

  REQUIRE(rep.rows.size() == 7);
  const char* names[] = {"omega-sup-l2", "grad-omega-l2l2", "u-sup-h1",    "u-l2h2",
                         "dtu-gradp-l2l2", "h-l2",          "omega-l4-sq"};
  for (std::size_t k = 0; k < 7; ++k) {
    CHECK(rep.rows[k].name == names[k]);
    CHECK(std::isfinite(rep.rows[k].ratio));
    CHECK(rep.rows[k].ratio >= 0.0);
  }
  CHECK(rep.rows[0].hard);
  CHECK(rep.rows[1].hard);
  for (std::size_t k = 2; k < 7; ++k) CHECK(!rep.rows[k].hard);
  CHECK(rep.hard_ok());
}

TEST_CASE("the supremum bound is an equality for the constant solution") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "constant:3");
  const LemmaReport rep = lemma_bounds_check(projection_run(w0, 0.02, 1e-3));
  const double n0 = norm_spatial(w0, NormKind::L2);
  CHECK(rep.rows[0].lhs == doctest::Approx(n0).epsilon(1e-12));
  CHECK(rep.rows[0].satisfied);
  CHECK(rep.rows[1].lhs == doctest::Approx(0.0).scale(n0).epsilon(1e-10));
  CHECK(rep.hard_ok());
}

TEST_CASE("bound checks demand full field storage") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  const Trajectory traj = projection_run(w0, 0.02, 1e-3, StoreFields::None);
  CHECK(starts_with(thrown_message<HarnessError>([&] { lemma_bounds_check(traj); }),
                    "full-storage-required"));
}

// --- decay fit --------------------------------------------------------------------

TEST_CASE("zero-boundary decay rate matches the slowest Dirichlet mode") {
  const Grid g = make_grid(33, 33, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  const DecayReport rep = decay_fit(zero_boundary_run(w0, 0.3, 1e-3));
  CHECK(!rep.degenerate);
  CHECK(rep.lambda_fit == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-2));
  CHECK(rep.r_squared > 0.99999);
  CHECK(rep.samples >= 10);
}

TEST_CASE("decay fit reports the constant solution as degenerate") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "constant:2");
  const DecayReport rep = decay_fit(projection_run(w0, 0.05, 1e-3));
  CHECK(rep.degenerate);
}

TEST_CASE("decay fit refuses windows with fewer than ten rows") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField w0 = make_fixture(g, "taylor");
  const Trajectory traj = zero_boundary_run(w0, 0.01, 1e-3);
  CHECK(starts_with(thrown_message<HarnessError>([&] { decay_fit(traj); }),
                    "insufficient-samples"));
}

// --- spectral constants -------------------------------------------------------------

TEST_CASE("smallest mirror eigenvalue approaches pi^2 at second order") {
  const double pi2 = M_PI * M_PI;
  std::vector<double> errs;
  for (const int n : {17, 33, 65}) {
    const double mu = poincare_estimate(make_grid(n, n, 1.0, 1.0));
    CHECK(mu < pi2);
    errs.push_back(pi2 - mu);
  }
  CHECK(errs[1] == doctest::Approx(pi2 - 9.861679777).epsilon(1e-6));
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double order = std::log2(errs[k - 1] / errs[k]);
    CHECK(order > 1.9);
    CHECK(order < 2.1);
  }
}

TEST_CASE("the mirror eigenvalue scales with the longer box side") {
  const Grid g = make_grid(33, 17, 2.0, 1.0);
  const double pi2 = M_PI * M_PI;
  CHECK(poincare_estimate(g) == doctest::Approx(pi2 / 4.0).epsilon(1e-3));
}

TEST_CASE("elliptic probe is seeded, deterministic, and validates its sample count") {
  const Grid g = make_grid(33, 33, 1.0, 1.0);
  const EllipticProbe a = elliptic_constant_probe(g, 10, 7);
  const EllipticProbe b = elliptic_constant_probe(g, 10, 7);
  CHECK(a.samples_used == b.samples_used);
  CHECK(a.samples_used >= 1);
  CHECK(a.max_u_h1_over_omega_l2 == b.max_u_h1_over_omega_l2);
  CHECK(a.max_u_h2_over_omega_h1 == b.max_u_h2_over_omega_h1);
  CHECK(a.max_u_h1_over_omega_l2 >= a.mean_u_h1_over_omega_l2);
  CHECK(a.mean_u_h1_over_omega_l2 > 0.0);
  CHECK(a.max_u_h2_over_omega_h1 >= a.mean_u_h2_over_omega_h1);

  CHECK(starts_with(thrown_message<ConfigError>(
                        [&] { elliptic_constant_probe(g, 0, 7); }),
                    "bad-sample-count"));
}

// --- stability pairs ----------------------------------------------------------------

TEST_CASE("stability pair is symmetric in its arguments") {
  const Grid g = make_grid(33, 33, 1.0, 1.0);
  const ScalarField a = make_fixture(g, "random-stream:3,4");
  const ScalarField b = make_fixture(g, "random-stream:9,4");
  SolverConfig cfg;
  cfg.grid = g;
  cfg.dt = 1e-3;
  cfg.nsteps = 50;

  const StabilityReport ab = stability_pair(a, b, cfg);
  const StabilityReport ba = stability_pair(b, a, cfg);
  CHECK(!ab.degenerate);
  CHECK(ab.d_omega0_l2 == ba.d_omega0_l2);
  CHECK(ab.du_linf_h1 == ba.du_linf_h1);
  CHECK(ab.dh_l2 == ba.dh_l2);
  CHECK(ab.ratio == ba.ratio);
  CHECK(ab.mean_target_1 == ba.mean_target_2);
  CHECK(ab.ratio > 0.0);
  CHECK(ab.m_bound == doctest::Approx(1.0).epsilon(1e-10));  // both data are unit norm
}

TEST_CASE("stability pair flags coincident data as degenerate") {
  const Grid g = make_grid(17, 17, 1.0, 1.0);
  const ScalarField a = make_fixture(g, "taylor");
  SolverConfig cfg;
  cfg.grid = g;
  cfg.dt = 1e-3;
  cfg.nsteps = 20;
  const StabilityReport rep = stability_pair(a, a, cfg);
  CHECK(rep.degenerate);
  CHECK(rep.ratio == 0.0);
}

TEST_CASE("stability pair rejects data on different grids") {
  const Grid g1 = make_grid(17, 17, 1.0, 1.0);
  const Grid g2 = make_grid(33, 33, 1.0, 1.0);
  const ScalarField a = make_fixture(g1, "taylor");
  const ScalarField b = make_fixture(g2, "taylor");
  SolverConfig cfg;
  cfg.grid = g1;
  cfg.dt = 1e-3;
  cfg.nsteps = 20;
  CHECK(starts_with(thrown_message<GridError>([&] { stability_pair(a, b, cfg); }),
                    "grid-mismatch"));
}
