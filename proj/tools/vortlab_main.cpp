// Command-line front end: subcommands forward | inverse | verify |
// stability | convergence over one shared key=value config (file plus
// flag overrides, flags win).  Every run echoes its effective config,
// stamps all outputs with the config hash, and is bit-reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vortlab/fixtures.hpp"
#include "vortlab/io.hpp"
#include "vortlab/ops.hpp"

using namespace vortlab;

namespace {

ScalarField initial_data(const RunConfig& rc) {
  if (rc.fixture_is_file) return read_field_csv(rc.fixture);
  return make_fixture(make_grid(rc.grid_n, rc.grid_n, rc.lx, rc.ly), rc.fixture);
}

SolverConfig base_solver_config(const RunConfig& rc, const Grid& g) {
  SolverConfig cfg;
  cfg.grid = g;
  cfg.dt = rc.dt;
  cfg.nsteps = step_count(rc);
  cfg.store = rc.store;
  cfg.store_stride = rc.store_stride;
  cfg.track_pressure = true;
  return cfg;
}

void write_echo(const RunConfig& rc, const std::string& hash) {
  write_text_file(rc.out_dir + "/config.echo", "# config=" + hash + "\n" + echo_config(rc));
}

std::string field_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "omega_%06d.csv", step);
  return buf;
}

void write_fields(const RunConfig& rc, const Trajectory& traj, const std::string& hash) {
  const std::string dir = rc.out_dir + "/fields";
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < traj.stored_steps.size(); ++k) {
    write_field_csv(dir + "/" + field_name(traj.stored_steps[k]), traj.omega_fields[k], hash);
  }
  if (!traj.stored_steps.empty() && traj.stored_steps.back() == traj.nsteps) {
    write_field_csv(dir + "/omega_final.csv", traj.final_omega(), hash);
  }
}

Json base_report(const RunConfig& rc, const Grid& g, const std::string& hash) {
  Json j;
  j["config_hash"] = hash;
  j["command"] = command_name(rc.command);
  j["grid"] = Json{{"nx", g.nx}, {"ny", g.ny}, {"lx", g.lx}, {"ly", g.ly}};
  j["dt"] = rc.dt;
  j["nsteps"] = step_count(rc);
  j["fixture"] = rc.fixture;
  return j;
}

Json row_summary(const StepRecord& r) {
  return Json{{"t", r.t},
              {"h", r.h},
              {"mean_omega", r.mean_omega},
              {"omega_l2", r.omega_l2},
              {"grad_omega_l2", r.grad_omega_l2},
              {"u_h1", r.u_h1},
              {"p_h1", r.p_h1}};
}

int cmd_forward(RunConfig rc) {
  const ScalarField w0 = initial_data(rc);
  const SolverConfig cfg = base_solver_config(rc, w0.grid);
  const double h0 = trace_value(w0);
  const std::vector<double> hs(static_cast<std::size_t>(cfg.nsteps) + 1, h0);
  const Trajectory traj = forward_solve(w0, hs, cfg);

  std::filesystem::create_directories(rc.out_dir);
  const std::string hash = config_hash(rc);
  write_echo(rc, hash);
  write_trajectory_csv(rc.out_dir + "/trajectory.csv", traj, hash);
  write_h_csv(rc.out_dir + "/h.csv", BoundaryVorticity{0.0, cfg.dt, traj.h}, hash);
  write_fields(rc, traj, hash);

  double energy_max = 0.0;
  for (const double r : traj.energy_residual) energy_max = std::max(energy_max, std::abs(r));
  Json j = base_report(rc, w0.grid, hash);
  j["h0"] = h0;
  j["energy_residual_max"] = energy_max;
  j["initial"] = row_summary(traj.rows.front());
  j["final"] = row_summary(traj.rows.back());
  write_json_file(rc.out_dir + "/report.json", j);

  std::printf("forward: %d steps on %dx%d, wrote %s\n", cfg.nsteps, w0.grid.nx, w0.grid.ny,
              rc.out_dir.c_str());
  return 0;
}

int cmd_inverse(RunConfig rc) {
  const ScalarField w0 = initial_data(rc);
  const SolverConfig cfg = base_solver_config(rc, w0.grid);
  const double target = rc.mean_auto ? mean(w0) : rc.mean_target;

  InverseConfig icfg;
  icfg.method = rc.method;
  icfg.mean_target = target;
  icfg.max_iters = rc.max_iters;
  icfg.stop_tol = rc.stop_tol;
  const InverseResult res = run_inverse(w0, cfg, icfg);

  std::filesystem::create_directories(rc.out_dir);
  const std::string hash = config_hash(rc);
  write_echo(rc, hash);
  write_trajectory_csv(rc.out_dir + "/trajectory.csv", res.trajectory, hash);
  write_h_csv(rc.out_dir + "/h.csv", res.h, hash);
  write_residuals_csv(rc.out_dir + "/residuals.csv", res.residual_history, hash);
  write_fields(rc, res.trajectory, hash);

  Json j = base_report(rc, w0.grid, hash);
  j["L"] = target;
  j["converged"] = res.converged;
  j["iterations_used"] = res.iterations_used;
  j["final_residual"] = res.residual_history.empty() ? 0.0 : res.residual_history.back();
  j["h_first"] = res.h.values.front();
  j["h_last"] = res.h.values.back();
  write_json_file(rc.out_dir + "/report.json", j);

  std::printf("inverse: converged=%d iterations=%d, wrote %s\n", res.converged ? 1 : 0,
              res.iterations_used, rc.out_dir.c_str());
  return 0;
}

int cmd_verify(RunConfig rc) {
  // The harness reads every time level, so full storage is part of the
  // effective config regardless of what was asked.
  rc.store = StoreFields::All;
  rc.store_stride = 1;

  const ScalarField w0 = initial_data(rc);
  SolverConfig cfg = base_solver_config(rc, w0.grid);
  cfg.track_pressure = false;
  const double target = rc.mean_auto ? mean(w0) : rc.mean_target;
  const InverseResult inv = recover_projection(w0, target, cfg);

  const EnergyReport energy = energy_identity_check(inv.trajectory);
  const LemmaReport lemma = lemma_bounds_check(inv.trajectory);
  const DecayReport decay = decay_fit(inv.trajectory);
  const double poincare = poincare_estimate(w0.grid);
  const EllipticProbe probe =
      elliptic_constant_probe(w0.grid, 20, static_cast<unsigned long>(rc.seed));
  const double side = std::max(w0.grid.lx, w0.grid.ly);
  const double mu_ref = M_PI * M_PI / (side * side);

  std::filesystem::create_directories(rc.out_dir);
  const std::string hash = config_hash(rc);
  write_echo(rc, hash);
  write_trajectory_csv(rc.out_dir + "/trajectory.csv", inv.trajectory, hash);
  write_h_csv(rc.out_dir + "/h.csv", inv.h, hash);
  std::filesystem::create_directories(rc.out_dir + "/fields");
  write_field_csv(rc.out_dir + "/fields/omega_final.csv", inv.trajectory.final_omega(), hash);

  Json j = base_report(rc, w0.grid, hash);
  j["L"] = target;
  j["energy"] = energy;
  j["lemma"] = lemma;
  j["decay"] = decay;
  j["poincare"] = Json{{"estimate", poincare}, {"reference", mu_ref}};
  j["elliptic_probe"] = probe;
  write_json_file(rc.out_dir + "/report.json", j);

  std::printf("verify: hard_ok=%d lambda_fit=%s poincare=%s, wrote %s\n",
              lemma.hard_ok() ? 1 : 0, format_double(decay.lambda_fit).c_str(),
              format_double(poincare).c_str(), rc.out_dir.c_str());
  return 0;
}

int cmd_stability(RunConfig rc) {
  const ScalarField w0 = initial_data(rc);
  const SolverConfig cfg = base_solver_config(rc, w0.grid);

  const std::array<double, 3> eps_ladder = {1e-1, 1e-2, 1e-3};
  const std::array<std::array<int, 2>, 3> modes = {{{1, 1}, {2, 1}, {1, 2}}};

  std::filesystem::create_directories(rc.out_dir);
  const std::string hash = config_hash(rc);
  write_echo(rc, hash);

  Json rows = Json::array();
  std::string csv = "eps,direction,ratio,d_omega0_l2,du_linf_h1,dp_l2_h1,dh_l2,domega_linf_l2,"
                    "dgrad_omega_l2l2,m_bound,degenerate\n";
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  for (const double eps : eps_ladder) {
    for (const auto& kl : modes) {
      char spec[48];
      std::snprintf(spec, sizeof spec, "stream-mode:%d,%d", kl[0], kl[1]);
      const ScalarField dir = make_fixture(w0.grid, spec);
      const ScalarField w2 = w0 + eps * dir;
      const StabilityReport rep = stability_pair(w0, w2, cfg);

      char label[32];
      std::snprintf(label, sizeof label, "mode-%d-%d", kl[0], kl[1]);
      Json row = rep;
      row["eps"] = eps;
      row["direction"] = label;
      rows.push_back(row);
      csv += format_double(eps);
      csv += ',';
      csv += label;
      for (const double v : {rep.ratio, rep.d_omega0_l2, rep.du_linf_h1, rep.dp_l2_h1, rep.dh_l2,
                             rep.domega_linf_l2, rep.dgrad_omega_l2l2, rep.m_bound}) {
        csv += ',';
        csv += format_double(v);
      }
      csv += rep.degenerate ? ",1\n" : ",0\n";
      if (!rep.degenerate) {
        ratio_min = std::min(ratio_min, rep.ratio);
        ratio_max = std::max(ratio_max, rep.ratio);
      }
    }
  }
  write_text_file(rc.out_dir + "/stability.csv", "# config=" + hash + "\n" + csv);

  Json j = base_report(rc, w0.grid, hash);
  j["pairs"] = rows;
  j["ratio_min"] = ratio_min;
  j["ratio_max"] = ratio_max;
  write_json_file(rc.out_dir + "/report.json", j);

  std::printf("stability: %zu pairs, ratio range [%s, %s], wrote %s\n", rows.size(),
              format_double(ratio_min).c_str(), format_double(ratio_max).c_str(),
              rc.out_dir.c_str());
  return 0;
}

int cmd_convergence(RunConfig rc) {
  std::vector<int> ladder = rc.grid_ladder;
  std::sort(ladder.begin(), ladder.end());

  const bool taylor = rc.fixture == "taylor";
  const bool eigenmode = rc.fixture.rfind("stream-mode:", 0) == 0;
  if (!taylor && !eigenmode) {
    throw ConfigError(
        "inconsistent-config: convergence needs an analytic reference; use fixture taylor or "
        "stream-mode:k,l");
  }

  std::vector<double> errors;
  for (const int n : ladder) {
    const Grid g = make_grid(n, n, rc.lx, rc.ly);
    const ScalarField w0 = make_fixture(g, rc.fixture);
    if (taylor) {
      SolverConfig cfg = base_solver_config(rc, g);
      cfg.track_pressure = false;
      const std::vector<double> hs(static_cast<std::size_t>(cfg.nsteps) + 1, 0.0);
      const Trajectory traj = forward_solve(w0, hs, cfg);
      const double lam = M_PI * M_PI * (1.0 / (g.lx * g.lx) + 1.0 / (g.ly * g.ly));
      ScalarField exact = w0;
      exact *= std::exp(-lam * traj.rows.back().t);
      errors.push_back(norm_spatial(traj.final_omega() - exact, NormKind::L2) /
                       norm_spatial(exact, NormKind::L2));
    } else {
      long long k = 0, l = 0;
      const std::vector<std::string> parts = [&] {
        std::vector<std::string> out;
        std::string rest = rc.fixture.substr(12);
        std::size_t pos = rest.find(',');
        out.push_back(rest.substr(0, pos));
        out.push_back(pos == std::string::npos ? "" : rest.substr(pos + 1));
        return out;
      }();
      if (!try_parse_int(parts[0], k) || !try_parse_int(parts[1], l)) {
        throw ConfigError("bad-fixture-argument: stream-mode needs 'k,l', got '" + rc.fixture +
                          "'");
      }
      const double lam = M_PI * M_PI * (static_cast<double>(k * k) / (g.lx * g.lx) +
                                        static_cast<double>(l * l) / (g.ly * g.ly));
      ScalarField exact = w0;
      exact *= 1.0 / lam;
      errors.push_back(norm_spatial(stream_function(w0) - exact, NormKind::L2) /
                       norm_spatial(exact, NormKind::L2));
    }
  }

  std::vector<double> orders;
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const double h_prev = 1.0 / (ladder[i - 1] - 1), h_cur = 1.0 / (ladder[i] - 1);
    orders.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h_prev / h_cur));
  }

  std::filesystem::create_directories(rc.out_dir);
  const std::string hash = config_hash(rc);
  write_echo(rc, hash);
  std::string csv = "n,error,order\n";
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    csv += std::to_string(ladder[i]);
    csv += ',';
    csv += format_double(errors[i]);
    csv += ',';
    if (i > 0) csv += format_double(orders[i - 1]);
    csv += '\n';
  }
  write_text_file(rc.out_dir + "/convergence.csv", "# config=" + hash + "\n" + csv);

  Json j;
  j["config_hash"] = hash;
  j["command"] = command_name(rc.command);
  j["fixture"] = rc.fixture;
  j["grids"] = ladder;
  j["errors"] = errors;
  j["orders"] = orders;
  write_json_file(rc.out_dir + "/report.json", j);

  std::printf("convergence: %zu grids, final order %s, wrote %s\n", ladder.size(),
              format_double(orders.back()).c_str(), rc.out_dir.c_str());
  return 0;
}

std::string error_tag(const char* what) {
  const std::string s(what);
  const std::size_t pos = s.find(':');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortlab: a desk-scale laboratory for recovering uniform boundary vorticity\n"
               "from the mean-vorticity invariant of 2D slip-bounded Navier-Stokes flow"};
  app.require_subcommand(1);

  const std::array<std::pair<const char*, const char*>, 14> defs = {{
      {"grid", "nodes per side of the square grid [65]"},
      {"lx", "domain length in x [1]"},
      {"ly", "domain length in y [1]"},
      {"dt", "time step [0.001]"},
      {"tmax", "horizon; the run takes round(tmax/dt) steps [0.5]"},
      {"fixture",
       "initial data: taylor | constant:c | random-stream:seed,m | stream-mode:k,l | "
       "a field CSV path ending in .csv [taylor]"},
      {"method", "inverse method: projection | landweber | lm [projection]"},
      {"L", "target mean vorticity: a number, or auto = mean of the initial data [auto]"},
      {"out", "output directory [out]"},
      {"seed", "seed for the verify probe samples [1]"},
      {"store", "field storage: all | norms | every:m; norms keeps the final field only [norms]"},
      {"stop-tol", "stopping residual for landweber and lm [1e-08]"},
      {"max-iters", "iteration cap for landweber and lm [200]"},
      {"grids", "comma-separated grid ladder for convergence [33,65,129]"},
  }};
  const std::array<std::pair<const char*, const char*>, 5> subs = {{
      {"forward", "integrate the vorticity equation with h pinned at the initial boundary trace"},
      {"inverse", "recover h(t) from the initial field and the mean-vorticity target L"},
      {"verify", "run the estimate checks (energy, lemma bounds, decay, Poincare, elliptic)"},
      {"stability", "perturbation ladder eps in {1e-1,1e-2,1e-3} x 3 stream-mode directions"},
      {"convergence", "grid-refinement error table for an analytic fixture"},
  }};

  struct SubState {
    CLI::App* sub = nullptr;
    std::string config_path;
    CLI::Option* config_opt = nullptr;
    std::array<std::string, 14> values;
    std::array<CLI::Option*, 14> opts{};
  };
  std::array<SubState, 5> state;
  for (std::size_t s = 0; s < subs.size(); ++s) {
    state[s].sub = app.add_subcommand(subs[s].first, subs[s].second);
    state[s].config_opt = state[s].sub->add_option("--config", state[s].config_path,
                                                   "key=value config file; flags override it");
    for (std::size_t k = 0; k < defs.size(); ++k) {
      state[s].opts[k] = state[s].sub->add_option(std::string("--") + defs[k].first,
                                                  state[s].values[k], defs[k].second);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (std::size_t s = 0; s < subs.size(); ++s) {
      if (!state[s].sub->parsed()) continue;
      ConfigMap file_values;
      if (state[s].config_opt->count() > 0) {
        file_values = parse_key_value_file(state[s].config_path);
      }
      ConfigMap overrides;
      for (std::size_t k = 0; k < defs.size(); ++k) {
        if (state[s].opts[k]->count() > 0) overrides[defs[k].first] = state[s].values[k];
      }
      const RunConfig rc =
          make_run_config(static_cast<RunCommand>(s), file_values, overrides);
      switch (rc.command) {
        case RunCommand::Forward: return cmd_forward(rc);
        case RunCommand::Inverse: return cmd_inverse(rc);
        case RunCommand::Verify: return cmd_verify(rc);
        case RunCommand::Stability: return cmd_stability(rc);
        case RunCommand::Convergence: return cmd_convergence(rc);
      }
    }
  } catch (const Error& e) {
    const Json j{{"error", e.what()}, {"tag", error_tag(e.what())}};
    std::printf("%s\n", j.dump().c_str());
    return 1;
  } catch (const std::exception& e) {
    const Json j{{"error", e.what()}, {"tag", "internal-error"}};
    std::printf("%s\n", j.dump().c_str());
    return 1;
  }
  return 0;
}
