#pragma once

// Deterministic artifact plumbing: shortest round-trip number formatting,
// bit-exact field CSV round-trips, key=value run configs with flag
// overrides, and JSON views of the harness reports.  Every writer stamps
// the producing config hash so an output directory can be traced back to
// its echoed config, and identical configs reproduce identical bytes.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vortlab/forward.hpp"
#include "vortlab/harness.hpp"
#include "vortlab/inverse.hpp"

namespace vortlab {

using Json = nlohmann::ordered_json;

// Shortest decimal form that parses back to the same bits.
std::string format_double(double x);

// Full-string numeric parses after trimming surrounding whitespace; a
// leading '+' is tolerated, nothing else loose.
bool try_parse_double(std::string_view s, double& out);
bool try_parse_int(std::string_view s, long long& out);

// FNV-1a 64 of the bytes, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Field CSV layout: optional leading "# ..." comment lines, the literal
// header row "nx,ny,lx,ly", the four values, then ny rows of nx samples
// (row-major, y outer).  write-then-read returns an identical field.
// Readers throw ConfigError("missing-file: ...") for an unopenable path and
// ConfigError("bad-field-file: ...") for a malformed one.
void write_field_csv(const std::string& path, const ScalarField& f,
                     const std::string& config_hash = "");
ScalarField read_field_csv(const std::string& path);

// Column headers: trajectory "t,h,mean_omega,omega_l2,omega_l4,
// grad_omega_l2,u_h1,u_h2,p_h1"; h "t,h"; residuals "iteration,residual".
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& config_hash);
void write_h_csv(const std::string& path, const BoundaryVorticity& h,
                 const std::string& config_hash);
void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const std::string& config_hash);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

void to_json(Json& j, const EnergyReport& rep);
void to_json(Json& j, const LemmaRow& row);
void to_json(Json& j, const LemmaReport& rep);
void to_json(Json& j, const DecayReport& rep);
void to_json(Json& j, const EllipticProbe& rep);
void to_json(Json& j, const StabilityReport& rep);

enum class RunCommand { Forward, Inverse, Verify, Stability, Convergence };
const char* command_name(RunCommand cmd);

// Effective settings of one run, every field either user-set or defaulted.
// `echo_config` renders the canonical key=value text (sorted keys, shortest
// round-trip numbers); its FNV-1a hash names the run in every output file.
struct RunConfig {
  RunCommand command = RunCommand::Forward;
  int grid_n = 65;
  double lx = 1.0, ly = 1.0;
  double dt = 1e-3;
  double tmax = 0.5;
  std::string fixture = "taylor";
  bool fixture_is_file = false;  // fixture names a field CSV, not a generator
  InverseMethod method = InverseMethod::Projection;
  bool mean_auto = true;      // L = "auto": target the initial mean
  double mean_target = 0.0;   // used when mean_auto is false
  std::string out_dir = "out";
  long seed = 1;
  StoreFields store = StoreFields::Final;  // "norms": rows plus final field
  int store_stride = 1;
  double stop_tol = 1e-8;
  int max_iters = 200;
  std::vector<int> grid_ladder = {33, 65, 129};  // convergence only
};

using ConfigMap = std::map<std::string, std::string>;

// key = value lines; blank lines and lines whose first non-space character
// is '#' are skipped; later duplicates win.  Throws ConfigError
// ("missing-file"/"bad-config-line").
ConfigMap parse_key_value_file(const std::string& path);

// Merge file values with overrides (overrides win), validate every key and
// value, fill defaults.  Throws ConfigError tagged unknown-key,
// type-mismatch, missing-file, or inconsistent-config.
RunConfig make_run_config(RunCommand cmd, const ConfigMap& file_values,
                          const ConfigMap& overrides);

std::string echo_config(const RunConfig& rc);
std::string config_hash(const RunConfig& rc);

// Time-step count nsteps = round(tmax / dt), at least 1; the effective
// horizon is nsteps * dt.
int step_count(const RunConfig& rc);

}  // namespace vortlab
