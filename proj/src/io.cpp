#include "vortlab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vortlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(trim(s.substr(start)));
      return out;
    }
    out.emplace_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write-failure: cannot open '" + path + "' for writing");
  return os;
}

void finish_write(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw Error("write-failure: error while writing '" + path + "'");
}

void put_hash_line(std::ofstream& os, const std::string& config_hash) {
  if (!config_hash.empty()) os << "# config=" << config_hash << "\n";
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool try_parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool try_parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

void write_field_csv(const std::string& path, const ScalarField& f,
                     const std::string& config_hash) {
  std::ofstream os = open_for_write(path);
  put_hash_line(os, config_hash);
  os << "nx,ny,lx,ly\n"
     << f.grid.nx << ',' << f.grid.ny << ',' << format_double(f.grid.lx) << ','
     << format_double(f.grid.ly) << "\n";
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      os << (i ? "," : "") << format_double(f(i, j));
    }
    os << "\n";
  }
  finish_write(os, path);
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("missing-file: field file '" + path + "' cannot be opened");
  const auto bad = [&](const std::string& why) {
    return ConfigError("bad-field-file: '" + path + "': " + why);
  };

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(t);
  }
  if (lines.size() < 2) throw bad("missing header rows");
  if (lines[0] != "nx,ny,lx,ly") throw bad("first row must be 'nx,ny,lx,ly'");

  const std::vector<std::string> dims = split(lines[1], ',');
  if (dims.size() != 4) throw bad("dimension row needs 4 values");
  long long nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  if (!try_parse_int(dims[0], nx) || !try_parse_int(dims[1], ny) ||
      !try_parse_double(dims[2], lx) || !try_parse_double(dims[3], ly)) {
    throw bad("dimension row is not numeric");
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx > 0 && ny > 0 ? nx * ny : 0));
  for (std::size_t r = 2; r < lines.size(); ++r) {
    for (const std::string& tok : split(lines[r], ',')) {
      double v = 0.0;
      if (!try_parse_double(tok, v)) throw bad("non-numeric sample '" + tok + "'");
      values.push_back(v);
    }
  }
  const Grid g = make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
  if (values.size() != static_cast<std::size_t>(g.n_nodes())) {
    std::ostringstream os;
    os << "expected " << g.n_nodes() << " samples, found " << values.size();
    throw bad(os.str());
  }
  return ScalarField(g, std::move(values));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& config_hash) {
  std::ofstream os = open_for_write(path);
  put_hash_line(os, config_hash);
  os << "t,h,mean_omega,omega_l2,omega_l4,grad_omega_l2,u_h1,u_h2,p_h1\n";
  for (const StepRecord& r : traj.rows) {
    os << format_double(r.t) << ',' << format_double(r.h) << ',' << format_double(r.mean_omega)
       << ',' << format_double(r.omega_l2) << ',' << format_double(r.omega_l4) << ','
       << format_double(r.grad_omega_l2) << ',' << format_double(r.u_h1) << ','
       << format_double(r.u_h2) << ',' << format_double(r.p_h1) << "\n";
  }
  finish_write(os, path);
}

void write_h_csv(const std::string& path, const BoundaryVorticity& h,
                 const std::string& config_hash) {
  std::ofstream os = open_for_write(path);
  put_hash_line(os, config_hash);
  os << "t,h\n";
  for (std::size_t k = 0; k < h.values.size(); ++k) {
    os << format_double(h.t0 + static_cast<double>(k) * h.dt) << ',' << format_double(h.values[k])
       << "\n";
  }
  finish_write(os, path);
}

void write_residuals_csv(const std::string& path, const std::vector<double>& residuals,
                         const std::string& config_hash) {
  std::ofstream os = open_for_write(path);
  put_hash_line(os, config_hash);
  os << "iteration,residual\n";
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    os << k << ',' << format_double(residuals[k]) << "\n";
  }
  finish_write(os, path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os = open_for_write(path);
  os << content;
  finish_write(os, path);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os = open_for_write(path);
  os << j.dump(2) << "\n";
  finish_write(os, path);
}

void to_json(Json& j, const EnergyReport& rep) {
  j = Json{{"max_abs", rep.max_abs}, {"mean_abs", rep.mean_abs}, {"residual", rep.residual}};
}

void to_json(Json& j, const LemmaRow& row) {
  j = Json{{"name", row.name},   {"lhs", row.lhs},   {"rhs", row.rhs},
           {"ratio", row.ratio}, {"hard", row.hard}, {"satisfied", row.satisfied}};
}

void to_json(Json& j, const LemmaReport& rep) {
  j = Json{{"hard_ok", rep.hard_ok()}, {"rows", rep.rows}};
}

void to_json(Json& j, const DecayReport& rep) {
  j = Json{{"lambda_fit", rep.lambda_fit},
           {"r_squared", rep.r_squared},
           {"samples", rep.samples},
           {"degenerate", rep.degenerate}};
}

void to_json(Json& j, const EllipticProbe& rep) {
  j = Json{{"samples_used", rep.samples_used},
           {"max_u_h1_over_omega_l2", rep.max_u_h1_over_omega_l2},
           {"mean_u_h1_over_omega_l2", rep.mean_u_h1_over_omega_l2},
           {"max_u_h2_over_omega_h1", rep.max_u_h2_over_omega_h1},
           {"mean_u_h2_over_omega_h1", rep.mean_u_h2_over_omega_h1}};
}

void to_json(Json& j, const StabilityReport& rep) {
  j = Json{{"mean_target_1", rep.mean_target_1},
           {"mean_target_2", rep.mean_target_2},
           {"d_omega0_l2", rep.d_omega0_l2},
           {"du_linf_h1", rep.du_linf_h1},
           {"dp_l2_h1", rep.dp_l2_h1},
           {"dh_l2", rep.dh_l2},
           {"domega_linf_l2", rep.domega_linf_l2},
           {"dgrad_omega_l2l2", rep.dgrad_omega_l2l2},
           {"m_bound", rep.m_bound},
           {"ratio", rep.ratio},
           {"degenerate", rep.degenerate}};
}

const char* command_name(RunCommand cmd) {
  switch (cmd) {
    case RunCommand::Forward: return "forward";
    case RunCommand::Inverse: return "inverse";
    case RunCommand::Verify: return "verify";
    case RunCommand::Stability: return "stability";
    case RunCommand::Convergence: return "convergence";
  }
  return "unknown";
}

ConfigMap parse_key_value_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("missing-file: config file '" + path + "' cannot be opened");
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream os;
      os << "bad-config-line: line " << lineno << " of '" << path << "' has no '='";
      throw ConfigError(os.str());
    }
    const std::string key(trim(t.substr(0, eq)));
    if (key.empty()) {
      std::ostringstream os;
      os << "bad-config-line: line " << lineno << " of '" << path << "' has an empty key";
      throw ConfigError(os.str());
    }
    out[key] = std::string(trim(t.substr(eq + 1)));
  }
  return out;
}

namespace {

[[noreturn]] void type_mismatch(const std::string& key, const std::string& value,
                                const char* expected) {
  throw ConfigError("type-mismatch: key '" + key + "' expects " + expected + ", got '" + value +
                    "'");
}

double want_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!try_parse_double(value, out)) type_mismatch(key, value, "a number");
  return out;
}

long long want_int(const std::string& key, const std::string& value) {
  long long out = 0;
  if (!try_parse_int(value, out)) type_mismatch(key, value, "an integer");
  return out;
}

}  // namespace

RunConfig make_run_config(RunCommand cmd, const ConfigMap& file_values,
                          const ConfigMap& overrides) {
  ConfigMap merged = file_values;
  for (const auto& [k, v] : overrides) merged[k] = v;

  static const std::set<std::string> known = {"grid", "lx",   "ly",    "dt",       "tmax",
                                              "fixture", "method", "L",  "out",      "seed",
                                              "store", "stop-tol", "max-iters", "grids"};
  for (const auto& [k, v] : merged) {
    if (!known.count(k)) {
      throw ConfigError("unknown-key: '" + k + "' is not a recognized setting");
    }
  }
  const auto get = [&](const char* k) -> const std::string* {
    const auto it = merged.find(k);
    return it == merged.end() ? nullptr : &it->second;
  };

  RunConfig rc;
  rc.command = cmd;
  if (const auto* s = get("grid")) rc.grid_n = static_cast<int>(want_int("grid", *s));
  if (const auto* s = get("lx")) rc.lx = want_double("lx", *s);
  if (const auto* s = get("ly")) rc.ly = want_double("ly", *s);
  if (const auto* s = get("dt")) rc.dt = want_double("dt", *s);
  if (const auto* s = get("tmax")) rc.tmax = want_double("tmax", *s);
  if (const auto* s = get("fixture")) rc.fixture = *s;
  if (const auto* s = get("out")) rc.out_dir = *s;
  if (const auto* s = get("seed")) rc.seed = static_cast<long>(want_int("seed", *s));
  if (const auto* s = get("stop-tol")) rc.stop_tol = want_double("stop-tol", *s);
  if (const auto* s = get("max-iters")) {
    rc.max_iters = static_cast<int>(want_int("max-iters", *s));
  }

  if (const auto* s = get("method")) {
    if (*s == "projection") {
      rc.method = InverseMethod::Projection;
    } else if (*s == "landweber") {
      rc.method = InverseMethod::Landweber;
    } else if (*s == "lm") {
      rc.method = InverseMethod::LevenbergMarquardt;
    } else {
      type_mismatch("method", *s, "projection, landweber, or lm");
    }
  }

  if (const auto* s = get("L")) {
    if (*s == "auto") {
      rc.mean_auto = true;
    } else {
      rc.mean_auto = false;
      rc.mean_target = want_double("L", *s);
    }
  }

  if (const auto* s = get("store")) {
    if (*s == "all") {
      rc.store = StoreFields::All;
    } else if (*s == "norms") {
      rc.store = StoreFields::Final;
    } else if (s->rfind("every:", 0) == 0) {
      rc.store = StoreFields::Stride;
      rc.store_stride = static_cast<int>(want_int("store", s->substr(6)));
      if (rc.store_stride < 1) type_mismatch("store", *s, "all, norms, or every:m with m >= 1");
    } else {
      type_mismatch("store", *s, "all, norms, or every:m");
    }
  }

  if (const auto* s = get("grids")) {
    rc.grid_ladder.clear();
    for (const std::string& tok : split(*s, ',')) {
      rc.grid_ladder.push_back(static_cast<int>(want_int("grids", tok)));
    }
  }

  // Cross-field consistency; positivity of extents and grid sizes is the
  // grid factory's contract and surfaces with its own tags at run time.
  const auto inconsistent = [](const std::string& why) {
    return ConfigError("inconsistent-config: " + why);
  };
  if (rc.dt <= 0.0) throw inconsistent("dt must be positive, got " + format_double(rc.dt));
  if (rc.tmax <= 0.0) throw inconsistent("tmax must be positive, got " + format_double(rc.tmax));
  if (rc.dt > rc.tmax) {
    throw inconsistent("dt " + format_double(rc.dt) + " exceeds tmax " + format_double(rc.tmax));
  }
  if (rc.stop_tol <= 0.0) throw inconsistent("stop-tol must be positive");
  if (rc.max_iters < 1) throw inconsistent("max-iters must be at least 1");
  if (rc.seed < 0) throw inconsistent("seed must be nonnegative");
  if (cmd == RunCommand::Convergence && rc.grid_ladder.size() < 3) {
    std::ostringstream os;
    os << "convergence needs at least 3 grid sizes, got " << rc.grid_ladder.size();
    throw inconsistent(os.str());
  }

  if (rc.fixture.size() > 4 && rc.fixture.substr(rc.fixture.size() - 4) == ".csv") {
    rc.fixture_is_file = true;
    if (!std::filesystem::exists(rc.fixture)) {
      throw ConfigError("missing-file: fixture file '" + rc.fixture + "' does not exist");
    }
  }
  return rc;
}

std::string echo_config(const RunConfig& rc) {
  std::ostringstream os;
  os << "L=" << (rc.mean_auto ? std::string("auto") : format_double(rc.mean_target)) << "\n";
  os << "command=" << command_name(rc.command) << "\n";
  os << "dt=" << format_double(rc.dt) << "\n";
  os << "fixture=" << rc.fixture << "\n";
  os << "grid=" << rc.grid_n << "\n";
  os << "grids=";
  for (std::size_t k = 0; k < rc.grid_ladder.size(); ++k) {
    os << (k ? "," : "") << rc.grid_ladder[k];
  }
  os << "\n";
  os << "lx=" << format_double(rc.lx) << "\n";
  os << "ly=" << format_double(rc.ly) << "\n";
  os << "max-iters=" << rc.max_iters << "\n";
  os << "method=";
  switch (rc.method) {
    case InverseMethod::Projection: os << "projection"; break;
    case InverseMethod::Landweber: os << "landweber"; break;
    case InverseMethod::LevenbergMarquardt: os << "lm"; break;
  }
  os << "\n";
  os << "out=" << rc.out_dir << "\n";
  os << "seed=" << rc.seed << "\n";
  os << "stop-tol=" << format_double(rc.stop_tol) << "\n";
  os << "store=";
  switch (rc.store) {
    case StoreFields::All: os << "all"; break;
    case StoreFields::None:
    case StoreFields::Final: os << "norms"; break;
    case StoreFields::Stride: os << "every:" << rc.store_stride; break;
  }
  os << "\n";
  os << "tmax=" << format_double(rc.tmax) << "\n";
  return os.str();
}

std::string config_hash(const RunConfig& rc) { return fnv1a_hex(echo_config(rc)); }

int step_count(const RunConfig& rc) {
  const long long n = std::llround(rc.tmax / rc.dt);
  return static_cast<int>(n < 1 ? 1 : n);
}

}  // namespace vortlab
