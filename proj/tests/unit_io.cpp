#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "vortlab/fixtures.hpp"
#include "vortlab/io.hpp"

#include "test_util.hpp"

using namespace vortlab;

namespace {

// Unique scratch directory per process, removed at static teardown.
struct Scratch {
  std::filesystem::path dir;
  Scratch() {
    dir = std::filesystem::temp_directory_path() /
          ("vortlab-io-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~Scratch() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

Scratch& scratch() {
  static Scratch s;
  return s;
}

void write_lines(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

// --- number formatting -----------------------------------------------------------

TEST_CASE("format_double emits the shortest exact round-trip form") {
  for (const double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.0,
                         3.141592653589793, 1e3}) {
    double back = 0.0;
    REQUIRE(try_parse_double(format_double(x), back));
    CHECK(back == x);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("numeric parses accept full strings only") {
  double d = 0.0;
  CHECK(try_parse_double("1e-3", d));
  CHECK(d == 1e-3);
  CHECK(try_parse_double("+4.5", d));
  CHECK(d == 4.5);
  CHECK(try_parse_double(" 1.5 ", d));  // surrounding whitespace is trimmed
  CHECK(d == 1.5);
  CHECK(!try_parse_double("", d));
  CHECK(!try_parse_double("1.5x", d));
  CHECK(!try_parse_double("1 .5", d));
  CHECK(!try_parse_double("nanx", d));

  long long n = 0;
  CHECK(try_parse_int("42", n));
  CHECK(n == 42);
  CHECK(try_parse_int("-7", n));
  CHECK(n == -7);
  CHECK(try_parse_int("+9", n));
  CHECK(n == 9);
  CHECK(!try_parse_int("4.5", n));
  CHECK(!try_parse_int("12a", n));
  CHECK(!try_parse_int("", n));
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("hello") != fnv1a_hex("hellp"));
}

// --- field CSV ---------------------------------------------------------------------

TEST_CASE("field CSV round-trips bit for bit") {
  const Grid g = make_grid(17, 13, 1.5, 0.75);
  ScalarField f(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& x : f.v) x = dist(rng);

  const std::string path = scratch().path("field.csv");
  write_field_csv(path, f, "deadbeefdeadbeef");
  const ScalarField back = read_field_csv(path);
  CHECK(back.grid.nx == g.nx);
  CHECK(back.grid.ny == g.ny);
  CHECK(back.grid.lx == g.lx);
  CHECK(back.grid.ly == g.ly);
  CHECK(back.v == f.v);

  CHECK(starts_with(slurp(path), "# config=deadbeefdeadbeef\n"));
}

TEST_CASE("field reader names missing and malformed files") {
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { read_field_csv(scratch().path("nope.csv")); }),
                    "missing-file"));

  const std::string bad_header = scratch().path("badheader.csv");
  write_lines(bad_header, "qx,qy,lx,ly\n3,3,1,1\n");
  CHECK(starts_with(thrown_message<ConfigError>([&] { read_field_csv(bad_header); }),
                    "bad-field-file"));

  const std::string short_rows = scratch().path("short.csv");
  write_lines(short_rows, "nx,ny,lx,ly\n9,9,1,1\n0,0,0,0,0,0,0,0,0\n");
  CHECK(starts_with(thrown_message<ConfigError>([&] { read_field_csv(short_rows); }),
                    "bad-field-file"));

  const std::string bad_value = scratch().path("badvalue.csv");
  std::string body = "nx,ny,lx,ly\n9,9,1,1\n";
  for (int j = 0; j < 9; ++j) body += "0,0,0,0,oops,0,0,0,0\n";
  write_lines(bad_value, body);
  CHECK(starts_with(thrown_message<ConfigError>([&] { read_field_csv(bad_value); }),
                    "bad-field-file"));
}

// --- key=value configs ---------------------------------------------------------------

TEST_CASE("key=value parser skips comments and lets later duplicates win") {
  const std::string path = scratch().path("run.cfg");
  write_lines(path,
              "# a comment\n"
              "\n"
              "grid = 33\n"
              "  # indented comment\n"
              "dt = 1e-3\n"
              "grid = 65\n");
  const ConfigMap m = parse_key_value_file(path);
  CHECK(m.size() == 2);
  CHECK(m.at("grid") == "65");
  CHECK(m.at("dt") == "1e-3");

  const std::string bad = scratch().path("bad.cfg");
  write_lines(bad, "grid 33\n");
  CHECK(starts_with(thrown_message<ConfigError>([&] { parse_key_value_file(bad); }),
                    "bad-config-line"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { parse_key_value_file(scratch().path("absent.cfg")); }),
                    "missing-file"));
}

TEST_CASE("run config fills documented defaults") {
  const RunConfig rc = make_run_config(RunCommand::Forward, {}, {});
  CHECK(rc.grid_n == 65);
  CHECK(rc.lx == 1.0);
  CHECK(rc.ly == 1.0);
  CHECK(rc.dt == 1e-3);
  CHECK(rc.tmax == 0.5);
  CHECK(rc.fixture == "taylor");
  CHECK(!rc.fixture_is_file);
  CHECK(rc.method == InverseMethod::Projection);
  CHECK(rc.mean_auto);
  CHECK(rc.out_dir == "out");
  CHECK(rc.seed == 1);
  CHECK(rc.store == StoreFields::Final);
  CHECK(rc.stop_tol == 1e-8);
  CHECK(rc.max_iters == 200);
  CHECK(rc.grid_ladder == std::vector<int>{33, 65, 129});
}

TEST_CASE("run config validation names the offending key") {
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"viscocity", "1"}}, {}); }),
                    "unknown-key"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"grid", "abc"}}, {}); }),
                    "type-mismatch"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"dt", "0.5"}, {"tmax", "0.1"}}, {}); }),
                    "inconsistent-config"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"store", "sometimes"}}, {}); }),
                    "type-mismatch"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Convergence, {{"grids", "33,65"}}, {}); }),
                    "inconsistent-config"));
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"fixture", "absent.csv"}}, {}); }),
                    "missing-file"));
}

TEST_CASE("store parses the three policies") {
  CHECK(make_run_config(RunCommand::Forward, {{"store", "all"}}, {}).store == StoreFields::All);
  CHECK(make_run_config(RunCommand::Forward, {{"store", "norms"}}, {}).store ==
        StoreFields::Final);
  const RunConfig rc = make_run_config(RunCommand::Forward, {{"store", "every:5"}}, {});
  CHECK(rc.store == StoreFields::Stride);
  CHECK(rc.store_stride == 5);
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Forward, {{"store", "every:0"}}, {}); }),
                    "type-mismatch"));
}

TEST_CASE("the mean target is auto unless a number is given") {
  const RunConfig a = make_run_config(RunCommand::Inverse, {{"L", "auto"}}, {});
  CHECK(a.mean_auto);
  const RunConfig b = make_run_config(RunCommand::Inverse, {{"L", "7.25"}}, {});
  CHECK(!b.mean_auto);
  CHECK(b.mean_target == 7.25);
  CHECK(starts_with(thrown_message<ConfigError>(
                        [] { make_run_config(RunCommand::Inverse, {{"L", "lots"}}, {}); }),
                    "type-mismatch"));
}

TEST_CASE("command-line overrides beat file values") {
  const RunConfig rc = make_run_config(RunCommand::Forward, {{"grid", "33"}, {"dt", "1e-3"}},
                                       {{"grid", "129"}});
  CHECK(rc.grid_n == 129);
  CHECK(rc.dt == 1e-3);
}

// --- canonical echo and hashing --------------------------------------------------------

TEST_CASE("echoed config is canonical and the hash tracks every knob") {
  const RunConfig a = make_run_config(RunCommand::Forward, {}, {});
  const RunConfig b = make_run_config(RunCommand::Forward, {{"grid", "65"}}, {});
  CHECK(echo_config(a) == echo_config(b));  // explicit default is no change
  CHECK(config_hash(a) == config_hash(b));

  const std::string echo = echo_config(a);
  CHECK(starts_with(echo, "L="));
  CHECK(echo.find("command=forward\n") != std::string::npos);
  CHECK(echo.find("grid=65\n") != std::string::npos);
  CHECK(echo.back() == '\n');

  RunConfig c = a;
  c.out_dir = "elsewhere";
  CHECK(config_hash(c) != config_hash(a));
  RunConfig d = a;
  d.command = RunCommand::Verify;
  CHECK(config_hash(d) != config_hash(a));
}

TEST_CASE("step count rounds the horizon and never drops below one step") {
  RunConfig rc = make_run_config(RunCommand::Forward, {}, {});
  CHECK(step_count(rc) == 500);
  rc.tmax = 1e-4;  // shorter than dt
  CHECK(step_count(rc) == 1);
  rc.tmax = 0.0995;
  rc.dt = 1e-3;
  CHECK(step_count(rc) == 100);
}

// --- report JSON -------------------------------------------------------------------

TEST_CASE("reports serialize with stable keys") {
  DecayReport rep;
  rep.lambda_fit = 19.5;
  rep.r_squared = 0.999;
  rep.samples = 42;
  const Json j = rep;
  CHECK(j.at("lambda_fit").get<double>() == 19.5);
  CHECK(j.at("samples").get<int>() == 42);
  CHECK(j.at("degenerate").get<bool>() == false);

  LemmaReport lr;
  LemmaRow row;
  row.name = "omega-sup-l2";
  row.lhs = 1.0;
  row.rhs = 2.0;
  row.ratio = 0.5;
  row.hard = true;
  row.satisfied = true;
  lr.rows.push_back(row);
  const Json lj = lr;
  CHECK(lj.at("rows").size() == 1);
  CHECK(lj.at("rows")[0].at("name") == "omega-sup-l2");
  CHECK(lj.at("hard_ok").get<bool>());
}

TEST_CASE("series writers stamp the config hash and a header row") {
  BoundaryVorticity h;
  h.t0 = 0.0;
  h.dt = 0.5;
  h.values = {1.0, 2.0, 3.0};
  const std::string path = scratch().path("h.csv");
  write_h_csv(path, h, "0123456789abcdef");
  const std::string text = slurp(path);
  CHECK(text == "# config=0123456789abcdef\nt,h\n0,1\n0.5,2\n1,3\n");

  const std::string rpath = scratch().path("residuals.csv");
  write_residuals_csv(rpath, {0.5, 0.25}, "0123456789abcdef");
  CHECK(slurp(rpath) ==
        "# config=0123456789abcdef\niteration,residual\n0,0.5\n1,0.25\n");
}
