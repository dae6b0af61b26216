#include "vortlab/fixtures.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <vector>

namespace vortlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double parse_double(std::string_view s, const std::string& what) {
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad-fixture-argument: cannot parse " + what + " from '" +
                      std::string(s) + "'");
  return out;
}

long long parse_int(std::string_view s, const std::string& what) {
  long long out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad-fixture-argument: cannot parse " + what + " from '" +
                      std::string(s) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

// The analytic trace of every sine-product fixture is zero; write it exactly
// so trace checks and boundary data see the constant they are promised.
ScalarField zero_boundary(ScalarField f) {
  const Grid& g = f.grid;
  for (int i = 0; i < g.nx; ++i) {
    f(i, 0) = 0.0;
    f(i, g.ny - 1) = 0.0;
  }
  for (int j = 0; j < g.ny; ++j) {
    f(0, j) = 0.0;
    f(g.nx - 1, j) = 0.0;
  }
  return f;
}

// Sum of coef[k][l] sin((k+1) pi x / lx) sin((l+1) pi y / ly).  The sine
// factors vanish at the walls analytically; the endpoint samples are forced
// to exact zeros so every fixture carries an exactly constant trace.
ScalarField sine_sum(const Grid& g, const std::vector<std::vector<double>>& coef) {
  const int m = static_cast<int>(coef.size());
  std::vector<std::vector<double>> sx(static_cast<std::size_t>(m)),
      sy(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    sx[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i)
      sx[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          std::sin((k + 1) * kPi * g.x(i) / g.lx);
    sy[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(g.ny));
    for (int j = 0; j < g.ny; ++j)
      sy[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
          std::sin((k + 1) * kPi * g.y(j) / g.ly);
    sx[static_cast<std::size_t>(k)].front() = 0.0;
    sx[static_cast<std::size_t>(k)].back() = 0.0;
    sy[static_cast<std::size_t>(k)].front() = 0.0;
    sy[static_cast<std::size_t>(k)].back() = 0.0;
  }
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          s += coef[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] *
               sx[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
               sy[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      out(i, j) = s;
    }
  return out;
}

}  // namespace

ScalarField make_fixture(const Grid& g, const std::string& name) {
  const std::size_t colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string args = colon == std::string::npos ? std::string() : name.substr(colon + 1);

  if (head == "taylor") {
    if (!args.empty()) throw ConfigError("bad-fixture-argument: taylor takes no arguments");
    const double amp = kPi * kPi * (1.0 / (g.lx * g.lx) + 1.0 / (g.ly * g.ly));
    return zero_boundary(sample(g, [&](double x, double y) {
      return amp * std::sin(kPi * x / g.lx) * std::sin(kPi * y / g.ly);
    }));
  }

  if (head == "constant") {
    const auto parts = split(args, ',');
    if (parts.size() != 1)
      throw ConfigError("bad-fixture-argument: constant needs one value, e.g. constant:2.5");
    return ScalarField(g, parse_double(parts[0], "constant value"));
  }

  if (head == "random-stream") {
    const auto parts = split(args, ',');
    if (parts.size() != 2)
      throw ConfigError(
          "bad-fixture-argument: random-stream needs seed,modes, e.g. random-stream:7,4");
    const long long seed = parse_int(parts[0], "seed");
    const long long m = parse_int(parts[1], "mode count");
    if (m < 1 || m >= std::min(g.nx, g.ny) - 1)
      throw ConfigError("bad-fixture-argument: mode count must be in [1, min(nx,ny)-2)");
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    // omega = -Lap psi applied mode by mode, then scaled to unit L2 norm
    // (the sine modes are orthogonal under the trapezoid rule, so the
    // analytic normalization is exact on the grid).
    std::vector<std::vector<double>> coef(static_cast<std::size_t>(m),
                                          std::vector<double>(static_cast<std::size_t>(m)));
    double norm_sq = 0.0;
    for (long long k = 1; k <= m; ++k)
      for (long long l = 1; l <= m; ++l) {
        const double a = unit(rng);
        const double lam = kPi * kPi * (static_cast<double>(k * k) / (g.lx * g.lx) +
                                        static_cast<double>(l * l) / (g.ly * g.ly));
        const double c = a * lam;
        coef[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)] = c;
        norm_sq += c * c * g.lx * g.ly / 4.0;
      }
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (auto& row : coef)
      for (double& c : row) c *= scale;
    return sine_sum(g, coef);
  }

  if (head == "stream-mode") {
    const auto parts = split(args, ',');
    if (parts.size() != 2)
      throw ConfigError("bad-fixture-argument: stream-mode needs k,l, e.g. stream-mode:1,2");
    const long long k = parse_int(parts[0], "x mode");
    const long long l = parse_int(parts[1], "y mode");
    if (k < 1 || l < 1 || k >= g.nx - 1 || l >= g.ny - 1)
      throw ConfigError("bad-fixture-argument: mode numbers must be >= 1 and resolvable");
    const double amp = 2.0 / std::sqrt(g.lx * g.ly);
    return zero_boundary(sample(g, [&](double x, double y) {
      return amp * std::sin(static_cast<double>(k) * kPi * x / g.lx) *
             std::sin(static_cast<double>(l) * kPi * y / g.ly);
    }));
  }

  throw ConfigError("unknown-fixture: '" + head +
                    "' (expected taylor, constant, random-stream, or stream-mode)");
}

}  // namespace vortlab
