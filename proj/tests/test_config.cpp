// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <string>

#include "crystalflow/harness/config.hpp"
#include "crystalflow/harness/profiles.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crystalflow;
using crystalflow::test::kPi;

namespace {

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& issues, const std::string& needle) {
  for (const auto& s : issues) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

// Random valid configuration covering every profile, variant and coupling.
ExperimentConfig random_config(std::mt19937_64& rng) {
  auto pick = [&rng](int n) { return static_cast<int>(rng() % n); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ExperimentConfig c;
  c.variant = std::vector<Variant>{Variant::sinh(), Variant::exp(), Variant::linear(),
                                   Variant::scaled_sinh(0.1 + unit(rng), pick(2) == 0),
                                   Variant::p_exponent(2.0 + unit(rng))}[pick(5)];
  c.grid.dim = c.variant.uses_p_laplacian() ? 1 : 1 + pick(2);
  c.grid.nodes = {3 + pick(100), 3 + pick(100)};
  c.grid.extents = {0.5 + unit(rng), 0.5 + unit(rng)};
  c.initial.kind = static_cast<ProfileKind>(pick(5));
  c.initial.value = unit(rng);
  c.initial.amplitude = unit(rng);
  c.initial.mode = pick(4);
  c.initial.width = 0.05 + unit(rng);
  c.initial.seed = rng();
  c.initial.path = "init/u0.csv";
  c.scheme.tau = 1.0 / (1 << pick(8));
  c.scheme.horizon = c.scheme.tau * (1 + pick(20));
  if (pick(2)) c.scheme.coupling = RegCoupling::decoupled(unit(rng) + 1e-6);
  c.scheme.picard_tol = std::pow(10.0, -6 - pick(8));
  c.scheme.picard_max_iter = 1 + pick(500);
  c.scheme.picard_damping = 0.25 + 0.75 * unit(rng);
  c.scheme.newton_fallback = pick(2);
  c.scheme.sinh_arg_cap = 10.0 + 690.0 * unit(rng);
  c.scheme.picard_map = c.variant.uses_p_laplacian() || pick(2) ? PicardMap::FrozenCoupled
                                                                : PicardMap::Alternating;
  c.scheme.linear_backend = pick(2) ? LinearBackend::ConjugateGradient
                                    : LinearBackend::SparseCholesky;
  c.output.directory = "runs/case_" + std::to_string(pick(1000));
  c.output.snapshot_stride = pick(5);
  c.output.height = c.grid.dim == 1 && pick(2);
  if (pick(2)) {
    c.output.reports = c.variant.uses_p_laplacian()
                           ? std::vector<ReportKind>{ReportKind::PEnergy}
                           : std::vector<ReportKind>{ReportKind::Prop33, ReportKind::Prop31};
  }
  return c;
}

}  // namespace

TEST_CASE("minimal config echoes the defaults") {
  const ExperimentConfig c = parse_config(
      "[grid]\ndim = 1\nnodes = 65\n[initial]\nprofile = cosine\n[model]\nvariant = sinh\n");
  const SchemeParams d;
  CHECK(c.scheme == d);
  CHECK(c.scheme.tau == 1e-2);
  CHECK(c.scheme.horizon == 0.1);
  CHECK(c.scheme.picard_tol == 1e-10);
  CHECK(c.scheme.picard_max_iter == 200);
  CHECK(c.scheme.sinh_arg_cap == 700.0);
  CHECK(c.scheme.newton_fallback);
  CHECK(c.grid.nodes[0] == 65);
  CHECK(c.variant == Variant::sinh());
  CHECK(c.effective_reports() ==
        std::vector<ReportKind>{ReportKind::Prop31, ReportKind::Prop32, ReportKind::Prop33});
}

TEST_CASE("empty text is the default configuration") {
  CHECK(parse_config("") == ExperimentConfig{});
  CHECK(parse_config("# only a comment\n; another\n\n") == ExperimentConfig{});
}

TEST_CASE("p_exponent with dim 2 names the compatibility rule") {
  const auto issues = issues_of("[grid]\ndim = 2\n[model]\nvariant = p_exponent\np = 3\n");
  REQUIRE(issues.size() == 1);
  CHECK(any_contains(issues, "line 4:"));
  CHECK(any_contains(issues, "p_exponent requires dim = 1"));
}

TEST_CASE("nodes = 2 cites the grid invariant") {
  const auto issues = issues_of("[grid]\nnodes = 2\n");
  REQUIRE(issues.size() == 1);
  CHECK(any_contains(issues, "line 2:"));
  CHECK(any_contains(issues, ">= 3"));
}

TEST_CASE("all violations are reported with line numbers") {
  const std::string text =
      "[grid]\n"              // 1
      "dim = 1\n"             // 2
      "colour = blue\n"       // 3 unknown key
      "[scheme]\n"            // 4
      "tau = fast\n"          // 5 type mismatch
      "horizon = 0.1\n"       // 6
      "horizon = 0.2\n"       // 7 duplicate
      "[bogus]\n"             // 8 unknown section
      "[output]\n"            // 9
      "height = maybe\n"      // 10 type mismatch
      "not a pair\n";         // 11 malformed
  const auto issues = issues_of(text);
  CHECK(issues.size() == 6);
  for (int line : {3, 5, 7, 8, 10, 11}) {
    CAPTURE(line);
    CHECK(any_contains(issues, "line " + std::to_string(line) + ":"));
  }
}

TEST_CASE("keys that do not apply are rejected") {
  CHECK(any_contains(issues_of("[initial]\nprofile = cosine\nseed = 4\n"),
                     "seed applies only to profile = random_smooth"));
  CHECK(any_contains(issues_of("[scheme]\neps = 0.1\n"),
                     "eps applies only to coupling = decoupled"));
  CHECK(any_contains(issues_of("[model]\nvariant = sinh\nK = 2\n"), "line 3:"));
}

TEST_CASE("cross-field invariants") {
  CHECK(any_contains(issues_of("[initial]\nprofile = random_smooth\n"), "seed"));
  CHECK(any_contains(issues_of("[scheme]\ntau = 0.03\nhorizon = 0.1\n"), "line 2:"));
  CHECK(any_contains(issues_of("[scheme]\ncoupling = decoupled\n"), "eps > 0"));
  CHECK(any_contains(issues_of("[grid]\ndim = 2\n[output]\nheight = true\n"), "height"));
  CHECK(any_contains(issues_of("[output]\nreports = p_energy\n"), "requires variant"));
  CHECK(any_contains(issues_of("[model]\nvariant = p_exponent\n[output]\nreports = prop31\n"),
                     "not defined"));
  CHECK(issues_of("[scheme]\ntau = 0.001\nhorizon = 0.1\n").empty());
}

TEST_CASE("config round trip") {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 200; ++i) {
    const ExperimentConfig c = random_config(rng).canonical();
    REQUIRE_NOTHROW(validate_config(c));
    const std::string text = print_config(c);
    CAPTURE(text);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(print_config(back) == text);
  }
}

TEST_CASE("per-axis values") {
  const ExperimentConfig c =
      parse_config("[grid]\ndim = 2\nnodes = 17, 33\nextent = 2\n");
  CHECK(c.grid.nodes == std::array<int, 2>{17, 33});
  CHECK(c.grid.extents == std::array<double, 2>{2.0, 2.0});
  CHECK(c.grid.make().size() == 17 * 33);
}

TEST_CASE("profiles have zero normal derivative") {
  // One-sided difference at each wall, scaled by h: second order in h for a
  // profile with zero slope there, first order otherwise.
  for (const Grid& g : {Grid::line(257), Grid::box(257, 129, 1.0, 2.0)}) {
    const double h = g.spacing(0);
    for (const Field& f : {cosine_profile(g, 0.3, 2), gaussian_bump_profile(g, 0.5, 0.2),
                           random_smooth_profile(g, 9, 0.5)}) {
      const int n = g.nodes(0);
      for (int j = 0; j < g.nodes(1); ++j) {
        const double left = (f[g.index(1, j)] - f[g.index(0, j)]) / h;
        const double right = (f[g.index(n - 1, j)] - f[g.index(n - 2, j)]) / h;
        CHECK(std::abs(left) <= 50.0 * h);
        CHECK(std::abs(right) <= 50.0 * h);
      }
    }
  }
}

TEST_CASE("profile values") {
  const Grid g = Grid::line(33);
  CHECK(constant_profile(g, 2.5) == Field::constant(g, 2.5));
  const Field c = cosine_profile(g, 0.1, 1);
  CHECK(c[0] == doctest::Approx(0.1));
  CHECK(c[32] == doctest::Approx(-0.1));
  const Field b = gaussian_bump_profile(g, 0.5, 0.1);
  CHECK(b[16] == doctest::Approx(0.5));
  CHECK(b.sup_norm() == doctest::Approx(0.5));
}

TEST_CASE("random_smooth depends only on the seed") {
  const Grid g = Grid::box(17, 17);
  const Field a = random_smooth_profile(g, 1234, 0.4);
  CHECK(a == random_smooth_profile(g, 1234, 0.4));
  CHECK_FALSE(a == random_smooth_profile(g, 1235, 0.4));
  CHECK(a.sup_norm() == doctest::Approx(0.4).epsilon(1e-14));
  // Only non-constant cosine modes: zero mean.
  CHECK(std::abs(integrate(a)) <= 1e-14);
}

TEST_CASE("make_initial follows the config") {
  ExperimentConfig c;
  c.grid.nodes = {9, 9};
  c.initial.kind = ProfileKind::Constant;
  c.initial.value = 3.0;
  CHECK(make_initial(c) == Field::constant(Grid::line(9), 3.0));

  const auto dir = crystalflow::test::scratch_dir("make_initial");
  const std::string path = (dir / "u0.csv").string();
  save_snapshot(path, cosine_profile(Grid::line(9), 0.2, 1));
  c.initial = {};
  c.initial.kind = ProfileKind::Snapshot;
  c.initial.path = path;
  CHECK(make_initial(c) == cosine_profile(Grid::line(9), 0.2, 1));
  c.grid.nodes = {11, 11};
  CHECK_THROWS_AS(make_initial(c), Error);
}
