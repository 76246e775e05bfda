// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "crystalflow/error.hpp"
#include "crystalflow/harness/profiles.hpp"
#include "crystalflow/stepper.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crystalflow;
using crystalflow::test::kPi;

namespace {

SchemeParams params(double tau, double horizon) {
  SchemeParams p;
  p.tau = tau;
  p.horizon = horizon;
  return p;
}

Field cosine(const Grid& g, double amp) {
  return Field::sample(g, [amp](double x, double) { return amp * std::cos(kPi * x); });
}

double l2(const Field& f) { return std::sqrt(inner(f, f)); }

// Reflection about the box midpoint along every axis.
Field reflect(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  for (int i = 0; i < g.nodes(0); ++i) {
    for (int j = 0; j < g.nodes(1); ++j) {
      out[g.index(i, j)] = f[g.index(g.nodes(0) - 1 - i, g.nodes(1) - 1 - j)];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scheme parameters") {
  SchemeParams p = params(0.01, 0.1);
  CHECK(p.step_count() == 10);
  CHECK(p.reg_weight() == 0.01);
  p.coupling = RegCoupling::decoupled(1e-4);
  CHECK(p.reg_weight() == 1e-4);
  p.horizon = 0.105;
  CHECK_THROWS_AS(p.step_count(), Error);
  CHECK_THROWS_AS(params(0.0, 1.0).validate(), Error);
  CHECK_THROWS_AS(params(0.3, 1.0).validate(), Error);  // 1/0.3 not integral
}

TEST_CASE("init_w0") {
  const Grid g = Grid::line(33);
  SUBCASE("constant") {
    const Field w0 = init_w0(Field::constant(g, 3.0), params(0.5, 1.0));
    CHECK((w0 - Field::constant(g, 1.5)).sup_norm() <= 1e-15);
  }
  SUBCASE("zero") {
    CHECK(init_w0(Field(g), params(0.5, 1.0)).sup_norm() == 0.0);
  }
  SUBCASE("small weight approaches the negative laplacian") {
    SchemeParams p = params(0.01, 0.01);
    p.coupling = RegCoupling::decoupled(1e-12);
    const Grid fine = Grid::line(129);
    const Field w0 = init_w0(cosine(fine, 1.0), p);
    const Field exact = cosine(fine, kPi * kPi);
    CHECK((w0 - exact).sup_norm() <= 1e-3);
  }
  SUBCASE("defines the constraint exactly") {
    const SchemeParams p = params(0.01, 0.01);
    const Field u0 = cosine(g, 0.2);
    const StepResidual r = step_residual(u0, u0, init_w0(u0, p), p);
    CHECK(r.constraint.sup_norm() == 0.0);
  }
}

TEST_CASE("fixed-point step: constant mode closed form") {
  const Grid g = Grid::box(9, 9);
  const Field v = Field::constant(g, 2.0);
  const double u_exact = 2.0 / (1.0 + 0.125);

  SUBCASE("frozen coupled map") {
    const SchemeParams p = params(0.5, 0.5);
    const StepResult s = fixed_point_step(v, p, init_w0(v, p));
    CHECK((s.u - Field::constant(g, u_exact)).sup_norm() <= 1e-12);
    CHECK((s.w - Field::constant(g, 0.5 * u_exact)).sup_norm() <= 1e-12);
    CHECK(s.diagnostics.residual_inf <= p.picard_tol);
    CHECK_FALSE(s.diagnostics.newton_used);
  }
  SUBCASE("alternating map") {
    SchemeParams p = params(0.5, 0.5);
    p.picard_map = PicardMap::Alternating;
    const StepResult s = fixed_point_step(v, p, init_w0(v, p));
    CHECK((s.u - Field::constant(g, u_exact)).sup_norm() <= 1e-10);
    CHECK((s.w - Field::constant(g, 0.5 * u_exact)).sup_norm() <= 1e-10);
    CHECK(s.diagnostics.residual_inf <= p.picard_tol);
  }
}

TEST_CASE("fixed-point step: zero is a fixed point") {
  const Grid g = Grid::line(17);
  const StepResult s = fixed_point_step(Field(g), params(0.1, 0.1), Field(g));
  CHECK(s.u.sup_norm() == 0.0);
  CHECK(s.w.sup_norm() == 0.0);
}

TEST_CASE("fixed-point and Newton agree") {
  const Grid g = Grid::line(65);
  const SchemeParams p = params(0.01, 0.01);
  const Field v = cosine(g, 0.1);
  const Field w0 = init_w0(v, p);
  const StepResult pic = fixed_point_step(v, p, w0);
  const StepResult newt = newton_step(v, p, v, w0);
  CHECK((pic.u - newt.u).sup_norm() <= 10.0 * p.picard_tol);
  CHECK((pic.w - newt.w).sup_norm() <= 10.0 * p.picard_tol);
}

TEST_CASE("alternating map converges to the same step for moderate tau") {
  const Grid g = Grid::line(33);
  SchemeParams p = params(0.5, 0.5);
  p.picard_map = PicardMap::Alternating;
  const Field v = cosine(g, 0.05);
  const StepResult alt = fixed_point_step(v, p, init_w0(v, p));
  p.picard_map = PicardMap::FrozenCoupled;
  const StepResult frozen = fixed_point_step(v, p, init_w0(v, p));
  CHECK_FALSE(alt.diagnostics.newton_used);
  CHECK((alt.u - frozen.u).sup_norm() <= 1e-8);
  CHECK((alt.w - frozen.w).sup_norm() <= 1e-8);
}

TEST_CASE("Newton step") {
  const Grid g = Grid::line(65);
  const SchemeParams p = params(0.01, 0.01);

  SUBCASE("constant mode") {
    SchemeParams q = params(0.5, 0.5);
    const Field v = Field::constant(g, 2.0);
    const StepResult s = newton_step(v, q, v, init_w0(v, q));
    CHECK((s.u - Field::constant(g, 2.0 / 1.125)).sup_norm() <= 1e-12);
  }
  SUBCASE("exact guess needs at most one iteration") {
    const Field v = cosine(g, 0.1);
    const StepResult ref = fixed_point_step(v, p, init_w0(v, p));
    const StepResult s = newton_step(v, p, ref.u, ref.w);
    CHECK(s.diagnostics.newton_iters <= 1);
    CHECK(s.diagnostics.residual_inf <= p.picard_tol);
  }
  SUBCASE("quadratic residual decay") {
    const Field v = random_smooth_profile(g, 42, 0.3);
    const StepResult s = newton_step(v, p, v, init_w0(v, p));
    const std::vector<double>& h = s.diagnostics.residual_history;
    REQUIRE(h.size() >= 3);
    // Order estimate from the last three residuals still above round-off.
    double best = 0.0;
    for (std::size_t i = 2; i < h.size(); ++i) {
      if (h[i] <= 1e-14) break;
      const double q = std::log(h[i] / h[i - 1]) / std::log(h[i - 1] / h[i - 2]);
      best = std::max(best, q);
    }
    MESSAGE("Newton residuals: " << h.size() << " entries, best order " << best);
    CHECK(best >= 1.8);
  }
}

TEST_CASE("step failure carries the residual history") {
  const Grid g = Grid::line(33);
  SchemeParams p = params(0.01, 0.01);
  p.picard_max_iter = 1;
  p.newton_fallback = false;
  const Field v = cosine(g, 0.3);
  try {
    fixed_point_step(v, p, init_w0(v, p));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepFailure);
    CHECK(e.residuals().size() == 1);
  }
}

TEST_CASE("run: constant mode recursion") {
  const Grid g = Grid::box(9, 9);
  const double tau = 0.5;
  const Trajectory t = run(Field::constant(g, 2.0), params(tau, 4.0));
  REQUIRE(t.records.size() == 9);
  for (const StepRecord& r : t.records) {
    const double exact = 2.0 / std::pow(1.0 + tau * tau * tau, r.k);
    CHECK((r.u - Field::constant(g, exact)).sup_norm() <= 1e-12);
  }
}

TEST_CASE("run: linear variant damps a cosine mode by the backward-Euler factor") {
  // cos(pi x) is an eigenvector of the mirror stencil with eigenvalue mu, so
  // w = (mu + eps) u and each step divides u by 1 + tau (mu + eps)^2.
  const Grid g = Grid::line(65);
  const double h = g.spacing(0);
  const double mu = (2.0 - 2.0 * std::cos(kPi * h)) / (h * h);
  const double eps = 1e-4;
  for (double tau : {1e-2, 2.5e-3}) {
    SchemeParams p = params(tau, 0.1);
    p.coupling = RegCoupling::decoupled(eps);
    const Trajectory t = run(cosine(g, 0.1), p, Variant::linear());
    const double factor = 1.0 / (1.0 + tau * (mu + eps) * (mu + eps));
    for (const StepRecord& r : t.records) {
      CHECK((r.u - cosine(g, 0.1 * std::pow(factor, r.k))).sup_norm() <= 1e-12);
    }
  }
}

TEST_CASE("run: zero stays zero and the observer sees every record") {
  const Grid g = Grid::line(17);
  int seen = 0;
  const Trajectory t =
      run(Field(g), params(0.1, 0.5), Variant::sinh(),
          [&seen](const StepRecord& r) { CHECK(r.k == seen++); });
  CHECK(seen == 6);
  for (const StepRecord& r : t.records) {
    CHECK(r.u.sup_norm() == 0.0);
    CHECK(r.w.sup_norm() == 0.0);
  }
}

TEST_CASE("run: mass identity and zero-mean echo") {
  for (const Grid& g : {Grid::line(65), Grid::box(17, 17)}) {
    const SchemeParams p = params(1e-2, 0.1);
    const Trajectory t = run(random_smooth_profile(g, 7, 0.4), p);
    const double eps = p.reg_weight();
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const double mass = integrate(t.records[k].u);
      const double prev = integrate(t.records[k - 1].u);
      const double defect = (mass - prev) / p.tau + eps * integrate(t.records[k].w);
      CHECK(std::abs(defect) <= 10.0 * p.picard_tol);
      CHECK(std::abs(integrate(t.records[k].w) - eps * mass) <=
            10.0 * p.picard_tol * (1.0 + t.records[k].w.sup_norm()));
    }
  }
}

TEST_CASE("run: contraction between two trajectories") {
  const Grid g = Grid::line(33);
  const SchemeParams p = params(1e-2, 0.2);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Trajectory a = run(random_smooth_profile(g, seed, 0.4), p);
    const Trajectory b = run(random_smooth_profile(g, seed + 50, 0.4), p);
    double prev = l2(a.records[0].u - b.records[0].u);
    for (std::size_t k = 1; k < a.records.size(); ++k) {
      const double d = l2(a.records[k].u - b.records[k].u);
      CHECK(d <= prev + 1e-9);
      prev = d;
    }
  }
}

TEST_CASE("run: reflection symmetry is preserved") {
  const Grid g = Grid::box(17, 17);
  const Field u0 = Field::sample(g, [](double x, double y) {
    return 0.2 * std::cos(2.0 * kPi * x) * std::cos(2.0 * kPi * y) +
           0.1 * std::cos(2.0 * kPi * x);
  });
  REQUIRE((u0 - reflect(u0)).sup_norm() <= 1e-15);
  const Trajectory t = run(u0, params(1e-2, 0.05));
  for (const StepRecord& r : t.records) {
    CHECK((r.u - reflect(r.u)).sup_norm() <= 1e-9);
  }
}

TEST_CASE("run: variants complete with residuals within tolerance") {
  const Grid g = Grid::line(33);
  const SchemeParams p = params(1e-2, 0.05);
  const Field u0 = cosine(g, 0.1);
  for (const Variant& v : {Variant::exp(), Variant::linear(), Variant::scaled_sinh(0.5),
                           Variant::scaled_sinh(2.0, false), Variant::p_exponent(3.0)}) {
    const Trajectory t = run(u0, p, v);
    CHECK(t.records.size() == 6);
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const StepResidual r =
          step_residual(t.records[k - 1].u, t.records[k].u, t.records[k].w, p, v);
      CHECK(r.relative_to(p.picard_tol) <= 10.0);
    }
  }
}

TEST_CASE("run: records meet the absolute tolerance") {
  for (const Grid& g : {Grid::line(65), Grid::box(33, 33)}) {
    const SchemeParams p = params(1e-2, 0.1);
    const Trajectory t = run(random_smooth_profile(g, 7, 0.5), p);
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      const StepRecord& r = t.records[k];
      CHECK(r.residual_inf <= p.picard_tol);
      const Field defect = constraint_operator(r.u, p.reg_weight(), Variant::sinh()) - r.w;
      CHECK(defect.sup_norm() <= 10.0 * p.picard_tol);
    }
  }
}

TEST_CASE("run: decoupled regularization") {
  const Grid g = Grid::line(33);
  SchemeParams p = params(1e-2, 0.05);
  p.coupling = RegCoupling::decoupled(1e-4);
  const Trajectory t = run(cosine(g, 0.1), p);
  const StepResidual r = step_residual(t.records[4].u, t.records[5].u, t.records[5].w, p);
  CHECK(r.relative_to(p.picard_tol) <= 10.0);
}

TEST_CASE("run: errors") {
  SUBCASE("p-exponent needs a 1-D grid") {
    try {
      run(Field(Grid::box(5, 5)), params(0.1, 0.1), Variant::p_exponent(3.0));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedDimension);
    }
  }
  SUBCASE("overflow is reported with its step and no NaN escapes") {
    const Grid g = Grid::line(33);
    SchemeParams p = params(1e-2, 0.1);
    p.sinh_arg_cap = 50.0;
    std::vector<double> last;
    try {
      run(cosine(g, 10.0), p, Variant::sinh(), [&last](const StepRecord& r) {
        last.assign(r.w.values().begin(), r.w.values().end());
      });
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Overflow);
      CHECK(e.step() >= 0);
      CHECK(std::string(e.what()).find("step " + std::to_string(e.step())) == 0);
    }
    for (double v : last) CHECK(std::isfinite(v));
  }
  SUBCASE("non-finite initial data") {
    Field u0 = Field::constant(Grid::line(5), 1.0);
    u0[1] = INFINITY;
    CHECK_THROWS_AS(run(u0, params(0.1, 0.1)), Error);
  }
}
