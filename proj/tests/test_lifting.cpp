#include <catch_amalgamated.hpp>

#include <cmath>

#include "hup/catalog.hpp"
#include "hup/errors.hpp"
#include "hup/lifting.hpp"
#include "oracles.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kPi32 = std::pow(oracle::pi, 1.5);

TestField half_line_bump(int wall_power) {
  CatalogParams p;
  p.n = 1;
  p.k = 1;
  p.wall_power = wall_power;
  return catalog_get("bump", p);
}

double residual_at(const TestField& u, double x, double* dv) {
  const double pt[1] = {x};
  double g[1];
  const double v = u.residual(pt, std::span<double>(g, 1));
  *dv = g[0];
  return v;
}

}  // namespace

TEST_CASE("plan geometry") {
  const LiftPlan p = make_lift_plan(OrthantSpec(3, 2), std::vector<int>{0, 1, 2});
  CHECK(p.total_l() == 3);
  CHECK(p.lifted_dim() == 9);
  CHECK_THAT(p.sphere_factor(), WithinRel(sphere_area(2) * sphere_area(4), 1e-15));
  CHECK(p.block_offset(0) == 0);
  CHECK(p.block_offset(1) == 1);
  CHECK(p.block_offset(2) == 4);
  const double z[9] = {-0.5, 0.0, 3.0, 4.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  const std::vector<double> x = project_point(p, z);
  CHECK(x == std::vector<double>{-0.5, 5.0, 1.0});
}

TEST_CASE("plans from weights") {
  const OrthantSpec s(2, 1);
  CHECK(make_lift_plan(s, WeightExponents({0.0, 4.0})).l == std::vector<int>{0, 2});
  CHECK_THROWS_AS(make_lift_plan(s, WeightExponents({0.0, 3.0})), Error);
  CHECK_THROWS_AS(make_lift_plan(s, WeightExponents({0.0, 0.5})), Error);
  CHECK_THROWS_AS(make_lift_plan(s, std::vector<int>{1, 1}), Error);
  CHECK_THROWS_AS(make_lift_plan(s, std::vector<int>{0, -1}), Error);
}

TEST_CASE("zero lifted block is a domain error") {
  const TestField u = make_extremal(OrthantSpec(1, 1), 1.0, 0.5);
  const LiftPlan p = lift_plan_for(u);
  const double z[3] = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(lifted_eval(u, p, z), Error);
}

TEST_CASE("half-line extremal lifts to the Gaussian of R^3") {
  // v = e^{-x^2/2}: int_{R^3} e^{-|y|^2} = pi^{3/2}, int |y|^2 e^{-|y|^2} = 3/2 pi^{3/2}.
  const TestField u = make_extremal(OrthantSpec(1, 1), 1.0, 0.5);
  const LiftPlan p = lift_plan_for(u);
  LiftConfig cfg;
  cfg.cartesian = CartesianCheck::On;
  const LiftCheck m = verify_mass_lift(u, p, cfg);
  CHECK_THAT(m.lhs, WithinRel(kPi32, 1e-13));
  CHECK(m.gap < 1e-12);
  CHECK(m.cartesian);
  CHECK(m.cartesian_gap < 1e-10);
  const LiftCheck a = verify_moment_lift(u, p, 1.0, cfg);
  CHECK_THAT(a.lhs, WithinRel(1.5 * kPi32, 1e-13));
  CHECK(a.gap < 1e-12);
  const LiftCheck d = verify_dilation_pairing(u, p, cfg);
  CHECK_THAT(d.lhs, WithinRel(-1.5 * kPi32, 1e-12));
  CHECK(d.gap < 1e-12);
}

TEST_CASE("lifted mass and moments for random fields") {
  for (auto [n, k] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
    CatalogParams cp;
    cp.n = n;
    cp.k = k;
    cp.seed = 3;
    const TestField u = catalog_get("polygauss_random", cp);
    const LiftPlan p = lift_plan_for(u);
    CHECK(verify_mass_lift(u, p).gap < 1e-9);
    CHECK(verify_moment_lift(u, p, 1.0).gap < 1e-9);
    CHECK(verify_moment_lift(u, p, 2.0).gap < 1e-9);
    CHECK(verify_dilation_pairing(u, p).gap < 1e-9);
  }
}

TEST_CASE("gradient lift of a bump, l = 2, b = 1, against one-dimensional integrals") {
  // Lifted side: |S^4|^{-1} int_{R^5} |z|^2 |grad v(|z|)|^2 = int r^6 v'(r)^2 dr.
  // Orthant side: int x^2 (u'^2 + 2 u^2 / x^2) + 4 u^2.
  const TestField u = half_line_bump(2);
  const LiftPlan p = lift_plan_for(u);
  REQUIRE(p.l[0] == 2);
  const LiftCheck g = verify_gradient_lift(u, p, 1);
  const double lifted = oracle::simpson_pieces(
      [&](double r) {
        if (r <= 1.0 || r >= 2.0) return 0.0;
        double dv = 0.0;
        residual_at(u, r, &dv);
        return std::pow(r, 6) * dv * dv;
      },
      1.0, 2.0, 32);
  const double orthant = oracle::simpson_pieces(
      [&](double x) {
        if (x <= 1.0 || x >= 2.0) return 0.0;
        double dv = 0.0;
        const double v = residual_at(u, x, &dv);
        const double val = x * x * v;
        const double du = 2.0 * x * v + x * x * dv;
        return x * x * du * du + 6.0 * val * val;
      },
      1.0, 2.0, 32);
  CHECK_THAT(g.lhs, WithinRel(lifted, 1e-8));
  CHECK_THAT(g.rhs, WithinRel(orthant, 1e-8));
  CHECK(g.gap < 1e-6);
  // Without the |x|^2 on the l(l-1) term the two sides differ.
  CHECK(std::abs(g.rhs_unweighted - g.lhs) > 1e-3 * g.lhs);
}

TEST_CASE("gradient lift, b = 0 and l = 1") {
  for (int wp : {1, 2}) {
    const TestField u = half_line_bump(wp);
    const LiftPlan p = lift_plan_for(u);
    for (int b : {0, 1}) CHECK(verify_gradient_lift(u, p, b).gap < 1e-6);
  }
}

TEST_CASE("gradient lift needs support away from the walls") {
  const TestField u = make_extremal(OrthantSpec(1, 1), 1.0, 0.5);
  CHECK_THROWS_AS(verify_gradient_lift(u, lift_plan_for(u), 0), Error);
  const TestField b = half_line_bump(1);
  CHECK_THROWS_AS(verify_gradient_lift(b, lift_plan_for(b), 2), Error);
}

TEST_CASE("smooth lift detection") {
  CHECK(has_smooth_lift(make_extremal(OrthantSpec(2, 1), 1.0, 0.5)));
  CHECK(has_smooth_lift(half_line_bump(1)));
  // x1 x2^2 e^{-|x|^2/2} / x2 = x1 x2 e^{...}: odd in the wall radius.
  const TestField odd = TestField::from_descriptor(
      OrthantSpec(2, 1), {0, 1}, PolyGaussDescriptor(1.0, Polynomial::monomial({1, 2})));
  CHECK_FALSE(has_smooth_lift(odd));
}

TEST_CASE("lifted dimension budget") {
  const TestField u = TestField::from_descriptor(OrthantSpec(3, 2), {0, 3, 3},
                                                 PolyGaussDescriptor(1.0, Polynomial::monomial({0, 3, 3})));
  const LiftPlan p = lift_plan_for(u);
  CHECK(p.lifted_dim() == 15);
  CHECK_THROWS_AS(verify_mass_lift(u, p), Error);
}
