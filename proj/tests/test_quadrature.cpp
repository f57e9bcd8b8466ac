#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hup/errors.hpp"
#include "hup/quadrature.hpp"
#include "oracles.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double apply(const AxisRule& r, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("Hermite rule integrates monomials exactly") {
  const AxisRule r = hermite_rule(20);
  CHECK_THAT(r.weight_mass(), WithinRel(std::sqrt(oracle::pi), 1e-15));
  for (int m = 0; m <= 39; ++m) {
    const double q = apply(r, [m](double t) { return std::pow(t, m); });
    // Odd moments cancel; measure against int |t|^m e^{-t^2}.
    const double ref = oracle::full_gauss_moment(m, 1.0);
    CHECK_THAT(q, WithinAbs(ref, 1e-13 * 2.0 * oracle::half_gauss_moment(m, 1.0)));
  }
}

TEST_CASE("small Hermite rules") {
  const AxisRule one = hermite_rule(1);
  REQUIRE(one.size() == 1);
  CHECK_THAT(one.nodes[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(one.weights[0], WithinRel(std::sqrt(oracle::pi), 1e-14));
  const AxisRule two = hermite_rule(2);
  REQUIRE(two.size() == 2);
  CHECK_THAT(two.nodes[0], WithinRel(-1.0 / std::sqrt(2.0), 1e-14));
  CHECK_THAT(two.nodes[1], WithinRel(1.0 / std::sqrt(2.0), 1e-14));
  CHECK_THAT(two.weights[0], WithinRel(std::sqrt(oracle::pi) / 2.0, 1e-14));
  const AxisRule forty = hermite_rule(40);
  CHECK_THAT(apply(forty, [](double t) { return t * t * t * t; }), WithinRel(3.0 * std::sqrt(oracle::pi) / 4.0, 1e-13));
}

TEST_CASE("small half-monomial rule") {
  const AxisRule r = half_monomial_rule(1, 1.0);
  REQUIRE(r.size() == 1);
  CHECK_THAT(r.nodes[0], WithinRel(1.0, 1e-14));
  CHECK_THAT(r.weights[0], WithinRel(0.5, 1e-14));
  CHECK_THAT(apply(half_monomial_rule(20, 0.0), [](double x) { return x * x; }),
             WithinRel(std::sqrt(oracle::pi) / 4.0, 1e-13));
  CHECK_THAT(half_monomial_rule(20, 2.0).weight_mass(), WithinRel(std::sqrt(oracle::pi) / 4.0, 1e-13));
  CHECK_THROWS_AS(half_monomial_rule(5, -0.5), Error);
}

TEST_CASE("generalized Laguerre rule") {
  for (double alpha : {0.0, 0.5, 2.0}) {
    const AxisRule r = laguerre_rule(15, alpha);
    for (int m = 0; m <= 29; ++m) {
      const double q = apply(r, [m](double t) { return std::pow(t, m); });
      CHECK_THAT(q, WithinRel(std::tgamma(m + alpha + 1.0), 1e-11));
    }
  }
}

TEST_CASE("half-range rule is exact for odd and even powers") {
  for (double a : {0.0, 1.0, 2.0, 0.5}) {
    const AxisRule r = half_range_rule(20, a);
    for (int m = 0; m <= 39; ++m) {
      const double q = apply(r, [m](double t) { return std::pow(t, m); });
      CHECK_THAT(q, WithinRel(oracle::half_gauss_moment(m + a, 1.0), 1e-11));
    }
    for (double x : r.nodes) CHECK(x > 0.0);
    for (double w : r.weights) CHECK(w > 0.0);
  }
}

TEST_CASE("half-monomial rule is exact for even powers") {
  const AxisRule r = half_monomial_rule(15, 1.0);
  for (int m = 0; m <= 58; m += 2) {
    const double q = apply(r, [m](double t) { return std::pow(t, m); });
    CHECK_THAT(q, WithinRel(oracle::half_gauss_moment(m + 1.0, 1.0), 1e-11));
  }
}

TEST_CASE("Legendre panels") {
  const AxisRule r = legendre_panel_rule(10, -1.0, 2.0);
  for (int m = 0; m <= 19; ++m) {
    const double q = apply(r, [m](double t) { return std::pow(t, m); });
    const double ref = (std::pow(2.0, m + 1) - std::pow(-1.0, m + 1)) / (m + 1);
    CHECK_THAT(q, WithinAbs(ref, 1e-12 * std::max(1.0, std::abs(ref))));
  }
  const AxisRule c = composite_legendre_rule(20, 4, 0.0, oracle::pi);
  CHECK(c.size() == 80);
  CHECK_THAT(apply(c, [](double t) { return std::sin(t); }), WithinRel(2.0, 1e-14));
}

TEST_CASE("invalid rule requests") {
  CHECK_THROWS_AS(hermite_rule(0), Error);
  CHECK_THROWS_AS(hermite_rule(kMaxRuleOrder + 1), Error);
  CHECK_THROWS_AS(laguerre_rule(5, -1.0), Error);
  CHECK_THROWS_AS(legendre_panel_rule(5, 1.0, 1.0), Error);
}

TEST_CASE("orthant grid integrates a Gaussian over the orthant") {
  // int_{R x R_+} x2^2 e^{-2|x|^2} dx
  const OrthantSpec s(2, 1);
  const QuadratureGrid g = orthant_grid(s, 2.0, 20);
  const double q = tensor_integrate(
      g, [](std::span<const double> x) { return x[1] * x[1] * std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1])); },
      WeightMode::Plain);
  const double ref = oracle::full_gauss_moment(0, 2.0) * oracle::half_gauss_moment(2, 2.0);
  CHECK_THAT(q, WithinRel(ref, 1e-13));
}

TEST_CASE("measure grid implicit mass") {
  const WeightExponents a({0.0, 2.0});
  const QuadratureGrid g = measure_grid(a, 0.5, 12);
  const double ref = oracle::simpson([](double t) { return std::exp(-2.0 * t * t); }, -8.0, 8.0) *
                     oracle::simpson([](double t) { return t * t * std::exp(-2.0 * t * t); }, 0.0, 8.0);
  CHECK_THAT(g.implicit_mass(), WithinRel(ref, 1e-10));
  CHECK_THAT(tensor_integrate(g, [](std::span<const double>) { return 1.0; }), WithinRel(ref, 1e-12));
}

TEST_CASE("non-finite integrand is reported") {
  const QuadratureGrid g = orthant_grid(OrthantSpec(1, 0), 1.0, 4);
  CHECK_THROWS_AS(tensor_integrate(g, [](std::span<const double>) { return std::nan(""); }), Error);
}

TEST_CASE("spherical grid handles a singular radial weight") {
  // int_{R^2_{1,+}} |x|^{-1} e^{-|x|^2} dx = (pi) * int_0^inf e^{-r^2} dr
  const OrthantSpec s(2, 1);
  const SphericalGrid g(s, 1.0, -1.0, 30, 30);
  const double q = g.integrate([](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    return std::exp(-r * r) / r;
  });
  CHECK_THAT(q, WithinRel(oracle::pi * std::sqrt(oracle::pi) / 2.0, 1e-12));
}

TEST_CASE("rule CSV has one row per node") {
  std::ostringstream os;
  write_rule_csv(os, hermite_rule(5));
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows >= 5);
  CHECK(rows <= 6);
}
