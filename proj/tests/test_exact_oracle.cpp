#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hup/catalog.hpp"
#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"
#include "oracles.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("one-dimensional moments") {
  for (int m = 0; m <= 12; ++m)
    for (double s : {0.25, 1.0, 3.0}) {
      const double ref = oracle::simpson_pieces(
          [m, s](double x) { return std::pow(x, m) * std::exp(-s * x * x); }, 0.0, 40.0 / std::sqrt(s), 64, 1e-14);
      CHECK_THAT(half_moment(m, s), WithinRel(ref, 1e-11));
      CHECK_THAT(full_moment(m, s), WithinAbs(m % 2 ? 0.0 : 2.0 * ref, 1e-11 * ref));
    }
  CHECK_THAT(half_moment(0, 1.0), WithinRel(std::sqrt(oracle::pi) / 2.0, 1e-15));
  CHECK_THAT(half_moment(3, 0.5), WithinRel(2.0, 1e-14));
  CHECK_THAT(full_moment(4, 1.0), WithinRel(3.0 * std::sqrt(oracle::pi) / 4.0, 1e-14));
  CHECK(full_moment(1, 1.0) == 0.0);
  CHECK_THAT(half_moment(0.5, 1.0), WithinRel(std::tgamma(0.75) / 2.0, 1e-15));
  CHECK_THROWS_AS(half_moment(-1, 1.0), Error);
  CHECK_THROWS_AS(half_moment(2, 0.0), Error);
}

TEST_CASE("extremal on the half line") {
  // u = x e^{-x^2/2}: N = sqrt(pi)/4, M = 3 sqrt(pi)/8, E = 3 sqrt(pi)/8.
  const TestField u = make_extremal(OrthantSpec(1, 1), 1.0, 0.5);
  const OrthantSpec s(1, 1);
  const double rp = std::sqrt(oracle::pi);
  CHECK_THAT(descriptor_mass(*u.exact_form(), s), WithinRel(rp / 4.0, 1e-14));
  CHECK_THAT(descriptor_second_moment(*u.exact_form(), s), WithinRel(3.0 * rp / 8.0, 1e-14));
  CHECK_THAT(descriptor_dirichlet(*u.exact_form(), s), WithinRel(3.0 * rp / 8.0, 1e-14));
}

TEST_CASE("sharp example mass") {
  // int_{R x R_+} x1^2 x2^2 e^{-|x|^2} = (sqrt(pi)/2)(sqrt(pi)/4) = pi/8
  CatalogParams p;
  const TestField u = catalog_get("sharp_example", p);
  CHECK_THAT(descriptor_mass(*u.exact_form(), OrthantSpec(2, 1)), WithinRel(oracle::pi / 8.0, 1e-15));
}

TEST_CASE("radial moment with a real exponent against a polar oracle") {
  // u = x2 e^{-|x|^2/2} on R x R_+: int |x|^{2a} u^2 = int_0^inf r^{2a+3} e^{-r^2} dr * int_0^pi sin^2
  const OrthantSpec s(2, 1);
  const PolyGaussDescriptor d(1.0, Polynomial::monomial({0, 1}));
  for (double a : {-1.0, -0.5, 0.5, 1.5}) {
    const double ref = oracle::half_gauss_moment(2 * a + 3, 1.0) * oracle::pi / 2.0;
    CHECK_THAT(descriptor_radial_moment(d * d, s, a), WithinRel(ref, 1e-13));
  }
}

TEST_CASE("divergent radial moment is refused") {
  const OrthantSpec s(1, 0);
  const PolyGaussDescriptor one(1.0, Polynomial::constant(1, 1.0));
  CHECK_THROWS_AS(descriptor_radial_moment(one, s, -0.5), Error);
}

TEST_CASE("descriptor integrals against a box midpoint oracle") {
  std::mt19937_64 gen(2);
  for (const auto& s : {OrthantSpec(2, 1), OrthantSpec(2, 2)}) {
    CatalogParams p;
    p.n = s.n();
    p.k = s.k();
    p.seed = 7;
    const TestField u = catalog_get("polygauss_random", p);
    const PolyGaussDescriptor& d = *u.exact_form();
    const double L = 9.0 / std::sqrt(d.rate());
    std::vector<double> lo(2, -L), hi(2, L);
    for (std::size_t i = 0; i < 2; ++i)
      if (s.is_wall(i)) lo[i] = 0.0;
    const double mass = oracle::box_midpoint(
        [&](const std::vector<double>& x) {
          const double v = d.eval(x);
          return v * v;
        },
        lo, hi, 600);
    CHECK_THAT(descriptor_mass(d, s), WithinRel(mass, 1e-7));
    const double energy = oracle::box_midpoint(
        [&](const std::vector<double>& x) {
          std::vector<double> g(2);
          d.eval(x, g);
          return g[0] * g[0] + g[1] * g[1];
        },
        lo, hi, 600);
    CHECK_THAT(descriptor_dirichlet(d, s), WithinRel(energy, 1e-7));
  }
}

TEST_CASE("moment profile and its derivative") {
  const Polynomial p = radius_squared(2) * Polynomial::monomial({0, 2});
  const MomentProfile mp(p, half_axes(OrthantSpec(2, 1)));
  const auto direct = [](double t) {
    return oracle::full_gauss_moment(2, t) * oracle::half_gauss_moment(2, t) +
           oracle::full_gauss_moment(0, t) * oracle::half_gauss_moment(4, t);
  };
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK_THAT(mp.at(t), WithinRel(direct(t), 1e-14));
    const double h = 1e-5;
    CHECK_THAT(mp.derivative(t), WithinRel((direct(t + h) - direct(t - h)) / (2 * h), 1e-8));
  }
}

TEST_CASE("weighted domain integral") {
  const WeightExponents a({0.0, 2.0});
  const PolyGaussDescriptor d(2.0, Polynomial::monomial({0, 2}));
  // int_R e^{-x^2} dx * int_0^inf x^2 e^{-x^2} dx
  CHECK_THAT(descriptor_integral(d, a),
             WithinRel(oracle::full_gauss_moment(0, 1.0) * oracle::half_gauss_moment(2, 1.0), 1e-14));
}
