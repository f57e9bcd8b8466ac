#include <catch_amalgamated.hpp>

#include <cmath>

#include "hup/catalog.hpp"
#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"
#include "hup/projection.hpp"
#include "oracles.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TestField random_field(int n, int k, std::uint64_t seed) {
  CatalogParams p;
  p.n = n;
  p.k = k;
  p.seed = seed;
  return catalog_get("polygauss_random", p);
}

// ||u - c w e^{-beta|x|^2}||^2 minimized over c, by hand from the monomials.
struct DistAtBeta {
  explicit DistAtBeta(const TestField& u)
      : free(u.spec().n() - u.spec().k()), d(*u.exact_form()), w(Polynomial::constant(u.dim(), 1.0)) {
    for (std::size_t i = free; i < u.dim(); ++i) w = w.times_coordinate(i);
    uw = d.poly() * w;
    ww = w * w;
    N = oracle::gauss_poly_integral((d.poly() * d.poly()).terms(), free, d.rate());
  }

  double operator()(double beta) const {
    const double ip = oracle::gauss_poly_integral(uw.terms(), free, d.rate() / 2.0 + beta);
    const double gg = oracle::gauss_poly_integral(ww.terms(), free, 2.0 * beta);
    return N - ip * ip / gg;
  }

  std::size_t free;
  PolyGaussDescriptor d;
  Polynomial w, uw, ww;
  double N = 0.0;
};

double dist_at_beta(const TestField& u, double beta) { return DistAtBeta(u)(beta); }

}  // namespace

TEST_CASE("extremals project onto themselves") {
  for (double beta : {0.25, 0.5, 2.0}) {
    const TestField u = make_extremal(OrthantSpec(2, 1), 1.5, beta);
    const ProjectionResult r = dist_to_E(u);
    CHECK_THAT(r.dist_sq, WithinAbs(0.0, 1e-10 * r.mass));
    CHECK_THAT(r.beta, WithinRel(beta, 1e-6));
    CHECK_THAT(r.c, WithinRel(1.5, 1e-6));
    CHECK_THAT(r.lambda(), WithinRel(1.0 / std::sqrt(2.0 * beta), 1e-6));
  }
}

TEST_CASE("distance to E against a scanned oracle") {
  for (auto [n, k] : {std::pair{1, 1}, {2, 1}, {3, 2}})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const TestField u = random_field(n, k, seed);
      double arg = 0.0;
      const DistAtBeta at(u);
      const double ref = oracle::scan_minimize(
          [&](double t) { return at(std::exp(t)); }, std::log(0.01), std::log(50.0), &arg);
      const ProjectionResult r = dist_to_E(u);
      CHECK_THAT(r.dist_sq, WithinAbs(ref, 1e-9 * r.mass));
      CHECK(r.dist_sq >= 0.0);
      CHECK(r.dist_sq <= r.mass * (1 + 1e-12));
      if (n <= 2) {
        const ProjectionResult q = dist_to_E(u, Backend::Quadrature);
        CHECK_THAT(q.dist_sq, WithinAbs(r.dist_sq, 1e-8 * r.mass));
      }
    }
}

TEST_CASE("sharp example distances") {
  const TestField u = catalog_get("sharp_example", CatalogParams{});
  const double pi = oracle::pi;
  // Odd in x1, so orthogonal to the whole extremal family.
  CHECK_THAT(dist_to_E(u).dist_sq, WithinRel(pi / 8.0, 1e-10));
  const ProjectionResult c = dist_to_E_norm_constrained(u);
  CHECK_THAT(c.dist_sq, WithinRel(pi / 4.0, 1e-10));
  // It is itself a member of the affine family (b = 0, d = 1, beta = 1/2).
  const ProjectionResult a = dist_to_affine_family(u);
  CHECK_THAT(a.dist_sq, WithinAbs(0.0, 1e-10));
  REQUIRE(a.d.size() == 1);
  CHECK_THAT(a.d[0], WithinRel(1.0, 1e-5));
  CHECK_THAT(a.beta, WithinRel(0.5, 1e-5));
}

TEST_CASE("affine equality family members have zero affine distance") {
  CatalogParams p;
  p.n = 3;
  p.k = 1;
  p.b = {0.5, -2.0};
  p.b0 = 1.0;
  p.B = 0.8;
  const TestField u = catalog_get("affine_equality", p);
  const ProjectionResult r = dist_to_affine_family(u);
  CHECK_THAT(r.dist_sq, WithinAbs(0.0, 1e-10 * r.mass));
  CHECK_THAT(r.beta, WithinRel(0.8, 1e-5));
  CHECK_THAT(r.c, WithinRel(1.0, 1e-5));
  CHECK_THAT(r.d[0], WithinRel(0.5, 1e-5));
  CHECK_THAT(r.d[1], WithinRel(-2.0, 1e-5));
}

TEST_CASE("family inclusions order the distances") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const TestField u = random_field(2, 1, seed);
    const double e = dist_to_E(u).dist_sq;
    const double a = dist_to_affine_family(u).dist_sq;
    const double c = dist_to_E_norm_constrained(u).dist_sq;
    const double g = gaussian_center_dist(u, 1.0).dist_sq;
    const double ga = affine_dist_at_lambda(u, 1.0).dist_sq;
    CHECK(a <= e + 1e-12);
    CHECK(e <= c + 1e-12);
    CHECK(e <= g + 1e-12);
    CHECK(ga <= g + 1e-12);
    CHECK(a <= ga + 1e-12);
  }
}

TEST_CASE("fixed-lambda centre distance has a closed form") {
  const TestField u = random_field(3, 2, 4);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double beta = 1.0 / (2.0 * lambda * lambda);
    const ProjectionResult r = gaussian_center_dist(u, lambda);
    CHECK_THAT(r.dist_sq, WithinAbs(dist_at_beta(u, beta), 1e-12 * r.mass));
    CHECK(r.beta == beta);
  }
}

TEST_CASE("cross functionals with the field itself") {
  const TestField u = random_field(2, 2, 1);
  const CoreFunctionals f = core_functionals(u, Backend::Oracle);
  for (Backend b : {Backend::Oracle, Backend::Quadrature}) {
    const CrossFunctionals x = cross_functionals(u, *u.exact_form(), b);
    CHECK_THAT(x.N, WithinRel(f.N, 1e-10));
    CHECK_THAT(x.M, WithinRel(f.M, 1e-10));
    CHECK_THAT(x.E, WithinRel(f.E, 1e-10));
  }
}

TEST_CASE("energy centre distance") {
  const OrthantSpec s(2, 1);
  const TestField g = make_extremal(s, 2.5, 0.5);
  const EnergyCenterDist e = energy_center_dist(g);
  CHECK_THAT(e.c, WithinRel(2.5, 1e-12));
  CHECK_THAT(e.value, WithinAbs(0.0, 1e-12));
  // Orthogonal field: the quadratic form is minimized at c = 0.
  const TestField u = catalog_get("sharp_example", CatalogParams{});
  const EnergyCenterDist o = energy_center_dist(u);
  CHECK_THAT(o.c, WithinAbs(0.0, 1e-12));
  CHECK_THAT(o.value, WithinRel(oracle::pi / 8.0 + 3.0 * oracle::pi / 4.0, 1e-12));
}

TEST_CASE("bump projections use quadrature") {
  CatalogParams p;
  p.n = 1;
  p.k = 1;
  const TestField u = catalog_get("bump", p);
  CHECK(preferred_backend(u) == Backend::Quadrature);
  const ProjectionResult r = dist_to_E(u);
  CHECK(r.backend == Backend::Quadrature);
  CHECK(r.dist_sq > 0.0);
  CHECK(r.dist_sq < r.mass);
  CHECK_THROWS_AS(dist_to_E(u, Backend::Oracle), Error);
}
