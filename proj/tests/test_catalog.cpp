#include <catch_amalgamated.hpp>

#include <cmath>

#include "hup/catalog.hpp"
#include "hup/errors.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("catalog names") {
  const auto& names = catalog_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) CHECK(catalog_get(n, CatalogParams{}).label() == n);
  try {
    catalog_get("gaussian", CatalogParams{});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Catalog);
  }
}

TEST_CASE("extremal parameters") {
  CatalogParams p;
  p.n = 3;
  p.k = 2;
  p.c = -2.0;
  p.beta = 0.25;
  const TestField u = catalog_get("extremal", p);
  const double x[3] = {0.5, 1.0, 2.0};
  CHECK_THAT(u.eval(x), WithinRel(-2.0 * 2.0 * std::exp(-0.25 * 5.25), 1e-15));
  CHECK(u.wall_exponents() == std::vector<int>{0, 1, 1});
}

TEST_CASE("affine equality field") {
  CatalogParams p;
  p.n = 3;
  p.k = 1;
  p.b0 = 0.5;
  p.b = {1.0, -3.0};
  p.B = 0.125;
  const TestField u = catalog_get("affine_equality", p);
  const double x[3] = {1.0, 2.0, 0.5};
  const double r2 = 1.0 + 4.0 + 0.25;
  CHECK_THAT(u.eval(x), WithinRel(0.5 * std::exp(-0.125 * r2) * (0.5 + 1.0 - 6.0), 1e-14));
  p.b = {1.0};
  CHECK_THROWS_AS(catalog_get("affine_equality", p), Error);
  p.b = {};
  p.B = 0.0;
  CHECK_THROWS_AS(catalog_get("affine_equality", p), Error);
}

TEST_CASE("random fields are reproducible and vanish on the walls") {
  const OrthantSpec s(3, 2);
  const PolyGaussDescriptor a = random_polygauss(s, 42), b = random_polygauss(s, 42), c = random_polygauss(s, 43);
  CHECK(a.poly() == b.poly());
  CHECK(a.rate() == b.rate());
  CHECK_FALSE(a.poly() == c.poly());
  CHECK(a.poly().total_degree() <= kRandomDegree + s.k());
  CHECK(a.poly().min_degree_in(1) >= 1);
  CHECK(a.poly().min_degree_in(2) >= 1);
  CHECK((a.rate() == 1.0 || a.rate() == 2.0));
  for (const auto& [g, coef] : a.poly().terms()) CHECK(std::abs(coef) <= 1.0);
}

TEST_CASE("bump box and wall power") {
  CatalogParams p;
  p.n = 2;
  p.k = 1;
  p.wall_power = 2;
  const TestField u = catalog_get("bump", p);
  REQUIRE(u.support());
  CHECK(u.support()->lo == std::vector<double>{1.0, 1.0});
  CHECK(u.support()->hi == std::vector<double>{2.0, 2.0});
  CHECK(u.wall_exponents() == std::vector<int>{0, 2});
  CHECK_FALSE(u.has_exact_form());
  const double centre[2] = {1.5, 1.5};
  CHECK_THAT(u.eval(centre), WithinRel(std::exp(-2.0), 1e-14));
  const double outside[2] = {0.5, 1.5};
  CHECK(u.eval(outside) == 0.0);
  CHECK_THAT(bump_profile(1.5, 1.0, 2.0), WithinRel(std::exp(-1.0), 1e-15));
  p.box = SupportBox{{-1.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(catalog_get("bump", p), Error);
}
