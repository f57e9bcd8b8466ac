#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hup/catalog.hpp"
#include "hup/domain.hpp"
#include "hup/errors.hpp"

using namespace hup;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> interior_point(const OrthantSpec& s, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> free(-2.0, 2.0), wall(0.05, 2.0);
  std::vector<double> x(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) x[i] = s.is_wall(i) ? wall(gen) : free(gen);
  return x;
}

}  // namespace

TEST_CASE("orthant layout puts the walls last") {
  const OrthantSpec s(3, 2);
  CHECK(s.first_wall() == 1);
  CHECK_FALSE(s.is_wall(0));
  CHECK(s.is_wall(1));
  CHECK(s.is_wall(2));
  CHECK(s.effective_dim() == 7);
  CHECK(s.wall_index() == MultiIndex{0, 1, 1});
  CHECK_THROWS_AS(OrthantSpec(0, 0), Error);
  CHECK_THROWS_AS(OrthantSpec(2, 3), Error);
  CHECK_THROWS_AS(OrthantSpec(2, -1), Error);
}

TEST_CASE("weight exponents") {
  const WeightExponents a({0.0, 2.0, 0.5});
  CHECK(a.total() == 2.5);
  CHECK_FALSE(a.is_weighted(0));
  CHECK(a.is_weighted(2));
  CHECK_FALSE(a.all_integer());
  CHECK_THROWS_AS(a.integer_values(), Error);
  CHECK_THROWS_AS(WeightExponents({1.0, -0.5}), Error);
  const double x[3] = {-1.0, 2.0, 4.0};
  CHECK_THAT(a.weight(x), WithinRel(8.0, 1e-15));
  const double outside[3] = {1.0, 2.0, -0.1};
  CHECK_FALSE(a.contains(outside));
  CHECK(WeightExponents::on_walls(OrthantSpec(3, 1), 2.0).values() == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("make_extremal examples") {
  const TestField u = make_extremal(OrthantSpec(1, 1), 1.0, 0.5);
  const double x[1] = {1.0};
  const FieldValue v = field_eval(u, x);
  CHECK_THAT(v.value, WithinRel(std::exp(-0.5), 1e-15));
  CHECK_THAT(v.gradient[0], WithinAbs(0.0, 1e-15));  // (1 - x^2) e^{-x^2/2}

  const TestField z = make_extremal(OrthantSpec(2, 1), 0.0, 1.0);
  const double y[2] = {0.3, 0.7};
  CHECK(field_eval(z, y).value == 0.0);

  const TestField w = make_extremal(OrthantSpec(2, 2), 2.0, 1.0);
  REQUIRE(w.exact_form());
  CHECK(w.exact_form()->rate() == 2.0);
  CHECK(w.exact_form()->poly().coefficient({1, 1}) == 2.0);
  CHECK(w.exact_form()->poly().terms().size() == 1);
  const double one[2] = {1.0, 1.0};
  CHECK_THAT(field_eval(w, one).value, WithinRel(2.0 * std::exp(-2.0), 1e-15));

  CHECK_THROWS_AS(make_extremal(OrthantSpec(1, 1), 1.0, 0.0), Error);
  CHECK_THROWS_AS(make_extremal(OrthantSpec(1, 1), 1.0, -1.0), Error);
}

TEST_CASE("sharp example value and gradient at (1,1)") {
  CatalogParams p;
  const TestField u = catalog_get("sharp_example", p);
  const double x[2] = {1.0, 1.0};
  const FieldValue v = field_eval(u, x);
  CHECK_THAT(v.value, WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THAT(v.gradient[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(v.gradient[1], WithinAbs(0.0, 1e-15));
}

TEST_CASE("field_eval refuses wall points") {
  const TestField u = make_extremal(OrthantSpec(2, 1), 1.0, 0.5);
  const double on_wall[2] = {0.5, 0.0};
  const double outside[2] = {0.5, -0.1};
  CHECK_THROWS_AS(field_eval(u, on_wall), Error);
  CHECK_THROWS_AS(field_eval(u, outside), Error);
}

TEST_CASE("sphere areas") {
  CHECK_THAT(sphere_area(0), WithinRel(2.0, 1e-15));
  CHECK_THAT(sphere_area(1), WithinRel(2.0 * std::numbers::pi, 1e-15));
  CHECK_THAT(sphere_area(2), WithinRel(4.0 * std::numbers::pi, 1e-15));
  CHECK_THAT(sphere_area(3), WithinRel(2.0 * std::numbers::pi * std::numbers::pi, 1e-14));
  CHECK_THAT(sphere_area(4), WithinRel(8.0 * std::numbers::pi * std::numbers::pi / 3.0, 1e-14));
  CHECK_THROWS_AS(sphere_area(-1), Error);
}

TEST_CASE("residual evaluation agrees with the descriptor at random interior points") {
  std::mt19937_64 gen(11);
  for (const auto& s : {OrthantSpec(1, 1), OrthantSpec(2, 1), OrthantSpec(3, 2)}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      CatalogParams p;
      p.n = s.n();
      p.k = s.k();
      p.seed = seed;
      const TestField u = catalog_get("polygauss_random", p);
      for (int t = 0; t < 100; ++t) {
        const std::vector<double> x = interior_point(s, gen);
        const FieldValue fv = field_eval(u, x);
        std::vector<double> g(s.dim());
        const double d = u.exact_form()->eval(x, g);
        CHECK_THAT(fv.value, WithinAbs(d, 1e-12 * (1.0 + std::abs(d))));
        for (std::size_t i = 0; i < s.dim(); ++i)
          CHECK_THAT(fv.gradient[i], WithinAbs(g[i], 1e-12 * (1.0 + std::abs(g[i]))));
      }
    }
  }
}

TEST_CASE("gradients match central differences for every catalogued field") {
  std::mt19937_64 gen(5);
  const OrthantSpec s(2, 1);
  for (const auto& name : catalog_names()) {
    CatalogParams p;
    const TestField u = catalog_get(name, p);
    for (int t = 0; t < 40; ++t) {
      std::vector<double> x = interior_point(s, gen);
      if (name == "bump") x = {1.0 + 0.9 * (x[0] + 2.0) / 4.0 + 0.05, 1.05 + 0.9 * x[1] / 2.0};
      const FieldValue fv = field_eval(u, x);
      for (std::size_t i = 0; i < s.dim(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(x[i]));
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (field_eval(u, xp).value - field_eval(u, xm).value) / (2.0 * h);
        CHECK_THAT(fv.gradient[i], WithinAbs(fd, 1e-6 * (1.0 + std::abs(fd))));
      }
    }
  }
}

TEST_CASE("extremal fields vanish at the walls") {
  const TestField u = make_extremal(OrthantSpec(2, 1), 1.0, 0.5);
  double sup = 0.0;
  for (double a = -2.0; a <= 2.0; a += 0.1)
    for (double b = 0.05; b <= 3.0; b += 0.05) {
      const double x[2] = {a, b};
      sup = std::max(sup, std::abs(u.eval(x)));
    }
  for (double a : {-1.0, 0.0, 0.7}) {
    const double x[2] = {a, 1e-8};
    CHECK(std::abs(u.eval(x)) < 1e-7 * sup);
  }
}

TEST_CASE("descriptor algebra") {
  const OrthantSpec s(2, 1);
  const PolyGaussDescriptor g(1.0, Polynomial::monomial({0, 1}));
  const double x[2] = {0.4, 1.3};
  const double r2 = 0.4 * 0.4 + 1.3 * 1.3;
  // partial_1 (x2 e^{-|x|^2/2}) = (1 - x2^2) e^{-|x|^2/2}
  CHECK_THAT(g.partial(1).eval(x), WithinRel((1.0 - 1.3 * 1.3) * std::exp(-r2 / 2), 1e-14));
  CHECK_THAT((g * g).eval(x), WithinRel(1.3 * 1.3 * std::exp(-r2), 1e-14));
  CHECK_THAT(g.dilated(2.0).eval(x), WithinRel(0.65 * std::exp(-r2 / 8), 1e-14));
  CHECK_THAT((g + g.scaled(2.0)).eval(x), WithinRel(3.0 * g.eval(x), 1e-14));
  CHECK_THAT(g.times_coordinate(0).eval(x), WithinRel(0.4 * g.eval(x), 1e-14));
  CHECK_THAT(g.rate_derivative().eval(x), WithinRel(-r2 / 2 * g.eval(x), 1e-14));
  CHECK_THROWS_AS(g + PolyGaussDescriptor(2.0, Polynomial::monomial({0, 1})), Error);
  CHECK_THROWS_AS(PolyGaussDescriptor(0.0, Polynomial(2)), Error);
  (void)s;
}

TEST_CASE("field transforms") {
  const OrthantSpec s(2, 1);
  const TestField u = make_extremal(s, 1.0, 0.5);
  const double x[2] = {0.3, 0.9};
  CHECK_THAT(u.scaled(3.0).eval(x), WithinRel(3.0 * u.eval(x), 1e-15));
  const double half[2] = {0.15, 0.45};
  CHECK_THAT(u.dilated(2.0).eval(x), WithinRel(u.eval(half), 1e-14));
  CatalogParams p;
  const TestField sharp = catalog_get("sharp_example", p);
  CHECK_THAT(u.plus(sharp, 2.0).eval(x), WithinRel(u.eval(x) + 2.0 * sharp.eval(x), 1e-14));
  CHECK_THROWS_AS(u.plus(catalog_get("bump", p)), Error);
}
