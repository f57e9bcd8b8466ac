#include "hup/catalog.hpp"

#include <cmath>
#include <algorithm>
#include <memory>
#include <random>

#include "hup/errors.hpp"

namespace hup {

namespace {

double unit_interval(std::mt19937_64& gen) {
  // 53 random bits mapped to [-1, 1).
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

void all_indices(std::size_t dim, MultiIndex& cur, std::size_t axis, int left,
                 std::vector<MultiIndex>& out) {
  if (axis == dim) {
    out.push_back(cur);
    return;
  }
  for (int d = 0; d <= left; ++d) {
    cur[axis] = d;
    all_indices(dim, cur, axis + 1, left - d, out);
  }
  cur[axis] = 0;
}

std::vector<int> wall_exponents_of(const OrthantSpec& spec, int p) {
  std::vector<int> e(spec.dim(), 0);
  for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i) e[i] = p;
  return e;
}

TestField make_affine(const OrthantSpec& spec, const CatalogParams& p) {
  require(std::isfinite(p.B) && p.B > 0.0, ErrorKind::Parameter, "affine family needs B > 0");
  const std::size_t free = spec.first_wall();
  std::vector<double> b = p.b;
  if (b.empty()) b.assign(free, 1.0);
  require(b.size() == free, ErrorKind::Parameter,
          "affine family needs one slope per unweighted axis (" + std::to_string(free) + ")");
  const MultiIndex w = spec.wall_index();
  Polynomial poly = Polynomial::monomial(w, p.b0);
  for (std::size_t i = 0; i < free; ++i) poly += Polynomial::monomial(w, b[i]).times_coordinate(i);
  return TestField::from_descriptor(spec, std::vector<int>(w.begin(), w.end()), PolyGaussDescriptor(2.0 * p.B, poly),
                                    "affine_equality");
}

TestField make_sharp(const OrthantSpec& spec) {
  const MultiIndex w = spec.wall_index();
  const Polynomial poly = Polynomial::monomial(w, 1.0).times_coordinate(0);
  return TestField::from_descriptor(spec, std::vector<int>(w.begin(), w.end()), PolyGaussDescriptor(1.0, poly),
                                    "sharp_example");
}

TestField make_bump(const OrthantSpec& spec, const CatalogParams& p) {
  SupportBox box;
  if (p.box) {
    box = *p.box;
  } else {
    box.lo.assign(spec.dim(), 1.0);
    box.hi.assign(spec.dim(), 2.0);
  }
  require(box.lo.size() == spec.dim() && box.hi.size() == spec.dim(), ErrorKind::Parameter,
          "bump box has wrong dimension");
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    require(box.lo[i] < box.hi[i], ErrorKind::Parameter, "bump box must be non-empty");
    require(!spec.is_wall(i) || box.lo[i] > 0.0, ErrorKind::Parameter, "bump box must avoid the walls");
  }
  require(p.wall_power >= 0, ErrorKind::Parameter, "wall power must be >= 0");
  const std::vector<int> pw = wall_exponents_of(spec, p.wall_power);
  // Residual v = u / x^p with u the product bump.
  ResidualEval residual = [box, pw](std::span<const double> x, std::span<double> grad) {
    const std::size_t n = x.size();
    double u = 1.0;
    double dlog[CompiledPolynomial::kMaxDim];
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 0.5 * (box.hi[i] - box.lo[i]);
      const double t = (x[i] - 0.5 * (box.lo[i] + box.hi[i])) / h;
      if (!(std::abs(t) < 1.0)) {
        std::fill(grad.begin(), grad.end(), 0.0);
        return 0.0;
      }
      const double q = 1.0 - t * t;
      u *= std::exp(-1.0 / q);
      dlog[i] = -2.0 * t / (q * q) / h - (pw[i] > 0 ? pw[i] / x[i] : 0.0);
    }
    double v = u;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < pw[i]; ++j) v /= x[i];
    for (std::size_t i = 0; i < n; ++i) grad[i] = v * dlog[i];
    return v;
  };
  return TestField(spec, pw, std::move(residual), 1.0, std::nullopt, box, "bump");
}

}  // namespace

double bump_profile(double x, double lo, double hi) {
  const double t = (2.0 * x - lo - hi) / (hi - lo);
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

PolyGaussDescriptor random_polygauss(const OrthantSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double rate = (gen() >> 63) ? 2.0 : 1.0;
  std::vector<MultiIndex> indices;
  MultiIndex cur(spec.dim(), 0);
  all_indices(spec.dim(), cur, 0, kRandomDegree, indices);
  Polynomial q(spec.dim());
  for (const auto& g : indices) q.add_term(g, unit_interval(gen));
  return PolyGaussDescriptor(rate, q.times_monomial(spec.wall_index()));
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"extremal", "affine_equality", "sharp_example", "polygauss_random",
                                                 "bump"};
  return names;
}

TestField catalog_get(const std::string& name, const CatalogParams& params) {
  const OrthantSpec spec(params.n, params.k);
  if (name == "extremal") return make_extremal(spec, params.c, params.beta);
  if (name == "affine_equality") return make_affine(spec, params);
  if (name == "sharp_example") return make_sharp(spec);
  if (name == "polygauss_random") {
    const MultiIndex w = spec.wall_index();
    return TestField::from_descriptor(spec, std::vector<int>(w.begin(), w.end()), random_polygauss(spec, params.seed),
                                      "polygauss_random");
  }
  if (name == "bump") return make_bump(spec, params);
  fail(ErrorKind::Catalog, "unknown catalog field '" + name + "'");
}

}  // namespace hup
