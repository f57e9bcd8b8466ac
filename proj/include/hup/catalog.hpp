#pragma once

// Named, reproducible test fields.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hup/domain.hpp"

namespace hup {

struct CatalogParams {
  int n = 2;
  int k = 1;
  double c = 1.0;          // extremal amplitude
  double beta = 0.5;       // extremal rate: e^{-beta |x|^2}
  double b0 = 1.0;         // affine constant term
  std::vector<double> b;   // affine slopes on the unweighted axes (empty: all ones)
  double B = 0.5;          // affine Gaussian rate: e^{-B |x|^2}
  std::uint64_t seed = 0;  // polygauss_random
  std::optional<SupportBox> box;  // bump; default [1, 2]^n
  int wall_power = 1;      // bump wall exponent
};

/// extremal, affine_equality, sharp_example, polygauss_random, bump.
TestField catalog_get(const std::string& name, const CatalogParams& params);
const std::vector<std::string>& catalog_names();

/// Degree cap and rates of the random PolyGauss generator.
inline constexpr int kRandomDegree = 4;

/// w(x) Q(x) e^{-s|x|^2/2}: Q has every monomial of total degree <= 4 with a
/// coefficient uniform in [-1, 1]; s in {1, 2}. Deterministic in the seed.
PolyGaussDescriptor random_polygauss(const OrthantSpec& spec, std::uint64_t seed);

/// prod_i exp(-1 / (1 - t_i^2)), t_i the affine map of x_i onto (-1, 1).
double bump_profile(double x, double lo, double hi);

}  // namespace hup
