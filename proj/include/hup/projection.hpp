#pragma once

// Distances from a field to the extremal family c w e^{-beta|x|^2} and to the
// affine family w e^{-beta|x|^2} (b + d . x'), x' the unweighted coordinates.

#include <optional>
#include <string>
#include <vector>

#include "hup/domain.hpp"
#include "hup/functionals.hpp"

namespace hup {

struct ProjectionResult {
  std::string family;
  double c = 0.0;          // coefficient of w g_beta
  double beta = 0.0;       // beta*; lambda* = 1 / sqrt(2 beta*)
  std::vector<double> d;   // coefficients of x_i w g_beta on unweighted axes
  int sign = 0;            // sign of c for the norm-constrained family
  double dist_sq = 0.0;
  double mass = 0.0;       // N of the field
  Backend backend = Backend::Oracle;
  // optimizer diagnostics
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int evaluations = 0;
  double start_spread = 0.0;  // best minus worst local optimum over the starts

  double lambda() const;
};

/// Backend used by default: the oracle when u carries an exact form.
Backend preferred_backend(const TestField& u);

/// Gaussian profile w e^{-beta|x|^2}.
PolyGaussDescriptor gaussian_profile(const OrthantSpec& spec, double beta);

/// min over c, beta of ||u - c w e^{-beta|x|^2}||^2.
ProjectionResult dist_to_E(const TestField& u, std::optional<Backend> backend = std::nullopt,
                           const QuadratureConfig& cfg = {});
/// min over b, d, beta of ||u - w e^{-beta|x|^2}(b + d . x')||^2.
ProjectionResult dist_to_affine_family(const TestField& u, std::optional<Backend> backend = std::nullopt,
                                       const QuadratureConfig& cfg = {});
/// min over beta of ||u - omega||^2, omega in the extremal family with ||omega||^2 = N.
ProjectionResult dist_to_E_norm_constrained(const TestField& u, std::optional<Backend> backend = std::nullopt,
                                            const QuadratureConfig& cfg = {});
/// min over c of ||u - c w e^{-|x|^2/(2 lambda^2)}||^2.
ProjectionResult gaussian_center_dist(const TestField& u, double lambda = 1.0,
                                      std::optional<Backend> backend = std::nullopt,
                                      const QuadratureConfig& cfg = {});
/// Affine family with the Gaussian fixed at e^{-|x|^2/(2 lambda^2)}.
ProjectionResult affine_dist_at_lambda(const TestField& u, double lambda,
                                       std::optional<Backend> backend = std::nullopt,
                                       const QuadratureConfig& cfg = {});

/// Pairings of u with a descriptor g: int u g, int |x|^2 u g, int grad u . grad g.
struct CrossFunctionals {
  double N = 0.0;
  double M = 0.0;
  double E = 0.0;
};
CrossFunctionals cross_functionals(const TestField& u, const PolyGaussDescriptor& g, Backend backend,
                                   const QuadratureConfig& cfg = {});

/// inf_c [E + M + N](u - c G), G = w e^{-|x|^2/2}, one shared c.
struct EnergyCenterDist {
  double c = 0.0;
  double value = 0.0;
};
EnergyCenterDist energy_center_dist(const TestField& u, std::optional<Backend> backend = std::nullopt,
                                    const QuadratureConfig& cfg = {});

}  // namespace hup
