#pragma once

// Heisenberg deficits on orthants, the scale non-invariant identity and the
// full-space reference deficits.

#include "hup/functionals.hpp"

namespace hup {

/// sqrt(E M) - ((n + 2k) / 2) N.
double rho1(const CoreFunctionals& f);
double rho1(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

/// alpha^2 E + M / alpha^2 - (n + 2k) N.
double additive_deficit(const CoreFunctionals& f, double alpha);
double additive_deficit(const TestField& u, double alpha, Backend backend, const QuadratureConfig& cfg = {});

/// alpha^2 int |grad v + x v / alpha^2|^2 w^2 with v = u / w. Quadrature only.
double identity_rhs(const TestField& u, double alpha, const QuadratureConfig& cfg = {});

/// additive_deficit - identity_rhs.
double identity_residual(const TestField& u, double alpha, Backend backend, const QuadratureConfig& cfg = {});

/// (M / E)^{1/4}.
double optimal_alpha(const CoreFunctionals& f);
double optimal_alpha(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

struct DeficitReport {
  CoreFunctionals core;
  double rho1 = 0.0;
  double alpha = 1.0;
  double additive = 0.0;
  double identity_rhs = 0.0;
  double residual = 0.0;
  double alpha_star = 0.0;
  Backend backend = Backend::Oracle;
};

/// Everything above at one alpha. alpha_star is 0 when E or M vanishes.
DeficitReport deficit_report(const TestField& u, double alpha, Backend backend, const QuadratureConfig& cfg = {});

struct FullSpaceDeficits {
  double delta1 = 0.0;   // sqrt(E M) - (n / 2) N
  double delta2 = 0.0;   // E M - (n^2 / 4) N^2
  double dist_sq = 0.0;  // distance to the Gaussians c e^{-beta|x|^2}
};

/// Reference deficits on R^n (k = 0).
FullSpaceDeficits full_space_deficits(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

}  // namespace hup
