#pragma once

// Gaussian Poincare inequality for the monomial-weighted measures mu_{A,lambda}.

#include <vector>

#include "hup/domain.hpp"
#include "hup/functionals.hpp"

namespace hup {

/// f(x) with its gradient written into grad.
using GradFunction = ResidualEval;

/// int |grad f|^2 dmu / Var_mu(f).
double rayleigh_quotient(const GradFunction& f, const ScaledGaussianMeasure& mu, const QuadratureConfig& cfg = {});

struct PoincareGap {
  double gap = 0.0;        // int |grad f|^2 dmu - Var(f) / lambda^2
  double dirichlet = 0.0;  // int |grad f|^2 dmu
  double variance = 0.0;
  bool degenerate = false;  // f numerically constant; gap reported as 0
};
PoincareGap poincare_gap(const GradFunction& f, const ScaledGaussianMeasure& mu, const QuadratureConfig& cfg = {});

struct PoincareStability {
  double lhs_gap = 0.0;    // int |grad f|^2 dmu - inf_c int |f - c|^2 dmu / lambda^2
  double rhs_bound = 0.0;  // inf_{c, d} int |f - c - d . x'|^2 dmu / lambda^2
  double margin = 0.0;
  double mean = 0.0;
  std::vector<double> d;   // regression slopes, zero on weighted axes
  double variance = 0.0;
  double residual_variance = 0.0;
  double scale = 0.0;      // max(int |grad f|^2 dmu, Var(f) / lambda^2)
};
PoincareStability poincare_stability_gap(const GradFunction& f, const ScaledGaussianMeasure& mu,
                                         const QuadratureConfig& cfg = {});

/// True when the restricted affine regression leaves less than tol * Var(f).
bool is_restricted_affine(const PoincareStability& s, double tol = 1e-9);

/// alpha^2 Z int |grad psi|^2 dmu with psi = (u / w) e^{|x|^2 / (2 alpha^2)},
/// mu = mu_{A, alpha / sqrt 2}, A = 2 on the walls, Z its normalization.
double additive_deficit_via_poincare(const TestField& u, double alpha, const QuadratureConfig& cfg = {});

}  // namespace hup
