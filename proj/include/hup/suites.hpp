#pragma once

// Invariant suites behind `hupcheck verify`, the deficit report and the
// perturbation sweep. Each suite returns a Report whose cases are sorted by
// name; fields are evaluated concurrently but the result does not depend on
// the thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hup/catalog.hpp"
#include "hup/functionals.hpp"
#include "hup/report.hpp"

namespace hup {

struct SuiteConfig {
  std::vector<OrthantSpec> orthants;  // empty: default_orthants()
  int count = 50;                     // random fields per orthant
  std::uint64_t seed = 0;
  std::vector<double> alphas = {0.5, 1.0, 2.0};
  std::vector<double> lambdas = {0.5, 1.0, 2.0};
  std::vector<int> lift_l = {1, 2};
  int lift_count = 3;                 // random PolyGauss fields per orthant and l
  int poincare_count = 100;           // random polynomials per weight vector
  int consistency_count = 20;         // fields for the Poincare form of the deficit
  std::optional<std::string> field;   // restrict to one catalog field
  CatalogParams params;               // parameters of that field (n, k taken per orthant)
  std::optional<Backend> backend;     // default: oracle when exact
  QuadratureConfig quad;
  std::optional<double> tol;          // overrides every per-check tolerance
  int threads = 0;                    // 0: hardware concurrency
};

/// (1,1), (2,1), (2,2), (3,1), (3,2).
const std::vector<OrthantSpec>& default_orthants();

Report verify_identity(const SuiteConfig& cfg);
Report verify_lifting(const SuiteConfig& cfg);
Report verify_poincare(const SuiteConfig& cfg);
Report verify_stability(const SuiteConfig& cfg);
/// Oracle against quadrature on every PolyGauss ingredient.
Report verify_backends(const SuiteConfig& cfg);

const std::vector<std::string>& suite_names();
/// One of suite_names() or "all".
Report run_suite(const std::string& name, const SuiteConfig& cfg);

/// Deficits and projections of one field; the single case holds every value
/// and checks rho1 >= dist_E.
Report deficit_report_for(const TestField& u, double alpha, std::optional<Backend> backend,
                          const QuadratureConfig& quad = {});

struct SweepConfig {
  std::string base = "extremal";
  std::string perturbation = "x1";  // x1, x1sq, radial
  CatalogParams params;
  double eps_min = 0.0;
  double eps_max = 1.0;
  int count = 11;
  std::optional<Backend> backend;
  QuadratureConfig quad;
  double tol = 1e-7;
};

const std::vector<std::string>& perturbation_names();
/// Rows u_eps = base + eps * perturbation, perturbation = q(x) w(x) times the
/// base Gaussian with q = x_1, x_1^2 or |x|^2.
Report sweep(const SweepConfig& cfg);

}  // namespace hup
