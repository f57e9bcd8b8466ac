#pragma once

// Mass, second moment, Dirichlet energy, Hardy denominator and the
// monomial-weighted Gaussian measures.

#include <span>
#include <string>

#include "hup/domain.hpp"
#include "hup/quadrature.hpp"

namespace hup {

enum class Backend { Quadrature, Oracle };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct CoreFunctionals {
  double N = 0.0;  // int u^2
  double M = 0.0;  // int |x|^2 u^2
  double E = 0.0;  // int |grad u|^2
  Backend backend = Backend::Oracle;
  int n = 0;
  int k = 0;

  int effective_dim() const noexcept { return n + 2 * k; }
  double scale() const noexcept;
};

/// Integrates f (Lebesgue measure) over the orthant of `u`, on the box grid
/// when u has a declared support and otherwise on a Gaussian grid matched to
/// exp(-rate |x|^2). With cfg.check_convergence the half-order result must
/// agree with the full-order one.
void field_quadrature(const TestField& u, double rate, const MultiIntegrand& f, std::span<double> out,
                      const QuadratureConfig& cfg = {});

CoreFunctionals core_functionals(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

/// E M / N^2.
double hup_ratio(const CoreFunctionals& f);
double hup_ratio(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

/// int |x|^{2a} u^2 for real a.
double radial_moment(const TestField& u, double a, Backend backend, const QuadratureConfig& cfg = {});
/// int u^2 / |x|^2.
double hardy_denominator(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});
/// int |grad u|^2 / int u^2 / |x|^2.
double hardy_ratio(const TestField& u, Backend backend, const QuadratureConfig& cfg = {});

/// Probability measure proportional to x^A exp(-|x|^2 / (2 lambda^2)) on the
/// orthant where x_i > 0 for a_i > 0.
class ScaledGaussianMeasure {
 public:
  ScaledGaussianMeasure(WeightExponents a, double lambda);

  const WeightExponents& exponents() const noexcept { return a_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t dim() const noexcept { return a_.dim(); }
  /// Z = int x^A exp(-|x|^2 / (2 lambda^2)) dx, closed form.
  double normalization() const noexcept { return z_; }
  /// Normalized density at an interior point.
  double density(std::span<const double> x) const;
  /// Grid whose implicit weight is the unnormalized density.
  QuadratureGrid grid(int order) const;

 private:
  WeightExponents a_;
  double lambda_;
  double z_;
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

/// Expectation against the measure; f must have polynomial growth.
double measure_expectation(const ScaledGaussianMeasure& mu, const Integrand& f, const QuadratureConfig& cfg = {});
MeanVar measure_mean_var(const ScaledGaussianMeasure& mu, const Integrand& f, const QuadratureConfig& cfg = {});

}  // namespace hup
