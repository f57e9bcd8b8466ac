#pragma once

// Gaussian-type rules per axis and tensor-product integration over orthants.
//
// Every rule comes out of the same symmetric tridiagonal (Jacobi matrix)
// eigenproblem; only the source of the recurrence coefficients differs
// (closed forms for Hermite/Laguerre/Legendre, a high-precision Chebyshev
// algorithm on exact Gamma moments for the half-range weight x^a e^{-x^2}).

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hup/domain.hpp"

namespace hup {

enum class AxisDomain {
  FullLine,  // weight e^{-t^2} on R
  HalfLine,  // weight t^a e^{-t^2} on (0, inf)
  Interval,  // unit weight on [lo, hi]
};

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  AxisDomain domain = AxisDomain::FullLine;
  double exponent = 0.0;  // a, for HalfLine
  double lo = 0.0;        // Interval bounds
  double hi = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Closed-form integral of the weight function over the domain.
  double weight_mass() const;
};

inline constexpr int kMaxRuleOrder = 200;

/// Gauss rule for a weight with three-term recurrence coefficients
/// alpha[0..m-1], beta[0..m-1] (beta[0] is the total mass).
AxisRule gauss_from_recurrence(std::span<const double> alpha, std::span<const double> beta);

/// m-point Gauss-Hermite rule, weight e^{-t^2}.
AxisRule hermite_rule(int m);
/// m-point generalized Gauss-Laguerre rule, weight t^alpha e^{-t} on (0, inf).
AxisRule laguerre_rule(int m, double alpha);
/// Half-line rule for x^a e^{-x^2} built through t = x^2 from the
/// generalized Laguerre weight t^{(a-1)/2} e^{-t}. Exact for polynomials in
/// x^2 only.
AxisRule half_monomial_rule(int m, double a);
/// Gauss rule for x^a e^{-x^2} on (0, inf), exact for every polynomial in x
/// of degree <= 2m - 1. Cached per (m, a).
AxisRule half_range_rule(int m, double a);
/// Gauss-Legendre on [lo, hi].
AxisRule legendre_panel_rule(int m, double lo, double hi);
/// `panels` equal Gauss-Legendre panels of m points each on [lo, hi].
AxisRule composite_legendre_rule(int m, int panels, double lo, double hi);

/// One axis of a tensor grid: the rule plus the affine substitution x = scale * t.
struct GridAxis {
  GridAxis(AxisRule rule, double scale = 1.0);

  AxisRule rule;
  double scale;
  std::vector<double> x;             // mapped nodes
  std::vector<double> weight;        // for int W(x) f(x) dx, W the implicit weight
  std::vector<double> plain_weight;  // for int f(x) dx
};

enum class WeightMode {
  Implicit,  // integrand is multiplied by the axes' implicit weight functions
  Plain,     // Lebesgue integral of the integrand itself
};

/// Tensor product of per-axis rules. The implicit weight of a scaled axis is
/// x^a exp(-(x/scale)^2) (Gaussian axes) or 1 (intervals).
class QuadratureGrid {
 public:
  explicit QuadratureGrid(std::vector<GridAxis> axes);

  std::size_t dim() const noexcept { return axes_.size(); }
  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  std::size_t node_count() const noexcept { return node_count_; }
  /// Closed-form product of the per-axis implicit-weight masses.
  double implicit_mass() const;

 private:
  std::vector<GridAxis> axes_;
  std::size_t node_count_;
};

using Integrand = std::function<double(std::span<const double> x)>;
/// Writes several integrand components at x into `out`.
using MultiIntegrand = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Compensated (Neumaier) sum over the tensor node set in lexicographic
/// order. Throws an evaluation error naming the node if the integrand is not
/// finite there.
double tensor_integrate(const QuadratureGrid& grid, const Integrand& f, WeightMode mode = WeightMode::Implicit);
void tensor_integrate(const QuadratureGrid& grid, const MultiIntegrand& f, std::span<double> result,
                      WeightMode mode = WeightMode::Implicit);

/// Grid for integrands decaying like exp(-rate |x|^2) on the orthant:
/// Hermite on free axes, half-range (a = 0) on wall axes, scale 1/sqrt(rate).
QuadratureGrid orthant_grid(const OrthantSpec& spec, double rate, int order);
/// Grid whose implicit weight is x^A exp(-|x|^2 / (2 lambda^2)).
QuadratureGrid measure_grid(const WeightExponents& a, double lambda, int order);
/// Composite Gauss-Legendre grid on a box.
QuadratureGrid box_grid(const SupportBox& box, int order, int panels);

/// Hyperspherical product rule over R^n_{k,+}. The radial rule carries the
/// weight r^{c+n-1} exp(-rate r^2) so integrands behaving like r^c near the
/// origin (e.g. |x|^{2a} u^2 with real a) are integrated to full accuracy.
class SphericalGrid {
 public:
  SphericalGrid(const OrthantSpec& spec, double rate, double radial_power, int radial_order, int angular_order);

  /// Lebesgue integral of f over the orthant.
  double integrate(const Integrand& f) const;
  void integrate(const MultiIntegrand& f, std::span<double> result) const;

 private:
  OrthantSpec spec_;
  double radial_power_;
  GridAxis radial_;
  std::vector<AxisRule> angles_;
};

struct QuadratureConfig {
  int gauss_order = 60;    // per Gaussian-weight axis
  int panel_order = 80;    // per Legendre panel (bump integrands)
  int panels = 2;          // panels per axis for boxes
  int angular_order = 60;  // per angle of the spherical grid
  double convergence_tol = 1e-6;
  bool check_convergence = true;
};

/// Writes "index,node,weight" rows.
void write_rule_csv(std::ostream& os, const AxisRule& rule);

}  // namespace hup
