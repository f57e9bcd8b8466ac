#pragma once

// Orthant geometry, monomial weights and the wall-factored test fields that
// every other module integrates.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hup/polynomial.hpp"

namespace hup {

/// R^{n-k} x R^k_{>0}. Wall axes are the last k coordinates (0-based
/// indices n-k, ..., n-1).
class OrthantSpec {
 public:
  OrthantSpec(int n, int k);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(n_); }
  std::size_t first_wall() const noexcept { return static_cast<std::size_t>(n_ - k_); }
  bool is_wall(std::size_t axis) const noexcept { return axis >= first_wall() && axis < dim(); }
  /// Effective dimension n + 2k of the sharp constant (n+2k)^2/4.
  int effective_dim() const noexcept { return n_ + 2 * k_; }
  /// Multi-index of w(x) = prod of wall coordinates.
  MultiIndex wall_index() const;
  bool contains(std::span<const double> x) const;

  friend bool operator==(const OrthantSpec&, const OrthantSpec&) = default;

 private:
  int n_;
  int k_;
};

/// Exponents a_i >= 0 of the monomial weight x^A. The induced orthant
/// requires x_i > 0 exactly where a_i > 0.
class WeightExponents {
 public:
  explicit WeightExponents(std::vector<double> a);
  /// a_i = value on the wall axes of `spec`, 0 elsewhere.
  static WeightExponents on_walls(const OrthantSpec& spec, double value);

  std::size_t dim() const noexcept { return a_.size(); }
  const std::vector<double>& values() const noexcept { return a_; }
  double operator[](std::size_t i) const { return a_.at(i); }
  double total() const noexcept;
  bool is_weighted(std::size_t axis) const { return a_.at(axis) > 0.0; }
  bool all_integer() const noexcept;
  /// Integer exponents; throws a parameter error if any entry is fractional.
  std::vector<int> integer_values() const;
  bool contains(std::span<const double> x) const;
  double weight(std::span<const double> x) const;

 private:
  std::vector<double> a_;
};

/// P(x) * exp(-rate |x|^2 / 2). The rate convention makes the extremal
/// w(x) e^{-beta |x|^2} a descriptor with rate 2 beta.
class PolyGaussDescriptor {
 public:
  PolyGaussDescriptor(double rate, Polynomial poly);

  double rate() const noexcept { return rate_; }
  const Polynomial& poly() const noexcept { return poly_; }
  std::size_t dim() const noexcept { return poly_.dim(); }
  bool is_zero() const noexcept { return poly_.is_zero(); }

  double eval(std::span<const double> x) const;
  double eval(std::span<const double> x, std::span<double> grad) const;

  PolyGaussDescriptor scaled(double c) const;
  PolyGaussDescriptor times_coordinate(std::size_t axis, int power = 1) const;
  /// d/dx_axis, i.e. (dP/dx_axis - rate x_axis P) e^{-rate|x|^2/2}.
  PolyGaussDescriptor partial(std::size_t axis) const;
  /// x -> u(x / lambda).
  PolyGaussDescriptor dilated(double lambda) const;
  /// Derivative with respect to the rate parameter, holding P fixed.
  PolyGaussDescriptor rate_derivative() const;

  friend PolyGaussDescriptor operator+(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b);
  friend PolyGaussDescriptor operator-(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b);
  /// Pointwise product; rates add.
  friend PolyGaussDescriptor operator*(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b);

 private:
  double rate_;
  Polynomial poly_;
};

/// Axis-aligned box [lo_i, hi_i] containing a field's support.
struct SupportBox {
  std::vector<double> lo;
  std::vector<double> hi;
  bool contains(std::span<const double> x) const;
};

/// v(x) and grad v(x) of the smooth residual. Writes the gradient into
/// `grad` and returns the value.
using ResidualEval = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// A field u(x) = (prod_i x_i^{p_i}) v(x) on an orthant, stored factored so
/// integrands involving u / w stay finite at the walls.
class TestField {
 public:
  TestField(OrthantSpec spec, std::vector<int> wall_exponents, ResidualEval residual, double decay_rate,
            std::optional<PolyGaussDescriptor> exact_form = std::nullopt,
            std::optional<SupportBox> support = std::nullopt, std::string label = {});

  /// Builds the residual from an exact descriptor of u; every term of u
  /// must be divisible by x^p.
  static TestField from_descriptor(OrthantSpec spec, std::vector<int> wall_exponents, PolyGaussDescriptor u,
                                   std::string label = {});

  const OrthantSpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return spec_.dim(); }
  const std::vector<int>& wall_exponents() const noexcept { return wall_exponents_; }
  double decay_rate() const noexcept { return decay_rate_; }
  const std::optional<PolyGaussDescriptor>& exact_form() const noexcept { return exact_; }
  const std::optional<SupportBox>& support() const noexcept { return support_; }
  const std::string& label() const noexcept { return label_; }
  bool has_exact_form() const noexcept { return exact_.has_value(); }

  /// Residual v and its gradient.
  double residual(std::span<const double> x, std::span<double> grad) const { return residual_(x, grad); }
  /// u and grad u by the product rule, without the interior check.
  double eval(std::span<const double> x, std::span<double> grad) const;
  double eval(std::span<const double> x) const;
  /// prod_i x_i^{p_i}.
  double wall_monomial(std::span<const double> x) const;

  /// c * u (same factorization).
  TestField scaled(double c) const;
  /// u(x / lambda); requires an exact form.
  TestField dilated(double lambda) const;
  /// u + c * other; both must be exact with equal rates and wall exponents.
  TestField plus(const TestField& other, double c = 1.0) const;

 private:
  OrthantSpec spec_;
  std::vector<int> wall_exponents_;
  ResidualEval residual_;
  double decay_rate_;
  std::optional<PolyGaussDescriptor> exact_;
  std::optional<SupportBox> support_;
  std::string label_;
};

struct FieldValue {
  double value = 0.0;
  std::vector<double> gradient;
};

/// u(x) and grad u(x) at a point strictly inside the orthant.
FieldValue field_eval(const TestField& field, std::span<const double> x);

/// c * w(x) * exp(-beta |x|^2), wall exponents 1 on every wall axis.
TestField make_extremal(const OrthantSpec& spec, double c, double beta);

/// Surface area of the unit sphere S^d in R^{d+1}.
double sphere_area(int d);

}  // namespace hup
