#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace hup {

/// Exponent vector of a monomial x^gamma.
using MultiIndex = std::vector<int>;

/// Sparse multivariate polynomial with real coefficients. Terms are kept in
/// a std::map so iteration order (and therefore every derived sum) is
/// deterministic.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double>;

  explicit Polynomial(std::size_t dim = 0) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, double c);
  static Polynomial monomial(const MultiIndex& gamma, double c = 1.0);
  /// x_axis as a polynomial in `dim` variables.
  static Polynomial coordinate(std::size_t dim, std::size_t axis);

  std::size_t dim() const noexcept { return dim_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Adds c * x^gamma, dropping the term if it cancels to exactly zero.
  void add_term(const MultiIndex& gamma, double c);
  double coefficient(const MultiIndex& gamma) const;

  int total_degree() const;
  int degree_in(std::size_t axis) const;
  /// Smallest exponent of `axis` over all terms (0 for the zero polynomial).
  int min_degree_in(std::size_t axis) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Multiplies by x_axis^power.
  Polynomial times_coordinate(std::size_t axis, int power = 1) const;
  /// Multiplies by x^gamma.
  Polynomial times_monomial(const MultiIndex& gamma) const;
  /// Divides by x^gamma; every term must be divisible.
  Polynomial divided_by_monomial(const MultiIndex& gamma) const;
  Polynomial derivative(std::size_t axis) const;
  /// Polynomial in x evaluated at (x_1 * scale, ..., x_n * scale).
  Polynomial rescaled_argument(double scale) const;

  double eval(std::span<const double> x) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t dim_;
  TermMap terms_;
};

/// Flat, allocation-free evaluator for a Polynomial. Used in quadrature
/// inner loops.
class CompiledPolynomial {
 public:
  static constexpr std::size_t kMaxDim = 12;
  static constexpr int kMaxDegree = 96;

  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  std::size_t dim() const noexcept { return dim_; }
  double eval(std::span<const double> x) const;
  /// Returns the value and writes the gradient into `grad` (size dim()).
  double eval(std::span<const double> x, std::span<double> grad) const;

 private:
  std::size_t dim_ = 0;
  std::vector<int> max_degree_;
  std::vector<int> exponents_;  // term-major, dim_ entries per term
  std::vector<double> coefficients_;
};

}  // namespace hup
