#include "hup/polynomial.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "hup/errors.hpp"

namespace hup {

namespace {

void check_dim(std::size_t a, std::size_t b) {
  require(a == b, ErrorKind::Parameter,
          "polynomial dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace

Polynomial Polynomial::constant(std::size_t dim, double c) {
  Polynomial p(dim);
  p.add_term(MultiIndex(dim, 0), c);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& gamma, double c) {
  Polynomial p(gamma.size());
  p.add_term(gamma, c);
  return p;
}

Polynomial Polynomial::coordinate(std::size_t dim, std::size_t axis) {
  require(axis < dim, ErrorKind::Parameter, "coordinate axis out of range");
  MultiIndex gamma(dim, 0);
  gamma[axis] = 1;
  return monomial(gamma, 1.0);
}

void Polynomial::add_term(const MultiIndex& gamma, double c) {
  check_dim(gamma.size(), dim_);
  for (int g : gamma) require(g >= 0, ErrorKind::Parameter, "negative exponent in multi-index");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(gamma, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coefficient(const MultiIndex& gamma) const {
  auto it = terms_.find(gamma);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [gamma, c] : terms_) {
    int s = 0;
    for (int g : gamma) s += g;
    d = std::max(d, s);
  }
  return d;
}

int Polynomial::degree_in(std::size_t axis) const {
  int d = 0;
  for (const auto& [gamma, c] : terms_) d = std::max(d, gamma.at(axis));
  return d;
}

int Polynomial::min_degree_in(std::size_t axis) const {
  if (terms_.empty()) return 0;
  int d = terms_.begin()->first.at(axis);
  for (const auto& [gamma, c] : terms_) d = std::min(d, gamma[axis]);
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_dim(dim_, other.dim_);
  for (const auto& [gamma, c] : other.terms_) add_term(gamma, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_dim(dim_, other.dim_);
  for (const auto& [gamma, c] : other.terms_) add_term(gamma, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [gamma, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  check_dim(a.dim_, b.dim_);
  Polynomial out(a.dim_);
  MultiIndex gamma(a.dim_);
  for (const auto& [ga, ca] : a.terms_) {
    for (const auto& [gb, cb] : b.terms_) {
      for (std::size_t i = 0; i < a.dim_; ++i) gamma[i] = ga[i] + gb[i];
      out.add_term(gamma, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::times_coordinate(std::size_t axis, int power) const {
  require(axis < dim_, ErrorKind::Parameter, "coordinate axis out of range");
  require(power >= 0, ErrorKind::Parameter, "negative power");
  Polynomial out(dim_);
  for (const auto& [gamma, c] : terms_) {
    MultiIndex g = gamma;
    g[axis] += power;
    out.terms_.emplace(std::move(g), c);
  }
  return out;
}

Polynomial Polynomial::times_monomial(const MultiIndex& gamma) const {
  check_dim(gamma.size(), dim_);
  Polynomial out(dim_);
  for (const auto& [g0, c] : terms_) {
    MultiIndex g = g0;
    for (std::size_t i = 0; i < dim_; ++i) g[i] += gamma[i];
    out.terms_.emplace(std::move(g), c);
  }
  return out;
}

Polynomial Polynomial::divided_by_monomial(const MultiIndex& gamma) const {
  check_dim(gamma.size(), dim_);
  Polynomial out(dim_);
  for (const auto& [g0, c] : terms_) {
    MultiIndex g = g0;
    for (std::size_t i = 0; i < dim_; ++i) {
      g[i] -= gamma[i];
      require(g[i] >= 0, ErrorKind::Parameter, "polynomial is not divisible by the monomial");
    }
    out.terms_.emplace(std::move(g), c);
  }
  return out;
}

Polynomial Polynomial::derivative(std::size_t axis) const {
  require(axis < dim_, ErrorKind::Parameter, "derivative axis out of range");
  Polynomial out(dim_);
  for (const auto& [gamma, c] : terms_) {
    if (gamma[axis] == 0) continue;
    MultiIndex g = gamma;
    g[axis] -= 1;
    out.add_term(g, c * gamma[axis]);
  }
  return out;
}

Polynomial Polynomial::rescaled_argument(double scale) const {
  Polynomial out(dim_);
  for (const auto& [gamma, c] : terms_) {
    int d = 0;
    for (int g : gamma) d += g;
    double f = 1.0;
    for (int j = 0; j < d; ++j) f *= scale;
    out.add_term(gamma, c * f);
  }
  return out;
}

double Polynomial::eval(std::span<const double> x) const {
  check_dim(x.size(), dim_);
  double sum = 0.0;
  for (const auto& [gamma, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < dim_; ++i)
      for (int j = 0; j < gamma[i]; ++j) t *= x[i];
    sum += t;
  }
  return sum;
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()), max_degree_(p.dim(), 0) {
  require(dim_ <= kMaxDim, ErrorKind::Capability, "polynomial dimension exceeds evaluator limit");
  exponents_.reserve(p.terms().size() * dim_);
  coefficients_.reserve(p.terms().size());
  for (const auto& [gamma, c] : p.terms()) {
    for (std::size_t i = 0; i < dim_; ++i) {
      require(gamma[i] <= kMaxDegree, ErrorKind::Capability, "polynomial degree exceeds evaluator limit");
      max_degree_[i] = std::max(max_degree_[i], gamma[i]);
      exponents_.push_back(gamma[i]);
    }
    coefficients_.push_back(c);
  }
}

namespace {

using PowerTable = std::array<std::array<double, CompiledPolynomial::kMaxDegree + 1>, CompiledPolynomial::kMaxDim>;

void fill_powers(PowerTable& pw, std::span<const double> x, const std::vector<int>& max_degree) {
  for (std::size_t i = 0; i < max_degree.size(); ++i) {
    pw[i][0] = 1.0;
    for (int j = 1; j <= max_degree[i]; ++j) pw[i][j] = pw[i][j - 1] * x[i];
  }
}

}  // namespace

double CompiledPolynomial::eval(std::span<const double> x) const {
  PowerTable pw;
  fill_powers(pw, x, max_degree_);
  double sum = 0.0;
  const int* e = exponents_.data();
  for (double c : coefficients_) {
    double t = c;
    for (std::size_t i = 0; i < dim_; ++i) t *= pw[i][e[i]];
    sum += t;
    e += dim_;
  }
  return sum;
}

double CompiledPolynomial::eval(std::span<const double> x, std::span<double> grad) const {
  PowerTable pw;
  fill_powers(pw, x, max_degree_);
  std::fill(grad.begin(), grad.begin() + dim_, 0.0);
  double sum = 0.0;
  const int* e = exponents_.data();
  for (double c : coefficients_) {
    double t = c;
    for (std::size_t i = 0; i < dim_; ++i) t *= pw[i][e[i]];
    sum += t;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      double g = c * e[i] * pw[i][e[i] - 1];
      for (std::size_t j = 0; j < dim_; ++j)
        if (j != i) g *= pw[j][e[j]];
      grad[i] += g;
    }
    e += dim_;
  }
  return sum;
}

}  // namespace hup
