#include "hup/exact_oracle.hpp"

#include <cmath>

#include "hup/errors.hpp"

namespace hup {

namespace {

void check_rate(double s) {
  require(std::isfinite(s) && s > 0.0, ErrorKind::Parameter, "Gaussian rate must be > 0");
}

// Per-axis moment at unit rate; 0 for odd exponents on full axes.
double axis_moment(int m, bool half) {
  if (half) return half_moment(m, 1.0);
  return full_moment(m, 1.0);
}

}  // namespace

double half_moment(int m, double s) {
  require(m >= 0, ErrorKind::Parameter, "moment order must be >= 0");
  return half_moment(static_cast<double>(m), s);
}

double half_moment(double p, double s) {
  check_rate(s);
  require(std::isfinite(p) && p > -1.0, ErrorKind::Parameter, "moment exponent must exceed -1");
  const double h = 0.5 * (p + 1.0);
  return 0.5 * std::exp(std::lgamma(h) - h * std::log(s));
}

double full_moment(int m, double s) {
  require(m >= 0, ErrorKind::Parameter, "moment order must be >= 0");
  check_rate(s);
  if (m % 2 == 1) return 0.0;
  return 2.0 * half_moment(m, s);
}

HalfAxes half_axes(const OrthantSpec& spec) {
  HalfAxes h(spec.dim());
  for (std::size_t i = 0; i < spec.dim(); ++i) h[i] = spec.is_wall(i);
  return h;
}

HalfAxes half_axes(const WeightExponents& a) {
  HalfAxes h(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) h[i] = a.is_weighted(i);
  return h;
}

MomentProfile::MomentProfile(const Polynomial& p, const HalfAxes& half) : dim_(p.dim()) {
  require(half.size() == p.dim(), ErrorKind::Parameter, "axis mask has wrong dimension");
  for (const auto& [gamma, c] : p.terms()) {
    double prod = c;
    int degree = 0;
    for (std::size_t i = 0; i < dim_ && prod != 0.0; ++i) {
      prod *= axis_moment(gamma[i], half[i]);
      degree += gamma[i];
    }
    if (prod != 0.0) coeffs_[degree] += prod;
  }
}

double MomentProfile::at(double t) const {
  check_rate(t);
  const double lt = std::log(t);
  double sum = 0.0;
  for (const auto& [d, c] : coeffs_) sum += c * std::exp(-0.5 * (d + static_cast<double>(dim_)) * lt);
  return sum;
}

double MomentProfile::derivative(double t) const {
  check_rate(t);
  const double lt = std::log(t);
  double sum = 0.0;
  for (const auto& [d, c] : coeffs_) {
    const double e = 0.5 * (d + static_cast<double>(dim_));
    sum -= e * c * std::exp(-(e + 1.0) * lt);
  }
  return sum;
}

double descriptor_integral(const PolyGaussDescriptor& d, const HalfAxes& half) {
  check_rate(d.rate());
  if (d.is_zero()) return 0.0;
  return MomentProfile(d.poly(), half).at(0.5 * d.rate());
}

double descriptor_integral(const PolyGaussDescriptor& d, const OrthantSpec& spec) {
  require(d.dim() == spec.dim(), ErrorKind::Parameter, "descriptor dimension does not match the orthant");
  return descriptor_integral(d, half_axes(spec));
}

double descriptor_integral(const PolyGaussDescriptor& d, const WeightExponents& a) {
  require(d.dim() == a.dim(), ErrorKind::Parameter, "descriptor dimension does not match the weight");
  return descriptor_integral(d, half_axes(a));
}

double descriptor_radial_moment(const PolyGaussDescriptor& d, const OrthantSpec& spec, double a) {
  require(d.dim() == spec.dim(), ErrorKind::Parameter, "descriptor dimension does not match the orthant");
  require(std::isfinite(a), ErrorKind::Parameter, "radial exponent must be finite");
  check_rate(d.rate());
  const double t = 0.5 * d.rate();
  const double n = static_cast<double>(spec.dim());
  const HalfAxes half = half_axes(spec);
  double sum = 0.0;
  for (const auto& [gamma, c] : d.poly().terms()) {
    double prod = c;
    int degree = 0;
    for (std::size_t i = 0; i < spec.dim() && prod != 0.0; ++i) {
      prod *= axis_moment(gamma[i], half[i]);
      degree += gamma[i];
    }
    if (prod == 0.0) continue;
    // Split into angular part times radial Gamma integral.
    const double h0 = 0.5 * (degree + n);
    const double h = h0 + a;
    require(h > 0.0, ErrorKind::Convergence, "radial moment diverges at the origin");
    const double angular = 2.0 * prod / std::exp(std::lgamma(h0));
    sum += angular * 0.5 * std::exp(std::lgamma(h) - h * std::log(t));
  }
  return sum;
}

double descriptor_inner(const PolyGaussDescriptor& u, const PolyGaussDescriptor& v, const OrthantSpec& spec) {
  return descriptor_integral(u * v, spec);
}

double descriptor_mass(const PolyGaussDescriptor& d, const OrthantSpec& spec) {
  return descriptor_integral(d * d, spec);
}

Polynomial radius_squared(std::size_t dim) {
  Polynomial r2(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    MultiIndex g(dim, 0);
    g[i] = 2;
    r2.add_term(g, 1.0);
  }
  return r2;
}

double descriptor_second_moment(const PolyGaussDescriptor& d, const OrthantSpec& spec) {
  const PolyGaussDescriptor sq = d * d;
  return descriptor_integral(PolyGaussDescriptor(sq.rate(), sq.poly() * radius_squared(d.dim())), spec);
}

double descriptor_dirichlet(const PolyGaussDescriptor& d, const OrthantSpec& spec) {
  require(d.dim() == spec.dim(), ErrorKind::Parameter, "descriptor dimension does not match the orthant");
  check_rate(d.rate());
  double sum = 0.0;
  for (std::size_t i = 0; i < d.dim(); ++i) {
    const PolyGaussDescriptor di = d.partial(i);
    sum += descriptor_integral(di * di, spec);
  }
  return sum;
}

}  // namespace hup
