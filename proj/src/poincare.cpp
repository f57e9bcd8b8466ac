#include "hup/poincare.hpp"

#include <algorithm>
#include <cmath>

#include "hup/errors.hpp"

namespace hup {

namespace {

double dirichlet_under(const GradFunction& f, const ScaledGaussianMeasure& mu, const QuadratureConfig& cfg) {
  const std::size_t n = mu.dim();
  return measure_expectation(
      mu,
      [&f, n](std::span<const double> x) {
        double g[CompiledPolynomial::kMaxDim];
        f(x, std::span<double>(g, n));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += g[i] * g[i];
        return s;
      },
      cfg);
}

Integrand value_of(const GradFunction& f, std::size_t n) {
  return [&f, n](std::span<const double> x) {
    double g[CompiledPolynomial::kMaxDim];
    return f(x, std::span<double>(g, n));
  };
}

bool negligible_variance(double var, double second_moment) {
  return var <= 1e-14 * std::max(second_moment, 1e-300);
}

}  // namespace

double rayleigh_quotient(const GradFunction& f, const ScaledGaussianMeasure& mu, const QuadratureConfig& cfg) {
  const MeanVar mv = measure_mean_var(mu, value_of(f, mu.dim()), cfg);
  require(!negligible_variance(mv.variance, mv.variance + mv.mean * mv.mean), ErrorKind::Degenerate,
          "Rayleigh quotient undefined for zero variance");
  return dirichlet_under(f, mu, cfg) / mv.variance;
}

PoincareGap poincare_gap(const GradFunction& f, const ScaledGaussianMeasure& mu, const QuadratureConfig& cfg) {
  PoincareGap g;
  const MeanVar mv = measure_mean_var(mu, value_of(f, mu.dim()), cfg);
  g.variance = mv.variance;
  g.dirichlet = dirichlet_under(f, mu, cfg);
  if (negligible_variance(mv.variance, mv.variance + mv.mean * mv.mean)) {
    g.degenerate = true;
    g.gap = 0.0;
    return g;
  }
  g.gap = g.dirichlet - mv.variance / (mu.lambda() * mu.lambda());
  return g;
}

PoincareStability poincare_stability_gap(const GradFunction& f, const ScaledGaussianMeasure& mu,
                                         const QuadratureConfig& cfg) {
  const std::size_t n = mu.dim();
  const double l2 = mu.lambda() * mu.lambda();
  const Integrand fv = value_of(f, n);
  const MeanVar mv = measure_mean_var(mu, fv, cfg);
  PoincareStability s;
  s.mean = mv.mean;
  s.variance = mv.variance;
  s.d.assign(n, 0.0);
  // Unweighted coordinates have mean 0 and variance lambda^2 under mu and
  // are independent of everything else, so the regression is diagonal.
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.exponents().is_weighted(i)) continue;
    const double m = mv.mean;
    const double cov = measure_expectation(
        mu, [&fv, m, i](std::span<const double> x) { return (fv(x) - m) * x[i]; }, cfg);
    s.d[i] = cov / l2;
  }
  const double m = mv.mean;
  const std::vector<double> d = s.d;
  // The moments of f above passed the order-halving test, so its square does
  // too; the residual itself is rounding noise for restricted affine f and
  // cannot be tested relatively.
  QuadratureConfig rc = cfg;
  rc.check_convergence = false;
  s.residual_variance = measure_expectation(
      mu,
      [&fv, m, &d, n](std::span<const double> x) {
        double r = fv(x) - m;
        for (std::size_t i = 0; i < n; ++i) r -= d[i] * x[i];
        return r * r;
      },
      rc);
  const double dir = dirichlet_under(f, mu, cfg);
  s.lhs_gap = dir - mv.variance / l2;
  s.rhs_bound = s.residual_variance / l2;
  s.margin = s.lhs_gap - s.rhs_bound;
  s.scale = std::max(dir, mv.variance / l2);
  return s;
}

bool is_restricted_affine(const PoincareStability& s, double tol) {
  return s.residual_variance < tol * s.variance || s.variance == 0.0;
}

double additive_deficit_via_poincare(const TestField& u, double alpha, const QuadratureConfig& cfg) {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::Parameter, "alpha must be > 0");
  const OrthantSpec& spec = u.spec();
  const std::size_t n = u.dim();
  for (std::size_t i = spec.first_wall(); i < n; ++i)
    require(u.wall_exponents()[i] == 1, ErrorKind::Capability, "needs wall exponent 1 on every wall");
  const double a2 = alpha * alpha;
  // Z dmu = w^2 e^{-|x|^2 / alpha^2} dx and |grad psi|^2 = |grad v + x v / alpha^2|^2 e^{|x|^2 / alpha^2}.
  // The exponentials cancel, so the integral is taken on the field's own grid
  // rather than on the measure grid, which is too narrow for small alpha.
  const std::size_t first = spec.first_wall();
  double e = 0.0;
  field_quadrature(
      u, u.decay_rate(),
      [&u, n, a2, first](std::span<const double> x, std::span<double> out) {
        double g[CompiledPolynomial::kMaxDim];
        const double v = u.residual(x, std::span<double>(g, n));
        double s = 0.0, w2 = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double t = g[i] + x[i] * v / a2;
          s += t * t;
          if (i >= first) w2 *= x[i] * x[i];
        }
        out[0] = s * w2;
      },
      std::span<double>(&e, 1), cfg);
  return a2 * e;
}

}  // namespace hup
