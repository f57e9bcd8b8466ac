#include "hup/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"

namespace hup {

namespace {

constexpr double kTinyMass = 1e-300;

// Order-halving test. Differences are measured against the integral of |f|
// so integrals that cancel to (nearly) zero are not flagged.
void check_agreement(std::span<const double> coarse, std::span<const double> fine, std::span<const double> magnitude,
                     double tol, const char* what) {
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double diff = std::abs(fine[i] - coarse[i]);
    const double scale = std::max(magnitude[i], kTinyMass);
    if (diff > tol * scale)
      fail(ErrorKind::Convergence, std::string(what) + ": order doubling changed the result by " +
                                       std::to_string(diff / scale) + " relative");
  }
}

// f followed by |f|, component by component.
MultiIntegrand with_magnitudes(const MultiIntegrand& f, std::size_t count) {
  return [&f, count](std::span<const double> x, std::span<double> out) {
    f(x, out.first(count));
    for (std::size_t i = 0; i < count; ++i) out[count + i] = std::abs(out[i]);
  };
}

int half_order(int m) { return std::max(1, m / 2); }

const PolyGaussDescriptor& exact_or_fail(const TestField& u) {
  require(u.has_exact_form(), ErrorKind::Capability, "oracle backend requires an exact form");
  return *u.exact_form();
}

int wall_power(const TestField& u) {
  int p = 0;
  for (int e : u.wall_exponents()) p += e;
  return p;
}

// Integrates f over the orthant with a spherical grid matched to the
// radial behaviour r^power near the origin.
void spherical_quadrature(const TestField& u, double power, const MultiIntegrand& f, std::span<double> out,
                          const QuadratureConfig& cfg) {
  const int n = u.spec().n();
  require(power + n - 1.0 >= 0.0, ErrorKind::Capability, "radial singularity too strong for the spherical rule");
  SphericalGrid fine(u.spec(), u.decay_rate(), power, cfg.gauss_order, cfg.angular_order);
  if (!cfg.check_convergence) {
    fine.integrate(f, out);
    return;
  }
  const std::size_t c = out.size();
  const MultiIntegrand g = with_magnitudes(f, c);
  std::vector<double> a(2 * c), b(2 * c);
  fine.integrate(g, a);
  SphericalGrid(u.spec(), u.decay_rate(), power, half_order(cfg.gauss_order), half_order(cfg.angular_order))
      .integrate(g, b);
  std::copy_n(a.begin(), c, out.begin());
  check_agreement(std::span<const double>(b).first(c), out, std::span<const double>(a).subspan(c),
                  cfg.convergence_tol, "spherical quadrature");
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::Oracle ? "oracle" : "quadrature"; }

Backend backend_from_string(const std::string& s) {
  if (s == "oracle") return Backend::Oracle;
  if (s == "quadrature") return Backend::Quadrature;
  fail(ErrorKind::Parameter, "unknown backend '" + s + "'");
}

double CoreFunctionals::scale() const noexcept { return std::max({E, M, N}); }

void field_quadrature(const TestField& u, double rate, const MultiIntegrand& f, std::span<double> out,
                      const QuadratureConfig& cfg) {
  auto run = [&](const MultiIntegrand& h, bool coarse, std::span<double> result) {
    if (u.support()) {
      const int m = coarse ? half_order(cfg.panel_order) : cfg.panel_order;
      tensor_integrate(box_grid(*u.support(), m, cfg.panels), h, result, WeightMode::Plain);
    } else {
      const int m = coarse ? half_order(cfg.gauss_order) : cfg.gauss_order;
      tensor_integrate(orthant_grid(u.spec(), rate, m), h, result, WeightMode::Plain);
    }
  };
  if (!cfg.check_convergence) {
    run(f, false, out);
    return;
  }
  const std::size_t c = out.size();
  const MultiIntegrand g = with_magnitudes(f, c);
  std::vector<double> a(2 * c), b(2 * c);
  run(g, false, a);
  run(g, true, b);
  std::copy_n(a.begin(), c, out.begin());
  check_agreement(std::span<const double>(b).first(c), out, std::span<const double>(a).subspan(c),
                  cfg.convergence_tol, "tensor quadrature");
}

CoreFunctionals core_functionals(const TestField& u, Backend backend, const QuadratureConfig& cfg) {
  CoreFunctionals f;
  f.backend = backend;
  f.n = u.spec().n();
  f.k = u.spec().k();
  if (backend == Backend::Oracle) {
    const PolyGaussDescriptor& d = exact_or_fail(u);
    f.N = descriptor_mass(d, u.spec());
    f.M = descriptor_second_moment(d, u.spec());
    f.E = descriptor_dirichlet(d, u.spec());
    require(f.N != 0.0 || f.M == 0.0, ErrorKind::Evaluation, "zero mass with nonzero second moment");
    return f;
  }
  const std::size_t n = u.dim();
  double out[3];
  field_quadrature(
      u, u.decay_rate(),
      [&u, n](std::span<const double> x, std::span<double> o) {
        double g[CompiledPolynomial::kMaxDim];
        const double v = u.eval(x, std::span<double>(g, n));
        double r2 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          r2 += x[i] * x[i];
          g2 += g[i] * g[i];
        }
        o[0] = v * v;
        o[1] = r2 * v * v;
        o[2] = g2;
      },
      out, cfg);
  f.N = out[0];
  f.M = out[1];
  f.E = out[2];
  return f;
}

double hup_ratio(const CoreFunctionals& f) {
  require(f.N >= kTinyMass, ErrorKind::Degenerate, "HUP ratio undefined for zero mass");
  return f.E * f.M / (f.N * f.N);
}

double hup_ratio(const TestField& u, Backend backend, const QuadratureConfig& cfg) {
  return hup_ratio(core_functionals(u, backend, cfg));
}

double radial_moment(const TestField& u, double a, Backend backend, const QuadratureConfig& cfg) {
  require(std::isfinite(a), ErrorKind::Parameter, "radial exponent must be finite");
  if (backend == Backend::Oracle) {
    const PolyGaussDescriptor& d = exact_or_fail(u);
    if (d.is_zero()) return 0.0;
    return descriptor_radial_moment(d * d, u.spec(), a);
  }
  const std::size_t n = u.dim();
  auto integrand = [&u, a, n](std::span<const double> x, std::span<double> o) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += x[i] * x[i];
    const double v = u.eval(x);
    o[0] = v * v * (a == 0.0 ? 1.0 : std::pow(r2, a));
  };
  double out = 0.0;
  if (u.support()) {
    if (a < 0.0) {
      bool origin_inside = true;
      for (std::size_t i = 0; i < n; ++i)
        origin_inside = origin_inside && u.support()->lo[i] <= 0.0 && u.support()->hi[i] >= 0.0;
      require(!origin_inside, ErrorKind::Capability, "support box contains the origin");
    }
    field_quadrature(u, u.decay_rate(), integrand, std::span<double>(&out, 1), cfg);
    return out;
  }
  spherical_quadrature(u, 2.0 * a + 2.0 * wall_power(u), integrand, std::span<double>(&out, 1), cfg);
  return out;
}

double hardy_denominator(const TestField& u, Backend backend, const QuadratureConfig& cfg) {
  require(u.spec().k() >= 1 || u.spec().n() >= 3, ErrorKind::Capability,
          "Hardy inequality is degenerate for k = 0 and n <= 2");
  return radial_moment(u, -1.0, backend, cfg);
}

double hardy_ratio(const TestField& u, Backend backend, const QuadratureConfig& cfg) {
  const double den = hardy_denominator(u, backend, cfg);
  require(den >= kTinyMass, ErrorKind::Degenerate, "Hardy ratio undefined for zero mass");
  return core_functionals(u, backend, cfg).E / den;
}

ScaledGaussianMeasure::ScaledGaussianMeasure(WeightExponents a, double lambda) : a_(std::move(a)), lambda_(lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Parameter, "measure scale lambda must be > 0");
  const double s = 1.0 / (2.0 * lambda * lambda);
  z_ = 1.0;
  for (std::size_t i = 0; i < a_.dim(); ++i)
    z_ *= a_.is_weighted(i) ? half_moment(a_[i], s) : std::sqrt(2.0 * std::numbers::pi) * lambda;
}

double ScaledGaussianMeasure::density(std::span<const double> x) const {
  require(x.size() == dim(), ErrorKind::Parameter, "point has wrong dimension");
  require(a_.contains(x), ErrorKind::Domain, "point outside the measure's orthant");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return a_.weight(x) * std::exp(-r2 / (2.0 * lambda_ * lambda_)) / z_;
}

QuadratureGrid ScaledGaussianMeasure::grid(int order) const { return measure_grid(a_, lambda_, order); }

double measure_expectation(const ScaledGaussianMeasure& mu, const Integrand& f, const QuadratureConfig& cfg) {
  if (!cfg.check_convergence) return tensor_integrate(mu.grid(cfg.gauss_order), f) / mu.normalization();
  const MultiIntegrand g = [&f](std::span<const double> x, std::span<double> out) {
    out[0] = f(x);
    out[1] = std::abs(out[0]);
  };
  double a[2], b[2];
  tensor_integrate(mu.grid(cfg.gauss_order), g, std::span<double>(a, 2));
  tensor_integrate(mu.grid(half_order(cfg.gauss_order)), g, std::span<double>(b, 2));
  check_agreement(std::span<const double>(b, 1), std::span<const double>(a, 1), std::span<const double>(a + 1, 1),
                  cfg.convergence_tol, "measure quadrature");
  return a[0] / mu.normalization();
}

MeanVar measure_mean_var(const ScaledGaussianMeasure& mu, const Integrand& f, const QuadratureConfig& cfg) {
  MeanVar mv;
  mv.mean = measure_expectation(mu, f, cfg);
  const double m = mv.mean;
  mv.variance = measure_expectation(
      mu,
      [&f, m](std::span<const double> x) {
        const double d = f(x) - m;
        return d * d;
      },
      cfg);
  return mv;
}

}  // namespace hup
