#include "hup/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"
#include "hup/functionals.hpp"

namespace hup {

namespace {

using LiftedIntegrand = std::function<void(std::span<const double> z, std::span<double> out)>;

int half_order(int m) { return std::max(1, m / 2); }

void check_plan(const TestField& u, const LiftPlan& plan) {
  require(plan.spec == u.spec(), ErrorKind::Parameter, "lift plan and field live on different orthants");
  require(plan.lifted_dim() <= kMaxLiftedDim, ErrorKind::Capability,
          "lifted dimension " + std::to_string(plan.lifted_dim()) + " exceeds the grid budget");
}

void check_consistent(const TestField& u, const LiftPlan& plan) {
  check_plan(u, plan);
  for (std::size_t i = plan.spec.first_wall(); i < plan.spec.dim(); ++i)
    require(plan.l[i] == u.wall_exponents()[i], ErrorKind::Parameter,
            "lift exponents must equal the field's wall exponents");
}

double gap_of(double lhs, double rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(rhs)); }

// Grid over the orthant coordinates (x', r_1, ..., r_k). Wall radii carry
// the weight r^{2 l_i} when the field is Gaussian-decaying.
QuadratureGrid radial_grid(const TestField& u, const LiftPlan& plan, int order, int panel_order, int panels) {
  std::vector<GridAxis> axes;
  const double scale = 1.0 / std::sqrt(u.decay_rate());
  for (std::size_t i = 0; i < u.dim(); ++i) {
    if (u.support()) {
      axes.emplace_back(composite_legendre_rule(panel_order, panels, u.support()->lo[i], u.support()->hi[i]));
    } else if (plan.spec.is_wall(i)) {
      axes.emplace_back(half_range_rule(order, 2.0 * plan.l[i]), scale);
    } else {
      axes.emplace_back(hermite_rule(order), scale);
    }
  }
  return QuadratureGrid(std::move(axes));
}

// Integrates a block-radial lifted integrand by reducing each block to its
// radius: int f(z) dz = prod |S^{2 l_i}| int f(x', r e_1) prod r_i^{2 l_i}.
double radial_integrate(const TestField& u, const LiftPlan& plan, const LiftedIntegrand& f,
                        const QuadratureConfig& cfg) {
  const std::size_t n = u.dim();
  const std::size_t dz = static_cast<std::size_t>(plan.lifted_dim());
  std::vector<std::size_t> offsets(n);
  for (std::size_t i = 0; i < n; ++i) offsets[i] = plan.block_offset(i);
  const double sphere = plan.sphere_factor();
  MultiIntegrand g = [&, n, dz](std::span<const double> x, std::span<double> out) {
    double z[kMaxLiftedDim] = {0.0};
    double jac = sphere;
    for (std::size_t i = 0; i < n; ++i) {
      z[offsets[i]] = x[i];
      if (plan.spec.is_wall(i))
        for (int j = 0; j < 2 * plan.l[i]; ++j) jac *= x[i];
    }
    f(std::span<const double>(z, dz), out.first(1));
    out[0] *= jac;
    out[1] = std::abs(out[0]);
  };
  auto run = [&](int m, int pm, double* r) {
    tensor_integrate(radial_grid(u, plan, m, pm, cfg.panels), g, std::span<double>(r, 2), WeightMode::Plain);
  };
  double fine[2], coarse[2];
  run(cfg.gauss_order, cfg.panel_order, fine);
  if (cfg.check_convergence) {
    run(half_order(cfg.gauss_order), half_order(cfg.panel_order), coarse);
    // Measured against int |f| so integrals that cancel are not flagged.
    if (std::abs(fine[0] - coarse[0]) > cfg.convergence_tol * std::max(fine[1], 1e-300))
      fail(ErrorKind::Convergence, "radial lift quadrature did not converge");
  }
  return fine[0];
}

// Full tensor grid in the lifted coordinates.
double cartesian_integrate(const TestField& u, const LiftPlan& plan, const LiftedIntegrand& f,
                           const LiftConfig& cfg) {
  const std::size_t n = u.dim();
  int m = cfg.cartesian_order + (cfg.cartesian_order % 2);  // even: no node at a block centre
  std::vector<GridAxis> axes;
  const double scale = 1.0 / std::sqrt(u.decay_rate());
  for (std::size_t i = 0; i < n; ++i) {
    const int reps = plan.spec.is_wall(i) ? 2 * plan.l[i] + 1 : 1;
    for (int r = 0; r < reps; ++r) {
      if (!u.support()) {
        axes.emplace_back(hermite_rule(m), scale);
      } else if (plan.spec.is_wall(i)) {
        const double h = u.support()->hi[i];
        axes.emplace_back(composite_legendre_rule(m, 2 * cfg.cartesian_panels, -h, h));
      } else {
        axes.emplace_back(composite_legendre_rule(m, cfg.cartesian_panels, u.support()->lo[i], u.support()->hi[i]));
      }
    }
  }
  double r = 0.0;
  tensor_integrate(
      QuadratureGrid(std::move(axes)), [&f](std::span<const double> z, std::span<double> out) { f(z, out); },
      std::span<double>(&r, 1), WeightMode::Plain);
  return r;
}

bool want_cartesian(const TestField& u, const LiftPlan& plan, const LiftConfig& cfg) {
  if (cfg.cartesian == CartesianCheck::Off) return false;
  if (cfg.cartesian == CartesianCheck::On) return true;
  return plan.lifted_dim() <= 4 && has_smooth_lift(u) && (!u.support() || plan.lifted_dim() <= 3);
}

LiftCheck finish(const TestField& u, const LiftPlan& plan, const LiftedIntegrand& f, double rhs,
                 const LiftConfig& cfg, double lhs_factor = 1.0) {
  LiftCheck c;
  c.lhs = lhs_factor * radial_integrate(u, plan, f, cfg.quad);
  c.rhs = rhs;
  c.gap = gap_of(c.lhs, c.rhs);
  if (want_cartesian(u, plan, cfg)) {
    c.cartesian = true;
    c.cartesian_lhs = lhs_factor * cartesian_integrate(u, plan, f, cfg);
    c.cartesian_gap = gap_of(c.cartesian_lhs, c.lhs);
  }
  return c;
}

Backend rhs_backend(const TestField& u) { return u.has_exact_form() ? Backend::Oracle : Backend::Quadrature; }

double lifted_norm2(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

}  // namespace

int LiftPlan::total_l() const {
  int s = 0;
  for (int v : l) s += v;
  return s;
}

int LiftPlan::lifted_dim() const { return spec.n() + 2 * total_l(); }

double LiftPlan::sphere_factor() const {
  double f = 1.0;
  for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i) f *= sphere_area(2 * l[i]);
  return f;
}

std::size_t LiftPlan::block_offset(std::size_t axis) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < axis; ++i) off += spec.is_wall(i) ? 2 * l[i] + 1 : 1;
  return off;
}

LiftPlan make_lift_plan(const OrthantSpec& spec, std::vector<int> l) {
  require(l.size() == spec.dim(), ErrorKind::Parameter, "lift exponents have wrong length");
  for (std::size_t i = 0; i < l.size(); ++i) {
    require(l[i] >= 0, ErrorKind::Parameter, "lift exponents must be >= 0");
    require(spec.is_wall(i) || l[i] == 0, ErrorKind::Parameter, "lift exponents must vanish off the walls");
  }
  return LiftPlan{spec, std::move(l)};
}

LiftPlan make_lift_plan(const OrthantSpec& spec, const WeightExponents& a) {
  require(a.dim() == spec.dim(), ErrorKind::Parameter, "weight exponents have wrong length");
  std::vector<int> ints = a.integer_values();
  std::vector<int> l(ints.size());
  for (std::size_t i = 0; i < ints.size(); ++i) {
    require(ints[i] % 2 == 0, ErrorKind::Parameter, "lifting needs even weight exponents (integer l)");
    l[i] = ints[i] / 2;
  }
  return make_lift_plan(spec, std::move(l));
}

LiftPlan lift_plan_for(const TestField& u) { return make_lift_plan(u.spec(), u.wall_exponents()); }

std::vector<double> project_point(const LiftPlan& plan, std::span<const double> z) {
  require(static_cast<int>(z.size()) == plan.lifted_dim(), ErrorKind::Parameter, "lifted point has wrong dimension");
  std::vector<double> x(plan.spec.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t off = plan.block_offset(i);
    if (!plan.spec.is_wall(i)) {
      x[i] = z[off];
      continue;
    }
    double r2 = 0.0;
    for (int j = 0; j < 2 * plan.l[i] + 1; ++j) r2 += z[off + j] * z[off + j];
    require(r2 > 0.0, ErrorKind::Domain, "lifted block has zero norm");
    x[i] = std::sqrt(r2);
  }
  return x;
}

double lifted_eval(const TestField& u, const LiftPlan& plan, std::span<const double> z) {
  double g[kMaxLiftedDim];
  return lifted_eval(u, plan, z, std::span<double>(g, z.size()));
}

double lifted_eval(const TestField& u, const LiftPlan& plan, std::span<const double> z, std::span<double> grad) {
  require(plan.spec == u.spec(), ErrorKind::Parameter, "lift plan and field live on different orthants");
  const std::vector<double> x = project_point(plan, z);
  double gx[CompiledPolynomial::kMaxDim];
  const double v = u.residual(x, std::span<double>(gx, x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t off = plan.block_offset(i);
    if (!plan.spec.is_wall(i)) {
      grad[off] = gx[i];
      continue;
    }
    for (int j = 0; j < 2 * plan.l[i] + 1; ++j) grad[off + j] = gx[i] * z[off + j] / x[i];
  }
  return v;
}

bool has_smooth_lift(const TestField& u) {
  const OrthantSpec& spec = u.spec();
  if (u.support()) {
    for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i)
      if (!(u.support()->lo[i] > 0.0)) return false;
    return true;
  }
  if (!u.has_exact_form()) return false;
  const MultiIndex p(u.wall_exponents().begin(), u.wall_exponents().end());
  const Polynomial r = u.exact_form()->poly().divided_by_monomial(p);
  for (const auto& [gamma, c] : r.terms())
    for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i)
      if (gamma[i] % 2 != 0) return false;
  return true;
}

LiftCheck verify_mass_lift(const TestField& u, const LiftPlan& plan, const LiftConfig& cfg) {
  return verify_moment_lift(u, plan, 0.0, cfg);
}

LiftCheck verify_moment_lift(const TestField& u, const LiftPlan& plan, double a, const LiftConfig& cfg) {
  check_consistent(u, plan);
  require(std::isfinite(a) && a >= 0.0, ErrorKind::Parameter, "moment exponent a must be >= 0");
  const double rhs = plan.sphere_factor() * (a == 0.0 ? core_functionals(u, rhs_backend(u), cfg.quad).N
                                                      : radial_moment(u, a, rhs_backend(u), cfg.quad));
  LiftedIntegrand f = [&u, &plan, a](std::span<const double> z, std::span<double> out) {
    const double v = lifted_eval(u, plan, z);
    out[0] = v * v * (a == 0.0 ? 1.0 : std::pow(lifted_norm2(z), a));
  };
  return finish(u, plan, f, rhs, cfg);
}

LiftCheck verify_gradient_lift(const TestField& u, const LiftPlan& plan, int b, const LiftConfig& cfg) {
  check_consistent(u, plan);
  require(b == 0 || b == 1, ErrorKind::Parameter, "gradient lift supports b in {0, 1} only");
  require(u.support().has_value() && has_smooth_lift(u), ErrorKind::Capability,
          "gradient lift needs a field supported away from the walls");
  const std::size_t n = u.dim();
  const int total_l = plan.total_l();
  // out[0]: the l(l-1)/x_i^2 term weighted by |x|^{2b}, as the derivation
  // produces it; out[1]: the same term without the weight.
  double rhs[2] = {0.0, 0.0};
  field_quadrature(
      u, u.decay_rate(),
      [&](std::span<const double> x, std::span<double> out) {
        double g[CompiledPolynomial::kMaxDim];
        const double v = u.eval(x, std::span<double>(g, n));
        double r2 = 0.0, g2 = 0.0, wall = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          r2 += x[i] * x[i];
          g2 += g[i] * g[i];
          if (plan.spec.is_wall(i) && plan.l[i] > 1) wall += plan.l[i] * (plan.l[i] - 1) / (x[i] * x[i]);
        }
        const double rb = b == 1 ? r2 : 1.0;
        const double common = rb * g2 + (b == 1 ? 2.0 * total_l * v * v : 0.0);
        out[0] = common + rb * wall * v * v;
        out[1] = common + wall * v * v;
      },
      std::span<double>(rhs, 2), cfg.quad);
  const std::size_t dz = static_cast<std::size_t>(plan.lifted_dim());
  LiftedIntegrand f = [&u, &plan, b, dz](std::span<const double> z, std::span<double> out) {
    double g[kMaxLiftedDim];
    lifted_eval(u, plan, z, std::span<double>(g, dz));
    double g2 = 0.0;
    for (std::size_t i = 0; i < dz; ++i) g2 += g[i] * g[i];
    out[0] = (b == 1 ? lifted_norm2(z) : 1.0) * g2;
  };
  LiftCheck r = finish(u, plan, f, rhs[0], cfg, 1.0 / plan.sphere_factor());
  r.rhs_unweighted = rhs[1];
  return r;
}

LiftCheck verify_dilation_pairing(const TestField& u, const LiftPlan& plan, const LiftConfig& cfg) {
  check_consistent(u, plan);
  for (std::size_t i = plan.spec.first_wall(); i < plan.spec.dim(); ++i)
    require(plan.l[i] == 1, ErrorKind::Parameter, "dilation pairing needs l_i = 1 on every wall");
  const std::size_t n = u.dim();
  const double sphere = std::pow(sphere_area(2), plan.spec.k());
  double rhs = 0.0;
  if (u.has_exact_form()) {
    const MultiIndex w = plan.spec.wall_index();
    const PolyGaussDescriptor v(u.exact_form()->rate(), u.exact_form()->poly().divided_by_monomial(w));
    Polynomial xgrad(n);
    for (std::size_t i = 0; i < n; ++i) xgrad += v.partial(i).poly().times_coordinate(i);
    const PolyGaussDescriptor pairing = v * PolyGaussDescriptor(v.rate(), xgrad);
    rhs = sphere * descriptor_integral(PolyGaussDescriptor(pairing.rate(), pairing.poly().times_monomial(w).times_monomial(w)),
                                       plan.spec);
  } else {
    field_quadrature(
        u, u.decay_rate(),
        [&](std::span<const double> x, std::span<double> out) {
          double g[CompiledPolynomial::kMaxDim];
          const double v = u.residual(x, std::span<double>(g, n));
          double dot = 0.0, w = 1.0;
          for (std::size_t i = 0; i < n; ++i) {
            dot += x[i] * g[i];
            if (plan.spec.is_wall(i)) w *= x[i];
          }
          out[0] = v * dot * w * w;
        },
        std::span<double>(&rhs, 1), cfg.quad);
    rhs *= sphere;
  }
  const std::size_t dz = static_cast<std::size_t>(plan.lifted_dim());
  LiftedIntegrand f = [&u, &plan, dz](std::span<const double> z, std::span<double> out) {
    double g[kMaxLiftedDim];
    const double v = lifted_eval(u, plan, z, std::span<double>(g, dz));
    double dot = 0.0;
    for (std::size_t i = 0; i < dz; ++i) dot += z[i] * g[i];
    out[0] = v * dot;
  };
  return finish(u, plan, f, rhs, cfg);
}

}  // namespace hup
