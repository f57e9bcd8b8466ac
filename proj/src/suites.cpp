#include "hup/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "hup/deficits.hpp"
#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"
#include "hup/lifting.hpp"
#include "hup/poincare.hpp"
#include "hup/projection.hpp"

namespace hup {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string nk_tag(const OrthantSpec& s) { return "n" + std::to_string(s.n()) + "k" + std::to_string(s.k()); }

std::string num_tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string index_tag(std::uint64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03llu", static_cast<unsigned long long>(i));
  return buf;
}

double tol_or(const SuiteConfig& cfg, double fallback) { return cfg.tol ? *cfg.tol : fallback; }

Case make_case(std::string name, const OrthantSpec& spec, Backend b) {
  Case c;
  c.name = std::move(name);
  c.n = spec.n();
  c.k = spec.k();
  c.backend = to_string(b);
  return c;
}

Case error_case(std::string name, int n, int k, const std::exception& e) {
  Case c;
  c.name = std::move(name);
  c.n = n;
  c.k = k;
  c.backend = "none";
  c.margin = std::numeric_limits<double>::quiet_NaN();
  c.pass = false;
  c.note = e.what();
  return c;
}

using CaseTask = std::function<std::vector<Case>()>;

// Runs the tasks on a fixed pool; results keep task order.
std::vector<Case> run_tasks(const std::vector<CaseTask>& tasks, int threads) {
  std::vector<std::vector<Case>> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) out[i] = tasks[i]();
  };
  unsigned n = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<Case> all;
  for (auto& v : out)
    for (auto& c : v) all.push_back(std::move(c));
  return all;
}

// Wraps a task so library errors become a failing case.
CaseTask guarded(std::string name, const OrthantSpec& spec, std::function<std::vector<Case>()> body) {
  return [name = std::move(name), n = spec.n(), k = spec.k(), body = std::move(body)]() -> std::vector<Case> {
    try {
      return body();
    } catch (const std::exception& e) {
      return {error_case(name + "/error", n, k, e)};
    }
  };
}

Report finish(std::string suite, std::vector<Case> cases) {
  Report r;
  r.suite = std::move(suite);
  r.cases = std::move(cases);
  r.sort_cases();
  return r;
}

const std::vector<OrthantSpec>& orthants_of(const SuiteConfig& cfg) {
  return cfg.orthants.empty() ? default_orthants() : cfg.orthants;
}

Backend backend_for(const TestField& u, const std::optional<Backend>& requested) {
  if (requested && (*requested == Backend::Quadrature || u.has_exact_form())) return *requested;
  return preferred_backend(u);
}

// A field together with what the equality statements predict for it.
struct SuiteField {
  std::string id;
  TestField u;
  bool member = false;  // w e^{-B|x|^2}(b + d . x')
  double B = 0.0;
  bool zero_slope = false;
  bool zero_const = false;
};

SuiteField catalog_field(const std::string& name, const std::string& id, const OrthantSpec& spec, CatalogParams p) {
  p.n = spec.n();
  p.k = spec.k();
  SuiteField f{id, catalog_get(name, p)};
  const bool has_free = spec.first_wall() > 0;
  if (name == "extremal") {
    f.member = true;
    f.B = p.beta;
    f.zero_slope = true;
    f.zero_const = p.c == 0.0;
  } else if (name == "affine_equality") {
    f.member = true;
    f.B = p.B;
    f.zero_slope = !has_free || std::all_of(p.b.begin(), p.b.end(), [](double x) { return x == 0.0; });
    if (p.b.empty() && has_free) f.zero_slope = false;
    f.zero_const = p.b0 == 0.0;
  } else if (name == "sharp_example" && has_free) {
    f.member = true;
    f.B = 0.5;
    f.zero_const = true;
  }
  return f;
}

std::string field_id(const std::string& name, const CatalogParams& p) {
  if (name == "extremal") return "extremal_beta" + num_tag(p.beta);
  if (name == "affine_equality") return "affine_B" + num_tag(p.B) + "_b0" + num_tag(p.b0);
  if (name == "polygauss_random") return "random_" + index_tag(p.seed);
  return name;
}

// Random fields plus the catalogued members of the equality families.
std::vector<SuiteField> suite_fields(const OrthantSpec& spec, const SuiteConfig& cfg, bool with_bump) {
  std::vector<SuiteField> out;
  if (cfg.field) {
    out.push_back(catalog_field(*cfg.field, field_id(*cfg.field, cfg.params), spec, cfg.params));
    return out;
  }
  for (int i = 0; i < cfg.count; ++i) {
    CatalogParams p;
    p.seed = cfg.seed + static_cast<std::uint64_t>(i);
    out.push_back(catalog_field("polygauss_random", field_id("polygauss_random", p), spec, p));
  }
  for (double beta : {0.5, 2.0}) {
    CatalogParams p;
    p.beta = beta;
    out.push_back(catalog_field("extremal", field_id("extremal", p), spec, p));
  }
  {
    CatalogParams p;
    p.B = 0.5;
    p.b0 = 1.0;
    out.push_back(catalog_field("affine_equality", field_id("affine_equality", p), spec, p));
  }
  {
    CatalogParams p;
    p.B = 0.125;
    p.b0 = 0.5;
    p.b.assign(spec.first_wall(), -1.0);
    out.push_back(catalog_field("affine_equality", field_id("affine_equality", p), spec, p));
  }
  out.push_back(catalog_field("sharp_example", "sharp_example", spec, CatalogParams{}));
  if (with_bump && spec.n() <= 2) out.push_back(catalog_field("bump", "bump", spec, CatalogParams{}));
  return out;
}

double rel_err(double q, double o, double ref) { return std::abs(q - o) / std::max(ref, 1e-300); }

// Oracle against quadrature for N, M, E and the Hardy denominator.
Case core_agreement(const std::string& name, const TestField& u, const QuadratureConfig& quad, double tol) {
  Case c = make_case(name, u.spec(), Backend::Quadrature);
  const CoreFunctionals o = core_functionals(u, Backend::Oracle);
  const CoreFunctionals q = core_functionals(u, Backend::Quadrature, quad);
  const double s = o.scale();
  double worst = std::max({rel_err(q.N, o.N, std::max(o.N, 1e-12 * s)), rel_err(q.M, o.M, std::max(o.M, 1e-12 * s)),
                           rel_err(q.E, o.E, std::max(o.E, 1e-12 * s))});
  c.set("N_oracle", o.N).set("N_quadrature", q.N);
  c.set("M_oracle", o.M).set("M_quadrature", q.M);
  c.set("E_oracle", o.E).set("E_quadrature", q.E);
  const OrthantSpec& spec = u.spec();
  if (spec.k() > 0 || spec.n() > 2) {
    const double ho = hardy_denominator(u, Backend::Oracle);
    const double hq = hardy_denominator(u, Backend::Quadrature, quad);
    c.set("hardy_oracle", ho).set("hardy_quadrature", hq);
    worst = std::max(worst, rel_err(hq, ho, std::max(std::abs(ho), 1e-12 * s)));
  }
  c.set("max_rel_diff", worst);
  c.margin = -worst;
  c.pass = worst <= tol;
  return c;
}

// ---------------------------------------------------------------- identity

std::vector<Case> identity_cases(const SuiteField& f, const SuiteConfig& cfg) {
  const TestField& u = f.u;
  const Backend b = backend_for(u, cfg.backend);
  const std::string base = "identity/" + nk_tag(u.spec()) + "/" + f.id;
  std::vector<Case> out;
  const CoreFunctionals core = core_functionals(u, b, cfg.quad);
  const double scale = core.scale();
  for (double alpha : cfg.alphas) {
    const double add = additive_deficit(core, alpha);
    const double rhs = identity_rhs(u, alpha, cfg.quad);
    const double res = add - rhs;
    Case c = make_case(base + "/alpha=" + num_tag(alpha) + "/residual", u.spec(), b);
    c.set("alpha", alpha).set("additive", add).set("identity_rhs", rhs).set("residual", res);
    c.set("residual_over_scale", std::abs(res) / scale);
    c.margin = -std::abs(res) / (1.0 + std::abs(add));
    c.pass = c.margin >= -tol_or(cfg, 1e-8);
    out.push_back(std::move(c));

    Case nn = make_case(base + "/alpha=" + num_tag(alpha) + "/nonnegative", u.spec(), b);
    nn.set("alpha", alpha).set("additive", add).set("scale", scale);
    nn.margin = add / scale;
    nn.pass = nn.margin >= -tol_or(cfg, 1e-8);
    out.push_back(std::move(nn));
  }
  Case env = make_case(base + "/envelope", u.spec(), b);
  const double r1 = rho1(core);
  const double astar = optimal_alpha(core);
  const double half_star = 0.5 * additive_deficit(core, astar);
  const auto objective = [&core](double t) { return additive_deficit(core, std::exp(t)); };
  const auto [tmin, fmin] = boost::math::tools::brent_find_minima(objective, std::log(astar) - 3.0,
                                                                  std::log(astar) + 3.0, 40);
  const double err = std::max(std::abs(half_star - r1), std::abs(0.5 * fmin - r1));
  env.set("rho1", r1).set("alpha_star", astar).set("half_additive_at_alpha_star", half_star);
  env.set("alpha_search", std::exp(tmin)).set("half_additive_at_search", 0.5 * fmin);
  env.margin = -err / scale;
  env.pass = env.margin >= -tol_or(cfg, 1e-9);
  out.push_back(std::move(env));
  if (u.has_exact_form())
    out.push_back(core_agreement("backend/identity/" + nk_tag(u.spec()) + "/" + f.id, u, cfg.quad,
                                 tol_or(cfg, 1e-10)));
  return out;
}

// ---------------------------------------------------------------- lifting

Case lift_case(const std::string& name, const TestField& u, const LiftCheck& r, double tol, Backend b) {
  Case c = make_case(name, u.spec(), b);
  c.set("lhs", r.lhs).set("rhs", r.rhs).set("gap", r.gap);
  if (!std::isnan(r.rhs_unweighted)) c.set("rhs_unweighted_middle_term", r.rhs_unweighted);
  bool ok = r.gap <= tol;
  if (r.cartesian) {
    c.set("cartesian_lhs", r.cartesian_lhs).set("cartesian_gap", r.cartesian_gap);
    ok = ok && r.cartesian_gap <= 1e-6;
  }
  c.margin = -r.gap;
  c.pass = ok;
  if (r.cartesian && !(r.cartesian_gap <= 1e-6)) c.note = "cartesian cross-check disagrees";
  return c;
}

TestField wall_power_field(const OrthantSpec& spec, const PolyGaussDescriptor& d, int l, const std::string& label) {
  // d already carries one factor of w.
  MultiIndex extra(spec.dim(), 0);
  std::vector<int> p(spec.dim(), 0);
  for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i) {
    extra[i] = l - 1;
    p[i] = l;
  }
  return TestField::from_descriptor(spec, p, PolyGaussDescriptor(d.rate(), d.poly().times_monomial(extra)), label);
}

std::vector<CaseTask> lifting_tasks(const OrthantSpec& spec, int l, const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  if (spec.n() + 2 * l * spec.k() > kMaxLiftedDim) return tasks;
  const std::string base = "lifting/" + nk_tag(spec) + "/l=" + std::to_string(l);
  LiftConfig lc;
  lc.quad = cfg.quad;

  std::vector<std::pair<std::string, PolyGaussDescriptor>> exact;
  if (!cfg.field || *cfg.field == "extremal") {
    const double beta = cfg.field ? cfg.params.beta : 0.5;
    const double c = cfg.field ? cfg.params.c : 1.0;
    exact.emplace_back("extremal_beta" + num_tag(beta),
                       PolyGaussDescriptor(2.0 * beta, Polynomial::monomial(spec.wall_index(), c)));
  }
  if (!cfg.field || *cfg.field == "polygauss_random") {
    const int count = cfg.field ? 1 : cfg.lift_count;
    for (int i = 0; i < count; ++i) {
      const std::uint64_t seed = cfg.field ? cfg.params.seed : cfg.seed + static_cast<std::uint64_t>(i);
      exact.emplace_back("random_" + index_tag(seed), random_polygauss(spec, seed));
    }
  }
  if (cfg.field && *cfg.field != "extremal" && *cfg.field != "polygauss_random" && *cfg.field != "bump" && l == 1) {
    CatalogParams p = cfg.params;
    p.n = spec.n();
    p.k = spec.k();
    exact.emplace_back(*cfg.field, *catalog_get(*cfg.field, p).exact_form());
  }
  for (const auto& [id, d] : exact) {
    const std::string name = base + "/" + id;
    tasks.push_back(guarded(name, spec, [=]() {
      const TestField u = wall_power_field(spec, d, l, id);
      const LiftPlan plan = lift_plan_for(u);
      std::vector<Case> out;
      out.push_back(lift_case(name + "/mass", u, verify_mass_lift(u, plan, lc), tol_or(cfg, 1e-9), Backend::Oracle));
      for (double a : {1.0, 2.0})
        out.push_back(lift_case(name + "/moment_a=" + num_tag(a), u, verify_moment_lift(u, plan, a, lc),
                                tol_or(cfg, 1e-9), Backend::Oracle));
      if (l == 1)
        out.push_back(lift_case(name + "/dilation", u, verify_dilation_pairing(u, plan, lc), tol_or(cfg, 1e-8),
                                Backend::Oracle));
      return out;
    }));
  }
  if ((!cfg.field && spec.n() <= 2) || (cfg.field && *cfg.field == "bump")) {
    const std::string name = base + "/bump";
    CatalogParams p = cfg.field ? cfg.params : CatalogParams{};
    p.n = spec.n();
    p.k = spec.k();
    p.wall_power = l;
    auto check = [=](const std::string& what, std::function<LiftCheck(const TestField&, const LiftPlan&)> fn) {
      return guarded(name + "/" + what, spec, [=]() {
        const TestField u = catalog_get("bump", p);
        return std::vector<Case>{lift_case(name + "/" + what, u, fn(u, lift_plan_for(u)), tol_or(cfg, 1e-6),
                                           Backend::Quadrature)};
      });
    };
    tasks.push_back(check("mass", [lc](const TestField& u, const LiftPlan& pl) { return verify_mass_lift(u, pl, lc); }));
    tasks.push_back(
        check("moment_a=1", [lc](const TestField& u, const LiftPlan& pl) { return verify_moment_lift(u, pl, 1.0, lc); }));
    for (int b : {0, 1})
      tasks.push_back(check("gradient_b=" + std::to_string(b), [lc, b](const TestField& u, const LiftPlan& pl) {
        return verify_gradient_lift(u, pl, b, lc);
      }));
    if (l == 1)
      tasks.push_back(
          check("dilation", [lc](const TestField& u, const LiftPlan& pl) { return verify_dilation_pairing(u, pl, lc); }));
  }
  return tasks;
}

// ---------------------------------------------------------------- poincare

struct PolyFunction {
  CompiledPolynomial p;
  double operator()(std::span<const double> x, std::span<double> g) const { return p.eval(x, g); }
};

Polynomial random_polynomial(std::size_t dim, int degree, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Polynomial q(dim);
  MultiIndex cur(dim, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t axis, int left) {
    if (axis == dim) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      q.add_term(cur, 2.0 * u - 1.0);
      return;
    }
    for (int d = 0; d <= left; ++d) {
      cur[axis] = d;
      rec(axis + 1, left - d);
    }
    cur[axis] = 0;
  };
  rec(0, degree);
  return q;
}

std::string weights_tag(const WeightExponents& a) {
  std::string s = "A=";
  for (std::size_t i = 0; i < a.dim(); ++i) s += (i ? "," : "") + num_tag(a[i]);
  return s;
}

std::vector<Case> poincare_cases(const std::string& name, const Polynomial& f, const WeightExponents& a,
                                 const SuiteConfig& cfg, const QuadratureConfig& quad) {
  const GradFunction fn = PolyFunction{CompiledPolynomial(f)};
  std::vector<Case> out;
  const OrthantSpec shape(static_cast<int>(a.dim()), 0);
  for (double lambda : cfg.lambdas) {
    const ScaledGaussianMeasure mu(a, lambda);
    const PoincareStability s = poincare_stability_gap(fn, mu, quad);
    const double bound = 1.0 / (lambda * lambda);
    const std::string lname = name + "/lambda=" + num_tag(lambda);
    if (s.variance <= 1e-14 * (s.variance + s.mean * s.mean)) continue;
    const double dir = s.lhs_gap + s.variance * bound;
    const double q = dir / s.variance;
    const bool eq = std::abs(q - bound) <= 1e-9;
    const bool affine = is_restricted_affine(s);
    Case c = make_case(lname + "/quotient", shape, Backend::Quadrature);
    c.set("quotient", q).set("bound", bound).set("variance", s.variance);
    c.set("residual_ratio", s.residual_variance / s.variance);
    c.set("equality", eq ? 1.0 : 0.0).set("restricted_affine", affine ? 1.0 : 0.0);
    c.margin = q - bound;
    c.pass = c.margin >= -tol_or(cfg, 1e-9) && eq == affine;
    if (eq != affine) c.note = "equality flag disagrees with the restricted affine test";
    out.push_back(std::move(c));

    Case st = make_case(lname + "/stability", shape, Backend::Quadrature);
    st.set("lhs_gap", s.lhs_gap).set("rhs_bound", s.rhs_bound).set("scale", s.scale);
    for (std::size_t i = 0; i < s.d.size(); ++i)
      if (!a.is_weighted(i)) st.set("d" + std::to_string(i + 1), s.d[i]);
    st.margin = s.margin / s.scale;
    st.pass = st.margin >= -tol_or(cfg, 1e-8);
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<CaseTask> poincare_tasks(const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  QuadratureConfig pq = cfg.quad;
  pq.gauss_order = std::min(cfg.quad.gauss_order, 24);  // degree-8 integrands are exact well below this
  const std::vector<WeightExponents> weights = {WeightExponents({0.0, 2.0}), WeightExponents({2.0, 2.0}),
                                                WeightExponents({0.0, 0.0, 2.0})};
  for (const auto& a : weights) {
    const std::string base = "poincare/" + weights_tag(a);
    const OrthantSpec shape(static_cast<int>(a.dim()), 0);
    for (int i = 0; i < cfg.poincare_count; ++i) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
      const std::string name = base + "/poly_" + index_tag(seed);
      tasks.push_back(guarded(name, shape, [=]() {
        return poincare_cases(name, random_polynomial(a.dim(), 4, seed), a, cfg, pq);
      }));
    }
    // Restricted affine functions c + d . x' (equality) and a linear
    // function of a weighted coordinate (strict).
    for (int i = 0; i < 5; ++i) {
      const std::string name = base + "/affine_" + index_tag(static_cast<std::uint64_t>(i));
      tasks.push_back(guarded(name, shape, [=]() {
        std::mt19937_64 gen(cfg.seed + 1000 + static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        Polynomial f = Polynomial::constant(a.dim(), coef(gen));
        bool any = false;
        for (std::size_t j = 0; j < a.dim(); ++j) {
          if (a.is_weighted(j)) continue;
          f += coef(gen) * Polynomial::coordinate(a.dim(), j);
          any = true;
        }
        if (!any) return std::vector<Case>{};
        return poincare_cases(name, f, a, cfg, pq);
      }));
    }
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (!a.is_weighted(j)) continue;
      const std::string name = base + "/weighted_x" + std::to_string(j + 1);
      tasks.push_back(guarded(name, shape, [=]() {
        return poincare_cases(name, Polynomial::coordinate(a.dim(), j), a, cfg, pq);
      }));
      break;
    }
  }
  tasks.push_back(guarded("poincare/A=2/lambda=1/closed_form", OrthantSpec(1, 0), [cfg, pq]() {
    const ScaledGaussianMeasure mu(WeightExponents({2.0}), 1.0);
    const GradFunction f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 1.0;
      return x[0];
    };
    const double q = rayleigh_quotient(f, mu, pq);
    const double ref = 1.0 / (3.0 - 8.0 / kPi);
    Case c = make_case("poincare/A=2/lambda=1/closed_form", OrthantSpec(1, 0), Backend::Quadrature);
    c.set("quotient", q).set("closed_form", ref);
    c.margin = -std::abs(q - ref) / ref;
    c.pass = c.margin >= -tol_or(cfg, 1e-10);
    return std::vector<Case>{c};
  }));
  const auto& specs = orthants_of(cfg);
  for (int i = 0; i < cfg.consistency_count; ++i) {
    const OrthantSpec spec = specs[static_cast<std::size_t>(i) % specs.size()];
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i) / specs.size();
    const std::string name = "poincare/consistency/" + nk_tag(spec) + "/random_" + index_tag(seed);
    tasks.push_back(guarded(name, spec, [=]() {
      CatalogParams p;
      p.n = spec.n();
      p.k = spec.k();
      p.seed = seed;
      const TestField u = catalog_get("polygauss_random", p);
      const double via = additive_deficit_via_poincare(u, 1.0, cfg.quad);
      const double add = additive_deficit(u, 1.0, Backend::Oracle);
      Case c = make_case(name, spec, Backend::Oracle);
      c.set("additive", add).set("poincare_form", via);
      c.margin = -std::abs(via - add) / std::max(std::abs(add), 1e-300);
      c.pass = c.margin >= -tol_or(cfg, 1e-8);
      return std::vector<Case>{c};
    }));
  }
  return tasks;
}

// ---------------------------------------------------------------- stability

Case inequality_case(const std::string& name, const TestField& u, Backend b, double lhs, double rhs, double scale,
                     bool expect_equality, double tol) {
  Case c = make_case(name, u.spec(), b);
  const double margin = (lhs - rhs) / scale;
  const bool eq = std::abs(margin) <= 1e-7;
  c.set("lhs", lhs).set("rhs", rhs).set("scale", scale);
  c.set("equality", eq ? 1.0 : 0.0).set("expected_equality", expect_equality ? 1.0 : 0.0);
  c.margin = margin;
  c.pass = margin >= -tol && eq == expect_equality;
  if (eq != expect_equality) c.note = expect_equality ? "equality expected but not detected" : "unexpected equality";
  return c;
}

bool same_rate(double B, double target) { return std::abs(B - target) <= 1e-9 * std::max(B, target); }

std::vector<Case> stability_cases(const SuiteField& f, const SuiteConfig& cfg) {
  const TestField& u = f.u;
  const OrthantSpec& spec = u.spec();
  const Backend b = backend_for(u, cfg.backend);
  const std::string base = "stability/" + nk_tag(spec) + "/" + f.id;
  const double tol = tol_or(cfg, 1e-7);
  const int D = spec.effective_dim();
  const CoreFunctionals core = core_functionals(u, b, cfg.quad);
  const double scale = core.scale();
  const double r1 = rho1(core);
  const double add1 = additive_deficit(core, 1.0);
  std::vector<Case> out;

  Case hup = make_case(base + "/hup_ratio", spec, b);
  const double ratio = hup_ratio(core);
  hup.set("ratio", ratio).set("bound", D * D / 4.0);
  hup.margin = ratio - D * D / 4.0;
  hup.pass = hup.margin >= -tol_or(cfg, 1e-8);
  out.push_back(std::move(hup));
  if (spec.k() > 0 || spec.n() > 2) {
    Case h = make_case(base + "/hardy_ratio", spec, b);
    const double hr = core.E / hardy_denominator(u, b, cfg.quad);
    const double hb = (D - 2) * (D - 2) / 4.0;
    h.set("ratio", hr).set("bound", hb).set("weak_chain", ratio);
    h.margin = std::min(hr - hb, ratio - hb);
    h.pass = h.margin >= -tol_or(cfg, 1e-8);
    out.push_back(std::move(h));
  }

  const std::optional<Backend> pb = b;
  const ProjectionResult dE = dist_to_E(u, pb, cfg.quad);
  const ProjectionResult dA = dist_to_affine_family(u, pb, cfg.quad);
  const ProjectionResult dC = dist_to_E_norm_constrained(u, pb, cfg.quad);
  const ProjectionResult c1 = gaussian_center_dist(u, 1.0, pb, cfg.quad);
  const EnergyCenterDist ecd = energy_center_dist(u, pb, cfg.quad);

  Case t13 = inequality_case(base + "/rho1_vs_dist_E", u, b, r1, dE.dist_sq, scale, f.member, tol);
  t13.set("rho1", r1).set("dist_E", dE.dist_sq).set("c_star", dE.c).set("beta_star", dE.beta);
  out.push_back(std::move(t13));

  Case t51 = inequality_case(base + "/additive_vs_center", u, b, add1, 2.0 * c1.dist_sq, scale,
                             f.member && same_rate(f.B, 0.5), tol);
  t51.set("additive", add1).set("center_dist", c1.dist_sq).set("c_star", c1.c);
  out.push_back(std::move(t51));

  Case half = inequality_case(base + "/rho1_vs_constrained", u, b, r1, 0.5 * dC.dist_sq, scale,
                              f.member && (f.zero_slope || f.zero_const), tol);
  half.set("rho1", r1).set("constrained_dist", dC.dist_sq).set("beta_star", dC.beta);
  out.push_back(std::move(half));

  Case en = inequality_case(base + "/additive_vs_energy", u, b, add1, 2.0 / (D + 3) * ecd.value, scale,
                            f.member && same_rate(f.B, 0.5), tol);
  en.set("additive", add1).set("energy_dist", ecd.value).set("c_star", ecd.c);
  out.push_back(std::move(en));

  for (double alpha : cfg.alphas) {
    const ProjectionResult ca = gaussian_center_dist(u, alpha, pb, cfg.quad);
    const ProjectionResult aa = affine_dist_at_lambda(u, alpha, pb, cfg.quad);
    const double lhs = 0.5 * additive_deficit(core, alpha) - ca.dist_sq;
    Case s = inequality_case(base + "/improved_alpha=" + num_tag(alpha), u, b, lhs, aa.dist_sq, scale,
                             f.member && same_rate(f.B, 1.0 / (2.0 * alpha * alpha)), tol);
    s.set("alpha", alpha).set("half_additive", 0.5 * additive_deficit(core, alpha));
    s.set("center_dist", ca.dist_sq).set("affine_dist", aa.dist_sq);
    out.push_back(std::move(s));
  }
  if (core.E > 0.0 && core.M > 0.0) {
    const double astar = optimal_alpha(core);
    const ProjectionResult ca = gaussian_center_dist(u, astar, pb, cfg.quad);
    const ProjectionResult aa = affine_dist_at_lambda(u, astar, pb, cfg.quad);
    Case s = inequality_case(base + "/improved_alpha_star", u, b, r1 - ca.dist_sq, aa.dist_sq, scale,
                             f.member && same_rate(f.B, 1.0 / (2.0 * astar * astar)), tol);
    s.set("alpha_star", astar).set("rho1", r1).set("center_dist", ca.dist_sq).set("affine_dist", aa.dist_sq);
    out.push_back(std::move(s));
  }

  Case mono = make_case(base + "/containment", spec, b);
  mono.set("dist_affine", dA.dist_sq).set("dist_E", dE.dist_sq).set("N", core.N);
  mono.margin = std::min(dE.dist_sq - dA.dist_sq, core.N - dE.dist_sq) / scale;
  mono.pass = mono.margin >= -1e-10;
  out.push_back(std::move(mono));

  if (u.has_exact_form())
    out.push_back(core_agreement("backend/stability/" + nk_tag(spec) + "/" + f.id, u, cfg.quad, tol_or(cfg, 1e-10)));
  return out;
}

std::vector<Case> theorem_a_cases(const OrthantSpec& spec, std::uint64_t seed, const SuiteConfig& cfg) {
  CatalogParams p;
  p.n = spec.n();
  p.k = 0;
  p.seed = seed;
  const TestField u = catalog_get("polygauss_random", p);
  const Backend b = backend_for(u, cfg.backend);
  const FullSpaceDeficits d = full_space_deficits(u, b, cfg.quad);
  const CoreFunctionals core = core_functionals(u, b, cfg.quad);
  const double scale = core.scale();
  const double rhs = spec.n() * core.N * d.dist_sq + d.dist_sq * d.dist_sq;
  Case c = make_case("full_space/" + nk_tag(spec) + "/random_" + index_tag(seed) + "/delta2_chain", spec, b);
  c.set("delta1", d.delta1).set("delta2", d.delta2).set("dist_sq", d.dist_sq).set("rhs", rhs);
  c.margin = (d.delta2 - rhs) / (scale * scale);
  c.pass = c.margin >= -tol_or(cfg, 1e-7);
  return {c};
}

// ---------------------------------------------------------------- backends

std::vector<Case> backend_cases(const SuiteField& f, const SuiteConfig& cfg) {
  const TestField& u = f.u;
  const OrthantSpec& spec = u.spec();
  const std::string base = "backend/" + nk_tag(spec) + "/" + f.id;
  const double tol = tol_or(cfg, 1e-10);
  std::vector<Case> out;
  out.push_back(core_agreement(base + "/core", u, cfg.quad, tol));
  {
    Case c = make_case(base + "/radial_moment_a=0.5", spec, Backend::Quadrature);
    const double o = radial_moment(u, 0.5, Backend::Oracle);
    const double q = radial_moment(u, 0.5, Backend::Quadrature, cfg.quad);
    c.set("oracle", o).set("quadrature", q);
    c.margin = -rel_err(q, o, std::abs(o));
    c.pass = c.margin >= -tol;
    out.push_back(std::move(c));
  }
  // Pairings with the projection profiles, relative to the Cauchy-Schwarz bound.
  const CoreFunctionals cu = core_functionals(u, Backend::Oracle);
  std::vector<std::pair<std::string, PolyGaussDescriptor>> profiles;
  for (double beta : {0.25, 0.5, 2.0}) profiles.emplace_back("beta" + num_tag(beta), gaussian_profile(spec, beta));
  for (std::size_t j = 0; j < spec.first_wall(); ++j)
    profiles.emplace_back("x" + std::to_string(j + 1) + "_beta0.5", gaussian_profile(spec, 0.5).times_coordinate(j));
  for (const auto& [id, g] : profiles) {
    Case c = make_case(base + "/pairing_" + id, spec, Backend::Quadrature);
    const CrossFunctionals o = cross_functionals(u, g, Backend::Oracle);
    const CrossFunctionals q = cross_functionals(u, g, Backend::Quadrature, cfg.quad);
    const double gN = descriptor_mass(g, spec);
    const double gM = descriptor_second_moment(g, spec);
    const double gE = descriptor_dirichlet(g, spec);
    const double worst = std::max({rel_err(q.N, o.N, std::sqrt(cu.N * gN)), rel_err(q.M, o.M, std::sqrt(cu.M * gM)),
                                   rel_err(q.E, o.E, std::sqrt(cu.E * gE))});
    c.set("N_oracle", o.N).set("N_quadrature", q.N);
    c.set("M_oracle", o.M).set("M_quadrature", q.M);
    c.set("E_oracle", o.E).set("E_quadrature", q.E);
    c.margin = -worst;
    c.pass = worst <= tol;
    out.push_back(std::move(c));
  }
  {
    // Identity: quadrature right side against the oracle left side.
    Case c = make_case(base + "/identity_alpha=1", spec, Backend::Quadrature);
    const double add = additive_deficit(cu, 1.0);
    const double rhs = identity_rhs(u, 1.0, cfg.quad);
    c.set("additive_oracle", add).set("identity_rhs_quadrature", rhs);
    c.margin = -std::abs(add - rhs) / cu.scale();
    c.pass = c.margin >= -tol;
    out.push_back(std::move(c));
  }
  {
    Case c = make_case(base + "/lift_mass", spec, Backend::Quadrature);
    LiftConfig lc;
    lc.quad = cfg.quad;
    lc.cartesian = CartesianCheck::Off;
    const LiftCheck r = verify_mass_lift(u, lift_plan_for(u), lc);
    c.set("radial_quadrature", r.lhs).set("oracle", r.rhs);
    c.margin = -std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
    c.pass = c.margin >= -tol;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Case> measure_cases(const SuiteConfig& cfg) {
  std::vector<Case> out;
  const std::vector<WeightExponents> weights = {WeightExponents({2.0}), WeightExponents({0.0, 2.0}),
                                                WeightExponents({2.0, 2.0}), WeightExponents({0.0, 0.0, 2.0}),
                                                WeightExponents({0.5, 1.0, 3.0})};
  for (const auto& a : weights) {
    for (double lambda : cfg.lambdas) {
      const ScaledGaussianMeasure mu(a, lambda);
      const double one = measure_expectation(mu, [](std::span<const double>) { return 1.0; }, cfg.quad);
      Case c = make_case("backend/measure/" + weights_tag(a) + "/lambda=" + num_tag(lambda),
                         OrthantSpec(static_cast<int>(a.dim()), 0), Backend::Quadrature);
      c.set("normalization", mu.normalization()).set("total_mass", one);
      c.margin = -std::abs(one - 1.0);
      c.pass = c.margin >= -tol_or(cfg, 1e-10);
      out.push_back(std::move(c));
    }
  }
  return out;
}

template <class Fn>
std::vector<CaseTask> field_tasks(const std::vector<SuiteField>& fields, const std::string& prefix,
                                  const SuiteConfig& cfg, Fn fn) {
  std::vector<CaseTask> tasks;
  for (const auto& f : fields) {
    const std::string name = prefix + nk_tag(f.u.spec()) + "/" + f.id;
    tasks.push_back(guarded(name, f.u.spec(), [f, cfg, fn]() { return fn(f, cfg); }));
  }
  return tasks;
}

void append(std::vector<CaseTask>& a, std::vector<CaseTask> b) {
  for (auto& t : b) a.push_back(std::move(t));
}

nlohmann::json echo(const SuiteConfig& cfg) {
  nlohmann::json j;
  nlohmann::json nk = nlohmann::json::array();
  for (const auto& s : orthants_of(cfg)) nk.push_back({s.n(), s.k()});
  j["nk"] = nk;
  j["count"] = cfg.count;
  j["seed"] = cfg.seed;
  j["alphas"] = cfg.alphas;
  j["lambdas"] = cfg.lambdas;
  j["l"] = cfg.lift_l;
  j["order"] = cfg.quad.gauss_order;
  j["panel_order"] = cfg.quad.panel_order;
  if (cfg.field) j["field"] = *cfg.field;
  if (cfg.backend) j["backend"] = to_string(*cfg.backend);
  if (cfg.tol) j["tol"] = *cfg.tol;
  return j;
}

Report suite_report(const std::string& suite, const SuiteConfig& cfg, const std::vector<CaseTask>& tasks) {
  Report r = finish(suite, run_tasks(tasks, cfg.threads));
  r.config_echo = echo(cfg);
  return r;
}

}  // namespace

const std::vector<OrthantSpec>& default_orthants() {
  static const std::vector<OrthantSpec> specs = {OrthantSpec(1, 1), OrthantSpec(2, 1), OrthantSpec(2, 2),
                                                 OrthantSpec(3, 1), OrthantSpec(3, 2)};
  return specs;
}

Report verify_identity(const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  for (const auto& spec : orthants_of(cfg))
    append(tasks, field_tasks(suite_fields(spec, cfg, true), "identity/", cfg, identity_cases));
  return suite_report("identity", cfg, tasks);
}

Report verify_lifting(const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  for (const auto& spec : orthants_of(cfg))
    for (int l : cfg.lift_l) append(tasks, lifting_tasks(spec, l, cfg));
  return suite_report("lifting", cfg, tasks);
}

Report verify_poincare(const SuiteConfig& cfg) { return suite_report("poincare", cfg, poincare_tasks(cfg)); }

Report verify_stability(const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  for (const auto& spec : orthants_of(cfg))
    append(tasks, field_tasks(suite_fields(spec, cfg, true), "stability/", cfg, stability_cases));
  if (!cfg.field) {
    const int count = std::min(cfg.count, 10);
    for (int n = 1; n <= 3; ++n) {
      const OrthantSpec spec(n, 0);
      for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        tasks.push_back(guarded("full_space/" + nk_tag(spec) + "/random_" + index_tag(seed), spec,
                                [spec, seed, cfg]() { return theorem_a_cases(spec, seed, cfg); }));
      }
    }
  }
  return suite_report("stability", cfg, tasks);
}

Report verify_backends(const SuiteConfig& cfg) {
  std::vector<CaseTask> tasks;
  for (const auto& spec : orthants_of(cfg)) {
    std::vector<SuiteField> fields = suite_fields(spec, cfg, false);
    if (!cfg.field) {
      CatalogParams p;
      p.beta = 0.25;
      fields.push_back(catalog_field("extremal", field_id("extremal", p), spec, p));
    }
    fields.erase(std::remove_if(fields.begin(), fields.end(), [](const SuiteField& f) { return !f.u.has_exact_form(); }),
                 fields.end());
    append(tasks, field_tasks(fields, "backend/", cfg, backend_cases));
  }
  tasks.push_back(guarded("backend/measure", OrthantSpec(1, 0), [cfg]() { return measure_cases(cfg); }));
  return suite_report("backends", cfg, tasks);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"identity", "lifting", "poincare", "stability", "backends"};
  return names;
}

Report run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "identity") return verify_identity(cfg);
  if (name == "lifting") return verify_lifting(cfg);
  if (name == "poincare") return verify_poincare(cfg);
  if (name == "stability") return verify_stability(cfg);
  if (name == "backends") return verify_backends(cfg);
  if (name == "all") {
    Report all;
    all.suite = "all";
    all.config_echo = echo(cfg);
    for (const auto& s : suite_names()) all.append(run_suite(s, cfg));
    all.sort_cases();
    return all;
  }
  fail(ErrorKind::Parameter, "unknown suite '" + name + "'");
}

Report deficit_report_for(const TestField& u, double alpha, std::optional<Backend> backend,
                          const QuadratureConfig& quad) {
  const Backend b = backend_for(u, backend);
  const OrthantSpec& spec = u.spec();
  Case c = make_case("deficit/" + nk_tag(spec) + "/" + (u.label().empty() ? "field" : u.label()), spec, b);
  const CoreFunctionals core = core_functionals(u, b, quad);
  c.set("N", core.N).set("M", core.M).set("E", core.E);
  c.set("rho1", rho1(core)).set("alpha", alpha).set("additive", additive_deficit(core, alpha));
  const bool walls_ok = std::all_of(u.wall_exponents().begin() + static_cast<std::ptrdiff_t>(spec.first_wall()),
                                    u.wall_exponents().end(), [](int p) { return p >= 1; });
  if (walls_ok && core.N > 0.0) {
    const double rhs = identity_rhs(u, alpha, quad);
    c.set("identity_rhs", rhs).set("residual", additive_deficit(core, alpha) - rhs);
  }
  if (core.E > 0.0 && core.M > 0.0) c.set("alpha_star", optimal_alpha(core)).set("hup_ratio", hup_ratio(core));
  double margin = 0.0;
  if (core.N > 0.0) {
    const ProjectionResult dE = dist_to_E(u, b, quad);
    const ProjectionResult dA = dist_to_affine_family(u, b, quad);
    const ProjectionResult dC = dist_to_E_norm_constrained(u, b, quad);
    c.set("dist_E", dE.dist_sq).set("dist_E_c", dE.c).set("dist_E_beta", dE.beta);
    c.set("dist_affine", dA.dist_sq).set("dist_affine_b", dA.c).set("dist_affine_beta", dA.beta);
    for (std::size_t i = 0; i < dA.d.size(); ++i) c.set("dist_affine_d" + std::to_string(i + 1), dA.d[i]);
    c.set("dist_constrained", dC.dist_sq).set("dist_constrained_beta", dC.beta);
    margin = (rho1(core) - dE.dist_sq) / core.scale();
  }
  c.margin = margin;
  c.pass = margin >= -1e-7;
  Report r;
  r.suite = "deficit";
  r.add(std::move(c));
  return r;
}

const std::vector<std::string>& perturbation_names() {
  static const std::vector<std::string> names = {"x1", "x1sq", "radial"};
  return names;
}

Report sweep(const SweepConfig& cfg) {
  require(cfg.count >= 1, ErrorKind::Parameter, "sweep needs at least one row");
  require(std::isfinite(cfg.eps_min) && std::isfinite(cfg.eps_max) && cfg.eps_min <= cfg.eps_max,
          ErrorKind::Parameter, "sweep range must satisfy min <= max");
  require(cfg.count > 1 || cfg.eps_min == cfg.eps_max, ErrorKind::Parameter, "a one-row sweep needs min == max");
  const TestField base = catalog_get(cfg.base, cfg.params);
  require(base.has_exact_form(), ErrorKind::Capability, "sweep base must carry an exact form");
  const OrthantSpec& spec = base.spec();
  const std::size_t n = spec.dim();
  Polynomial q(n);
  if (cfg.perturbation == "x1") {
    q = Polynomial::coordinate(n, 0);
  } else if (cfg.perturbation == "x1sq") {
    q = Polynomial::coordinate(n, 0).times_coordinate(0);
  } else if (cfg.perturbation == "radial") {
    for (std::size_t i = 0; i < n; ++i) q += Polynomial::coordinate(n, i).times_coordinate(i);
  } else {
    fail(ErrorKind::Parameter, "unknown perturbation '" + cfg.perturbation + "'");
  }
  const MultiIndex w = spec.wall_index();
  const TestField pert = TestField::from_descriptor(
      spec, base.wall_exponents(), PolyGaussDescriptor(base.exact_form()->rate(), q.times_monomial(w)), "perturbation");

  std::vector<CaseTask> tasks;
  for (int i = 0; i < cfg.count; ++i) {
    const double eps =
        cfg.count == 1 ? cfg.eps_min : cfg.eps_min + (cfg.eps_max - cfg.eps_min) * i / (cfg.count - 1);
    const std::string name = "sweep/row_" + index_tag(static_cast<std::uint64_t>(i));
    tasks.push_back(guarded(name, spec, [=]() {
      const TestField u = base.plus(pert, eps);
      const Backend b = backend_for(u, cfg.backend);
      const CoreFunctionals core = core_functionals(u, b, cfg.quad);
      Case c = make_case(name, spec, b);
      c.set("eps", eps);
      if (core.N <= 0.0) {
        c.note = "zero field";
        return std::vector<Case>{c};
      }
      const int D = spec.effective_dim();
      const double scale = core.scale();
      const double r1 = rho1(core);
      const double add1 = additive_deficit(core, 1.0);
      const ProjectionResult dE = dist_to_E(u, b, cfg.quad);
      const ProjectionResult dA = dist_to_affine_family(u, b, cfg.quad);
      const ProjectionResult dC = dist_to_E_norm_constrained(u, b, cfg.quad);
      const ProjectionResult c1 = gaussian_center_dist(u, 1.0, b, cfg.quad);
      const EnergyCenterDist ecd = energy_center_dist(u, b, cfg.quad);
      const double m13 = (r1 - dE.dist_sq) / scale;
      const double m51 = (add1 - 2.0 * c1.dist_sq) / scale;
      const double mhalf = (r1 - 0.5 * dC.dist_sq) / scale;
      const double men = (add1 - 2.0 / (D + 3) * ecd.value) / scale;
      c.set("rho1", r1).set("additive", add1).set("dist_E", dE.dist_sq).set("dist_affine", dA.dist_sq);
      c.set("dist_constrained", dC.dist_sq).set("center_dist", c1.dist_sq).set("energy_dist", ecd.value);
      c.set("margin_rho1_dist_E", m13).set("margin_additive_center", m51);
      c.set("margin_rho1_constrained", mhalf).set("margin_additive_energy", men);
      c.set("equality_rho1_dist_E", std::abs(m13) <= cfg.tol ? 1.0 : 0.0);
      c.margin = std::min({m13, m51, mhalf, men});
      c.pass = c.margin >= -cfg.tol;
      return std::vector<Case>{c};
    }));
  }
  Report r = finish("sweep", run_tasks(tasks, 0));
  r.config_echo = {{"base", cfg.base},       {"perturbation", cfg.perturbation}, {"eps_min", cfg.eps_min},
                   {"eps_max", cfg.eps_max}, {"count", cfg.count},               {"nk", {spec.n(), spec.k()}}};
  return r;
}

}  // namespace hup
