#include "hup/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "hup/errors.hpp"
#include "hup/exact_oracle.hpp"

namespace hup {

namespace {

constexpr double kLogBetaLo = -9.210340371976184;  // log 1e-4
constexpr double kLogBetaHi = 9.210340371976184;   // log 1e4
constexpr int kStarts = 8;
constexpr int kScanPoints = 321;
constexpr double kConditionLimit = 1e12;

// Basis q_0 = 1, q_j = x_{j-1} over the unweighted axes.
std::vector<Polynomial> basis_polys(const OrthantSpec& spec, bool affine) {
  std::vector<Polynomial> q;
  q.push_back(Polynomial::monomial(spec.wall_index(), 1.0));
  if (affine)
    for (std::size_t i = 0; i < spec.first_wall(); ++i)
      q.push_back(Polynomial::monomial(spec.wall_index(), 1.0).times_coordinate(i));
  return q;
}

// <u, q_j w e^{-beta |x|^2}> and their beta-derivatives.
class FamilyPairing {
 public:
  FamilyPairing(const TestField& u, bool affine, Backend backend, const QuadratureConfig& cfg)
      : u_(u), cfg_(cfg), backend_(backend), basis_(basis_polys(u.spec(), affine)) {
    const HalfAxes half = half_axes(u.spec());
    for (std::size_t i = 0; i < basis_.size(); ++i)
      for (std::size_t j = 0; j < basis_.size(); ++j) gram_.emplace_back(basis_[i] * basis_[j], half);
    if (backend == Backend::Oracle) {
      require(u.has_exact_form(), ErrorKind::Capability, "oracle backend requires an exact form");
      for (const auto& q : basis_) pair_.emplace_back(u.exact_form()->poly() * q, half);
    } else if (u.support()) {
      sample_box();
    }
  }

  std::size_t size() const { return basis_.size(); }
  const Polynomial& basis(std::size_t j) const { return basis_[j]; }

  void pairings(double beta, std::span<double> b, std::span<double> db) const {
    const std::size_t m = size();
    if (backend_ == Backend::Oracle) {
      const double t = 0.5 * u_.exact_form()->rate() + beta;
      for (std::size_t j = 0; j < m; ++j) {
        b[j] = pair_[j].at(t);
        db[j] = pair_[j].derivative(t);
      }
      return;
    }
    if (u_.support()) {
      std::vector<long double> acc(2 * m, 0.0L);
      const std::size_t n = u_.dim();
      for (std::size_t a = 0; a < weights_.size(); ++a) {
        const double e = weights_[a] * std::exp(-beta * r2_[a]);
        std::span<const double> x(&nodes_[a * n], n);
        for (std::size_t j = 0; j < m; ++j) {
          const double q = basis_[j].eval(x);
          acc[j] += e * q;
          acc[m + j] -= e * q * r2_[a];
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        b[j] = static_cast<double>(acc[j]);
        db[j] = static_cast<double>(acc[m + j]);
      }
      return;
    }
    QuadratureConfig c = cfg_;
    c.check_convergence = false;
    std::vector<double> out(2 * m);
    const std::size_t n = u_.dim();
    field_quadrature(
        u_, 0.5 * u_.decay_rate() + beta,
        [&](std::span<const double> x, std::span<double> o) {
          double r2 = 0.0;
          for (std::size_t i = 0; i < n; ++i) r2 += x[i] * x[i];
          const double e = u_.eval(x) * std::exp(-beta * r2);
          for (std::size_t j = 0; j < m; ++j) {
            const double q = basis_[j].eval(x);
            o[j] = e * q;
            o[m + j] = -e * q * r2;
          }
        },
        out, c);
    for (std::size_t j = 0; j < m; ++j) {
      b[j] = out[j];
      db[j] = out[m + j];
    }
  }

  void gram(double beta, Eigen::MatrixXd& g, Eigen::MatrixXd& dg) const {
    const std::size_t m = size();
    g.resize(m, m);
    dg.resize(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        g(i, j) = gram_[i * m + j].at(2.0 * beta);
        dg(i, j) = 2.0 * gram_[i * m + j].derivative(2.0 * beta);
      }
  }

 private:
  // Weighted samples of u on the support grid, reused for every beta.
  void sample_box() {
    const std::size_t n = u_.dim();
    const QuadratureGrid grid = box_grid(*u_.support(), cfg_.panel_order, cfg_.panels);
    const auto& axes = grid.axes();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
      double w = 1.0, r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = axes[i].x[idx[i]];
        w *= axes[i].plain_weight[idx[i]];
        r2 += x[i] * x[i];
      }
      const double v = u_.eval(x);
      if (v != 0.0) {
        nodes_.insert(nodes_.end(), x.begin(), x.end());
        r2_.push_back(r2);
        weights_.push_back(w * v);
      }
      for (std::size_t i = n; i-- > 0;) {
        if (++idx[i] < axes[i].x.size()) break;
        idx[i] = 0;
      }
    }
  }

  const TestField& u_;
  QuadratureConfig cfg_;
  Backend backend_;
  std::vector<Polynomial> basis_;
  std::vector<MomentProfile> gram_;
  std::vector<MomentProfile> pair_;
  std::vector<double> nodes_, r2_, weights_;
};

struct ProjectionValue {
  double value = 0.0;       // b^T G^{-1} b
  double derivative = 0.0;  // d/dbeta
  Eigen::VectorXd coeffs;   // G^{-1} b
};

ProjectionValue project(const FamilyPairing& fam, double beta) {
  const std::size_t m = fam.size();
  std::vector<double> b(m), db(m);
  fam.pairings(beta, b, db);
  Eigen::MatrixXd g, dg;
  fam.gram(beta, g, dg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit)
    fail(ErrorKind::Conditioning, "Gram matrix is numerically singular at beta = " + std::to_string(beta));
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(m));
  const Eigen::Map<const Eigen::VectorXd> dbv(db.data(), static_cast<Eigen::Index>(m));
  ProjectionValue p;
  p.coeffs = g.ldlt().solve(bv);
  p.value = bv.dot(p.coeffs);
  p.derivative = 2.0 * dbv.dot(p.coeffs) - p.coeffs.dot(dg * p.coeffs);
  return p;
}

struct BetaOptimum {
  double beta = 0.0;
  double value = 0.0;
  int evaluations = 0;
  double spread = 0.0;
  double lo = 0.0, hi = 0.0;
};

// Maximizes F(beta) over [1e-4, 1e4]: bounded golden-section/parabolic search
// on log beta from one start per decade, a dense scan as a safety net, then a
// root polish of dF/dbeta.
BetaOptimum maximize_over_beta(const FamilyPairing& fam, double scale) {
  BetaOptimum best;
  int evals = 0;
  auto value_at = [&](double t) {
    ++evals;
    return project(fam, std::exp(t)).value;
  };
  struct Local {
    double t, v;
  };
  std::vector<Local> locals;
  const double width = (kLogBetaHi - kLogBetaLo) / kStarts;
  std::uintmax_t iters = 200;
  for (int s = 0; s < kStarts; ++s) {
    const double a = kLogBetaLo + s * width, b = a + width;
    iters = 200;
    auto r = boost::math::tools::brent_find_minima([&](double t) { return -value_at(t); }, a, b,
                                                   std::numeric_limits<double>::digits / 2, iters);
    locals.push_back({r.first, -r.second});
  }
  auto better = [](const Local& x, const Local& y, double tol) {
    if (x.v > y.v + tol) return true;
    if (y.v > x.v + tol) return false;
    return x.t < y.t;  // ties go to the smallest beta
  };
  const double tie = 1e-14 * std::max(scale, std::numeric_limits<double>::min());
  Local top = locals[0];
  double worst = locals[0].v;
  for (const auto& l : locals) {
    if (better(l, top, tie)) top = l;
    worst = std::min(worst, l.v);
  }
  best.spread = top.v - worst;

  // Dense scan; refine around any scan point that beats the local searches.
  const double h = (kLogBetaHi - kLogBetaLo) / (kScanPoints - 1);
  const double slack = 1e-8 * std::max(scale, std::numeric_limits<double>::min());
  for (int i = 0; i < kScanPoints; ++i) {
    const double t = kLogBetaLo + i * h;
    const double v = value_at(t);
    if (v > top.v + slack) {
      iters = 200;
      auto r = boost::math::tools::brent_find_minima([&](double x) { return -value_at(x); },
                                                     std::max(kLogBetaLo, t - h), std::min(kLogBetaHi, t + h),
                                                     std::numeric_limits<double>::digits / 2, iters);
      Local refined{r.first, -r.second};
      if (better(refined, top, tie)) top = refined;
      if (v > top.v + slack)
        fail(ErrorKind::Optimization, "beta search failed: scan value " + std::to_string(v) + " at beta " +
                                          std::to_string(std::exp(t)) + " exceeds optimum " +
                                          std::to_string(top.v));
    }
  }

  // Polish the stationary point of F in beta.
  double beta = std::exp(top.t);
  best.lo = beta * std::exp(-0.01);
  best.hi = beta * std::exp(0.01);
  if (top.t > kLogBetaLo + 0.01 && top.t < kLogBetaHi - 0.01) {
    auto dF = [&](double bt) {
      ++evals;
      return project(fam, bt).derivative;
    };
    const double flo = dF(best.lo), fhi = dF(best.hi);
    if (flo > 0.0 && fhi < 0.0) {
      std::uintmax_t it = 100;
      auto root = boost::math::tools::toms748_solve(dF, best.lo, best.hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(), it);
      const double cand = 0.5 * (root.first + root.second);
      const double v = project(fam, cand).value;
      if (v >= top.v - tie) {
        beta = cand;
        top.v = v;
      }
    }
  }
  best.beta = beta;
  best.value = top.v;
  best.evaluations = evals;
  return best;
}

double field_mass(const TestField& u, Backend backend, const QuadratureConfig& cfg) {
  return core_functionals(u, backend, cfg).N;
}

ProjectionResult fill(const FamilyPairing& fam, const TestField& u, const std::string& family, double beta,
                      double mass, Backend backend) {
  const ProjectionValue p = project(fam, beta);
  ProjectionResult r;
  r.family = family;
  r.beta = beta;
  r.mass = mass;
  r.backend = backend;
  r.c = p.coeffs[0];
  for (Eigen::Index j = 1; j < p.coeffs.size(); ++j) r.d.push_back(p.coeffs[j]);
  r.dist_sq = std::max(0.0, mass - p.value);
  (void)u;
  return r;
}

Backend pick(const TestField& u, std::optional<Backend> b) { return b ? *b : preferred_backend(u); }

void require_mass(double mass) {
  require(mass > 0.0, ErrorKind::Degenerate, "projection requires a field with positive mass");
}

}  // namespace

double ProjectionResult::lambda() const { return beta > 0.0 ? 1.0 / std::sqrt(2.0 * beta) : 0.0; }

Backend preferred_backend(const TestField& u) {
  return u.has_exact_form() ? Backend::Oracle : Backend::Quadrature;
}

PolyGaussDescriptor gaussian_profile(const OrthantSpec& spec, double beta) {
  require(std::isfinite(beta) && beta > 0.0, ErrorKind::Parameter, "Gaussian profile requires beta > 0");
  return PolyGaussDescriptor(2.0 * beta, Polynomial::monomial(spec.wall_index(), 1.0));
}

ProjectionResult dist_to_E(const TestField& u, std::optional<Backend> backend, const QuadratureConfig& cfg) {
  const Backend b = pick(u, backend);
  const double mass = field_mass(u, b, cfg);
  require_mass(mass);
  FamilyPairing fam(u, false, b, cfg);
  const BetaOptimum opt = maximize_over_beta(fam, mass);
  ProjectionResult r = fill(fam, u, "extremal", opt.beta, mass, b);
  r.bracket_lo = opt.lo;
  r.bracket_hi = opt.hi;
  r.evaluations = opt.evaluations;
  r.start_spread = opt.spread;
  return r;
}

ProjectionResult dist_to_affine_family(const TestField& u, std::optional<Backend> backend,
                                       const QuadratureConfig& cfg) {
  const Backend b = pick(u, backend);
  const double mass = field_mass(u, b, cfg);
  require_mass(mass);
  FamilyPairing fam(u, true, b, cfg);
  const BetaOptimum opt = maximize_over_beta(fam, mass);
  ProjectionResult r = fill(fam, u, "affine", opt.beta, mass, b);
  r.bracket_lo = opt.lo;
  r.bracket_hi = opt.hi;
  r.evaluations = opt.evaluations;
  r.start_spread = opt.spread;
  return r;
}

ProjectionResult dist_to_E_norm_constrained(const TestField& u, std::optional<Backend> backend,
                                            const QuadratureConfig& cfg) {
  ProjectionResult r = dist_to_E(u, backend, cfg);
  r.family = "extremal_norm_constrained";
  // With ||omega||^2 = N: ||u - omega||^2 = 2N - 2|<u, omega>|, and
  // |<u, omega>| = sqrt(N) |<u, g>| / ||g|| = sqrt(N * (N - dist_E)).
  const double proj = std::max(0.0, r.mass - r.dist_sq);
  r.sign = r.c > 0.0 ? 1 : (r.c < 0.0 ? -1 : 1);
  const double inner = std::sqrt(r.mass * proj);
  r.dist_sq = std::max(0.0, 2.0 * r.mass - 2.0 * inner);
  const PolyGaussDescriptor g = gaussian_profile(u.spec(), r.beta);
  const double gnorm = std::sqrt(descriptor_mass(g, u.spec()));
  r.c = r.sign * std::sqrt(r.mass) / gnorm;
  return r;
}

ProjectionResult gaussian_center_dist(const TestField& u, double lambda, std::optional<Backend> backend,
                                      const QuadratureConfig& cfg) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Parameter, "lambda must be > 0");
  const Backend b = pick(u, backend);
  const double mass = field_mass(u, b, cfg);
  FamilyPairing fam(u, false, b, cfg);
  const double beta = 1.0 / (2.0 * lambda * lambda);
  ProjectionResult r = fill(fam, u, "gaussian_center", beta, mass, b);
  r.bracket_lo = r.bracket_hi = beta;
  return r;
}

ProjectionResult affine_dist_at_lambda(const TestField& u, double lambda, std::optional<Backend> backend,
                                       const QuadratureConfig& cfg) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Parameter, "lambda must be > 0");
  const Backend b = pick(u, backend);
  const double mass = field_mass(u, b, cfg);
  FamilyPairing fam(u, true, b, cfg);
  const double beta = 1.0 / (2.0 * lambda * lambda);
  ProjectionResult r = fill(fam, u, "affine_at_lambda", beta, mass, b);
  r.bracket_lo = r.bracket_hi = beta;
  return r;
}

CrossFunctionals cross_functionals(const TestField& u, const PolyGaussDescriptor& g, Backend backend,
                                   const QuadratureConfig& cfg) {
  require(g.dim() == u.dim(), ErrorKind::Parameter, "descriptor dimension does not match the field");
  CrossFunctionals c;
  if (backend == Backend::Oracle) {
    require(u.has_exact_form(), ErrorKind::Capability, "oracle backend requires an exact form");
    const PolyGaussDescriptor& d = *u.exact_form();
    const PolyGaussDescriptor prod = d * g;
    c.N = descriptor_integral(prod, u.spec());
    c.M = descriptor_integral(PolyGaussDescriptor(prod.rate(), prod.poly() * radius_squared(u.dim())), u.spec());
    for (std::size_t i = 0; i < u.dim(); ++i) c.E += descriptor_integral(d.partial(i) * g.partial(i), u.spec());
    return c;
  }
  const std::size_t n = u.dim();
  double out[3];
  field_quadrature(
      u, 0.5 * (u.decay_rate() + g.rate()),
      [&](std::span<const double> x, std::span<double> o) {
        double gu[CompiledPolynomial::kMaxDim], gg[CompiledPolynomial::kMaxDim];
        const double vu = u.eval(x, std::span<double>(gu, n));
        const double vg = g.eval(x, std::span<double>(gg, n));
        double r2 = 0.0, dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          r2 += x[i] * x[i];
          dot += gu[i] * gg[i];
        }
        o[0] = vu * vg;
        o[1] = r2 * vu * vg;
        o[2] = dot;
      },
      out, cfg);
  c.N = out[0];
  c.M = out[1];
  c.E = out[2];
  return c;
}

EnergyCenterDist energy_center_dist(const TestField& u, std::optional<Backend> backend,
                                    const QuadratureConfig& cfg) {
  const Backend b = pick(u, backend);
  const CoreFunctionals f = core_functionals(u, b, cfg);
  const PolyGaussDescriptor g = gaussian_profile(u.spec(), 0.5);
  const CrossFunctionals cu = cross_functionals(u, g, b, cfg);
  const double gg = descriptor_mass(g, u.spec()) + descriptor_second_moment(g, u.spec()) +
                    descriptor_dirichlet(g, u.spec());
  const double ug = cu.N + cu.M + cu.E;
  EnergyCenterDist r;
  r.c = ug / gg;
  r.value = std::max(0.0, f.N + f.M + f.E - ug * ug / gg);
  return r;
}

}  // namespace hup
