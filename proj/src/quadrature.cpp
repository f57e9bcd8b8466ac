#include "hup/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hup/errors.hpp"

namespace hup {

namespace {

void check_order(int m) {
  require(m >= 1 && m <= kMaxRuleOrder, ErrorKind::Parameter,
          "rule order must be in [1, " + std::to_string(kMaxRuleOrder) + "], got " + std::to_string(m));
}

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Orthonormal polynomial values p_0..p_{m} at x; returns p_m and its
// derivative, and accumulates sum_{j<m} p_j^2.
struct RecurrenceEval {
  double pm;
  double dpm;
  double sumsq;
};

RecurrenceEval eval_orthonormal(std::span<const double> alpha, std::span<const double> beta, double x) {
  const std::size_t m = alpha.size();
  double p_prev = 0.0, p = 1.0 / std::sqrt(beta[0]);
  double d_prev = 0.0, d = 0.0;
  double sumsq = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sumsq += p * p;
    const double sb_next = j + 1 < m ? std::sqrt(beta[j + 1]) : 1.0;
    const double sb = j == 0 ? 0.0 : std::sqrt(beta[j]);
    const double p_next = ((x - alpha[j]) * p - sb * p_prev) / sb_next;
    const double d_next = (p + (x - alpha[j]) * d - sb * d_prev) / sb_next;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d, sumsq};
}

using Mp = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<300>,
                                         boost::multiprecision::et_off>;

// Chebyshev algorithm: recurrence coefficients from ordinary moments.
void half_range_recurrence(int m, double a, std::vector<double>& alpha, std::vector<double>& beta) {
  const int nm = 2 * m;
  std::vector<Mp> mu(nm);
  const Mp ma(a);
  mu[0] = boost::math::tgamma((ma + 1) / 2) / 2;
  if (nm > 1) mu[1] = boost::math::tgamma((ma + 2) / 2) / 2;
  for (int j = 2; j < nm; ++j) mu[j] = mu[j - 2] * (ma + j - 1) / 2;

  std::vector<Mp> al(m), be(m);
  std::vector<Mp> sig_prev(nm, Mp(0)), sig(mu), sig_next(nm);
  al[0] = mu[1] / mu[0];
  be[0] = mu[0];
  for (int k = 1; k < m; ++k) {
    for (int l = k; l < nm - k; ++l)
      sig_next[l] = sig[l + 1] - al[k - 1] * sig[l] - be[k - 1] * sig_prev[l];
    al[k] = sig_next[k + 1] / sig_next[k] - sig[k] / sig[k - 1];
    be[k] = sig_next[k] / sig[k - 1];
    sig_prev.swap(sig);
    sig.swap(sig_next);
  }
  alpha.resize(m);
  beta.resize(m);
  for (int k = 0; k < m; ++k) {
    alpha[k] = static_cast<double>(al[k]);
    beta[k] = static_cast<double>(be[k]);
  }
}

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

double AxisRule::weight_mass() const {
  switch (domain) {
    case AxisDomain::FullLine: return std::sqrt(std::numbers::pi);
    case AxisDomain::HalfLine: return 0.5 * std::tgamma(0.5 * (exponent + 1.0));
    case AxisDomain::Interval: return hi - lo;
  }
  return 0.0;
}

AxisRule gauss_from_recurrence(std::span<const double> alpha, std::span<const double> beta) {
  const std::size_t m = alpha.size();
  require(m >= 1 && beta.size() == m, ErrorKind::Parameter, "recurrence coefficient arrays must match");
  require(beta[0] > 0.0, ErrorKind::Parameter, "weight mass must be positive");
  Eigen::VectorXd diag(m), sub(m > 1 ? m - 1 : 1);
  for (std::size_t j = 0; j < m; ++j) diag[j] = alpha[j];
  for (std::size_t j = 1; j < m; ++j) {
    require(beta[j] > 0.0, ErrorKind::Parameter, "recurrence coefficients must be positive");
    sub[j - 1] = std::sqrt(beta[j]);
  }
  AxisRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = alpha[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, ErrorKind::Convergence, "tridiagonal eigenproblem failed");
    for (std::size_t j = 0; j < m; ++j) rule.nodes[j] = solver.eigenvalues()[j];
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  for (std::size_t j = 0; j < m; ++j) {
    double x = rule.nodes[j];
    // Newton polish on the degree-m orthonormal polynomial.
    for (int it = 0; it < 3; ++it) {
      const RecurrenceEval r = eval_orthonormal(alpha, beta, x);
      if (r.dpm == 0.0 || !std::isfinite(r.dpm)) break;
      const double step = r.pm / r.dpm;
      if (!std::isfinite(step)) break;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[j] = x;
    rule.weights[j] = 1.0 / eval_orthonormal(alpha, beta, x).sumsq;
  }
  return rule;
}

AxisRule hermite_rule(int m) {
  check_order(m);
  std::vector<double> alpha(m, 0.0), beta(m);
  beta[0] = std::sqrt(std::numbers::pi);
  for (int j = 1; j < m; ++j) beta[j] = 0.5 * j;
  AxisRule rule = gauss_from_recurrence(alpha, beta);
  // Enforce exact symmetry.
  for (int j = 0; j < m / 2; ++j) {
    const double x = 0.5 * (rule.nodes[m - 1 - j] - rule.nodes[j]);
    const double w = 0.5 * (rule.weights[m - 1 - j] + rule.weights[j]);
    rule.nodes[j] = -x;
    rule.nodes[m - 1 - j] = x;
    rule.weights[j] = rule.weights[m - 1 - j] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  rule.domain = AxisDomain::FullLine;
  return rule;
}

AxisRule laguerre_rule(int m, double alpha_l) {
  check_order(m);
  require(std::isfinite(alpha_l) && alpha_l > -1.0, ErrorKind::Parameter, "Laguerre parameter must exceed -1");
  std::vector<double> alpha(m), beta(m);
  for (int j = 0; j < m; ++j) {
    alpha[j] = 2.0 * j + alpha_l + 1.0;
    beta[j] = j == 0 ? std::tgamma(alpha_l + 1.0) : j * (j + alpha_l);
  }
  AxisRule rule = gauss_from_recurrence(alpha, beta);
  rule.domain = AxisDomain::HalfLine;
  rule.exponent = alpha_l;
  return rule;
}

AxisRule half_monomial_rule(int m, double a) {
  check_order(m);
  require(std::isfinite(a) && a >= 0.0, ErrorKind::Parameter, "half-line exponent must be >= 0");
  AxisRule lag = laguerre_rule(m, 0.5 * (a - 1.0));
  AxisRule rule;
  rule.domain = AxisDomain::HalfLine;
  rule.exponent = a;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int j = 0; j < m; ++j) {
    rule.nodes[j] = std::sqrt(lag.nodes[j]);
    rule.weights[j] = 0.5 * lag.weights[j];
  }
  return rule;
}

AxisRule half_range_rule(int m, double a) {
  check_order(m);
  require(std::isfinite(a) && a >= 0.0, ErrorKind::Parameter, "half-line exponent must be >= 0");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, AxisRule> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({m, a});
    if (it != cache.end()) return it->second;
  }
  std::vector<double> alpha, beta;
  half_range_recurrence(m, a, alpha, beta);
  AxisRule rule = gauss_from_recurrence(alpha, beta);
  rule.domain = AxisDomain::HalfLine;
  rule.exponent = a;
  std::lock_guard lock(mutex);
  cache.emplace(std::pair{m, a}, rule);
  return rule;
}

AxisRule legendre_panel_rule(int m, double lo, double hi) {
  check_order(m);
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::Parameter,
          "Legendre panel needs a non-empty interval");
  std::vector<double> alpha(m, 0.0), beta(m);
  beta[0] = 2.0;
  for (int j = 1; j < m; ++j) beta[j] = static_cast<double>(j) * j / (4.0 * j * j - 1.0);
  AxisRule ref = gauss_from_recurrence(alpha, beta);
  AxisRule rule;
  rule.domain = AxisDomain::Interval;
  rule.lo = lo;
  rule.hi = hi;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int j = 0; j < m; ++j) {
    // Symmetrize the reference rule before mapping.
    const double t = 0.5 * (ref.nodes[j] - ref.nodes[m - 1 - j]);
    const double w = 0.5 * (ref.weights[j] + ref.weights[m - 1 - j]);
    rule.nodes.push_back(mid + half * t);
    rule.weights.push_back(half * w);
  }
  return rule;
}

AxisRule composite_legendre_rule(int m, int panels, double lo, double hi) {
  require(panels >= 1, ErrorKind::Parameter, "panel count must be >= 1");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::Parameter,
          "composite rule needs a non-empty interval");
  AxisRule rule;
  rule.domain = AxisDomain::Interval;
  rule.lo = lo;
  rule.hi = hi;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    AxisRule panel = legendre_panel_rule(m, lo + p * h, p + 1 == panels ? hi : lo + (p + 1) * h);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

GridAxis::GridAxis(AxisRule r, double s) : rule(std::move(r)), scale(s) {
  require(std::isfinite(scale) && scale > 0.0, ErrorKind::Parameter, "axis scale must be > 0");
  const std::size_t m = rule.size();
  x.resize(m);
  weight.resize(m);
  plain_weight.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = rule.nodes[j];
    const double w = rule.weights[j];
    switch (rule.domain) {
      case AxisDomain::Interval:
        x[j] = t;
        weight[j] = w;
        plain_weight[j] = w;
        break;
      case AxisDomain::FullLine:
        x[j] = scale * t;
        weight[j] = scale * w;
        plain_weight[j] = scale * std::exp(std::log(w) + t * t);
        break;
      case AxisDomain::HalfLine: {
        const double a = rule.exponent;
        x[j] = scale * t;
        weight[j] = std::pow(scale, a + 1.0) * w;
        plain_weight[j] = scale * std::exp(std::log(w) - a * std::log(t) + t * t);
        break;
      }
    }
  }
}

QuadratureGrid::QuadratureGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)), node_count_(1) {
  require(!axes_.empty(), ErrorKind::Parameter, "grid needs at least one axis");
  for (const auto& a : axes_) node_count_ *= a.x.size();
}

double QuadratureGrid::implicit_mass() const {
  double mass = 1.0;
  for (const auto& a : axes_) {
    const double base = a.rule.weight_mass();
    mass *= a.rule.domain == AxisDomain::Interval ? base : std::pow(a.scale, a.rule.exponent + 1.0) * base;
  }
  return mass;
}

void tensor_integrate(const QuadratureGrid& grid, const MultiIntegrand& f, std::span<double> result,
                      WeightMode mode) {
  const std::size_t d = grid.dim();
  const std::size_t nout = result.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d), out(nout);
  std::vector<NeumaierSum> acc(nout);
  const auto& axes = grid.axes();
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = axes[i].x[idx[i]];
      w *= mode == WeightMode::Implicit ? axes[i].weight[idx[i]] : axes[i].plain_weight[idx[i]];
    }
    f(x, out);
    for (std::size_t c = 0; c < nout; ++c) {
      if (!std::isfinite(out[c]))
        fail(ErrorKind::Evaluation, "non-finite integrand value at node " + format_point(x));
      acc[c].add(w * out[c]);
    }
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < axes[i].x.size()) break;
      idx[i] = 0;
    }
  }
  for (std::size_t c = 0; c < nout; ++c) result[c] = acc[c].value();
}

double tensor_integrate(const QuadratureGrid& grid, const Integrand& f, WeightMode mode) {
  double r = 0.0;
  tensor_integrate(
      grid, [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, std::span<double>(&r, 1),
      mode);
  return r;
}

QuadratureGrid orthant_grid(const OrthantSpec& spec, double rate, int order) {
  require(std::isfinite(rate) && rate > 0.0, ErrorKind::Parameter, "grid rate must be > 0");
  const double scale = 1.0 / std::sqrt(rate);
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < spec.dim(); ++i)
    axes.emplace_back(spec.is_wall(i) ? half_range_rule(order, 0.0) : hermite_rule(order), scale);
  return QuadratureGrid(std::move(axes));
}

QuadratureGrid measure_grid(const WeightExponents& a, double lambda, int order) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Parameter, "measure scale lambda must be > 0");
  const double scale = std::sqrt(2.0) * lambda;
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < a.dim(); ++i)
    axes.emplace_back(a[i] > 0.0 ? half_range_rule(order, a[i]) : hermite_rule(order), scale);
  return QuadratureGrid(std::move(axes));
}

QuadratureGrid box_grid(const SupportBox& box, int order, int panels) {
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < box.lo.size(); ++i)
    axes.emplace_back(composite_legendre_rule(order, panels, box.lo[i], box.hi[i]));
  return QuadratureGrid(std::move(axes));
}

SphericalGrid::SphericalGrid(const OrthantSpec& spec, double rate, double radial_power, int radial_order,
                             int angular_order)
    : spec_(spec),
      radial_power_(radial_power),
      radial_(half_range_rule(radial_order, radial_power + spec.n() - 1.0), 1.0 / std::sqrt(rate)) {
  require(radial_power + spec.n() - 1.0 >= 0.0, ErrorKind::Parameter, "radial power too negative");
  const int n = spec.n();
  constexpr double pi = std::numbers::pi;
  // theta_j for j = 1..n-2 controls the sign of x_j; theta_{n-1} the pair (x_{n-1}, x_n).
  for (int j = 1; j <= n - 2; ++j) {
    const bool wall = spec.is_wall(static_cast<std::size_t>(j - 1));
    angles_.push_back(legendre_panel_rule(angular_order, 0.0, wall ? 0.5 * pi : pi));
  }
  if (n >= 2) {
    const bool last_wall = spec.is_wall(static_cast<std::size_t>(n - 1));
    const bool second_wall = spec.is_wall(static_cast<std::size_t>(n - 2));
    const double hi = second_wall ? 0.5 * pi : (last_wall ? pi : 2.0 * pi);
    angles_.push_back(legendre_panel_rule(angular_order, 0.0, hi));
  }
}

void SphericalGrid::integrate(const MultiIntegrand& f, std::span<double> result) const {
  const int n = spec_.n();
  const std::size_t nout = result.size();
  std::vector<double> x(static_cast<std::size_t>(n)), out(nout), dir(static_cast<std::size_t>(n));
  std::vector<NeumaierSum> acc(nout);

  // Enumerate unit directions with their angular weights (Jacobian included).
  std::vector<std::vector<double>> dirs;
  std::vector<double> dir_weights;
  if (n == 1) {
    dirs.push_back({1.0});
    dir_weights.push_back(1.0);
    if (!spec_.is_wall(0)) {
      dirs.push_back({-1.0});
      dir_weights.push_back(1.0);
    }
  } else {
    const std::size_t na = angles_.size();
    std::vector<std::size_t> idx(na, 0);
    std::size_t total = 1;
    for (const auto& r : angles_) total *= r.size();
    for (std::size_t c = 0; c < total; ++c) {
      double w = 1.0;
      double sin_prod = 1.0;
      for (std::size_t j = 0; j < na; ++j) {
        const double th = angles_[j].nodes[idx[j]];
        w *= angles_[j].weights[idx[j]];
        if (j + 1 < na) {
          dir[j] = sin_prod * std::cos(th);
          w *= std::pow(std::sin(th), static_cast<double>(n - 2 - static_cast<int>(j)));
          sin_prod *= std::sin(th);
        } else {
          dir[j] = sin_prod * std::cos(th);
          dir[j + 1] = sin_prod * std::sin(th);
        }
      }
      dirs.push_back(dir);
      dir_weights.push_back(w);
      for (std::size_t j = na; j-- > 0;) {
        if (++idx[j] < angles_[j].size()) break;
        idx[j] = 0;
      }
    }
  }

  for (std::size_t ir = 0; ir < radial_.x.size(); ++ir) {
    const double r = radial_.x[ir];
    // plain weight already divides out r^{c+n-1} e^{-(r/scale)^2}; restore r^{n-1}.
    const double wr = radial_.plain_weight[ir] * std::pow(r, n - 1.0);
    for (std::size_t id = 0; id < dirs.size(); ++id) {
      for (int i = 0; i < n; ++i) x[i] = r * dirs[id][i];
      f(x, out);
      const double w = wr * dir_weights[id];
      for (std::size_t c = 0; c < nout; ++c) {
        if (!std::isfinite(out[c]))
          fail(ErrorKind::Evaluation, "non-finite integrand value at node " + format_point(x));
        acc[c].add(w * out[c]);
      }
    }
  }
  for (std::size_t c = 0; c < nout; ++c) result[c] = acc[c].value();
}

double SphericalGrid::integrate(const Integrand& f) const {
  double r = 0.0;
  integrate([&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); }, std::span<double>(&r, 1));
  return r;
}

void write_rule_csv(std::ostream& os, const AxisRule& rule) {
  os.precision(17);
  os << "index,node,weight\n";
  for (std::size_t j = 0; j < rule.size(); ++j) os << j << ',' << rule.nodes[j] << ',' << rule.weights[j] << '\n';
}

}  // namespace hup
