#include "hup/domain.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "hup/errors.hpp"

namespace hup {

OrthantSpec::OrthantSpec(int n, int k) : n_(n), k_(k) {
  require(n >= 1, ErrorKind::Parameter, "orthant dimension n must be >= 1");
  require(k >= 0 && k <= n, ErrorKind::Parameter, "wall count k must satisfy 0 <= k <= n");
}

MultiIndex OrthantSpec::wall_index() const {
  MultiIndex gamma(dim(), 0);
  for (std::size_t i = first_wall(); i < dim(); ++i) gamma[i] = 1;
  return gamma;
}

bool OrthantSpec::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!std::isfinite(x[i])) return false;
    if (is_wall(i) && !(x[i] > 0.0)) return false;
  }
  return true;
}

WeightExponents::WeightExponents(std::vector<double> a) : a_(std::move(a)) {
  require(!a_.empty(), ErrorKind::Parameter, "weight exponents must be non-empty");
  for (double v : a_) require(std::isfinite(v) && v >= 0.0, ErrorKind::Parameter, "weight exponents must be >= 0");
}

WeightExponents WeightExponents::on_walls(const OrthantSpec& spec, double value) {
  std::vector<double> a(spec.dim(), 0.0);
  for (std::size_t i = spec.first_wall(); i < spec.dim(); ++i) a[i] = value;
  return WeightExponents(std::move(a));
}

double WeightExponents::total() const noexcept {
  double s = 0.0;
  for (double v : a_) s += v;
  return s;
}

bool WeightExponents::all_integer() const noexcept {
  for (double v : a_)
    if (v != std::floor(v)) return false;
  return true;
}

std::vector<int> WeightExponents::integer_values() const {
  require(all_integer(), ErrorKind::Parameter, "operation requires integer weight exponents");
  std::vector<int> out;
  out.reserve(a_.size());
  for (double v : a_) out.push_back(static_cast<int>(v));
  return out;
}

bool WeightExponents::contains(std::span<const double> x) const {
  if (x.size() != a_.size()) return false;
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (a_[i] > 0.0 && !(x[i] > 0.0)) return false;
  return true;
}

double WeightExponents::weight(std::span<const double> x) const {
  double w = 1.0;
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (a_[i] > 0.0) w *= std::pow(x[i], a_[i]);
  return w;
}

PolyGaussDescriptor::PolyGaussDescriptor(double rate, Polynomial poly) : rate_(rate), poly_(std::move(poly)) {
  require(std::isfinite(rate) && rate > 0.0, ErrorKind::Parameter, "descriptor rate must be > 0");
}

double PolyGaussDescriptor::eval(std::span<const double> x) const {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return poly_.eval(x) * std::exp(-0.5 * rate_ * r2);
}

double PolyGaussDescriptor::eval(std::span<const double> x, std::span<double> grad) const {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double g = std::exp(-0.5 * rate_ * r2);
  const double p = poly_.eval(x);
  for (std::size_t i = 0; i < dim(); ++i) grad[i] = (poly_.derivative(i).eval(x) - rate_ * x[i] * p) * g;
  return p * g;
}

PolyGaussDescriptor PolyGaussDescriptor::scaled(double c) const { return {rate_, poly_ * c}; }

PolyGaussDescriptor PolyGaussDescriptor::times_coordinate(std::size_t axis, int power) const {
  return {rate_, poly_.times_coordinate(axis, power)};
}

PolyGaussDescriptor PolyGaussDescriptor::partial(std::size_t axis) const {
  return {rate_, poly_.derivative(axis) - poly_.times_coordinate(axis) * rate_};
}

PolyGaussDescriptor PolyGaussDescriptor::dilated(double lambda) const {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Parameter, "dilation factor must be > 0");
  return {rate_ / (lambda * lambda), poly_.rescaled_argument(1.0 / lambda)};
}

PolyGaussDescriptor PolyGaussDescriptor::rate_derivative() const {
  Polynomial r2(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    MultiIndex g(dim(), 0);
    g[i] = 2;
    r2.add_term(g, -0.5);
  }
  return {rate_, poly_ * r2};
}

PolyGaussDescriptor operator+(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b) {
  require(a.rate_ == b.rate_, ErrorKind::Parameter, "cannot add descriptors with different rates");
  return {a.rate_, a.poly_ + b.poly_};
}

PolyGaussDescriptor operator-(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b) {
  require(a.rate_ == b.rate_, ErrorKind::Parameter, "cannot subtract descriptors with different rates");
  return {a.rate_, a.poly_ - b.poly_};
}

PolyGaussDescriptor operator*(const PolyGaussDescriptor& a, const PolyGaussDescriptor& b) {
  return {a.rate_ + b.rate_, a.poly_ * b.poly_};
}

bool SupportBox::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

TestField::TestField(OrthantSpec spec, std::vector<int> wall_exponents, ResidualEval residual, double decay_rate,
                     std::optional<PolyGaussDescriptor> exact_form, std::optional<SupportBox> support,
                     std::string label)
    : spec_(spec),
      wall_exponents_(std::move(wall_exponents)),
      residual_(std::move(residual)),
      decay_rate_(decay_rate),
      exact_(std::move(exact_form)),
      support_(std::move(support)),
      label_(std::move(label)) {
  require(wall_exponents_.size() == spec_.dim(), ErrorKind::Parameter, "wall exponent vector has wrong length");
  for (std::size_t i = 0; i < spec_.dim(); ++i) {
    require(wall_exponents_[i] >= 0, ErrorKind::Parameter, "wall exponents must be >= 0");
    require(spec_.is_wall(i) || wall_exponents_[i] == 0, ErrorKind::Parameter,
            "wall exponents must vanish off the wall axes");
  }
  require(std::isfinite(decay_rate_) && decay_rate_ > 0.0, ErrorKind::Parameter, "decay rate must be > 0");
  require(static_cast<bool>(residual_), ErrorKind::Parameter, "residual evaluator is empty");
  if (exact_) require(exact_->dim() == spec_.dim(), ErrorKind::Parameter, "exact form has wrong dimension");
  if (support_)
    require(support_->lo.size() == spec_.dim() && support_->hi.size() == spec_.dim(), ErrorKind::Parameter,
            "support box has wrong dimension");
}

TestField TestField::from_descriptor(OrthantSpec spec, std::vector<int> wall_exponents, PolyGaussDescriptor u,
                                     std::string label) {
  require(u.dim() == spec.dim(), ErrorKind::Parameter, "descriptor dimension does not match the orthant");
  MultiIndex p(wall_exponents.begin(), wall_exponents.end());
  auto residual_poly = std::make_shared<const CompiledPolynomial>(u.poly().divided_by_monomial(p));
  const double rate = u.rate();
  ResidualEval residual = [residual_poly, rate](std::span<const double> x, std::span<double> grad) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double g = std::exp(-0.5 * rate * r2);
    const double v = residual_poly->eval(x, grad);
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = (grad[i] - rate * x[i] * v) * g;
    return v * g;
  };
  return TestField(spec, std::move(wall_exponents), std::move(residual), rate, std::move(u), std::nullopt,
                   std::move(label));
}

double TestField::wall_monomial(std::span<const double> x) const {
  double m = 1.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (int j = 0; j < wall_exponents_[i]; ++j) m *= x[i];
  return m;
}

double TestField::eval(std::span<const double> x, std::span<double> grad) const {
  const std::size_t n = dim();
  double dv[CompiledPolynomial::kMaxDim];
  const double v = residual_(x, std::span<double>(dv, n));
  const double m = wall_monomial(x);
  for (std::size_t i = 0; i < n; ++i) {
    double dm = 0.0;
    if (wall_exponents_[i] > 0) {
      dm = static_cast<double>(wall_exponents_[i]);
      for (int j = 0; j < wall_exponents_[i] - 1; ++j) dm *= x[i];
      for (std::size_t l = 0; l < n; ++l) {
        if (l == i) continue;
        for (int j = 0; j < wall_exponents_[l]; ++j) dm *= x[l];
      }
    }
    grad[i] = dm * v + m * dv[i];
  }
  return m * v;
}

double TestField::eval(std::span<const double> x) const {
  double g[CompiledPolynomial::kMaxDim];
  return eval(x, std::span<double>(g, dim()));
}

TestField TestField::scaled(double c) const {
  auto inner = residual_;
  ResidualEval residual = [inner, c](std::span<const double> x, std::span<double> grad) {
    const double v = inner(x, grad);
    for (double& g : grad) g *= c;
    return c * v;
  };
  std::optional<PolyGaussDescriptor> exact;
  if (exact_) exact = exact_->scaled(c);
  return TestField(spec_, wall_exponents_, std::move(residual), decay_rate_, std::move(exact), support_, label_);
}

TestField TestField::dilated(double lambda) const {
  require(exact_.has_value(), ErrorKind::Capability, "dilation requires an exact form");
  return from_descriptor(spec_, wall_exponents_, exact_->dilated(lambda), label_);
}

TestField TestField::plus(const TestField& other, double c) const {
  require(exact_.has_value() && other.exact_.has_value(), ErrorKind::Capability,
          "field sums require exact forms");
  require(spec_ == other.spec_ && wall_exponents_ == other.wall_exponents_, ErrorKind::Parameter,
          "field sums require the same orthant and wall exponents");
  return from_descriptor(spec_, wall_exponents_, *exact_ + other.exact_->scaled(c), label_);
}

FieldValue field_eval(const TestField& field, std::span<const double> x) {
  require(x.size() == field.dim(), ErrorKind::Parameter, "point has wrong dimension");
  require(field.spec().contains(x), ErrorKind::Domain, "point is on or outside an orthant wall");
  FieldValue out;
  out.gradient.assign(field.dim(), 0.0);
  out.value = field.eval(x, out.gradient);
  return out;
}

TestField make_extremal(const OrthantSpec& spec, double c, double beta) {
  require(std::isfinite(beta) && beta > 0.0, ErrorKind::Parameter, "extremal requires beta > 0");
  const MultiIndex wall = spec.wall_index();
  PolyGaussDescriptor u(2.0 * beta, Polynomial::monomial(wall, c));
  return TestField::from_descriptor(spec, std::vector<int>(wall.begin(), wall.end()), std::move(u), "extremal");
}

double sphere_area(int d) {
  require(d >= 0, ErrorKind::Parameter, "sphere dimension must be >= 0");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace hup
