#pragma once

// Closed-form Gamma-moment integrals of polynomial x Gaussian descriptors.

#include <map>
#include <vector>

#include "hup/domain.hpp"

namespace hup {

/// int_0^inf x^m e^{-s x^2} dx = Gamma((m+1)/2) / (2 s^{(m+1)/2}).
double half_moment(int m, double s);
/// Same with a real exponent p > -1.
double half_moment(double p, double s);
/// int_R x^m e^{-s x^2} dx.
double full_moment(int m, double s);

/// Which axes integrate over (0, inf) rather than R.
using HalfAxes = std::vector<bool>;
HalfAxes half_axes(const OrthantSpec& spec);
HalfAxes half_axes(const WeightExponents& a);

/// int P(x) e^{-t|x|^2} dx as a function of t > 0, stored as
/// sum_D C_D t^{-(D+n)/2} over total degrees D.
class MomentProfile {
 public:
  MomentProfile(const Polynomial& p, const HalfAxes& half);

  double at(double t) const;
  double derivative(double t) const;
  bool is_zero() const noexcept { return coeffs_.empty(); }

 private:
  std::size_t dim_;
  std::map<int, double> coeffs_;
};

/// int u over the domain, u = P e^{-s|x|^2/2}.
double descriptor_integral(const PolyGaussDescriptor& d, const OrthantSpec& spec);
double descriptor_integral(const PolyGaussDescriptor& d, const WeightExponents& a);
double descriptor_integral(const PolyGaussDescriptor& d, const HalfAxes& half);
/// int |x|^{2a} u, real a, finite when every term has |gamma| + n + 2a > 0.
double descriptor_radial_moment(const PolyGaussDescriptor& d, const OrthantSpec& spec, double a);
/// int |grad u|^2.
double descriptor_dirichlet(const PolyGaussDescriptor& d, const OrthantSpec& spec);
/// int u v.
double descriptor_inner(const PolyGaussDescriptor& u, const PolyGaussDescriptor& v, const OrthantSpec& spec);
/// int u^2.
double descriptor_mass(const PolyGaussDescriptor& d, const OrthantSpec& spec);
/// int |x|^2 u^2.
double descriptor_second_moment(const PolyGaussDescriptor& d, const OrthantSpec& spec);

/// |x|^2 as a polynomial in `dim` variables.
Polynomial radius_squared(std::size_t dim);

}  // namespace hup
