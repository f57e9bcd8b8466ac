#pragma once

// Lifting of orthant integrals to R^{n + 2|l|}: each wall axis i becomes a
// block y_i in R^{2 l_i + 1} and the residual is evaluated at |y_i|.

#include <limits>
#include <span>
#include <vector>

#include "hup/domain.hpp"
#include "hup/quadrature.hpp"

namespace hup {

struct LiftPlan {
  OrthantSpec spec;
  std::vector<int> l;  // per axis; 0 off the walls

  int total_l() const;
  /// n + 2 |l|.
  int lifted_dim() const;
  /// prod over wall axes of |S^{2 l_i}|.
  double sphere_factor() const;
  /// Offset of the block of wall axis i inside a lifted point.
  std::size_t block_offset(std::size_t axis) const;
};

inline constexpr int kMaxLiftedDim = 12;

LiftPlan make_lift_plan(const OrthantSpec& spec, std::vector<int> l);
/// l_i = a_i / 2 on the walls; every a_i must be an even integer.
LiftPlan make_lift_plan(const OrthantSpec& spec, const WeightExponents& a);
/// l = the field's wall exponents.
LiftPlan lift_plan_for(const TestField& u);

/// (x', |y_1|, ..., |y_k|).
std::vector<double> project_point(const LiftPlan& plan, std::span<const double> z);

/// v(x', |y_1|, ...), v the field's residual.
double lifted_eval(const TestField& u, const LiftPlan& plan, std::span<const double> z);
/// Same, writing the lifted gradient into grad (size lifted_dim).
double lifted_eval(const TestField& u, const LiftPlan& plan, std::span<const double> z, std::span<double> grad);

struct LiftCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |lhs - rhs| / (1 + |rhs|)
  bool cartesian = false;
  double cartesian_lhs = std::numeric_limits<double>::quiet_NaN();
  double cartesian_gap = std::numeric_limits<double>::quiet_NaN();  // vs the radial lhs
  // Gradient formula only: rhs with l(l-1) u^2 / x_i^2 not multiplied by |x|^{2b}.
  double rhs_unweighted = std::numeric_limits<double>::quiet_NaN();
};

enum class CartesianCheck { Auto, Off, On };

struct LiftConfig {
  QuadratureConfig quad;
  CartesianCheck cartesian = CartesianCheck::Auto;
  int cartesian_order = 40;   // per Gaussian axis
  int cartesian_panels = 4;   // per bump axis
};

/// int v~^2 against prod |S^{2 l_i}| int u^2.
LiftCheck verify_mass_lift(const TestField& u, const LiftPlan& plan, const LiftConfig& cfg = {});
/// int |z|^{2a} v~^2 against prod |S^{2 l_i}| int |x|^{2a} u^2, a >= 0.
LiftCheck verify_moment_lift(const TestField& u, const LiftPlan& plan, double a, const LiftConfig& cfg = {});
/// Weighted gradient formula for fields supported away from the walls, b in {0, 1}:
/// |S|^{-1} int |z|^{2b} |grad v~|^2 against
/// int |x|^{2b} (|grad u|^2 + sum l_i (l_i - 1) u^2 / x_i^2) + 2 b |l| |x|^{2b-2} u^2.
LiftCheck verify_gradient_lift(const TestField& u, const LiftPlan& plan, int b, const LiftConfig& cfg = {});
/// int v~ (z . grad v~) against |S^2|^k int (u/w) x . grad(u/w) w^2, all l_i = 1.
LiftCheck verify_dilation_pairing(const TestField& u, const LiftPlan& plan, const LiftConfig& cfg = {});

/// Whether v~ is smooth across y_i = 0, so a Cartesian grid converges fast.
bool has_smooth_lift(const TestField& u);

}  // namespace hup
