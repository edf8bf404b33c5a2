#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kintran/quadrature.hpp"

namespace kintran {

using Vec = Eigen::VectorXd;

// A point of the mass shell over Minkowski space R^{1+n}: v0 is determined
// by (m, v) and cached.  Metric signature (-,+,...,+); v_0 = -v0, v_i = v^i.
struct PhasePoint {
  double t = 0.0;
  Vec x;
  Vec v;
  double m = 0.0;
  double v0 = 0.0;

  int dim() const { return static_cast<int>(x.size()); }
};

// sqrt(m^2 + |v|^2); the massless shell excludes v = 0.
double mass_shell_v0(double m, const Vec& v);

PhasePoint make_phase_point(double t, Vec x, Vec v, double m);

// rho = sqrt(t^2 - |x|^2) for points inside the future light cone.
double hyperboloid_rho(double t, const Vec& x);

// Future unit normal of H_rho at (t,x): (t/rho, x/rho).
Vec hyperboloid_normal(double t, const Vec& x);

// Pseudo-Cartesian chart (y^0, y) = (rho, x) and its inverse.
Vec pseudo_cartesian_forward(double t, const Vec& x);   // size n+1
void pseudo_cartesian_inverse(const Vec& y, double& t, Vec& x);

// Quadrature realization of a spatial slice Sigma_t or a hyperboloid H_rho,
// restricted to the radial window [r_lo, r_hi].  Node weights carry the full
// induced measure: r^{n-1} dr dsigma on Sigma_t and (rho/t) r^{n-1} dr dsigma
// on H_rho.  Integration order over nodes is fixed, so results are
// bit-for-bit reproducible.
struct LeafNode {
  Vec x;
  double w;
};

struct FoliationLeaf {
  enum class Kind { fixed_time, hyperboloid };
  Kind kind = Kind::fixed_time;
  double param = 0.0;  // t or rho
  int n = 0;
  double r_lo = 0.0, r_hi = 0.0;
  int radial = 0, angular = 0;
  std::vector<LeafNode> nodes;

  double time_at(const Vec& x) const;
  double integrate(const std::function<double(double, const Vec&)>& f) const;
};

FoliationLeaf build_leaf(FoliationLeaf::Kind kind, double param, int n, double r_lo, double r_hi,
                         const QuadratureSpec& q);

// Hyperboloid leaf sampled in the retarded coordinate u = t - r (useful when
// the integrand hugs the light cone): r(u) = (rho^2/u - u)/2, u in (0, rho].
FoliationLeaf build_leaf_hyperboloid_u(double rho, int n, double u_lo, double u_hi,
                                       const QuadratureSpec& q);

}  // namespace kintran
