#include "kintran/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace kintran {

double mass_shell_v0(double m, const Vec& v) {
  if (m < 0) throw std::domain_error("mass_shell_v0: negative mass");
  const double vv = v.squaredNorm();
  if (m == 0.0 && vv < 1e-24) throw std::domain_error("mass_shell_v0: massless shell excludes v = 0");
  return std::sqrt(m * m + vv);
}

PhasePoint make_phase_point(double t, Vec x, Vec v, double m) {
  if (x.size() != v.size() || x.size() < 1 || x.size() > 4)
    throw std::invalid_argument("make_phase_point: bad dimensions");
  PhasePoint p;
  p.t = t;
  p.x = std::move(x);
  p.v = std::move(v);
  p.m = m;
  p.v0 = mass_shell_v0(m, p.v);
  return p;
}

double hyperboloid_rho(double t, const Vec& x) {
  const double q = t * t - x.squaredNorm();
  if (!(t > 0) || !(q > 0)) throw std::domain_error("hyperboloid_rho: point not inside the future cone");
  return std::sqrt(q);
}

Vec hyperboloid_normal(double t, const Vec& x) {
  const double rho = hyperboloid_rho(t, x);
  Vec nu(x.size() + 1);
  nu(0) = t / rho;
  nu.tail(x.size()) = x / rho;
  return nu;
}

Vec pseudo_cartesian_forward(double t, const Vec& x) {
  Vec y(x.size() + 1);
  y(0) = hyperboloid_rho(t, x);
  y.tail(x.size()) = x;
  return y;
}

void pseudo_cartesian_inverse(const Vec& y, double& t, Vec& x) {
  if (y.size() < 2) throw std::invalid_argument("pseudo_cartesian_inverse: bad chart point");
  const double rho = y(0);
  if (!(rho > 0)) throw std::domain_error("pseudo_cartesian_inverse: rho must be positive");
  x = y.tail(y.size() - 1);
  t = std::sqrt(rho * rho + x.squaredNorm());
}

double FoliationLeaf::time_at(const Vec& xp) const {
  if (kind == Kind::fixed_time) return param;
  return std::sqrt(param * param + xp.squaredNorm());
}

double FoliationLeaf::integrate(const std::function<double(double, const Vec&)>& f) const {
  double s = 0.0;
  for (const auto& node : nodes) s += node.w * f(time_at(node.x), node.x);
  return s;
}

FoliationLeaf build_leaf(FoliationLeaf::Kind kind, double param, int n, double r_lo, double r_hi,
                         const QuadratureSpec& q) {
  if (n < 1 || n > 4) throw std::invalid_argument("build_leaf: dimension out of range");
  if (!(r_hi > r_lo) || r_lo < 0) throw std::invalid_argument("build_leaf: bad radial window");
  if (kind == FoliationLeaf::Kind::hyperboloid && !(param >= 1))
    throw std::invalid_argument("build_leaf: hyperboloid parameter must be >= 1");
  FoliationLeaf leaf;
  leaf.kind = kind;
  leaf.param = param;
  leaf.n = n;
  leaf.r_lo = r_lo;
  leaf.r_hi = r_hi;
  leaf.radial = q.radial;
  leaf.angular = q.angular;
  const Rule1D rr = gauss_legendre(q.radial, r_lo, r_hi);
  const SphereRule sph = sphere_rule(n, q.angular);
  for (std::size_t i = 0; i < rr.x.size(); ++i) {
    const double r = rr.x[i];
    double w = rr.w[i];
    for (int k = 0; k < n - 1; ++k) w *= r;
    if (kind == FoliationLeaf::Kind::hyperboloid)
      w *= param / std::sqrt(param * param + r * r);
    for (std::size_t j = 0; j < sph.omega.size(); ++j)
      leaf.nodes.push_back({r * sph.omega[j], w * sph.w[j]});
  }
  return leaf;
}

FoliationLeaf build_leaf_hyperboloid_u(double rho, int n, double u_lo, double u_hi,
                                       const QuadratureSpec& q) {
  if (n < 1 || n > 4) throw std::invalid_argument("build_leaf_hyperboloid_u: dimension out of range");
  if (!(rho >= 1)) throw std::invalid_argument("build_leaf_hyperboloid_u: rho must be >= 1");
  if (!(0 < u_lo) || !(u_lo < u_hi) || !(u_hi <= rho))
    throw std::invalid_argument("build_leaf_hyperboloid_u: need 0 < u_lo < u_hi <= rho");
  FoliationLeaf leaf;
  leaf.kind = FoliationLeaf::Kind::hyperboloid;
  leaf.param = rho;
  leaf.n = n;
  leaf.r_lo = (rho * rho / u_hi - u_hi) / 2;
  leaf.r_hi = (rho * rho / u_lo - u_lo) / 2;
  leaf.radial = q.radial;
  leaf.angular = q.angular;
  const Rule1D uu = gauss_legendre(q.radial, u_lo, u_hi);
  const SphereRule sph = sphere_rule(n, q.angular);
  for (std::size_t i = 0; i < uu.x.size(); ++i) {
    const double u = uu.x[i];
    const double r = (rho * rho / u - u) / 2;
    if (r <= 0) continue;
    const double t = r + u;
    const double jac = (rho * rho / (u * u) + 1) / 2;  // |dr/du|
    double w = uu.w[i] * jac * rho / t;
    for (int k = 0; k < n - 1; ++k) w *= r;
    for (std::size_t j = 0; j < sph.omega.size(); ++j)
      leaf.nodes.push_back({r * sph.omega[j], w * sph.w[j]});
  }
  return leaf;
}

}  // namespace kintran
