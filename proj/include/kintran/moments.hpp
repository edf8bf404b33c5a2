#pragma once

#include <functional>
#include <vector>

#include "kintran/fields.hpp"
#include "kintran/geometry.hpp"
#include "kintran/kinetic.hpp"
#include "kintran/quadrature.hpp"

namespace kintran {

// Velocity-space measure against which the evolved distribution is averaged:
//   mu_measure : dv / v0                      (invariant shell measure)
//   energy     : v0 dv                        (energy density; |v| dv when m = 0)
//   momentum   : v^{mu_1}...v^{mu_p} dv / v0  (particle vector, stress energy,
//                                              higher moments; empty product
//                                              reduces to mu_measure)
// An optional bounded smooth `scale` multiplies the chosen measure.
enum class MomentWeight { mu_measure, energy, momentum };

struct MomentSpec {
  MomentWeight weight = MomentWeight::energy;
  std::vector<int> momenta;  // shell indices in 0..n, used by `momentum`
  bool absolute = false;     // integrate |f| instead of f
  std::function<double(const PhasePoint&)> scale;
  double scale_bound = 1.0;  // sup of |scale| over the fiber, used by tail accounting
  QuadratureSpec quad;
  // Forced transport moves the v-support of compactly supported data by a
  // bounded conformal factor; the truncation radius must dominate the datum
  // support radius by this margin for the reported zero tail to be valid.
  // Raise it for strong or long-exposure waves.
  double vn_support_margin = 2.0;
  // Reported tail bounds above tail_tol * (1 + |value|) raise a truncation
  // error instead of returning a silently untrustworthy value.
  double tail_tol = 1e-7;
};

struct MomentValue {
  double value = 0.0;
  // Bound on the neglected mass beyond the truncation radius: analytic for
  // datum-backed laws (decay-class tail integrals, exact zero for compact
  // support), sampled at the outermost quadrature shell for source-backed
  // (Duhamel) laws.
  double tail_bound = 0.0;
};

// Quadrature of the evolved distribution over the shell fiber at (t, x)
// against the requested weight.  Gauss nodes are mapped to the ball of
// radius quad.v_radius by a polar substitution; the explicit r^{n-1}
// Jacobian makes the massless dv/|v| measure integrable for n >= 2.  In
// n = 1 a bare dv/|v| weight requires data vanishing near v = 0 and is
// rejected otherwise.  Node order is fixed, results are reproducible.
MomentValue velocity_average(const DistributionField& F, const MomentSpec& spec, double t,
                             const Vec& x);

// Same quadrature for a caller-supplied fiber density (e.g. a sum of exact
// derivatives of the field) in place of the field value; weight, scale and
// the absolute flag still apply on top of it.  The analytic decay-class tail
// integral certifies only the field itself, so the reported bound here is
// exact zero when the datum v-support is compact and inside the quadrature
// ball (free characteristics preserve v), the sampled outer-shell estimate
// otherwise; the forced-law support-margin rule is unchanged.
using PhaseDensity = std::function<double(const PhasePoint&)>;
MomentValue velocity_average_of(const DistributionField& F, const PhaseDensity& density,
                                const MomentSpec& spec, double t, const Vec& x);

// chi(f) = int f (t v0 - x.v)/rho dv with rho = sqrt(t^2 - |x|^2): the energy
// density measured against the unit normal of the hyperboloid through (t, x).
// Requires t > |x|.
double chi_m(const DistributionField& F, const QuadratureSpec& q, double t, const Vec& x,
             bool absolute = false);

// T^{mu nu} = int f v^mu v^nu dv/v0, indices in 0..n.
double stress_energy(const DistributionField& F, int mu, int nu, const QuadratureSpec& q, double t,
                     const Vec& x);

// |d_mu T^{mu nu}| with the spacetime divergence taken by central finite
// differences of the averaged tensor; vanishes on solutions of the
// homogeneous transport equation.
double divergence_residual(const DistributionField& F, int nu, const QuadratureSpec& q, double t,
                           const Vec& x);

// Residual of the averaging commutation identity for a symmetry generator Z
// taken from base_catalog (P for massive laws, K for massless ones):
//   translations, rotations:  Z[rho(f)] = rho(Z^hat f)
//   boosts Om_0i:             Z[rho(f)] = rho(Z^hat f) + 2 rho((v^i/v0) f)
//   scaling S (m = 0 only):   S[rho(f)] = rho(S^hat f) + (n+1) rho(f)
// The left side differentiates the average by central differences; the right
// side integrates the exact lifted derivative of the free solution.
double average_commutation_residual(const DistributionField& F, const BaseField& Z,
                                    const QuadratureSpec& q, double t, const Vec& x);

}  // namespace kintran
