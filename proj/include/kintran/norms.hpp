#pragma once

#include <string>
#include <vector>

#include "kintran/geometry.hpp"
#include "kintran/kinetic.hpp"
#include "kintran/moments.hpp"

namespace kintran {

// Global norms of a distribution field, realized as leaf quadratures of the
// inner velocity averages:
//   K               sum_{|a| <= k} int_{Sigma_t} rho_0(|Z^a f|) dx        (m = 0)
//   P               sum_{|a| <= k} int_{H_rho} chi(|Z^a f|) dmu           (m > 0)
//   ENq             K strengthened by products of flow-constant weights
//   EN_massive_vn   chi((v0)^2 |Z^a f|) for |a| <= floor(N/2) plus
//                   chi(|Z^a f|) for the higher orders                    (m = 1)
//   L2_hyperboloid  int_{H_rho} (t/rho) (int |Z^a f| dv/v0)^2 dmu, one word
// Derivative words run over the catalog of the field's symmetry algebra
// (conformal for massless laws, Poincare for massive ones), enumerated as
// exponent multi-indices so each distinct composition is counted once.
enum class NormFamily { K, P, ENq, EN_massive_vn, L2_hyperboloid };

std::string norm_family_name(NormFamily family);
NormFamily norm_family_from_name(const std::string& name);

// Quadrature realization of a norm.  The leaf kind is fixed by the family
// (fixed-time slices for K/ENq, hyperboloids for the rest); the caller picks
// the radial window and node counts.  Of `moment`, only the velocity
// quadrature, the forced-law support margin and the truncation tolerance are
// consulted; weight, scale and absolute-value handling are fixed by the
// family.  Laws without exact lifted derivatives (Duhamel, forced transport)
// are differentiated by nested central differences, with the word length
// capped at fd_budget.
struct NormSpec {
  NormFamily family = NormFamily::K;  // consulted by evaluate_norm only
  int order = 0;                      // k or N       (evaluate_norm only)
  int weight_order = 0;               // q for ENq    (evaluate_norm only)
  std::vector<int> word;              // L2 word      (evaluate_norm only)

  double r_lo = 0.0;  // leaf radial window
  double r_hi = 12.0;
  QuadratureSpec leaf_quad;  // leaf radial/angular counts (v_radius unused)
  MomentSpec moment;         // inner velocity-average settings
  int fd_budget = 2;         // nested-difference word cap for perturbed laws
};

// Norm evaluations report the accumulated truncation budget next to the
// value: the leaf-weighted sum of the inner tail bounds plus a sampled
// estimate of the mass outside the leaf radial window (outermost-ring
// density extended over one more window length).  A budget exceeding
// moment.tail_tol * (1 + |value|) raises a truncation error instead of
// returning silently.
struct NormValue {
  double value = 0.0;
  double tail_bound = 0.0;
  double low_part = 0.0;   // EN_massive_vn: the (v0)^2-weighted block
  double high_part = 0.0;  // EN_massive_vn: the unweighted block
  double leaf_sup = 0.0;   // max over leaf nodes of the integrand density
                           // (L2 family: of (t/rho) int |Z^a f| dv/v0)
  double leaf_l1 = 0.0;    // leaf integral of the inner average
                           // (L2 family: of int |Z^a f| dv/v0)
  long words = 0;          // derivative words summed
};

// sum_{|a| <= k} int_{Sigma_t} rho_0(|Z^a f|) dx over the conformal catalog;
// the field must be massless (free, forced, or source-driven with m = 0).
// Equals norm_ENq with q = 0.
NormValue norm_K(const DistributionField& F, int k, double t, const NormSpec& spec = {});

// sum_{|a| <= k} int_{H_rho} chi(|Z^a f|) dmu over the Poincare catalog for a
// massive law; rho >= 1 when the data live on H_1.
NormValue norm_P(const DistributionField& F, int k, double rho, const NormSpec& spec = {});

// Doubly indexed massless family: derivative words |a| <= N and products of
// |b| <= q flow-constant weights |z|/v0 (both as exponent multi-indices, the
// weight products summed through complete homogeneous symmetric polynomials).
NormValue norm_ENq(const DistributionField& F, int N, int q, double t,
                   const NormSpec& spec = {});

// Mixed-weight hyperboloidal energy of the m = 1 forced system: the orders
// up to floor(N/2) carry an extra (v0)^2 inside chi, the rest enter plainly.
// The two blocks are reported in low_part / high_part.
NormValue norm_EN_massive_vn(const DistributionField& F, int N, double rho,
                             const NormSpec& spec = {});

// int_{H_rho} (t/rho) (int_v |Z^alpha f| dv/v0)^2 dmu for a single word.
// leaf_sup and leaf_l1 report sup (t/rho) I and int I dmu for the inner
// average I, so value <= leaf_sup * leaf_l1 holds node by node.
NormValue l2_hyperboloid(const DistributionField& F, const MultiIndex& alpha, double rho,
                         const NormSpec& spec = {});

// Dispatch on spec.family using spec.order / spec.weight_order / spec.word;
// leaf_param is t or rho as the family demands.
NormValue evaluate_norm(const DistributionField& F, const NormSpec& spec, double leaf_param);

}  // namespace kintran
