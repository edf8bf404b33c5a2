#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kintran/datum.hpp"
#include "kintran/fields.hpp"
#include "kintran/geometry.hpp"

namespace kintran {

// ---------------------------------------------------------------------------
// Scalar fields on spacetime with exact partial derivatives
// ---------------------------------------------------------------------------

// Common face of exact wave solutions and manufactured (non-solution) fields:
// closed-form values and coordinate partials up to a declared order.  The
// derivative multi-index runs over (t, x^1..x^n).
class ScalarSpacetimeField {
 public:
  virtual ~ScalarSpacetimeField() = default;
  virtual int dim() const = 0;
  virtual int max_order() const = 0;
  virtual double value(double t, const Vec& x) const = 0;
  virtual DerivTable derivatives(double t, const Vec& x, int order) const = 0;
};

// phi = A cos(w t - xi.x + theta), w = |xi| by construction.
struct PlaneModeSpec {
  double amplitude = 1.0;
  std::vector<double> xi;  // wave covector, size n, nonzero
  double theta = 0.0;
};

// phi = (F(t-r) - F(t+r))/r in n = 3, extended smoothly through r = 0;
// F(s) = A * exp(-1/(u(1-u))), u = (s - s0)/width, supported on (s0, s0+width).
// With outgoing_only, phi = F(t-r)/r (single profile piece, singular at r=0).
struct RadialModeSpec {
  double amplitude = 1.0;
  double s0 = 2.0;
  double width = 1.0;
  bool outgoing_only = false;
};

struct WaveSpec {
  int n = 3;
  int max_order = 12;  // largest supported total derivative order
  std::vector<PlaneModeSpec> plane;
  std::vector<RadialModeSpec> radial;  // n == 3 only
};

// Exact solution of the free wave equation: a superposition of plane modes
// and (in n = 3) radial modes.
class WaveField final : public ScalarSpacetimeField {
 public:
  explicit WaveField(WaveSpec spec);

  int dim() const override { return spec_.n; }
  int max_order() const override { return spec_.max_order; }
  const WaveSpec& spec() const { return spec_; }

  // true when every mode has spatially localized energy (no plane modes)
  bool localized() const { return spec_.plane.empty() && !spec_.radial.empty(); }

  // hull of the radial profile supports in the argument s of F (the field is
  // nonzero only where t-r or t+r lies in this window); nullopt if plane
  // modes are present or there are no radial modes
  std::optional<std::array<double, 2>> profile_window() const;

  double value(double t, const Vec& x) const override;
  DerivTable derivatives(double t, const Vec& x, int order) const override;

 private:
  WaveSpec spec_;
};

// Manufactured smooth field A exp(-a(t-t0)^2 - b|x|^2); not a wave solution.
// Used to exercise energy-flux bookkeeping with a nonzero source box(psi).
class GaussianBlobField final : public ScalarSpacetimeField {
 public:
  GaussianBlobField(int n, double amplitude, double a, double t0, double b);

  int dim() const override { return n_; }
  int max_order() const override { return 12; }
  double value(double t, const Vec& x) const override;
  DerivTable derivatives(double t, const Vec& x, int order) const override;

 private:
  int n_;
  double amplitude_, a_, t0_, b_;
};

// ---------------------------------------------------------------------------
// Words of spacetime vector fields applied to a scalar field
// ---------------------------------------------------------------------------

// Symbolic expansion of Z_{i1} Z_{i2} ... Z_{ik} (phi) as a combination of
// coordinate partials with polynomial coefficients in (t, x): the word's last
// field acts on phi first.  Evaluation contracts the terms with a derivative
// table of the field.
class SpacetimeWord {
 public:
  static SpacetimeWord identity(int n);
  static SpacetimeWord from_word(const std::vector<BaseField>& catalog,
                                 const std::vector<int>& seq, int n);

  // expansion of Z applied to (this word)(phi)
  SpacetimeWord apply(const BaseField& Z) const;
  // expansion of the coordinate partial d_mu (mu = 0 is t) of (this word)(phi)
  SpacetimeWord partial(int mu) const;

  int dim() const { return n_; }
  int derivative_order() const;
  std::size_t term_count() const { return terms_.size(); }

  double eval(const ScalarSpacetimeField& phi, double t, const Vec& x) const;
  double eval_with(const DerivTable& tab, double t, const Vec& x) const;

 private:
  explicit SpacetimeWord(int n) : n_(n) {}
  struct Term {
    Poly coeff;     // polynomial in (t, x); velocity slots unused
    Jet::Key beta;  // derivative multi-index over (t, x^1..x^n)
  };
  int n_ = 0;
  std::vector<Term> terms_;
};

// Z^alpha phi at a point, alpha a multi-index over a base spacetime catalog.
double eval_z_alpha_phi(const ScalarSpacetimeField& phi, const std::vector<BaseField>& catalog,
                        const std::vector<int>& seq, double t, const Vec& x);

// ---------------------------------------------------------------------------
// Transport coupling and null decomposition
// ---------------------------------------------------------------------------

// T_m(phi) = v^0 dt(phi) + v.grad(phi) at the phase point (v^0 per its mass).
double transport_of_phi(const ScalarSpacetimeField& phi, const PhasePoint& p);

// The three-term splitting of T_0(phi): outgoing derivatives, the
// cone-combination term carrying rotations/boosts/scaling over t+r, and the
// term weighted by the momenta z^i = v^i t - x^i v^0.
struct NullDecomposition {
  double outgoing = 0.0;
  double rotational_boost = 0.0;
  double z_weighted = 0.0;
  double sum() const { return outgoing + rotational_boost + z_weighted; }
};
NullDecomposition null_decomposition(const ScalarSpacetimeField& phi, const PhasePoint& p);

// ---------------------------------------------------------------------------
// Hyperboloidal wave energy
// ---------------------------------------------------------------------------

// T[psi](dt, nu_rho) in completed-square form: every term is nonnegative on
// the hyperboloid (r < t), so the density is pointwise >= 0.
double wave_energy_density(double rho, double t, const Vec& x, double psi_t, const Vec& psi_x);

struct WaveEnergyReport {
  double rho = 0.0;
  int order = 0;
  double value = 0.0;
  double truncation_tail = 0.0;  // boundary-density indicator for the leaf cutoffs
  struct Row {
    std::string word;
    double contribution = 0.0;
  };
  std::vector<Row> rows;
};

// Support-adapted leaf in the retarded coordinate u = t - r for a localized
// field on H_rho; throws std::invalid_argument for non-localized fields.
FoliationLeaf wave_energy_leaf(const WaveField& phi, double rho, const QuadratureSpec& q);

// E_N[phi](rho) = sum over words |alpha| <= N of integral of
// T[Z^alpha phi](dt, nu_rho) dmu over the leaf, words over the Poincare catalog.
WaveEnergyReport wave_energy_hyperboloid(const ScalarSpacetimeField& phi, int N, double rho,
                                         const FoliationLeaf& leaf);

// integral over the leaf of (dt psi)(box psi) dmu  (source moment of the flux identity)
double wave_source_moment(const ScalarSpacetimeField& phi, const FoliationLeaf& leaf);

// box(phi) = (-dt^2 + laplacian) phi from an order >= 2 derivative table
double wave_operator(const DerivTable& tab, int n);

// ---------------------------------------------------------------------------
// Pointwise decay checks
// ---------------------------------------------------------------------------

struct WaveDecayReport {
  // sup over samples and words |alpha| <= N of |d Z^alpha phi| t^{(n-1)/2} (t-r)^{1/2},
  // divided by sqrt(E_N[phi](1))
  double sup_weighted_gradient = 0.0;
  // sup over samples of |phi| t^{(n-1)/2} / (t-r)^{1/2}, divided by sqrt(E_0[phi](1))
  double sup_null_line = 0.0;
  double energy_N = 0.0;
  double energy_0 = 0.0;
};

// Sample points must satisfy t > |x| > 0; plane modes are rejected
// (infinite energy).
WaveDecayReport wave_decay_checks(const WaveField& phi, int N,
                                  const std::vector<std::pair<double, Vec>>& samples,
                                  const QuadratureSpec& q);

}  // namespace kintran
