#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kintran/datum.hpp"
#include "kintran/fields.hpp"
#include "kintran/geometry.hpp"
#include "kintran/multiindex.hpp"
#include "kintran/waves.hpp"

namespace kintran {

// ---------------------------------------------------------------------------
// Transport laws and distribution fields
// ---------------------------------------------------------------------------

// The solution operators realized here, all pointwise-evaluable:
//   free_massive / free_massless   T_m f = 0 with data on a surface
//   duhamel                        T_m f = v0 h with zero data at t = 0
//   vn_massless                    massless transport forced by a wave field
//   vn_massive                     massive transport forced by a wave field
enum class TransportLaw { free_massive, free_massless, duhamel, vn_massless, vn_massive };

std::string law_name(TransportLaw law);

// Surface carrying the datum: the slice {t = 0} or the unit hyperboloid
// H_1 = {t^2 - |x|^2 = 1, t > 0} (data parametrized by the spatial chart y).
enum class DatumSurface { t0, h1 };

// Volume source h(s, x, v) for the inhomogeneous law.
using PhaseSource = std::function<double(double, const Vec&, const Vec&)>;

struct DistributionField {
  TransportLaw law = TransportLaw::free_massive;
  DatumSurface surface = DatumSurface::t0;
  int n = 3;       // spatial dimension
  double m = 1.0;  // particle mass (0 for the massless laws)

  std::shared_ptr<const Datum> datum;       // data on the declared surface
  std::shared_ptr<const WaveField> phi;     // forcing field (vn laws; null = vacuum)
  PhaseSource source;                       // volume source (duhamel law)

  // For h1-surface fields produced by h1_trace: the originating t = 0 datum
  // and the time t of that slice in the ambient frame (the data are the trace
  // on H_1 of the free solution whose t = time_shift slice equals base_datum).
  std::shared_ptr<const Datum> base_datum;
  double time_shift = 0.0;

  // Declared support bounds (when known): outer radii in x and v about the
  // origin of the datum's chart.  Certified by support_certificate.
  std::optional<double> x_radius;
  std::optional<double> v_radius;

  int dim() const { return n; }
  bool massless() const { return law == TransportLaw::free_massless || law == TransportLaw::vn_massless; }
};

DistributionField make_free_field(std::shared_ptr<const Datum> datum, double m);
DistributionField make_duhamel_field(PhaseSource source, double m, int n);
DistributionField make_vn_massless_field(std::shared_ptr<const Datum> datum,
                                         std::shared_ptr<const WaveField> phi);
// Attach a forcing field to an h1-surface free field (from h1_trace).
DistributionField make_vn_massive_field(const DistributionField& h1_free,
                                        std::shared_ptr<const WaveField> phi);

// The vacuum forcing field of the given dimension (value identically zero).
const WaveField& zero_wave(int n);

// Max |datum| found by sampling outside the declared decay radii at the given
// tolerance (compact classes: outside the exact support).  A sound datum
// returns at most tol.
double support_certificate(const DistributionField& F, double tol = 1e-10, int samples = 256,
                           unsigned seed = 1);

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

struct IntegratorConfig {
  double abs_tol = 1e-10;   // per-step absolute tolerance of the embedded pair
  double rel_tol = 1e-10;   // per-step relative tolerance
  double v_floor = 1e-12;   // massless laws abort below this |v|
  double event_tol = 1e-12; // bisection width for surface-crossing events
  int max_steps = 1000000;  // step budget before a tolerance failure is reported
};

struct CharacteristicRecord {
  PhasePoint endpoint;   // where the value was requested
  PhasePoint footpoint;  // where the characteristic meets the datum surface
  double factor = 1.0;   // accumulated multiplicative factor (1 for free laws)
  int steps = 0;         // accepted integrator steps (0 for closed forms)
  double abs_tol = 0.0;  // error budget the step controller enforced
  double rel_tol = 0.0;
};

struct VnValue {
  double value = 0.0;
  CharacteristicRecord record;
};

// ---------------------------------------------------------------------------
// Free and inhomogeneous laws (closed-form characteristics)
// ---------------------------------------------------------------------------

// f(t,x,v) = datum(x - (v/v0) t, v) for t = 0 data; for h1 data the straight
// characteristic is intersected with H_1 and the datum read off there.
double free_evolve(const DistributionField& F, const PhasePoint& p);

// The intersection of the straight characteristic through p with the datum
// surface (exact; quadratic solve for H_1).
PhasePoint free_footpoint(const DistributionField& F, const PhasePoint& p);

CharacteristicRecord free_characteristic(const DistributionField& F, const PhasePoint& p);

// f(t,x,v) = int_0^t h(s, x - (t-s) v/v0, v) ds with zero data at t = 0.
double duhamel_evolve(const PhaseSource& h, double m, const PhasePoint& p, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Exact symbolic derivatives of free solutions (lifted words)
// ---------------------------------------------------------------------------

// Z^alpha f for a free law F and a word alpha over the lifted catalog of its
// algebra: the word is expanded through the footpoint map into datum
// derivatives with on-shell rational coefficients, so no time derivative of
// the datum is ever synthesized numerically (a d_t falling on the datum is
// rewritten along the equation as -(v^i/v0) d_{x^i}).
class LiftedExpansion {
 public:
  // Z^alpha f at p (builds the datum derivative table at the footpoint).
  double operator()(const PhasePoint& p) const;

  // Highest datum derivative order the expansion contracts with.
  int datum_order() const;

  // Advanced/batched evaluation: the expansion works in a frame whose time
  // coordinate is t - time_shift (nonzero only for h1-surface laws).
  PhasePoint frame_point(const PhasePoint& p) const;
  // Argument fed to the base datum, given a frame point.
  Vec footpoint_x(const PhasePoint& frame) const;
  // Contract a caller-built derivative table (at the footpoint) with the
  // coefficients evaluated at the frame point.
  double eval_with(const DerivTable& tab, const PhasePoint& frame) const;

  const Datum& base_datum() const;
  double time_shift() const;

 private:
  friend LiftedExpansion lift_word(const DistributionField&, const MultiIndex&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

LiftedExpansion lift_word(const DistributionField& F, const MultiIndex& alpha);

double lifted_solution(const DistributionField& F, const MultiIndex& alpha, const PhasePoint& p);

// Exact rational square of the mass used by the symbolic catalogs; throws
// invalid_argument unless m^2 is representable in 64ths.
Rat exact_shell_mass_sq(double m);

// ---------------------------------------------------------------------------
// Wave-forced transport (Vlasov-Nordstrom laws)
// ---------------------------------------------------------------------------

// Massless forced transport: integrates dx/dt = v/|v|, dv/dt = -(T0(phi)/|v|) v
// backward to t = 0 and returns datum(x0, v0) * e^{(n+1)(phi(t,x) - phi(0,x0))},
// the conjugation that removes the right-hand side of the forced equation.
VnValue evolve_vn_massless(const WaveField& phi, const DistributionField& F, const PhasePoint& p,
                           const IntegratorConfig& cfg = {});

// Massive forced transport from H_1 data: integrates dx^mu/dlambda = v^mu,
// dv^i/dlambda = -(T_m(phi) v^i + m^2 d_i phi) backward until t^2 - |x|^2 = 1
// (crossing located by bisection) and returns
// datum(footpoint) * e^{(n+1)(phi(end) - phi(foot))}.
VnValue evolve_vn_massive_prescribed(const WaveField& phi, const DistributionField& F,
                                     const PhasePoint& p, const IntegratorConfig& cfg = {});

// The point of the forced characteristic through p at time t_target (same
// dynamics as the evolvers; used to probe invariants along characteristics).
PhasePoint characteristic_point(const WaveField& phi, const PhasePoint& p, double t_target,
                                const IntegratorConfig& cfg = {});

// Dispatch on F.law (vn laws use F.phi, or the vacuum field when unset).
double evaluate(const DistributionField& F, const PhasePoint& p);

// ---------------------------------------------------------------------------
// Trace on the unit hyperboloid
// ---------------------------------------------------------------------------

struct H1Trace {
  DistributionField field;      // free massive law with datum on H_1
  double support_radius = 0.0;  // certified outer radius |y| <= R of the trace
  double exterior_sup = 0.0;    // largest |trace| seen outside (0 for a sound trace)
  int exterior_samples = 0;
};

// Time-translate a compactly x-supported t = 0 datum so its slice sits at
// t = sqrt(1 + R^2), take the trace of the free solution on H_1 (supported in
// {|y| <= R}), and certify the support by exterior sampling.
H1Trace h1_trace(const DistributionField& F, int exterior_samples = 1000, unsigned seed = 7);

// ---------------------------------------------------------------------------
// Forced-transport commutation residual
// ---------------------------------------------------------------------------

// T_phi g = T_0 g - T_0(phi) v^i d_{v^i} g at p (massless shell), with g's
// partials taken from g.d1 when present, else by central differences.
double forced_transport(const WaveField& phi, const PhaseFunction& g, const PhasePoint& p);

// Residual of the commutation identity
//   [T_phi, Z] f = c_Z T_phi f + T_0(Z phi) v^i d_{v^i} f
// for Z in the massless commuting family (c_Z = 1 for the plain scaling,
// else 0), evaluated on a smooth f by nested differentiation.
double forced_commutator_residual(const WaveField& phi, const LiftedField& Z,
                                  const PhaseFunction& f, const PhasePoint& p);

}  // namespace kintran
