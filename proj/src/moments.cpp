#include "kintran/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kintran {

namespace {

// |v|-homogeneity of the weight near v = 0 (and its large-|v| power): the
// shell measure contributes -1, every momentum factor +1.
int weight_power(const MomentSpec& spec) {
  switch (spec.weight) {
    case MomentWeight::mu_measure:
      return -1;
    case MomentWeight::energy:
      return 1;
    case MomentWeight::momentum:
      return static_cast<int>(spec.momenta.size()) - 1;
  }
  throw std::logic_error("moments: unreachable weight kind");
}

// `momenta` arrives sorted so that index order cannot perturb rounding:
// T^{mu nu} and T^{nu mu} are then the same floating-point sum.
double weight_value(const MomentSpec& spec, const std::vector<int>& momenta,
                    const PhasePoint& p) {
  switch (spec.weight) {
    case MomentWeight::mu_measure:
      return 1.0 / p.v0;
    case MomentWeight::energy:
      return p.v0;
    case MomentWeight::momentum: {
      double w = 1.0 / p.v0;
      for (int mu : momenta) w *= (mu == 0) ? p.v0 : p.v(mu - 1);
      return w;
    }
  }
  throw std::logic_error("moments: unreachable weight kind");
}

void validate_spec(const DistributionField& F, const MomentSpec& spec) {
  for (int mu : spec.momenta)
    if (mu < 0 || mu > F.n) throw std::invalid_argument("moments: shell index out of range");
  if (spec.weight != MomentWeight::momentum && !spec.momenta.empty())
    throw std::invalid_argument("moments: momenta list requires the momentum weight");
  if (spec.quad.v_radius <= 0.0 || spec.quad.radial < 2 || spec.quad.angular < 2)
    throw std::invalid_argument("moments: quadrature request is degenerate");
  // Massless integrability: the polar Jacobian supplies r^{n-1}, so the
  // integrand behaves like r^{n-1+q} near v = 0 and is integrable iff
  // n - 1 + q > -1.  Data vanishing near v = 0 lift the restriction.
  if (F.massless() && weight_power(spec) <= -F.n) {
    const bool hole = F.datum && F.datum->v_support_inner() > 0.0;
    if (!hole)
      throw std::invalid_argument(
          "moments: massless dv/|v| weight in this dimension needs data vanishing near v = 0");
  }
}

struct BallSum {
  double value = 0.0;
  double edge_max = 0.0;  // max |integrand density| on the outermost radial ring
};

// Fixed-order quadrature over the v-ball of radius quad.v_radius: Gauss radial
// nodes times a sphere rule, with the polar Jacobian r^{n-1} applied
// explicitly.  `density` receives the velocity node and returns the full
// integrand (distribution times weight times scale).
template <typename Density>
BallSum ball_quadrature(int n, const QuadratureSpec& q, Density&& density) {
  const Rule1D rad = gauss_legendre(q.radial, 0.0, q.v_radius);
  const SphereRule sph = sphere_rule(n, q.angular);
  std::size_t edge = 0;
  for (std::size_t i = 1; i < rad.x.size(); ++i)
    if (rad.x[i] > rad.x[edge]) edge = i;
  BallSum out;
  for (std::size_t ir = 0; ir < rad.x.size(); ++ir) {
    const double r = rad.x[ir];
    const double jac = std::pow(r, n - 1);
    for (std::size_t is = 0; is < sph.omega.size(); ++is) {
      const double den = jac * density(r * sph.omega[is]);
      out.value += rad.w[ir] * sph.w[is] * den;
      if (ir == edge) out.edge_max = std::max(out.edge_max, std::abs(den));
    }
  }
  return out;
}

// int_V^inf r^K e^{-kappa (r - V)} dr for integer K >= 0 (closed form).
double poly_exp_tail(int K, double V, double kappa) {
  double fact = 1.0;  // K! / j! accumulated from j = K downward
  double sum = 0.0;
  for (int j = K; j >= 0; --j) {
    sum += fact * std::pow(V, j) / std::pow(kappa, K - j + 1);
    fact *= static_cast<double>(j);
  }
  return sum;
}

double integral_r_pow(int K, double a, double b) {
  if (K == -1) return std::log(b / a);
  return (std::pow(b, K + 1) - std::pow(a, K + 1)) / static_cast<double>(K + 1);
}

// Analytic bound on int_{|v|>V} |f w scale| dv from the datum's declared
// decay class; `K` is n - 1 + (weight power), `wbound` bounds the weight and
// scale over the tail divided by r^{q}.
double datum_tail_bound(const Datum& d, int n, double V, int K, double wbound) {
  const double area = sphere_area(n);
  switch (d.v_decay()) {
    case DecayClass::compact_support: {
      const double outer = d.v_support_outer();
      if (outer <= V) return 0.0;
      return area * wbound * d.sup_tail_v(V) * integral_r_pow(std::max(K, -1), V, outer);
    }
    case DecayClass::gaussian: {
      const double g0 = d.sup_tail_v(V);
      if (g0 <= 0.0) return 0.0;
      const double g1 = d.sup_tail_v(V + 1.0);
      const double piece1 = g0 * integral_r_pow(K, V, V + 1.0);
      if (g1 <= 0.0) return area * wbound * piece1;
      const double kappa = std::log(g0 / g1);
      // The Gaussian sup-tail is log-concave, so its log-slope beyond V+1
      // dominates the average slope kappa probed on [V, V+1]; kappa <= 0
      // means the truncation radius sits before the decay sets in.
      if (!(kappa > 0.0)) return std::numeric_limits<double>::infinity();
      const double piece2 =
          (K >= 0) ? g1 * poly_exp_tail(K, V + 1.0, kappa) : g1 / ((V + 1.0) * kappa);
      return area * wbound * (piece1 + piece2);
    }
    case DecayClass::power_law:
      throw std::invalid_argument("moments: no analytic tail bound for power-law v-decay");
  }
  throw std::logic_error("moments: unreachable decay class");
}

// Bound on |weight * scale| / r^q over the tail r >= V.
double weight_tail_factor(const MomentSpec& spec, double m, double V) {
  const int p = static_cast<int>(spec.momenta.size());
  double c = 1.0;
  switch (spec.weight) {
    case MomentWeight::mu_measure:
      c = 1.0;
      break;
    case MomentWeight::energy:
      c = 1.0 + m / V;
      break;
    case MomentWeight::momentum:
      c = std::pow(1.0 + m / V, std::max(p, 1));
      break;
  }
  return c * spec.scale_bound;
}

double tail_bound_for(const DistributionField& F, const MomentSpec& spec, double sampled) {
  const double V = spec.quad.v_radius;
  const int K = F.n - 1 + weight_power(spec);
  switch (F.law) {
    case TransportLaw::free_massless:
    case TransportLaw::free_massive: {
      const double analytic =
          datum_tail_bound(*F.datum, F.n, V, K, weight_tail_factor(spec, F.m, V));
      return std::max(analytic, sampled);
    }
    case TransportLaw::duhamel:
      // Source-backed laws carry no decay certificate: report the sampled
      // outer-shell magnitude extended over one more truncation length.
      return sampled;
    case TransportLaw::vn_massless:
    case TransportLaw::vn_massive: {
      if (F.datum->v_decay() != DecayClass::compact_support)
        throw std::invalid_argument(
            "moments: forced-law averages need compactly supported v data");
      if (V < spec.vn_support_margin * F.datum->v_support_outer())
        return std::numeric_limits<double>::infinity();
      return sampled;
    }
  }
  throw std::logic_error("moments: unreachable law");
}

// Tail model for caller-supplied densities, where no decay-class integral is
// available: compact datum v-support inside the ball is still exact (free
// characteristics preserve v, so every derivative word shares the support),
// anything else falls back on the sampled outer-shell estimate.
double generic_tail_bound(const DistributionField& F, const MomentSpec& spec, double sampled) {
  const double V = spec.quad.v_radius;
  switch (F.law) {
    case TransportLaw::free_massless:
    case TransportLaw::free_massive: {
      if (F.datum && F.datum->v_decay() == DecayClass::compact_support &&
          F.datum->v_support_outer() <= V)
        return 0.0;
      return sampled;
    }
    case TransportLaw::duhamel:
      return sampled;
    case TransportLaw::vn_massless:
    case TransportLaw::vn_massive: {
      if (F.datum->v_decay() != DecayClass::compact_support)
        throw std::invalid_argument(
            "moments: forced-law averages need compactly supported v data");
      if (V < spec.vn_support_margin * F.datum->v_support_outer())
        return std::numeric_limits<double>::infinity();
      return sampled;
    }
  }
  throw std::logic_error("moments: unreachable law");
}

template <typename Eval>
MomentValue average_core(const DistributionField& F, const MomentSpec& spec, double t,
                         const Vec& x, Eval&& value_at, bool generic) {
  if (static_cast<int>(x.size()) != F.n)
    throw std::invalid_argument("moments: spatial point has wrong dimension");
  if (F.surface == DatumSurface::h1 || F.law == TransportLaw::vn_massive)
    hyperboloid_rho(t, x);  // domain guard: data live on and above H_1
  validate_spec(F, spec);
  std::vector<int> momenta = spec.momenta;
  std::sort(momenta.begin(), momenta.end());

  const BallSum sum = ball_quadrature(F.n, spec.quad, [&](const Vec& v) {
    const PhasePoint p = make_phase_point(t, x, v, F.m);
    double f = value_at(p);
    if (spec.absolute) f = std::abs(f);
    double den = f * weight_value(spec, momenta, p);
    if (spec.scale) den *= spec.scale(p);
    return den;
  });

  const double sampled = sphere_area(F.n) * sum.edge_max * spec.quad.v_radius;
  MomentValue out;
  out.value = sum.value;
  out.tail_bound = generic ? generic_tail_bound(F, spec, sampled) : tail_bound_for(F, spec, sampled);
  if (!(out.tail_bound <= spec.tail_tol * (1.0 + std::abs(out.value))))
    throw std::runtime_error(
        "moments: truncation error report: tail bound " + std::to_string(out.tail_bound) +
        " exceeds tolerance at v_radius " + std::to_string(spec.quad.v_radius));
  return out;
}

MomentSpec energy_spec(const QuadratureSpec& q, bool absolute = false) {
  MomentSpec s;
  s.weight = MomentWeight::energy;
  s.absolute = absolute;
  s.quad = q;
  return s;
}

// Central finite difference of a moment functional in one spacetime slot.
template <typename G>
double fd_slot(G&& g, double c, double h) {
  return (g(c + h) - g(c - h)) / (2.0 * h);
}

}  // namespace

MomentValue velocity_average(const DistributionField& F, const MomentSpec& spec, double t,
                             const Vec& x) {
  return average_core(
      F, spec, t, x, [&](const PhasePoint& p) { return evaluate(F, p); }, false);
}

MomentValue velocity_average_of(const DistributionField& F, const PhaseDensity& density,
                                const MomentSpec& spec, double t, const Vec& x) {
  if (!density) throw std::invalid_argument("moments: null fiber density");
  return average_core(
      F, spec, t, x, [&](const PhasePoint& p) { return density(p); }, true);
}

double chi_m(const DistributionField& F, const QuadratureSpec& q, double t, const Vec& x,
             bool absolute) {
  const double rho = hyperboloid_rho(t, x);  // throws on and outside the cone
  MomentSpec spec = energy_spec(q, absolute);
  const Vec xc = x;
  spec.scale = [t, xc, rho](const PhasePoint& p) {
    return (t * p.v0 - xc.dot(p.v)) / (rho * p.v0);
  };
  spec.scale_bound = (t + xc.norm()) / rho;
  return velocity_average(F, spec, t, x).value;
}

double stress_energy(const DistributionField& F, int mu, int nu, const QuadratureSpec& q, double t,
                     const Vec& x) {
  MomentSpec spec;
  spec.weight = MomentWeight::momentum;
  spec.momenta = {mu, nu};
  spec.quad = q;
  return velocity_average(F, spec, t, x).value;
}

double divergence_residual(const DistributionField& F, int nu, const QuadratureSpec& q, double t,
                           const Vec& x) {
  if (nu < 0 || nu > F.n) throw std::invalid_argument("moments: shell index out of range");
  double div = fd_slot(
      [&](double s) { return stress_energy(F, 0, nu, q, s, x); }, t, 1e-4 * (1.0 + std::abs(t)));
  for (int i = 0; i < F.n; ++i) {
    div += fd_slot(
        [&](double s) {
          Vec y = x;
          y(i) = s;
          return stress_energy(F, i + 1, nu, q, t, y);
        },
        x(i), 1e-4 * (1.0 + std::abs(x(i))));
  }
  return std::abs(div);
}

double average_commutation_residual(const DistributionField& F, const BaseField& Z,
                                    const QuadratureSpec& q, double t, const Vec& x) {
  if (F.law != TransportLaw::free_massless && F.law != TransportLaw::free_massive)
    throw std::invalid_argument("moments: the commutation identity is checked on free solutions");
  if (Z.n != F.n) throw std::invalid_argument("moments: generator dimension mismatch");
  if (Z.id == "S" && !F.massless())
    throw std::invalid_argument("moments: the scaling identity is part of the massless catalog");

  const AlgebraId algebra = F.massless() ? AlgebraId::Khat : AlgebraId::Phat;
  const auto catalog = lifted_catalog(algebra, F.n, exact_shell_mass_sq(F.m));
  int index = -1;
  for (std::size_t k = 0; k < catalog.size(); ++k)
    if (catalog[k].id == Z.id) index = static_cast<int>(k);
  if (index < 0)
    throw std::invalid_argument("moments: generator outside the commuting catalog: " + Z.id);
  const LiftedExpansion lifted = lift_word(F, MultiIndex{algebra, {index}});

  // Left side: the generator applied to the average by finite differences.
  const MomentSpec rho = energy_spec(q);
  const Vec vzero = Vec::Zero(F.n);
  double lhs = 0.0;
  for (int mu = 0; mu <= F.n; ++mu) {
    const double w = Z.w[static_cast<std::size_t>(mu)].eval(t, x.data(), vzero.data(), 0.0);
    if (w == 0.0) continue;
    double d;
    if (mu == 0) {
      d = fd_slot([&](double s) { return velocity_average(F, rho, s, x).value; }, t,
                  1e-4 * (1.0 + std::abs(t)));
    } else {
      d = fd_slot(
          [&](double s) {
            Vec y = x;
            y(mu - 1) = s;
            return velocity_average(F, rho, t, y).value;
          },
          x(mu - 1), 1e-4 * (1.0 + std::abs(x(mu - 1))));
    }
    lhs += w * d;
  }

  // Right side: the exact lifted derivative averaged, plus the catalog
  // correction (integration by parts in v).
  double rhs = ball_quadrature(F.n, q, [&](const Vec& v) {
                 const PhasePoint p = make_phase_point(t, x, v, F.m);
                 return lifted(p) * p.v0;
               }).value;
  if (Z.id.size() == 5 && Z.id.compare(0, 4, "Om_0") == 0) {
    const int i = Z.id[4] - '0';  // boost axis, 1-based
    rhs += 2.0 * ball_quadrature(F.n, q, [&](const Vec& v) {
                   const PhasePoint p = make_phase_point(t, x, v, F.m);
                   return evaluate(F, p) * p.v(i - 1);
                 }).value;
  } else if (Z.id == "S") {
    rhs += (F.n + 1) * velocity_average(F, rho, t, x).value;
  }
  return std::abs(lhs - rhs);
}

}  // namespace kintran
