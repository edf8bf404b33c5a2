#include "kintran/kinetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <boost/numeric/odeint.hpp>

#include "kintran/jet.hpp"
#include "kintran/poly.hpp"
#include "kintran/quadrature.hpp"

namespace kintran {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<double>;
using Stepper = ode::runge_kutta_dopri5<State>;

void check_point(const DistributionField& F, const PhasePoint& p, const char* who) {
  if (p.dim() != F.n) throw std::invalid_argument(std::string(who) + ": phase point dimension mismatch");
  if (p.m != F.m) throw std::invalid_argument(std::string(who) + ": phase point mass differs from the field mass");
}

void check_wave(const WaveField& phi, int n, const char* who) {
  if (phi.dim() != n) throw std::invalid_argument(std::string(who) + ": wave field dimension mismatch");
}

// (phi_t, d_1 phi, ..., d_n phi) at (t, x).
std::array<double, 5> phi_gradient(const WaveField& phi, double t, const Vec& x) {
  const int n = phi.dim();
  const DerivTable tab = phi.derivatives(t, x, 1);
  std::array<double, 5> g{};
  for (int mu = 0; mu <= n; ++mu) {
    Jet::Key k{};
    k[static_cast<std::size_t>(mu)] = 1;
    g[static_cast<std::size_t>(mu)] = tab.at(k);
  }
  return g;
}

// Backward parameter shift delta <= 0 with (t + delta)^2 - |x + u delta|^2 = 1
// along the straight characteristic through p (massive shell, so |u| < 1).
double h1_backward_shift(const PhasePoint& p, const char* who) {
  const Vec u = p.v / p.v0;
  const double A = 1.0 - u.squaredNorm();
  const double B = p.t - p.x.dot(u);
  double C = p.t * p.t - p.x.squaredNorm() - 1.0;
  if (C < -1e-9 * std::max(1.0, p.t * p.t))
    throw std::domain_error(std::string(who) + ": endpoint lies below the unit hyperboloid");
  C = std::max(C, 0.0);
  const double disc = std::max(B * B - A * C, 0.0);
  return -C / (B + std::sqrt(disc));
}

void fill_support(DistributionField& F) {
  if (F.datum->x_decay() == DecayClass::compact_support) F.x_radius = F.datum->x_support_radius();
  if (F.datum->v_decay() == DecayClass::compact_support) F.v_radius = F.datum->v_support_outer();
}

Vec random_direction(int n, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Vec w(n);
  do {
    for (int i = 0; i < n; ++i) w(i) = gauss(rng);
  } while (w.norm() < 1e-12);
  return w / w.norm();
}

// ---------------------------------------------------------------------------
// Characteristic systems
// ---------------------------------------------------------------------------

// Massless characteristics in coordinate time: state (x, v),
//   dx/dt = v/|v|,  dv/dt = -(T_0(phi)/|v|) v.
struct MasslessRhs {
  const WaveField* phi;
  int n;
  double v_floor;

  void operator()(const State& y, State& dy, double t) const {
    Vec x(n), v(n);
    for (int i = 0; i < n; ++i) {
      x(i) = y[static_cast<std::size_t>(i)];
      v(i) = y[static_cast<std::size_t>(n + i)];
    }
    const double vn = v.norm();
    if (!(vn >= v_floor))
      throw std::domain_error("vn_massless: singular characteristic (|v| fell below the floor)");
    const auto g = phi_gradient(*phi, t, x);
    double t0phi = vn * g[0];
    for (int i = 0; i < n; ++i) t0phi += v(i) * g[static_cast<std::size_t>(i + 1)];
    const double lam = t0phi / vn;
    dy.resize(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
      dy[static_cast<std::size_t>(i)] = v(i) / vn;
      dy[static_cast<std::size_t>(n + i)] = -lam * v(i);
    }
  }
};

// Massive characteristics in an affine parameter: state (t, x, v),
//   dt/dl = v0,  dx/dl = v,  dv^i/dl = -(T_m(phi) v^i + m^2 d_i phi).
struct MassiveRhs {
  const WaveField* phi;
  int n;
  double m;

  void operator()(const State& z, State& dz, double /*lambda*/) const {
    const double t = z[0];
    Vec x(n), v(n);
    for (int i = 0; i < n; ++i) {
      x(i) = z[static_cast<std::size_t>(1 + i)];
      v(i) = z[static_cast<std::size_t>(1 + n + i)];
    }
    const double v0 = std::sqrt(m * m + v.squaredNorm());
    const auto g = phi_gradient(*phi, t, x);
    double tmphi = v0 * g[0];
    for (int i = 0; i < n; ++i) tmphi += v(i) * g[static_cast<std::size_t>(i + 1)];
    dz.resize(static_cast<std::size_t>(2 * n + 1));
    dz[0] = v0;
    for (int i = 0; i < n; ++i) {
      dz[static_cast<std::size_t>(1 + i)] = v(i);
      dz[static_cast<std::size_t>(1 + n + i)] = -(tmphi * v(i) + m * m * g[static_cast<std::size_t>(i + 1)]);
    }
  }
};

// Advance the massless system from (p.t, x, v) to t_target, counting steps.
int run_massless(const WaveField& phi, const PhasePoint& p, double t_target, const IntegratorConfig& cfg,
                 Vec& x_out, Vec& v_out) {
  const int n = p.dim();
  if (p.v.norm() < cfg.v_floor)
    throw std::domain_error("vn_massless: singular characteristic (|v| below the floor)");
  x_out = p.x;
  v_out = p.v;
  if (t_target == p.t) return 0;
  State y(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = p.x(i);
    y[static_cast<std::size_t>(n + i)] = p.v(i);
  }
  MasslessRhs rhs{&phi, n, cfg.v_floor};
  auto ctrl = ode::make_controlled(cfg.abs_tol, cfg.rel_tol, Stepper());
  const double span = t_target - p.t;
  const double dt0 = std::copysign(std::min(0.05, std::abs(span)), span);
  int steps = -1;  // the observer fires once at the initial point
  auto obs = [&](const State&, double) {
    if (++steps > cfg.max_steps)
      throw std::runtime_error("vn_massless: step budget exhausted (tolerance failure)");
  };
  ode::integrate_adaptive(ctrl, rhs, y, p.t, t_target, dt0, obs);
  for (int i = 0; i < n; ++i) {
    x_out(i) = y[static_cast<std::size_t>(i)];
    v_out(i) = y[static_cast<std::size_t>(n + i)];
  }
  return steps;
}

// Advance the massive system until event(state) crosses zero (event has the
// sign of `entry_sign` at the start); returns the state on the entry side of
// the crossing, refined by bisection.
template <class Event>
State run_massive_until(const WaveField& phi, int n, double m, const State& z0, double dir,
                        const IntegratorConfig& cfg, const Event& event, int& steps,
                        const char* who) {
  MassiveRhs rhs{&phi, n, m};
  auto dense = ode::make_dense_output(cfg.abs_tol, cfg.rel_tol, Stepper());
  dense.initialize(z0, 0.0, std::copysign(0.05, dir));
  steps = 0;
  const double entry = event(z0);
  while (true) {
    dense.do_step(rhs);
    if (++steps > cfg.max_steps)
      throw std::runtime_error(std::string(who) + ": step budget exhausted (tolerance failure)");
    const State& z = dense.current_state();
    if (z[0] <= 0.0)
      throw std::domain_error(std::string(who) + ": characteristic left the domain (t <= 0)");
    if (entry * event(z) <= 0.0) break;
  }
  double la = dense.previous_time();
  double lb = dense.current_time();
  State za = dense.previous_state();
  State zt = za;
  for (int it = 0; it < 90 && la != lb; ++it) {
    const double mid = 0.5 * (la + lb);
    if (mid == la || mid == lb) break;
    dense.calc_state(mid, zt);
    if (entry * event(zt) > 0.0)
      la = mid;
    else
      lb = mid;
  }
  dense.calc_state(la, zt);
  return zt;
}

State massive_state(const PhasePoint& p) {
  const int n = p.dim();
  State z(static_cast<std::size_t>(2 * n + 1));
  z[0] = p.t;
  for (int i = 0; i < n; ++i) {
    z[static_cast<std::size_t>(1 + i)] = p.x(i);
    z[static_cast<std::size_t>(1 + n + i)] = p.v(i);
  }
  return z;
}

PhasePoint massive_point(const State& z, int n, double m) {
  Vec x(n), v(n);
  for (int i = 0; i < n; ++i) {
    x(i) = z[static_cast<std::size_t>(1 + i)];
    v(i) = z[static_cast<std::size_t>(1 + n + i)];
  }
  return make_phase_point(z[0], x, v, m);
}

double surface_gap(const State& z, int n) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += z[static_cast<std::size_t>(1 + i)] * z[static_cast<std::size_t>(1 + i)];
  return z[0] * z[0] - r2 - 1.0;
}

}  // namespace

Rat exact_shell_mass_sq(double m) {
  const double scaled = m * m * 64.0;
  const double r = std::nearbyint(scaled);
  if (r != scaled || std::abs(r) > 9e15)
    throw std::invalid_argument("kinetic: mass^2 must be representable in 64ths for symbolic words");
  return Rat(static_cast<long long>(r), 64);
}

// ---------------------------------------------------------------------------
// Laws and fields
// ---------------------------------------------------------------------------

std::string law_name(TransportLaw law) {
  switch (law) {
    case TransportLaw::free_massive: return "free-massive";
    case TransportLaw::free_massless: return "free-massless";
    case TransportLaw::duhamel: return "duhamel";
    case TransportLaw::vn_massless: return "vn-massless";
    case TransportLaw::vn_massive: return "vn-massive";
  }
  throw std::logic_error("law_name: unknown law");
}

DistributionField make_free_field(std::shared_ptr<const Datum> datum, double m) {
  if (!datum) throw std::invalid_argument("make_free_field: null datum");
  if (!(m >= 0.0)) throw std::invalid_argument("make_free_field: mass must be >= 0");
  DistributionField F;
  F.law = m == 0.0 ? TransportLaw::free_massless : TransportLaw::free_massive;
  F.surface = DatumSurface::t0;
  F.n = datum->dim();
  F.m = m;
  F.datum = std::move(datum);
  fill_support(F);
  return F;
}

DistributionField make_duhamel_field(PhaseSource source, double m, int n) {
  if (!source) throw std::invalid_argument("make_duhamel_field: null source");
  if (!(m >= 0.0)) throw std::invalid_argument("make_duhamel_field: mass must be >= 0");
  if (n < 1 || n > 4) throw std::invalid_argument("make_duhamel_field: dimension must be 1..4");
  DistributionField F;
  F.law = TransportLaw::duhamel;
  F.surface = DatumSurface::t0;
  F.n = n;
  F.m = m;
  F.source = std::move(source);
  return F;
}

DistributionField make_vn_massless_field(std::shared_ptr<const Datum> datum,
                                         std::shared_ptr<const WaveField> phi) {
  DistributionField F = make_free_field(std::move(datum), 0.0);
  if (phi) check_wave(*phi, F.n, "make_vn_massless_field");
  F.law = TransportLaw::vn_massless;
  F.phi = std::move(phi);
  return F;
}

DistributionField make_vn_massive_field(const DistributionField& h1_free,
                                        std::shared_ptr<const WaveField> phi) {
  if (h1_free.law != TransportLaw::free_massive || h1_free.surface != DatumSurface::h1)
    throw std::invalid_argument("make_vn_massive_field: needs a free massive field with H_1 data");
  DistributionField F = h1_free;
  if (phi) check_wave(*phi, F.n, "make_vn_massive_field");
  F.law = TransportLaw::vn_massive;
  F.phi = std::move(phi);
  return F;
}

const WaveField& zero_wave(int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("zero_wave: dimension must be 1..4");
  static const std::array<WaveField, 4> fields = {
      WaveField(WaveSpec{1, 12, {}, {}}), WaveField(WaveSpec{2, 12, {}, {}}),
      WaveField(WaveSpec{3, 12, {}, {}}), WaveField(WaveSpec{4, 12, {}, {}})};
  return fields[static_cast<std::size_t>(n - 1)];
}

double support_certificate(const DistributionField& F, double tol, int samples, unsigned seed) {
  if (!F.datum) throw std::invalid_argument("support_certificate: field has no datum");
  if (!(tol > 0.0)) throw std::invalid_argument("support_certificate: tolerance must be positive");
  const Datum& d = *F.datum;
  const int n = d.dim();
  const double rx = d.x_radius_for(tol);
  const double rv = d.v_radius_for(tol);
  const double v_in = d.v_support_inner();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    // x outside its radius, v inside the bulk
    {
      const Vec x = random_direction(n, rng) * (rx * (1.0 + 1e-9 + unif(rng)));
      const Vec v = random_direction(n, rng) * (v_in + (rv - v_in) * unif(rng));
      worst = std::max(worst, std::abs(d.value(x, v)));
    }
    // v outside its radius, x inside
    {
      const Vec x = random_direction(n, rng) * (rx * unif(rng));
      const Vec v = random_direction(n, rng) * (rv * (1.0 + 1e-9 + unif(rng)));
      worst = std::max(worst, std::abs(d.value(x, v)));
    }
    // inner velocity hole, if declared
    if (v_in > 0.0) {
      const Vec x = random_direction(n, rng) * (rx * unif(rng));
      const Vec v = random_direction(n, rng) * (v_in * (1.0 - 1e-9) * unif(rng));
      worst = std::max(worst, std::abs(d.value(x, v)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Free and inhomogeneous laws
// ---------------------------------------------------------------------------

PhasePoint free_footpoint(const DistributionField& F, const PhasePoint& p) {
  check_point(F, p, "free_footpoint");
  if (F.surface == DatumSurface::t0) {
    if (F.m == 0.0 && p.v.norm() < 1e-12)
      throw std::domain_error("free_footpoint: massless characteristic needs |v| > 0");
    const Vec a = p.x - (p.v / p.v0) * p.t;
    return make_phase_point(0.0, a, p.v, F.m);
  }
  if (!(F.m > 0.0)) throw std::invalid_argument("free_footpoint: hyperboloid data require m > 0");
  const double delta = h1_backward_shift(p, "free_footpoint");
  return make_phase_point(p.t + delta, p.x + (p.v / p.v0) * delta, p.v, F.m);
}

double free_evolve(const DistributionField& F, const PhasePoint& p) {
  if (F.law != TransportLaw::free_massive && F.law != TransportLaw::free_massless)
    throw std::invalid_argument("free_evolve: field law is not free");
  if (!F.datum) throw std::invalid_argument("free_evolve: field has no datum");
  const PhasePoint fp = free_footpoint(F, p);
  return F.datum->value(fp.x, fp.v);
}

CharacteristicRecord free_characteristic(const DistributionField& F, const PhasePoint& p) {
  CharacteristicRecord rec;
  rec.endpoint = p;
  rec.footpoint = free_footpoint(F, p);
  rec.factor = 1.0;
  rec.steps = 0;
  return rec;
}

double duhamel_evolve(const PhaseSource& h, double m, const PhasePoint& p, double tol) {
  if (!h) throw std::invalid_argument("duhamel_evolve: null source");
  if (!(m >= 0.0)) throw std::invalid_argument("duhamel_evolve: mass must be >= 0");
  if (p.m != m) throw std::invalid_argument("duhamel_evolve: phase point mass mismatch");
  if (!(p.t >= 0.0)) throw std::invalid_argument("duhamel_evolve: time must be >= 0");
  if (m == 0.0 && p.v.norm() < 1e-12)
    throw std::domain_error("duhamel_evolve: massless characteristic needs |v| > 0");
  if (p.t == 0.0) return 0.0;
  const Vec u = p.v / p.v0;
  auto integrand = [&](double s) { return h(s, p.x - (p.t - s) * u, p.v); };
  const double fine = integrate_1d(integrand, 0.0, p.t, tol);
  const double coarse = integrate_1d(integrand, 0.0, p.t, 4.0 * tol);
  if (std::abs(fine - coarse) > 50.0 * tol * (1.0 + std::abs(fine)))
    throw std::runtime_error("duhamel_evolve: quadrature failed to converge within budget");
  return fine;
}

// ---------------------------------------------------------------------------
// Lifted words: Z^alpha f for free laws, exactly
// ---------------------------------------------------------------------------

namespace {

// One symbolic term c(t, x, v) * (D^gamma f0)(footpoint); gamma runs over the
// datum arguments (x_1..x_n, v_1..v_n).  A word over the lifted catalog maps
// to a sum of such terms by the chain rule through the footpoint map
// Phi(t, x, v) = (x - (v/v0) t, v); in particular a time derivative falling
// on the datum is realized as -(v^j/v0) d_{x^j}, the rewrite along the
// transport equation.
struct LiftedWord {
  int n = 0;
  Rat msq;
  std::map<Jet::Key, ShellPoly> terms;

  static LiftedWord identity(int n, const Rat& msq) {
    LiftedWord w;
    w.n = n;
    w.msq = msq;
    w.terms.emplace(Jet::Key{}, ShellPoly::constant(n, msq, Rat(1)));
    return w;
  }

  static Jet::Key bump(Jet::Key k, int slot) {
    ++k[static_cast<std::size_t>(slot)];
    return k;
  }

  // -v^j / v0 = dA_j/dt
  ShellPoly du_dt(int j) const { return ShellPoly::from_ratio(-Poly::v(n, j), 1, msq); }

  // dA_j/dv_i = -t (delta_ij v0^2 - v_i v_j) / v0^3
  ShellPoly foot_jac(int i, int j) const {
    Poly num = Poly::t(n) * Poly::v(n, i) * Poly::v(n, j);
    if (i == j) num -= Poly::t(n) * Poly::v0(n) * Poly::v0(n);
    return ShellPoly::from_ratio(num, 3, msq);
  }

  LiftedWord applied(const LiftedField& Z) const {
    LiftedWord out;
    out.n = n;
    out.msq = msq;
    auto add = [&](const Jet::Key& k, const ShellPoly& c) {
      if (c.is_zero()) return;
      auto [it, fresh] = out.terms.emplace(k, c);
      if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) out.terms.erase(it);
      }
    };
    for (const auto& [gamma, c] : terms) {
      add(gamma, apply_sym(Z, c));
      if (!Z.a[0].is_zero()) {
        const ShellPoly ca = c * Z.a[0];
        for (int j = 1; j <= n; ++j) add(bump(gamma, j - 1), ca * du_dt(j));
      }
      for (int i = 1; i <= n; ++i)
        if (!Z.a[static_cast<std::size_t>(i)].is_zero())
          add(bump(gamma, i - 1), c * Z.a[static_cast<std::size_t>(i)]);
      for (int i = 1; i <= n; ++i) {
        const ShellPoly& bi = Z.b[static_cast<std::size_t>(i - 1)];
        if (bi.is_zero()) continue;
        const ShellPoly cb = c * bi;
        add(bump(gamma, n + i - 1), cb);
        for (int j = 1; j <= n; ++j) add(bump(gamma, j - 1), cb * foot_jac(i, j));
      }
    }
    return out;
  }

  int datum_order() const {
    int order = 0;
    for (const auto& [gamma, c] : terms) {
      int s = 0;
      for (auto e : gamma) s += e;
      order = std::max(order, s);
    }
    return order;
  }

  double eval_with(const DerivTable& tab, const PhasePoint& p) const {
    double s = 0.0;
    for (const auto& [gamma, c] : terms) s += c.eval(p.t, p.x.data(), p.v.data()) * tab.at(gamma);
    return s;
  }
};

LiftedWord word_from_sequence(const std::vector<LiftedField>& catalog, const std::vector<int>& seq,
                              int n, const Rat& msq) {
  LiftedWord w = LiftedWord::identity(n, msq);
  for (auto it = seq.rbegin(); it != seq.rend(); ++it)
    w = w.applied(catalog[static_cast<std::size_t>(*it)]);
  return w;
}

}  // namespace

struct LiftedExpansion::Impl {
  std::shared_ptr<const Datum> f0;
  int n = 0;
  double m = 0.0;
  double shift = 0.0;
  std::vector<double> weights;
  std::vector<LiftedWord> words;
  int order = 0;
};

double LiftedExpansion::operator()(const PhasePoint& p) const {
  if (p.dim() != impl_->n) throw std::invalid_argument("lifted word: dimension mismatch");
  if (p.m != impl_->m) throw std::invalid_argument("lifted word: phase point mass mismatch");
  if (impl_->m == 0.0 && p.v.norm() < 1e-12)
    throw std::domain_error("lifted word: massless characteristic needs |v| > 0");
  const PhasePoint fp = frame_point(p);
  const Vec a = footpoint_x(fp);
  const DerivTable tab = impl_->f0->derivatives(a, p.v, impl_->order);
  return eval_with(tab, fp);
}

int LiftedExpansion::datum_order() const { return impl_->order; }

PhasePoint LiftedExpansion::frame_point(const PhasePoint& p) const {
  return make_phase_point(p.t - impl_->shift, p.x, p.v, impl_->m);
}

Vec LiftedExpansion::footpoint_x(const PhasePoint& frame) const {
  return frame.x - (frame.v / frame.v0) * frame.t;
}

double LiftedExpansion::eval_with(const DerivTable& tab, const PhasePoint& frame) const {
  double s = 0.0;
  for (std::size_t k = 0; k < impl_->words.size(); ++k)
    s += impl_->weights[k] * impl_->words[k].eval_with(tab, frame);
  return s;
}

const Datum& LiftedExpansion::base_datum() const { return *impl_->f0; }

double LiftedExpansion::time_shift() const { return impl_->shift; }

LiftedExpansion lift_word(const DistributionField& F, const MultiIndex& alpha) {
  if (F.law != TransportLaw::free_massive && F.law != TransportLaw::free_massless)
    throw std::invalid_argument("lift_word: free laws only");
  const int n = F.n;
  const Rat msq = exact_shell_mass_sq(F.m);
  const auto catalog = lifted_catalog(alpha.algebra, n, msq);
  for (int k : alpha.seq)
    if (k < 0 || k >= static_cast<int>(catalog.size()))
      throw std::out_of_range("lift_word: letter outside the catalog");

  auto impl = std::make_shared<LiftedExpansion::Impl>();
  impl->n = n;
  impl->m = F.m;

  // Letter sequences in the evaluation frame, with multiplicative weights.
  std::vector<std::pair<double, std::vector<int>>> seqs;
  if (F.surface == DatumSurface::t0) {
    if (!F.datum) throw std::invalid_argument("lift_word: field has no datum");
    impl->f0 = F.datum;
    impl->shift = 0.0;
    seqs.emplace_back(1.0, alpha.seq);
  } else {
    // On the translated frame t~ = t - time_shift the datum sits at t~ = 0 and
    // every generator decomposes as (same generator) + time_shift * (its
    // translation partner): the scalings pick up d_t, the boosts pick up their
    // spatial translation, the rest are translation-invariant.
    if (!F.base_datum)
      throw std::invalid_argument("lift_word: hyperboloid field lacks its originating datum");
    impl->f0 = F.base_datum;
    impl->shift = F.time_shift;
    auto index_of = [&](const std::string& id) {
      for (std::size_t i = 0; i < catalog.size(); ++i)
        if (catalog[i].id == id) return static_cast<int>(i);
      throw std::logic_error("lift_word: catalog lacks the translation partner " + id);
    };
    seqs.emplace_back(1.0, std::vector<int>{});
    for (int letter : alpha.seq) {
      const std::string& id = catalog[static_cast<std::size_t>(letter)].id;
      int partner = -1;
      if (id == "S" || id == "S_tx")
        partner = index_of("d_t");
      else if (id.rfind("Om_0", 0) == 0)
        partner = index_of("d_x" + id.substr(4));
      std::vector<std::pair<double, std::vector<int>>> next;
      next.reserve(seqs.size() * 2);
      for (const auto& [w, s] : seqs) {
        auto s1 = s;
        s1.push_back(letter);
        next.emplace_back(w, std::move(s1));
        if (partner >= 0) {
          auto s2 = s;
          s2.push_back(partner);
          next.emplace_back(w * F.time_shift, std::move(s2));
        }
      }
      seqs = std::move(next);
    }
  }

  impl->weights.reserve(seqs.size());
  impl->words.reserve(seqs.size());
  for (const auto& [w, s] : seqs) {
    impl->weights.push_back(w);
    impl->words.push_back(word_from_sequence(catalog, s, n, msq));
    impl->order = std::max(impl->order, impl->words.back().datum_order());
  }

  LiftedExpansion e;
  e.impl_ = std::move(impl);
  return e;
}

double lifted_solution(const DistributionField& F, const MultiIndex& alpha, const PhasePoint& p) {
  return lift_word(F, alpha)(p);
}

// ---------------------------------------------------------------------------
// Wave-forced transport
// ---------------------------------------------------------------------------

VnValue evolve_vn_massless(const WaveField& phi, const DistributionField& F, const PhasePoint& p,
                           const IntegratorConfig& cfg) {
  if (F.law != TransportLaw::vn_massless && F.law != TransportLaw::free_massless)
    throw std::invalid_argument("vn_massless: field law is not massless");
  if (F.surface != DatumSurface::t0) throw std::invalid_argument("vn_massless: data must sit at t = 0");
  if (!F.datum) throw std::invalid_argument("vn_massless: field has no datum");
  check_point(F, p, "vn_massless");
  check_wave(phi, F.n, "vn_massless");
  const int n = F.n;

  Vec x0(n), v0(n);
  const int steps = run_massless(phi, p, 0.0, cfg, x0, v0);
  if (v0.norm() < cfg.v_floor)
    throw std::domain_error("vn_massless: singular characteristic (|v| below the floor)");

  VnValue out;
  out.record.endpoint = p;
  out.record.footpoint = make_phase_point(0.0, x0, v0, 0.0);
  out.record.steps = steps;
  out.record.abs_tol = cfg.abs_tol;
  out.record.rel_tol = cfg.rel_tol;
  out.record.factor = std::exp((n + 1) * (phi.value(p.t, p.x) - phi.value(0.0, x0)));
  out.value = F.datum->value(x0, v0) * out.record.factor;
  return out;
}

VnValue evolve_vn_massive_prescribed(const WaveField& phi, const DistributionField& F,
                                     const PhasePoint& p, const IntegratorConfig& cfg) {
  if (F.law != TransportLaw::vn_massive && F.law != TransportLaw::free_massive)
    throw std::invalid_argument("vn_massive: field law is not massive");
  if (F.surface != DatumSurface::h1)
    throw std::invalid_argument("vn_massive: data must sit on the unit hyperboloid");
  if (!F.datum) throw std::invalid_argument("vn_massive: field has no datum");
  if (!(F.m > 0.0)) throw std::invalid_argument("vn_massive: mass must be positive");
  check_point(F, p, "vn_massive");
  check_wave(phi, F.n, "vn_massive");
  const int n = F.n;
  if (!(p.t > 0.0)) throw std::domain_error("vn_massive: endpoint must lie in t > 0");
  const double gap = p.t * p.t - p.x.squaredNorm() - 1.0;
  if (gap < -1e-9 * std::max(1.0, p.t * p.t))
    throw std::domain_error("vn_massive: endpoint lies below the unit hyperboloid");

  VnValue out;
  out.record.endpoint = p;
  out.record.abs_tol = cfg.abs_tol;
  out.record.rel_tol = cfg.rel_tol;

  PhasePoint foot = p;
  if (gap > 1e-12) {
    int steps = 0;
    const State zf = run_massive_until(
        phi, n, F.m, massive_state(p), -1.0, cfg,
        [n](const State& z) { return surface_gap(z, n); }, steps, "vn_massive");
    foot = massive_point(zf, n, F.m);
    out.record.steps = steps;
  }
  out.record.footpoint = foot;
  out.record.factor = std::exp((n + 1) * (phi.value(p.t, p.x) - phi.value(foot.t, foot.x)));
  out.value = F.datum->value(foot.x, foot.v) * out.record.factor;
  return out;
}

PhasePoint characteristic_point(const WaveField& phi, const PhasePoint& p, double t_target,
                                const IntegratorConfig& cfg) {
  const int n = p.dim();
  check_wave(phi, n, "characteristic_point");
  if (p.m == 0.0) {
    Vec x(n), v(n);
    run_massless(phi, p, t_target, cfg, x, v);
    return make_phase_point(t_target, x, v, 0.0);
  }
  if (!(t_target > 0.0))
    throw std::domain_error("characteristic_point: massive characteristics are tracked in t > 0");
  if (t_target == p.t) return p;
  int steps = 0;
  const State zf = run_massive_until(
      phi, n, p.m, massive_state(p), t_target > p.t ? 1.0 : -1.0, cfg,
      [t_target](const State& z) { return z[0] - t_target; }, steps, "characteristic_point");
  return massive_point(zf, n, p.m);
}

double evaluate(const DistributionField& F, const PhasePoint& p) {
  switch (F.law) {
    case TransportLaw::free_massive:
    case TransportLaw::free_massless:
      return free_evolve(F, p);
    case TransportLaw::duhamel:
      return duhamel_evolve(F.source, F.m, p);
    case TransportLaw::vn_massless:
      return evolve_vn_massless(F.phi ? *F.phi : zero_wave(F.n), F, p).value;
    case TransportLaw::vn_massive:
      return evolve_vn_massive_prescribed(F.phi ? *F.phi : zero_wave(F.n), F, p).value;
  }
  throw std::logic_error("evaluate: unknown law");
}

// ---------------------------------------------------------------------------
// Trace on the unit hyperboloid
// ---------------------------------------------------------------------------

namespace {

// Trace on H_1 of the free solution whose t = shift slice equals `base`:
//   g(y, v) = base(y - (v/v0)(sqrt(1+|y|^2) - shift), v).
class H1TraceDatum final : public Datum {
 public:
  H1TraceDatum(std::shared_ptr<const Datum> base, double m, double shift)
      : Datum(trace_spec(*base)), base_(std::move(base)), m_(m), shift_(shift) {
    x_decay_ = DecayClass::compact_support;
    x_support_radius_ = base_->x_support_radius();
    v_decay_ = base_->v_decay();
    v_support_outer_ = base_->v_support_outer();
    v_support_inner_ = base_->v_support_inner();
  }

  double sup_tail_x(double R) const override {
    return R >= x_support_radius_ ? 0.0 : base_->sup_tail_x(0.0);
  }
  double sup_tail_v(double R) const override { return base_->sup_tail_v(R); }

  double value(const Vec& y, const Vec& v) const override {
    const double v0 = std::sqrt(m_ * m_ + v.squaredNorm());
    const double ty = std::sqrt(1.0 + y.squaredNorm());
    return base_->value(y - (v / v0) * (ty - shift_), v);
  }

 protected:
  Jet value_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const override {
    const int n = dim();
    Jet y2 = x[0] * x[0];
    Jet w2 = v[0] * v[0];
    for (int i = 1; i < n; ++i) {
      y2 = y2 + x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      w2 = w2 + v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    const Jet shift = sqrt(y2 + 1.0) - shift_;
    const Jet iv0 = inv(sqrt(w2 + m_ * m_));
    std::vector<Jet> a;
    a.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      a.push_back(x[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)] * iv0 * shift);
    return base_->compose_jet(a, v);
  }

 private:
  static DatumSpec trace_spec(const Datum& base) {
    DatumSpec s = base.spec();
    s.kind = "h1-trace(" + s.kind + ")";
    return s;
  }

  std::shared_ptr<const Datum> base_;
  double m_;
  double shift_;
};

}  // namespace

H1Trace h1_trace(const DistributionField& F, int exterior_samples, unsigned seed) {
  if (F.law != TransportLaw::free_massive || F.surface != DatumSurface::t0)
    throw std::invalid_argument("h1_trace: needs a free massive law with t = 0 data");
  if (!F.datum) throw std::invalid_argument("h1_trace: field has no datum");
  if (F.datum->x_decay() != DecayClass::compact_support)
    throw std::invalid_argument("h1_trace: datum must be compactly supported in x");
  if (exterior_samples < 1) throw std::invalid_argument("h1_trace: need at least one sample");
  const int n = F.n;
  const double R = F.datum->x_support_radius();
  const double shift = std::sqrt(1.0 + R * R);
  auto trace = std::make_shared<H1TraceDatum>(F.datum, F.m, shift);

  // Certify: the trace must vanish identically outside {|y| <= R}.
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double rv = trace->v_radius_for(1e-12);
  double worst = 0.0;
  Vec bad_y(n), bad_v(n);
  for (int k = 0; k < exterior_samples; ++k) {
    const double expo = -9.0 + 9.5 * unif(rng);  // |y|/R - 1 from 1e-9 up to ~3
    const Vec y = random_direction(n, rng) * (R * (1.0 + std::pow(10.0, expo)));
    const Vec v = random_direction(n, rng) * (rv * unif(rng));
    const double val = std::abs(trace->value(y, v));
    if (val > worst) {
      worst = val;
      bad_y = y;
      bad_v = v;
    }
  }
  if (worst > 0.0) {
    std::ostringstream msg;
    msg << "h1_trace: support certificate failed: |trace| = " << worst << " at y = (";
    for (int i = 0; i < n; ++i) msg << (i ? ", " : "") << bad_y(i);
    msg << "), v = (";
    for (int i = 0; i < n; ++i) msg << (i ? ", " : "") << bad_v(i);
    msg << ")";
    throw std::runtime_error(msg.str());
  }

  H1Trace out;
  out.field.law = TransportLaw::free_massive;
  out.field.surface = DatumSurface::h1;
  out.field.n = n;
  out.field.m = F.m;
  out.field.datum = trace;
  out.field.base_datum = F.datum;
  out.field.time_shift = shift;
  fill_support(out.field);
  out.support_radius = R;
  out.exterior_sup = worst;
  out.exterior_samples = exterior_samples;
  return out;
}

// ---------------------------------------------------------------------------
// Forced-transport commutation residual
// ---------------------------------------------------------------------------

double forced_transport(const WaveField& phi, const PhaseFunction& g, const PhasePoint& p) {
  const int n = p.dim();
  if (p.m != 0.0) throw std::invalid_argument("forced_transport: massless shell only");
  check_wave(phi, n, "forced_transport");
  const auto grad = phi_gradient(phi, p.t, p.x);
  double t0phi = p.v0 * grad[0];
  for (int i = 0; i < n; ++i) t0phi += p.v(i) * grad[static_cast<std::size_t>(i + 1)];
  const LiftedField T = transport_field(n, Rat(0));
  const LiftedField W = vertical_scaling(n, Rat(0));
  return apply(T, g, p) - t0phi * apply(W, g, p);
}

double forced_commutator_residual(const WaveField& phi, const LiftedField& Z,
                                  const PhaseFunction& f, const PhasePoint& p) {
  const int n = p.dim();
  if (Z.n != n) throw std::invalid_argument("forced_commutator_residual: dimension mismatch");
  if (!(Z.msq == Rat(0)))
    throw std::invalid_argument("forced_commutator_residual: massless family only");
  if (p.m != 0.0) throw std::invalid_argument("forced_commutator_residual: massless shell only");
  check_wave(phi, n, "forced_commutator_residual");

  const TransportCommutator tc = transport_commutator(Z);
  double c = 0.0;
  if (tc.kind == TransportCommutator::Kind::multiple_of_transport)
    c = to_double(tc.factor);
  else if (tc.kind != TransportCommutator::Kind::zero)
    throw std::invalid_argument("forced_commutator_residual: field is outside the commuting family");

  const PhaseFunction zf{[&](const PhasePoint& q) { return apply(Z, f, q); }, nullptr};
  const PhaseFunction tf{[&](const PhasePoint& q) { return forced_transport(phi, f, q); }, nullptr};
  const double lhs = forced_transport(phi, zf, p) - apply(Z, tf, p);

  // Z phi through the spacetime part of Z (exact wave partials inside).
  const PhaseFunction zphi{[&](const PhasePoint& q) {
                             const auto grad = phi_gradient(phi, q.t, q.x);
                             double s = 0.0;
                             for (int mu = 0; mu <= n; ++mu) {
                               const ShellPoly& a = Z.a[static_cast<std::size_t>(mu)];
                               if (a.is_zero()) continue;
                               s += a.eval(q.t, q.x.data(), q.v.data()) *
                                    grad[static_cast<std::size_t>(mu)];
                             }
                             return s;
                           },
                           nullptr};
  const LiftedField T = transport_field(n, Rat(0));
  const LiftedField W = vertical_scaling(n, Rat(0));
  const double rhs = c * forced_transport(phi, f, p) + apply(T, zphi, p) * apply(W, f, p);
  return std::abs(lhs - rhs);
}

}  // namespace kintran
