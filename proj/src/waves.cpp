#include "kintran/waves.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kintran/profiles.hpp"

namespace kintran {

namespace {

// Radial modes switch from the direct difference quotient to the even Taylor
// expansion below this fraction of the profile width; within that collar the
// expansion is truncated, so only low-order tables are served there.
constexpr double kAxisSwitchFraction = 0.02;
constexpr int kAxisOrderCap = 4;
constexpr int kSeriesTerms = 10;  // expansion terms in r^2
constexpr double kHalfPi = 1.57079632679489661923;

double plane_phase(const PlaneModeSpec& m, double t, const Vec& x) {
  double kx = 0.0;
  for (int i = 0; i < x.size(); ++i) kx += m.xi[static_cast<std::size_t>(i)] * x(i);
  double omega = 0.0;
  for (double c : m.xi) omega += c * c;
  return std::sqrt(omega) * t - kx + m.theta;
}

double plane_omega(const PlaneModeSpec& m) {
  double s = 0.0;
  for (double c : m.xi) s += c * c;
  return std::sqrt(s);
}

// d^k/ds^k of F(s) = A window((s - s0)/width) for k = 0..count-1
std::vector<double> profile_derivatives(const RadialModeSpec& m, double s, int count) {
  const double u0 = (s - m.s0) / m.width;
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  if (u0 <= kProfileEdge || 1.0 - u0 <= kProfileEdge) return out;
  const Jet w = window_profile(Jet::variable(1, count - 1, 0, u0));
  double scale = m.amplitude;
  for (int k = 0; k < count; ++k) {
    Jet::Key key{};
    key[0] = static_cast<std::uint8_t>(k);
    out[static_cast<std::size_t>(k)] = scale * w.partial(key);
    scale /= m.width;
  }
  return out;
}

Jet profile_on_jet(const RadialModeSpec& m, const Jet& s) {
  const Jet u = (s - Jet::constant(s.nvars(), s.order(), m.s0)) * (1.0 / m.width);
  return window_profile(u) * m.amplitude;
}

}  // namespace

// ---------------------------------------------------------------------------
// WaveField
// ---------------------------------------------------------------------------

WaveField::WaveField(WaveSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1 || spec_.n > 4) throw std::invalid_argument("wave: dimension must be 1..4");
  if (spec_.max_order < 1 || spec_.max_order > 12)
    throw std::invalid_argument("wave: max_order must be 1..12");
  for (const auto& m : spec_.plane) {
    if (static_cast<int>(m.xi.size()) != spec_.n)
      throw std::invalid_argument("wave: plane covector has wrong dimension");
    if (plane_omega(m) <= 0.0) throw std::invalid_argument("wave: plane covector must be nonzero");
  }
  for (const auto& m : spec_.radial) {
    if (spec_.n != 3) throw std::invalid_argument("wave: radial modes are the n = 3 family");
    if (m.width <= 0.0) throw std::invalid_argument("wave: radial profile width must be positive");
  }
}

std::optional<std::array<double, 2>> WaveField::profile_window() const {
  if (!spec_.plane.empty() || spec_.radial.empty()) return std::nullopt;
  double lo = spec_.radial.front().s0, hi = lo;
  for (const auto& m : spec_.radial) {
    lo = std::min(lo, m.s0);
    hi = std::max(hi, m.s0 + m.width);
  }
  return std::array<double, 2>{lo, hi};
}

double WaveField::value(double t, const Vec& x) const {
  double out = 0.0;
  for (const auto& m : spec_.plane) out += m.amplitude * std::cos(plane_phase(m, t, x));
  if (spec_.radial.empty()) return out;
  const double r = x.norm();
  for (const auto& m : spec_.radial) {
    if (m.outgoing_only) {
      if (r <= 0.0) throw std::domain_error("wave: outgoing-only mode is singular at r = 0");
      const double F = m.amplitude * window_profile((t - r - m.s0) / m.width);
      out += F / r;
      continue;
    }
    if (r >= kAxisSwitchFraction * m.width) {
      const double Fm = m.amplitude * window_profile((t - r - m.s0) / m.width);
      const double Fp = m.amplitude * window_profile((t + r - m.s0) / m.width);
      out += (Fm - Fp) / r;
    } else {
      // (F(t-r) - F(t+r))/r = -2 sum_j F^(2j+1)(t) r^(2j) / (2j+1)!
      const auto d = profile_derivatives(m, t, 2 * kSeriesTerms + 2);
      double pw = 1.0, fact = 1.0, sum = 0.0;
      for (int j = 0; j < kSeriesTerms; ++j) {
        sum += d[static_cast<std::size_t>(2 * j + 1)] * pw / fact;
        pw *= r * r;
        fact *= static_cast<double>(2 * j + 2) * static_cast<double>(2 * j + 3);
      }
      out += -2.0 * sum;
    }
  }
  return out;
}

DerivTable WaveField::derivatives(double t, const Vec& x, int order) const {
  if (order < 0 || order > spec_.max_order)
    throw std::invalid_argument("wave: derivative order beyond the supported maximum");
  const int n = spec_.n;
  const auto& set = MultiIndexSet::get(n + 1, order);
  std::vector<double> vals(set.size(), 0.0);

  for (const auto& m : spec_.plane) {
    const double phase = plane_phase(m, t, x);
    const double omega = plane_omega(m);
    for (std::size_t r = 0; r < set.size(); ++r) {
      const auto& beta = set.key(r);
      double c = m.amplitude * std::cos(phase + kHalfPi * MultiIndexSet::total_degree(beta));
      for (int k = 0; k < beta[0]; ++k) c *= omega;
      for (int i = 1; i <= n; ++i)
        for (int k = 0; k < beta[static_cast<std::size_t>(i)]; ++k)
          c *= -m.xi[static_cast<std::size_t>(i - 1)];
      vals[r] += c;
    }
  }

  if (!spec_.radial.empty()) {
    const double r = x.norm();
    Jet psi(n + 1, order);
    bool have = false;
    for (const auto& m : spec_.radial) {
      const bool near_axis = r < kAxisSwitchFraction * m.width;
      if (m.outgoing_only && r <= 0.0)
        throw std::domain_error("wave: outgoing-only mode is singular at r = 0");
      if (!m.outgoing_only && near_axis && order > kAxisOrderCap)
        throw std::invalid_argument("wave: near-axis derivatives limited to order 4");
      const Jet tj = Jet::variable(n + 1, order, 0, t);
      if (!near_axis || m.outgoing_only) {
        Jet r2 = Jet::constant(n + 1, order, 0.0);
        for (int i = 0; i < n; ++i) {
          const Jet xi = Jet::variable(n + 1, order, i + 1, x(i));
          r2 = r2 + xi * xi;
        }
        const Jet rj = sqrt(r2);
        Jet num = profile_on_jet(m, tj - rj);
        if (!m.outgoing_only) num = num - profile_on_jet(m, tj + rj);
        psi = have ? psi + num * inv(rj) : num * inv(rj);
      } else {
        const auto d = profile_derivatives(m, t, 2 * kSeriesTerms + 2 + order);
        Jet r2 = Jet::constant(n + 1, order, 0.0);
        for (int i = 0; i < n; ++i) {
          const Jet xi = Jet::variable(n + 1, order, i + 1, x(i));
          r2 = r2 + xi * xi;
        }
        Jet sum = Jet::constant(n + 1, order, 0.0);
        Jet pw = Jet::constant(n + 1, order, 1.0);
        double fact = 1.0;
        for (int j = 0; j < kSeriesTerms; ++j) {
          std::vector<double> coeffs(static_cast<std::size_t>(order) + 1);
          double mfact = 1.0;
          for (int q = 0; q <= order; ++q) {
            coeffs[static_cast<std::size_t>(q)] =
                d[static_cast<std::size_t>(2 * j + 1 + q)] / mfact;
            mfact *= static_cast<double>(q + 1);
          }
          sum = sum + Jet::series(tj, coeffs) * pw * (1.0 / fact);
          pw = pw * r2;
          fact *= static_cast<double>(2 * j + 2) * static_cast<double>(2 * j + 3);
        }
        psi = have ? psi + sum * (-2.0) : sum * (-2.0);
      }
      have = true;
    }
    for (std::size_t rr = 0; rr < set.size(); ++rr) vals[rr] += psi.partial(set.key(rr));
  }

  return DerivTable(set, std::move(vals));
}

// ---------------------------------------------------------------------------
// GaussianBlobField
// ---------------------------------------------------------------------------

GaussianBlobField::GaussianBlobField(int n, double amplitude, double a, double t0, double b)
    : n_(n), amplitude_(amplitude), a_(a), t0_(t0), b_(b) {
  if (n < 1 || n > 4) throw std::invalid_argument("blob: dimension must be 1..4");
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("blob: widths must be positive");
}

double GaussianBlobField::value(double t, const Vec& x) const {
  return amplitude_ * std::exp(-a_ * (t - t0_) * (t - t0_) - b_ * x.squaredNorm());
}

DerivTable GaussianBlobField::derivatives(double t, const Vec& x, int order) const {
  if (order < 0 || order > max_order())
    throw std::invalid_argument("blob: derivative order beyond the supported maximum");
  const auto& set = MultiIndexSet::get(n_ + 1, order);
  const Jet tj = Jet::variable(n_ + 1, order, 0, t);
  Jet q = (tj - Jet::constant(n_ + 1, order, t0_));
  q = q * q * (-a_);
  for (int i = 0; i < n_; ++i) {
    const Jet xi = Jet::variable(n_ + 1, order, i + 1, x(i));
    q = q - xi * xi * b_;
  }
  const Jet val = exp(q) * amplitude_;
  std::vector<double> vals(set.size());
  for (std::size_t r = 0; r < set.size(); ++r) vals[r] = val.partial(set.key(r));
  return DerivTable(set, std::move(vals));
}

// ---------------------------------------------------------------------------
// SpacetimeWord
// ---------------------------------------------------------------------------

SpacetimeWord SpacetimeWord::identity(int n) {
  SpacetimeWord w(n);
  w.terms_.push_back({Poly::constant(n, Rat(1)), Jet::Key{}});
  return w;
}

SpacetimeWord SpacetimeWord::from_word(const std::vector<BaseField>& catalog,
                                       const std::vector<int>& seq, int n) {
  SpacetimeWord w = identity(n);
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    if (*it < 0 || *it >= static_cast<int>(catalog.size()))
      throw std::invalid_argument("word: index outside the catalog");
    w = w.apply(catalog[static_cast<std::size_t>(*it)]);
  }
  return w;
}

namespace {
Jet::Key bumped(const Jet::Key& k, int slot) {
  Jet::Key out = k;
  out[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(out[static_cast<std::size_t>(slot)] + 1);
  return out;
}
}  // namespace

SpacetimeWord SpacetimeWord::apply(const BaseField& Z) const {
  if (Z.n != n_) throw std::invalid_argument("word: field dimension mismatch");
  std::map<Jet::Key, Poly> acc;
  auto add = [&](const Jet::Key& k, const Poly& p) {
    auto [it, fresh] = acc.try_emplace(k, p);
    if (!fresh) it->second += p;
  };
  for (const auto& term : terms_) {
    // Z(c) D^beta phi
    Poly zc = Z.w[0] * term.coeff.d_t();
    for (int i = 1; i <= n_; ++i) zc += Z.w[static_cast<std::size_t>(i)] * term.coeff.d_x(i);
    if (!zc.is_zero()) add(term.beta, zc);
    // c w^mu D^{beta+e_mu} phi
    for (int mu = 0; mu <= n_; ++mu) {
      const Poly cw = term.coeff * Z.w[static_cast<std::size_t>(mu)];
      if (!cw.is_zero()) add(bumped(term.beta, mu), cw);
    }
  }
  SpacetimeWord out(n_);
  for (auto& [k, p] : acc)
    if (!p.is_zero()) out.terms_.push_back({std::move(p), k});
  return out;
}

SpacetimeWord SpacetimeWord::partial(int mu) const {
  if (mu < 0 || mu > n_) throw std::invalid_argument("word: bad coordinate index");
  std::map<Jet::Key, Poly> acc;
  auto add = [&](const Jet::Key& k, const Poly& p) {
    auto [it, fresh] = acc.try_emplace(k, p);
    if (!fresh) it->second += p;
  };
  for (const auto& term : terms_) {
    const Poly dc = mu == 0 ? term.coeff.d_t() : term.coeff.d_x(mu);
    if (!dc.is_zero()) add(term.beta, dc);
    add(bumped(term.beta, mu), term.coeff);
  }
  SpacetimeWord out(n_);
  for (auto& [k, p] : acc)
    if (!p.is_zero()) out.terms_.push_back({std::move(p), k});
  return out;
}

int SpacetimeWord::derivative_order() const {
  int m = 0;
  for (const auto& term : terms_) m = std::max(m, MultiIndexSet::total_degree(term.beta));
  return m;
}

double SpacetimeWord::eval_with(const DerivTable& tab, double t, const Vec& x) const {
  std::array<double, 4> vz{0.0, 0.0, 0.0, 0.0};
  double out = 0.0;
  for (const auto& term : terms_)
    out += term.coeff.eval(t, x.data(), vz.data(), 0.0) * tab.at(term.beta);
  return out;
}

double SpacetimeWord::eval(const ScalarSpacetimeField& phi, double t, const Vec& x) const {
  return eval_with(phi.derivatives(t, x, derivative_order()), t, x);
}

double eval_z_alpha_phi(const ScalarSpacetimeField& phi, const std::vector<BaseField>& catalog,
                        const std::vector<int>& seq, double t, const Vec& x) {
  return SpacetimeWord::from_word(catalog, seq, phi.dim()).eval(phi, t, x);
}

// ---------------------------------------------------------------------------
// Transport coupling and null decomposition
// ---------------------------------------------------------------------------

double transport_of_phi(const ScalarSpacetimeField& phi, const PhasePoint& p) {
  const DerivTable tab = phi.derivatives(p.t, p.x, 1);
  Jet::Key k{};
  k[0] = 1;
  double out = p.v0 * tab.at(k);
  for (int i = 0; i < phi.dim(); ++i) {
    Jet::Key ki{};
    ki[static_cast<std::size_t>(i + 1)] = 1;
    out += p.v(i) * tab.at(ki);
  }
  return out;
}

NullDecomposition null_decomposition(const ScalarSpacetimeField& phi, const PhasePoint& p) {
  const int n = phi.dim();
  const double r = p.x.norm();
  if (!(p.t > 0.0) || !(r > 0.0))
    throw std::domain_error("null decomposition needs t > 0 and |x| > 0");
  const DerivTable tab = phi.derivatives(p.t, p.x, 1);
  Jet::Key k{};
  k[0] = 1;
  const double ft = tab.at(k);
  Vec fx(n);
  for (int i = 0; i < n; ++i) {
    Jet::Key ki{};
    ki[static_cast<std::size_t>(i + 1)] = 1;
    fx(i) = tab.at(ki);
  }
  const Vec omega = p.x / r;
  NullDecomposition d;
  d.outgoing = p.v0 * (ft + omega.dot(fx));
  // cone combination (x^j Om_ij + t Om_0i - x^i S) phi over t + r, contracted
  // with omega (the rotation block cancels identically in this contraction)
  double cone = 0.0;
  const double Sphi = p.t * ft + p.x.dot(fx);
  for (int i = 0; i < n; ++i) {
    double rot = 0.0;
    for (int j = 0; j < n; ++j) rot += p.x(j) * (p.x(i) * fx(j) - p.x(j) * fx(i));
    const double boost = p.t * (p.t * fx(i) + p.x(i) * ft);
    cone += omega(i) * (rot + boost - p.x(i) * Sphi);
  }
  d.rotational_boost = -(p.v0 / p.t) * cone / (p.t + r);
  for (int i = 0; i < n; ++i) d.z_weighted += ((p.v(i) * p.t - p.x(i) * p.v0) / p.t) * fx(i);
  return d;
}

// ---------------------------------------------------------------------------
// Hyperboloidal wave energy
// ---------------------------------------------------------------------------

double wave_energy_density(double rho, double t, const Vec& x, double psi_t, const Vec& psi_x) {
  const double r = x.norm();
  if (!(t > r)) throw std::domain_error("energy density lives inside the light cone");
  const double psi_r = r > 0.0 ? x.dot(psi_x) / r : psi_x.norm();
  const double slash2 = std::max(0.0, psi_x.squaredNorm() - psi_r * psi_r);
  const double sq = psi_t + psi_r;
  return (t / (2.0 * rho)) *
         (slash2 + (1.0 - r / t) * (psi_t * psi_t + psi_r * psi_r) + (r / t) * sq * sq);
}

FoliationLeaf wave_energy_leaf(const WaveField& phi, double rho, const QuadratureSpec& q) {
  if (!(rho >= 1.0)) throw std::invalid_argument("wave energy leaf: rho must be >= 1");
  const auto win = phi.profile_window();
  if (!win)
    throw std::invalid_argument("wave energy: field is not spatially localized (plane modes)");
  const double a = std::max((*win)[0], 1e-8), b = (*win)[1];
  double lo = rho, hi = 0.0;
  // direct piece: u = t - r in (a, b)
  if (a < rho) {
    lo = std::min(lo, a);
    hi = std::max(hi, std::min(b, rho));
  }
  // reflected piece: t + r = rho^2 / u in (a, b)
  const double ra = rho * rho / b, rb = std::min(rho * rho / a, rho);
  if (ra < rho) {
    lo = std::min(lo, ra);
    hi = std::max(hi, rb);
  }
  if (!(lo < hi)) {  // field vanishes on this hyperboloid; keep a token leaf
    lo = 0.5 * rho;
    hi = rho;
  }
  return build_leaf_hyperboloid_u(rho, phi.dim(), lo, hi, q);
}

WaveEnergyReport wave_energy_hyperboloid(const ScalarSpacetimeField& phi, int N, double rho,
                                         const FoliationLeaf& leaf) {
  if (leaf.kind != FoliationLeaf::Kind::hyperboloid)
    throw std::invalid_argument("wave energy: leaf must be a hyperboloid");
  if (std::abs(leaf.param - rho) > 1e-12 * std::max(1.0, rho))
    throw std::invalid_argument("wave energy: leaf and rho disagree");
  const int n = phi.dim();
  if (N + 1 > phi.max_order())
    throw std::invalid_argument("wave energy: order exceeds the field's derivative budget");

  const auto catalog = base_catalog(AlgebraId::P, n);
  const auto words = multi_indices(AlgebraId::P, n, N);
  struct Prepared {
    std::string label;
    std::vector<SpacetimeWord> grad;  // n+1 partial expansions
  };
  std::vector<Prepared> prep;
  prep.reserve(words.size());
  for (const auto& w : words) {
    Prepared pr;
    if (w.seq.empty()) pr.label = "1";
    for (int k : w.seq) pr.label += (pr.label.empty() ? "" : " ") + catalog[static_cast<std::size_t>(k)].id;
    const SpacetimeWord base = SpacetimeWord::from_word(catalog, w.seq, n);
    for (int mu = 0; mu <= n; ++mu) pr.grad.push_back(base.partial(mu));
    prep.push_back(std::move(pr));
  }

  WaveEnergyReport rep;
  rep.rho = rho;
  rep.order = N;
  std::vector<double> sums(prep.size(), 0.0);
  Vec psi_x(n);
  for (const auto& node : leaf.nodes) {
    const double t = leaf.time_at(node.x);
    const DerivTable tab = phi.derivatives(t, node.x, N + 1);
    for (std::size_t wdx = 0; wdx < prep.size(); ++wdx) {
      const double psi_t = prep[wdx].grad[0].eval_with(tab, t, node.x);
      for (int i = 0; i < n; ++i)
        psi_x(i) = prep[wdx].grad[static_cast<std::size_t>(i + 1)].eval_with(tab, t, node.x);
      sums[wdx] += node.w * wave_energy_density(rho, t, node.x, psi_t, psi_x);
    }
  }
  for (std::size_t wdx = 0; wdx < prep.size(); ++wdx) {
    rep.rows.push_back({prep[wdx].label, sums[wdx]});
    rep.value += sums[wdx];
  }

  // boundary-density indicator: total density sampled just outside the two
  // radial cutoffs, scaled by one radial cell of measure
  const double dr = (leaf.r_hi - leaf.r_lo) / std::max(1, leaf.radial);
  double boundary = 0.0;
  for (const double r : {std::max(leaf.r_lo - 0.5 * dr, 0.25 * leaf.r_lo), leaf.r_hi + 0.5 * dr}) {
    if (!(r > 0.0)) continue;
    Vec x = Vec::Zero(n);
    x(0) = r;
    const double t = std::sqrt(rho * rho + r * r);
    const DerivTable tab = phi.derivatives(t, x, N + 1);
    double dens = 0.0;
    for (const auto& pr : prep) {
      const double psi_t = pr.grad[0].eval_with(tab, t, x);
      for (int i = 0; i < n; ++i) psi_x(i) = pr.grad[static_cast<std::size_t>(i + 1)].eval_with(tab, t, x);
      dens += wave_energy_density(rho, t, x, psi_t, psi_x);
    }
    boundary = std::max(boundary, dens * sphere_area(n) * std::pow(r, n - 1) * dr * (rho / t));
  }
  rep.truncation_tail = boundary;
  return rep;
}

double wave_source_moment(const ScalarSpacetimeField& phi, const FoliationLeaf& leaf) {
  if (leaf.kind != FoliationLeaf::Kind::hyperboloid)
    throw std::invalid_argument("source moment: leaf must be a hyperboloid");
  const int n = phi.dim();
  double out = 0.0;
  Jet::Key kt{};
  kt[0] = 1;
  for (const auto& node : leaf.nodes) {
    const double t = leaf.time_at(node.x);
    const DerivTable tab = phi.derivatives(t, node.x, 2);
    out += node.w * tab.at(kt) * wave_operator(tab, n);
  }
  return out;
}

double wave_operator(const DerivTable& tab, int n) {
  Jet::Key k{};
  k[0] = 2;
  double out = -tab.at(k);
  for (int i = 1; i <= n; ++i) {
    Jet::Key ki{};
    ki[static_cast<std::size_t>(i)] = 2;
    out += tab.at(ki);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise decay checks
// ---------------------------------------------------------------------------

WaveDecayReport wave_decay_checks(const WaveField& phi, int N,
                                  const std::vector<std::pair<double, Vec>>& samples,
                                  const QuadratureSpec& q) {
  if (!phi.localized())
    throw std::invalid_argument("wave decay checks: plane modes carry infinite energy");
  const int n = phi.dim();
  const FoliationLeaf leaf = wave_energy_leaf(phi, 1.0, q);
  const WaveEnergyReport rep = wave_energy_hyperboloid(phi, N, 1.0, leaf);

  WaveDecayReport out;
  out.energy_N = rep.value;
  out.energy_0 = rep.rows.empty() ? 0.0 : rep.rows.front().contribution;

  const auto catalog = base_catalog(AlgebraId::P, n);
  const auto words = multi_indices(AlgebraId::P, n, N);
  std::vector<std::vector<SpacetimeWord>> grads;
  for (const auto& w : words) {
    const SpacetimeWord base = SpacetimeWord::from_word(catalog, w.seq, n);
    std::vector<SpacetimeWord> g;
    for (int mu = 0; mu <= n; ++mu) g.push_back(base.partial(mu));
    grads.push_back(std::move(g));
  }

  double sup_grad = 0.0, sup_line = 0.0;
  for (const auto& [t, x] : samples) {
    const double r = x.norm();
    if (!(t > r) || !(r > 0.0))
      throw std::invalid_argument("wave decay checks: samples must satisfy t > |x| > 0");
    const DerivTable tab = phi.derivatives(t, x, N + 1);
    const double wgt = std::pow(t, 0.5 * (n - 1)) * std::sqrt(t - r);
    for (const auto& g : grads) {
      double g2 = 0.0;
      for (int mu = 0; mu <= n; ++mu) {
        const double d = g[static_cast<std::size_t>(mu)].eval_with(tab, t, x);
        g2 += d * d;
      }
      sup_grad = std::max(sup_grad, std::sqrt(g2) * wgt);
    }
    sup_line = std::max(sup_line, std::abs(phi.value(t, x)) * std::pow(t, 0.5 * (n - 1)) /
                                      std::sqrt(t - r));
  }
  out.sup_weighted_gradient = out.energy_N > 0.0 ? sup_grad / std::sqrt(out.energy_N) : 0.0;
  out.sup_null_line = out.energy_0 > 0.0 ? sup_line / std::sqrt(out.energy_0) : 0.0;
  return out;
}

}  // namespace kintran
