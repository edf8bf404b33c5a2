#include "kintran/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "kintran/weights.hpp"

namespace kintran {

namespace {

bool is_free(const DistributionField& F) {
  return F.law == TransportLaw::free_massive || F.law == TransportLaw::free_massless;
}

// The derivative words of a norm, prepared once per evaluation: exact lifted
// expansions for free laws (all sharing one footpoint and one datum
// derivative table per phase node), nested-difference words otherwise.
struct WordBattery {
  std::vector<LiftedExpansion> exact;
  const Datum* d0 = nullptr;
  int datum_order = 0;
  std::vector<LiftedField> catalog;
  std::vector<std::vector<int>> fd_seqs;
  long count = 0;
};

WordBattery build_battery(const DistributionField& F, AlgebraId algebra,
                          const std::vector<MultiIndex>& words, int fd_budget) {
  WordBattery b;
  if (is_free(F)) {
    for (const MultiIndex& w : words) {
      b.exact.push_back(lift_word(F, w));
      b.datum_order = std::max(b.datum_order, b.exact.back().datum_order());
    }
    if (!b.exact.empty()) b.d0 = &b.exact.front().base_datum();
    b.count = static_cast<long>(b.exact.size());
  } else {
    for (const MultiIndex& w : words)
      if (w.order() > fd_budget)
        throw std::invalid_argument(
            "norms: derivative order beyond the nested-difference budget of this law");
    b.catalog = lifted_catalog(algebra, F.n, exact_shell_mass_sq(F.m));
    for (const MultiIndex& w : words) b.fd_seqs.push_back(w.seq);
    b.count = static_cast<long>(b.fd_seqs.size());
  }
  return b;
}

std::vector<MultiIndex> words_between(AlgebraId algebra, int n, int lo, int hi) {
  std::vector<MultiIndex> out;
  if (hi < lo) return out;
  for (MultiIndex& w : multi_indices(algebra, n, hi))
    if (w.order() >= lo) out.push_back(std::move(w));
  return out;
}

// seq[0] is the outermost factor: differentiate the tail of the word.
double fd_word(const DistributionField& F, const WordBattery& b, const std::vector<int>& seq,
               std::size_t k, const PhasePoint& p) {
  if (k == seq.size()) return evaluate(F, p);
  PhaseFunction g;
  g.value = [&](const PhasePoint& q) { return fd_word(F, b, seq, k + 1, q); };
  return apply(b.catalog[static_cast<std::size_t>(seq[k])], g, p);
}

// sum_a |Z^a f|(p) over the battery.
double battery_density(const DistributionField& F, const WordBattery& b, const PhasePoint& p) {
  double s = 0.0;
  if (!b.exact.empty()) {
    const LiftedExpansion& lead = b.exact.front();
    const PhasePoint frame = lead.frame_point(p);
    const Vec a = lead.footpoint_x(frame);
    const DerivTable tab = b.d0->derivatives(a, p.v, b.datum_order);
    for (const LiftedExpansion& e : b.exact) s += std::abs(e.eval_with(tab, frame));
  }
  for (const auto& seq : b.fd_seqs) s += std::abs(fd_word(F, b, seq, 0, p));
  return s;
}

// Inner settings shared by all families; the norm applies its own truncation
// guard to the accumulated budget, so the per-node guard is disabled.
MomentSpec inner_spec(const NormSpec& spec, MomentWeight w, std::vector<int> momenta) {
  MomentSpec m = spec.moment;
  m.weight = w;
  m.momenta = std::move(momenta);
  m.absolute = false;  // battery densities are nonnegative already
  m.scale = nullptr;
  m.scale_bound = 1.0;
  m.tail_tol = std::numeric_limits<double>::infinity();
  return m;
}

std::function<double(const PhasePoint&)> chi_scale(double t, const Vec& x, double rho) {
  const Vec xc = x;
  return [t, xc, rho](const PhasePoint& p) { return (t * p.v0 - xc.dot(p.v)) / (rho * p.v0); };
}

// One leaf node of a norm: the leaf integrand value, its truncation
// contribution, and the two diagnostics tracked across the leaf.
struct NodeResult {
  double value = 0.0;
  double tail = 0.0;
  double sup_metric = 0.0;
  double l1_metric = 0.0;
};

// Leaf-weighted accumulation in fixed node order, plus a sampled estimate of
// the mass outside the radial window: the largest outermost-ring density
// extended over one more window length of radius.
NormValue accumulate_leaf(FoliationLeaf::Kind kind, double param, int n, const NormSpec& spec,
                          const std::function<NodeResult(double, const Vec&)>& node) {
  const FoliationLeaf leaf = build_leaf(kind, param, n, spec.r_lo, spec.r_hi, spec.leaf_quad);
  std::vector<double> radii(leaf.nodes.size());
  double r_edge = 0.0;
  for (std::size_t i = 0; i < leaf.nodes.size(); ++i) {
    radii[i] = leaf.nodes[i].x.norm();
    r_edge = std::max(r_edge, radii[i]);
  }
  NormValue out;
  double edge_density = 0.0;
  for (std::size_t i = 0; i < leaf.nodes.size(); ++i) {
    const Vec& x = leaf.nodes[i].x;
    const double w = leaf.nodes[i].w;
    const NodeResult r = node(leaf.time_at(x), x);
    out.value += w * r.value;
    out.tail_bound += w * r.tail;
    out.leaf_sup = std::max(out.leaf_sup, r.sup_metric);
    out.leaf_l1 += w * r.l1_metric;
    if (radii[i] >= r_edge * (1.0 - 1e-12)) edge_density = std::max(edge_density, std::abs(r.value));
  }
  double measure = std::pow(r_edge, n - 1);
  if (kind == FoliationLeaf::Kind::hyperboloid)
    measure *= param / std::hypot(param, r_edge);  // rho / t on the ring
  out.tail_bound += sphere_area(n) * edge_density * measure * std::max(spec.r_hi, 1.0);
  return out;
}

void truncation_guard(const NormValue& v, double tol) {
  if (!(v.tail_bound <= tol * (1.0 + std::abs(v.value))))
    throw std::runtime_error("norms: truncation error report: accumulated tail bound " +
                             std::to_string(v.tail_bound) + " exceeds tolerance " +
                             std::to_string(tol * (1.0 + std::abs(v.value))));
}

void require_massless(const DistributionField& F) {
  if (F.m != 0.0)
    throw std::invalid_argument("norms: this family is defined for massless laws");
}

void require_massive(const DistributionField& F, double rho) {
  if (!(F.m > 0.0))
    throw std::invalid_argument("norms: this family is defined for massive laws");
  if (!(rho > 0.0)) throw std::invalid_argument("norms: leaf parameter rho must be positive");
  if ((F.surface == DatumSurface::h1 || F.law == TransportLaw::vn_massive) && rho < 1.0)
    throw std::invalid_argument("norms: data on H_1 restrict the foliation to rho >= 1");
}

// sum over weight-word multi-indices |b| <= q of the products of |z|/v0:
// with h_l the complete homogeneous symmetric polynomial in the weight
// magnitudes, the level-l contribution is exactly h_l (Newton's recurrence
// over the power sums keeps every term positive).
double weight_word_sum(const std::vector<Weight>& kappa, int q, const PhasePoint& p) {
  std::vector<double> mag(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) mag[j] = std::abs(weight_eval(kappa[j], p));
  std::vector<double> power(static_cast<std::size_t>(q) + 1, 0.0);
  for (int k = 1; k <= q; ++k)
    for (double m : mag) power[static_cast<std::size_t>(k)] += std::pow(m, k);
  std::vector<double> h(static_cast<std::size_t>(q) + 1, 0.0);
  h[0] = 1.0;
  double total = 1.0;
  for (int l = 1; l <= q; ++l) {
    double s = 0.0;
    for (int k = 1; k <= l; ++k)
      s += power[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(l - k)];
    h[static_cast<std::size_t>(l)] = s / l;
    total += h[static_cast<std::size_t>(l)];
  }
  return total;
}

}  // namespace

std::string norm_family_name(NormFamily family) {
  switch (family) {
    case NormFamily::K:
      return "K";
    case NormFamily::P:
      return "P";
    case NormFamily::ENq:
      return "ENq";
    case NormFamily::EN_massive_vn:
      return "EN_massive_vn";
    case NormFamily::L2_hyperboloid:
      return "L2_hyperboloid";
  }
  throw std::logic_error("norms: unreachable family");
}

NormFamily norm_family_from_name(const std::string& name) {
  for (NormFamily f : {NormFamily::K, NormFamily::P, NormFamily::ENq, NormFamily::EN_massive_vn,
                       NormFamily::L2_hyperboloid})
    if (norm_family_name(f) == name) return f;
  throw std::invalid_argument("norms: unknown family name: " + name);
}

NormValue norm_K(const DistributionField& F, int k, double t, const NormSpec& spec) {
  return norm_ENq(F, k, 0, t, spec);
}

NormValue norm_ENq(const DistributionField& F, int N, int q, double t, const NormSpec& spec) {
  if (N < 0 || q < 0) throw std::invalid_argument("norms: derivative and weight orders must be >= 0");
  require_massless(F);
  const WordBattery battery =
      build_battery(F, AlgebraId::Khat, words_between(AlgebraId::Khat, F.n, 0, N), spec.fd_budget);
  const std::vector<Weight> kappa = weight_catalog_kappa0(F.n);

  MomentSpec ms = inner_spec(spec, MomentWeight::energy, {});
  if (q > 0)
    ms.scale = [&kappa, q](const PhasePoint& p) { return weight_word_sum(kappa, q, p); };

  NormValue out = accumulate_leaf(
      FoliationLeaf::Kind::fixed_time, t, F.n, spec, [&](double ti, const Vec& xi) {
        const MomentValue mv = velocity_average_of(
            F, [&](const PhasePoint& p) { return battery_density(F, battery, p); }, ms, ti, xi);
        return NodeResult{mv.value, mv.tail_bound, mv.value, mv.value};
      });
  out.words = battery.count;
  truncation_guard(out, spec.moment.tail_tol);
  return out;
}

NormValue norm_P(const DistributionField& F, int k, double rho, const NormSpec& spec) {
  if (k < 0) throw std::invalid_argument("norms: derivative order must be >= 0");
  require_massive(F, rho);
  const WordBattery battery =
      build_battery(F, AlgebraId::Phat, words_between(AlgebraId::Phat, F.n, 0, k), spec.fd_budget);

  NormValue out = accumulate_leaf(
      FoliationLeaf::Kind::hyperboloid, rho, F.n, spec, [&](double ti, const Vec& xi) {
        MomentSpec ms = inner_spec(spec, MomentWeight::energy, {});
        ms.scale = chi_scale(ti, xi, rho);
        const MomentValue mv = velocity_average_of(
            F, [&](const PhasePoint& p) { return battery_density(F, battery, p); }, ms, ti, xi);
        return NodeResult{mv.value, mv.tail_bound, mv.value, mv.value};
      });
  out.words = battery.count;
  truncation_guard(out, spec.moment.tail_tol);
  return out;
}

NormValue norm_EN_massive_vn(const DistributionField& F, int N, double rho, const NormSpec& spec) {
  if (N < 0) throw std::invalid_argument("norms: derivative order must be >= 0");
  require_massive(F, rho);
  if (F.m != 1.0)
    throw std::invalid_argument("norms: the mixed-weight hyperboloidal energy is an m = 1 norm");

  const int split = N / 2;
  const WordBattery low = build_battery(
      F, AlgebraId::Phat, words_between(AlgebraId::Phat, F.n, 0, split), spec.fd_budget);
  const WordBattery high = build_battery(
      F, AlgebraId::Phat, words_between(AlgebraId::Phat, F.n, split + 1, N), spec.fd_budget);

  auto block = [&](const WordBattery& battery, MomentWeight weight, std::vector<int> momenta) {
    return accumulate_leaf(
        FoliationLeaf::Kind::hyperboloid, rho, F.n, spec, [&](double ti, const Vec& xi) {
          MomentSpec ms = inner_spec(spec, weight, momenta);
          ms.scale = chi_scale(ti, xi, rho);
          const MomentValue mv = velocity_average_of(
              F, [&](const PhasePoint& p) { return battery_density(F, battery, p); }, ms, ti, xi);
          return NodeResult{mv.value, mv.tail_bound, mv.value, mv.value};
        });
  };

  // chi((v0)^2 g) needs the integrand weight (v0)^3 = (1/v0) (v0)^4.
  NormValue out = block(low, MomentWeight::momentum, {0, 0, 0, 0});
  out.low_part = out.value;
  out.words = low.count;
  if (high.count > 0) {
    const NormValue hi = block(high, MomentWeight::energy, {});
    out.high_part = hi.value;
    out.value += hi.value;
    out.tail_bound += hi.tail_bound;
    out.leaf_sup = std::max(out.leaf_sup, hi.leaf_sup);
    out.leaf_l1 += hi.leaf_l1;
    out.words += hi.words;
  }
  truncation_guard(out, spec.moment.tail_tol);
  return out;
}

NormValue l2_hyperboloid(const DistributionField& F, const MultiIndex& alpha, double rho,
                         const NormSpec& spec) {
  require_massive(F, rho);
  const WordBattery battery = build_battery(F, alpha.algebra, {alpha}, spec.fd_budget);

  NormValue out = accumulate_leaf(
      FoliationLeaf::Kind::hyperboloid, rho, F.n, spec, [&](double ti, const Vec& xi) {
        const MomentSpec ms = inner_spec(spec, MomentWeight::mu_measure, {});
        const MomentValue mv = velocity_average_of(
            F, [&](const PhasePoint& p) { return battery_density(F, battery, p); }, ms, ti, xi);
        const double metric = ti / rho;
        const double I = mv.value, tau = mv.tail_bound;
        return NodeResult{metric * I * I, metric * (2.0 * std::abs(I) * tau + tau * tau),
                          metric * std::abs(I), std::abs(I)};
      });
  out.words = battery.count;
  truncation_guard(out, spec.moment.tail_tol);
  return out;
}

NormValue evaluate_norm(const DistributionField& F, const NormSpec& spec, double leaf_param) {
  switch (spec.family) {
    case NormFamily::K:
      return norm_K(F, spec.order, leaf_param, spec);
    case NormFamily::P:
      return norm_P(F, spec.order, leaf_param, spec);
    case NormFamily::ENq:
      return norm_ENq(F, spec.order, spec.weight_order, leaf_param, spec);
    case NormFamily::EN_massive_vn:
      return norm_EN_massive_vn(F, spec.order, leaf_param, spec);
    case NormFamily::L2_hyperboloid:
      return l2_hyperboloid(F, MultiIndex{AlgebraId::Phat, spec.word}, leaf_param, spec);
  }
  throw std::logic_error("norms: unreachable family");
}

}  // namespace kintran
