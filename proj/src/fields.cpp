#include "kintran/fields.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "kintran/jet.hpp"

namespace kintran {

namespace {
ShellPoly sp_zero(int n, const Rat& msq) { return ShellPoly(n, msq); }

void check_compatible(const LiftedField& f, const LiftedField& g) {
  if (f.n != g.n || f.msq != g.msq) throw std::invalid_argument("lifted fields: mixed shells");
}

LiftedField make_zero_field(int n, const Rat& msq) {
  LiftedField r;
  r.n = n;
  r.msq = msq;
  r.a.assign(static_cast<std::size_t>(n) + 1, sp_zero(n, msq));
  r.b.assign(static_cast<std::size_t>(n), sp_zero(n, msq));
  return r;
}
}  // namespace

bool LiftedField::is_zero() const {
  for (const auto& c : a)
    if (!c.is_zero()) return false;
  for (const auto& c : b)
    if (!c.is_zero()) return false;
  return true;
}

bool LiftedField::equals(const LiftedField& o) const {
  check_compatible(*this, o);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].equals(o.a[i])) return false;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!b[i].equals(o.b[i])) return false;
  return true;
}

std::string algebra_name(AlgebraId id) {
  switch (id) {
    case AlgebraId::P: return "P";
    case AlgebraId::K: return "K";
    case AlgebraId::Phat: return "Phat";
    case AlgebraId::Khat: return "Khat";
    case AlgebraId::Phat0: return "Phat0";
    case AlgebraId::Khat0: return "Khat0";
  }
  throw std::logic_error("algebra_name: unreachable");
}

AlgebraId algebra_from_name(const std::string& name) {
  for (AlgebraId id : {AlgebraId::P, AlgebraId::K, AlgebraId::Phat, AlgebraId::Khat,
                       AlgebraId::Phat0, AlgebraId::Khat0})
    if (algebra_name(id) == name) return id;
  throw std::invalid_argument("unknown algebra: " + name);
}

std::vector<BaseField> base_catalog(AlgebraId id, int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("base_catalog: dimension out of range");
  if (id != AlgebraId::P && id != AlgebraId::K)
    throw std::invalid_argument("base_catalog: only the spacetime families P and K");
  std::vector<BaseField> cat;
  auto zero = [&] { return std::vector<Poly>(static_cast<std::size_t>(n) + 1, Poly(n)); };
  {
    BaseField f{"d_t", n, zero()};
    f.w[0] = Poly::constant(n, Rat(1));
    cat.push_back(f);
  }
  for (int i = 1; i <= n; ++i) {
    BaseField f{"d_x" + std::to_string(i), n, zero()};
    f.w[static_cast<std::size_t>(i)] = Poly::constant(n, Rat(1));
    cat.push_back(f);
  }
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      BaseField f{"Om_" + std::to_string(i) + std::to_string(j), n, zero()};
      f.w[static_cast<std::size_t>(j)] = Poly::x(n, i);
      f.w[static_cast<std::size_t>(i)] = -Poly::x(n, j);
      cat.push_back(f);
    }
  for (int i = 1; i <= n; ++i) {
    BaseField f{"Om_0" + std::to_string(i), n, zero()};
    f.w[static_cast<std::size_t>(i)] = Poly::t(n);
    f.w[0] = Poly::x(n, i);
    cat.push_back(f);
  }
  if (id == AlgebraId::K) {
    BaseField f{"S", n, zero()};
    f.w[0] = Poly::t(n);
    for (int i = 1; i <= n; ++i) f.w[static_cast<std::size_t>(i)] = Poly::x(n, i);
    cat.push_back(f);
  }
  return cat;
}

LiftedField complete_lift(const BaseField& w, const Rat& msq) {
  const int n = w.n;
  if (static_cast<int>(w.w.size()) != n + 1) throw std::invalid_argument("complete_lift: bad components");
  for (const auto& comp : w.w)
    for (const auto& [m, c] : comp.terms())
      for (int s = n + 1; s <= 2 * n + 1; ++s)
        if (m.e[static_cast<std::size_t>(s)] != 0)
          throw std::invalid_argument("complete_lift: components must depend on (t,x) only");
  LiftedField r = make_zero_field(n, msq);
  r.id = w.id;
  for (int al = 0; al <= n; ++al) r.a[static_cast<std::size_t>(al)] = ShellPoly(w.w[static_cast<std::size_t>(al)], msq);
  for (int i = 1; i <= n; ++i) {
    Poly vert(n);
    vert += Poly::v0(n) * w.w[static_cast<std::size_t>(i)].d_t();
    for (int j = 1; j <= n; ++j) vert += Poly::v(n, j) * w.w[static_cast<std::size_t>(i)].d_x(j);
    r.b[static_cast<std::size_t>(i - 1)] = ShellPoly(vert, msq);
  }
  return r;
}

LiftedField horizontal_field(const BaseField& w, const Rat& msq) {
  LiftedField r = complete_lift(w, msq);
  for (auto& c : r.b) c = sp_zero(w.n, msq);
  return r;
}

std::vector<LiftedField> lifted_catalog(AlgebraId id, int n, const Rat& msq) {
  std::vector<LiftedField> cat;
  switch (id) {
    case AlgebraId::P:
    case AlgebraId::K:
      for (const auto& w : base_catalog(id, n)) cat.push_back(horizontal_field(w, msq));
      break;
    case AlgebraId::Phat:
      for (const auto& w : base_catalog(AlgebraId::P, n)) cat.push_back(complete_lift(w, msq));
      break;
    case AlgebraId::Khat:
      for (const auto& w : base_catalog(AlgebraId::K, n)) cat.push_back(complete_lift(w, msq));
      break;
    case AlgebraId::Phat0:
    case AlgebraId::Khat0: {
      cat = lifted_catalog(id == AlgebraId::Phat0 ? AlgebraId::Phat : AlgebraId::Khat, n, msq);
      BaseField s = base_catalog(AlgebraId::K, n).back();
      s.id = "S_tx";
      cat.push_back(horizontal_field(s, msq));
      break;
    }
  }
  return cat;
}

LiftedField transport_field(int n, const Rat& msq) {
  LiftedField r = make_zero_field(n, msq);
  r.id = "T";
  r.a[0] = ShellPoly(Poly::v0(n), msq);
  for (int i = 1; i <= n; ++i) r.a[static_cast<std::size_t>(i)] = ShellPoly(Poly::v(n, i), msq);
  return r;
}

LiftedField vertical_scaling(int n, const Rat& msq) {
  LiftedField r = make_zero_field(n, msq);
  r.id = "v.dv";
  for (int i = 1; i <= n; ++i) r.b[static_cast<std::size_t>(i - 1)] = ShellPoly(Poly::v(n, i), msq);
  return r;
}

ShellPoly apply_sym(const LiftedField& F, const ShellPoly& h) {
  ShellPoly r = F.a[0] * h.d_t();
  for (int i = 1; i <= F.n; ++i) r += F.a[static_cast<std::size_t>(i)] * h.d_x(i);
  for (int i = 1; i <= F.n; ++i) r += F.b[static_cast<std::size_t>(i - 1)] * h.d_v(i);
  return r;
}

LiftedField lie_bracket(const LiftedField& F, const LiftedField& G) {
  check_compatible(F, G);
  LiftedField r = make_zero_field(F.n, F.msq);
  r.id = "[" + F.id + "," + G.id + "]";
  for (std::size_t al = 0; al < r.a.size(); ++al)
    r.a[al] = apply_sym(F, G.a[al]) - apply_sym(G, F.a[al]);
  for (std::size_t i = 0; i < r.b.size(); ++i)
    r.b[i] = apply_sym(F, G.b[i]) - apply_sym(G, F.b[i]);
  return r;
}

TransportCommutator transport_commutator(const LiftedField& Z) {
  const LiftedField T = transport_field(Z.n, Z.msq);
  TransportCommutator out;
  out.bracket = lie_bracket(T, Z);
  if (out.bracket.is_zero()) {
    out.kind = TransportCommutator::Kind::zero;
    return out;
  }
  bool vertical_free = true;
  for (const auto& c : out.bracket.b) vertical_free = vertical_free && c.is_zero();
  if (vertical_free) {
    bool proportional = true;
    const ShellPoly v0 = ShellPoly(Poly::v0(Z.n), Z.msq);
    for (int i = 1; i <= Z.n && proportional; ++i) {
      const ShellPoly vi = ShellPoly(Poly::v(Z.n, i), Z.msq);
      proportional = (out.bracket.a[0] * vi - out.bracket.a[static_cast<std::size_t>(i)] * v0).is_zero();
    }
    if (proportional) {
      const ShellPoly lam = out.bracket.a[0] * ShellPoly::from_ratio(Poly::constant(Z.n, Rat(1)), 1, Z.msq);
      if (lam.den_pow() == 0 && lam.num().terms().size() == 1 &&
          lam.num().terms().begin()->first == Mono{}) {
        out.kind = TransportCommutator::Kind::multiple_of_transport;
        out.factor = lam.num().terms().begin()->second;
        return out;
      }
    }
  }
  out.kind = TransportCommutator::Kind::other;
  return out;
}

namespace detail {
std::optional<std::vector<Rat>> solve_linear_rat(std::vector<std::vector<Rat>> rows,
                                                 std::size_t unknowns) {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t col = 0; col < unknowns && rank < rows.size(); ++col) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][col] == Rat(0)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[rank]);
    const Rat piv = rows[rank][col];
    for (auto& e : rows[rank]) e /= piv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == Rat(0)) continue;
      const Rat f = rows[r][col];
      for (std::size_t c2 = 0; c2 <= unknowns; ++c2) rows[r][c2] -= f * rows[rank][c2];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r][unknowns] != Rat(0)) return std::nullopt;
  std::vector<Rat> sol(unknowns, Rat(0));
  for (std::size_t r = 0; r < rank; ++r) sol[pivot_col[r]] = rows[r][unknowns];
  return sol;
}
}  // namespace detail

namespace {
// Shared row builder: align denominator powers of shell expressions and
// match reduced numerator monomials.
void append_rows(std::vector<std::vector<Rat>>& rows, const ShellPoly& target,
                 const std::vector<const ShellPoly*>& basis, const Rat& msq, int n) {
  const std::size_t K = basis.size();
  int D = target.den_pow();
  for (const auto* p : basis) D = std::max(D, p->den_pow());
  auto lifted_num = [&](const ShellPoly& p) {
    Poly q = p.num();
    const Poly v0 = Poly::v0(n);
    for (int k = p.den_pow(); k < D; ++k) q = q * v0;
    return q.reduce_v0(msq);
  };
  std::map<Mono, std::size_t> row_of;
  const std::size_t base = rows.size();
  auto row_for = [&](const Mono& m) {
    auto it = row_of.find(m);
    if (it == row_of.end()) {
      it = row_of.emplace(m, rows.size()).first;
      rows.emplace_back(K + 1, Rat(0));
    }
    return it->second;
  };
  (void)base;
  for (std::size_t k = 0; k < K; ++k)
    for (const auto& [m, c] : lifted_num(*basis[k]).terms()) rows[row_for(m)][k] = c;
  for (const auto& [m, c] : lifted_num(target).terms()) rows[row_for(m)][K] = c;
}
}  // namespace

std::optional<std::vector<Rat>> decompose_constant(const LiftedField& X,
                                                   const std::vector<LiftedField>& basis) {
  if (basis.empty()) return X.is_zero() ? std::optional<std::vector<Rat>>({}) : std::nullopt;
  for (const auto& bf : basis) check_compatible(X, bf);
  const int n = X.n;
  std::vector<std::vector<Rat>> rows;
  for (int s = 0; s < 2 * n + 1; ++s) {
    auto get = [&](const LiftedField& f) -> const ShellPoly& {
      return s <= n ? f.a[static_cast<std::size_t>(s)] : f.b[static_cast<std::size_t>(s - n - 1)];
    };
    std::vector<const ShellPoly*> cols;
    for (const auto& bf : basis) cols.push_back(&get(bf));
    append_rows(rows, get(X), cols, X.msq, n);
  }
  return detail::solve_linear_rat(std::move(rows), basis.size());
}

std::optional<std::vector<Rat>> decompose_shell(const ShellPoly& X,
                                                const std::vector<ShellPoly>& basis) {
  std::vector<std::vector<Rat>> rows;
  std::vector<const ShellPoly*> cols;
  for (const auto& b : basis) {
    if (b.dim() != X.dim() || b.msq() != X.msq())
      throw std::invalid_argument("decompose_shell: mixed shells");
    cols.push_back(&b);
  }
  append_rows(rows, X, cols, X.msq(), X.dim());
  return detail::solve_linear_rat(std::move(rows), basis.size());
}

// Compositions are indexed by exponent multi-indices over the ordered
// catalog: Z^alpha = (Z^1)^{alpha_1} (Z^2)^{alpha_2} ...  Each operator is
// represented once, as the non-decreasing word of catalog indices
// (leftmost factor applied last).
std::vector<MultiIndex> multi_indices(AlgebraId id, int n, int max_order) {
  if (max_order < 0 || max_order > 6) throw std::invalid_argument("multi_indices: order out of range");
  const int c = static_cast<int>(lifted_catalog(id, n, Rat(0)).size());
  std::vector<MultiIndex> out;
  std::vector<int> seq;
  std::function<void(int, int)> rec = [&](int depth, int start) {
    out.push_back({id, seq});
    if (depth == max_order) return;
    for (int k = start; k < c; ++k) {
      seq.push_back(k);
      rec(depth + 1, k);
      seq.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

namespace {
double fd_partial(const PhaseFunction& f, const PhasePoint& p, int slot) {
  const int n = p.dim();
  auto shifted = [&](double h) {
    double t = p.t;
    Vec x = p.x, v = p.v;
    if (slot == 0)
      t += h;
    else if (slot <= n)
      x(slot - 1) += h;
    else
      v(slot - n - 1) += h;
    return make_phase_point(t, x, v, p.m);
  };
  const double coord = slot == 0 ? p.t : (slot <= n ? p.x(slot - 1) : p.v(slot - n - 1));
  const double h = std::cbrt(2.2e-16) * (1.0 + std::abs(coord));
  auto central = [&](double hh) { return (f.value(shifted(hh)) - f.value(shifted(-hh))) / (2 * hh); };
  const double d1 = central(h), d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}
}  // namespace

double apply(const LiftedField& F, const PhaseFunction& f, const PhasePoint& p) {
  if (p.dim() != F.n) throw std::invalid_argument("apply: dimension mismatch");
  const double mm = to_double(F.msq);
  if (std::abs(p.m * p.m - mm) > 1e-12 * (1 + mm))
    throw std::invalid_argument("apply: phase point is on a different mass shell");
  auto d = [&](int slot) { return f.d1 ? f.d1(p, slot) : fd_partial(f, p, slot); };
  double s = 0.0;
  for (int al = 0; al <= F.n; ++al) {
    const ShellPoly& c = F.a[static_cast<std::size_t>(al)];
    if (c.is_zero()) continue;
    s += c.eval(p.t, p.x.data(), p.v.data()) * d(al);
  }
  for (int i = 1; i <= F.n; ++i) {
    const ShellPoly& c = F.b[static_cast<std::size_t>(i - 1)];
    if (c.is_zero()) continue;
    s += c.eval(p.t, p.x.data(), p.v.data()) * d(F.n + i);
  }
  return s;
}

namespace {
// first partials (g_t, g_x1..g_xn) of a battery of smooth test functions
struct TestFn {
  double val;
  std::vector<double> d;  // size n+1
};

std::vector<TestFn> battery(double t, const Vec& x) {
  const int n = static_cast<int>(x.size());
  std::vector<TestFn> out;
  const double cs[4] = {0.3, -0.7, 0.4, 0.2};
  std::vector<Jet> seeds;
  seeds.push_back(Jet::variable(1 + n, 1, 0, t));
  for (int i = 0; i < n; ++i) seeds.push_back(Jet::variable(1 + n, 1, 1 + i, x(i)));

  auto record = [&](const Jet& g) {
    TestFn f;
    f.val = g.value();
    for (int s = 0; s <= n; ++s) {
      Jet::Key k{};
      k[static_cast<std::size_t>(s)] = 1;
      f.d.push_back(g.partial(k));
    }
    out.push_back(f);
  };

  Jet q = seeds[0] * seeds[0];
  Jet lin = Jet::constant(1 + n, 1, 0.0);
  for (int i = 0; i < n; ++i) {
    q = q + seeds[static_cast<std::size_t>(i + 1)] * seeds[static_cast<std::size_t>(i + 1)];
    lin = lin + cs[i] * seeds[static_cast<std::size_t>(i + 1)];
  }
  record(exp(-0.1 * q));
  record(sin(seeds[0] + lin));
  record(inv(1.0 + q));
  return out;
}
}  // namespace

std::vector<std::string> minkowski_identity_names() {
  return {"cone-dt", "cone-dx", "cone-dr", "null-ds", "angular-dbar"};
}

double minkowski_identity_residual(const std::string& identity, int n,
                                   const std::vector<std::pair<double, Vec>>& points) {
  if (n < 1 || n > 4) throw std::invalid_argument("identity_residual: dimension out of range");
  bool known = false;
  for (const auto& nm : minkowski_identity_names()) known = known || nm == identity;
  if (!known) throw std::invalid_argument("identity_residual: unknown identity " + identity);
  if (points.empty()) throw std::invalid_argument("identity_residual: no sample points");

  double worst = 0.0;
  for (const auto& [t, x] : points) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("identity_residual: bad point");
    const double r = x.norm();
    const bool needs_radial = identity == "cone-dr" || identity == "null-ds" || identity == "angular-dbar";
    if (needs_radial && r < 1e-12)
      throw std::domain_error("identity_residual: identity undefined on the spatial axis r = 0");
    for (const TestFn& g : battery(t, x)) {
      const double gt = g.d[0];
      auto gx = [&](int i) { return g.d[static_cast<std::size_t>(i)]; };  // 1-based
      double S = t * gt;
      for (int i = 1; i <= n; ++i) S += x(i - 1) * gx(i);
      auto Om0 = [&](int i) { return t * gx(i) + x(i - 1) * gt; };
      auto Om = [&](int i, int j) { return x(i - 1) * gx(j) - x(j - 1) * gx(i); };
      const double gr = [&] {
        double s = 0.0;
        for (int i = 1; i <= n; ++i) s += (r > 0 ? x(i - 1) / r : 0.0) * gx(i);
        return s;
      }();
      auto track = [&](double lhs, double rhs) { worst = std::max(worst, std::abs(lhs - rhs)); };

      if (identity == "cone-dt") {
        double rhs = t * S;
        for (int i = 1; i <= n; ++i) rhs -= x(i - 1) * Om0(i);
        track((t * t - r * r) * gt, rhs);
      } else if (identity == "cone-dx") {
        // sign note: with Omega_ij = x^i d_j - x^j d_i the rotation term
        // enters with +x^j Omega_ij (check against g = x^k).
        for (int i = 1; i <= n; ++i) {
          double rhs = t * Om0(i) - x(i - 1) * S;
          for (int j = 1; j <= n; ++j)
            if (j != i) rhs += x(j - 1) * Om(i, j);
          track((t * t - r * r) * gx(i), rhs);
        }
      } else if (identity == "cone-dr") {
        double rhs = -r * S;
        for (int i = 1; i <= n; ++i) rhs += t * (x(i - 1) / r) * Om0(i);
        track((t * t - r * r) * gr, rhs);
      } else if (identity == "null-ds") {
        if (std::abs(t + r) < 1e-12) throw std::domain_error("identity_residual: t + r = 0");
        double rhs = S;
        for (int i = 1; i <= n; ++i) rhs += (x(i - 1) / r) * Om0(i);
        rhs /= 2 * (t + r);
        track(0.5 * (gt + gr), rhs);
      } else {  // angular-dbar
        if (std::abs(t) < 1e-12) throw std::domain_error("identity_residual: t = 0");
        double om_dot = 0.0;
        for (int j = 1; j <= n; ++j) om_dot += (x(j - 1) / r) * Om0(j);
        for (int i = 1; i <= n; ++i) {
          const double lhs = gx(i) - (x(i - 1) / r) * gr;
          const double rhs = (Om0(i) - (x(i - 1) / r) * om_dot) / t;
          track(lhs, rhs);
        }
      }
    }
  }
  return worst;
}

}  // namespace kintran
