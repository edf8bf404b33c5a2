#include "doctest.h"
#include "kintran/fields.hpp"
#include "kintran/weights.hpp"

#include <cmath>
#include <random>

using namespace kintran;

namespace {

const LiftedField& find(const std::vector<LiftedField>& cat, const std::string& id) {
  for (const auto& f : cat)
    if (f.id == id) return f;
  throw std::logic_error("no field " + id);
}

const Weight& find_weight(const std::vector<Weight>& ws, const std::string& id) {
  for (const auto& w : ws)
    if (w.id == id) return w;
  throw std::logic_error("no weight " + id);
}

}  // namespace

TEST_SUITE("weights") {
  TEST_CASE("catalog contents") {
    for (int n = 1; n <= 4; ++n) {
      const int pairs = (n + 1) * n / 2;
      CHECK(static_cast<int>(weight_catalog_massive(n, Rat(1)).size()) == pairs + n + 1);
      CHECK(static_cast<int>(weight_catalog_massless(n).size()) == pairs + n + 2);
      CHECK(weight_catalog_kappa0(n).size() == weight_catalog_massless(n).size());
    }
    // z_01 = v0 x1 - t v1
    const auto km = weight_catalog_massive(2, Rat(1));
    CHECK(km[0].id == "z_01");
    CHECK(km[0].expr.equals(
        ShellPoly(Poly::v0(2) * Poly::x(2, 1) - Poly::t(2) * Poly::v(2, 1), Rat(1))));
  }

  TEST_CASE("weights are exact first integrals of the transport flow") {
    for (const Rat msq : {Rat(1), Rat(4), Rat(0)})
      for (const auto& z : weight_catalog_massive(3, msq)) CHECK(transport_action(z).is_zero());
    for (const auto& z : weight_catalog_massless(3)) CHECK(transport_action(z).is_zero());
    // off the zero shell, T(x^a v_a) = -m^2
    const Rat msq(1);
    Poly xv = -(Poly::t(3) * Poly::v0(3));
    for (int i = 1; i <= 3; ++i) xv += Poly::x(3, i) * Poly::v(3, i);
    const Weight off{"z_xv_massive", ShellPoly(xv, msq)};
    CHECK(transport_action(off).equals(ShellPoly::constant(3, msq, Rat(-1))));
  }

  TEST_CASE("field action closes over the weight span with constants") {
    const int n = 2;
    // massive: Phat0 acting on k_m
    {
      const Rat msq(1);
      const auto zs = weight_catalog_massive(n, msq);
      std::vector<ShellPoly> span;
      for (const auto& z : zs) span.push_back(z.expr);
      for (const auto& Z : lifted_catalog(AlgebraId::Phat0, n, msq))
        for (const auto& z : zs) {
          auto c = decompose_shell(apply_sym(Z, z.expr), span);
          REQUIRE_MESSAGE(c.has_value(), Z.id, " on ", z.id, " escapes k_m");
        }
    }
    // massless: Khat0 acting on k_0, and on the bounded family k_0/v0
    {
      const auto zs = weight_catalog_massless(n);
      std::vector<ShellPoly> span;
      for (const auto& z : zs) span.push_back(z.expr);
      for (const auto& Z : lifted_catalog(AlgebraId::Khat0, n, Rat(0)))
        for (const auto& z : zs) {
          auto c = decompose_shell(apply_sym(Z, z.expr), span);
          REQUIRE_MESSAGE(c.has_value(), Z.id, " on ", z.id, " escapes k_0");
        }
    }
  }

  TEST_CASE("normalized weights close with bounded, not constant, coefficients") {
    const int n = 2;
    const auto ks = weight_catalog_kappa0(n);
    std::vector<ShellPoly> kspan;
    for (const auto& k : ks) kspan.push_back(k.expr);
    const auto cat = lifted_catalog(AlgebraId::Khat0, n, Rat(0));

    // Z(z/v0) = (Zz)/v0 - (z/v0)(Zv0/v0): the second term carries a v^i/v0
    // factor, so a boost acting on a boost weight leaves the constant span
    const ShellPoly esc = apply_sym(find(cat, "Om_01"), find_weight(ks, "k_01").expr);
    CHECK_FALSE(decompose_shell(esc, kspan).has_value());

    // what the norm machinery uses: |Z(z/v0)| <= C sum |z'/v0| pointwise
    std::mt19937 rng(2026);
    std::uniform_real_distribution<double> box(-2.0, 2.0), rad(0.2, 3.0), tt(0.5, 3.0);
    std::vector<std::vector<ShellPoly>> acted;
    for (const auto& Z : cat) {
      acted.emplace_back();
      for (const auto& k : ks) acted.back().push_back(apply_sym(Z, k.expr));
    }
    const double C = 8.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double t = tt(rng);
      std::array<double, 2> x{}, v{};
      for (int i = 0; i < n; ++i) { x[i] = box(rng); v[i] = box(rng); }
      if (std::hypot(v[0], v[1]) < 0.2) { v[0] = rad(rng); v[1] = 0.0; }
      double family = 0.0;
      for (const auto& k : ks) family += std::abs(k.expr.eval(t, x.data(), v.data()));
      for (const auto& row : acted)
        for (const auto& zk : row)
          CHECK_MESSAGE(std::abs(zk.eval(t, x.data(), v.data())) <= C * family + 1e-12,
                        "pointwise bound fails at t=", t);
    }
  }

  TEST_CASE("the scaling stretches the scalar-product weight by two") {
    const int n = 3;
    const auto zs = weight_catalog_massless(n);
    const Weight& xv = zs.back();
    CHECK(xv.id == "z_xv");
    const auto cat = lifted_catalog(AlgebraId::Khat, n, Rat(0));
    const ShellPoly shat_xv = apply_sym(cat.back(), xv.expr);  // S^ is last in Khat
    CHECK(shat_xv.equals(xv.expr * Rat(2)));
  }

  TEST_CASE("numeric weight values") {
    Vec x(2), v(2);
    x << 2.0, -1.0;
    v << 0.6, 0.1;
    const PhasePoint p = make_phase_point(3.0, x, v, 1.0);
    const auto km = weight_catalog_massive(2, Rat(1));
    // z_01 = v0 x1 - t v1
    CHECK(weight_eval(km[0], p) == doctest::Approx(p.v0 * 2.0 - 3.0 * 0.6).epsilon(1e-14));
    // kappa_0 weights are uniformly bounded: |z/v0| with z = z_12
    const auto ks = weight_catalog_kappa0(2);
    const PhasePoint q = make_phase_point(3.0, x, v, 0.0);
    for (const auto& k : ks) CHECK(std::isfinite(weight_eval(k, q)));
  }
}
