#include "doctest.h"
#include "kintran/waves.hpp"

#include <cmath>
#include <random>

#include "kintran/profiles.hpp"

using namespace kintran;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Jet::Key key_of(std::initializer_list<int> exps) {
  Jet::Key k{};
  int i = 0;
  for (int e : exps) k[static_cast<std::size_t>(i++)] = static_cast<std::uint8_t>(e);
  return k;
}

WaveSpec plane_spec() {
  WaveSpec s;
  s.n = 3;
  PlaneModeSpec m;
  m.amplitude = 1.3;
  m.xi = {0.3, -0.4, 0.5};
  m.theta = 0.7;
  s.plane.push_back(m);
  return s;
}

WaveSpec radial_spec(double amplitude = 1.0) {
  WaveSpec s;
  s.n = 3;
  RadialModeSpec m;
  m.amplitude = amplitude;
  m.s0 = 2.0;
  m.width = 1.0;
  s.radial.push_back(m);
  return s;
}

// d/ds of F(s) = A window((s - s0)/width), via an independent 1-variable jet
double profile_d1(const RadialModeSpec& m, double s) {
  const Jet u = Jet::variable(1, 1, 0, (s - m.s0) / m.width);
  return m.amplitude / m.width * window_profile(u).partial(key_of({1}));
}

int find_field(const std::vector<BaseField>& cat, const std::string& id) {
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].id == id) return static_cast<int>(i);
  REQUIRE(false);
  return -1;
}

double box_of(const ScalarSpacetimeField& phi, double t, const Vec& x) {
  return wave_operator(phi.derivatives(t, x, 2), phi.dim());
}

}  // namespace

TEST_SUITE("waves") {
  TEST_CASE("plane mode: exact values, time derivative, and jet cross-check") {
    const WaveField phi(plane_spec());
    const auto& m = phi.spec().plane[0];
    const double omega = std::sqrt(0.3 * 0.3 + 0.4 * 0.4 + 0.5 * 0.5);
    const double t = 1.7;
    const Vec x = vec3(0.4, -1.1, 0.6);
    const double phase = omega * t - (m.xi[0] * x(0) + m.xi[1] * x(1) + m.xi[2] * x(2)) + m.theta;

    CHECK(phi.value(t, x) == doctest::Approx(m.amplitude * std::cos(phase)).epsilon(1e-14));

    const DerivTable tab = phi.derivatives(t, x, 5);
    CHECK(tab.at(key_of({1})) ==
          doctest::Approx(-m.amplitude * omega * std::sin(phase)).epsilon(1e-13));

    // full table against an independent jet expansion of A cos(w t - xi.x + th)
    Jet ph = Jet::variable(4, 5, 0, t) * omega + Jet::constant(4, 5, m.theta);
    for (int i = 0; i < 3; ++i)
      ph = ph - Jet::variable(4, 5, i + 1, x(i)) * m.xi[static_cast<std::size_t>(i)];
    const Jet val = cos(ph) * m.amplitude;
    const auto& set = MultiIndexSet::get(4, 5);
    for (std::size_t r = 0; r < set.size(); ++r)
      CHECK(tab.by_rank(r) == doctest::Approx(val.partial(set.key(r))).epsilon(1e-11));

    // exact solution of the wave equation at scattered points
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 10; ++k) {
      const Vec y = vec3(U(rng), U(rng), U(rng));
      CHECK(std::abs(box_of(phi, U(rng), y)) < 1e-12);
    }
  }

  TEST_CASE("radial mode: axis value, branch continuity, and the wave equation") {
    const WaveField phi(radial_spec());
    const auto& m = phi.spec().radial[0];

    // psi(t, 0) = -2 F'(t)
    for (double t : {2.2, 2.5, 2.9}) {
      CHECK(phi.value(t, vec3(0, 0, 0)) ==
            doctest::Approx(-2.0 * profile_d1(m, t)).epsilon(1e-12));
    }

    // continuity across the series/direct switch at r = 0.02 width
    const double t = 2.4;
    for (double dr : {1e-7, 1e-9}) {
      const double below = phi.value(t, vec3(0.02 - dr, 0, 0));
      const double above = phi.value(t, vec3(0.02 + dr, 0, 0));
      CHECK(below == doctest::Approx(above).epsilon(1e-6));
    }

    // box(psi) = 0 in the direct branch and in the series branch
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> Ut(2.05, 2.95), Ur(0.3, 1.5), Ua(-1.0, 1.0);
    for (int k = 0; k < 8; ++k) {
      Vec dir = vec3(Ua(rng), Ua(rng), Ua(rng));
      if (dir.norm() < 1e-3) dir = vec3(1, 0, 0);
      dir.normalize();
      CHECK(std::abs(box_of(phi, Ut(rng), Ur(rng) * dir)) < 1e-8);
    }
    for (int k = 0; k < 8; ++k) {
      Vec dir = vec3(Ua(rng), Ua(rng), Ua(rng));
      if (dir.norm() < 1e-3) dir = vec3(0, 1, 0);
      dir.normalize();
      CHECK(std::abs(box_of(phi, Ut(rng), (0.019 * Ur(rng) / 1.5) * dir)) < 1e-8);
    }

    // vanishes when both t-r and t+r miss the profile window
    CHECK(phi.value(10.0, vec3(1, 0, 0)) == 0.0);
    CHECK(phi.value(1.0, vec3(0.2, 0, 0)) == 0.0);

    // near the axis only low-order tables are served
    CHECK_NOTHROW(phi.derivatives(2.4, vec3(1e-3, 0, 0), 4));
    CHECK_THROWS_AS(phi.derivatives(2.4, vec3(1e-3, 0, 0), 5), std::invalid_argument);
    CHECK_THROWS_AS(phi.derivatives(2.4, vec3(1, 0, 0), 13), std::invalid_argument);
  }

  TEST_CASE("radial mode: first derivatives agree with finite differences in both branches") {
    const WaveField phi(radial_spec());
    const double h = 1e-5;
    for (const Vec& x : {vec3(0.6, -0.3, 0.2), vec3(0.012, 0.005, -0.003)}) {
      const double t = 2.45;
      const DerivTable tab = phi.derivatives(t, x, 1);
      const double fd_t = (phi.value(t + h, x) - phi.value(t - h, x)) / (2 * h);
      CHECK(tab.at(key_of({1})) == doctest::Approx(fd_t).epsilon(1e-6));
      for (int i = 0; i < 3; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        Jet::Key k{};
        k[static_cast<std::size_t>(i + 1)] = 1;
        const double fd = (phi.value(t, xp) - phi.value(t, xm)) / (2 * h);
        CHECK(tab.at(k) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("outgoing-only radial mode is F(t-r)/r and singular at the axis") {
    WaveSpec s = radial_spec(0.8);
    s.radial[0].outgoing_only = true;
    const WaveField phi(s);
    const auto& m = s.radial[0];
    const double t = 3.1;
    const Vec x = vec3(0.5, 0.3, -0.2);
    const double r = x.norm();
    const double F = m.amplitude * window_profile((t - r - m.s0) / m.width);
    CHECK(phi.value(t, x) == doctest::Approx(F / r).epsilon(1e-13));
    CHECK_THROWS_AS(phi.value(t, vec3(0, 0, 0)), std::domain_error);
    CHECK_THROWS_AS(phi.derivatives(t, vec3(0, 0, 0), 1), std::domain_error);
    // still a wave solution away from the axis
    CHECK(std::abs(box_of(phi, t, x)) < 1e-9);
  }

  TEST_CASE("wave specs are validated") {
    CHECK_THROWS_AS(WaveField(WaveSpec{.n = 5, .max_order = 12, .plane = {}, .radial = {}}),
                    std::invalid_argument);
    WaveSpec bad = plane_spec();
    bad.plane[0].xi = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(WaveField{bad}, std::invalid_argument);
    bad = plane_spec();
    bad.plane[0].xi = {1.0, 2.0};
    CHECK_THROWS_AS(WaveField{bad}, std::invalid_argument);
    bad = radial_spec();
    bad.n = 2;
    CHECK_THROWS_AS(WaveField{bad}, std::invalid_argument);
    bad = radial_spec();
    bad.radial[0].width = 0.0;
    CHECK_THROWS_AS(WaveField{bad}, std::invalid_argument);
    bad = radial_spec();
    bad.max_order = 0;
    CHECK_THROWS_AS(WaveField{bad}, std::invalid_argument);
  }

  TEST_CASE("gaussian blob: closed-form box at the center and finite differences") {
    const GaussianBlobField blob(3, 0.7, 1.2, 2.0, 1.0);
    // box = -psi_tt + lap psi = A (2a - 6b) at the spacetime center
    CHECK(box_of(blob, 2.0, vec3(0, 0, 0)) ==
          doctest::Approx(0.7 * (2 * 1.2 - 6 * 1.0)).epsilon(1e-12));
    const double t = 2.3, h = 1e-5;
    const Vec x = vec3(0.4, -0.2, 0.5);
    const DerivTable tab = blob.derivatives(t, x, 1);
    CHECK(tab.at(key_of({1})) ==
          doctest::Approx((blob.value(t + h, x) - blob.value(t - h, x)) / (2 * h)).epsilon(1e-8));
    CHECK(tab.at(key_of({0, 0, 1})) ==
          doctest::Approx((blob.value(t, vec3(0.4, -0.2 + h, 0.5)) -
                           blob.value(t, vec3(0.4, -0.2 - h, 0.5))) /
                          (2 * h))
              .epsilon(1e-8));
    CHECK_THROWS_AS(GaussianBlobField(0, 1, 1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(GaussianBlobField(3, 1, -1, 0, 1), std::invalid_argument);
  }

  TEST_CASE("spacetime words expand single fields exactly") {
    const WaveField phi(plane_spec());
    const auto cat = base_catalog(AlgebraId::P, 3);
    const double t = 1.9;
    const Vec x = vec3(0.8, -0.5, 0.3);
    const DerivTable tab = phi.derivatives(t, x, 1);
    const double ft = tab.at(key_of({1}));
    const double f1 = tab.at(key_of({0, 1}));
    const double f2 = tab.at(key_of({0, 0, 1}));

    CHECK(SpacetimeWord::identity(3).eval(phi, t, x) ==
          doctest::Approx(phi.value(t, x)).epsilon(1e-14));

    // boost Om_01 = x^1 d_t + t d_1, rotation Om_12 = x^1 d_2 - x^2 d_1
    const double b = eval_z_alpha_phi(phi, cat, {find_field(cat, "Om_01")}, t, x);
    CHECK(b == doctest::Approx(x(0) * ft + t * f1).epsilon(1e-12));
    const double rot = eval_z_alpha_phi(phi, cat, {find_field(cat, "Om_12")}, t, x);
    CHECK(rot == doctest::Approx(x(0) * f2 - x(1) * f1).epsilon(1e-12));
  }

  TEST_CASE("two-letter words agree with differentiation along the exact boost flow") {
    const WaveField phi(plane_spec());
    const auto cat = base_catalog(AlgebraId::P, 3);
    const int boost = find_field(cat, "Om_01");
    const SpacetimeWord inner = SpacetimeWord::from_word(cat, {boost}, 3);
    const SpacetimeWord outer = inner.apply(cat[static_cast<std::size_t>(boost)]);
    CHECK(outer.derivative_order() == 2);

    const double t = 2.1;
    const Vec x = vec3(0.6, -0.4, 0.9);
    // flow of Om_01: (t, x1) -> (t cosh h + x1 sinh h, x1 cosh h + t sinh h)
    auto flowed = [&](double h) {
      Vec y = x;
      const double tt = t * std::cosh(h) + x(0) * std::sinh(h);
      y(0) = x(0) * std::cosh(h) + t * std::sinh(h);
      return inner.eval(phi, tt, y);
    };
    const double h = 1e-5;
    const double fd = (flowed(h) - flowed(-h)) / (2 * h);
    CHECK(outer.eval(phi, t, x) == doctest::Approx(fd).epsilon(1e-7));

    // seq {boost, boost} composes the same expansion
    CHECK(SpacetimeWord::from_word(cat, {boost, boost}, 3).eval(phi, t, x) ==
          doctest::Approx(outer.eval(phi, t, x)).epsilon(1e-13));
  }

  TEST_CASE("coordinate partials of a word match finite differences") {
    const WaveField phi(radial_spec());
    const auto cat = base_catalog(AlgebraId::P, 3);
    const SpacetimeWord w = SpacetimeWord::from_word(
        cat, {find_field(cat, "Om_02"), find_field(cat, "Om_12")}, 3);
    const double t = 2.5, h = 1e-5;
    const Vec x = vec3(0.5, 0.4, -0.3);
    CHECK(w.partial(0).eval(phi, t, x) ==
          doctest::Approx((w.eval(phi, t + h, x) - w.eval(phi, t - h, x)) / (2 * h))
              .epsilon(1e-6));
    Vec xp = x, xm = x;
    xp(1) += h;
    xm(1) -= h;
    CHECK(w.partial(2).eval(phi, t, x) ==
          doctest::Approx((w.eval(phi, t, xp) - w.eval(phi, t, xm)) / (2 * h)).epsilon(1e-6));
    CHECK_THROWS_AS(w.partial(4), std::invalid_argument);
  }

  TEST_CASE("words of symmetry fields map wave solutions to wave solutions") {
    const WaveField phi(radial_spec());
    const auto cat = base_catalog(AlgebraId::P, 3);
    const SpacetimeWord w = SpacetimeWord::from_word(
        cat, {find_field(cat, "Om_01"), find_field(cat, "Om_23")}, 3);
    // box(Z^alpha psi) evaluated through second partials of the word expansion
    const SpacetimeWord wtt = w.partial(0).partial(0);
    std::vector<SpacetimeWord> wii;
    for (int i = 1; i <= 3; ++i) wii.push_back(w.partial(i).partial(i));
    const double t = 2.6;
    const Vec x = vec3(0.7, -0.2, 0.4);
    const DerivTable tab = phi.derivatives(t, x, 4);
    double box = -wtt.eval_with(tab, t, x);
    for (const auto& g : wii) box += g.eval_with(tab, t, x);
    CHECK(std::abs(box) < 1e-8);
  }

  TEST_CASE("transport of a scalar field couples v0 and the spatial gradient") {
    const WaveField phi(plane_spec());
    const auto& m = phi.spec().plane[0];
    const double omega = std::sqrt(0.3 * 0.3 + 0.4 * 0.4 + 0.5 * 0.5);
    const double t = 1.4;
    const Vec x = vec3(0.2, 0.9, -0.6);
    const double phase = omega * t - (m.xi[0] * x(0) + m.xi[1] * x(1) + m.xi[2] * x(2)) + m.theta;

    // at v = 0 on the unit-mass shell, T phi = dt phi
    CHECK(transport_of_phi(phi, make_phase_point(t, x, vec3(0, 0, 0), 1.0)) ==
          doctest::Approx(-m.amplitude * omega * std::sin(phase)).epsilon(1e-12));

    // generic massless point: T phi = -A sin(phase) (w v0 - xi.v)
    const Vec v = vec3(0.7, -0.3, 0.4);
    const PhasePoint p = make_phase_point(t, x, v, 0.0);
    const double expected =
        -m.amplitude * std::sin(phase) *
        (omega * p.v0 - (m.xi[0] * v(0) + m.xi[1] * v(1) + m.xi[2] * v(2)));
    CHECK(transport_of_phi(phi, p) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("null decomposition reconstructs the massless transport operator") {
    const WaveField phi(radial_spec());
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> Ut(2.2, 3.4), Ua(-1.0, 1.0), Uv(0.3, 1.5);
    for (int k = 0; k < 30; ++k) {
      const double t = Ut(rng);
      Vec dir = vec3(Ua(rng), Ua(rng), Ua(rng));
      if (dir.norm() < 1e-3) dir = vec3(1, 1, 0);
      dir.normalize();
      const Vec x = (0.2 + 0.7 * (t - 0.3) * std::abs(Ua(rng))) / 1.0 * dir;
      Vec v = vec3(Uv(rng) * Ua(rng), Uv(rng) * Ua(rng), Uv(rng) * Ua(rng));
      if (v.norm() < 1e-3) v = vec3(0.5, 0, 0);
      const PhasePoint p = make_phase_point(t, x, v, 0.0);
      const NullDecomposition d = null_decomposition(phi, p);
      const double ref = transport_of_phi(phi, p);
      const double scale = std::abs(d.outgoing) + std::abs(d.rotational_boost) +
                           std::abs(d.z_weighted) + std::abs(ref) + 1e-14;
      CHECK(std::abs(d.sum() - ref) / scale < 1e-12);
    }
    const PhasePoint good = make_phase_point(2.0, vec3(1, 0, 0), vec3(1, 0, 0), 0.0);
    CHECK_NOTHROW(null_decomposition(phi, good));
    CHECK_THROWS_AS(
        null_decomposition(phi, make_phase_point(-1.0, vec3(1, 0, 0), vec3(1, 0, 0), 0.0)),
        std::domain_error);
    CHECK_THROWS_AS(
        null_decomposition(phi, make_phase_point(2.0, vec3(0, 0, 0), vec3(1, 0, 0), 0.0)),
        std::domain_error);
  }

  TEST_CASE("energy density is the completed square of the canonical flux") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(-1.5, 1.5), Ut(0.2, 3.0);
    for (int k = 0; k < 50; ++k) {
      const Vec x = vec3(U(rng), U(rng), U(rng));
      const double t = x.norm() + Ut(rng);
      const double rho = std::sqrt(t * t - x.squaredNorm());
      const double pt = U(rng);
      const Vec px = vec3(U(rng), U(rng), U(rng));
      const double dens = wave_energy_density(rho, t, x, pt, px);
      CHECK(dens >= 0.0);
      // raw form (t/2rho)(pt^2 + |px|^2) + (r/rho) pt pr
      const double r = x.norm();
      const double pr = x.dot(px) / r;
      const double raw = (t / (2 * rho)) * (pt * pt + px.squaredNorm()) + (r / rho) * pt * pr;
      CHECK(dens == doctest::Approx(raw).epsilon(1e-10));
    }
    CHECK_THROWS_AS(wave_energy_density(1.0, 0.5, vec3(1, 0, 0), 1.0, vec3(0, 0, 0)),
                    std::domain_error);
  }

  TEST_CASE("source-free energy is conserved across hyperboloids") {
    const WaveField phi(radial_spec());
    QuadratureSpec q;
    q.radial = 48;
    q.angular = 16;
    std::vector<double> energies;
    for (double rho : {1.0, 1.6, 2.5, 4.0, 8.0}) {
      const FoliationLeaf leaf = wave_energy_leaf(phi, rho, q);
      const WaveEnergyReport rep = wave_energy_hyperboloid(phi, 1, rho, leaf);
      CHECK(rep.value > 0.0);
      CHECK(rep.truncation_tail < 1e-10 * rep.value);
      double sum = 0.0;
      for (const auto& row : rep.rows) sum += row.contribution;
      CHECK(rep.value == doctest::Approx(sum).epsilon(1e-12));
      energies.push_back(rep.value);
    }
    const double e0 = energies.front();
    for (double e : energies) CHECK(e == doctest::Approx(e0).epsilon(5e-7));
  }

  TEST_CASE("energy towers are monotone in the order and quadratic in amplitude") {
    QuadratureSpec q;
    q.radial = 32;
    q.angular = 12;
    const WaveField phi(radial_spec());
    const FoliationLeaf leaf = wave_energy_leaf(phi, 1.0, q);
    const WaveEnergyReport r0 = wave_energy_hyperboloid(phi, 0, 1.0, leaf);
    const WaveEnergyReport r1 = wave_energy_hyperboloid(phi, 1, 1.0, leaf);
    const WaveEnergyReport r2 = wave_energy_hyperboloid(phi, 2, 1.0, leaf);
    CHECK(r0.rows.size() == 1);
    CHECK(r1.rows.size() == 11);       // identity + 10 generators
    CHECK(r2.rows.size() == 1 + 10 + 55);  // + multisets of two generators
    CHECK(r0.rows[0].word == "1");
    CHECK(r0.value > 0.0);
    CHECK(r1.value > r0.value);
    CHECK(r2.value > r1.value);
    CHECK(r1.rows[0].contribution == doctest::Approx(r0.value).epsilon(1e-13));

    const WaveField loud(radial_spec(3.0));
    const WaveEnergyReport r0_loud = wave_energy_hyperboloid(loud, 0, 1.0, leaf);
    CHECK(r0_loud.value == doctest::Approx(9.0 * r0.value).epsilon(1e-12));
  }

  TEST_CASE("energy plumbing rejects bad inputs") {
    const WaveField plane(plane_spec());
    QuadratureSpec q;
    CHECK_THROWS_AS(wave_energy_leaf(plane, 1.0, q), std::invalid_argument);
    const WaveField phi(radial_spec());
    CHECK_THROWS_AS(wave_energy_leaf(phi, 0.5, q), std::invalid_argument);
    const FoliationLeaf leaf = wave_energy_leaf(phi, 1.0, q);
    CHECK_THROWS_AS(wave_energy_hyperboloid(phi, 0, 2.0, leaf), std::invalid_argument);
    const FoliationLeaf flat = build_leaf(FoliationLeaf::Kind::fixed_time, 2.0, 3, 0.1, 1.0, q);
    CHECK_THROWS_AS(wave_energy_hyperboloid(phi, 0, 2.0, flat), std::invalid_argument);
    CHECK_THROWS_AS(wave_source_moment(phi, flat), std::invalid_argument);
    CHECK_THROWS_AS(wave_energy_hyperboloid(phi, 12, 1.0, leaf), std::invalid_argument);
  }

  TEST_CASE("forced fields satisfy the energy flux identity") {
    // box(psi) != 0 for the blob; across hyperboloids the energy changes by
    // minus the accumulated source moment: E(r2) - E(r1) = -int (dt psi)(box psi)
    const GaussianBlobField blob(3, 0.7, 1.2, 2.0, 1.0);
    QuadratureSpec q;
    q.radial = 40;
    q.angular = 12;
    const double rho1 = 1.2, rho2 = 1.6;
    auto energy_at = [&](double rho) {
      const FoliationLeaf leaf =
          build_leaf(FoliationLeaf::Kind::hyperboloid, rho, 3, 1e-6, 9.0, q);
      return wave_energy_hyperboloid(blob, 0, rho, leaf).value;
    };
    const double e1 = energy_at(rho1), e2 = energy_at(rho2);
    const Rule1D s = gauss_legendre(16, rho1, rho2);
    double accumulated = 0.0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const FoliationLeaf leaf =
          build_leaf(FoliationLeaf::Kind::hyperboloid, s.x[k], 3, 1e-6, 9.0, q);
      accumulated += s.w[k] * wave_source_moment(blob, leaf);
    }
    CHECK(e2 - e1 == doctest::Approx(-accumulated).epsilon(1e-6));
    CHECK(std::abs(e2 - e1) > 1e-6);  // the identity is not vacuous here
  }

  TEST_CASE("decay checks weigh gradients against the initial energy") {
    const WaveField phi(radial_spec());
    QuadratureSpec q;
    q.radial = 32;
    q.angular = 12;
    std::vector<std::pair<double, Vec>> samples;
    for (double t : {4.0, 8.0, 16.0, 32.0})
      for (double c : {2.25, 2.5, 2.75}) samples.emplace_back(t, vec3(t - c, 0, 0));
    samples.emplace_back(6.0, vec3(1.0, 0, 0));  // off the outgoing shell: zero field
    const WaveDecayReport rep = wave_decay_checks(phi, 2, samples, q);
    CHECK(rep.energy_N > rep.energy_0);
    CHECK(rep.energy_0 > 0.0);
    CHECK(rep.sup_weighted_gradient > 0.0);
    CHECK(rep.sup_weighted_gradient < 100.0);
    CHECK(rep.sup_null_line > 0.0);
    CHECK(rep.sup_null_line < 100.0);

    // a larger sample set can only raise the sup
    auto more = samples;
    more.emplace_back(24.0, vec3(20.0, 8.0, 5.0));
    const WaveDecayReport rep2 = wave_decay_checks(phi, 2, more, q);
    CHECK(rep2.sup_weighted_gradient >= rep.sup_weighted_gradient - 1e-15);

    CHECK_THROWS_AS(wave_decay_checks(WaveField(plane_spec()), 1, samples, q),
                    std::invalid_argument);
    auto bad = samples;
    bad.emplace_back(1.0, vec3(2, 0, 0));
    CHECK_THROWS_AS(wave_decay_checks(phi, 2, bad, q), std::invalid_argument);
  }
}
