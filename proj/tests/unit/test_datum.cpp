#include "doctest.h"
#include "kintran/datum.hpp"

#include <cmath>
#include <random>

using namespace kintran;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Jet::Key key_of(std::initializer_list<int> exps) {
  Jet::Key k{};
  int i = 0;
  for (int e : exps) k[static_cast<std::size_t>(i++)] = static_cast<std::uint8_t>(e);
  return k;
}

// central differences on value() as a third, slow derivative path
double fd_partial(const Datum& d, Vec x, Vec v, int slot, int coord) {
  const double h = 1e-5;
  double& y = slot == 0 ? x(coord) : v(coord);
  const double y0 = y;
  y = y0 + h;
  const double fp = d.value(x, v);
  y = y0 - h;
  const double fm = d.value(x, v);
  return (fp - fm) / (2.0 * h);
}

}  // namespace

TEST_SUITE("datum") {
  TEST_CASE("multi-index sets enumerate the full graded family") {
    const auto& set = MultiIndexSet::get(4, 3);
    CHECK(set.size() == 35);  // C(4+3,3)
    for (std::size_t r = 0; r < set.size(); ++r) CHECK(set.rank(set.key(r)) == static_cast<int>(r));
    // graded: degrees never decrease along the enumeration
    for (std::size_t r = 1; r < set.size(); ++r)
      CHECK(MultiIndexSet::total_degree(set.key(r)) >= MultiIndexSet::total_degree(set.key(r - 1)));
    CHECK(MultiIndexSet::get(6, 2).size() == 28);  // C(8,2)
    CHECK(&MultiIndexSet::get(4, 3) == &set);      // interned
    CHECK_THROWS_AS(set.rank(key_of({4, 0, 0, 0})), std::out_of_range);
  }

  TEST_CASE("gaussian closed-form tables match the jet path exactly") {
    DatumSpec spec;
    spec.kind = "gaussian-xv";
    spec.n = 3;
    spec.amplitude = 0.7;
    spec.x_center = {0.3, -0.2, 0.1};
    spec.v_center = {-0.1, 0.4, 0.0};
    spec.sigma_x = 1.3;
    spec.sigma_v = 0.8;
    const auto d = make_datum(spec);
    const Vec x = vec3(0.9, -0.5, 0.4), v = vec3(0.2, -0.3, 0.6);
    const DerivTable fast = d->derivatives(x, v, 4);
    const DerivTable slow = d->Datum::derivatives(x, v, 4);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t r = 0; r < fast.size(); ++r)
      CHECK(fast.by_rank(r) == doctest::Approx(slow.by_rank(r)).epsilon(1e-12));
    CHECK(fast.value() == doctest::Approx(d->value(x, v)).epsilon(1e-14));
  }

  TEST_CASE("gaussian second derivative at the peak is -A/sigma^2") {
    DatumSpec spec;
    spec.kind = "gaussian-xv";
    spec.n = 2;
    spec.amplitude = 2.0;
    spec.sigma_x = 1.5;
    spec.sigma_v = 0.5;
    const auto d = make_datum(spec);
    const Vec zero = Vec::Zero(2);
    const DerivTable tab = d->derivatives(zero, zero, 2);
    // d^2/dx1^2 at the peak: -A/sigma_x^2
    CHECK(tab.at(key_of({2, 0, 0, 0})) == doctest::Approx(-2.0 / (1.5 * 1.5)).epsilon(1e-13));
    CHECK(tab.at(key_of({0, 0, 2, 0})) == doctest::Approx(-2.0 / (0.5 * 0.5)).epsilon(1e-13));
    // odd derivatives vanish at the peak
    CHECK(tab.at(key_of({1, 0, 0, 0})) == doctest::Approx(0.0));
    CHECK(tab.at(key_of({0, 1, 1, 0})) == doctest::Approx(0.0));
  }

  TEST_CASE("first derivatives agree with finite differences for every kind") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> box(-0.8, 0.8);
    for (const std::string& kind : datum_kinds()) {
      DatumSpec spec;
      spec.kind = kind;
      spec.n = 2;
      spec.amplitude = 1.1;
      spec.x_radius = 2.0;
      spec.v_radius = 2.0;
      spec.v_lo = 0.3;
      spec.v_hi = 1.9;
      const auto d = make_datum(spec);
      for (int trial = 0; trial < 5; ++trial) {
        const Vec x = vec2(box(rng), box(rng));
        const Vec v = vec2(box(rng) + 1.0, box(rng));  // keep |v| in the shell window
        const DerivTable tab = d->derivatives(x, v, 1);
        for (int i = 0; i < 2; ++i) {
          Jet::Key kx{}, kv{};
          kx[static_cast<std::size_t>(i)] = 1;
          kv[static_cast<std::size_t>(2 + i)] = 1;
          CHECK(tab.at(kx) == doctest::Approx(fd_partial(*d, x, v, 0, i)).epsilon(1e-6));
          CHECK(tab.at(kv) == doctest::Approx(fd_partial(*d, x, v, 1, i)).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("bump support, values, and symmetry") {
    DatumSpec spec;
    spec.kind = "bump-compact-xv";
    spec.n = 3;
    spec.amplitude = 3.0;
    spec.x_radius = 1.5;
    spec.v_radius = 0.5;
    const auto d = make_datum(spec);
    const Vec zero = Vec::Zero(3);
    // center value A exp(-1) exp(-1)
    CHECK(d->value(zero, zero) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));
    // zero on and past the support boundary
    CHECK(d->value(vec3(1.5, 0, 0), zero) == 0.0);
    CHECK(d->value(vec3(2.0, 0, 0), zero) == 0.0);
    CHECK(d->value(zero, vec3(0, 0.5, 0)) == 0.0);
    // derivative tables outside the support are identically zero
    const DerivTable out = d->derivatives(vec3(1.6, 0, 0), zero, 3);
    for (std::size_t r = 0; r < out.size(); ++r) CHECK(out.by_rank(r) == 0.0);
    // even in x
    CHECK(d->value(vec3(0.4, -0.2, 0.1), vec3(0.1, 0, 0)) ==
          doctest::Approx(d->value(vec3(-0.4, 0.2, -0.1), vec3(0.1, 0, 0))).epsilon(1e-14));
    CHECK(d->x_support_radius() == doctest::Approx(1.5));
    CHECK(d->v_support_outer() == doctest::Approx(0.5));
    CHECK(d->x_decay() == DecayClass::compact_support);
  }

  TEST_CASE("velocity shell vanishes outside its window") {
    DatumSpec spec;
    spec.kind = "shell-in-v";
    spec.n = 2;
    spec.amplitude = 1.0;
    spec.v_lo = 0.5;
    spec.v_hi = 1.5;
    spec.x_profile = "gaussian";
    spec.sigma_x = 2.0;
    const auto d = make_datum(spec);
    const Vec zero = Vec::Zero(2);
    CHECK(d->value(zero, zero) == 0.0);                 // v = 0 excluded
    CHECK(d->value(zero, vec2(0.5, 0)) == 0.0);         // inner edge
    CHECK(d->value(zero, vec2(1.5, 0)) == 0.0);         // outer edge
    CHECK(d->value(zero, vec2(2.0, 0)) == 0.0);         // beyond
    // window midpoint |v|^2 = (lo^2+hi^2)/2 gives the peak exp(-4)
    const double vmid = std::sqrt(0.5 * (0.25 + 2.25));
    CHECK(d->value(zero, vec2(vmid, 0)) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    // gaussian x falloff multiplies in
    CHECK(d->value(vec2(2.0, 0), vec2(vmid, 0)) ==
          doctest::Approx(std::exp(-4.0) * std::exp(-0.5)).epsilon(1e-12));
    CHECK(d->v_support_inner() == doctest::Approx(0.5));
    CHECK(d->v_support_outer() == doctest::Approx(1.5));

    spec.x_profile = "power-law";
    spec.power = 2.05;
    const auto dp = make_datum(spec);
    CHECK(dp->value(vec2(3.0, 0), vec2(vmid, 0)) ==
          doctest::Approx(std::exp(-4.0) * std::pow(10.0, -1.025)).epsilon(1e-12));
    CHECK(dp->x_decay() == DecayClass::power_law);
  }

  TEST_CASE("tail bounds dominate samples and shrink to tolerance") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dir(-1.0, 1.0);
    for (const std::string& kind : datum_kinds()) {
      DatumSpec spec;
      spec.kind = kind;
      spec.n = 2;
      spec.x_center = kind == "shell-in-v" ? std::vector<double>{} : std::vector<double>{0.2, -0.1};
      const auto d = make_datum(spec);
      for (double R : {0.5, 1.0, 2.0, 4.0}) {
        const double bx = d->sup_tail_x(R);
        const double bv = d->sup_tail_v(R);
        CHECK(bx >= d->sup_tail_x(R + 0.5));  // monotone
        for (int trial = 0; trial < 40; ++trial) {
          Vec u = vec2(dir(rng), dir(rng));
          if (u.norm() < 1e-6) u = vec2(1.0, 0.0);
          u.normalize();
          const Vec inside = 0.8 * vec2(dir(rng), dir(rng));
          CHECK(d->value((R + 0.01) * u, inside) <= bx + 1e-15);
          CHECK(d->value(inside, (R + 0.01) * u) <= bv + 1e-15);
        }
      }
      const double Rx = d->x_radius_for(1e-8);
      CHECK(d->sup_tail_x(Rx * (1.0 + 1e-9) + 1e-12) <= 1.0001e-8);
      const double Rv = d->v_radius_for(1e-8);
      CHECK(d->sup_tail_v(Rv * (1.0 + 1e-9) + 1e-12) <= 1.0001e-8);
    }
  }

  TEST_CASE("specs are validated") {
    DatumSpec spec;
    spec.kind = "no-such-kind";
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
    spec.kind = "gaussian-xv";
    spec.sigma_x = 0.0;
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
    spec.sigma_x = 1.0;
    spec.n = 5;
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
    spec.n = 3;
    spec.x_center = {1.0, 2.0};  // wrong length
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
    spec.x_center.clear();
    spec.kind = "shell-in-v";
    spec.v_lo = 1.5;
    spec.v_hi = 0.5;
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
    spec.v_lo = 0.5;
    spec.v_hi = 1.5;
    spec.x_profile = "cubic";
    CHECK_THROWS_AS(make_datum(spec), std::invalid_argument);
  }
}
