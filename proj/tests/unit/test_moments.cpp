#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kintran/moments.hpp"

using namespace kintran;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

std::shared_ptr<const Datum> gaussian_datum(double sigma = 1.0, double amplitude = 1.0) {
  DatumSpec s;
  s.kind = "gaussian-xv";
  s.n = 3;
  s.amplitude = amplitude;
  s.sigma_x = sigma;
  s.sigma_v = sigma;
  return std::shared_ptr<const Datum>(make_datum(s));
}

std::shared_ptr<const Datum> bump_datum(double rx = 1.0, double rv = 1.5, double amplitude = 1.0) {
  DatumSpec s;
  s.kind = "bump-compact-xv";
  s.n = 3;
  s.amplitude = amplitude;
  s.x_radius = rx;
  s.v_radius = rv;
  return std::shared_ptr<const Datum>(make_datum(s));
}

std::shared_ptr<const Datum> shell_datum(int n = 3) {
  DatumSpec s;
  s.kind = "shell-in-v";
  s.n = n;
  s.v_lo = 0.5;
  s.v_hi = 1.5;
  s.sigma_x = 1.0;
  return std::shared_ptr<const Datum>(make_datum(s));
}

QuadratureSpec quad(int radial, int angular, double V = 8.0) {
  QuadratureSpec q;
  q.v_radius = V;
  q.radial = radial;
  q.angular = angular;
  return q;
}

MomentSpec spec_of(MomentWeight w, const QuadratureSpec& q, bool absolute = false,
                   std::vector<int> momenta = {}) {
  MomentSpec s;
  s.weight = w;
  s.momenta = std::move(momenta);
  s.absolute = absolute;
  s.quad = q;
  return s;
}

const BaseField& base_generator(AlgebraId id, int n, const std::string& name) {
  static std::vector<BaseField> storage;
  const auto cat = base_catalog(id, n);
  for (const auto& z : cat)
    if (z.id == name) {
      storage.push_back(z);
      return storage.back();
    }
  throw std::logic_error("base_generator: " + name + " not found");
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("averages vanish on the zero field and scale linearly in the datum") {
    DistributionField Fz = make_free_field(gaussian_datum(1.0, 0.0), 1.0);
    const MomentValue z = velocity_average(Fz, spec_of(MomentWeight::energy, quad(16, 8)), 1.0,
                                           vec3(0.2, -0.1, 0.3));
    CHECK(z.value == 0.0);
    CHECK(z.tail_bound == 0.0);

    DistributionField F1 = make_free_field(gaussian_datum(), 1.0);
    DistributionField F2 = make_free_field(gaussian_datum(1.0, 2.5), 1.0);
    const Vec x = vec3(0.4, 0.1, -0.2);
    const double a1 = velocity_average(F1, spec_of(MomentWeight::energy, quad(16, 8)), 1.5, x).value;
    const double a2 = velocity_average(F2, spec_of(MomentWeight::energy, quad(16, 8)), 1.5, x).value;
    CHECK(a2 == doctest::Approx(2.5 * a1).epsilon(1e-14));
    CHECK(a1 > 0.0);  // positivity of a nonnegative datum's average
  }

  TEST_CASE("energy density of the isotropic gaussian matches the radial oracle") {
    // datum e^{-|x|^2-|v|^2}: rho_m at t=0, x=0 is 4 pi int r^2 e^{-r^2} sqrt(1+r^2) dr
    DistributionField F = make_free_field(gaussian_datum(1.0 / std::sqrt(2.0)), 1.0);
    const double got =
        velocity_average(F, spec_of(MomentWeight::energy, quad(32, 16)), 0.0, vec3(0, 0, 0)).value;

    const double oracle = 4.0 * std::acos(-1.0) *
                          integrate_1d(
                              [](double r) {
                                return r * r * std::exp(-r * r) * std::sqrt(1.0 + r * r);
                              },
                              0.0, 12.0, 1e-13);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(got == doctest::Approx(8.579720036200551).epsilon(1e-10));
  }

  TEST_CASE("chi at the spatial origin reduces to the energy density") {
    DistributionField F = make_free_field(gaussian_datum(), 1.0);
    const Vec x0 = vec3(0, 0, 0);
    const double chi = chi_m(F, quad(20, 12), 2.0, x0);
    const double rho = velocity_average(F, spec_of(MomentWeight::energy, quad(20, 12)), 2.0, x0).value;
    CHECK(chi == doctest::Approx(rho).epsilon(1e-13));
  }

  TEST_CASE("coercivity of the normal energy density") {
    DistributionField F = make_free_field(gaussian_datum(), 1.0);
    const QuadratureSpec q = quad(20, 12);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    for (int k = 0; k < 5; ++k) {
      const double t = 1.2 + 0.6 * k;
      const Vec x = vec3(u(rng), u(rng), u(rng));
      const double chi_abs = chi_m(F, q, t, x, true);
      const double slack = 1e-12 * (1.0 + chi_abs);

      // chi(|f|) >= (m^2/2) int |f| dv/v0
      const double mu_abs =
          velocity_average(F, spec_of(MomentWeight::mu_measure, q, true), t, x).value;
      CHECK(chi_abs + slack >= 0.5 * mu_abs);

      // chi(|f|) >= rho/(2(t+r)) rho_m(|f|)
      const double rho_abs =
          velocity_average(F, spec_of(MomentWeight::energy, q, true), t, x).value;
      const double rho_c = hyperboloid_rho(t, x);
      CHECK(chi_abs + slack >= rho_c / (2.0 * (t + x.norm())) * rho_abs);

      // int |f| dv <= (1/m) chi(|f|)
      const double plain_abs =
          velocity_average(F, spec_of(MomentWeight::momentum, q, true, {0}), t, x).value;
      CHECK(plain_abs <= chi_abs + slack);
    }
    Vec xcone = vec3(2.0, 0, 0);
    CHECK_THROWS_AS(chi_m(F, q, 2.0, xcone), std::domain_error);
  }

  TEST_CASE("stress energy: defining identity, symmetry, free divergence") {
    DistributionField F = make_free_field(gaussian_datum(), 1.0);
    const QuadratureSpec q = quad(16, 10);
    const Vec x = vec3(0.3, -0.2, 0.4);

    const double t00 = stress_energy(F, 0, 0, q, 1.7, x);
    const double rho = velocity_average(F, spec_of(MomentWeight::energy, q), 1.7, x).value;
    CHECK(t00 == doctest::Approx(rho).epsilon(1e-14));

    for (int mu = 0; mu <= 3; ++mu)
      for (int nu = mu; nu <= 3; ++nu)
        CHECK(stress_energy(F, mu, nu, q, 1.7, x) == stress_energy(F, nu, mu, q, 1.7, x));
    CHECK_THROWS_AS(stress_energy(F, 4, 0, q, 1.7, x), std::invalid_argument);

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 2; ++k) {
      const Vec y = vec3(u(rng), u(rng), u(rng));
      for (int nu = 0; nu <= 3; ++nu) {
        INFO("massive component ", nu);
        CHECK(divergence_residual(F, nu, q, 1.4 + 0.5 * k, y) < 1e-5);
      }
    }

    DistributionField F0 = make_free_field(shell_datum(), 0.0);
    const QuadratureSpec q0 = quad(16, 10, 2.0);  // shell support is |v| <= 1.5
    for (int nu = 0; nu <= 3; ++nu) {
      INFO("massless component ", nu);
      CHECK(divergence_residual(F0, nu, q0, 1.6, vec3(0.2, 0.3, -0.1)) < 1e-5);
    }
  }

  TEST_CASE("averaging commutes with the symmetry catalog up to its corrections") {
    DistributionField F = make_free_field(gaussian_datum(), 1.0);
    const QuadratureSpec q = quad(32, 12);
    const Vec x = vec3(0.3, -0.15, 0.25);
    const double t = 1.8;

    for (const std::string id : {"d_t", "d_x1", "Om_12", "Om_13"}) {
      INFO("generator ", id);
      CHECK(average_commutation_residual(F, base_generator(AlgebraId::P, 3, id), q, t, x) < 1e-6);
    }
    for (const std::string id : {"Om_01", "Om_03"}) {
      INFO("generator ", id);
      CHECK(average_commutation_residual(F, base_generator(AlgebraId::P, 3, id), q, t, x) < 1e-5);
    }

    DistributionField F0 = make_free_field(shell_datum(), 0.0);
    const QuadratureSpec q0 = quad(32, 12, 1.6);
    for (const std::string id : {"d_x2", "Om_23", "Om_02", "S"}) {
      INFO("generator ", id);
      CHECK(average_commutation_residual(F0, base_generator(AlgebraId::K, 3, id), q0, t, x) < 1e-5);
    }

    // the scaling correction is a massless statement
    CHECK_THROWS_AS(average_commutation_residual(F, base_generator(AlgebraId::K, 3, "S"), q, t, x),
                    std::invalid_argument);
    // hyperboloid data carry the same identity
    const H1Trace tr = h1_trace(make_free_field(bump_datum(1.2, 1.5, 2.0), 1.0));
    CHECK(average_commutation_residual(tr.field, base_generator(AlgebraId::P, 3, "Om_01"),
                                       quad(64, 12, 1.6), 2.4, vec3(0.3, -0.2, 0.25)) < 1e-5);
  }

  TEST_CASE("refinement stability of reported averages") {
    DistributionField Fg = make_free_field(gaussian_datum(), 1.0);
    DistributionField Fb = make_free_field(bump_datum(), 1.0);
    const Vec x = vec3(0.25, 0.1, -0.3);
    const double coarse_g =
        velocity_average(Fg, spec_of(MomentWeight::energy, quad(24, 24)), 1.3, x).value;
    const double fine_g =
        velocity_average(Fg, spec_of(MomentWeight::energy, quad(48, 48)), 1.3, x).value;
    CHECK(std::abs(fine_g - coarse_g) < 1e-9 * (1.0 + std::abs(fine_g)));

    // the compact bump is only finitely smooth at its support edge, so it needs
    // more nodes than the gaussian to settle
    const double coarse_b = chi_m(Fb, quad(48, 48, 1.6), 1.6, x);
    const double fine_b = chi_m(Fb, quad(96, 96, 1.6), 1.6, x);
    CHECK(std::abs(fine_b - coarse_b) < 1e-7 * (1.0 + std::abs(fine_b)));
  }

  TEST_CASE("massless integrability and truncation guards") {
    // n = 1: dv/|v| against data flat at v = 0 diverges and is rejected
    DatumSpec g1;
    g1.kind = "gaussian-xv";
    g1.n = 1;
    std::shared_ptr<const Datum> d1(make_datum(g1));
    DistributionField F1 = make_free_field(d1, 0.0);
    Vec x1(1);
    x1 << 0.2;
    CHECK_THROWS_AS(
        velocity_average(F1, spec_of(MomentWeight::mu_measure, quad(16, 4)), 1.0, x1),
        std::invalid_argument);
    // with at least one momentum factor the weight is regular
    CHECK_NOTHROW(
        velocity_average(F1, spec_of(MomentWeight::momentum, quad(16, 4), false, {1}), 1.0, x1));
    // data vanishing near v = 0 lift the restriction
    DistributionField Fs1 = make_free_field(shell_datum(1), 0.0);
    CHECK_NOTHROW(
        velocity_average(Fs1, spec_of(MomentWeight::mu_measure, quad(16, 4, 2.0)), 1.0, x1));
    // in n = 3 the polar Jacobian regularizes the bare weight
    DistributionField F3 = make_free_field(gaussian_datum(), 0.0);
    CHECK_NOTHROW(velocity_average(F3, spec_of(MomentWeight::mu_measure, quad(16, 8)), 1.0,
                                   vec3(0.1, 0, 0)));

    // truncating a gaussian fiber at 2.5 sigma-equivalents is reported
    DistributionField Fm = make_free_field(gaussian_datum(1.0 / std::sqrt(2.0)), 1.0);
    CHECK_THROWS_AS(
        velocity_average(Fm, spec_of(MomentWeight::energy, quad(16, 8, 2.5)), 1.0, vec3(0, 0, 0)),
        std::runtime_error);
    // compact v-support inside the radius reports an exactly zero tail
    DistributionField Fb = make_free_field(bump_datum(), 1.0);
    const MomentValue mb =
        velocity_average(Fb, spec_of(MomentWeight::energy, quad(16, 8, 2.0)), 1.2, vec3(0.1, 0, 0));
    CHECK(mb.tail_bound == 0.0);
  }

  TEST_CASE("forced-law averages demand a support margin") {
    auto none = std::shared_ptr<const WaveField>();
    DistributionField F = make_vn_massless_field(shell_datum(), none);
    const Vec x = vec3(0.2, -0.1, 0.1);
    // support radius 1.5, margin 2: radius 8 passes, radius 2 is refused
    const MomentValue ok =
        velocity_average(F, spec_of(MomentWeight::energy, quad(10, 6)), 1.0, x);
    CHECK(ok.tail_bound == 0.0);
    CHECK(ok.value > 0.0);
    CHECK_THROWS_AS(velocity_average(F, spec_of(MomentWeight::energy, quad(10, 6, 2.0)), 1.0, x),
                    std::runtime_error);
    // vacuum forced evolution averages to the free value
    DistributionField Ff = make_free_field(shell_datum(), 0.0);
    const double free_rho =
        velocity_average(Ff, spec_of(MomentWeight::energy, quad(10, 6)), 1.0, x).value;
    CHECK(ok.value == doctest::Approx(free_rho).epsilon(1e-9));
  }

  TEST_CASE("mass flux through the initial hyperboloid equals the flat-slice energy") {
    // Free massive flow of hyperboloid data: Stokes between H_1 and the
    // t = sqrt(1+R^2) slice gives  int_{H_1} chi dmu = int_{Sigma_t} rho dx.
    const H1Trace tr = h1_trace(make_free_field(bump_datum(), 1.0));
    const DistributionField& F = tr.field;
    const double tR = tr.field.time_shift;
    const QuadratureSpec leaf_q = quad(16, 8);
    const QuadratureSpec v_q = quad(16, 8, 2.0);

    const FoliationLeaf h1 =
        build_leaf(FoliationLeaf::Kind::hyperboloid, 1.0, 3, 0.0, tr.support_radius, leaf_q);
    const double flux_h1 =
        h1.integrate([&](double t, const Vec& x) { return chi_m(F, v_q, t, x); });

    const FoliationLeaf flat =
        build_leaf(FoliationLeaf::Kind::fixed_time, tR, 3, 0.0, tr.support_radius, leaf_q);
    const double energy_flat = flat.integrate([&](double t, const Vec& x) {
      return velocity_average(F, spec_of(MomentWeight::energy, v_q), t, x).value;
    });

    CHECK(flux_h1 > 0.01);  // non-vacuous mass
    CHECK(flux_h1 == doctest::Approx(energy_flat).epsilon(5e-6));
  }
}
