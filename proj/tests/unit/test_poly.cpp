#include "doctest.h"
#include "kintran/poly.hpp"

#include <cmath>

using kintran::Poly;
using kintran::Rat;
using kintran::ShellPoly;

TEST_SUITE("poly") {
  TEST_CASE("arithmetic and printing are canonical") {
    const int n = 2;
    Poly p = (Poly::t(n) - Poly::x(n, 1)) * (Poly::t(n) - Poly::x(n, 1));
    CHECK(p.str() == "x1^2 - 2*t*x1 + t^2");
    CHECK((p - p).is_zero());
    double x[2] = {0.5, 2.0};
    double v[2] = {0.0, 0.0};
    CHECK(p.eval(3.0, x, v, 0.0) == doctest::Approx(6.25));
  }

  TEST_CASE("formal derivatives") {
    const int n = 3;
    Poly p = Poly::t(n) * Poly::v(n, 2) * Poly::v(n, 2);
    CHECK(p.d_v(2).str() == "2*t*v2");
    CHECK(p.d_t().str() == "v2^2");
    CHECK(p.d_x(1).is_zero());
  }

  TEST_CASE("mass-shell reduction kills the defining relation") {
    const int n = 3;
    const Rat msq(1);
    Poly rel = Poly::v0(n) * Poly::v0(n) - Poly::shell_sq(n, msq);
    CHECK(ShellPoly(rel, msq).is_zero());
  }

  TEST_CASE("denominator powers cancel against shell factors") {
    const int n = 2;
    const Rat msq(1);
    ShellPoly r = ShellPoly::from_ratio(Poly::v0(n) * Poly::v0(n) * Poly::t(n), 2, msq);
    CHECK(r.den_pow() == 0);
    CHECK(r.num().str() == "t");
    ShellPoly u = ShellPoly(Poly::v0(n), msq) * ShellPoly(Poly::v0(n), msq);
    ShellPoly expect = ShellPoly(Poly::shell_sq(n, msq), msq);
    CHECK(u.equals(expect));
  }

  TEST_CASE("on-shell velocity derivatives") {
    const int n = 3;
    const Rat msq(1);
    // d v0 / d v^1 = v1 / v0
    ShellPoly dv0 = ShellPoly(Poly::v0(n), msq).d_v(1);
    CHECK(dv0.equals(ShellPoly::from_ratio(Poly::v(n, 1), 1, msq)));
    // d |v|^2 / d v^1 = 2 v1
    ShellPoly dvsq = ShellPoly(Poly::shell_sq(n, Rat(0)), msq).d_v(1);
    CHECK(dvsq.equals(ShellPoly(Poly::v(n, 1) * Rat(2), msq)));
    // d (1/v0) / d v^1 = -v1 / v0^3
    ShellPoly dinv = ShellPoly::from_ratio(Poly::constant(n, Rat(1)), 1, msq).d_v(1);
    CHECK(dinv.equals(ShellPoly::from_ratio(-Poly::v(n, 1), 3, msq)));
    CHECK(dinv.den_pow() == 3);
  }

  TEST_CASE("numeric evaluation sits on the shell") {
    const int n = 3;
    const Rat msq(1);
    ShellPoly r = ShellPoly::from_ratio(Poly::t(n) * Poly::v(n, 1), 1, msq);
    double x[3] = {0.1, -0.2, 0.3};
    double v[3] = {0.4, 0.5, -0.6};
    const double v0 = std::sqrt(1 + 0.16 + 0.25 + 0.36);
    CHECK(r.eval(2.0, x, v) == doctest::Approx(2.0 * 0.4 / v0).epsilon(1e-14));
    kintran::CompiledShellPoly c = kintran::compile(r);
    CHECK(c.eval(2.0, x, v, v0) == doctest::Approx(r.eval(2.0, x, v)).epsilon(1e-14));
  }

  TEST_CASE("mixed contexts are rejected") {
    ShellPoly a = ShellPoly::constant(2, Rat(1), Rat(1));
    ShellPoly b = ShellPoly::constant(2, Rat(0), Rat(1));
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(Poly::x(2, 3), std::invalid_argument);
  }
}
