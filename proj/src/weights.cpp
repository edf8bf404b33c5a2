#include "kintran/weights.hpp"

#include <stdexcept>

namespace kintran {

namespace {
Poly coord_x(int n, int a) { return a == 0 ? Poly::t(n) : Poly::x(n, a); }
Poly coord_v(int n, int a) { return a == 0 ? Poly::v0(n) : Poly::v(n, a); }
}  // namespace

std::vector<Weight> weight_catalog_massive(int n, const Rat& msq) {
  if (n < 1 || n > 4) throw std::invalid_argument("weight_catalog: dimension out of range");
  std::vector<Weight> out;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      Poly z = coord_v(n, a) * coord_x(n, b) - coord_x(n, a) * coord_v(n, b);
      out.push_back({"z_" + std::to_string(a) + std::to_string(b), ShellPoly(z, msq)});
    }
  for (int a = 0; a <= n; ++a)
    out.push_back({"z_p" + std::to_string(a), ShellPoly(coord_v(n, a), msq)});
  return out;
}

std::vector<Weight> weight_catalog_massless(int n) {
  std::vector<Weight> out = weight_catalog_massive(n, Rat(0));
  Poly xv = -(Poly::t(n) * Poly::v0(n));
  for (int i = 1; i <= n; ++i) xv += Poly::x(n, i) * Poly::v(n, i);
  out.push_back({"z_xv", ShellPoly(xv, Rat(0))});
  return out;
}

std::vector<Weight> weight_catalog_kappa0(int n) {
  std::vector<Weight> out;
  for (const Weight& z : weight_catalog_massless(n)) {
    ShellPoly scaled = z.expr * ShellPoly::from_ratio(Poly::constant(n, Rat(1)), 1, Rat(0));
    out.push_back({"k_" + z.id.substr(2), scaled});
  }
  return out;
}

ShellPoly transport_action(const Weight& z) {
  return apply_sym(transport_field(z.expr.dim(), z.expr.msq()), z.expr);
}

double weight_eval(const Weight& z, const PhasePoint& p) {
  if (p.dim() != z.expr.dim()) throw std::invalid_argument("weight_eval: dimension mismatch");
  return z.expr.eval(p.t, p.x.data(), p.v.data());
}

}  // namespace kintran
