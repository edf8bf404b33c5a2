#pragma once

#include <string>
#include <vector>

#include "kintran/fields.hpp"

namespace kintran {

// Conserved weights of the transport flow.  The massive family holds the
// antisymmetrized pairs v^a x^b - x^a v^b (a < b over spacetime indices,
// x^0 = t) together with the momenta v^a; the massless family adds the
// scalar product x^a v_a = -t v0 + x.v, conserved only on the zero shell.
struct Weight {
  std::string id;
  ShellPoly expr;
};

std::vector<Weight> weight_catalog_massive(int n, const Rat& msq);
std::vector<Weight> weight_catalog_massless(int n);

// kappa_0 = k_0 / v0 (uniformly bounded weights, massless shell).
std::vector<Weight> weight_catalog_kappa0(int n);

// Symbolic transport action T(z); identically zero exactly when conserved.
ShellPoly transport_action(const Weight& z);

double weight_eval(const Weight& z, const PhasePoint& p);

}  // namespace kintran
