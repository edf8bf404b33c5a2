#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kintran/geometry.hpp"
#include "kintran/poly.hpp"

namespace kintran {

// Spacetime vector field with polynomial components w^alpha(t,x),
// slot 0 = time component.
struct BaseField {
  std::string id;
  int n = 0;
  std::vector<Poly> w;  // n+1 components
};

// First-order operator on the mass shell:
//   a^0 d_t + a^i d_{x^i} + b^i d_{v^i},
// velocity derivatives taken on-shell (v0 a function of v).  All complete
// lifts, transport operators and their brackets live in this class.
struct LiftedField {
  std::string id;
  int n = 0;
  Rat msq;
  std::vector<ShellPoly> a;  // n+1
  std::vector<ShellPoly> b;  // n

  bool is_zero() const;
  bool equals(const LiftedField& o) const;
};

enum class AlgebraId { P, K, Phat, Khat, Phat0, Khat0 };

std::string algebra_name(AlgebraId id);
AlgebraId algebra_from_name(const std::string& name);

// Poincare / conformal catalogs in the paper order:
// translations, rotations (i<j), boosts, then the scaling.
std::vector<BaseField> base_catalog(AlgebraId id, int n);  // P or K only
std::vector<LiftedField> lifted_catalog(AlgebraId id, int n, const Rat& msq);

// Complete lift W^alpha d_alpha + v^beta (dW^i/dx^beta) d_{v^i}.
LiftedField complete_lift(const BaseField& w, const Rat& msq);

// Embed a spacetime field with no vertical part (e.g. the plain scaling).
LiftedField horizontal_field(const BaseField& w, const Rat& msq);

// The free transport operator v0 d_t + v^i d_{x^i} on the shell of mass^2 = msq.
LiftedField transport_field(int n, const Rat& msq);

// The radial vertical field v^i d_{v^i}.
LiftedField vertical_scaling(int n, const Rat& msq);

// Action of a lifted field on an exact shell expression.
ShellPoly apply_sym(const LiftedField& F, const ShellPoly& h);

LiftedField lie_bracket(const LiftedField& F, const LiftedField& G);

struct TransportCommutator {
  enum class Kind { zero, multiple_of_transport, other };
  Kind kind = Kind::zero;
  Rat factor;           // for multiple_of_transport: [T, Z] = factor * T
  LiftedField bracket;  // always filled
};
TransportCommutator transport_commutator(const LiftedField& Z);

// Exact constant-coefficient decomposition of X in the span of `basis`.
std::optional<std::vector<Rat>> decompose_constant(const LiftedField& X,
                                                   const std::vector<LiftedField>& basis);

// Ordered composition words over a catalog; `seq` lists catalog indices
// left-to-right, applied right-to-left.
struct MultiIndex {
  AlgebraId algebra = AlgebraId::Khat;
  std::vector<int> seq;

  int order() const { return static_cast<int>(seq.size()); }
};
std::vector<MultiIndex> multi_indices(AlgebraId id, int n, int max_order);

// Numeric action on a scalar phase-space function: central differences with
// one Richardson level (h = eps^{1/3} (1 + |coordinate|)) unless the caller
// provides exact first partials (slot order: t, x^i, v^i on-shell).
struct PhaseFunction {
  std::function<double(const PhasePoint&)> value;
  std::function<double(const PhasePoint&, int slot)> d1;  // optional
};
double apply(const LiftedField& F, const PhaseFunction& f, const PhasePoint& p);

// Residual of a classical Minkowski vector-field identity evaluated on a
// built-in battery of smooth test functions at the given spacetime points.
// Identities: "cone-dt", "cone-dx", "cone-dr", "null-ds", "angular-dbar".
double minkowski_identity_residual(const std::string& identity, int n,
                                   const std::vector<std::pair<double, Vec>>& points);
std::vector<std::string> minkowski_identity_names();

// Exact constant-coefficient decomposition of a shell expression in the span
// of the given expressions.
std::optional<std::vector<Rat>> decompose_shell(const ShellPoly& X,
                                                const std::vector<ShellPoly>& basis);

namespace detail {
// Gaussian elimination over the rationals; each row holds `unknowns`
// coefficients followed by the right-hand side.
std::optional<std::vector<Rat>> solve_linear_rat(std::vector<std::vector<Rat>> rows,
                                                 std::size_t unknowns);
}  // namespace detail

}  // namespace kintran
