#pragma once

#include <cmath>

#include "kintran/jet.hpp"

namespace kintran {

// Below this margin the cutoff factors are zero to double precision, and
// evaluating the inner reciprocal on jets would overflow.
inline constexpr double kProfileEdge = 1e-9;

// exp(-1/(1-s)) on [0, 1), zero beyond; decreasing, flat to all orders at 1.
inline double bump_profile(double s) {
  if (1.0 - s <= kProfileEdge) return 0.0;
  return std::exp(-1.0 / (1.0 - s));
}

inline Jet bump_profile(const Jet& s) {
  if (1.0 - s.value() <= kProfileEdge) return Jet::constant(s.nvars(), s.order(), 0.0);
  const Jet one = Jet::constant(s.nvars(), s.order(), 1.0);
  return exp(inv(s - one));  // -1/(1-s) = 1/(s-1)
}

// exp(-1/(u(1-u))) on (0, 1), zero beyond; peak exp(-4) at u = 1/2.
inline double window_profile(double u) {
  if (u <= kProfileEdge || 1.0 - u <= kProfileEdge) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

inline Jet window_profile(const Jet& u) {
  if (u.value() <= kProfileEdge || 1.0 - u.value() <= kProfileEdge)
    return Jet::constant(u.nvars(), u.order(), 0.0);
  const Jet one = Jet::constant(u.nvars(), u.order(), 1.0);
  // 1/(u(1-u)) = 1/u + 1/(1-u)
  return exp(-(inv(u) + inv(one - u)));
}

}  // namespace kintran
