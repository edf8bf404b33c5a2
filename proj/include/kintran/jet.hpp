#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace kintran {

// Truncated multivariate Taylor expansion of a smooth function about a point:
// the value together with all Taylor coefficients up to a fixed total degree.
// Arithmetic and series composition propagate coefficients exactly, so any
// profile built from jets exposes closed-form partial derivatives of every
// tracked order.  This is the derivative oracle behind data, wave profiles
// and sources; no finite differencing is involved.
class Jet {
 public:
  static constexpr int kMaxVars = 8;
  using Key = std::array<std::uint8_t, kMaxVars>;

  Jet(int nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars < 0 || nvars > kMaxVars) throw std::invalid_argument("jet: bad variable count");
    if (order < 0 || order > 200) throw std::invalid_argument("jet: bad order");
  }

  static Jet constant(int nvars, int order, double c) {
    Jet j(nvars, order);
    if (c != 0.0) j.c_[Key{}] = c;
    return j;
  }

  // The coordinate function u_i, expanded about u_i = x.
  static Jet variable(int nvars, int order, int i, double x) {
    if (i < 0 || i >= nvars) throw std::invalid_argument("jet: bad variable index");
    Jet j = constant(nvars, order, x);
    if (order >= 1) {
      Key k{};
      k[i] = 1;
      j.c_[k] = 1.0;
    }
    return j;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }

  double value() const { return coeff(Key{}); }

  double coeff(const Key& k) const {
    auto it = c_.find(k);
    return it == c_.end() ? 0.0 : it->second;
  }

  // Partial derivative (Taylor coefficient times the factorials).
  double partial(const Key& k) const {
    double f = 1.0;
    for (int i = 0; i < nvars_; ++i)
      for (int j = 2; j <= k[i]; ++j) f *= j;
    return coeff(k) * f;
  }

  static int degree(const Key& k) {
    int s = 0;
    for (auto e : k) s += e;
    return s;
  }

  Jet& operator+=(const Jet& o) {
    check(o);
    for (const auto& [k, v] : o.c_) add_term(k, v);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check(o);
    for (const auto& [k, v] : o.c_) add_term(k, -v);
    return *this;
  }
  Jet& operator*=(double s) {
    if (s == 0.0) {
      c_.clear();
      return *this;
    }
    for (auto& [k, v] : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    add_term(Key{}, s);
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    return r += s;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  Jet operator-() const {
    Jet r(*this);
    for (auto& [k, v] : r.c_) v = -v;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check(b);
    Jet r(a.nvars_, a.order_);
    for (const auto& [ka, va] : a.c_) {
      const int da = degree(ka);
      for (const auto& [kb, vb] : b.c_) {
        if (da + degree(kb) > a.order_) continue;
        Key k;
        for (int i = 0; i < kMaxVars; ++i) k[i] = static_cast<std::uint8_t>(ka[i] + kb[i]);
        r.add_term(k, va * vb);
      }
    }
    return r;
  }

  // g(u) for scalar g given Taylor coefficients of g about u.value():
  // coeffs[k] = g^{(k)}(u0)/k!.  Horner in the nilpotent part of u.
  static Jet series(const Jet& u, const std::vector<double>& coeffs) {
    Jet w = u;
    w.add_term(Key{}, -u.value());  // nilpotent part
    Jet r = constant(u.nvars_, u.order_, coeffs.empty() ? 0.0 : coeffs.back());
    for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k) {
      r = r * w;
      r += coeffs[static_cast<std::size_t>(k)];
    }
    return r;
  }

  std::size_t term_count() const { return c_.size(); }

 private:
  void check(const Jet& o) const {
    if (nvars_ != o.nvars_ || order_ != o.order_)
      throw std::invalid_argument("jet: mixed contexts");
  }
  void add_term(const Key& k, double v) {
    auto [it, fresh] = c_.try_emplace(k, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0.0) c_.erase(it);
    } else if (v == 0.0) {
      c_.erase(it);
    }
  }

  int nvars_;
  int order_;
  std::map<Key, double> c_;
};

inline Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  double f = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    if (k > 0) f *= k;
    c[static_cast<std::size_t>(k)] = e / f;
  }
  return Jet::series(u, c);
}

inline Jet log(const Jet& u) {
  const double u0 = u.value();
  if (u0 <= 0.0) throw std::domain_error("jet: log of non-positive value");
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  c[0] = std::log(u0);
  double p = 1.0;
  for (int k = 1; k <= u.order(); ++k) {
    p *= u0;
    c[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) / (k * p);
  }
  return Jet::series(u, c);
}

// u^p for real p; u must be positive when derivatives are tracked.
inline Jet pow(const Jet& u, double p) {
  const double u0 = u.value();
  if (u0 <= 0.0) throw std::domain_error("jet: pow about non-positive value");
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  double binom = 1.0;  // p choose k
  for (int k = 0; k <= u.order(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    c[static_cast<std::size_t>(k)] = binom * std::pow(u0, p - k);
  }
  return Jet::series(u, c);
}

inline Jet sqrt(const Jet& u) { return pow(u, 0.5); }

inline Jet inv(const Jet& u) {
  const double u0 = u.value();
  if (u0 == 0.0) throw std::domain_error("jet: inverse of zero");
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  double p = 1.0 / u0;
  for (int k = 0; k <= u.order(); ++k) {
    c[static_cast<std::size_t>(k)] = p;
    p *= -1.0 / u0;
  }
  return Jet::series(u, c);
}

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.value()), co = std::cos(u.value());
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  double f = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    if (k > 0) f *= k;
    const double d = (k % 4 == 0) ? s : (k % 4 == 1) ? co : (k % 4 == 2) ? -s : -co;
    c[static_cast<std::size_t>(k)] = d / f;
  }
  return Jet::series(u, c);
}

inline Jet cos(const Jet& u) {
  const double s = std::sin(u.value()), co = std::cos(u.value());
  std::vector<double> c(static_cast<std::size_t>(u.order()) + 1);
  double f = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    if (k > 0) f *= k;
    const double d = (k % 4 == 0) ? co : (k % 4 == 1) ? -s : (k % 4 == 2) ? -co : s;
    c[static_cast<std::size_t>(k)] = d / f;
  }
  return Jet::series(u, c);
}

}  // namespace kintran
