#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace kintran {

using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string rat_str(const Rat& r) {
  std::string s = std::to_string(r.numerator());
  if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
  return s;
}

// Monomial exponents over the phase-space coordinate slots:
// slot 0 = t, slots 1..n = x^i, slots n+1..2n = v^i, slot 2n+1 = v0.
struct Mono {
  std::array<std::uint8_t, 10> e{};
  bool operator<(const Mono& o) const { return e < o.e; }
  bool operator==(const Mono& o) const { return e == o.e; }
};

// Exact multivariate polynomial in (t, x, v, v0) with rational coefficients.
class Poly {
 public:
  explicit Poly(int n) : n_(n) {
    if (n < 1 || n > 4) throw std::invalid_argument("poly: dimension out of range");
  }

  static Poly constant(int n, const Rat& c) {
    Poly p(n);
    if (c != Rat(0)) p.c_[Mono{}] = c;
    return p;
  }
  static Poly monomial(int n, const Mono& m, const Rat& c) {
    Poly p(n);
    if (c != Rat(0)) p.c_[m] = c;
    return p;
  }
  static Poly t(int n) { return slot_var(n, 0); }
  static Poly x(int n, int i) {
    range(i, n, "x");
    return slot_var(n, i);
  }
  static Poly v(int n, int i) {
    range(i, n, "v");
    return slot_var(n, n + i);
  }
  static Poly v0(int n) { return slot_var(n, 2 * n + 1); }

  int dim() const { return n_; }
  int slots() const { return 2 * n_ + 2; }
  bool is_zero() const { return c_.empty(); }
  const std::map<Mono, Rat>& terms() const { return c_; }

  Rat coeff(const Mono& m) const {
    auto it = c_.find(m);
    return it == c_.end() ? Rat(0) : it->second;
  }

  Poly& operator+=(const Poly& o) {
    check(o);
    for (const auto& [m, c] : o.c_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check(o);
    for (const auto& [m, c] : o.c_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const Rat& s) {
    if (s == Rat(0)) {
      c_.clear();
      return *this;
    }
    for (auto& [m, c] : c_) c *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rat& s) { return a *= s; }
  friend Poly operator*(const Rat& s, Poly a) { return a *= s; }
  Poly operator-() const { return *this * Rat(-1); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check(b);
    Poly r(a.n_);
    for (const auto& [ma, ca] : a.c_)
      for (const auto& [mb, cb] : b.c_) {
        Mono m;
        for (std::size_t i = 0; i < m.e.size(); ++i) {
          const int s = ma.e[i] + mb.e[i];
          if (s > 255) throw std::overflow_error("poly: exponent overflow");
          m.e[i] = static_cast<std::uint8_t>(s);
        }
        r.add_term(m, ca * cb);
      }
    return r;
  }

  // Formal partial derivative in a coordinate slot.
  Poly d_slot(int slot) const {
    Poly r(n_);
    for (const auto& [m, c] : c_) {
      if (m.e[static_cast<std::size_t>(slot)] == 0) continue;
      Mono d = m;
      d.e[static_cast<std::size_t>(slot)] -= 1;
      r.add_term(d, c * Rat(m.e[static_cast<std::size_t>(slot)]));
    }
    return r;
  }
  Poly d_t() const { return d_slot(0); }
  Poly d_x(int i) const {
    range(i, n_, "x");
    return d_slot(i);
  }
  Poly d_v(int i) const {
    range(i, n_, "v");
    return d_slot(n_ + i);
  }
  Poly d_v0() const { return d_slot(2 * n_ + 1); }

  int v0_degree() const {
    int d = 0;
    for (const auto& [m, c] : c_) d = std::max(d, static_cast<int>(m.e[static_cast<std::size_t>(2 * n_ + 1)]));
    return d;
  }

  // Reduce all v0 powers >= 2 with v0^2 = msq + |v|^2.
  Poly reduce_v0(const Rat& msq) const {
    const int slot = 2 * n_ + 1;
    Poly shell = shell_sq(n_, msq);
    Poly r(n_);
    std::vector<Poly> shell_pow{Poly::constant(n_, Rat(1))};
    for (const auto& [m, c] : c_) {
      const int e = m.e[static_cast<std::size_t>(slot)];
      const int q = e / 2, rem = e % 2;
      while (static_cast<int>(shell_pow.size()) <= q) shell_pow.push_back(shell_pow.back() * shell);
      Mono base = m;
      base.e[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(rem);
      r += shell_pow[static_cast<std::size_t>(q)] * Poly::monomial(n_, base, c);
    }
    return r;
  }

  static Poly shell_sq(int n, const Rat& msq) {
    Poly s = Poly::constant(n, msq);
    for (int i = 1; i <= n; ++i) s += Poly::v(n, i) * Poly::v(n, i);
    return s;
  }

  // Exact division by msq + |v|^2 (monic of degree 2 in v^n); nullopt-style:
  // returns true and writes the quotient on success.
  bool try_divide_shell_sq(const Rat& msq, Poly& quotient) const {
    const int slot = 2 * n_;  // v^n
    Poly rem = *this;
    Poly q(n_);
    const Poly s = shell_sq(n_, msq);
    while (true) {
      // pick a monomial with v^n exponent >= 2
      auto it = rem.c_.begin();
      for (; it != rem.c_.end(); ++it)
        if (it->first.e[static_cast<std::size_t>(slot)] >= 2) break;
      if (it == rem.c_.end()) break;
      Mono m = it->first;
      m.e[static_cast<std::size_t>(slot)] -= 2;
      Poly piece = Poly::monomial(n_, m, it->second);
      q += piece;
      rem -= piece * s;
    }
    if (!rem.is_zero()) return false;
    quotient = q;
    return true;
  }

  // Every monomial has v0 exponent >= 1 (false for the zero polynomial).
  bool divisible_by_v0() const {
    if (c_.empty()) return false;
    const int slot = 2 * n_ + 1;
    for (const auto& [m, c] : c_)
      if (m.e[static_cast<std::size_t>(slot)] == 0) return false;
    return true;
  }
  Poly divide_v0() const {
    const int slot = 2 * n_ + 1;
    Poly r(n_);
    for (const auto& [m, c] : c_) {
      Mono d = m;
      if (d.e[static_cast<std::size_t>(slot)] == 0) throw std::logic_error("poly: not divisible by v0");
      d.e[static_cast<std::size_t>(slot)] -= 1;
      r.add_term(d, c);
    }
    return r;
  }

  double eval(double t, const double* x, const double* v, double v0) const {
    double s = 0.0;
    for (const auto& [m, c] : c_) {
      double p = to_double(c);
      p *= ipow(t, m.e[0]);
      for (int i = 1; i <= n_; ++i) p *= ipow(x[i - 1], m.e[static_cast<std::size_t>(i)]);
      for (int i = 1; i <= n_; ++i) p *= ipow(v[i - 1], m.e[static_cast<std::size_t>(n_ + i)]);
      p *= ipow(v0, m.e[static_cast<std::size_t>(2 * n_ + 1)]);
      s += p;
    }
    return s;
  }

  std::string str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : c_) {
      Rat a = c;
      if (first) {
        if (a < Rat(0)) {
          os << "-";
          a = -a;
        }
      } else {
        os << (a < Rat(0) ? " - " : " + ");
        if (a < Rat(0)) a = -a;
      }
      first = false;
      bool havemono = false;
      std::ostringstream mono;
      auto emit = [&](const std::string& name, int e) {
        if (e == 0) return;
        if (havemono) mono << "*";
        mono << name;
        if (e > 1) mono << "^" << e;
        havemono = true;
      };
      emit("t", m.e[0]);
      for (int i = 1; i <= n_; ++i) emit("x" + std::to_string(i), m.e[static_cast<std::size_t>(i)]);
      for (int i = 1; i <= n_; ++i) emit("v" + std::to_string(i), m.e[static_cast<std::size_t>(n_ + i)]);
      emit("v0", m.e[static_cast<std::size_t>(2 * n_ + 1)]);
      if (!havemono) {
        os << rat_str(a);
      } else if (a == Rat(1)) {
        os << mono.str();
      } else {
        os << rat_str(a) << "*" << mono.str();
      }
    }
    return os.str();
  }

 private:
  static Poly slot_var(int n, int slot) {
    Poly p(n);
    Mono m;
    m.e[static_cast<std::size_t>(slot)] = 1;
    p.c_[m] = Rat(1);
    return p;
  }
  static void range(int i, int n, const char* what) {
    if (i < 1 || i > n) throw std::invalid_argument(std::string("poly: ") + what + " index out of range");
  }
  static double ipow(double b, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
  }
  void check(const Poly& o) const {
    if (n_ != o.n_) throw std::invalid_argument("poly: mixed dimensions");
  }
  void add_term(const Mono& m, const Rat& c) {
    auto [it, fresh] = c_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Rat(0)) c_.erase(it);
    } else if (c == Rat(0)) {
      c_.erase(it);
    }
  }

  int n_;
  std::map<Mono, Rat> c_;
};

// Fast numeric form of a polynomial (coefficients lowered to double).
struct CompiledPoly {
  struct Term {
    std::array<std::uint8_t, 10> e;
    double c;
  };
  int n = 0;
  std::vector<Term> terms;

  double eval(double t, const double* x, const double* v, double v0) const {
    double s = 0.0;
    for (const auto& tm : terms) {
      double p = tm.c;
      for (int k = 0; k < tm.e[0]; ++k) p *= t;
      for (int i = 1; i <= n; ++i)
        for (int k = 0; k < tm.e[static_cast<std::size_t>(i)]; ++k) p *= x[i - 1];
      for (int i = 1; i <= n; ++i)
        for (int k = 0; k < tm.e[static_cast<std::size_t>(n + i)]; ++k) p *= v[i - 1];
      for (int k = 0; k < tm.e[static_cast<std::size_t>(2 * n + 1)]; ++k) p *= v0;
      s += p;
    }
    return s;
  }
};

inline CompiledPoly compile(const Poly& p) {
  CompiledPoly c;
  c.n = p.dim();
  for (const auto& [m, r] : p.terms()) c.terms.push_back({m.e, to_double(r)});
  return c;
}

// Rational expression N(t,x,v,v0)/v0^k restricted to the mass shell
// v0^2 = msq + |v|^2.  The numerator is kept reduced to v0-degree <= 1,
// which makes the zero test exact: on the shell, {1, v0} are linearly
// independent over rational functions of (t,x,v).
class ShellPoly {
 public:
  ShellPoly(int n, const Rat& msq) : num_(n), den_(0), msq_(msq) {}
  ShellPoly(const Poly& p, const Rat& msq) : num_(p.reduce_v0(msq)), den_(0), msq_(msq) { normalize(); }

  static ShellPoly constant(int n, const Rat& msq, const Rat& c) {
    return ShellPoly(Poly::constant(n, c), msq);
  }

  // numerator / v0^den on the shell
  static ShellPoly from_ratio(const Poly& numerator, int den, const Rat& msq) {
    if (den < 0) throw std::invalid_argument("shellpoly: negative denominator power");
    ShellPoly r(numerator.dim(), msq);
    r.num_ = numerator.reduce_v0(msq);
    r.den_ = r.num_.is_zero() ? 0 : den;
    r.normalize();
    return r;
  }

  int dim() const { return num_.dim(); }
  const Rat& msq() const { return msq_; }
  const Poly& num() const { return num_; }
  int den_pow() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  ShellPoly& operator+=(const ShellPoly& o) {
    check(o);
    const int k = std::max(den_, o.den_);
    num_ = shift(num_, k - den_) + shift(o.num_, k - o.den_);
    num_ = num_.reduce_v0(msq_);
    den_ = k;
    normalize();
    return *this;
  }
  ShellPoly& operator-=(const ShellPoly& o) { return *this += o * Rat(-1); }
  ShellPoly& operator*=(const Rat& s) {
    num_ *= s;
    if (num_.is_zero()) den_ = 0;
    return *this;
  }
  friend ShellPoly operator+(ShellPoly a, const ShellPoly& b) { return a += b; }
  friend ShellPoly operator-(ShellPoly a, const ShellPoly& b) { return a -= b; }
  friend ShellPoly operator*(ShellPoly a, const Rat& s) { return a *= s; }
  friend ShellPoly operator*(const Rat& s, ShellPoly a) { return a *= s; }
  ShellPoly operator-() const { return *this * Rat(-1); }

  friend ShellPoly operator*(const ShellPoly& a, const ShellPoly& b) {
    a.check(b);
    ShellPoly r(a.dim(), a.msq_);
    r.num_ = (a.num_ * b.num_).reduce_v0(a.msq_);
    r.den_ = a.den_ + b.den_;
    if (r.num_.is_zero()) r.den_ = 0;
    r.normalize();
    return r;
  }

  bool equals(const ShellPoly& o) const { return (*this - o).is_zero(); }

  // d/dt and d/dx^i commute with the shell constraint.
  ShellPoly d_t() const { return with_num(num_.d_t()); }
  ShellPoly d_x(int i) const { return with_num(num_.d_x(i)); }

  // On-shell velocity derivative: v0 varies with v, dv0/dv^i = v^i/v0.
  ShellPoly d_v(int i) const {
    const int n = num_.dim();
    const Poly vi = Poly::v(n, i);
    const Poly v0 = Poly::v0(n);
    Poly numerator = num_.d_v(i) * v0 * v0 + num_.d_v0() * vi * v0 - Rat(den_) * vi * num_;
    ShellPoly r(n, msq_);
    r.num_ = numerator.reduce_v0(msq_);
    r.den_ = den_ + 2;
    if (r.num_.is_zero()) r.den_ = 0;
    r.normalize();
    return r;
  }

  double eval(double t, const double* x, const double* v) const {
    double vsq = 0.0;
    for (int i = 0; i < num_.dim(); ++i) vsq += v[i] * v[i];
    const double v0 = std::sqrt(to_double(msq_) + vsq);
    double d = 1.0;
    for (int k = 0; k < den_; ++k) d *= v0;
    return num_.eval(t, x, v, v0) / d;
  }

  std::string str() const {
    if (den_ == 0) return num_.str();
    std::string s = "(" + num_.str() + ")/v0";
    if (den_ > 1) s += "^" + std::to_string(den_);
    return s;
  }

 private:
  ShellPoly with_num(const Poly& p) const {
    ShellPoly r(num_.dim(), msq_);
    r.num_ = p.reduce_v0(msq_);
    r.den_ = r.num_.is_zero() ? 0 : den_;
    r.normalize();
    return r;
  }
  Poly shift(const Poly& p, int k) const {
    Poly r = p;
    const Poly v0 = Poly::v0(p.dim());
    for (int j = 0; j < k; ++j) r = r * v0;
    return r;
  }
  void check(const ShellPoly& o) const {
    if (num_.dim() != o.num_.dim() || msq_ != o.msq_)
      throw std::invalid_argument("shellpoly: mixed shells");
  }
  void normalize() {
    if (num_.is_zero()) {
      den_ = 0;
      return;
    }
    while (den_ > 0 && num_.divisible_by_v0()) {
      num_ = num_.divide_v0();
      --den_;
    }
    // cancel (msq + |v|^2)/v0^2 factors for a tidy canonical form
    while (den_ >= 2) {
      Poly q(num_.dim());
      if (!num_.try_divide_shell_sq(msq_, q)) break;
      num_ = q;
      den_ -= 2;
    }
  }

  Poly num_;
  int den_;
  Rat msq_;
};

struct CompiledShellPoly {
  CompiledPoly num;
  int den = 0;
  double msq = 0.0;

  double eval(double t, const double* x, const double* v, double v0) const {
    double d = 1.0;
    for (int k = 0; k < den; ++k) d *= v0;
    return num.eval(t, x, v, v0) / d;
  }
};

inline CompiledShellPoly compile(const ShellPoly& p) {
  return CompiledShellPoly{compile(p.num()), p.den_pow(), to_double(p.msq())};
}

}  // namespace kintran
