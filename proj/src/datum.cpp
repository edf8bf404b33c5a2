#include "kintran/datum.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "kintran/profiles.hpp"

namespace kintran {

namespace {

Vec center_from(const std::vector<double>& c, int n, const char* what) {
  Vec out = Vec::Zero(n);
  if (!c.empty()) {
    if (static_cast<int>(c.size()) != n)
      throw std::invalid_argument(std::string("datum: ") + what + " has wrong dimension");
    for (int i = 0; i < n; ++i) out(i) = c[static_cast<std::size_t>(i)];
  }
  return out;
}

double bump(double s) { return bump_profile(s); }
Jet bump_jet(const Jet& s) { return bump_profile(s); }
double window(double u) { return window_profile(u); }
Jet window_jet(const Jet& u) { return window_profile(u); }

Jet squared_offset(const std::vector<Jet>& y, const Vec& c) {
  Jet s = Jet::constant(y[0].nvars(), y[0].order(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Jet d = y[i] - Jet::constant(y[i].nvars(), y[i].order(), c(static_cast<Eigen::Index>(i)));
    s = s + d * d;
  }
  return s;
}

}  // namespace

std::string decay_class_name(DecayClass c) {
  switch (c) {
    case DecayClass::gaussian: return "gaussian";
    case DecayClass::compact_support: return "compact-support";
    case DecayClass::power_law: return "power-law";
  }
  return "?";
}

Datum::Datum(DatumSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1 || spec_.n > 4) throw std::invalid_argument("datum: dimension must be 1..4");
  if (spec_.amplitude < 0.0) throw std::invalid_argument("datum: amplitude must be >= 0");
}

DerivTable Datum::derivatives(const Vec& x, const Vec& v, int order) const {
  const int n = dim();
  const auto& set = MultiIndexSet::get(2 * n, order);
  std::vector<Jet> xj, vj;
  xj.reserve(static_cast<std::size_t>(n));
  vj.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(2 * n, order, i, x(i)));
  for (int i = 0; i < n; ++i) vj.push_back(Jet::variable(2 * n, order, n + i, v(i)));
  const Jet val = value_jet(xj, vj);
  std::vector<double> vals(set.size());
  for (std::size_t r = 0; r < set.size(); ++r) vals[r] = val.partial(set.key(r));
  return DerivTable(set, std::move(vals));
}

namespace {

double shrink_radius(double tol, double start, const std::function<double(double)>& tail) {
  if (!(tol > 0.0)) throw std::invalid_argument("datum: tolerance must be positive");
  if (tail(0.0) <= tol) return 0.0;
  double hi = start > 0.0 ? start : 1.0;
  int guard = 0;
  while (tail(hi) > tol) {
    hi *= 2.0;
    if (++guard > 600) throw std::runtime_error("datum: tail bound does not reach tolerance");
  }
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double Datum::x_radius_for(double tol) const {
  if (x_decay_ == DecayClass::compact_support) return x_support_radius_;
  return shrink_radius(tol, 1.0, [this](double R) { return sup_tail_x(R); });
}

double Datum::v_radius_for(double tol) const {
  if (v_decay_ == DecayClass::compact_support) return v_support_outer_;
  return shrink_radius(tol, 1.0, [this](double R) { return sup_tail_v(R); });
}

namespace {

class GaussianDatum final : public Datum {
 public:
  explicit GaussianDatum(DatumSpec spec) : Datum(std::move(spec)) {
    if (spec_.sigma_x <= 0.0 || spec_.sigma_v <= 0.0)
      throw std::invalid_argument("datum: gaussian widths must be positive");
    xc_ = center_from(spec_.x_center, dim(), "x_center");
    vc_ = center_from(spec_.v_center, dim(), "v_center");
    x_decay_ = DecayClass::gaussian;
    v_decay_ = DecayClass::gaussian;
  }

  double value(const Vec& x, const Vec& v) const override {
    const double qx = (x - xc_).squaredNorm() / (2.0 * spec_.sigma_x * spec_.sigma_x);
    const double qv = (v - vc_).squaredNorm() / (2.0 * spec_.sigma_v * spec_.sigma_v);
    return spec_.amplitude * std::exp(-qx - qv);
  }

  double sup_tail_x(double R) const override {
    const double d = std::max(0.0, R - xc_.norm());
    return spec_.amplitude * std::exp(-d * d / (2.0 * spec_.sigma_x * spec_.sigma_x));
  }

  double sup_tail_v(double R) const override {
    const double d = std::max(0.0, R - vc_.norm());
    return spec_.amplitude * std::exp(-d * d / (2.0 * spec_.sigma_v * spec_.sigma_v));
  }

  // Closed form: each coordinate contributes (-1/sigma)^m He_m(u) with
  // probabilists' Hermite polynomials, so the whole table is one product per
  // entry.  The jet path stays available through the base class as an
  // independent cross-check.
  DerivTable derivatives(const Vec& x, const Vec& v, int order) const override {
    const int n = dim();
    const auto& set = MultiIndexSet::get(2 * n, order);
    const double f = value(x, v);
    // factors[i][m] = (-1/sigma_i)^m He_m(u_i)
    std::vector<std::vector<double>> factors(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) {
      const bool xs = i < n;
      const double sigma = xs ? spec_.sigma_x : spec_.sigma_v;
      const double u = xs ? (x(i) - xc_(i)) / sigma : (v(i - n) - vc_(i - n)) / sigma;
      auto& h = factors[static_cast<std::size_t>(i)];
      h.resize(static_cast<std::size_t>(order) + 1);
      double hm1 = 0.0, h0 = 1.0;  // He_{-1}, He_0
      double scale = 1.0;
      h[0] = 1.0;
      for (int m = 1; m <= order; ++m) {
        const double hnext = u * h0 - static_cast<double>(m - 1) * hm1;
        hm1 = h0;
        h0 = hnext;
        scale *= -1.0 / sigma;
        h[static_cast<std::size_t>(m)] = scale * h0;
      }
    }
    std::vector<double> vals(set.size());
    for (std::size_t r = 0; r < set.size(); ++r) {
      const auto& beta = set.key(r);
      double p = f;
      for (int i = 0; i < 2 * n; ++i)
        p *= factors[static_cast<std::size_t>(i)][beta[static_cast<std::size_t>(i)]];
      vals[r] = p;
    }
    return DerivTable(set, std::move(vals));
  }

 protected:
  Jet value_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const override {
    const double ax = -1.0 / (2.0 * spec_.sigma_x * spec_.sigma_x);
    const double av = -1.0 / (2.0 * spec_.sigma_v * spec_.sigma_v);
    const Jet q = squared_offset(x, xc_) * ax + squared_offset(v, vc_) * av;
    return exp(q) * spec_.amplitude;
  }

 private:
  Vec xc_, vc_;
};

class BumpDatum final : public Datum {
 public:
  explicit BumpDatum(DatumSpec spec) : Datum(std::move(spec)) {
    if (spec_.x_radius <= 0.0 || spec_.v_radius <= 0.0)
      throw std::invalid_argument("datum: bump radii must be positive");
    xc_ = center_from(spec_.x_center, dim(), "x_center");
    vc_ = center_from(spec_.v_center, dim(), "v_center");
    x_decay_ = DecayClass::compact_support;
    v_decay_ = DecayClass::compact_support;
    x_support_radius_ = xc_.norm() + spec_.x_radius;
    v_support_outer_ = vc_.norm() + spec_.v_radius;
  }

  double value(const Vec& x, const Vec& v) const override {
    const double sx = (x - xc_).squaredNorm() / (spec_.x_radius * spec_.x_radius);
    const double sv = (v - vc_).squaredNorm() / (spec_.v_radius * spec_.v_radius);
    return spec_.amplitude * bump(sx) * bump(sv);
  }

  double sup_tail_x(double R) const override {
    if (R >= x_support_radius_) return 0.0;
    const double d = std::max(0.0, R - xc_.norm()) / spec_.x_radius;
    return spec_.amplitude * bump(d * d) * bump(0.0);
  }

  double sup_tail_v(double R) const override {
    if (R >= v_support_outer_) return 0.0;
    const double d = std::max(0.0, R - vc_.norm()) / spec_.v_radius;
    return spec_.amplitude * bump(0.0) * bump(d * d);
  }

 protected:
  Jet value_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const override {
    const Jet sx = squared_offset(x, xc_) * (1.0 / (spec_.x_radius * spec_.x_radius));
    const Jet sv = squared_offset(v, vc_) * (1.0 / (spec_.v_radius * spec_.v_radius));
    return bump_jet(sx) * bump_jet(sv) * spec_.amplitude;
  }

 private:
  Vec xc_, vc_;
};

class ShellDatum final : public Datum {
 public:
  explicit ShellDatum(DatumSpec spec) : Datum(std::move(spec)) {
    if (!(spec_.v_lo >= 0.0) || !(spec_.v_hi > spec_.v_lo))
      throw std::invalid_argument("datum: shell window needs 0 <= v_lo < v_hi");
    if (!spec_.x_center.empty() || !spec_.v_center.empty())
      throw std::invalid_argument("datum: shell-in-v is centered at the origin");
    if (spec_.x_profile == "gaussian") {
      if (spec_.sigma_x <= 0.0) throw std::invalid_argument("datum: gaussian width must be positive");
      x_decay_ = DecayClass::gaussian;
    } else if (spec_.x_profile == "power-law") {
      if (spec_.power <= 0.0) throw std::invalid_argument("datum: power-law exponent must be positive");
      x_decay_ = DecayClass::power_law;
    } else {
      throw std::invalid_argument("datum: unknown x_profile '" + spec_.x_profile + "'");
    }
    v_decay_ = DecayClass::compact_support;
    v_support_inner_ = spec_.v_lo;
    v_support_outer_ = spec_.v_hi;
  }

  double value(const Vec& x, const Vec& v) const override {
    return spec_.amplitude * x_profile(x.squaredNorm()) * window(shell_coord(v.squaredNorm()));
  }

  double sup_tail_x(double R) const override {
    return spec_.amplitude * std::exp(-4.0) * x_profile(R * R);
  }

  double sup_tail_v(double R) const override {
    if (R >= spec_.v_hi) return 0.0;
    const double u = shell_coord(std::max(R, spec_.v_lo) * std::max(R, spec_.v_lo));
    // the window peaks at the midpoint; past it the tail sup is the window value
    return spec_.amplitude * (u <= 0.5 ? std::exp(-4.0) : window(u));
  }

 protected:
  Jet value_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const override {
    const Vec zero = Vec::Zero(dim());
    const Jet sx = squared_offset(x, zero);
    const Jet sv = squared_offset(v, zero);
    const double lo2 = spec_.v_lo * spec_.v_lo;
    const double span = spec_.v_hi * spec_.v_hi - lo2;
    const Jet u = (sv - Jet::constant(sv.nvars(), sv.order(), lo2)) * (1.0 / span);
    Jet X(sx.nvars(), sx.order());
    if (x_decay_ == DecayClass::gaussian) {
      X = exp(sx * (-1.0 / (2.0 * spec_.sigma_x * spec_.sigma_x)));
    } else {
      X = pow(sx + Jet::constant(sx.nvars(), sx.order(), 1.0), -0.5 * spec_.power);
    }
    return X * window_jet(u) * spec_.amplitude;
  }

 private:
  double shell_coord(double vsq) const {
    const double lo2 = spec_.v_lo * spec_.v_lo;
    return (vsq - lo2) / (spec_.v_hi * spec_.v_hi - lo2);
  }

  double x_profile(double xsq) const {
    if (x_decay_ == DecayClass::gaussian)
      return std::exp(-xsq / (2.0 * spec_.sigma_x * spec_.sigma_x));
    return std::pow(1.0 + xsq, -0.5 * spec_.power);
  }
};

}  // namespace

std::unique_ptr<Datum> make_datum(const DatumSpec& spec) {
  if (spec.kind == "gaussian-xv") return std::make_unique<GaussianDatum>(spec);
  if (spec.kind == "bump-compact-xv") return std::make_unique<BumpDatum>(spec);
  if (spec.kind == "shell-in-v") return std::make_unique<ShellDatum>(spec);
  throw std::invalid_argument("datum: unknown kind '" + spec.kind + "'");
}

std::vector<std::string> datum_kinds() { return {"gaussian-xv", "bump-compact-xv", "shell-in-v"}; }

}  // namespace kintran
