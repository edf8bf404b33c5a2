#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kintran/geometry.hpp"
#include "kintran/jet.hpp"
#include "kintran/multiindex.hpp"

namespace kintran {

// Decay behaviour of an initial datum in one of its two argument groups.
enum class DecayClass { gaussian, compact_support, power_law };

std::string decay_class_name(DecayClass c);

// Parameters selecting an initial phase-space density f0(x, v) >= 0.
//
// Kinds:
//   gaussian-xv      A exp(-|x-xc|^2/(2 sx^2)) exp(-|v-vc|^2/(2 sv^2))
//   bump-compact-xv  A B(|x-xc|^2/Rx^2) B(|v-vc|^2/Rv^2), B(s)=exp(-1/(1-s)) on [0,1)
//   shell-in-v       A X(x) W(|v|^2), W a bump supported on v_lo < |v| < v_hi,
//                    X(x) = exp(-|x|^2/(2 sx^2)) or (1+|x|^2)^(-p/2)
struct DatumSpec {
  std::string kind = "gaussian-xv";
  int n = 3;
  double amplitude = 1.0;
  std::vector<double> x_center;  // empty means the origin
  std::vector<double> v_center;
  double sigma_x = 1.0;
  double sigma_v = 1.0;
  double x_radius = 2.0;
  double v_radius = 2.0;
  double v_lo = 0.5;
  double v_hi = 1.5;
  std::string x_profile = "gaussian";  // shell-in-v only: "gaussian" | "power-law"
  double power = 2.05;
};

// Flat table of partial derivatives (D^beta f0)(x, v), where beta runs over
// the 2n arguments (x_1..x_n, v_1..v_n) with |beta| <= order.
class DerivTable {
 public:
  DerivTable() : set_(nullptr) {}
  DerivTable(const MultiIndexSet& set, std::vector<double> vals)
      : set_(&set), vals_(std::move(vals)) {}

  static DerivTable zeros(const MultiIndexSet& set) {
    return DerivTable(set, std::vector<double>(set.size(), 0.0));
  }

  const MultiIndexSet& set() const { return *set_; }
  std::size_t size() const { return vals_.size(); }
  double by_rank(std::size_t r) const { return vals_[r]; }
  double at(const Jet::Key& beta) const { return vals_[static_cast<std::size_t>(set_->rank(beta))]; }
  double value() const { return vals_.empty() ? 0.0 : vals_[0]; }

 private:
  const MultiIndexSet* set_;
  std::vector<double> vals_;
};

class Datum {
 public:
  explicit Datum(DatumSpec spec);
  virtual ~Datum() = default;

  const DatumSpec& spec() const { return spec_; }
  int dim() const { return spec_.n; }

  DecayClass x_decay() const { return x_decay_; }
  DecayClass v_decay() const { return v_decay_; }

  // Outer radius (about the origin) of the closed x-support; +inf when the
  // datum is not compactly supported in x.  Same for v; the inner v-radius is
  // zero except for velocity shells.
  double x_support_radius() const { return x_support_radius_; }
  double v_support_outer() const { return v_support_outer_; }
  double v_support_inner() const { return v_support_inner_; }

  // sup |f0| over {|x| >= R} x R^n_v, resp. R^n_x x {|v| >= R}.
  virtual double sup_tail_x(double R) const = 0;
  virtual double sup_tail_v(double R) const = 0;

  // Smallest radius with sup_tail below tol (exact for compact support).
  double x_radius_for(double tol) const;
  double v_radius_for(double tol) const;

  virtual double value(const Vec& x, const Vec& v) const = 0;

  // All partials up to `order`; the default path evaluates value_jet once.
  virtual DerivTable derivatives(const Vec& x, const Vec& v, int order) const;

  // Evaluate on caller-supplied jets.  Composition hook for data defined by
  // reparametrizing another datum (e.g. traces on a later surface).
  Jet compose_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const {
    return value_jet(x, v);
  }

 protected:
  // Evaluate f0 on jets (x_1..x_n, v_1..v_n are jet variables 0..2n-1).
  virtual Jet value_jet(const std::vector<Jet>& x, const std::vector<Jet>& v) const = 0;

  // Set by concrete types during construction.
  DecayClass x_decay_ = DecayClass::gaussian;
  DecayClass v_decay_ = DecayClass::gaussian;
  double x_support_radius_ = std::numeric_limits<double>::infinity();
  double v_support_outer_ = std::numeric_limits<double>::infinity();
  double v_support_inner_ = 0.0;

  DatumSpec spec_;
};

std::unique_ptr<Datum> make_datum(const DatumSpec& spec);
std::vector<std::string> datum_kinds();

}  // namespace kintran
