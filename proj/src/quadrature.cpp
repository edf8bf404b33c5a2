#include "kintran/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kintran {

namespace {
constexpr double kPi = 3.14159265358979323846;

Rule1D golub_welsch(int k) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  r.x.resize(static_cast<std::size_t>(k));
  r.w.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    r.x[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double q = es.eigenvectors()(0, i);
    r.w[static_cast<std::size_t>(i)] = 2.0 * q * q;
  }
  return r;
}
}  // namespace

Rule1D gauss_legendre(int k) {
  if (k < 1 || k > 512) throw std::invalid_argument("gauss_legendre: node count out of range");
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, golub_welsch(k)).first;
  return it->second;
}

Rule1D gauss_legendre(int k, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: empty interval");
  Rule1D r = gauss_legendre(k);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    r.x[i] = mid + half * r.x[i];
    r.w[i] *= half;
  }
  return r;
}

double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    case 4: return 2.0 * kPi * kPi;
    default: throw std::invalid_argument("sphere_area: dimension out of range");
  }
}

SphereRule sphere_rule(int n, int order) {
  if (order < 1) throw std::invalid_argument("sphere_rule: order must be positive");
  SphereRule s;
  if (n == 1) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd o(1);
      o << sign;
      s.omega.push_back(o);
      s.w.push_back(1.0);
    }
  } else if (n == 2) {
    const int N = std::max(4, 2 * order);
    for (int j = 0; j < N; ++j) {
      const double th = 2.0 * kPi * (j + 0.5) / N;
      Eigen::VectorXd o(2);
      o << std::cos(th), std::sin(th);
      s.omega.push_back(o);
      s.w.push_back(2.0 * kPi / N);
    }
  } else if (n == 3) {
    const Rule1D gl = gauss_legendre(std::max(2, order));
    const int M = std::max(4, 2 * order);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double c = gl.x[i], rho = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < M; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / M;
        Eigen::VectorXd o(3);
        o << rho * std::cos(ph), rho * std::sin(ph), c;
        s.omega.push_back(o);
        s.w.push_back(gl.w[i] * 2.0 * kPi / M);
      }
    }
  } else if (n == 4) {
    // fixed product rule: psi with sin^2 weight x a fixed S^2 rule
    const Rule1D psi = gauss_legendre(16, 0.0, kPi);
    const SphereRule s2 = sphere_rule(3, 8);
    for (std::size_t i = 0; i < psi.x.size(); ++i) {
      const double p = psi.x[i], sp = std::sin(p), wp = psi.w[i] * sp * sp;
      for (std::size_t j = 0; j < s2.omega.size(); ++j) {
        Eigen::VectorXd o(4);
        o << std::cos(p), sp * s2.omega[j](0), sp * s2.omega[j](1), sp * s2.omega[j](2);
        s.omega.push_back(o);
        s.w.push_back(wp * s2.w[j]);
      }
    }
  } else {
    throw std::invalid_argument("sphere_rule: dimension out of range");
  }
  return s;
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a < b)) throw std::invalid_argument("integrate_1d: empty interval");
  if (!(tol > 0)) throw std::invalid_argument("integrate_1d: tolerance must be positive");
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

}  // namespace kintran
