#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace kintran {

struct Rule1D {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights; Golub-Welsch on the Jacobi matrix with a
// fixed symmetric eigensolver, so node order and values are deterministic.
Rule1D gauss_legendre(int k);
Rule1D gauss_legendre(int k, double a, double b);

// Quadrature points on the unit sphere S^{n-1}; weights sum to its area.
// n = 1: the two signs.  n = 2: midpoint rule in angle (spectrally accurate).
// n = 3: Gauss in cos(theta) x uniform azimuth.  n = 4: a fixed symmetric
// product rule (not refinable by `order`).
struct SphereRule {
  std::vector<Eigen::VectorXd> omega;
  std::vector<double> w;
};
SphereRule sphere_rule(int n, int order);

double sphere_area(int n);

// Adaptive Simpson.
double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol);

// Shared request for velocity-space and leaf quadrature.
struct QuadratureSpec {
  double v_radius = 8.0;  // |v| truncation radius
  int radial = 24;        // radial nodes per integral
  int angular = 24;       // sphere order parameter
  double rel_tol = 1e-9;  // accuracy target for adaptive refinement paths
};

}  // namespace kintran
