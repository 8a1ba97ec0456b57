#pragma once

#include <functional>
#include <vector>

namespace nullag {

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  bool converged = true;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7/K15) on [a, b].
QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-10, double rel_tol = 1e-10,
                              int max_depth = 60);

// Axis-aligned box in R^d.
struct Box {
  std::vector<double> lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
};

// Adaptive tensor-Gauss integration over a box: embedded 3- vs 5-point rule
// per axis, bisecting the longest axis until the local error estimate is
// within tolerance.
QuadratureResult integrate_box(const std::function<double(const std::vector<double>&)>& f,
                               const Box& box, double abs_tol = 1e-9, double rel_tol = 1e-8,
                               int max_subdivisions = 200000);

}  // namespace nullag
