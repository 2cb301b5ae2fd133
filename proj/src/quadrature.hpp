#pragma once

#include <functional>
#include <vector>

namespace mtlab {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  int panel_order = 16;
  int max_refine = 40;
  double t_max = 80.0;

  void validate() const;
};

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; safe to call from several threads.
const GaussRule& gauss_legendre(int order);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

// Global adaptive composite Gauss quadrature over [breaks.front(), breaks.back()],
// starting from the panels delimited by `breaks`. The panel with the largest
// error estimate is bisected until the summed estimate drops below
// rel_tol * |value| + abs_floor. Throws AccuracyError if refinement stalls at
// max_refine depth.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    const std::vector<double>& breaks, const QuadratureSpec& spec,
                                    double abs_floor = 0.0);

}  // namespace mtlab
