#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "error.hpp"

namespace mtlab {

void QuadratureSpec::validate() const {
  require(rel_tol > 0.0, ErrorCode::kInvalidArgument, "quadrature rel_tol must be > 0");
  require(panel_order >= 2, ErrorCode::kInvalidArgument, "quadrature panel_order must be >= 2");
  require(max_refine >= 1, ErrorCode::kInvalidArgument, "quadrature max_refine must be >= 1");
  require(t_max > 0.0, ErrorCode::kInvalidArgument, "quadrature t_max must be > 0");
}

namespace {

GaussRule build_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double apply_rule(const GaussRule& rule, const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

Panel make_panel(const GaussRule& rule, const std::function<double(double)>& f, double a, double b, int depth) {
  const double mid = 0.5 * (a + b);
  const double coarse = apply_rule(rule, f, a, b);
  const double fine = apply_rule(rule, f, a, mid) + apply_rule(rule, f, mid, b);
  return Panel{a, b, fine, std::fabs(fine - coarse), depth};
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    const std::vector<double>& breaks, const QuadratureSpec& spec,
                                    double abs_floor) {
  spec.validate();
  require(breaks.size() >= 2, ErrorCode::kInvalidArgument, "quadrature needs at least one panel");
  const GaussRule& rule = gauss_legendre(spec.panel_order);

  std::priority_queue<Panel> queue;
  std::vector<Panel> settled;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) queue.push(make_panel(rule, f, breaks[i], breaks[i + 1], 0));
  }

  auto totals = [&](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    // Sum in a fixed order so results do not depend on heap layout.
    std::vector<Panel> all = settled;
    auto copy = queue;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : all) {
      value += p.value;
      error += p.error;
    }
    return all.size();
  };

  double value = 0.0;
  double error = 0.0;
  for (const auto& p : settled) value += p.value;
  {
    auto copy = queue;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
  }

  while (!queue.empty() && error > spec.rel_tol * std::fabs(value) + abs_floor) {
    Panel worst = queue.top();
    queue.pop();
    if (worst.depth >= spec.max_refine) {
      settled.push_back(worst);
      // Nothing left that may still be refined.
      if (queue.empty()) break;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = make_panel(rule, f, worst.a, mid, worst.depth + 1);
    Panel right = make_panel(rule, f, mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  QuadratureResult result;
  result.panels = static_cast<int>(totals(result.value, result.error_estimate));
  if (!std::isfinite(result.value)) {
    throw AccuracyError(result.value, result.error_estimate, "quadrature produced a non-finite value");
  }
  if (result.error_estimate > spec.rel_tol * std::fabs(result.value) + abs_floor) {
    throw AccuracyError(result.value, result.error_estimate,
                        "adaptive quadrature did not reach rel_tol " + std::to_string(spec.rel_tol) +
                            " (estimate " + std::to_string(result.value) + ", error " +
                            std::to_string(result.error_estimate) + ")");
  }
  return result;
}

}  // namespace mtlab
