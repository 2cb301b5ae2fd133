#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "sequence.hpp"

namespace mtlab {

std::string SeedSpec::label() const {
  if (kind == Kind::kZeroNoise) return "zero";
  std::ostringstream out;
  out << "bubble:" << eps;
  return out.str();
}

SeedSpec SeedSpec::parse(const std::string& text) {
  if (text == "zero") return zero_noise();
  const std::string prefix = "bubble:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = text.substr(prefix.size());
      const double eps = std::stod(rest, &used);
      if (used == rest.size() && eps > 0.0 && eps < 1.0) return bubble(eps);
    } catch (const std::exception&) {
    }
  }
  fail(ErrorCode::kInvalidArgument, "seed must be 'zero' or 'bubble:<eps>', got '" + text + "'");
}

void OptimizerConfig::validate() const {
  require(knot_count >= 16, ErrorCode::kInvalidArgument, "knot_count must be >= 16");
  require(t_max > 0.0, ErrorCode::kInvalidArgument, "t_max must be > 0");
  require(step0 > 0.0, ErrorCode::kInvalidArgument, "step0 must be > 0");
  require(grad_tol > 0.0, ErrorCode::kInvalidArgument, "grad_tol must be > 0");
  require(max_iter >= 1, ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  require(panel_order >= 2, ErrorCode::kInvalidArgument, "panel_order must be >= 2");
  require(!seeds.empty(), ErrorCode::kInvalidArgument, "seeds must not be empty");
  require(!thetas.empty(), ErrorCode::kInvalidArgument, "thetas must not be empty");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    require(thetas[i] > 0.0 && thetas[i] <= 1.0, ErrorCode::kInvalidArgument, "thetas must lie in (0, 1]");
    if (i > 0) require(thetas[i] > thetas[i - 1], ErrorCode::kInvalidArgument, "thetas must be ascending");
  }
}

namespace {

// Neumaier summation; J is a sum of thousands of positive terms and the line
// search compares values that differ in the last few digits.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    carry_ += std::fabs(sum_) >= std::fabs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double unit_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

}  // namespace

DiscreteObjective::DiscreteObjective(std::vector<double> knots, const ProblemParams& params, int order)
    : knots_(std::move(knots)), params_(params) {
  params_.validate();
  require(knots_.size() >= 2 && knots_.front() == 0.0, ErrorCode::kInvalidArgument, "objective needs knots from t = 0");
  const GaussRule& rule = gauss_legendre(order);
  const double mu = ball_measure(params_.n);
  nodes_.reserve((knots_.size() - 1) * rule.nodes.size());
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    require(h > 0.0, ErrorCode::kInvalidArgument, "knots must be strictly increasing");
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double local = 0.5 * (1.0 + rule.nodes[q]);
      const double t = knots_[i] + local * h;
      nodes_.push_back({i, local, mu * 0.5 * h * rule.weights[q] * std::exp(-t)});
    }
  }
  tail_weight_ = mu * std::exp(-knots_.back());
  energy_prefactor_ = sphere_measure(params_.n) * std::pow(static_cast<double>(params_.n), params_.n - 1);
}

double DiscreteObjective::energy(const std::vector<double>& v) const {
  const int n = params_.n;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    sum += std::pow(std::fabs(v[i + 1] - v[i]) / h, n) * h;
  }
  return energy_prefactor_ * sum;
}

double DiscreteObjective::value(const std::vector<double>& v) const {
  require(v.size() == knots_.size(), ErrorCode::kInvalidArgument, "value vector length differs from knot count");
  const double e = energy(v);
  require(e > 0.0 && std::isfinite(e), ErrorCode::kDegenerate, "objective needs a profile with positive energy");
  const double s = std::pow(e, -1.0 / params_.n);
  Accumulator acc;
  for (const Node& node : nodes_) {
    const double w = (1.0 - node.local) * v[node.segment] + node.local * v[node.segment + 1];
    acc.add(node.weight * f_eval(params_, s * w));
  }
  acc.add(tail_weight_ * f_eval(params_, s * v.back()));
  return acc.value();
}

double DiscreteObjective::value_and_gradient(const std::vector<double>& v, std::vector<double>& grad) const {
  require(v.size() == knots_.size(), ErrorCode::kInvalidArgument, "value vector length differs from knot count");
  const int n = params_.n;
  const double e = energy(v);
  require(e > 0.0 && std::isfinite(e), ErrorCode::kDegenerate, "objective needs a profile with positive energy");
  const double s = std::pow(e, -1.0 / n);
  const std::size_t size = v.size();
  grad.assign(size, 0.0);
  Accumulator acc;
  double d = 0.0;  // sum of weight * F'(u) * v(x)
  for (const Node& node : nodes_) {
    const double w = (1.0 - node.local) * v[node.segment] + node.local * v[node.segment + 1];
    const FValue f = f_eval_with_derivative(params_, s * w);
    acc.add(node.weight * f.value);
    const double c = node.weight * f.derivative;
    grad[node.segment] += c * (1.0 - node.local);
    grad[node.segment + 1] += c * node.local;
    d += c * w;
  }
  {
    const FValue f = f_eval_with_derivative(params_, s * v.back());
    acc.add(tail_weight_ * f.value);
    const double c = tail_weight_ * f.derivative;
    grad.back() += c;
    d += c * v.back();
  }
  // Chain rule through s = E^{-1/n}: ds/dv_j = -(s / (n E)) dE/dv_j.
  for (double& g : grad) g *= s;
  const double coupling = s * d / (n * e);
  for (std::size_t i = 0; i + 1 < size; ++i) {
    const double h = knots_[i + 1] - knots_[i];
    const double delta = v[i + 1] - v[i];
    const double slope = delta / h;
    // d/d(delta) of |delta|^n / h^{n-1}; zero slope contributes zero.
    const double de = energy_prefactor_ * n * std::pow(std::fabs(slope), n - 1) * (slope > 0 ? 1.0 : slope < 0 ? -1.0 : 0.0);
    grad[i + 1] -= coupling * de;
    grad[i] += coupling * de;
  }
  grad[0] = 0.0;
  return acc.value();
}

ObjectiveGradient objective_and_gradient(const RadialProfile& raw, const ProblemParams& params,
                                         const QuadratureSpec& quad) {
  quad.validate();
  DiscreteObjective objective(std::vector<double>(raw.knots().begin(), raw.knots().end()), params, quad.panel_order);
  ObjectiveGradient out;
  out.value = objective.value_and_gradient(std::vector<double>(raw.values().begin(), raw.values().end()), out.gradient);
  return out;
}

namespace {

// Solves M d = g for the p-Laplacian-weighted stiffness matrix on the knot
// chain with v_0 pinned (Dirichlet) and a free last node. This is the
// gradient in the energy metric, which removes the 1/h^2 stiffness of the
// Euclidean gradient.
std::vector<double> energy_metric_direction(const std::vector<double>& knots, const std::vector<double>& v,
                                            const std::vector<double>& g, int n) {
  const std::size_t size = v.size();
  std::vector<double> weight(size - 1);
  double mean_slope = 0.0;
  for (std::size_t i = 0; i + 1 < size; ++i) mean_slope += std::fabs(v[i + 1] - v[i]);
  mean_slope /= (knots.back() - knots.front());
  for (std::size_t i = 0; i + 1 < size; ++i) {
    const double h = knots[i + 1] - knots[i];
    const double slope = std::fabs(v[i + 1] - v[i]) / h;
    weight[i] = (n == 2 ? 1.0 : std::pow(slope + 0.05 * mean_slope + 1e-300, n - 2)) / h;
  }
  // Unknowns 1..size-1; row j couples to j-1 via weight[j-1] and to j+1 via weight[j].
  const std::size_t m = size - 1;
  std::vector<double> diag(m), upper(m, 0.0), rhs(m);
  for (std::size_t j = 1; j < size; ++j) {
    diag[j - 1] = weight[j - 1] + (j + 1 < size ? weight[j] : 0.0);
    if (j + 1 < size) upper[j - 1] = -weight[j];
    rhs[j - 1] = g[j];
  }
  // Thomas algorithm; the matrix is symmetric positive definite.
  for (std::size_t k = 1; k < m; ++k) {
    const double factor = upper[k - 1] / diag[k - 1];
    diag[k] -= factor * upper[k - 1];
    rhs[k] -= factor * rhs[k - 1];
  }
  std::vector<double> d(size, 0.0);
  d[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) d[k + 1] = (rhs[k] - upper[k] * d[k + 2]) / diag[k];
  return d;
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::vector<double> normalized(const DiscreteObjective& objective, std::vector<double> v) {
  const double e = objective.energy(v);
  require(e > 0.0 && std::isfinite(e), ErrorCode::kDegenerate, "zero-energy iterate");
  double scale = std::pow(e, -1.0 / objective.params().n);
  for (double& x : v) x *= scale;
  const double again = objective.energy(v);
  if (again != 1.0) {
    scale = std::pow(again, -1.0 / objective.params().n);
    for (double& x : v) x *= scale;
  }
  return v;
}

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kResolutionUlps = 64.0;

}  // namespace

OptResult ascend(const RadialProfile& start, const ProblemParams& params, const OptimizerConfig& config,
                 const std::string& seed_label) {
  config.validate();
  DiscreteObjective objective(std::vector<double>(start.knots().begin(), start.knots().end()), params,
                              config.panel_order);
  std::vector<double> v = normalized(objective, std::vector<double>(start.values().begin(), start.values().end()));
  std::vector<double> grad;
  double value = objective.value_and_gradient(v, grad);
  double step = config.step0;
  OptResult result;
  result.seed = seed_label;
  result.history.push_back(value);
  int iter = 0;
  double gnorm = norm(grad);
  std::vector<double> trial(v.size());
  std::vector<double> trial_grad;
  for (; iter < config.max_iter && gnorm >= config.grad_tol; ++iter) {
    const std::vector<double> dir = energy_metric_direction(objective.knots(), v, grad, params.n);
    double slope = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) slope += grad[i] * dir[i];
    if (!(slope > 0.0)) break;
    const double resolution = kResolutionUlps * std::numeric_limits<double>::epsilon() * std::fabs(value);

    bool accepted = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] + step * dir[i];
      double trial_value = -std::numeric_limits<double>::infinity();
      double trial_slope = -std::numeric_limits<double>::infinity();
      try {
        // J is scale free, so normalizing the trial point leaves J(v + step d) unchanged.
        const double e = objective.energy(trial);
        trial_value = objective.value_and_gradient(trial, trial_grad);
        trial_slope = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) trial_slope += trial_grad[i] * dir[i];
        const double scale = std::pow(e, -1.0 / params.n);
        trial = normalized(objective, trial);
        // Gradient of a 0-homogeneous function scales by 1/scale.
        for (double& g : trial_grad) g /= scale;
      } catch (const Error&) {
        // Overflowing or degenerate trial point: shrink the step.
        trial_value = -std::numeric_limits<double>::infinity();
      }
      const double predicted = step * slope;
      const bool armijo = trial_value >= value + kArmijo * predicted;
      // Below the resolution of J the value test is noise; accept when the
      // directional derivative is still nonnegative at the far end, so J
      // increases along the whole step.
      const bool certified = predicted <= resolution && trial_value >= value - resolution && trial_slope >= 0.0;
      if (std::isfinite(trial_value) && (armijo || certified)) {
        accepted = true;
        v.swap(trial);
        value = trial_value;
        result.history.push_back(value);
        grad.swap(trial_grad);
        // Secant estimate of the line maximizer for the next step.
        const double next = slope > trial_slope ? step * slope / (slope - trial_slope) : 4.0 * step;
        step = std::clamp(next, 0.25 * step, 4.0 * step);
        break;
      }
      if (std::isfinite(trial_slope) && trial_slope < 0.0 && slope > trial_slope) {
        step = std::clamp(step * slope / (slope - trial_slope), 0.1 * step, 0.5 * step);
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;
    gnorm = norm(grad);
  }
  result.profile = RadialProfile(objective.knots(), v);
  result.value = value;
  result.grad_norm = gnorm;
  result.iterations = iter;
  result.peak = result.profile.peak();
  result.conc_fraction = dirichlet_energy_beyond(result.profile, params.n, to_moser(params.n, config.delta_conc)) /
                         dirichlet_energy(result.profile, params.n);
  result.converged = gnorm < config.grad_tol;
  return result;
}

RadialProfile make_seed(const SeedSpec& seed, const OptimizerConfig& config, const ProblemParams& params) {
  if (seed.kind == SeedSpec::Kind::kBubble) {
    const SequenceParams sp = build_params(seed.eps, params.n, params.m);
    return sequence_profile(sp, sequence_knots(sp, config.knot_count, config.t_max));
  }
  std::mt19937_64 engine(config.rng_seed);
  std::vector<double> knots(config.knot_count);
  std::vector<double> values(config.knot_count, 0.0);
  for (int i = 0; i < config.knot_count; ++i) knots[i] = config.t_max * i / (config.knot_count - 1);
  for (int i = 1; i < config.knot_count; ++i) values[i] = config.noise_amplitude * unit_uniform(engine);
  return RadialProfile(std::move(knots), std::move(values));
}

namespace {

bool better(const OptResult& a, const OptResult& b) {
  if (std::fabs(a.value - b.value) <= 1e-12) return a.iterations < b.iterations;
  return a.value > b.value;
}

struct Attempt {
  std::optional<OptResult> result;
  std::string diagnostic;
};

}  // namespace

OptResult maximize(const OptimizerConfig& config, const ProblemParams& params,
                   const std::vector<RadialProfile>& extra_starts) {
  config.validate();
  params.validate();
  const std::size_t seeds = config.seeds.size();
  const std::size_t total = seeds + extra_starts.size();
  require(total > 0, ErrorCode::kInvalidArgument, "maximize needs at least one seed");
  const auto attempts = parallel_map(total, config.workers, [&](std::size_t i) {
    const std::string label = i < seeds ? config.seeds[i].label() : "warm:" + std::to_string(i - seeds);
    Attempt out;
    try {
      const RadialProfile start = i < seeds ? make_seed(config.seeds[i], config, params) : extra_starts[i - seeds];
      out.result = ascend(start, params, config, label);
    } catch (const Error& e) {
      out.diagnostic = label + ": " + e.what();
    }
    return out;
  });
  std::optional<OptResult> best;
  std::string diagnostics;
  for (const auto& a : attempts) {
    if (!a.result) {
      diagnostics += (diagnostics.empty() ? "" : "; ") + a.diagnostic;
      continue;
    }
    if (!best || better(*a.result, *best)) best = a.result;
  }
  if (!best) fail(ErrorCode::kOptimization, "all seeds failed: " + diagnostics);
  return *best;
}

ContinuationResult continuation(const OptimizerConfig& config, const ProblemParams& params) {
  config.validate();
  ContinuationResult out;
  for (std::size_t k = 0; k < config.thetas.size(); ++k) {
    const double theta = config.thetas[k];
    try {
      const ProblemParams stage = params.with_theta(theta);
      OptResult r = k == 0 ? maximize(config, stage)
                           : ascend(out.stages.back().result.profile, stage, config, "warm");
      out.stages.push_back({theta, std::move(r)});
    } catch (const Error& e) {
      out.failure = "theta " + std::to_string(theta) + ": " + e.what();
      break;
    }
  }
  return out;
}

LambdaScan lambda_scan(const std::vector<double>& lambdas, const OptimizerConfig& config, int n, int m,
                       double margin) {
  require(!lambdas.empty(), ErrorCode::kInvalidArgument, "lambda grid must not be empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] >= 0.0, ErrorCode::kInvalidArgument, "lambdas must be nonnegative");
    if (i > 0) require(lambdas[i] > lambdas[i - 1], ErrorCode::kInvalidArgument, "lambdas must be ascending");
  }
  LambdaScan scan;
  scan.threshold = threshold(n, 0.0, ball_measure(n));
  scan.rows.resize(lambdas.size());
  // Sweep from the largest lambda down, warm-starting each point from the
  // previous optimum: F only grows as lambda decreases, so the warm start
  // alone makes the reported values nonincreasing in lambda.
  std::vector<RadialProfile> warm;
  for (std::size_t k = lambdas.size(); k-- > 0;) {
    const ProblemParams params = ProblemParams::make(n, m, lambdas[k]);
    const OptResult r = maximize(config, params, warm);
    scan.rows[k] = {lambdas[k], r.value, r.value - scan.threshold, r.peak, r.conc_fraction, r.converged};
    warm.assign(1, r.profile);
  }
  for (const auto& row : scan.rows) {
    if (row.value > scan.threshold + margin) scan.crossing = row.lambda;
  }
  return scan;
}

}  // namespace mtlab
