#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace mtlab {

// Initial profile for one ascent run.
struct SeedSpec {
  enum class Kind { kZeroNoise, kBubble };
  Kind kind = Kind::kZeroNoise;
  double eps = 0.0;  // bubble only

  static SeedSpec zero_noise() { return {Kind::kZeroNoise, 0.0}; }
  static SeedSpec bubble(double eps) { return {Kind::kBubble, eps}; }
  std::string label() const;
  // "zero" or "bubble:<eps>".
  static SeedSpec parse(const std::string& text);
};

struct OptimizerConfig {
  int knot_count = 400;
  double t_max = 60.0;
  double step0 = 1.0;
  double grad_tol = 1e-7;
  int max_iter = 5000;
  std::vector<SeedSpec> seeds{SeedSpec::zero_noise(), SeedSpec::bubble(1e-2), SeedSpec::bubble(1e-3)};
  std::vector<double> thetas{0.7, 0.9, 0.97, 0.995, 1.0};
  std::uint64_t rng_seed = 12345;
  int panel_order = 8;
  double noise_amplitude = 1e-3;
  double delta_conc = kDefaultConcentrationRadius;
  int workers = 1;

  void validate() const;
};

struct OptResult {
  RadialProfile profile;  // unit energy
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  double peak = 0.0;
  double conc_fraction = 0.0;
  bool converged = false;
  std::string seed;
  // J at the start and after every accepted step.
  std::vector<double> history;
};

/// Scale-free objective J(v) = int_{B_1} F(v / E(v)^{1/n}) dx on a fixed knot
/// grid, integrated by a fixed composite Gauss rule (order nodes per segment)
/// plus the analytic constant tail beyond the last knot. The value at knot 0
/// is pinned to zero; its gradient entry is always zero.
class DiscreteObjective {
 public:
  DiscreteObjective(std::vector<double> knots, const ProblemParams& params, int order);

  const std::vector<double>& knots() const { return knots_; }
  const ProblemParams& params() const { return params_; }

  double value(const std::vector<double>& v) const;
  double value_and_gradient(const std::vector<double>& v, std::vector<double>& grad) const;
  double energy(const std::vector<double>& v) const;

 private:
  struct Node {
    std::size_t segment;
    double local;   // position within the segment, in [0, 1]
    double weight;  // (omega/n) * Gauss weight * e^{-t}
  };
  std::vector<double> knots_;
  ProblemParams params_;
  std::vector<Node> nodes_;
  double tail_weight_;
  double energy_prefactor_;
};

struct ObjectiveGradient {
  double value;
  std::vector<double> gradient;
};

ObjectiveGradient objective_and_gradient(const RadialProfile& raw, const ProblemParams& params,
                                         const QuadratureSpec& quad);

// Single ascent run from a given starting profile.
OptResult ascend(const RadialProfile& start, const ProblemParams& params, const OptimizerConfig& config,
                 const std::string& seed_label);

RadialProfile make_seed(const SeedSpec& seed, const OptimizerConfig& config, const ProblemParams& params);

// Best over config.seeds (plus any extra starting profiles).
OptResult maximize(const OptimizerConfig& config, const ProblemParams& params,
                   const std::vector<RadialProfile>& extra_starts = {});

struct ContinuationStage {
  double theta;
  OptResult result;
};
struct ContinuationResult {
  std::vector<ContinuationStage> stages;
  std::optional<std::string> failure;  // set when a stage failed; later stages skipped
};

ContinuationResult continuation(const OptimizerConfig& config, const ProblemParams& params);

struct LambdaRow {
  double lambda;
  double value;
  double excess;
  double peak;
  double conc_fraction;
  bool converged;
};
struct LambdaScan {
  std::vector<LambdaRow> rows;
  std::optional<double> crossing;  // largest lambda with value > threshold + margin
  double threshold;
};

LambdaScan lambda_scan(const std::vector<double>& lambdas, const OptimizerConfig& config, int n, int m,
                       double margin = 1e-6);

}  // namespace mtlab
