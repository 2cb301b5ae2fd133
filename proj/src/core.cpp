#include "core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace mtlab {

namespace {

void check_dimension(int n) {
  require(n >= 2, ErrorCode::kDomain, "dimension n must be >= 2, got " + std::to_string(n));
}

// Neumaier-compensated accumulation for the positive tail series.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double sphere_measure(int n) {
  check_dimension(n);
  // omega_{n-1} = 2 pi^{n/2} / Gamma(n/2), with Gamma(n/2) expanded exactly:
  // even n = 2k gives (k-1)!, odd n = 2k+1 gives (2k-1)!! sqrt(pi) / 2^k.
  const double pi = std::numbers::pi;
  if (n % 2 == 0) {
    const int k = n / 2;
    double fact = 1.0;
    for (int j = 2; j < k; ++j) fact *= j;
    return 2.0 * std::pow(pi, k) / fact;
  }
  const int k = (n - 1) / 2;
  double double_fact = 1.0;
  for (int j = 2 * k - 1; j > 1; j -= 2) double_fact *= j;
  return std::pow(2.0, k + 1) * std::pow(pi, k) / double_fact;
}

double alpha_n(int n) {
  check_dimension(n);
  return n * std::pow(sphere_measure(n), 1.0 / (n - 1));
}

double c_n(int n) {
  check_dimension(n);
  return std::pow(sphere_measure(n) / n, 1.0 / (n - 1));
}

double ball_measure(int n) { return sphere_measure(n) / n; }

Rational harmonic(int k) {
  require(k >= 0, ErrorCode::kDomain, "harmonic number of negative index");
  Rational h = 0;
  for (int j = 1; j <= k; ++j) h += Rational(1, j);
  return h;
}

ProblemParams ProblemParams::make(int n, int m, double lambda, std::optional<double> beta) {
  check_dimension(n);
  ProblemParams p;
  p.n = n;
  p.m = m;
  p.lambda = lambda;
  p.beta = beta.value_or(alpha_n(n));
  p.validate();
  return p;
}

ProblemParams ProblemParams::with_theta(double theta) const {
  require(theta > 0.0 && theta <= 1.0, ErrorCode::kInvalidArgument, "theta must lie in (0, 1]");
  ProblemParams p = *this;
  p.beta = theta == 1.0 ? critical() : theta * critical();
  return p;
}

void ProblemParams::validate() const {
  check_dimension(n);
  require(m >= 1, ErrorCode::kInvalidArgument, "truncation order m must be >= 1");
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be >= 0");
  require(std::isfinite(beta) && beta > 0.0 && beta <= critical(), ErrorCode::kInvalidArgument,
          "beta must lie in (0, alpha_n]");
}

double exp_arg(const ProblemParams& params, double t) {
  return params.beta * std::pow(std::fabs(t), params.power());
}

double poly_arg(const ProblemParams& params, double t) {
  return params.critical() * std::pow(std::fabs(t), params.power());
}

double exp_partial(double x, int lo, int hi) {
  if (hi < lo) return 0.0;
  // Horner over 1 + x/(lo+1)(1 + x/(lo+2)(...)), then scaled by x^lo/lo!.
  double acc = 1.0;
  for (int k = hi; k > lo; --k) acc = 1.0 + acc * x / k;
  double lead = 1.0;
  for (int k = 1; k <= lo; ++k) lead *= x / k;
  return lead * acc;
}

double exp_tail(double x, int m) {
  require(x >= 0.0 && m >= 0, ErrorCode::kDomain, "exp_tail needs x >= 0 and m >= 0");
  if (x == 0.0) return 0.0;
  // Subtraction is safe once the partial sum is a minor share of e^x; that
  // holds for m < x, and x >= 30 keeps the series branch short elsewhere.
  if (x >= kTailSeriesCrossover && m < x) return std::exp(x) - exp_partial(x, 0, m);
  // Below the crossover, still subtract when at most two digits cancel.
  if (x >= 1.0) {
    const double e = std::exp(x);
    const double diff = e - exp_partial(x, 0, m);
    if (diff >= 1e-2 * e) return diff;
  }
  double term = 1.0;
  for (int k = 1; k <= m + 1; ++k) term *= x / k;
  CompensatedSum sum;
  for (int k = m + 2;; ++k) {
    sum.add(term);
    term *= x / k;
    if (term <= 1e-18 * sum.sum) break;
  }
  return sum.value();
}

namespace {

void guard(double y) {
  if (!(y <= kExpOverflowGuard)) {
    throw OverflowError(y, "exponent " + std::to_string(y) + " exceeds the overflow guard");
  }
}

}  // namespace

double f_eval_minus_one(const ProblemParams& params, double t) {
  const double y = exp_arg(params, t);
  guard(y);
  const double lambda = params.lambda;
  if (params.is_critical()) {
    // F - 1 = (1 - lambda)(e^x - 1) + lambda * sum_{k>m} x^k/k!
    return (1.0 - lambda) * std::expm1(y) + lambda * exp_tail(y, params.m);
  }
  const double x = poly_arg(params, t);
  return std::expm1(y) - lambda * exp_partial(x, 1, params.m);
}

double f_eval(const ProblemParams& params, double t) {
  const double y = exp_arg(params, t);
  guard(y);
  const double lambda = params.lambda;
  if (params.is_critical()) return (1.0 - lambda) * std::exp(y) + lambda * (1.0 + exp_tail(y, params.m));
  const double x = poly_arg(params, t);
  return std::exp(y) - lambda * exp_partial(x, 1, params.m);
}

double f_derivative(const ProblemParams& params, double t) {
  if (t == 0.0) return 0.0;
  const double y = exp_arg(params, t);
  guard(y);
  const double p = params.power();
  const double at = std::fabs(t);
  const double chain = p * std::pow(at, p - 1.0) * (t > 0 ? 1.0 : -1.0);
  const double alpha = params.critical();
  if (params.is_critical()) {
    return chain * alpha *
           ((1.0 - params.lambda) * std::exp(y) + params.lambda * exp_tail(y, params.m - 1));
  }
  const double x = poly_arg(params, t);
  return chain * (params.beta * std::exp(y) - params.lambda * alpha * exp_partial(x, 0, params.m - 1));
}

FValue f_eval_with_derivative(const ProblemParams& params, double t) {
  const double y = exp_arg(params, t);
  guard(y);
  const double lambda = params.lambda;
  const double p = params.power();
  const double at = std::fabs(t);
  const double chain = at == 0.0 ? 0.0 : p * std::pow(at, p - 1.0) * (t > 0 ? 1.0 : -1.0);
  const double alpha = params.critical();
  if (params.is_critical()) {
    const double e = std::exp(y);
    const double tail = exp_tail(y, params.m);
    // sum_{k >= m} x^k/k! = tail + x^m/m!
    const double tail_prev = tail + exp_partial(y, params.m, params.m);
    return {(1.0 - lambda) * e + lambda * (1.0 + tail), chain * alpha * ((1.0 - lambda) * e + lambda * tail_prev)};
  }
  const double x = poly_arg(params, t);
  const double e = std::exp(y);
  return {e - lambda * exp_partial(x, 1, params.m),
          chain * (params.beta * e - lambda * alpha * exp_partial(x, 0, params.m - 1))};
}

std::pair<Rational, Rational> verify_identity_harmonic(int n) {
  check_dimension(n);
  Rational lhs = 0;
  for (int k = 0; k <= n - 2; ++k) {
    const Rational::Integer sign = ((n - 1 - k) % 2 == 0) ? 1 : -1;
    lhs -= Rational(sign * binomial(n - 1, k), n - k - 1);
  }
  return {lhs, harmonic(n - 1)};
}

std::pair<Rational, Rational> verify_identity_beta(int m) {
  require(m >= 0, ErrorCode::kDomain, "identity order m must be >= 0");
  Rational lhs = 0;
  for (int k = 0; k <= m; ++k) {
    const Rational::Integer sign = ((m - k) % 2 == 0) ? 1 : -1;
    lhs += Rational(sign * binomial(m, k), m - k + 1);
  }
  return {lhs, Rational(1, m + 1)};
}

ThresholdParts threshold_parts(int n, double s_p, double mu) {
  check_dimension(n);
  require(std::isfinite(mu) && mu >= 0.0, ErrorCode::kInvalidArgument, "domain measure mu must be >= 0");
  ThresholdParts parts{};
  parts.mu = mu;
  parts.ball_factor = ball_measure(n);
  parts.harmonic = harmonic(n - 1).to_double();
  parts.exp_factor = std::exp(alpha_n(n) * s_p + parts.harmonic);
  parts.value = mu + parts.ball_factor * parts.exp_factor;
  return parts;
}

double threshold(int n, double s_p, double mu) { return threshold_parts(n, s_p, mu).value; }

}  // namespace mtlab
