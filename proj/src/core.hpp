#pragma once

#include <optional>
#include <utility>

#include "rational.hpp"

namespace mtlab {

// Surface measure of the unit sphere S^{n-1} in R^n.
double sphere_measure(int n);
// Critical Moser-Trudinger exponent n * omega_{n-1}^{1/(n-1)}.
double alpha_n(int n);
// Bubble constant (omega_{n-1}/n)^{1/(n-1)}.
double c_n(int n);
// Lebesgue measure of the unit ball, omega_{n-1}/n.
double ball_measure(int n);

Rational harmonic(int k);

/// Dimension, truncation order and subtraction weight of F_{lambda,m}, plus
/// the exponent `beta` used in e^{beta |t|^{n/(n-1)}}. The subtracted
/// polynomial g_m always uses the critical exponent, so a subcritical beta
/// only weakens the exponential term.
struct ProblemParams {
  int n = 2;
  int m = 1;
  double lambda = 1.0;
  double beta = 0.0;

  // Validates and fills beta with alpha_n(n) when omitted.
  static ProblemParams make(int n, int m, double lambda, std::optional<double> beta = std::nullopt);
  // beta = theta * alpha_n(n), theta in (0, 1].
  ProblemParams with_theta(double theta) const;

  double critical() const { return alpha_n(n); }
  bool is_critical() const { return beta == critical(); }
  double power() const { return static_cast<double>(n) / (n - 1); }
  void validate() const;
};

inline constexpr double kExpOverflowGuard = 700.0;
inline constexpr double kTailSeriesCrossover = 30.0;

// beta |t|^{n/(n-1)}
double exp_arg(const ProblemParams& params, double t);
// alpha_n |t|^{n/(n-1)}, the argument of g_m.
double poly_arg(const ProblemParams& params, double t);

// sum_{k > m} x^k / k!, x >= 0.
double exp_tail(double x, int m);
// sum_{k = lo}^{hi} x^k / k! by Horner.
double exp_partial(double x, int lo, int hi);

double f_eval(const ProblemParams& params, double t);
// F - 1 without forming F, so tiny excesses over 1 survive.
double f_eval_minus_one(const ProblemParams& params, double t);
// dF/dt.
double f_derivative(const ProblemParams& params, double t);

struct FValue {
  double value;
  double derivative;
};
// F and dF/dt from a single tail evaluation; used by the optimizer's inner loop.
FValue f_eval_with_derivative(const ProblemParams& params, double t);

// (lhs, rhs) of  -sum_{k=0}^{n-2} C(n-1,k)(-1)^{n-1-k}/(n-k-1) = H_{n-1}.
std::pair<Rational, Rational> verify_identity_harmonic(int n);
// (lhs, rhs) of  sum_{k=0}^{m} (-1)^{m-k} C(m,k)/(m-k+1) = 1/(m+1).
std::pair<Rational, Rational> verify_identity_beta(int m);

// mu + (omega_{n-1}/n) e^{alpha_n S_p + H_{n-1}}
double threshold(int n, double s_p, double mu);

struct ThresholdParts {
  double value;
  double mu;
  double ball_factor;  // omega_{n-1}/n
  double harmonic;     // H_{n-1}
  double exp_factor;   // e^{alpha_n S_p + H_{n-1}}
};
ThresholdParts threshold_parts(int n, double s_p, double mu);

}  // namespace mtlab
