#pragma once

#include <vector>

#include "core.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace mtlab {

// Smallest eps accepted by build_params.
inline constexpr double kMinSequenceEps = 1e-6;

/// One member of the concentrating test family on the unit ball:
///   u = C - [(n-1) log(1 + c_n |x/eps|^{n/(n-1)}) + Lambda] / (alpha_n C^{1/(n-1)})   for |x| <= L eps
///   u = -log r^n / (alpha_n C^{1/(n-1)})                                             for |x| >  L eps
/// with L = (-log eps)^{m+1}, C fixed by unit energy and Lambda by continuity at |x| = L eps.
struct SequenceParams {
  double eps = 0.0;
  double L = 0.0;
  double C = 0.0;
  double Lambda = 0.0;
  double t0 = 0.0;  // Green level of the matching sphere, -(1/alpha_n) log (L eps)^n
  int n = 2;
  int m = 1;

  // Diagnostics filled by build_params.
  double C_asymptotic = 0.0;
  double lambda_defect = 0.0;  // Lambda + (n-1) H_{n-1}

  double matching_radius() const { return L * eps; }
  // Moser coordinates of the matching sphere and of |x| = eps.
  double tau_match() const;
  double tau_eps() const;
  double peak() const;
};

// Leading-order C from the unit-energy relation with the O(L^{-n/(n-1)}) term dropped.
double asymptotic_C(double eps, int n, double s_p = 0.0);

// int_0^X u^{n-1} / (1+u)^n du by binomial expansion.
double inner_energy_integral(int n, double X);

SequenceParams build_params(double eps, int n, int m);

double energy_closed_form(const SequenceParams& params);
// Left side of the continuity condition minus the right side.
double continuity_residual(const SequenceParams& params);

double u_eps_inner(const SequenceParams& params, double r);
double u_eps_outer(const SequenceParams& params, double r);
double u_eps_value(const SequenceParams& params, double r);
// Same function in the Moser coordinate tau = -n log r.
double u_eps_moser(const SequenceParams& params, double tau);

// int_{B_1} F(u_eps) dx by adaptive quadrature with breaks at |x| = L eps and |x| = eps.
double sequence_functional(const SequenceParams& params, const ProblemParams& problem, const QuadratureSpec& quad);

// (omega_{n-1}/n) alpha_n^{-(m+1)/(n-1)} Gamma(n(m+1)/(n-1) + 1) / (m+1)!, the value of
// int_{B_1} |alpha_n G^{n/(n-1)}|^{m+1} / (m+1)! dx for the centered Green function.
double leading_coefficient(int n, int m);

struct ExcessRow {
  double eps;
  double L;
  double C;
  double Lambda;
  double value;
  double excess;
  double scaled_excess;
};

std::vector<ExcessRow> excess_report(const std::vector<double>& eps_list, int n, int m, const QuadratureSpec& quad,
                                     double lambda = 1.0, int workers = 1);

// Knot grid for sampling u_eps: uniform across the linear outer part and
// refined around the bubble core at tau_eps.
std::vector<double> sequence_knots(const SequenceParams& params, int count, double t_max);
RadialProfile sequence_profile(const SequenceParams& params, const std::vector<double>& knots);

}  // namespace mtlab
