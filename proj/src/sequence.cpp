#include "sequence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "parallel.hpp"

namespace mtlab {

namespace {

double matching_X(int n, double L) { return c_n(n) * std::pow(L, static_cast<double>(n) / (n - 1)); }

// alpha_n C^{n/(n-1)} required for unit energy, given eps and L.
double energy_constant(int n, double eps, double L) {
  return -n * std::log(L * eps) + (n - 1) * inner_energy_integral(n, matching_X(n, L));
}

}  // namespace

double SequenceParams::tau_match() const { return -n * std::log(L * eps); }
double SequenceParams::tau_eps() const { return -n * std::log(eps); }

double SequenceParams::peak() const {
  return C - Lambda / (alpha_n(n) * std::pow(C, 1.0 / (n - 1)));
}

double asymptotic_C(double eps, int n, double s_p) {
  require(eps > 0.0 && eps < std::exp(-1.0), ErrorCode::kDomain, "asymptotic_C needs 0 < eps < 1/e");
  const double alpha = alpha_n(n);
  const double arg = -(n - 1) * harmonic(n - 1).to_double() + std::log(ball_measure(n)) - n * std::log(eps) +
                     alpha * s_p;
  require(arg > 0.0, ErrorCode::kDomain, "eps too large: alpha_n C^{n/(n-1)} would be nonpositive");
  return std::pow(arg / alpha, (n - 1.0) / n);
}

double inner_energy_integral(int n, double X) {
  require(n >= 2 && X >= 0.0, ErrorCode::kDomain, "inner_energy_integral needs n >= 2, X >= 0");
  // (u)^{n-1} = ((1+u) - 1)^{n-1}; the k = n-1 term integrates to log(1+X).
  double sum = 0.0;
  for (int k = 0; k <= n - 2; ++k) {
    const double sign = ((n - 1 - k) % 2 == 0) ? 1.0 : -1.0;
    const double binom = binomial(n - 1, k).convert_to<double>();
    const int e = k - n + 1;  // negative
    sum += sign * binom * std::expm1(e * std::log1p(X)) / e;
  }
  return sum + std::log1p(X);
}

double energy_closed_form(const SequenceParams& p) {
  const double alpha = alpha_n(p.n);
  return energy_constant(p.n, p.eps, p.L) / (alpha * std::pow(p.C, static_cast<double>(p.n) / (p.n - 1)));
}

SequenceParams build_params(double eps, int n, int m) {
  require(n >= 2, ErrorCode::kDomain, "dimension n must be >= 2");
  require(m >= 1, ErrorCode::kDomain, "truncation order m must be >= 1");
  require(eps >= kMinSequenceEps && eps < std::exp(-1.0), ErrorCode::kDomain,
          "eps must lie in [1e-6, 1/e), got " + std::to_string(eps));
  const double L = std::pow(-std::log(eps), m + 1);
  require(L * eps < 1.0, ErrorCode::kConstruction,
          "L eps = " + std::to_string(L * eps) + " >= 1: matching sphere leaves the ball; decrease eps");

  const double alpha = alpha_n(n);
  const double p = static_cast<double>(n) / (n - 1);
  const double K = energy_constant(n, eps, L);
  const double c_asym = asymptotic_C(eps, n);

  // energy(C) = K / (alpha C^p) is decreasing in C.
  const auto residual = [&](double C) { return K / (alpha * std::pow(C, p)) - 1.0; };
  double lo = 0.5 * c_asym;
  double hi = 2.0 * c_asym;
  if (!(residual(lo) > 0.0 && residual(hi) < 0.0)) {
    fail(ErrorCode::kConstruction, "no unit-energy root in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                       "]: residuals " + std::to_string(residual(lo)) + ", " +
                                       std::to_string(residual(hi)));
  }
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  double C = 0.5 * (lo + hi);
  for (int i = 0; i < 20; ++i) {
    const double h = residual(C);
    if (std::fabs(h) < 1e-15) break;
    const double dh = -p * K / (alpha * std::pow(C, p + 1.0));
    C -= h / dh;
  }

  SequenceParams out;
  out.eps = eps;
  out.L = L;
  out.C = C;
  out.n = n;
  out.m = m;
  out.t0 = -n * std::log(L * eps) / alpha;
  // Continuity at |x| = L eps.
  out.Lambda = alpha * std::pow(C, p) + n * std::log(L * eps) - (n - 1) * std::log1p(matching_X(n, L));
  out.C_asymptotic = c_asym;
  out.lambda_defect = out.Lambda + (n - 1) * harmonic(n - 1).to_double();
  return out;
}

double continuity_residual(const SequenceParams& p) {
  const double alpha = alpha_n(p.n);
  const double croot = std::pow(p.C, 1.0 / (p.n - 1));
  const double lhs = p.C - ((p.n - 1) * std::log1p(matching_X(p.n, p.L)) + p.Lambda) / (alpha * croot);
  const double rhs = p.t0 / croot;
  return lhs - rhs;
}

double u_eps_inner(const SequenceParams& p, double r) {
  require(r > 0.0 && r <= 1.0, ErrorCode::kDomain, "radius must lie in (0, 1]");
  const double alpha = alpha_n(p.n);
  const double ratio = std::pow(r / p.eps, static_cast<double>(p.n) / (p.n - 1));
  return p.C - ((p.n - 1) * std::log1p(c_n(p.n) * ratio) + p.Lambda) / (alpha * std::pow(p.C, 1.0 / (p.n - 1)));
}

double u_eps_outer(const SequenceParams& p, double r) {
  require(r > 0.0 && r <= 1.0, ErrorCode::kDomain, "radius must lie in (0, 1]");
  return -p.n * std::log(r) / (alpha_n(p.n) * std::pow(p.C, 1.0 / (p.n - 1)));
}

double u_eps_value(const SequenceParams& p, double r) {
  require(r > 0.0 && r <= 1.0, ErrorCode::kDomain, "radius must lie in (0, 1]");
  if (r == 1.0) return 0.0;
  return r <= p.matching_radius() ? u_eps_inner(p, r) : u_eps_outer(p, r);
}

double u_eps_moser(const SequenceParams& p, double tau) {
  require(tau >= 0.0, ErrorCode::kDomain, "Moser coordinate must be >= 0");
  const double alpha = alpha_n(p.n);
  const double scale = alpha * std::pow(p.C, 1.0 / (p.n - 1));
  if (tau < p.tau_match()) return tau / scale;
  // (r/eps)^{n/(n-1)} = e^{-(tau - tau_eps)/(n-1)}
  const double ratio = std::exp(-(tau - p.tau_eps()) / (p.n - 1));
  return p.C - ((p.n - 1) * std::log1p(c_n(p.n) * ratio) + p.Lambda) / scale;
}

double sequence_functional(const SequenceParams& p, const ProblemParams& problem, const QuadratureSpec& quad) {
  problem.validate();
  require(problem.n == p.n, ErrorCode::kInvalidArgument, "problem dimension differs from the sequence dimension");
  require(problem.m == p.m, ErrorCode::kInvalidArgument, "problem truncation order differs from the sequence");
  const double tau_m = p.tau_match();
  const double tau_e = p.tau_eps();
  const double tau_end = tau_e + quad.t_max;
  std::vector<double> breaks{0.0, tau_m};
  // Unit-width panels across the core keep the initial rule close to converged.
  for (double s = std::max(tau_m, tau_e - 10.0); s < tau_e + 20.0; s += 1.0) {
    if (s > tau_m) breaks.push_back(s);
  }
  breaks.push_back(tau_end);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto integrand = [&](double tau) { return f_eval(problem, u_eps_moser(p, tau)) * std::exp(-tau); };
  const QuadratureResult body = integrate_adaptive(integrand, breaks, quad);
  // u_eps is within e^{-t_max/(n-1)} of its peak beyond tau_end.
  const double tail = f_eval(problem, u_eps_moser(p, tau_end)) * std::exp(-tau_end);
  return ball_measure(p.n) * (body.value + tail);
}

double leading_coefficient(int n, int m) {
  require(n >= 2 && m >= 0, ErrorCode::kDomain, "leading_coefficient needs n >= 2, m >= 0");
  const double q = static_cast<double>(n) * (m + 1) / (n - 1);
  return ball_measure(n) * std::pow(alpha_n(n), -(m + 1.0) / (n - 1)) * std::exp(std::lgamma(q + 1.0) - std::lgamma(m + 2.0));
}

std::vector<ExcessRow> excess_report(const std::vector<double>& eps_list, int n, int m, const QuadratureSpec& quad,
                                     double lambda, int workers) {
  const ProblemParams problem = ProblemParams::make(n, m, lambda);
  const double thr = threshold(n, 0.0, ball_measure(n));
  const double exponent = static_cast<double>(n) * (m + 1) / ((n - 1.0) * (n - 1.0));
  return parallel_map(eps_list.size(), workers, [&](std::size_t i) {
    const SequenceParams p = build_params(eps_list[i], n, m);
    ExcessRow row{};
    row.eps = p.eps;
    row.L = p.L;
    row.C = p.C;
    row.Lambda = p.Lambda;
    row.value = sequence_functional(p, problem, quad);
    row.excess = row.value - thr;
    row.scaled_excess = row.excess * std::pow(p.C, exponent);
    return row;
  });
}

std::vector<double> sequence_knots(const SequenceParams& p, int count, double t_max) {
  require(count >= 16, ErrorCode::kInvalidArgument, "sequence_knots needs at least 16 knots");
  const double tau_m = p.tau_match();
  const double tau_e = p.tau_eps();
  require(t_max > tau_m, ErrorCode::kInvalidArgument, "t_max must exceed the matching coordinate");
  const int outer = std::max(4, count / 8);
  std::vector<double> knots;
  knots.reserve(count);
  for (int i = 0; i < outer; ++i) knots.push_back(tau_m * i / outer);
  // Equidistribute a density peaked at the core, width ~ (n-1).
  const double width = 2.0 * (p.n - 1);
  const auto density = [&](double tau) {
    const double z = (tau - tau_e) / width;
    return 1.0 + 20.0 / (1.0 + z * z);
  };
  const int inner = count - outer;
  const int samples = 64 * inner;
  std::vector<double> cumulative(samples + 1, 0.0);
  const double h = (t_max - tau_m) / samples;
  for (int j = 0; j < samples; ++j) {
    const double a = tau_m + j * h;
    cumulative[j + 1] = cumulative[j] + 0.5 * h * (density(a) + density(a + h));
  }
  const double total = cumulative.back();
  int j = 0;
  for (int i = 0; i < inner; ++i) {
    const double target = total * i / (inner - 1);
    while (j < samples - 1 && cumulative[j + 1] < target) ++j;
    const double span = cumulative[j + 1] - cumulative[j];
    const double s = span > 0.0 ? std::clamp((target - cumulative[j]) / span, 0.0, 1.0) : 0.0;
    knots.push_back(tau_m + (j + s) * h);
  }
  knots.back() = t_max;
  return knots;
}

RadialProfile sequence_profile(const SequenceParams& p, const std::vector<double>& knots) {
  std::vector<double> values;
  values.reserve(knots.size());
  for (double tau : knots) values.push_back(u_eps_moser(p, tau));
  values.front() = 0.0;
  return RadialProfile(knots, std::move(values));
}

}  // namespace mtlab
