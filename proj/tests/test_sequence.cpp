#include <cmath>
#include <numbers>

#include "core.hpp"
#include "doctest.h"
#include "error.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "sequence.hpp"

using namespace mtlab;
using doctest::Approx;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("expected an mtlab::Error");
  return ErrorCode::kInvalidArgument;
}

// 40-digit mpmath values from tests/oracles/sequence_oracle.py (n = 2, lambda = 1).
struct OracleRow {
  int m;
  double eps;
  double C;
  double Lambda;
  double value;
};
constexpr OracleRow kOracle[] = {
    {1, 1e-2, 0.86288204070645584712, -0.99929277087815368038, 13.047740715065307774},
    {1, 1e-3, 1.0540127532311145284, -0.99986022109171620499, 12.868172910343388595},
    {1, 1e-4, 1.215481581849492638, -0.99995576885342684016, 12.552278088928749343},
    {2, 1e-2, 0.8628198817611330714, -0.99996662959109691577, 12.626732519188289146},
    {2, 1e-3, 1.0540024207624430018, -0.99999707027272384291, 12.674879468521068463},
    {2, 1e-4, 1.2154787201428168886, -0.99999947857023244482, 12.442902089469042371},
};

double simpson(auto&& f, double a, double b, int cells) {
  const double h = (b - a) / cells;
  double s = f(a) + f(b);
  for (int i = 1; i < cells; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3;
}

}  // namespace

TEST_SUITE("sequence") {
  TEST_CASE("asymptotic C") {
    const double c2 = (-1 + std::log(pi) + 6 * std::log(10.0)) / (4 * pi);
    CHECK(asymptotic_C(1e-3, 2) == Approx(std::sqrt(c2)).epsilon(1e-14));
    CHECK(c2 == Approx(1.11092).epsilon(1e-5));
    CHECK(asymptotic_C(1e-3, 2) == Approx(1.05400).epsilon(1e-5));
    CHECK(asymptotic_C(1e-6, 2) == Approx(std::sqrt((12 * std::log(10.0) + std::log(pi) - 1) / (4 * pi))).epsilon(1e-14));
    CHECK(asymptotic_C(1e-6, 2) == Approx(1.4867158555054534).epsilon(1e-14));
    double previous = 0.0;
    for (double eps = 0.3; eps > 1e-8; eps /= 3) {
      const double c = asymptotic_C(eps, 2);
      CHECK(c > previous);
      previous = c;
    }
    CHECK(code_of([] { asymptotic_C(0.5, 2); }) == ErrorCode::kDomain);
  }

  TEST_CASE("inner energy integral") {
    for (double X : {0.0, 0.5, 3.0, 1e2, 1e5})
      CHECK(inner_energy_integral(2, X) == Approx(std::log1p(X) - X / (1 + X)).epsilon(1e-13));
    for (int n : {3, 4, 6}) {
      const double X = 7.5;
      const double numeric = simpson([n](double u) { return std::pow(u, n - 1) / std::pow(1 + u, n); }, 0.0, X, 20000);
      CHECK(inner_energy_integral(n, X) == Approx(numeric).epsilon(1e-12));
    }
  }

  TEST_CASE("built parameters agree with the high-precision oracle") {
    for (const auto& row : kOracle) {
      const auto p = build_params(row.eps, 2, row.m);
      INFO("m=" << row.m << " eps=" << row.eps);
      CHECK(p.C == Approx(row.C).epsilon(1e-13));
      CHECK(p.Lambda == Approx(row.Lambda).epsilon(1e-12));
      CHECK(p.L == Approx(std::pow(-std::log(row.eps), row.m + 1)).epsilon(1e-15));
      // For n = 2 continuity and unit energy force Lambda = -X/(1+X), X = pi L^2.
      const double X = pi * p.L * p.L;
      CHECK(p.Lambda == Approx(-X / (1 + X)).epsilon(1e-12));
    }
  }

  TEST_CASE("construction invariants") {
    for (int m : {1, 2}) {
      double previous_defect = INFINITY;
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto p = build_params(eps, 2, m);
        CHECK(energy_closed_form(p) == Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(continuity_residual(p)) < 1e-12);
        CHECK(std::abs(u_eps_inner(p, p.matching_radius()) - u_eps_outer(p, p.matching_radius())) < 1e-12);
        const double defect = std::abs(p.Lambda + 1.0);
        CHECK(defect < previous_defect);
        CHECK(defect * p.L * p.L < 1.0);
        previous_defect = defect;
      }
    }
    const auto p = build_params(1e-3, 2, 1);
    CHECK(std::abs(p.C / asymptotic_C(1e-3, 2) - 1) < 0.02);
    CHECK(p.C_asymptotic == asymptotic_C(1e-3, 2));
    CHECK(p.lambda_defect == Approx(p.Lambda + 1.0));
    for (int n : {3, 4}) {
      const auto q = build_params(1e-3, n, 1);
      CHECK(energy_closed_form(q) == Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(continuity_residual(q)) < 1e-12);
    }
  }

  TEST_CASE("closed-form energy against quadrature of the sampled function") {
    for (int m : {1, 2})
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto p = build_params(eps, 2, m);
        const auto prof = sequence_profile(p, sequence_knots(p, 40000, p.tau_eps() + 60));
        INFO("m=" << m << " eps=" << eps);
        CHECK(dirichlet_energy(prof, 2) == Approx(1.0).epsilon(1e-6));
      }
  }

  TEST_CASE("sequence values") {
    const auto p = build_params(1e-3, 2, 1);
    CHECK(u_eps_value(p, 1.0) == 0.0);
    const OracleRow& o = kOracle[1];
    const double at_eps = o.C - (std::log(1 + pi) + o.Lambda) / (4 * pi * o.C);
    CHECK(u_eps_value(p, 1e-3) == Approx(at_eps).epsilon(1e-13));
    for (double r : {1e-5, 1e-3, 0.05, 0.5})
      CHECK(u_eps_moser(p, -2 * std::log(r)) == Approx(u_eps_value(p, r)).epsilon(1e-14));
    CHECK(code_of([&] { u_eps_value(p, 0.0); }) == ErrorCode::kDomain);
    CHECK(code_of([&] { u_eps_value(p, 1.1); }) == ErrorCode::kDomain);
  }

  TEST_CASE("peak and the slow-growth condition") {
    for (int n : {2, 3}) {
      double prev_peak = 0.0, prev_ratio = INFINITY;
      for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const auto p = build_params(eps, n, 1);
        const double peak = p.C - p.Lambda / (alpha_n(n) * std::pow(p.C, 1.0 / (n - 1)));
        CHECK(p.peak() == Approx(peak).epsilon(1e-14));
        CHECK(u_eps_value(p, 1e-12 * eps) == Approx(peak).epsilon(1e-9));
        CHECK(peak > prev_peak);
        const double ratio = std::log(p.L) / std::pow(p.C, n / (n - 1.0));
        CHECK(ratio < prev_ratio);
        prev_peak = peak;
        prev_ratio = ratio;
      }
    }
  }

  TEST_CASE("convexity bound on the inner region") {
    for (int n : {2, 3}) {
      const auto p = build_params(1e-3, n, 1);
      const double a = alpha_n(n), q = n / (n - 1.0);
      for (int i = 1; i <= 1000; ++i) {
        const double r = p.matching_radius() * i / 1000.0;
        const double A = (n - 1) * std::log1p(c_n(n) * std::pow(r / p.eps, q)) + p.Lambda;
        const double s = A / (a * std::pow(p.C, q));
        REQUIRE(s < 1.0);
        const double lhs = a * std::pow(std::abs(u_eps_inner(p, r)), q);
        CHECK(lhs >= a * std::pow(p.C, q) - q * A - 1e-12);
      }
    }
  }

  TEST_CASE("construction errors") {
    CHECK(code_of([] { build_params(1e-7, 2, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([] { build_params(0.5, 2, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([] { build_params(1e-3, 1, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([] { build_params(1e-3, 2, 0); }) == ErrorCode::kDomain);
    // (log 100)^4 * 0.01 > 1: the matching sphere would leave the ball.
    CHECK(code_of([] { build_params(1e-2, 2, 3); }) == ErrorCode::kConstruction);
    CHECK_NOTHROW(build_params(1e-6, 2, 1));
  }

  TEST_CASE("functional along the sequence matches the oracle") {
    QuadratureSpec quad;
    quad.rel_tol = 1e-10;
    for (const auto& row : kOracle) {
      const auto p = build_params(row.eps, 2, row.m);
      const double v = sequence_functional(p, ProblemParams::make(2, row.m, 1.0), quad);
      INFO("m=" << row.m << " eps=" << row.eps);
      CHECK(v == Approx(row.value).epsilon(1e-9));
    }
  }

  TEST_CASE("functional: ordering properties") {
    QuadratureSpec quad;
    const auto p = build_params(1e-3, 2, 1);
    const double v0 = sequence_functional(p, ProblemParams::make(2, 1, 0.0), quad);
    const double v1 = sequence_functional(p, ProblemParams::make(2, 1, 1.0), quad);
    const double v15 = sequence_functional(p, ProblemParams::make(2, 1, 1.5), quad);
    CHECK(v0 >= pi);
    CHECK(v1 - pi * (1 + std::numbers::e) > 0.0);
    CHECK(v15 < v1);
    CHECK(v1 < v0);
    CHECK(code_of([&] { sequence_functional(p, ProblemParams::make(3, 1, 1.0), quad); }) ==
          ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { sequence_functional(p, ProblemParams::make(2, 2, 1.0), quad); }) ==
          ErrorCode::kInvalidArgument);
  }

  TEST_CASE("functional of the sampled profile converges to the sequence functional") {
    const auto p = build_params(1e-3, 2, 1);
    const auto params = ProblemParams::make(2, 1, 1.0);
    QuadratureSpec quad;
    const double exact = sequence_functional(p, params, quad);
    double previous = INFINITY;
    for (int count : {1000, 4000, 16000}) {
      const auto prof = sequence_profile(p, sequence_knots(p, count, p.tau_eps() + 60));
      quad.t_max = prof.last_knot() + 20;
      const double gap = std::abs(functional_value(prof, params, quad) - exact);
      CHECK(gap < previous);
      previous = gap;
    }
    CHECK(previous < 1e-5);
  }

  TEST_CASE("sampling grid") {
    const auto p = build_params(1e-3, 2, 1);
    const auto knots = sequence_knots(p, 400, 60.0);
    REQUIRE(knots.size() == 400);
    CHECK(knots.front() == 0.0);
    CHECK(knots.back() == Approx(60.0));
    for (std::size_t i = 1; i < knots.size(); ++i) CHECK(knots[i] > knots[i - 1]);
    const auto prof = sequence_profile(p, knots);
    for (std::size_t i = 1; i < knots.size(); i += 37) CHECK(prof.values()[i] == Approx(u_eps_moser(p, knots[i])));
    CHECK(code_of([&] { sequence_knots(p, 8, 60.0); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { sequence_knots(p, 400, 1.0); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("leading coefficient") {
    CHECK(leading_coefficient(2, 1) == Approx(3 / (4 * pi)).epsilon(1e-14));
    CHECK(leading_coefficient(2, 1) == Approx(0.238732).epsilon(1e-6));
    // omega int_0^1 (alpha G^{n/(n-1)})^{m+1}/(m+1)! r^{n-1} dr, with r = e^{-s}.
    for (int n : {2, 3, 4})
      for (int m : {1, 2}) {
        const double a = alpha_n(n), q = n / (n - 1.0);
        const double numeric = sphere_measure(n) * simpson(
                                                       [&](double s) {
                                                         const double g = n * s / a;
                                                         return std::pow(a * std::pow(g, q), m + 1) /
                                                                std::tgamma(m + 2.0) * std::exp(-n * s);
                                                       },
                                                       0.0, 60.0, 200000);
        CHECK(leading_coefficient(n, m) == Approx(numeric).epsilon(1e-9));
      }
  }

  TEST_CASE("excess report") {
    QuadratureSpec quad;
    const auto rows = excess_report({1e-2, 1e-3, 1e-4}, 2, 1, quad);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CHECK(row.excess > 0.0);
      CHECK(row.excess == Approx(row.value - pi * (1 + std::numbers::e)).epsilon(1e-12));
      CHECK(row.scaled_excess == Approx(row.excess * std::pow(row.C, 4)).epsilon(1e-12));
    }
    const auto parallel = excess_report({1e-2, 1e-3, 1e-4}, 2, 1, quad, 1.0, 3);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(parallel[i].value == rows[i].value);
  }

  TEST_CASE("scaled excess approaches the leading coefficient") {
    QuadratureSpec quad;
    const auto rows = excess_report({1e-4}, 2, 1, quad);
    const double target = 3 / (4 * pi);
    INFO("scaled excess " << rows[0].scaled_excess << " vs " << target);
    CHECK(std::abs(rows[0].scaled_excess / target - 1) <= 0.25);
  }
}
