#include <cmath>
#include <complex>
#include <numbers>

#include "core.hpp"
#include "doctest.h"
#include "error.hpp"
#include "green.hpp"

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

// Ratio of the level-set integral to its lower bound for a planar pole p:
// (1 + q)/(1 - q)^3 with q = |p|^2 e^{-4 pi t}, from the mean of
// |1 + conj(p) z|^{-4} over |z| = e^{-2 pi t}.
double analytic_ratio(double p_abs, double t) {
  const double q = p_abs * p_abs * std::exp(-4 * pi * t);
  return (1 + q) / std::pow(1 - q, 3);
}

std::vector<double> grid(double a, double b, double step) {
  std::vector<double> out;
  for (double t = a; t <= b + 1e-12; t += step) out.push_back(t);
  return out;
}

}  // namespace

TEST_SUITE("green") {
  TEST_CASE("centered values") {
    const auto g = DiskGreen::centered(2);
    CHECK(green_value(g, {1.0, 0.0}) == Approx(0.0));
    CHECK(green_value(g, {std::exp(-2 * pi), 0.0}) == Approx(1.0).epsilon(1e-14));
    for (int n : {2, 3, 5}) {
      const auto gn = DiskGreen::centered(n);
      CHECK(s_p(gn) == 0.0);
      for (double r : {0.9, 0.3, 1e-3})
        CHECK(green_value(gn, {r, 0.0}) == Approx(-n * std::log(r) / alpha_n(n)).epsilon(1e-14));
    }
  }

  TEST_CASE("off-center value and regular part") {
    const auto g = DiskGreen::planar({0.5, 0.0});
    const double expected = std::log(0.75) / (2 * pi);
    CHECK(s_p(g) == Approx(expected).epsilon(1e-14));
    CHECK(s_p(g) == Approx(-0.0457857).epsilon(1e-6));
    const double d = 1e-6;
    const double regular = green_value(g, {0.5 + d, 0.0}) + std::log(d) / (2 * pi);
    CHECK(regular == Approx(expected).epsilon(1e-5));
    // Dirichlet data on the unit circle.
    for (double theta = 0; theta < 2 * pi; theta += 0.7)
      CHECK(std::abs(green_value(g, {std::cos(theta), std::sin(theta)})) < 1e-14);
  }

  TEST_CASE("regular part decreases with |p| and vanishes at the center") {
    double previous = 0.0;
    for (double a = 0.0; a < 0.99; a += 0.05) {
      const double s = s_p(DiskGreen::planar({0.0, a}));
      CHECK(s <= previous);
      previous = s;
    }
    CHECK(std::abs(s_p(DiskGreen::planar({1e-8, 0.0}))) < 1e-16);
    // Near the boundary S_p = log(1 - |p|^2)/(2 pi) diverges slowly.
    CHECK(s_p(DiskGreen::planar({0.999, 0.0})) == Approx(std::log(1 - 0.999 * 0.999) / (2 * pi)).epsilon(1e-14));
    CHECK(s_p(DiskGreen::planar({0.999999, 0.0})) < -2.0);
  }

  TEST_CASE("error paths") {
    CHECK(code_of([] { DiskGreen::make(3, {0.2, 0.0}); }) == ErrorCode::kUnsupported);
    CHECK(code_of([] { DiskGreen::make(1, {0.0, 0.0}); }) == ErrorCode::kDomain);
    CHECK(code_of([] { DiskGreen::planar({1.0, 0.0}); }) == ErrorCode::kDomain);
    CHECK(code_of([] { DiskGreen::planar({0.3, 0.0}).value({0.3, 0.0}); }) == ErrorCode::kSingularity);
    CHECK(code_of([] { DiskGreen::centered(2).value({0.0, 0.0}); }) == ErrorCode::kSingularity);
    CHECK(code_of([] { DiskGreen::centered(2).value({1.5, 0.0}); }) == ErrorCode::kDomain);
    CHECK(code_of([] { level_set_integral(DiskGreen::centered(2), 0.0); }) == ErrorCode::kDomain);
    CHECK(code_of([] { measure_At(DiskGreen::centered(2), -1.0); }) == ErrorCode::kDomain);
    CHECK(code_of([] { level_set_integral(DiskGreen::planar({0.3, 0}), 1.0, 8); }) == ErrorCode::kInvalidArgument);
    CHECK_NOTHROW(DiskGreen::make(3, {0.0, 0.0}));
  }

  TEST_CASE("centered level sets are exact in every dimension") {
    CHECK(level_set_integral(DiskGreen::centered(2), 1.0) == Approx(4 * pi * pi * std::exp(-4 * pi)).epsilon(1e-14));
    CHECK(level_set_integral(DiskGreen::centered(2), 1.0) == Approx(1.37696e-4).epsilon(1e-5));
    CHECK(measure_At(DiskGreen::centered(2), 1.0) == Approx(pi * std::exp(-4 * pi)).epsilon(1e-14));
    CHECK(measure_At(DiskGreen::centered(2), 1.0) == Approx(1.0956e-5).epsilon(1e-4));
    for (int n : {2, 3, 4}) {
      const auto g = DiskGreen::centered(n);
      const double a = alpha_n(n);
      const double omega = sphere_measure(n);
      for (double t : grid(0.5, 3.0, 0.25)) {
        CHECK(level_set_integral(g, t) * std::exp(a * t) == Approx(std::pow(omega, n / (n - 1.0))).epsilon(1e-12));
        CHECK(measure_At(g, t) * std::exp(a * t) == Approx(omega / n).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("centered flux of the Green function is one") {
    // |grad G| from a difference quotient of the value, times the sphere area.
    for (int n : {2, 3, 4}) {
      const auto g = DiskGreen::centered(n);
      for (double t : {0.5, 1.5}) {
        const double rho = level_circle(g, t).radius;
        const double h = 1e-6 * rho;
        const double grad = (green_value(g, {rho - h, 0}) - green_value(g, {rho + h, 0})) / (2 * h);
        CHECK(std::pow(grad, n - 1) * sphere_measure(n) * std::pow(rho, n - 1) == Approx(1.0).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("off-center level circles carry the level and unit flux") {
    const DiskGreen g = DiskGreen::planar({0.6, 0.0});
    for (double t : {0.2, 1.0, 2.0}) {
      const auto c = level_circle(g, t);
      double flux = 0.0;
      const int k = 2000;
      for (int i = 0; i < k; ++i) {
        const double th = 2 * pi * i / k;
        const double x = c.center_offset + c.radius * std::cos(th);
        const double y = c.radius * std::sin(th);
        CHECK(green_value(g, {x, y}) == Approx(t).epsilon(1e-11));
        // Outward normal derivative equals -|grad G| on a level set of a decreasing G.
        // |x - p| is rounded at |p| eps in absolute terms, so h cannot be tiny next to the pole.
        const double h = 3e-4 * c.radius;
        const double dn = (green_value(g, {x - h * std::cos(th), y - h * std::sin(th)}) -
                           green_value(g, {x + h * std::cos(th), y + h * std::sin(th)})) /
                          (2 * h);
        flux += dn * c.radius * 2 * pi / k;
      }
      CHECK(flux == Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("off-center measure approaches its limit") {
    const DiskGreen g = DiskGreen::planar({0.5, 0.0});
    // e^{4 pi t} |A_t| -> pi (1 - |p|^2)^2 = pi e^{4 pi S_p}.
    const double limit = pi * 0.75 * 0.75;
    CHECK(limit == Approx(pi * std::exp(4 * pi * s_p(g))).epsilon(1e-14));
    for (double t : {2.0, 2.5, 3.0}) CHECK(measure_At(g, t) * std::exp(4 * pi * t) == Approx(limit).epsilon(1e-2));
    // The measure is the area of the level circle.
    const auto c = level_circle(g, 0.3);
    CHECK(measure_At(g, 0.3) == Approx(pi * c.radius * c.radius).epsilon(1e-15));
  }

  TEST_CASE("off-center level-set integral matches the analytic ratio") {
    for (double a : {0.1, 0.3, 0.5, 0.7}) {
      const DiskGreen g = DiskGreen::planar({a * std::cos(1.0), a * std::sin(1.0)});
      for (double t : {0.05, 0.2, 0.5, 1.0, 2.0}) {
        const double bound = 4 * pi * pi * std::exp(-4 * pi * t + 4 * pi * s_p(g));
        INFO("|p|=" << a << " t=" << t);
        CHECK(level_set_integral(g, t) / bound == Approx(analytic_ratio(a, t)).epsilon(1e-10));
      }
    }
    // With an honest limit on resolution, t large still meets the lower bound.
    const DiskGreen g = DiskGreen::planar({0.5, 0.0});
    const double t = 4.0;
    CHECK(level_set_integral(g, t) >= 4 * pi * pi * std::exp(-4 * pi * t + 4 * pi * s_p(g)) * (1 - 1e-12));
  }

  TEST_CASE("lemma report, centered pole") {
    const auto rows = lemma31_report(DiskGreen::centered(2), grid(0.5, 3.0, 0.5));
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
      CHECK(std::abs(row.ratio - 1.0) <= 1e-12);
      CHECK(row.defect_scaled == 0.0);
    }
    CHECK(std::isnan(defect_rate(rows)));
    for (int n : {3, 4})
      for (const auto& row : lemma31_report(DiskGreen::centered(n), grid(0.5, 3.0, 0.5)))
        CHECK(std::abs(row.ratio - 1.0) <= 1e-12);
  }

  TEST_CASE("lemma report, off-center poles") {
    for (double a : {0.3, 0.5, 0.7}) {
      const auto rows = lemma31_report(DiskGreen::planar({a, 0.0}), grid(1.0, 6.0, 0.5));
      double smallest = INFINITY, largest = 0.0;
      for (const auto& row : rows) {
        CHECK(row.ratio >= 1.0 - 1e-6);
        CHECK(row.defect >= 0.0);
        CHECK(row.defect == Approx(analytic_ratio(a, row.t) - 1).epsilon(1e-8));
        smallest = std::min(smallest, row.defect_scaled);
        largest = std::max(largest, row.defect_scaled);
      }
      // The scaled defect settles at 4 |p|^2 instead of growing.
      CHECK(largest == Approx(4 * a * a).epsilon(1e-3));
      CHECK(smallest > 0.0);
      const double rate = defect_rate(rows);
      CHECK(std::abs(rate / (-4 * pi) - 1) < 0.2);
      CHECK(std::abs(rate / (-4 * pi) - 1) < 1e-4);
    }
  }
}
