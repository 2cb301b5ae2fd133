#include "green.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "core.hpp"
#include "error.hpp"

namespace mtlab {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kContourRelTol = 1e-10;
constexpr int kMaxContourResolution = 1 << 20;

Complex as_complex(DiskGreen::Point p) { return {p[0], p[1]}; }

double norm2(DiskGreen::Point p) { return p[0] * p[0] + p[1] * p[1]; }

void require_level(double t) {
  require(std::isfinite(t) && t > 0.0, ErrorCode::kDomain,
          "level t must be > 0 so that A_t stays inside the ball, got " + std::to_string(t));
}

struct ContourSums {
  double mean_weight;  // mean over theta of 1/|1 + conj(p) z|^4
  double mean_defect;  // mean of (1/|1 + conj(p) z|^4 - 1), formed without cancellation
};

// Trapezoid means on the circle |z| = rho of the Jacobian factor of the
// Moebius map z -> (z + p)/(1 + conj(p) z), which carries |z| = rho onto dA_t.
ContourSums contour_sums(Complex p, double rho, int resolution) {
  double weight = 0.0;
  double defect = 0.0;
  for (int j = 0; j < resolution; ++j) {
    const double theta = kTwoPi * j / resolution;
    const Complex z = std::polar(rho, theta);
    // |1 + conj(p) z|^2 = 1 + d with d = 2 Re(conj(p) z) + |p z|^2
    const double d = 2.0 * (std::conj(p) * z).real() + std::norm(p) * rho * rho;
    const double inv = 1.0 / ((1.0 + d) * (1.0 + d));
    weight += inv;
    // inv - 1 = -d(2 + d)/(1 + d)^2 = d^2 (3 + 2d)/(1 + d)^2 - 2d; the linear part is
    // summed analytically below, since the trapezoid mean of d is exactly |p rho|^2.
    defect += d * d * (3.0 + 2.0 * d) / ((1.0 + d) * (1.0 + d));
  }
  return {weight / resolution, defect / resolution - 2.0 * std::norm(p) * rho * rho};
}

// Doubles the contour resolution until two successive means agree to
// kContourRelTol.
ContourSums converged_sums(Complex p, double rho, int resolution) {
  require(resolution >= 64, ErrorCode::kInvalidArgument, "contour resolution must be >= 64");
  ContourSums coarse = contour_sums(p, rho, resolution);
  while (true) {
    resolution *= 2;
    const ContourSums fine = contour_sums(p, rho, resolution);
    if (std::fabs(fine.mean_weight - coarse.mean_weight) <= kContourRelTol * std::fabs(fine.mean_weight) &&
        std::fabs(fine.mean_defect - coarse.mean_defect) <= kContourRelTol * std::fabs(fine.mean_defect)) {
      return fine;
    }
    if (resolution >= kMaxContourResolution) {
      throw AccuracyError(fine.mean_weight, std::fabs(fine.mean_weight - coarse.mean_weight),
                          "contour trapezoid did not converge");
    }
    coarse = fine;
  }
}

}  // namespace

DiskGreen DiskGreen::centered(int n) {
  require(n >= 2, ErrorCode::kDomain, "dimension n must be >= 2");
  return DiskGreen(n, {0.0, 0.0}, 0.0);
}

DiskGreen DiskGreen::planar(Point pole) {
  const double r2 = norm2(pole);
  require(std::isfinite(r2) && r2 < 1.0, ErrorCode::kDomain, "pole must lie in the open unit disk");
  return DiskGreen(2, pole, std::log1p(-r2) / kTwoPi);
}

DiskGreen DiskGreen::make(int n, Point pole) {
  if (pole[0] == 0.0 && pole[1] == 0.0) return centered(n);
  require(n == 2, ErrorCode::kUnsupported,
          "off-center poles have no closed-form Green function for n = " + std::to_string(n));
  return planar(pole);
}

double DiskGreen::value(Point x) const {
  const double r2 = norm2(x);
  require(r2 <= 1.0, ErrorCode::kDomain, "point lies outside the closed unit ball");
  if (is_centered()) {
    require(r2 > 0.0, ErrorCode::kSingularity, "Green function evaluated at its pole");
    // -(1/alpha_n) log r^n
    return -(n_ / alpha_n(n_)) * 0.5 * std::log(r2);
  }
  const Complex p = as_complex(pole_);
  const Complex z = as_complex(x);
  const double dist = std::abs(z - p);
  require(dist > 0.0, ErrorCode::kSingularity, "Green function evaluated at its pole");
  return std::log(std::abs(1.0 - std::conj(p) * z) / dist) / kTwoPi;
}

double s_p(const DiskGreen& g) { return g.s_p(); }

double green_value(const DiskGreen& g, DiskGreen::Point x) { return g.value(x); }

LevelCircle level_circle(const DiskGreen& g, double t) {
  require_level(t);
  if (g.is_centered()) return {0.0, std::exp(-alpha_n(g.n()) * t / g.n())};
  // |x - p| / |1 - conj(p) x| = rho is the image of |z| = rho: a circle with
  // center p (1 - rho^2)/(1 - |p|^2 rho^2) and radius rho (1 - |p|^2)/(1 - |p|^2 rho^2).
  const double rho = std::exp(-kTwoPi * t);
  const double a2 = norm2(g.pole());
  const double denom = 1.0 - a2 * rho * rho;
  return {std::sqrt(a2) * (1.0 - rho * rho) / denom, rho * (1.0 - a2) / denom};
}

double measure_At(const DiskGreen& g, double t) {
  require_level(t);
  if (g.is_centered()) return ball_measure(g.n()) * std::exp(-alpha_n(g.n()) * t);
  const double radius = level_circle(g, t).radius;
  return std::numbers::pi * radius * radius;
}

namespace {

// Returns (lhs, ratio - 1) for the off-center planar case.
std::pair<double, double> planar_level_integral(const DiskGreen& g, double t, int resolution) {
  // On dA_t: 1/|grad G| ds = 2 pi rho^2 |psi'(z)|^2 dtheta with psi the inverse
  // Moebius map, |psi'(z)| = (1 - |p|^2) / |1 + conj(p) z|^2.
  const double rho = std::exp(-kTwoPi * t);
  const Complex p = as_complex(g.pole());
  const double a2 = std::norm(p);
  const ContourSums sums = converged_sums(p, rho, resolution);
  const double scale = kTwoPi * kTwoPi * rho * rho * (1.0 - a2) * (1.0 - a2);
  return {scale * sums.mean_weight, sums.mean_defect};
}

}  // namespace

double level_set_integral(const DiskGreen& g, double t, int resolution) {
  require_level(t);
  if (g.is_centered()) {
    const int n = g.n();
    return alpha_n(n) * ball_measure(n) * std::exp(-alpha_n(n) * t);
  }
  return planar_level_integral(g, t, resolution).first;
}

std::vector<Lemma31Row> lemma31_report(const DiskGreen& g, const std::vector<double>& t_grid, int resolution) {
  const int n = g.n();
  const double alpha = alpha_n(n);
  const double omega_pow = std::pow(sphere_measure(n), static_cast<double>(n) / (n - 1));
  std::vector<Lemma31Row> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    require_level(t);
    Lemma31Row row{};
    row.t = t;
    row.rhs = omega_pow * std::exp(-alpha * t + alpha * g.s_p());
    double defect = 0.0;
    if (g.is_centered()) {
      row.lhs = level_set_integral(g, t, resolution);
      row.ratio = row.lhs / row.rhs;
      // Exact-equality case: the Hoelder and isoperimetric steps are tight.
      defect = 0.0;
    } else {
      const auto [lhs, d] = planar_level_integral(g, t, resolution);
      row.lhs = lhs;
      // rhs equals the contour scale exactly, so the ratio is the mean weight.
      row.ratio = 1.0 + d;
      defect = d;
    }
    row.defect = defect;
    row.defect_scaled = defect * std::exp(2.0 / n * alpha * t);
    rows.push_back(row);
  }
  return rows;
}

double defect_rate(const std::vector<Lemma31Row>& rows) {
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  int count = 0;
  for (const auto& row : rows) {
    if (!(row.defect > 0.0)) continue;
    const double ly = std::log(row.defect);
    sx += row.t;
    sy += ly;
    sxx += row.t * row.t;
    sxy += row.t * ly;
    ++count;
  }
  if (count < 2) return std::nan("");
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace mtlab
