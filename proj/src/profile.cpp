#include "profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace mtlab {

double to_radius(int n, double t) {
  require(n >= 2, ErrorCode::kDomain, "dimension n must be >= 2");
  require(t >= 0.0, ErrorCode::kDomain, "Moser coordinate must be >= 0");
  return std::exp(-t / n);
}

double to_moser(int n, double r) {
  require(n >= 2, ErrorCode::kDomain, "dimension n must be >= 2");
  require(r > 0.0 && r <= 1.0, ErrorCode::kDomain, "radius must lie in (0, 1]");
  return r == 1.0 ? 0.0 : -n * std::log(r);
}

RadialProfile::RadialProfile(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  require(knots_.size() >= 2, ErrorCode::kInvalidArgument, "profile needs at least two knots");
  require(knots_.size() == values_.size(), ErrorCode::kInvalidArgument, "profile knots/values length mismatch");
  require(knots_.front() == 0.0, ErrorCode::kInvalidArgument, "first knot must be t = 0");
  require(values_.front() == 0.0, ErrorCode::kInvalidArgument, "profile must vanish at the boundary (w_0 = 0)");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    require(std::isfinite(knots_[i]) && std::isfinite(values_[i]), ErrorCode::kInvalidArgument,
            "profile entries must be finite");
    if (i > 0) require(knots_[i] > knots_[i - 1], ErrorCode::kInvalidArgument, "knots must be strictly increasing");
  }
}

double RadialProfile::value_at(double t) const {
  if (t <= 0.0) return values_.front();
  if (t >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double s = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return (1.0 - s) * values_[i] + s * values_[i + 1];
}

double RadialProfile::peak() const { return *std::max_element(values_.begin(), values_.end()); }

RadialProfile RadialProfile::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return RadialProfile(knots_, std::move(v));
}

RadialProfile RadialProfile::with_values(std::vector<double> values) const {
  return RadialProfile(knots_, std::move(values));
}

namespace {

double energy_prefactor(int n) { return sphere_measure(n) * std::pow(static_cast<double>(n), n - 1); }

double segment_density(double dw, double dt, int n) { return std::pow(std::fabs(dw / dt), n); }

}  // namespace

double dirichlet_energy(const RadialProfile& profile, int n) {
  const auto t = profile.knots();
  const auto w = profile.values();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    sum += segment_density(w[i + 1] - w[i], dt, n) * dt;
  }
  return energy_prefactor(n) * sum;
}

double dirichlet_energy_beyond(const RadialProfile& profile, int n, double t_cut) {
  const auto t = profile.knots();
  const auto w = profile.values();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double lo = std::max(t[i], t_cut);
    if (t[i + 1] <= lo) continue;
    const double dt = t[i + 1] - t[i];
    sum += segment_density(w[i + 1] - w[i], dt, n) * (t[i + 1] - lo);
  }
  return energy_prefactor(n) * sum;
}

double functional_value(const RadialProfile& profile, const ProblemParams& params, const QuadratureSpec& quad) {
  params.validate();
  quad.validate();
  require(quad.t_max > profile.last_knot(), ErrorCode::kInvalidArgument,
          "quadrature t_max must exceed the last profile knot");
  std::vector<double> breaks(profile.knots().begin(), profile.knots().end());
  breaks.push_back(quad.t_max);
  const auto integrand = [&](double t) { return f_eval(params, profile.value_at(t)) * std::exp(-t); };
  const QuadratureResult body = integrate_adaptive(integrand, breaks, quad);
  const double tail = f_eval(params, profile.values().back()) * std::exp(-quad.t_max);
  return ball_measure(params.n) * (body.value + tail);
}

RadialProfile normalize(const RadialProfile& profile, int n) {
  const double energy = dirichlet_energy(profile, n);
  require(energy > 0.0 && std::isfinite(energy), ErrorCode::kDegenerate, "cannot normalize a zero-energy profile");
  RadialProfile out = profile.scaled(std::pow(energy, -1.0 / n));
  // One correction step absorbs the rounding of the fractional power.
  const double again = dirichlet_energy(out, n);
  return again == 1.0 ? out : out.scaled(std::pow(again, -1.0 / n));
}

EvalReport eval_report(const RadialProfile& profile, const ProblemParams& params, const QuadratureSpec& quad,
                       double delta_conc) {
  require(delta_conc > 0.0 && delta_conc <= 1.0, ErrorCode::kInvalidArgument, "delta_conc must lie in (0, 1]");
  EvalReport report;
  report.energy = dirichlet_energy(profile, params.n);
  report.value = functional_value(profile, params, quad);
  report.peak = profile.peak();
  report.conc_fraction =
      report.energy > 0.0
          ? dirichlet_energy_beyond(profile, params.n, to_moser(params.n, delta_conc)) / report.energy
          : 0.0;
  return report;
}

void write_profile(std::ostream& out, const RadialProfile& profile, int n) {
  out << "# moser-profile n=" << n << '\n';
  char buf[80];
  const auto t = profile.knots();
  const auto w = profile.values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t[i], w[i]);
    out << buf;
  }
}

LoadedProfile read_profile(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "empty profile stream");
  const std::string tag = "# moser-profile n=";
  require(line.rfind(tag, 0) == 0, ErrorCode::kIo, "missing '# moser-profile n=<n>' header");
  int n = 0;
  try {
    n = std::stoi(line.substr(tag.size()));
  } catch (const std::exception&) {
    fail(ErrorCode::kIo, "malformed dimension in profile header");
  }
  std::vector<double> t;
  std::vector<double> w;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double a = 0.0;
    double b = 0.0;
    require(static_cast<bool>(row >> a >> b), ErrorCode::kIo, "malformed profile row: " + line);
    t.push_back(a);
    w.push_back(b);
  }
  return {RadialProfile(std::move(t), std::move(w)), n};
}

}  // namespace mtlab
