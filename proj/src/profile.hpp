#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace mtlab {

// Moser coordinate t = -n log r maps (0, 1] onto [0, inf).
double to_radius(int n, double t);
double to_moser(int n, double r);

/// Radial trial function u(r) = w(-n log r), stored as a piecewise-linear w
/// on strictly increasing knots starting at t = 0 with w(0) = 0 (the boundary
/// condition on the unit sphere). Beyond the last knot w is held constant.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> knots, std::vector<double> values);

  std::span<const double> knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return knots_.size(); }
  bool empty() const { return knots_.empty(); }

  double value_at(double t) const;
  double peak() const;
  double last_knot() const { return knots_.back(); }

  RadialProfile scaled(double factor) const;
  RadialProfile with_values(std::vector<double> values) const;

  friend bool operator==(const RadialProfile&, const RadialProfile&) = default;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Dirichlet n-energy of u on the unit ball; exact for piecewise-linear w:
/// omega_{n-1} n^{n-1} sum |dw/dt|^n dt.
double dirichlet_energy(const RadialProfile& profile, int n);
// Energy carried by the part t > t_cut, i.e. the ball of radius to_radius(n, t_cut).
double dirichlet_energy_beyond(const RadialProfile& profile, int n, double t_cut);

// int_{B_1} F(u) dx = (omega_{n-1}/n) int_0^inf F(w(t)) e^{-t} dt
double functional_value(const RadialProfile& profile, const ProblemParams& params, const QuadratureSpec& quad);

RadialProfile normalize(const RadialProfile& profile, int n);

inline constexpr double kDefaultConcentrationRadius = 0.1;

struct EvalReport {
  double energy = 0.0;
  double value = 0.0;
  double peak = 0.0;
  double conc_fraction = 0.0;
};

EvalReport eval_report(const RadialProfile& profile, const ProblemParams& params, const QuadratureSpec& quad,
                       double delta_conc = kDefaultConcentrationRadius);

// Text form: "# moser-profile n=<n>" then one "t w" pair per line, 17 digits.
void write_profile(std::ostream& out, const RadialProfile& profile, int n);
struct LoadedProfile {
  RadialProfile profile;
  int n;
};
LoadedProfile read_profile(std::istream& in);

}  // namespace mtlab
