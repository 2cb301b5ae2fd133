#pragma once

#include <array>
#include <vector>

namespace mtlab {

/// n-Laplace Green function of the unit ball with Dirichlet data. Centered
/// poles are supported in every dimension; off-center poles only for n = 2,
/// where the Green function is (1/2pi) log(|1 - conj(p) x| / |x - p|).
class DiskGreen {
 public:
  using Point = std::array<double, 2>;

  static DiskGreen centered(int n);
  static DiskGreen planar(Point pole);
  static DiskGreen make(int n, Point pole);

  int n() const { return n_; }
  Point pole() const { return pole_; }
  bool is_centered() const { return pole_[0] == 0.0 && pole_[1] == 0.0; }
  double s_p() const { return s_p_; }

  // Centered poles only need |x|; pass (r, 0).
  double value(Point x) const;

 private:
  DiskGreen(int n, Point pole, double s_p) : n_(n), pole_(pole), s_p_(s_p) {}
  int n_;
  Point pole_;
  double s_p_;
};

double s_p(const DiskGreen& g);
double green_value(const DiskGreen& g, DiskGreen::Point x);

inline constexpr int kDefaultContourResolution = 64;

// int_{dA_t} 1/|grad G| dS over the level set of {G > t}.
double level_set_integral(const DiskGreen& g, double t, int resolution = kDefaultContourResolution);
// |A_t|, the measure of {G > t}.
double measure_At(const DiskGreen& g, double t);

// Euclidean center offset and radius of the circle dA_t (n = 2); for a
// centered pole the offset is zero.
struct LevelCircle {
  double center_offset;  // along the pole direction
  double radius;
};
LevelCircle level_circle(const DiskGreen& g, double t);

struct Lemma31Row {
  double t;
  double lhs;
  double rhs;
  double ratio;
  double defect;         // ratio - 1, formed without cancellation off-center
  double defect_scaled;  // defect e^{(2/n) alpha_n t}
};

std::vector<Lemma31Row> lemma31_report(const DiskGreen& g, const std::vector<double>& t_grid,
                                       int resolution = kDefaultContourResolution);

// Least-squares slope of log(defect) against t, over rows with a
// resolvable positive defect. NaN when fewer than two such rows exist.
double defect_rate(const std::vector<Lemma31Row>& rows);

}  // namespace mtlab
