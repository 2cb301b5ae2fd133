// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any failed.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "green.hpp"
#include "json.hpp"
#include "optimize.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "sequence.hpp"

using namespace mtlab;
using std::numbers::pi;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(MTLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Collects the individual checks of one criterion; the first failure is kept as the reason.
class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& what) {
    if (!ok && reason_.empty()) reason_ = what;
    ok_ = ok_ && ok;
  }
  void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

  void time_limit(double limit) {
    const double used = seconds_since(start_);
    std::ostringstream s;
    s << "runtime " << used << " s (limit " << limit << " s)";
    check(used < limit, s.str());
    note(s.str());
  }

  // Runs body, turning a thrown exception into a failed check.
  void guard(const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& err) {
      check(false, std::string("exception: ") + err.what());
    }
  }

  bool report() const {
    std::cout << (ok_ ? "PASS " : "FAIL ") << name_;
    if (!ok_) std::cout << " -- " << reason_;
    if (!notes_.empty()) std::cout << " [" << notes_ << "]";
    std::cout << std::endl;
    return ok_;
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
  std::string reason_;
  std::string notes_;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

// Energy of the test function sampled directly in s = log r, where the radial
// n-energy is omega_{n-1} int |du/ds|^n ds. The derivative is a central
// difference of u_eps_value and the integral is composite Gauss-Legendre on
// both sides of the matching sphere.
double sequence_energy_by_quadrature(const SequenceParams& p) {
  const auto& rule = gauss_legendre(16);
  const double s_match = std::log(p.matching_radius());
  const double s_low = std::log(p.eps) - 40.0;
  auto integrand = [&](double s, double h) {
    const double du = (u_eps_value(p, std::exp(s + h)) - u_eps_value(p, std::exp(s - h))) / (2 * h);
    return std::pow(std::abs(du), p.n);
  };
  auto panels = [&](double a, double b, int count) {
    double total = 0.0;
    const double w = (b - a) / count;
    // Keep the difference quotient inside the panel, where u is smooth.
    const double h = std::min(1e-5, 1e-4 * w);
    for (int c = 0; c < count; ++c) {
      const double mid = a + (c + 0.5) * w;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        total += 0.5 * w * rule.weights[q] * integrand(mid + 0.5 * w * rule.nodes[q], h);
    }
    return total;
  };
  return sphere_measure(p.n) * (panels(s_low, s_match, 400) + panels(s_match, 0.0, 50));
}

// omega_{n-1} int_0^1 |u'(r)|^n r^{n-1} dr for a Moser-coordinate profile, with
// u'(r) from central differences of u(r) = w(-n log r).
double energy_in_r(const RadialProfile& prof, int n) {
  const auto& rule = gauss_legendre(4);
  const auto t = prof.knots();
  auto u = [&](double r) { return prof.value_at(to_moser(n, r)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double r_hi = to_radius(n, t[i]);
    const double r_lo = to_radius(n, t[i + 1]);
    const int cells = 200;
    const double h = (r_hi - r_lo) / cells;
    for (int c = 0; c < cells; ++c) {
      const double mid = r_lo + (c + 0.5) * h;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = mid + 0.5 * h * rule.nodes[q];
        const double d = 1e-6 * r;
        const double du = (u(r + d) - u(r - d)) / (2 * d);
        total += 0.5 * h * rule.weights[q] * std::pow(std::abs(du), n) * std::pow(r, n - 1);
      }
    }
  }
  return sphere_measure(n) * total;
}

RadialProfile random_profile(std::mt19937_64& rng, int count, double t_max) {
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::vector<double> k(count), v(count);
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / (count - 1);
    k[i] = t_max * s * s;
    v[i] = i == 0 ? 0.0 : (1 - std::exp(-k[i])) * (1 + jitter(rng)) + 0.05 * k[i];
  }
  return RadialProfile(k, v);
}

bool threshold_reproduction() {
  Criterion c("1 threshold reproduction");
  c.guard([&] {
    const auto two = nlohmann::json::parse(run_cli("threshold --n 2 --format json").out);
    const double v2 = two["results"]["threshold"].get<double>();
    c.check(std::abs(v2 - pi * (1 + std::numbers::e)) <= 1e-9, "n=2 threshold " + num(v2));
    const auto three = nlohmann::json::parse(run_cli("threshold --n 3 --format json").out);
    const double v3 = three["results"]["threshold"].get<double>();
    c.check(std::abs(v3 - 4 * pi / 3 * (1 + std::exp(1.5))) <= 1e-6, "n=3 threshold " + num(v3));
    c.note("n=2 " + num(v2) + ", n=3 " + num(v3));
  });
  c.time_limit(1.0);
  return c.report();
}

bool exact_identities() {
  Criterion c("2 exact identities");
  c.guard([&] {
    for (int n = 2; n <= 12; ++n) {
      const auto [lhs, rhs] = verify_identity_harmonic(n);
      c.check(lhs == rhs, "harmonic identity at n=" + std::to_string(n));
    }
    for (int m = 0; m <= 12; ++m) {
      const auto [lhs, rhs] = verify_identity_beta(m);
      c.check(lhs == rhs, "beta identity at m=" + std::to_string(m));
    }
  });
  c.time_limit(1.0);
  return c.report();
}

bool level_set_bound() {
  Criterion c("3 level-set bound");
  c.guard([&] {
    for (int n : {2, 3, 4}) {
      const auto g = DiskGreen::centered(n);
      const double alpha = alpha_n(n);
      const double target_int = std::pow(sphere_measure(n), static_cast<double>(n) / (n - 1));
      const double target_meas = sphere_measure(n) / n;
      for (double t = 0.5; t <= 3.0 + 1e-12; t += 0.25) {
        const double a = level_set_integral(g, t) * std::exp(alpha * t);
        const double b = measure_At(g, t) * std::exp(alpha * t);
        c.check(std::abs(a / target_int - 1) <= 1e-12, "centered integral n=" + std::to_string(n) + " t=" + num(t));
        c.check(std::abs(b / target_meas - 1) <= 1e-12, "centered measure n=" + std::to_string(n) + " t=" + num(t));
      }
    }
    std::vector<double> grid;
    for (double t = 1.0; t <= 6.0 + 1e-12; t += 0.5) grid.push_back(t);
    const double expected_rate = -alpha_n(2);
    double worst_rate = 0.0;
    for (double a : {0.1, 0.3, 0.5, 0.7}) {
      const auto rows = lemma31_report(DiskGreen::planar({a * std::cos(0.4), a * std::sin(0.4)}), grid);
      for (const auto& row : rows) {
        c.check(row.ratio >= 1.0 - 1e-6, "ratio " + num(row.ratio) + " at |p|=" + num(a) + " t=" + num(row.t));
        c.check(std::isfinite(row.defect_scaled) && row.defect_scaled <= rows.front().defect_scaled * (1 + 1e-9),
                "scaled defect grows at |p|=" + num(a) + " t=" + num(row.t));
      }
      const double rate_error = std::abs(defect_rate(rows) / expected_rate - 1);
      worst_rate = std::max(worst_rate, rate_error);
      c.check(rate_error < 0.2, "defect rate " + num(defect_rate(rows)) + " at |p|=" + num(a));
    }
    c.note("worst relative rate error " + num(worst_rate));
  });
  c.time_limit(10.0);
  return c.report();
}

bool sequence_construction() {
  Criterion c("4 test-sequence construction");
  c.guard([&] {
    double worst_quad = 0.0;
    for (int m : {1, 2}) {
      double previous = INFINITY;
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto p = build_params(eps, 2, m);
        const std::string at = " m=" + std::to_string(m) + " eps=" + num(eps);
        c.check(std::abs(energy_closed_form(p) - 1) <= 1e-12, "closed-form energy" + at);
        const double quad = sequence_energy_by_quadrature(p);
        worst_quad = std::max(worst_quad, std::abs(quad - 1));
        c.check(std::abs(quad - 1) <= 1e-6, "quadrature energy " + num(quad) + at);
        c.check(std::abs(continuity_residual(p)) < 1e-12, "continuity residual" + at);
        const double defect = std::abs(p.Lambda + harmonic(1).to_double());
        c.check(defect * p.L * p.L <= 1.0, "Lambda defect not O(L^-2)" + at);
        c.check(defect < previous, "Lambda defect not decreasing" + at);
        previous = defect;
      }
    }
    c.note("worst quadrature energy error " + num(worst_quad));
  });
  c.time_limit(10.0);
  return c.report();
}

bool positive_excess() {
  Criterion a("5a excess over the threshold is positive");
  Criterion b("5b scaled excess near the leading coefficient");
  std::vector<ExcessRow> rows;
  a.guard([&] {
    QuadratureSpec quad;
    quad.rel_tol = 1e-10;
    rows = excess_report({1e-2, 1e-3, 1e-4}, 2, 1, quad);
    for (const auto& row : rows) {
      a.check(row.excess > 0.0, "excess " + num(row.excess) + " at eps=" + num(row.eps));
      a.note("eps=" + num(row.eps) + " excess " + num(row.excess));
    }
  });
  a.time_limit(30.0);
  b.guard([&] {
    const double target = leading_coefficient(2, 1);
    b.check(std::abs(target - 3 / (4 * pi)) <= 1e-15, "leading coefficient " + num(target));
    if (rows.size() == 3) {
      const double scaled = rows.back().scaled_excess;
      b.check(std::abs(scaled / target - 1) <= 0.25, "scaled excess " + num(scaled) + " vs " + num(target));
      b.note("eps=1e-4 scaled excess " + num(scaled) + ", target " + num(target));
    } else {
      b.check(false, "no excess rows");
    }
  });
  const bool ok_a = a.report();
  const bool ok_b = b.report();
  return ok_a && ok_b;
}

bool optimizer_soundness() {
  Criterion c("6 optimizer soundness");
  c.guard([&] {
    std::mt19937_64 rng(2024);
    QuadratureSpec quad;
    quad.panel_order = 8;
    double worst = 0.0;
    for (int n : {2, 3})
      for (double lambda : {0.0, 1.0, 1.5})
        for (int trial = 0; trial < 5; ++trial) {
          const auto p = random_profile(rng, 40, 30.0);
          const auto params = ProblemParams::make(n, 1, lambda);
          const auto og = objective_and_gradient(p, params, quad);
          std::vector<double> v(p.values().begin(), p.values().end());
          double diff = 0.0, scale = 0.0;
          for (std::size_t j = 1; j < v.size(); ++j) {
            auto up = v, down = v;
            up[j] += 1e-6;
            down[j] -= 1e-6;
            const double fd = (objective_and_gradient(p.with_values(up), params, quad).value -
                               objective_and_gradient(p.with_values(down), params, quad).value) /
                              2e-6;
            diff = std::max(diff, std::abs(og.gradient[j] - fd));
            scale = std::max(scale, std::abs(og.gradient[j]));
          }
          worst = std::max(worst, diff / scale);
        }
    c.check(worst < 1e-6, "gradient relative error " + num(worst));
    c.note("gradient relative error " + num(worst));

    const auto params = ProblemParams::make(2, 1, 1.0);
    OptimizerConfig config;
    config.workers = 3;
    const auto best = maximize(config, params);
    double best_sequence = -INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4})
      best_sequence = std::max(best_sequence, sequence_functional(build_params(eps, 2, 1), params, QuadratureSpec{}));
    const double thr = threshold(2, 0.0, pi);
    c.check(best.value > thr, "maximize value " + num(best.value) + " not above " + num(thr));
    c.check(best.value >= best_sequence - 1e-4,
            "maximize value " + num(best.value) + " below test sequence " + num(best_sequence));
    c.note("maximize " + num(best.value) + " (" + best.seed + "), best test function " + num(best_sequence));

    const auto scan = lambda_scan({0.0, 0.5, 1.0, 1.5, 2.0, 3.0}, config, 2, 1);
    for (std::size_t i = 1; i < scan.rows.size(); ++i)
      c.check(scan.rows[i].value <= scan.rows[i - 1].value + 1e-6,
              "lambda scan increases at lambda=" + num(scan.rows[i].lambda));
  });
  c.time_limit(300.0);
  return c.report();
}

bool coordinates_and_determinism() {
  Criterion c("7 coordinate identity and determinism");
  c.guard([&] {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int n : {2, 3, 4})
      for (int trial = 0; trial < 3; ++trial) {
        std::uniform_real_distribution<double> step(0.05, 1.5), val(-0.5, 2.0);
        std::vector<double> k{0.0}, v{0.0};
        for (int i = 1; i < 12; ++i) {
          k.push_back(k.back() + step(rng));
          v.push_back(val(rng));
        }
        const RadialProfile p(k, v);
        worst = std::max(worst, std::abs(dirichlet_energy(p, n) / energy_in_r(p, n) - 1));
      }
    c.check(worst <= 1e-8, "r- and t-coordinate energies differ by " + num(worst));
    c.note("energy identity error " + num(worst));

    const std::string dir = std::string(MTLAB_ACCEPTANCE_DIR);
    for (const std::string args : {"maximize --n 2 --m 1 --lambda 1 --format csv --workers 2",
                                   "sequence --n 2 --m 1 --lambda 1 --format json",
                                   "lemma31 --n 2 --pole 0.5,0.2 --format csv"}) {
      const auto first = run_cli(args + " --out " + dir + "/run_a.txt");
      const auto second = run_cli(args + " --out " + dir + "/run_b.txt");
      c.check(first.code == 0 && second.code == 0, "'" + args + "' failed");
      const std::string a = slurp(dir + "/run_a.txt");
      c.check(!a.empty() && a == slurp(dir + "/run_b.txt"), "'" + args + "' not byte-identical");
    }
  });
  c.time_limit(120.0);
  return c.report();
}

}  // namespace

int main() {
  bool ok = true;
  ok &= threshold_reproduction();
  ok &= exact_identities();
  ok &= level_set_bound();
  ok &= sequence_construction();
  ok &= positive_excess();
  ok &= optimizer_soundness();
  ok &= coordinates_and_determinism();
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
