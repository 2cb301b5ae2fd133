// mtlab command-line driver. Talks to the library only through the C API.
//
//   mtlab threshold   --n 3
//   mtlab identities  --n-max 12 --m-max 12
//   mtlab lemma31     --n 2 --pole 0.5,0 --t 1:6:0.5
//   mtlab sequence    --n 2 --m 1 --lambda 1 --eps 1e-2,1e-3,1e-4
//   mtlab maximize    --n 2 --m 1 --lambda 1 [--continuation --thetas 0.7,0.9,1]
//   mtlab lambda-scan --n 2 --m 1 --lambda 0:3:0.5
//
// Exit status: 0 success, 1 numerical failure (diagnostic JSON on stdout),
// 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtlab/mtlab.h"
#include "report.hpp"

namespace {

using mtlab_cli::fmt;
using mtlab_cli::join;
using mtlab_cli::Report;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  NumericalFailure(std::string kind, const std::string& message) : std::runtime_error(message), kind(std::move(kind)) {}
  std::string kind;
};

// Invalid or unsupported parameters are the caller's mistake; everything else
// is a numerical failure.
void check(mtlab_status status) {
  if (status == MTLAB_OK) return;
  const std::string message = mtlab_last_error();
  if (status == MTLAB_ERR_INVALID_ARGUMENT || status == MTLAB_ERR_DOMAIN || status == MTLAB_ERR_UNSUPPORTED)
    throw UsageError(message);
  throw NumericalFailure(mtlab_status_name(status), message);
}

struct StringFree {
  void operator()(char* p) const { mtlab_string_free(p); }
};
using CString = std::unique_ptr<char, StringFree>;

template <typename T, void (*Destroy)(T*)>
struct HandleFree {
  void operator()(T* p) const { Destroy(p); }
};
using Green = std::unique_ptr<mtlab_green, HandleFree<mtlab_green, mtlab_green_destroy>>;
using Config = std::unique_ptr<mtlab_optimizer_config, HandleFree<mtlab_optimizer_config, mtlab_optimizer_config_destroy>>;
using Result = std::unique_ptr<mtlab_opt_result, HandleFree<mtlab_opt_result, mtlab_opt_result_destroy>>;
using Profile = std::unique_ptr<mtlab_profile, HandleFree<mtlab_profile, mtlab_profile_destroy>>;

double parse_number(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    throw UsageError(flag + ": '" + text + "' is not a finite number");
  return v;
}

// Items are numbers or inclusive start:stop:step ranges.
std::vector<double> expand(const std::vector<std::string>& items, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : items) {
    const auto first = item.find(':');
    if (first == std::string::npos) {
      out.push_back(parse_number(item, flag));
      continue;
    }
    const auto second = item.find(':', first + 1);
    if (second == std::string::npos || item.find(':', second + 1) != std::string::npos)
      throw UsageError(flag + ": range must be start:stop:step, got '" + item + "'");
    const double start = parse_number(item.substr(0, first), flag);
    const double stop = parse_number(item.substr(first + 1, second - first - 1), flag);
    const double step = parse_number(item.substr(second + 1), flag);
    if (step <= 0.0 || stop < start) throw UsageError(flag + ": range needs step > 0 and stop >= start");
    const double span = (stop - start) / step;
    if (span > 1e6) throw UsageError(flag + ": range has too many points");
    const long count = static_cast<long>(std::floor(span + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

double ball_measure(int n) {
  double s = 0.0;
  check(mtlab_sphere_measure(n, &s));
  return s / n;
}

double threshold_for(int n) {
  mtlab_threshold_parts parts{};
  check(mtlab_threshold(n, 0.0, ball_measure(n), &parts));
  return parts.value;
}

void emit(const Report& report, const std::string& format, const std::string& out_path) {
  const std::string text = report.render(format);
  if (out_path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw NumericalFailure("io", "cannot write '" + out_path + "'");
}

struct Common {
  std::string format = "csv";
  std::string out;
  int workers = 0;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--out", c.out, "Write the report to this file instead of stdout");
  cmd->add_option("--workers", c.workers, "Worker threads (default: MT_LAB_WORKERS, then one per CPU)")
      ->check(CLI::NonNegativeNumber);
}

void workers_setting(Report& r, int workers) { r.setting("workers", workers > 0 ? std::to_string(workers) : "auto"); }

struct OptimizerFlags {
  std::vector<std::string> seeds{"zero", "bubble:1e-2", "bubble:1e-3"};
  std::vector<std::string> thetas{"0.7", "0.9", "0.97", "0.995", "1"};
  int knots = 400;
  double t_max = 60.0;
  double tol = 1e-7;
  int max_iter = 5000;
  std::uint64_t rng_seed = 12345;
  double delta_conc = 0.1;
};

void add_optimizer(CLI::App* cmd, OptimizerFlags& f) {
  cmd->add_option("--seeds", f.seeds, "Comma list of 'zero' and 'bubble:<eps>'")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--knots", f.knots, "Knots of the discrete profile")->capture_default_str();
  cmd->add_option("--t-max", f.t_max, "Last knot in the Moser coordinate")->capture_default_str();
  cmd->add_option("--tol", f.tol, "Gradient-norm tolerance")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration limit per seed")->capture_default_str();
  cmd->add_option("--rng-seed", f.rng_seed, "Seed for the noise in the 'zero' start")->capture_default_str();
  cmd->add_option("--delta-conc", f.delta_conc, "Radius for the concentration fraction")->capture_default_str();
}

Config build_config(const OptimizerFlags& f, int workers, bool with_thetas) {
  mtlab_optimizer_config* raw = nullptr;
  check(mtlab_optimizer_config_create(&raw));
  Config cfg(raw);
  check(mtlab_optimizer_set_knots(raw, f.knots, f.t_max));
  check(mtlab_optimizer_set_tolerance(raw, f.tol, f.max_iter));
  std::string seeds;
  for (const auto& s : f.seeds) seeds += (seeds.empty() ? "" : ",") + s;
  check(mtlab_optimizer_set_seeds(raw, seeds.c_str()));
  if (with_thetas) {
    const auto thetas = expand(f.thetas, "--thetas");
    check(mtlab_optimizer_set_thetas(raw, thetas.data(), thetas.size()));
  }
  check(mtlab_optimizer_set_rng_seed(raw, f.rng_seed));
  check(mtlab_optimizer_set_workers(raw, workers));
  check(mtlab_optimizer_set_concentration_radius(raw, f.delta_conc));
  return cfg;
}

void describe_config(Report& r, const mtlab_optimizer_config* cfg, bool with_thetas) {
  char* raw = nullptr;
  check(mtlab_optimizer_config_describe(cfg, &raw));
  CString text(raw);
  std::stringstream in(text.get());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    if (key == "thetas" && !with_thetas) continue;
    r.setting(key, line.substr(eq + 1));
  }
}

mtlab_problem make_problem(int n, int m, double lambda, double theta) {
  double alpha = 0.0;
  check(mtlab_alpha_n(n, &alpha));
  return {n, m, lambda, theta == 1.0 ? 0.0 : theta * alpha};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moser-Trudinger extremal functions on the unit ball"};
  app.set_version_flag("--version", std::string(mtlab_version()));
  app.set_config("--config", "", "Read options from a key=value file with [command] sections");
  app.require_subcommand(1);

  std::string active;
  std::function<int()> run;

  // threshold
  Common th_common;
  int th_n = 2;
  std::vector<double> th_pole;
  std::optional<double> th_mu;
  auto* th = app.add_subcommand("threshold", "Energy threshold and its components");
  th->add_option("--n", th_n, "Dimension")->capture_default_str();
  th->add_option("--pole", th_pole, "Pole x,y (n = 2 only); sets S_p")->delimiter(',')->expected(2);
  th->add_option("--mu", th_mu, "Leading measure term (default: volume of the unit ball)");
  add_common(th, th_common, "json");
  th->callback([&] {
    active = "threshold";
    run = [&] {
      if (th_n < 2) throw UsageError("--n must be >= 2");
      double s_p = 0.0;
      if (!th_pole.empty()) {
        mtlab_green* raw = nullptr;
        check(mtlab_green_create(th_n, th_pole[0], th_pole[1], &raw));
        Green g(raw);
        check(mtlab_green_s_p(raw, &s_p));
      }
      const double mu = th_mu ? *th_mu : ball_measure(th_n);
      mtlab_threshold_parts parts{};
      check(mtlab_threshold(th_n, s_p, mu, &parts));
      Report r("threshold");
      r.setting("n", th_n);
      r.setting("pole", th_pole.empty() ? std::string("0,0") : join(th_pole));
      r.setting("mu", mu);
      r.result("threshold", parts.value);
      r.result("s_p", s_p);
      r.result("mu", parts.mu);
      r.result("ball_factor", parts.ball_factor);
      r.result("harmonic", parts.harmonic);
      r.result("exp_factor", parts.exp_factor);
      emit(r, th_common.format, th_common.out);
      return 0;
    };
  });

  // identities
  Common id_common;
  int id_n_max = 12, id_m_max = 12;
  auto* id = app.add_subcommand("identities", "Exact check of the two binomial identities");
  id->add_option("--n-max", id_n_max, "Largest n for the harmonic identity (>= 2)")->capture_default_str();
  id->add_option("--m-max", id_m_max, "Largest m for the beta identity (>= 0)")->capture_default_str();
  add_common(id, id_common, "csv");
  id->callback([&] {
    active = "identities";
    run = [&] {
      if (id_n_max < 2 || id_m_max < 0) throw UsageError("--n-max must be >= 2 and --m-max >= 0");
      char* raw = nullptr;
      int all_pass = 0;
      check(mtlab_identities_csv(id_n_max, id_m_max, &raw, &all_pass));
      CString csv(raw);
      Report r("identities");
      r.setting("n_max", id_n_max);
      r.setting("m_max", id_m_max);
      r.result("all_pass", all_pass ? "1" : "0", true);
      r.table(csv.get());
      emit(r, id_common.format, id_common.out);
      return all_pass ? 0 : 1;
    };
  });

  // lemma31
  Common lm_common;
  int lm_n = 2, lm_resolution = 64;
  std::vector<double> lm_pole{0.0, 0.0};
  std::vector<std::string> lm_t{"0.5:3:0.5"};
  auto* lm = app.add_subcommand("lemma31", "Level-set integral of the Green function against its lower bound");
  lm->add_option("--n", lm_n, "Dimension")->capture_default_str();
  lm->add_option("--pole", lm_pole, "Pole x,y (off-center needs n = 2)")->delimiter(',')->expected(2);
  lm->add_option("--t", lm_t, "Green levels: list or start:stop:step")->delimiter(',');
  lm->add_option("--resolution", lm_resolution, "Starting contour resolution")->capture_default_str();
  add_common(lm, lm_common, "csv");
  lm->callback([&] {
    active = "lemma31";
    run = [&] {
      const auto t = expand(lm_t, "--t");
      mtlab_green* raw = nullptr;
      check(mtlab_green_create(lm_n, lm_pole[0], lm_pole[1], &raw));
      Green g(raw);
      char* csv_raw = nullptr;
      double rate = 0.0;
      check(mtlab_lemma31_csv(raw, t.data(), t.size(), lm_resolution, &csv_raw, &rate));
      CString csv(csv_raw);
      double s_p = 0.0;
      check(mtlab_green_s_p(raw, &s_p));
      Report r("lemma31");
      r.setting("n", lm_n);
      r.setting("pole", join(lm_pole));
      r.setting("t", join(t));
      r.setting("resolution", lm_resolution);
      r.result("s_p", s_p);
      r.result("defect_rate", rate);
      r.table(csv.get());
      emit(r, lm_common.format, lm_common.out);
      return 0;
    };
  });

  // sequence
  Common sq_common;
  int sq_n = 2, sq_m = 1;
  double sq_lambda = 1.0;
  std::vector<std::string> sq_eps{"1e-2", "1e-3", "1e-4"};
  mtlab_quadrature sq_quad{};
  mtlab_quadrature_default(&sq_quad);
  auto* sq = app.add_subcommand("sequence", "Functional along the concentrating test sequence");
  sq->add_option("--n", sq_n, "Dimension")->capture_default_str();
  sq->add_option("--m", sq_m, "Truncation order")->capture_default_str();
  sq->add_option("--lambda", sq_lambda, "Subtraction weight")->capture_default_str();
  sq->add_option("--eps", sq_eps, "Concentration scales: list or start:stop:step")->delimiter(',');
  sq->add_option("--tol", sq_quad.rel_tol, "Quadrature relative tolerance")->capture_default_str();
  sq->add_option("--t-max", sq_quad.t_max, "Quadrature cutoff past the bubble core")->capture_default_str();
  add_common(sq, sq_common, "csv");
  sq->callback([&] {
    active = "sequence";
    run = [&] {
      const auto eps = expand(sq_eps, "--eps");
      char* raw = nullptr;
      check(mtlab_excess_csv(eps.data(), eps.size(), sq_n, sq_m, sq_lambda, &sq_quad, sq_common.workers, &raw));
      CString csv(raw);
      double lead = 0.0;
      check(mtlab_leading_coefficient(sq_n, sq_m, &lead));
      Report r("sequence");
      r.setting("n", sq_n);
      r.setting("m", sq_m);
      r.setting("lambda", sq_lambda);
      r.setting("eps", join(eps));
      r.setting("tol", sq_quad.rel_tol);
      r.setting("t_max", sq_quad.t_max);
      workers_setting(r, sq_common.workers);
      r.result("threshold", threshold_for(sq_n));
      r.result("leading_coefficient", lead);
      r.table(csv.get());
      emit(r, sq_common.format, sq_common.out);
      return 0;
    };
  });

  // maximize
  Common mx_common;
  OptimizerFlags mx_flags;
  int mx_n = 2, mx_m = 1;
  double mx_lambda = 1.0, mx_theta = 1.0;
  bool mx_continuation = false;
  std::string mx_profile_out;
  auto* mx = app.add_subcommand("maximize", "Maximize the functional over unit-energy radial profiles");
  mx->add_option("--n", mx_n, "Dimension")->capture_default_str();
  mx->add_option("--m", mx_m, "Truncation order")->capture_default_str();
  mx->add_option("--lambda", mx_lambda, "Subtraction weight")->capture_default_str();
  mx->add_option("--theta", mx_theta, "Exponent as a fraction of the critical one")->capture_default_str();
  mx->add_flag("--continuation", mx_continuation, "Follow the optimum through --thetas up to the critical exponent");
  mx->add_option("--thetas", mx_flags.thetas, "Ascending exponent fractions for --continuation")->delimiter(',');
  mx->add_option("--profile-out", mx_profile_out, "Save the maximizing profile here");
  add_optimizer(mx, mx_flags);
  add_common(mx, mx_common, "csv");
  mx->callback([&] {
    active = "maximize";
    run = [&]() -> int {
      Config cfg = build_config(mx_flags, mx_common.workers, mx_continuation);
      Report r("maximize");
      r.setting("n", mx_n);
      r.setting("m", mx_m);
      r.setting("lambda", mx_lambda);
      if (!mx_continuation) r.setting("theta", mx_theta);
      r.setting("continuation", mx_continuation ? "1" : "0");
      describe_config(r, cfg.get(), mx_continuation);
      workers_setting(r, mx_common.workers);
      const double threshold = threshold_for(mx_n);
      r.result("threshold", threshold);
      if (mx_continuation) {
        const mtlab_problem problem = make_problem(mx_n, mx_m, mx_lambda, 1.0);
        char* csv_raw = nullptr;
        char* failure_raw = nullptr;
        check(mtlab_continuation_csv(cfg.get(), &problem, &csv_raw, &failure_raw));
        CString csv(csv_raw), failure(failure_raw);
        if (failure) r.result("failure", failure.get(), false);
        r.table(csv.get());
        emit(r, mx_common.format, mx_common.out);
        if (failure) {
          std::cerr << mtlab_cli::diagnostic_json("maximize", "optimization", failure.get());
          return 1;
        }
        return 0;
      }
      if (!(mx_theta > 0.0 && mx_theta <= 1.0)) throw UsageError("--theta must lie in (0, 1]");
      const mtlab_problem problem = make_problem(mx_n, mx_m, mx_lambda, mx_theta);
      mtlab_opt_result* res_raw = nullptr;
      check(mtlab_maximize(cfg.get(), &problem, &res_raw));
      Result res(res_raw);
      mtlab_opt_summary s{};
      check(mtlab_opt_result_summary(res_raw, &s));
      char* csv_raw = nullptr;
      check(mtlab_opt_result_csv(res_raw, &csv_raw));
      CString csv(csv_raw);
      r.result("excess", s.value - threshold);
      r.table(csv.get());
      if (!mx_profile_out.empty()) {
        mtlab_profile* p_raw = nullptr;
        check(mtlab_opt_result_profile(res_raw, &p_raw));
        Profile p(p_raw);
        const mtlab_status st = mtlab_profile_save(p_raw, mx_n, mx_profile_out.c_str());
        if (st != MTLAB_OK) throw NumericalFailure(mtlab_status_name(st), mtlab_last_error());
      }
      emit(r, mx_common.format, mx_common.out);
      return 0;
    };
  });

  // lambda-scan
  Common ls_common;
  OptimizerFlags ls_flags;
  int ls_n = 2, ls_m = 1;
  double ls_margin = 1e-6;
  std::vector<std::string> ls_lambda{"0", "0.5", "1", "1.5", "2", "3"};
  auto* ls = app.add_subcommand("lambda-scan", "Critical maximum over a grid of subtraction weights");
  ls->add_option("--n", ls_n, "Dimension")->capture_default_str();
  ls->add_option("--m", ls_m, "Truncation order")->capture_default_str();
  ls->add_option("--lambda", ls_lambda, "Weights: list or start:stop:step")->delimiter(',');
  ls->add_option("--margin", ls_margin, "Required excess over the threshold for the crossing")->capture_default_str();
  add_optimizer(ls, ls_flags);
  add_common(ls, ls_common, "csv");
  ls->callback([&] {
    active = "lambda-scan";
    run = [&] {
      const auto lambdas = expand(ls_lambda, "--lambda");
      Config cfg = build_config(ls_flags, ls_common.workers, false);
      char* raw = nullptr;
      double threshold = 0.0, crossing = 0.0;
      int has_crossing = 0;
      check(mtlab_lambda_scan_csv(cfg.get(), lambdas.data(), lambdas.size(), ls_n, ls_m, ls_margin, &raw, &threshold,
                                  &crossing, &has_crossing));
      CString csv(raw);
      Report r("lambda-scan");
      r.setting("n", ls_n);
      r.setting("m", ls_m);
      r.setting("lambda", join(lambdas));
      r.setting("margin", ls_margin);
      describe_config(r, cfg.get(), false);
      workers_setting(r, ls_common.workers);
      r.result("threshold", threshold);
      if (has_crossing)
        r.result("crossing", crossing);
      else
        r.result("crossing", "none", false);
      r.table(csv.get());
      emit(r, ls_common.format, ls_common.out);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "mtlab " << active << ": " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cout << mtlab_cli::diagnostic_json(active, e.kind, e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cout << mtlab_cli::diagnostic_json(active, "internal", e.what());
    return 1;
  }
}
