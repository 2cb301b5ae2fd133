#include "mtlab/mtlab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "green.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "reports.hpp"
#include "sequence.hpp"

struct mtlab_profile {
  mtlab::RadialProfile value;
};
struct mtlab_green {
  mtlab::DiskGreen value;
};
struct mtlab_sequence {
  mtlab::SequenceParams value;
};
struct mtlab_optimizer_config {
  mtlab::OptimizerConfig value;
};
struct mtlab_opt_result {
  mtlab::OptResult value;
};

namespace {

thread_local std::string g_last_error;

mtlab_status to_status(mtlab::ErrorCode code) { return static_cast<mtlab_status>(static_cast<int>(code)); }

mtlab_status record(mtlab_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body and turns any escaping exception into a status code.
template <typename Body>
mtlab_status guarded(Body&& body) noexcept {
  try {
    body();
    return MTLAB_OK;
  } catch (const mtlab::Error& e) {
    return record(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(MTLAB_ERR_NO_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return record(MTLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(MTLAB_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* ptr, const char* name) {
  if (ptr == nullptr) mtlab::fail(mtlab::ErrorCode::kInvalidArgument, std::string(name) + " must not be null");
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

mtlab::ProblemParams problem_from(const mtlab_problem* p) {
  need(p, "problem");
  return mtlab::ProblemParams::make(p->n, p->m, p->lambda, p->beta > 0.0 ? std::optional<double>(p->beta) : std::nullopt);
}

mtlab::QuadratureSpec quad_from(const mtlab_quadrature* q) {
  mtlab::QuadratureSpec spec;
  if (q != nullptr) {
    spec.rel_tol = q->rel_tol;
    spec.panel_order = q->panel_order;
    spec.max_refine = q->max_refine;
    spec.t_max = q->t_max;
  }
  spec.validate();
  return spec;
}

template <typename T>
T* adopt(T* ptr) {
  if (ptr == nullptr) throw std::bad_alloc();
  return ptr;
}

}  // namespace

extern "C" {

const char* mtlab_version(void) { return MTLAB_VERSION; }

const char* mtlab_status_name(mtlab_status status) {
  switch (status) {
    case MTLAB_OK: return "ok";
    case MTLAB_ERR_DOMAIN: return "domain";
    case MTLAB_ERR_OVERFLOW: return "overflow";
    case MTLAB_ERR_ACCURACY: return "accuracy";
    case MTLAB_ERR_DEGENERATE: return "degenerate";
    case MTLAB_ERR_CONSTRUCTION: return "construction";
    case MTLAB_ERR_OPTIMIZATION: return "optimization";
    case MTLAB_ERR_UNSUPPORTED: return "unsupported";
    case MTLAB_ERR_SINGULARITY: return "singularity";
    case MTLAB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MTLAB_ERR_IO: return "io";
    case MTLAB_ERR_NO_MEMORY: return "no_memory";
    case MTLAB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mtlab_last_error(void) { return g_last_error.c_str(); }

void mtlab_string_free(char* text) { std::free(text); }

// ---- constants -----------------------------------------------------------

mtlab_status mtlab_sphere_measure(int n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::sphere_measure(n);
  });
}

mtlab_status mtlab_alpha_n(int n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::alpha_n(n);
  });
}

mtlab_status mtlab_c_n(int n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::c_n(n);
  });
}

mtlab_status mtlab_harmonic(int k, char** out) {
  return guarded([&] {
    need(out, "out");
    *out = duplicate(mtlab::harmonic(k).str());
  });
}

mtlab_status mtlab_f_eval(const mtlab_problem* problem, double t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::f_eval(problem_from(problem), t);
  });
}

mtlab_status mtlab_f_eval_minus_one(const mtlab_problem* problem, double t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::f_eval_minus_one(problem_from(problem), t);
  });
}

mtlab_status mtlab_f_derivative(const mtlab_problem* problem, double t, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::f_derivative(problem_from(problem), t);
  });
}

mtlab_status mtlab_exp_tail(double x, int m, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::exp_tail(x, m);
  });
}

mtlab_status mtlab_identity_harmonic(int n, char** lhs, char** rhs, int* equal) {
  return guarded([&] {
    need(lhs, "lhs");
    need(rhs, "rhs");
    need(equal, "equal");
    const auto [l, r] = mtlab::verify_identity_harmonic(n);
    char* a = duplicate(l.str());
    try {
      *rhs = duplicate(r.str());
    } catch (...) {
      std::free(a);
      throw;
    }
    *lhs = a;
    *equal = l == r ? 1 : 0;
  });
}

mtlab_status mtlab_identity_beta(int m, char** lhs, char** rhs, int* equal) {
  return guarded([&] {
    need(lhs, "lhs");
    need(rhs, "rhs");
    need(equal, "equal");
    const auto [l, r] = mtlab::verify_identity_beta(m);
    char* a = duplicate(l.str());
    try {
      *rhs = duplicate(r.str());
    } catch (...) {
      std::free(a);
      throw;
    }
    *lhs = a;
    *equal = l == r ? 1 : 0;
  });
}

mtlab_status mtlab_identities_csv(int n_max, int m_max, char** csv, int* all_pass) {
  return guarded([&] {
    need(csv, "csv");
    const auto table = mtlab::identities_csv(n_max, m_max);
    *csv = duplicate(table.csv);
    if (all_pass != nullptr) *all_pass = table.all_pass ? 1 : 0;
  });
}

mtlab_status mtlab_threshold(int n, double s_p, double mu, mtlab_threshold_parts* out) {
  return guarded([&] {
    need(out, "out");
    const auto parts = mtlab::threshold_parts(n, s_p, mu);
    *out = {parts.value, parts.mu, parts.ball_factor, parts.harmonic, parts.exp_factor};
  });
}

void mtlab_quadrature_default(mtlab_quadrature* out) {
  if (out == nullptr) return;
  const mtlab::QuadratureSpec spec;
  *out = {spec.rel_tol, spec.panel_order, spec.max_refine, spec.t_max};
}

// ---- profiles ------------------------------------------------------------

mtlab_status mtlab_profile_create(const double* knots, const double* values, size_t count, mtlab_profile** out) {
  return guarded([&] {
    need(knots, "knots");
    need(values, "values");
    need(out, "out");
    mtlab::RadialProfile p(std::vector<double>(knots, knots + count), std::vector<double>(values, values + count));
    *out = adopt(new (std::nothrow) mtlab_profile{std::move(p)});
  });
}

void mtlab_profile_destroy(mtlab_profile* profile) { delete profile; }

size_t mtlab_profile_size(const mtlab_profile* profile) { return profile == nullptr ? 0 : profile->value.size(); }

mtlab_status mtlab_profile_data(const mtlab_profile* profile, double* knots, double* values) {
  return guarded([&] {
    need(profile, "profile");
    const auto k = profile->value.knots();
    const auto v = profile->value.values();
    if (knots != nullptr) std::copy(k.begin(), k.end(), knots);
    if (values != nullptr) std::copy(v.begin(), v.end(), values);
  });
}

mtlab_status mtlab_profile_energy(const mtlab_profile* profile, int n, double* out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    *out = mtlab::dirichlet_energy(profile->value, n);
  });
}

mtlab_status mtlab_profile_normalize(const mtlab_profile* profile, int n, mtlab_profile** out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    *out = adopt(new (std::nothrow) mtlab_profile{mtlab::normalize(profile->value, n)});
  });
}

mtlab_status mtlab_profile_functional(const mtlab_profile* profile, const mtlab_problem* problem,
                                      const mtlab_quadrature* quad, double* out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    *out = mtlab::functional_value(profile->value, problem_from(problem), quad_from(quad));
  });
}

mtlab_status mtlab_profile_report(const mtlab_profile* profile, const mtlab_problem* problem,
                                  const mtlab_quadrature* quad, double delta_conc, mtlab_eval_report* out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    const auto r = mtlab::eval_report(profile->value, problem_from(problem), quad_from(quad), delta_conc);
    *out = {r.energy, r.value, r.peak, r.conc_fraction};
  });
}

mtlab_status mtlab_profile_objective(const mtlab_profile* profile, const mtlab_problem* problem,
                                     const mtlab_quadrature* quad, double* value, double* gradient) {
  return guarded([&] {
    need(profile, "profile");
    const auto r = mtlab::objective_and_gradient(profile->value, problem_from(problem), quad_from(quad));
    if (value != nullptr) *value = r.value;
    if (gradient != nullptr) std::copy(r.gradient.begin(), r.gradient.end(), gradient);
  });
}

mtlab_status mtlab_profile_save(const mtlab_profile* profile, int n, const char* path) {
  return guarded([&] {
    need(profile, "profile");
    need(path, "path");
    std::ofstream out(path);
    if (!out) mtlab::fail(mtlab::ErrorCode::kIo, std::string("cannot open '") + path + "' for writing");
    mtlab::write_profile(out, profile->value, n);
    out.close();
    if (!out) mtlab::fail(mtlab::ErrorCode::kIo, std::string("write to '") + path + "' failed");
  });
}

mtlab_status mtlab_profile_load(const char* path, mtlab_profile** out, int* n) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path);
    if (!in) mtlab::fail(mtlab::ErrorCode::kIo, std::string("cannot open '") + path + "'");
    auto loaded = mtlab::read_profile(in);
    *out = adopt(new (std::nothrow) mtlab_profile{std::move(loaded.profile)});
    if (n != nullptr) *n = loaded.n;
  });
}

mtlab_status mtlab_profile_to_string(const mtlab_profile* profile, int n, char** out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    std::ostringstream text;
    mtlab::write_profile(text, profile->value, n);
    *out = duplicate(text.str());
  });
}

mtlab_status mtlab_profile_from_string(const char* text, mtlab_profile** out, int* n) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    std::istringstream in(text);
    auto loaded = mtlab::read_profile(in);
    *out = adopt(new (std::nothrow) mtlab_profile{std::move(loaded.profile)});
    if (n != nullptr) *n = loaded.n;
  });
}

// ---- Green function ------------------------------------------------------

mtlab_status mtlab_green_create(int n, double px, double py, mtlab_green** out) {
  return guarded([&] {
    need(out, "out");
    *out = adopt(new (std::nothrow) mtlab_green{mtlab::DiskGreen::make(n, {px, py})});
  });
}

void mtlab_green_destroy(mtlab_green* green) { delete green; }

mtlab_status mtlab_green_s_p(const mtlab_green* green, double* out) {
  return guarded([&] {
    need(green, "green");
    need(out, "out");
    *out = green->value.s_p();
  });
}

mtlab_status mtlab_green_value(const mtlab_green* green, double x, double y, double* out) {
  return guarded([&] {
    need(green, "green");
    need(out, "out");
    *out = green->value.value({x, y});
  });
}

mtlab_status mtlab_green_level_set_integral(const mtlab_green* green, double t, int resolution, double* out) {
  return guarded([&] {
    need(green, "green");
    need(out, "out");
    *out = mtlab::level_set_integral(green->value, t, resolution > 0 ? resolution : mtlab::kDefaultContourResolution);
  });
}

mtlab_status mtlab_green_measure(const mtlab_green* green, double t, double* out) {
  return guarded([&] {
    need(green, "green");
    need(out, "out");
    *out = mtlab::measure_At(green->value, t);
  });
}

mtlab_status mtlab_lemma31_csv(const mtlab_green* green, const double* t, size_t count, int resolution, char** csv,
                               double* rate) {
  return guarded([&] {
    need(green, "green");
    need(t, "t");
    need(csv, "csv");
    const auto rows = mtlab::lemma31_report(green->value, std::vector<double>(t, t + count),
                                            resolution > 0 ? resolution : mtlab::kDefaultContourResolution);
    *csv = duplicate(mtlab::lemma31_csv(rows));
    if (rate != nullptr) *rate = mtlab::defect_rate(rows);
  });
}

// ---- test sequence -------------------------------------------------------

mtlab_status mtlab_sequence_build(double eps, int n, int m, mtlab_sequence** out) {
  return guarded([&] {
    need(out, "out");
    *out = adopt(new (std::nothrow) mtlab_sequence{mtlab::build_params(eps, n, m)});
  });
}

void mtlab_sequence_destroy(mtlab_sequence* sequence) { delete sequence; }

mtlab_status mtlab_sequence_params_get(const mtlab_sequence* sequence, mtlab_sequence_params* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    const auto& p = sequence->value;
    *out = {p.eps, p.L, p.C, p.Lambda, p.t0, p.n, p.m, p.C_asymptotic, p.lambda_defect};
  });
}

mtlab_status mtlab_sequence_value(const mtlab_sequence* sequence, double r, double* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    *out = mtlab::u_eps_value(sequence->value, r);
  });
}

mtlab_status mtlab_sequence_energy(const mtlab_sequence* sequence, double* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    *out = mtlab::energy_closed_form(sequence->value);
  });
}

mtlab_status mtlab_sequence_continuity_residual(const mtlab_sequence* sequence, double* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    *out = mtlab::continuity_residual(sequence->value);
  });
}

mtlab_status mtlab_sequence_functional(const mtlab_sequence* sequence, const mtlab_problem* problem,
                                       const mtlab_quadrature* quad, double* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    *out = mtlab::sequence_functional(sequence->value, problem_from(problem), quad_from(quad));
  });
}

mtlab_status mtlab_sequence_profile(const mtlab_sequence* sequence, int knot_count, double t_max,
                                    mtlab_profile** out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    const auto knots = mtlab::sequence_knots(sequence->value, knot_count, t_max);
    *out = adopt(new (std::nothrow) mtlab_profile{mtlab::sequence_profile(sequence->value, knots)});
  });
}

mtlab_status mtlab_asymptotic_C(double eps, int n, double s_p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::asymptotic_C(eps, n, s_p);
  });
}

mtlab_status mtlab_leading_coefficient(int n, int m, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = mtlab::leading_coefficient(n, m);
  });
}

mtlab_status mtlab_excess_csv(const double* eps, size_t count, int n, int m, double lambda,
                              const mtlab_quadrature* quad, int workers, char** csv) {
  return guarded([&] {
    need(eps, "eps");
    need(csv, "csv");
    const auto rows = mtlab::excess_report(std::vector<double>(eps, eps + count), n, m, quad_from(quad), lambda,
                                           mtlab::resolve_workers(workers));
    *csv = duplicate(mtlab::excess_csv(rows));
  });
}

// ---- optimizer -----------------------------------------------------------

mtlab_status mtlab_optimizer_config_create(mtlab_optimizer_config** out) {
  return guarded([&] {
    need(out, "out");
    auto* cfg = adopt(new (std::nothrow) mtlab_optimizer_config{});
    cfg->value.workers = 0;
    *out = cfg;
  });
}

void mtlab_optimizer_config_destroy(mtlab_optimizer_config* config) { delete config; }

mtlab_status mtlab_optimizer_set_knots(mtlab_optimizer_config* config, int knot_count, double t_max) {
  return guarded([&] {
    need(config, "config");
    auto next = config->value;
    next.knot_count = knot_count;
    next.t_max = t_max;
    next.validate();
    config->value = std::move(next);
  });
}

mtlab_status mtlab_optimizer_set_tolerance(mtlab_optimizer_config* config, double grad_tol, int max_iter) {
  return guarded([&] {
    need(config, "config");
    auto next = config->value;
    next.grad_tol = grad_tol;
    next.max_iter = max_iter;
    next.validate();
    config->value = std::move(next);
  });
}

mtlab_status mtlab_optimizer_set_seeds(mtlab_optimizer_config* config, const char* seeds) {
  return guarded([&] {
    need(config, "config");
    need(seeds, "seeds");
    std::vector<mtlab::SeedSpec> parsed;
    std::stringstream in(seeds);
    std::string item;
    while (std::getline(in, item, ',')) parsed.push_back(mtlab::SeedSpec::parse(item));
    auto next = config->value;
    next.seeds = std::move(parsed);
    next.validate();
    config->value = std::move(next);
  });
}

mtlab_status mtlab_optimizer_set_thetas(mtlab_optimizer_config* config, const double* thetas, size_t count) {
  return guarded([&] {
    need(config, "config");
    need(thetas, "thetas");
    auto next = config->value;
    next.thetas.assign(thetas, thetas + count);
    next.validate();
    config->value = std::move(next);
  });
}

mtlab_status mtlab_optimizer_set_rng_seed(mtlab_optimizer_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->value.rng_seed = seed;
  });
}

mtlab_status mtlab_optimizer_set_workers(mtlab_optimizer_config* config, int workers) {
  return guarded([&] {
    need(config, "config");
    config->value.workers = workers > 0 ? workers : 0;
  });
}

mtlab_status mtlab_optimizer_set_concentration_radius(mtlab_optimizer_config* config, double delta) {
  return guarded([&] {
    need(config, "config");
    mtlab::require(delta > 0.0 && delta < 1.0, mtlab::ErrorCode::kInvalidArgument,
                   "concentration radius must lie in (0, 1)");
    config->value.delta_conc = delta;
  });
}

mtlab_status mtlab_optimizer_config_describe(const mtlab_optimizer_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    const auto& c = config->value;
    std::ostringstream text;
    text << "knots=" << c.knot_count << '\n'
         << "t_max=" << mtlab::format_number(c.t_max) << '\n'
         << "grad_tol=" << mtlab::format_number(c.grad_tol) << '\n'
         << "max_iter=" << c.max_iter << '\n'
         << "seeds=";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) text << (i ? "," : "") << c.seeds[i].label();
    text << "\nthetas=";
    for (std::size_t i = 0; i < c.thetas.size(); ++i) text << (i ? "," : "") << mtlab::format_number(c.thetas[i]);
    text << "\nrng_seed=" << c.rng_seed << '\n'
         << "panel_order=" << c.panel_order << '\n'
         << "delta_conc=" << mtlab::format_number(c.delta_conc) << '\n';
    *out = duplicate(text.str());
  });
}

namespace {

mtlab::OptimizerConfig resolved(const mtlab_optimizer_config* config) {
  need(config, "config");
  auto c = config->value;
  c.workers = mtlab::resolve_workers(c.workers);
  c.validate();
  return c;
}

}  // namespace

mtlab_status mtlab_maximize(const mtlab_optimizer_config* config, const mtlab_problem* problem,
                            mtlab_opt_result** out) {
  return guarded([&] {
    need(out, "out");
    auto result = mtlab::maximize(resolved(config), problem_from(problem));
    *out = adopt(new (std::nothrow) mtlab_opt_result{std::move(result)});
  });
}

void mtlab_opt_result_destroy(mtlab_opt_result* result) { delete result; }

mtlab_status mtlab_opt_result_summary(const mtlab_opt_result* result, mtlab_opt_summary* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    const auto& r = result->value;
    *out = {r.value, r.grad_norm, r.iterations, r.peak, r.conc_fraction, r.converged ? 1 : 0};
  });
}

const char* mtlab_opt_result_seed(const mtlab_opt_result* result) {
  return result == nullptr ? "" : result->value.seed.c_str();
}

mtlab_status mtlab_opt_result_profile(const mtlab_opt_result* result, mtlab_profile** out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    *out = adopt(new (std::nothrow) mtlab_profile{result->value.profile});
  });
}

mtlab_status mtlab_opt_result_csv(const mtlab_opt_result* result, char** csv) {
  return guarded([&] {
    need(result, "result");
    need(csv, "csv");
    *csv = duplicate(mtlab::opt_result_csv(result->value));
  });
}

mtlab_status mtlab_continuation_csv(const mtlab_optimizer_config* config, const mtlab_problem* problem, char** csv,
                                    char** failure) {
  return guarded([&] {
    need(csv, "csv");
    const auto result = mtlab::continuation(resolved(config), problem_from(problem));
    char* table = duplicate(mtlab::continuation_csv(result));
    if (failure != nullptr) {
      try {
        *failure = result.failure ? duplicate(*result.failure) : nullptr;
      } catch (...) {
        std::free(table);
        throw;
      }
    }
    *csv = table;
  });
}

mtlab_status mtlab_lambda_scan_csv(const mtlab_optimizer_config* config, const double* lambdas, size_t count, int n,
                                   int m, double margin, char** csv, double* threshold, double* crossing,
                                   int* has_crossing) {
  return guarded([&] {
    need(lambdas, "lambdas");
    need(csv, "csv");
    const auto scan = mtlab::lambda_scan(std::vector<double>(lambdas, lambdas + count), resolved(config), n, m, margin);
    *csv = duplicate(mtlab::lambda_scan_csv(scan));
    if (threshold != nullptr) *threshold = scan.threshold;
    if (has_crossing != nullptr) *has_crossing = scan.crossing ? 1 : 0;
    if (crossing != nullptr) *crossing = scan.crossing.value_or(std::nan(""));
  });
}

}  // extern "C"
