/*
 * mtlab: Moser-Trudinger extremal functions on the unit ball.
 *
 * Plain C interface. Objects are opaque handles released with their
 * *_destroy function; strings returned through char** are owned by the
 * caller and released with mtlab_string_free. Every fallible call returns
 * an mtlab_status; on failure mtlab_last_error() describes the cause for
 * the calling thread until its next failing call.
 */
#ifndef MTLAB_MTLAB_H
#define MTLAB_MTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MTLAB_BUILDING_LIBRARY)
#    define MTLAB_API __declspec(dllexport)
#  else
#    define MTLAB_API __declspec(dllimport)
#  endif
#else
#  define MTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtlab_status {
  MTLAB_OK = 0,
  MTLAB_ERR_DOMAIN = 1,
  MTLAB_ERR_OVERFLOW = 2,
  MTLAB_ERR_ACCURACY = 3,
  MTLAB_ERR_DEGENERATE = 4,
  MTLAB_ERR_CONSTRUCTION = 5,
  MTLAB_ERR_OPTIMIZATION = 6,
  MTLAB_ERR_UNSUPPORTED = 7,
  MTLAB_ERR_SINGULARITY = 8,
  MTLAB_ERR_INVALID_ARGUMENT = 9,
  MTLAB_ERR_IO = 10,
  MTLAB_ERR_NO_MEMORY = 11,
  MTLAB_ERR_INTERNAL = 99
} mtlab_status;

MTLAB_API const char* mtlab_version(void);
/* Stable lower-case name such as "domain" or "accuracy". */
MTLAB_API const char* mtlab_status_name(mtlab_status status);
MTLAB_API const char* mtlab_last_error(void);
MTLAB_API void mtlab_string_free(char* text);

/* ---- constants and the integrand F ---------------------------------- */

MTLAB_API mtlab_status mtlab_sphere_measure(int n, double* out);
MTLAB_API mtlab_status mtlab_alpha_n(int n, double* out);
MTLAB_API mtlab_status mtlab_c_n(int n, double* out);
/* H_k as an exact fraction "p/q". */
MTLAB_API mtlab_status mtlab_harmonic(int k, char** out);

/* beta <= 0 selects the critical exponent alpha_n. */
typedef struct mtlab_problem {
  int n;
  int m;
  double lambda;
  double beta;
} mtlab_problem;

MTLAB_API mtlab_status mtlab_f_eval(const mtlab_problem* problem, double t, double* out);
MTLAB_API mtlab_status mtlab_f_eval_minus_one(const mtlab_problem* problem, double t, double* out);
MTLAB_API mtlab_status mtlab_f_derivative(const mtlab_problem* problem, double t, double* out);
MTLAB_API mtlab_status mtlab_exp_tail(double x, int m, double* out);

/* Exact sides of the two combinatorial identities; *equal is 1 when they agree. */
MTLAB_API mtlab_status mtlab_identity_harmonic(int n, char** lhs, char** rhs, int* equal);
MTLAB_API mtlab_status mtlab_identity_beta(int m, char** lhs, char** rhs, int* equal);
/* CSV "identity,index,lhs,rhs,pass" for n = 2..n_max and m = 0..m_max. */
MTLAB_API mtlab_status mtlab_identities_csv(int n_max, int m_max, char** csv, int* all_pass);

typedef struct mtlab_threshold_parts {
  double value;
  double mu;
  double ball_factor;
  double harmonic;
  double exp_factor;
} mtlab_threshold_parts;

MTLAB_API mtlab_status mtlab_threshold(int n, double s_p, double mu, mtlab_threshold_parts* out);

/* ---- quadrature ------------------------------------------------------ */

typedef struct mtlab_quadrature {
  double rel_tol;
  int panel_order;
  int max_refine;
  double t_max;
} mtlab_quadrature;

MTLAB_API void mtlab_quadrature_default(mtlab_quadrature* out);

/* ---- radial profiles ------------------------------------------------- */

typedef struct mtlab_profile mtlab_profile;

typedef struct mtlab_eval_report {
  double energy;
  double value;
  double peak;
  double conc_fraction;
} mtlab_eval_report;

/* Knots in the Moser coordinate t = -n log r, knots[0] = 0, values[0] = 0. */
MTLAB_API mtlab_status mtlab_profile_create(const double* knots, const double* values, size_t count,
                                            mtlab_profile** out);
MTLAB_API void mtlab_profile_destroy(mtlab_profile* profile);
MTLAB_API size_t mtlab_profile_size(const mtlab_profile* profile);
/* Copies mtlab_profile_size() entries into each non-null buffer. */
MTLAB_API mtlab_status mtlab_profile_data(const mtlab_profile* profile, double* knots, double* values);
MTLAB_API mtlab_status mtlab_profile_energy(const mtlab_profile* profile, int n, double* out);
MTLAB_API mtlab_status mtlab_profile_normalize(const mtlab_profile* profile, int n, mtlab_profile** out);
MTLAB_API mtlab_status mtlab_profile_functional(const mtlab_profile* profile, const mtlab_problem* problem,
                                                const mtlab_quadrature* quad, double* out);
MTLAB_API mtlab_status mtlab_profile_report(const mtlab_profile* profile, const mtlab_problem* problem,
                                            const mtlab_quadrature* quad, double delta_conc,
                                            mtlab_eval_report* out);
/* Scale-invariant objective and its gradient (gradient has size() entries, may be null). */
MTLAB_API mtlab_status mtlab_profile_objective(const mtlab_profile* profile, const mtlab_problem* problem,
                                               const mtlab_quadrature* quad, double* value, double* gradient);
MTLAB_API mtlab_status mtlab_profile_save(const mtlab_profile* profile, int n, const char* path);
MTLAB_API mtlab_status mtlab_profile_load(const char* path, mtlab_profile** out, int* n);
MTLAB_API mtlab_status mtlab_profile_to_string(const mtlab_profile* profile, int n, char** out);
MTLAB_API mtlab_status mtlab_profile_from_string(const char* text, mtlab_profile** out, int* n);

/* ---- Green function -------------------------------------------------- */

typedef struct mtlab_green mtlab_green;

/* Off-center poles are supported for n = 2 only. */
MTLAB_API mtlab_status mtlab_green_create(int n, double px, double py, mtlab_green** out);
MTLAB_API void mtlab_green_destroy(mtlab_green* green);
MTLAB_API mtlab_status mtlab_green_s_p(const mtlab_green* green, double* out);
MTLAB_API mtlab_status mtlab_green_value(const mtlab_green* green, double x, double y, double* out);
/* resolution <= 0 selects the default starting resolution. */
MTLAB_API mtlab_status mtlab_green_level_set_integral(const mtlab_green* green, double t, int resolution,
                                                      double* out);
MTLAB_API mtlab_status mtlab_green_measure(const mtlab_green* green, double t, double* out);
/* CSV "t,lhs,rhs,ratio,defect_scaled"; *rate (nullable) receives the fitted decay
 * rate of the defect, NaN when it cannot be resolved. */
MTLAB_API mtlab_status mtlab_lemma31_csv(const mtlab_green* green, const double* t, size_t count, int resolution,
                                         char** csv, double* rate);

/* ---- concentrating test sequence ------------------------------------- */

typedef struct mtlab_sequence mtlab_sequence;

typedef struct mtlab_sequence_params {
  double eps;
  double L;
  double C;
  double Lambda;
  double t0;
  int n;
  int m;
  double C_asymptotic;
  double lambda_defect;
} mtlab_sequence_params;

MTLAB_API mtlab_status mtlab_sequence_build(double eps, int n, int m, mtlab_sequence** out);
MTLAB_API void mtlab_sequence_destroy(mtlab_sequence* sequence);
MTLAB_API mtlab_status mtlab_sequence_params_get(const mtlab_sequence* sequence, mtlab_sequence_params* out);
MTLAB_API mtlab_status mtlab_sequence_value(const mtlab_sequence* sequence, double r, double* out);
MTLAB_API mtlab_status mtlab_sequence_energy(const mtlab_sequence* sequence, double* out);
MTLAB_API mtlab_status mtlab_sequence_continuity_residual(const mtlab_sequence* sequence, double* out);
MTLAB_API mtlab_status mtlab_sequence_functional(const mtlab_sequence* sequence, const mtlab_problem* problem,
                                                 const mtlab_quadrature* quad, double* out);
MTLAB_API mtlab_status mtlab_sequence_profile(const mtlab_sequence* sequence, int knot_count, double t_max,
                                              mtlab_profile** out);
MTLAB_API mtlab_status mtlab_asymptotic_C(double eps, int n, double s_p, double* out);
MTLAB_API mtlab_status mtlab_leading_coefficient(int n, int m, double* out);
/* CSV "eps,L,C,Lambda,value,excess,scaled_excess". workers <= 0 resolves automatically. */
MTLAB_API mtlab_status mtlab_excess_csv(const double* eps, size_t count, int n, int m, double lambda,
                                        const mtlab_quadrature* quad, int workers, char** csv);

/* ---- optimizer ------------------------------------------------------- */

typedef struct mtlab_optimizer_config mtlab_optimizer_config;
typedef struct mtlab_opt_result mtlab_opt_result;

typedef struct mtlab_opt_summary {
  double value;
  double grad_norm;
  int iterations;
  double peak;
  double conc_fraction;
  int converged;
} mtlab_opt_summary;

MTLAB_API mtlab_status mtlab_optimizer_config_create(mtlab_optimizer_config** out);
MTLAB_API void mtlab_optimizer_config_destroy(mtlab_optimizer_config* config);
MTLAB_API mtlab_status mtlab_optimizer_set_knots(mtlab_optimizer_config* config, int knot_count, double t_max);
MTLAB_API mtlab_status mtlab_optimizer_set_tolerance(mtlab_optimizer_config* config, double grad_tol,
                                                     int max_iter);
/* Comma-separated list of "zero" and "bubble:<eps>". */
MTLAB_API mtlab_status mtlab_optimizer_set_seeds(mtlab_optimizer_config* config, const char* seeds);
MTLAB_API mtlab_status mtlab_optimizer_set_thetas(mtlab_optimizer_config* config, const double* thetas,
                                                  size_t count);
MTLAB_API mtlab_status mtlab_optimizer_set_rng_seed(mtlab_optimizer_config* config, uint64_t seed);
/* workers <= 0 resolves from MT_LAB_WORKERS, then the hardware. */
MTLAB_API mtlab_status mtlab_optimizer_set_workers(mtlab_optimizer_config* config, int workers);
MTLAB_API mtlab_status mtlab_optimizer_set_concentration_radius(mtlab_optimizer_config* config, double delta);
/* Canonical "key=value" lines describing the resolved configuration. */
MTLAB_API mtlab_status mtlab_optimizer_config_describe(const mtlab_optimizer_config* config, char** out);

MTLAB_API mtlab_status mtlab_maximize(const mtlab_optimizer_config* config, const mtlab_problem* problem,
                                      mtlab_opt_result** out);
MTLAB_API void mtlab_opt_result_destroy(mtlab_opt_result* result);
MTLAB_API mtlab_status mtlab_opt_result_summary(const mtlab_opt_result* result, mtlab_opt_summary* out);
/* Label of the winning seed; valid while the result lives. */
MTLAB_API const char* mtlab_opt_result_seed(const mtlab_opt_result* result);
MTLAB_API mtlab_status mtlab_opt_result_profile(const mtlab_opt_result* result, mtlab_profile** out);
/* CSV "seed,value,grad_norm,iterations,peak,conc_fraction,converged". */
MTLAB_API mtlab_status mtlab_opt_result_csv(const mtlab_opt_result* result, char** csv);

/* CSV "theta,value,peak,conc_fraction,grad_norm,iterations,converged" over the
 * configured thetas (beta in the problem is ignored). When a stage fails the
 * completed stages are still returned and *failure (nullable) receives the
 * diagnostic; otherwise *failure is set to NULL. */
MTLAB_API mtlab_status mtlab_continuation_csv(const mtlab_optimizer_config* config, const mtlab_problem* problem,
                                              char** csv, char** failure);

/* CSV "lambda,value,excess,peak,conc_fraction,converged". *has_crossing is 1 when
 * some lambda beats the threshold by margin; *crossing is then the largest one. */
MTLAB_API mtlab_status mtlab_lambda_scan_csv(const mtlab_optimizer_config* config, const double* lambdas,
                                             size_t count, int n, int m, double margin, char** csv,
                                             double* threshold, double* crossing, int* has_crossing);

#ifdef __cplusplus
}
#endif

#endif /* MTLAB_MTLAB_H */
