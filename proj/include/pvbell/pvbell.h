/* Copyright 2026 the pvbell authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* pvbell: Monte Carlo estimation of the probability of violation of local
 * realism for multipartite qudit states under Haar-random projective
 * measurements.
 *
 * Every function returns a pvb_status; on failure pvb_last_error() carries a
 * human-readable message (thread-local).  Objects returned through pvb_state
 * handles are immutable and must be released with pvb_state_free().  All
 * estimation entry points are deterministic for a fixed (state, settings,
 * seed, trials), independent of the worker count.
 */

#ifndef PVBELL_PVBELL_H_
#define PVBELL_PVBELL_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef PVB_API
#if defined(_WIN32)
#define PVB_API __declspec(dllexport)
#else
#define PVB_API __attribute__((visibility("default")))
#endif
#endif

typedef enum pvb_status {
  PVB_OK = 0,
  PVB_ERR_INVALID_ARGUMENT = 1,
  PVB_ERR_CAP_EXCEEDED = 2,
  PVB_ERR_PARSE = 3,
  PVB_ERR_IO = 4,
  PVB_ERR_VALIDATION = 5,
  PVB_ERR_SOLVER = 6,
  PVB_ERR_CHECKPOINT = 7,
  PVB_ERR_INTERNAL = 8
} pvb_status;

PVB_API const char* pvb_version(void);
PVB_API const char* pvb_status_name(pvb_status status);
/* Message for the most recent failure on this thread. */
PVB_API const char* pvb_last_error(void);

/* --- quantum states ---------------------------------------------------- */

typedef struct pvb_state pvb_state;

/* Generalized GHZ: d=2 gives sin(a)|0..0> + cos(a)|1..1>, d=3 gives
 * sin(a)|0..0> + cos(a)/sqrt(2)(|1..1> + |2..2>); alpha in [0, pi/2]. */
PVB_API pvb_status pvb_state_ghz(int num_parties, int local_dim, double alpha,
                                 pvb_state** out);
/* N-qubit Dicke state with e excitations (e=1 is the W state). */
PVB_API pvb_status pvb_state_dicke(int num_parties, int excitations,
                                   pvb_state** out);
/* cos(theta)|111> + sin(theta)|W3>. */
PVB_API pvb_status pvb_state_psi3(double theta, pvb_state** out);
/* Catalog entries: "singlet4", "cluster4", "aharonov3", "qutrit_dicke_q1",
 * "qutrit_dicke_q2", "qutrit_dicke_q3", "smolin4", "werner2". */
PVB_API pvb_status pvb_state_named(const char* name, pvb_state** out);
/* |0...0> on the given parties. */
PVB_API pvb_status pvb_state_zero(int num_parties, int local_dim,
                                  pvb_state** out);
/* Haar-random pure state (normalized complex Gaussian vector). */
PVB_API pvb_status pvb_state_random(int num_parties, int local_dim,
                                    uint64_t seed, pvb_state** out);
/* Kronecker product (matching local dimensions). */
PVB_API pvb_status pvb_state_tensor(const pvb_state* a, const pvb_state* b,
                                    pvb_state** out);
/* Convex mixture; weights must be nonnegative and sum to 1. */
PVB_API pvb_status pvb_state_mix(const pvb_state* const* states,
                                 const double* weights, size_t count,
                                 pvb_state** out);
/* Density-matrix text file: line 1 "N d", then d^N rows of d^N complex
 * entries written re+imj; '#' starts a comment.  Validates Hermiticity,
 * unit trace and positive semidefiniteness. */
PVB_API pvb_status pvb_state_load(const char* path, pvb_state** out);
PVB_API void pvb_state_free(pvb_state* state);

PVB_API int pvb_state_num_parties(const pvb_state* state);
PVB_API int pvb_state_local_dim(const pvb_state* state);
/* Canonical description, e.g. "ghz(n=2,d=2,alpha=0.785...)". */
PVB_API pvb_status pvb_state_describe(const pvb_state* state, char* buffer,
                                      size_t size);

/* --- estimation ---------------------------------------------------------- */

typedef struct pvb_run_options {
  uint64_t trials;
  uint64_t seed;
  int identical_mode; /* 0: independent draws; 1: same bases for all parties */
  double tolerance;   /* phase-1 feasibility tolerance; <= 0 selects 1e-8 */
  int workers;        /* <= 0 selects the hardware concurrency */
  uint64_t strategy_cap;        /* 0 selects the default 1e7 */
  const char* checkpoint_path;  /* NULL: no checkpointing */
  uint64_t checkpoint_interval; /* trials between checkpoints; 0: 65536 */
  int require_checkpoint;       /* fail instead of starting fresh */
  uint64_t stop_after; /* stop near this many trials (testing hook); 0: off */
} pvb_run_options;

PVB_API void pvb_run_options_init(pvb_run_options* options);

typedef struct pvb_estimate {
  uint64_t trials;    /* requested budget */
  uint64_t completed; /* == trials unless interrupted */
  uint64_t violations;
  uint64_t solver_failures;
  double p_hat;
  double ci_low;  /* 95% Wilson interval */
  double ci_high;
  uint64_t seed;
  double wall_time_s;
  int interrupted;
} pvb_estimate;

/* Estimates the probability of violation of local realism for the state
 * under Haar-random measurements, with settings[i] observables for party i.
 * An existing checkpoint resumes the run; interruption (pvb_request_interrupt
 * or stop_after) checkpoints and returns with interrupted = 1. */
PVB_API pvb_status pvb_estimate_pv(const pvb_state* state, const int* settings,
                                   int num_parties,
                                   const pvb_run_options* options,
                                   pvb_estimate* out);

/* Wilson score interval; only level 0.95 (z = 1.959964) is supported. */
PVB_API pvb_status pvb_wilson_ci(uint64_t violations, uint64_t trials,
                                 double level, double* low, double* high);

/* Cooperative cancellation for running estimates in this process.
 * Async-signal-safe. */
PVB_API void pvb_request_interrupt(void);
PVB_API void pvb_clear_interrupt(void);
PVB_API int pvb_interrupt_requested(void);

/* --- analysis ------------------------------------------------------------ */

typedef struct pvb_fit_result {
  double a;
  double b;
  double residual_rms;
  int points_used;
  int points_excluded;
} pvb_fit_result;

/* Fits p_v(x) = 1 - a e^{-bx} through log(1-p_v); x_is_product only labels
 * whether x counts one party's settings (0) or their product (1). */
PVB_API pvb_status pvb_fit_exponential(const double* x, const double* pv,
                                       size_t count, int x_is_product,
                                       pvb_fit_result* out);

typedef struct pvb_witness_report {
  int witnessed;    /* 1 iff ci_low > 2(pi-3); never "not entangled" */
  double threshold; /* 2(pi-3) */
  double margin;    /* ci_low - threshold */
} pvb_witness_report;

/* Genuine-multipartite-entanglement witness for a 3-qubit 2x2x2 estimate. */
PVB_API pvb_status pvb_gme_witness(const pvb_estimate* estimate,
                                   const int* settings, int num_parties,
                                   int local_dim, pvb_witness_report* out);

typedef struct pvb_mult_report {
  int pass;
  double product;    /* (1-p_a)(1-p_b) */
  double observed;   /* 1-p_ab */
  double difference;
  double tolerance;  /* propagated 95% bound */
} pvb_mult_report;

PVB_API pvb_status pvb_multiplicativity_check(const pvb_estimate* p_a,
                                              const pvb_estimate* p_b,
                                              const pvb_estimate* p_ab,
                                              pvb_mult_report* out);

typedef enum pvb_scan_family {
  PVB_SCAN_QUBIT_GHZ = 0,
  PVB_SCAN_QUTRIT_GHZ = 1,
  PVB_SCAN_PSI3 = 2
} pvb_scan_family;

/* One estimate per grid angle (radians); out_array needs `count` slots.
 * Grid points share the seed (common random numbers). */
PVB_API pvb_status pvb_scan_alpha(pvb_scan_family family,
                                  const double* alphas_rad, size_t count,
                                  const int* settings, int num_parties,
                                  const pvb_run_options* options,
                                  pvb_estimate* out_array);

/* --- CHSH(alpha) algebra ------------------------------------------------ */

typedef struct pvb_chsh_params {
  double alpha;
  double a1[3];
  double a2[3];
  double b1[3];
  double b2[3];
} pvb_chsh_params;

/* <A_i B_j> = a_z b_z + sin(2 alpha)(a_x b_x - a_y b_y); i, j in {1, 2}. */
PVB_API pvb_status pvb_chsh_correlator(const pvb_chsh_params* params, int i,
                                       int j, double* out);

typedef struct pvb_chsh_result {
  double value; /* E11 + E12 + E21 - E22 */
  double cx;
  double cy;
  double cz;
  double from_decomposition; /* cz + sin(2 alpha)(cx - cy) */
} pvb_chsh_result;

PVB_API pvb_status pvb_chsh_value(const pvb_chsh_params* params,
                                  pvb_chsh_result* out);

typedef struct pvb_appendix_report {
  uint64_t lemma_samples;
  uint64_t lemma_violating; /* draws with CHSH(alpha) > 2 */
  uint64_t lemma_deficits;  /* CHSH(pi/4) < CHSH(alpha) - 1e-12 */
  double lemma_max_deficit;
  double max_decomposition_dev; /* direct sum vs decomposition */
  double max_pipeline_dev;      /* algebra vs behavior pipeline */
  int pass;
} pvb_appendix_report;

/* Randomized check of the appendix claims: the CHSH(alpha) monotonicity
 * lemma, agreement of the two CHSH evaluations, and agreement of the
 * correlator algebra with the measurement pipeline. */
PVB_API pvb_status pvb_appendix_check(uint64_t lemma_samples,
                                      uint64_t algebra_samples,
                                      uint64_t pipeline_samples, uint64_t seed,
                                      pvb_appendix_report* out);

/* --- cross-validation and diagnostics ------------------------------------ */

typedef struct pvb_oracle_report {
  uint64_t trials;
  uint64_t compared;
  uint64_t skipped_near_boundary;
  uint64_t disagreements;
  uint64_t solver_failures;
} pvb_oracle_report;

/* Runs the LP decision, the CHSH oracle (when the scenario is the 2x2 qubit
 * one) and the convex-hull membership oracle on `trials` random settings and
 * counts disagreements, excluding draws too close to the polytope boundary
 * to decide reliably. */
PVB_API pvb_status pvb_oracle_check(const pvb_state* state,
                                    const int* settings, int num_parties,
                                    uint64_t trials, uint64_t seed,
                                    double tolerance, pvb_oracle_report* out);

/* Writes the feasibility program of one trial's behavior as text: one line
 * per row holding the 0/1 strategy-incidence coefficients then the
 * right-hand side; the normalization row comes last. */
PVB_API pvb_status pvb_dump_lp(const pvb_state* state, const int* settings,
                               int num_parties, uint64_t seed,
                               uint64_t trial_index, const char* path);

/* Percentage with three decimals, rounding half to even ("28.318"). */
PVB_API pvb_status pvb_format_percent(double probability, char* buffer,
                                      size_t size);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PVBELL_PVBELL_H_ */
