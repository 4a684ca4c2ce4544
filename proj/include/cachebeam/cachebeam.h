/*
 * Copyright 2026 The cachebeam Authors
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

#ifndef CACHEBEAM_H
#define CACHEBEAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(CACHEBEAM_BUILDING_LIBRARY)
#define CB_API __attribute__((visibility("default")))
#else
#define CB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_INTERNAL = 1,
  CB_ERR_CONFIG = 2,
  CB_ERR_NONCONVERGENCE = 3,
  CB_ERR_DOMAIN = 4,
  CB_ERR_CAP_EXCEEDED = 5,
  CB_ERR_INFEASIBLE = 6,
  CB_ERR_IO = 7,
  CB_ERR_NULL_ARGUMENT = 8
} cb_status;

typedef enum cb_scheme {
  CB_SCHEME_MF = 0,
  CB_SCHEME_ZF = 1,
  CB_SCHEME_NO_MF = 2,
  CB_SCHEME_O_ZF = 3
} cb_scheme;

typedef enum cb_fidelity {
  CB_FIDELITY_EXACT = 0,
  CB_FIDELITY_UPPER_BOUND = 1,
  CB_FIDELITY_LOWER_BOUND = 2,
  CB_FIDELITY_APPROX_UPPER = 3,
  CB_FIDELITY_APPROX_LOWER = 4,
  CB_FIDELITY_CLOSED_FORM = 5,
  /* Exact within the exact-mode cap, otherwise the lower bound. */
  CB_FIDELITY_DEFAULT = 100
} cb_fidelity;

typedef enum cb_sim_fidelity {
  CB_SIM_GAIN_LEVEL = 0,
  CB_SIM_CONSTRUCTION_LEVEL = 1
} cb_sim_fidelity;

typedef enum cb_metric { CB_METRIC_FOT = 0, CB_METRIC_ESE = 1 } cb_metric;

typedef struct cb_sim_estimate {
  double mean;
  double std_error;
  uint64_t trials;
  double truncation_bound;
  double rejection_rate;
} cb_sim_estimate;

/* Network parameters.  Defaults: density 1, alpha 4, L = 1, K = 3,
 * threshold 0 dB, perfect CSI. */
typedef struct cb_params cb_params;

CB_API cb_status cb_params_create(cb_params** out);
CB_API void cb_params_destroy(cb_params* params);
CB_API cb_status cb_params_set_density(cb_params* params, double density);
CB_API cb_status cb_params_set_path_loss_exponent(cb_params* params, double alpha);
CB_API cb_status cb_params_set_antennas(cb_params* params, int antennas);
CB_API cb_status cb_params_set_cluster_size(cb_params* params, int cluster_size);
CB_API cb_status cb_params_set_sir_threshold_db(cb_params* params, double gamma_db);
/* bits <= 0 selects perfect CSI. */
CB_API cb_status cb_params_set_feedback_bits(cb_params* params, int bits);

/* Coverage probability of rank k.  serving_set is used by NO-MF only. */
CB_API cb_status cb_coverage(const cb_params* params, cb_scheme scheme, cb_fidelity fidelity,
                             int k, int serving_set, double* out);
/* Lower and upper bound of the scheme's bound family. */
CB_API cb_status cb_coverage_bounds(const cb_params* params, cb_scheme scheme, int k,
                                    int serving_set, double* lower, double* upper);
/* Ergodic rate E[log2(1 + SIR_k)] in bit/s/Hz. */
CB_API cb_status cb_ergodic_rate(const cb_params* params, cb_scheme scheme,
                                 cb_fidelity fidelity, int k, double* out);
/* Per-file coded value for b = 1..K into out[0..K-1]; len must be >= K. */
CB_API cb_status cb_coded_values(const cb_params* params, cb_scheme scheme, cb_metric metric,
                                 cb_fidelity fidelity, double* out, size_t len);

CB_API cb_status cb_zipf(int files, double skewness, double* out, size_t len);

/* Optimal caching probabilities a[0..files-1] for per-rank values
 * V_1..V_ranks. */
CB_API cb_status cb_solve_prob_caching(const double* popularity, size_t files,
                                       const double* per_rank, size_t ranks,
                                       double cache_size, double* a_out);
/* Coded placement.  values is row-major files x cluster_size with the value
 * of file n split into b fragments at [n * cluster_size + b - 1].  b_out
 * receives the fragment count per file, 0 meaning uncached. */
CB_API cb_status cb_greedy_coded(const double* popularity, size_t files, const double* values,
                                 int cluster_size, int cache_size, int* b_out);
CB_API cb_status cb_exhaustive_coded(const double* popularity, size_t files,
                                     const double* values, int cluster_size, int cache_size,
                                     int* b_out);

/* Simulated coverage for ranks 1..len (len must equal K, or serving_set for
 * NO-MF). */
CB_API cb_status cb_simulate_coverage(const cb_params* params, cb_scheme scheme,
                                      cb_sim_fidelity fidelity, uint64_t trials, uint64_t seed,
                                      int serving_set, cb_sim_estimate* out, size_t len);
/* NO-MF successive decoding: joint success of stages 1..k for k = 1..b into
 * joint[0..b-1], and the fraction of decoded fragments into fot. */
CB_API cb_status cb_simulate_sic(const cb_params* params, cb_sim_fidelity fidelity,
                                 uint64_t trials, uint64_t seed, int serving_set,
                                 cb_sim_estimate* joint, size_t len, cb_sim_estimate* fot);

/* Experiments driven by a JSON config (or a run manifest). */
typedef struct cb_experiment cb_experiment;

CB_API cb_status cb_experiment_load(const char* path, cb_experiment** out);
CB_API cb_status cb_experiment_parse(const char* json_text, cb_experiment** out);
CB_API void cb_experiment_destroy(cb_experiment* experiment);
CB_API cb_status cb_experiment_set_scenario(cb_experiment* experiment, const char* scenario);
CB_API cb_status cb_experiment_set_seed(cb_experiment* experiment, uint64_t seed);
CB_API cb_status cb_experiment_set_trials(cb_experiment* experiment, uint64_t trials);
CB_API cb_status cb_experiment_set_output_dir(cb_experiment* experiment, const char* dir);
CB_API cb_status cb_experiment_set_format(cb_experiment* experiment, const char* format);
/* Runs the sweep and writes the tables and manifest.  rows receives the
 * number of result rows and failed the number with a non-ok status; either
 * may be NULL. */
CB_API cb_status cb_experiment_run(cb_experiment* experiment, size_t* rows, size_t* failed);
/* Canonical config text; valid until the next call on this handle. */
CB_API const char* cb_experiment_config(cb_experiment* experiment);

/* Message of the last failure on the calling thread. */
CB_API const char* cb_last_error(void);
CB_API const char* cb_status_name(cb_status status);
CB_API const char* cb_version(void);

#ifdef __cplusplus
}
#endif

#endif /* CACHEBEAM_H */
