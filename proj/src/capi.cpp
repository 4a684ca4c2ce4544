// Copyright 2026 The cachebeam Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cachebeam/cachebeam.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "cachebeam/error.hpp"
#include "cachebeam/experiment.hpp"
#include "cachebeam/placement.hpp"

using namespace cachebeam;

struct cb_params {
  NetworkParams value;
};

struct cb_experiment {
  ExperimentConfig config;
  std::string text;
};

namespace {

thread_local std::string last_error;

cb_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return CB_ERR_DOMAIN;
    case ErrorCode::config: return CB_ERR_CONFIG;
    case ErrorCode::non_convergence: return CB_ERR_NONCONVERGENCE;
    case ErrorCode::cap_exceeded: return CB_ERR_CAP_EXCEEDED;
    case ErrorCode::infeasible: return CB_ERR_INFEASIBLE;
    case ErrorCode::io: return CB_ERR_IO;
    case ErrorCode::internal: return CB_ERR_INTERNAL;
  }
  return CB_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes.
template <class F>
cb_status guarded(F&& f) {
  try {
    last_error.clear();
    std::forward<F>(f)();
    return CB_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) raise(ErrorCode::domain, std::string(name) + " must not be null");
}

#define CB_NEED(p)                                 \
  if ((p) == nullptr) {                            \
    last_error = #p " must not be null";           \
    return CB_ERR_NULL_ARGUMENT;                   \
  }

Scheme to_scheme(cb_scheme s) {
  switch (s) {
    case CB_SCHEME_MF: return Scheme::mf;
    case CB_SCHEME_ZF: return Scheme::zf;
    case CB_SCHEME_NO_MF: return Scheme::no_mf;
    case CB_SCHEME_O_ZF: return Scheme::o_zf;
  }
  raise(ErrorCode::domain, "unknown scheme");
}

Fidelity to_fidelity(cb_fidelity f, Scheme scheme, const NetworkParams& params) {
  switch (f) {
    case CB_FIDELITY_EXACT: return Fidelity::exact;
    case CB_FIDELITY_UPPER_BOUND: return Fidelity::upper_bound;
    case CB_FIDELITY_LOWER_BOUND: return Fidelity::lower_bound;
    case CB_FIDELITY_APPROX_UPPER: return Fidelity::approx_upper;
    case CB_FIDELITY_APPROX_LOWER: return Fidelity::approx_lower;
    case CB_FIDELITY_CLOSED_FORM: return Fidelity::closed_form;
    case CB_FIDELITY_DEFAULT:
      return params.perfect_csi() ? default_fidelity(scheme, params) : lower_fidelity(scheme);
  }
  raise(ErrorCode::domain, "unknown fidelity");
}

SimFidelity to_sim_fidelity(cb_sim_fidelity f) {
  switch (f) {
    case CB_SIM_GAIN_LEVEL: return SimFidelity::gain_level;
    case CB_SIM_CONSTRUCTION_LEVEL: return SimFidelity::construction_level;
  }
  raise(ErrorCode::domain, "unknown simulation fidelity");
}

cb_sim_estimate to_c(const SimEstimate& e) {
  return {e.mean, e.std_error, e.trials, e.truncation_bound, e.rejection_rate};
}

PopularityProfile popularity_of(const double* p, std::size_t files) {
  need(p, "popularity");
  PopularityProfile pop;
  pop.files = static_cast<int>(files);
  pop.p.assign(p, p + files);
  pop.validate();
  return pop;
}

ValueTable table_of(const double* values, std::size_t files, int cluster_size) {
  need(values, "values");
  require(cluster_size >= 1, ErrorCode::domain, "cluster size must be positive");
  ValueTable table(files);
  for (std::size_t n = 0; n < files; ++n) {
    const double* row = values + n * static_cast<std::size_t>(cluster_size);
    table[n].assign(row, row + cluster_size);
  }
  return table;
}

void export_coded(const CodedCachePolicy& policy, int* b_out) {
  for (std::size_t n = 0; n < policy.b.size(); ++n) {
    b_out[n] = policy.b[n].cached() ? policy.b[n].count() : 0;
  }
}

TrialPlan plan_of(const cb_params* params, Scheme scheme, cb_sim_fidelity fidelity,
                  std::uint64_t trials, std::uint64_t seed) {
  TrialPlan plan;
  plan.trials = trials;
  plan.seed = seed;
  plan.fidelity = to_sim_fidelity(fidelity);
  plan.scheme = scheme;
  plan.params = params->value;
  return plan;
}

}  // namespace

extern "C" {

cb_status cb_params_create(cb_params** out) {
  CB_NEED(out);
  return guarded([&] { *out = new cb_params{}; });
}

void cb_params_destroy(cb_params* params) { delete params; }

cb_status cb_params_set_density(cb_params* params, double density) {
  CB_NEED(params);
  return guarded([&] {
    require(density > 0.0, ErrorCode::domain, "density must be positive");
    params->value.sbs_density = density;
  });
}

cb_status cb_params_set_path_loss_exponent(cb_params* params, double alpha) {
  CB_NEED(params);
  return guarded([&] {
    require(alpha > 2.0, ErrorCode::domain, "path-loss exponent must exceed 2");
    params->value.path_loss_exponent = alpha;
  });
}

cb_status cb_params_set_antennas(cb_params* params, int antennas) {
  CB_NEED(params);
  return guarded([&] {
    require(antennas >= 1, ErrorCode::domain, "antenna count must be at least 1");
    params->value.antennas = antennas;
  });
}

cb_status cb_params_set_cluster_size(cb_params* params, int cluster_size) {
  CB_NEED(params);
  return guarded([&] {
    require(cluster_size >= 2, ErrorCode::domain, "cluster size must be at least 2");
    params->value.cluster_size = cluster_size;
  });
}

cb_status cb_params_set_sir_threshold_db(cb_params* params, double gamma_db) {
  CB_NEED(params);
  return guarded([&] {
    require(std::isfinite(gamma_db), ErrorCode::domain, "threshold must be finite");
    params->value.sir_threshold = std::pow(10.0, gamma_db / 10.0);
  });
}

cb_status cb_params_set_feedback_bits(cb_params* params, int bits) {
  CB_NEED(params);
  return guarded([&] {
    if (bits <= 0) {
      params->value.feedback_bits.reset();
    } else {
      params->value.feedback_bits = bits;
    }
  });
}

cb_status cb_coverage(const cb_params* params, cb_scheme scheme, cb_fidelity fidelity, int k,
                      int serving_set, double* out) {
  CB_NEED(params);
  CB_NEED(out);
  return guarded([&] {
    const Scheme s = to_scheme(scheme);
    *out = coverage(s, to_fidelity(fidelity, s, params->value), k, params->value, serving_set);
  });
}

cb_status cb_coverage_bounds(const cb_params* params, cb_scheme scheme, int k, int serving_set,
                             double* lower, double* upper) {
  CB_NEED(params);
  CB_NEED(lower);
  CB_NEED(upper);
  return guarded([&] {
    const Scheme s = to_scheme(scheme);
    *lower = coverage(s, lower_fidelity(s), k, params->value, serving_set);
    *upper = coverage(s, upper_fidelity(s), k, params->value, serving_set);
  });
}

cb_status cb_ergodic_rate(const cb_params* params, cb_scheme scheme, cb_fidelity fidelity,
                          int k, double* out) {
  CB_NEED(params);
  CB_NEED(out);
  return guarded([&] {
    const Scheme s = to_scheme(scheme);
    *out = ese_rate(k, s, to_fidelity(fidelity, s, params->value), params->value).value;
  });
}

cb_status cb_coded_values(const cb_params* params, cb_scheme scheme, cb_metric metric,
                          cb_fidelity fidelity, double* out, size_t len) {
  CB_NEED(params);
  CB_NEED(out);
  return guarded([&] {
    const Scheme s = to_scheme(scheme);
    require(len >= static_cast<std::size_t>(params->value.cluster_size), ErrorCode::domain,
            "output buffer shorter than the cluster size");
    const auto values = coded_value_table(s, metric == CB_METRIC_FOT ? Metric::fot : Metric::ese,
                                          to_fidelity(fidelity, s, params->value), params->value);
    std::copy(values.begin(), values.end(), out);
  });
}

cb_status cb_zipf(int files, double skewness, double* out, size_t len) {
  CB_NEED(out);
  return guarded([&] {
    require(files >= 1 && len >= static_cast<std::size_t>(files), ErrorCode::domain,
            "output buffer shorter than the number of files");
    const PopularityProfile pop = zipf_popularity(files, skewness);
    std::copy(pop.p.begin(), pop.p.end(), out);
  });
}

cb_status cb_solve_prob_caching(const double* popularity, size_t files, const double* per_rank,
                                size_t ranks, double cache_size, double* a_out) {
  CB_NEED(popularity);
  CB_NEED(per_rank);
  CB_NEED(a_out);
  return guarded([&] {
    const PopularityProfile pop = popularity_of(popularity, files);
    const std::vector<double> v(per_rank, per_rank + ranks);
    const ProbCachePolicy policy = solve_prob_caching(pop, v, cache_size);
    std::copy(policy.a.begin(), policy.a.end(), a_out);
  });
}

cb_status cb_greedy_coded(const double* popularity, size_t files, const double* values,
                          int cluster_size, int cache_size, int* b_out) {
  CB_NEED(popularity);
  CB_NEED(values);
  CB_NEED(b_out);
  return guarded([&] {
    const PopularityProfile pop = popularity_of(popularity, files);
    export_coded(
        greedy_coded(pop, table_of(values, files, cluster_size), cache_size, cluster_size),
        b_out);
  });
}

cb_status cb_exhaustive_coded(const double* popularity, size_t files, const double* values,
                              int cluster_size, int cache_size, int* b_out) {
  CB_NEED(popularity);
  CB_NEED(values);
  CB_NEED(b_out);
  return guarded([&] {
    const PopularityProfile pop = popularity_of(popularity, files);
    export_coded(
        exhaustive_coded(pop, table_of(values, files, cluster_size), cache_size, cluster_size),
        b_out);
  });
}

cb_status cb_simulate_coverage(const cb_params* params, cb_scheme scheme,
                               cb_sim_fidelity fidelity, uint64_t trials, uint64_t seed,
                               int serving_set, cb_sim_estimate* out, size_t len) {
  CB_NEED(params);
  CB_NEED(out);
  return guarded([&] {
    const TrialPlan plan = plan_of(params, to_scheme(scheme), fidelity, trials, seed);
    const auto estimates = sim_coverage_profile(plan, serving_set);
    require(len == estimates.size(), ErrorCode::domain,
            "output length must equal the number of ranks");
    for (std::size_t i = 0; i < len; ++i) out[i] = to_c(estimates[i]);
  });
}

cb_status cb_simulate_sic(const cb_params* params, cb_sim_fidelity fidelity, uint64_t trials,
                          uint64_t seed, int serving_set, cb_sim_estimate* joint, size_t len,
                          cb_sim_estimate* fot) {
  CB_NEED(params);
  CB_NEED(joint);
  CB_NEED(fot);
  return guarded([&] {
    const TrialPlan plan = plan_of(params, Scheme::no_mf, fidelity, trials, seed);
    const SicReport report = sim_sic(plan, serving_set);
    require(len == report.joint.size(), ErrorCode::domain,
            "output length must equal the serving set size");
    for (std::size_t i = 0; i < len; ++i) joint[i] = to_c(report.joint[i]);
    *fot = to_c(report.fot);
  });
}

cb_status cb_experiment_load(const char* path, cb_experiment** out) {
  CB_NEED(path);
  CB_NEED(out);
  return guarded([&] { *out = new cb_experiment{load_config(path), {}}; });
}

cb_status cb_experiment_parse(const char* json_text, cb_experiment** out) {
  CB_NEED(json_text);
  CB_NEED(out);
  return guarded([&] { *out = new cb_experiment{parse_config(json_text), {}}; });
}

void cb_experiment_destroy(cb_experiment* experiment) { delete experiment; }

cb_status cb_experiment_set_scenario(cb_experiment* experiment, const char* scenario) {
  CB_NEED(experiment);
  CB_NEED(scenario);
  return guarded([&] { experiment->config.scenario = parse_scenario(scenario); });
}

cb_status cb_experiment_set_seed(cb_experiment* experiment, uint64_t seed) {
  CB_NEED(experiment);
  return guarded([&] { experiment->config.seed = seed; });
}

cb_status cb_experiment_set_trials(cb_experiment* experiment, uint64_t trials) {
  CB_NEED(experiment);
  return guarded([&] {
    require(trials >= 1, ErrorCode::config, "simulation.trials: must be at least 1");
    experiment->config.trials = trials;
  });
}

cb_status cb_experiment_set_output_dir(cb_experiment* experiment, const char* dir) {
  CB_NEED(experiment);
  CB_NEED(dir);
  return guarded([&] {
    require(*dir != '\0', ErrorCode::config, "output.dir: must not be empty");
    experiment->config.out_dir = dir;
  });
}

cb_status cb_experiment_set_format(cb_experiment* experiment, const char* format) {
  CB_NEED(experiment);
  CB_NEED(format);
  return guarded([&] { experiment->config.format = parse_output_format(format); });
}

cb_status cb_experiment_run(cb_experiment* experiment, size_t* rows, size_t* failed) {
  CB_NEED(experiment);
  return guarded([&] {
    const ExperimentResult result = run_experiment(experiment->config);
    write_outputs(experiment->config, result);
    if (rows) *rows = result.rows.size();
    if (failed) {
      std::size_t bad = 0;
      for (const ResultRow& r : result.rows) bad += r.status != "ok";
      *failed = bad;
    }
  });
}

const char* cb_experiment_config(cb_experiment* experiment) {
  if (experiment == nullptr) return "";
  experiment->text = config_text(experiment->config);
  return experiment->text.c_str();
}

const char* cb_last_error(void) { return last_error.c_str(); }

const char* cb_status_name(cb_status status) {
  switch (status) {
    case CB_OK: return "ok";
    case CB_ERR_INTERNAL: return "internal error";
    case CB_ERR_CONFIG: return "configuration error";
    case CB_ERR_NONCONVERGENCE: return "numerical non-convergence";
    case CB_ERR_DOMAIN: return "domain error";
    case CB_ERR_CAP_EXCEEDED: return "exact-mode cap exceeded";
    case CB_ERR_INFEASIBLE: return "infeasible";
    case CB_ERR_IO: return "i/o error";
    case CB_ERR_NULL_ARGUMENT: return "null argument";
  }
  return "unknown status";
}

const char* cb_version(void) { return CACHEBEAM_VERSION; }

}  // extern "C"
