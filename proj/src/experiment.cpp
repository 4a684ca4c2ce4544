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


#include "cachebeam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cachebeam/error.hpp"
#include "cachebeam/placement.hpp"

namespace cachebeam {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- parsing

[[noreturn]] void field_error(const std::string& path, const std::string& message) {
  raise(ErrorCode::config, path + ": " + message);
}

// Reads one JSON object, rejecting keys it was not asked about.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) field_error(path_, "expected an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) out = as_number(*v, path(key));
  }
  void integer(const char* key, int& out) {
    if (const json* v = find(key)) out = as_int(*v, path(key));
  }
  void unsigned64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) field_error(path(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) out = as_string(*v, path(key));
  }
  template <class T, class F>
  void list(const char* key, std::vector<T>& out, F convert) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) field_error(path(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(convert((*v)[i], path(key) + "[" + std::to_string(i) + "]"));
    }
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) field_error(path(item.key().c_str()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) field_error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) field_error(path, "expected a finite number");
    return x;
  }
  static int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) field_error(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < -1000000000 || x > 1000000000) field_error(path, "integer out of range");
    return static_cast<int>(x);
  }
  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) field_error(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T, class F>
T parse_named(const json& v, const std::string& path, F parse) {
  const std::string text = Section::as_string(v, path);
  try {
    return parse(text);
  } catch (const Error& e) {
    field_error(path, e.what());
  }
}

Metric parse_metric(std::string_view text) {
  if (text == "afot") return Metric::fot;
  if (text == "aese") return Metric::ese;
  raise(ErrorCode::config, "unknown metric '" + std::string(text) + "' (expected afot or aese)");
}

std::string_view metric_name(Metric metric) { return metric == Metric::fot ? "afot" : "aese"; }

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  Section top(doc, "");
  if (const json* v = top.find("scenario")) {
    c.scenario = parse_named<Scenario>(*v, "scenario", parse_scenario);
  }
  if (const json* v = top.find("network")) {
    Section s(*v, "network");
    s.number("density", c.sbs_density);
    s.number("alpha", c.path_loss_exponent);
    s.integer("cluster_size", c.cluster_size);
    s.finish();
  }
  if (const json* v = top.find("popularity")) {
    Section s(*v, "popularity");
    s.integer("files", c.files);
    s.number("cache_size", c.cache_size);
    s.number("skewness", c.skewness);
    s.finish();
  }
  if (const json* v = top.find("sweep")) {
    Section s(*v, "sweep");
    s.list("gamma_db", c.gamma_db, Section::as_number);
    s.list("antennas", c.antennas, Section::as_int);
    s.list("feedback_bits", c.feedback_bits,
           [](const json& x, const std::string& path) -> std::optional<int> {
             if (x.is_null()) return std::nullopt;
             return Section::as_int(x, path);
           });
    s.list("schemes", c.schemes, [](const json& x, const std::string& path) {
      return parse_named<Scheme>(x, path, parse_scheme);
    });
    s.list("serving_sets", c.serving_sets, Section::as_int);
    s.finish();
  }
  if (const json* v = top.find("analysis")) {
    Section s(*v, "analysis");
    s.list("fidelities", c.fidelities, [](const json& x, const std::string& path) {
      return parse_named<Fidelity>(x, path, parse_fidelity);
    });
    s.list("metrics", c.metrics, [](const json& x, const std::string& path) {
      return parse_named<Metric>(x, path, parse_metric);
    });
    s.finish();
  }
  if (const json* v = top.find("simulation")) {
    Section s(*v, "simulation");
    s.unsigned64("trials", c.trials);
    s.unsigned64("seed", c.seed);
    if (const json* f = s.find("fidelity")) {
      c.sim_fidelity = parse_named<SimFidelity>(*f, "simulation.fidelity", parse_sim_fidelity);
    }
    s.number("window_radius", c.window_radius);
    std::uint64_t workers = c.workers;
    s.unsigned64("workers", workers);
    if (workers > 1024) field_error("simulation.workers", "at most 1024 workers");
    c.workers = static_cast<unsigned>(workers);
    s.finish();
  }
  if (const json* v = top.find("output")) {
    Section s(*v, "output");
    s.string("dir", c.out_dir);
    if (const json* f = s.find("format")) {
      c.format = parse_named<OutputFormat>(*f, "output.format", parse_output_format);
    }
    s.finish();
  }
  top.finish();
  return c;
}

json config_to_json(const ExperimentConfig& c, bool with_output) {
  json doc;
  doc["scenario"] = std::string(to_string(c.scenario));
  doc["network"] = {{"density", c.sbs_density},
                    {"alpha", c.path_loss_exponent},
                    {"cluster_size", c.cluster_size}};
  doc["popularity"] = {{"files", c.files}, {"cache_size", c.cache_size}, {"skewness", c.skewness}};
  json bits = json::array();
  for (const auto& b : c.feedback_bits) bits.push_back(b ? json(*b) : json(nullptr));
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(std::string(to_string(s)));
  doc["sweep"] = {{"gamma_db", c.gamma_db},
                  {"antennas", c.antennas},
                  {"feedback_bits", bits},
                  {"schemes", schemes},
                  {"serving_sets", c.serving_sets}};
  json fidelities = json::array();
  for (Fidelity f : c.fidelities) fidelities.push_back(std::string(to_string(f)));
  json metrics = json::array();
  for (Metric m : c.metrics) metrics.push_back(std::string(metric_name(m)));
  doc["analysis"] = {{"fidelities", fidelities}, {"metrics", metrics}};
  doc["simulation"] = {{"trials", c.trials},
                       {"seed", c.seed},
                       {"fidelity", std::string(to_string(c.sim_fidelity))},
                       {"window_radius", c.window_radius},
                       {"workers", c.workers}};
  if (with_output) {
    doc["output"] = {{"dir", c.out_dir}, {"format", std::string(to_string(c.format))}};
  }
  return doc;
}

// ---------------------------------------------------------------- helpers

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string status_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::config: return "config";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::cap_exceeded: return "cap-exceeded";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "error";
}

bool scheme_has_fidelity(Scheme scheme, Fidelity f) {
  switch (f) {
    case Fidelity::exact: return true;
    case Fidelity::upper_bound:
    case Fidelity::lower_bound: return scheme == Scheme::mf || scheme == Scheme::no_mf;
    case Fidelity::approx_upper:
    case Fidelity::approx_lower: return is_zero_forcing(scheme);
    case Fidelity::closed_form: return scheme == Scheme::mf;
  }
  return false;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string sim_tag(SimFidelity f) { return "sim-" + std::string(to_string(f)); }

// One sweep point: everything except the rank, serving set and fidelity.
struct Point {
  Scheme scheme = Scheme::mf;
  int antennas = 1;
  std::optional<int> bits;
  double gamma_db = 0.0;
  Metric metric = Metric::fot;
};

struct TaskOutput {
  std::vector<ResultRow> rows;
  std::vector<PolicyRow> policies;
};

class Builder {
 public:
  Builder(const ExperimentConfig& config, const Point& point)
      : config_(config), point_(point) {}

  NetworkParams params() const {
    NetworkParams p;
    p.sbs_density = config_.sbs_density;
    p.path_loss_exponent = config_.path_loss_exponent;
    p.antennas = point_.antennas;
    p.cluster_size = config_.cluster_size;
    p.sir_threshold = db_to_linear(point_.gamma_db);
    p.feedback_bits = point_.bits;
    return p;
  }

  ResultRow row(std::string_view metric, std::string_view fidelity,
                Scheme scheme) const {
    ResultRow r;
    r.scenario = std::string(to_string(config_.scenario));
    r.scheme = std::string(to_string(scheme));
    r.antennas = point_.antennas;
    r.cluster_size = config_.cluster_size;
    r.feedback_bits = point_.bits;
    r.gamma_db = point_.gamma_db;
    r.metric = std::string(metric);
    r.fidelity = std::string(fidelity);
    return r;
  }
  ResultRow row(std::string_view metric, std::string_view fidelity) const {
    return row(metric, fidelity, point_.scheme);
  }

  void add_prob_policy(TaskOutput& out, std::string_view method, Scheme scheme,
                       const PopularityProfile& pop, const ProbCachePolicy& policy) const {
    for (std::size_t n = 0; n < policy.a.size(); ++n) {
      out.policies.push_back(policy_row(method, scheme, n, pop, policy.a[n]));
    }
  }
  void add_coded_policy(TaskOutput& out, std::string_view method, Scheme scheme,
                        const PopularityProfile& pop, const CodedCachePolicy& policy) const {
    for (std::size_t n = 0; n < policy.b.size(); ++n) {
      const Fragments f = policy.b[n];
      out.policies.push_back(policy_row(method, scheme, n, pop,
                                        f.cached() ? std::optional<double>(f.count())
                                                   : std::nullopt));
    }
  }

  const Point& point() const { return point_; }

 private:
  PolicyRow policy_row(std::string_view method, Scheme scheme, std::size_t n,
                       const PopularityProfile& pop, std::optional<double> value) const {
    PolicyRow r;
    r.scheme = std::string(to_string(scheme));
    r.antennas = point_.antennas;
    r.feedback_bits = point_.bits;
    r.gamma_db = point_.gamma_db;
    r.method = std::string(method);
    r.file = static_cast<int>(n) + 1;
    r.popularity = pop.p[n];
    r.value = value;
    return r;
  }

  const ExperimentConfig& config_;
  Point point_;
};

std::string metric_label(Metric m, std::string_view method) {
  return std::string(metric_name(m)) + "-" + std::string(method);
}

// The fidelity analytic values fall back to when exact evaluation is not
// available.
Fidelity analytic_fidelity(Scheme scheme, const NetworkParams& params) {
  return params.perfect_csi() ? default_fidelity(scheme, params) : lower_fidelity(scheme);
}

std::vector<int> serving_sets(const ExperimentConfig& c) {
  if (!c.serving_sets.empty()) return c.serving_sets;
  std::vector<int> all;
  for (int b = 1; b <= c.cluster_size; ++b) all.push_back(b);
  return all;
}

std::vector<double> per_rank_values(Scheme scheme, Metric metric, Fidelity fidelity,
                                    const NetworkParams& params) {
  if (metric == Metric::fot) return coverage_profile(scheme, fidelity, params).values;
  std::vector<double> out;
  for (const RateResult& r : ese_rates(scheme, fidelity, params)) out.push_back(r.value);
  return out;
}

CodedCachePolicy mpc_coded(int files, int cache_size) {
  CodedCachePolicy policy;
  for (int n = 0; n < files; ++n) {
    policy.b.push_back(n < cache_size ? Fragments::split(1) : Fragments::uncached());
  }
  return policy;
}

// ---------------------------------------------------------------- scenarios

TaskOutput coverage_task(const ExperimentConfig& c, const Builder& b) {
  TaskOutput out;
  const Point& pt = b.point();
  const NetworkParams params = b.params();
  std::vector<Fidelity> fidelities;
  if (c.fidelities.empty()) {
    if (params.perfect_csi()) fidelities.push_back(default_fidelity(pt.scheme, params));
    fidelities.push_back(lower_fidelity(pt.scheme));
    fidelities.push_back(upper_fidelity(pt.scheme));
  } else {
    for (Fidelity f : c.fidelities) {
      if (scheme_has_fidelity(pt.scheme, f)) fidelities.push_back(f);
    }
  }
  std::vector<Fidelity> unique;
  for (Fidelity f : fidelities) {
    if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(f);
  }
  const std::vector<int> sets =
      pt.scheme == Scheme::no_mf ? serving_sets(c) : std::vector<int>{0};
  for (int set : sets) {
    const int ranks = set == 0 ? c.cluster_size : set;
    for (Fidelity f : unique) {
      std::vector<double> values;
      std::string status = "ok";
      try {
        values = coverage_profile(pt.scheme, f, params, set).values;
      } catch (const Error& e) {
        status = status_name(e.code());
      }
      for (int k = 1; k <= ranks; ++k) {
        ResultRow r = b.row("coverage", to_string(f));
        if (set != 0) r.serving_set = set;
        r.rank = k;
        r.status = status;
        if (status == "ok") r.value = values[static_cast<std::size_t>(k - 1)];
        out.rows.push_back(std::move(r));
      }
    }
  }
  return out;
}

TrialPlan make_plan(const ExperimentConfig& c, const NetworkParams& params, Scheme scheme,
                    std::uint64_t stream, unsigned workers) {
  TrialPlan plan;
  plan.trials = c.trials;
  plan.seed = splitmix64(c.seed ^ splitmix64(stream));
  plan.fidelity = c.sim_fidelity;
  plan.scheme = scheme;
  plan.params = params;
  plan.window_radius = c.window_radius;
  plan.workers = workers;
  return plan;
}

TaskOutput simulate_task(const ExperimentConfig& c, const Builder& b, std::uint64_t stream,
                         unsigned workers) {
  TaskOutput out;
  const Point& pt = b.point();
  const NetworkParams params = b.params();
  const Fidelity fid = analytic_fidelity(pt.scheme, params);
  const std::string tag = sim_tag(c.sim_fidelity);
  auto sim_row = [&](std::string_view metric, const SimEstimate& e) {
    ResultRow r = b.row(metric, tag);
    r.value = e.mean;
    r.std_error = e.std_error;
    r.trials = e.trials;
    return r;
  };
  const std::vector<int> sets =
      pt.scheme == Scheme::no_mf ? serving_sets(c) : std::vector<int>{0};
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const int set = sets[i];
    const int ranks = set == 0 ? c.cluster_size : set;
    const TrialPlan plan = make_plan(c, params, pt.scheme, stream * 64 + i, workers);
    std::vector<double> analytic;
    std::string status = "ok";
    try {
      analytic = coverage_profile(pt.scheme, fid, params, set).values;
    } catch (const Error& e) {
      status = status_name(e.code());
    }
    if (set == 0) {
      const auto sims = sim_coverage_profile(plan);
      for (int k = 1; k <= ranks; ++k) {
        ResultRow a = b.row("coverage", to_string(fid));
        a.rank = k;
        a.status = status;
        if (status == "ok") a.value = analytic[static_cast<std::size_t>(k - 1)];
        out.rows.push_back(std::move(a));
        ResultRow s = sim_row("coverage", sims[static_cast<std::size_t>(k - 1)]);
        s.rank = k;
        out.rows.push_back(std::move(s));
      }
      continue;
    }
    const SicReport sic = sim_sic(plan, set);
    for (int k = 1; k <= ranks; ++k) {
      const auto idx = static_cast<std::size_t>(k - 1);
      ResultRow a = b.row("coverage", to_string(fid));
      a.serving_set = set;
      a.rank = k;
      a.status = status;
      if (status == "ok") a.value = analytic[idx];
      out.rows.push_back(std::move(a));
      for (auto [metric, est] : {std::pair{"coverage", sic.marginal[idx]},
                                 std::pair{"sic-joint", sic.joint[idx]}}) {
        ResultRow s = sim_row(metric, est);
        s.serving_set = set;
        s.rank = k;
        out.rows.push_back(std::move(s));
      }
    }
    ResultRow product = b.row("sic-fot", to_string(fid));
    product.serving_set = set;
    try {
      product.value = fot_coded_nomf(Fragments::split(set), fid, params);
    } catch (const Error& e) {
      product.status = status_name(e.code());
    }
    out.rows.push_back(std::move(product));
    ResultRow joint = sim_row("sic-fot", sic.fot);
    joint.serving_set = set;
    out.rows.push_back(std::move(joint));
  }
  return out;
}

TaskOutput optimize_prob_task(const ExperimentConfig& c, const Builder& b) {
  TaskOutput out;
  const Point& pt = b.point();
  const NetworkParams params = b.params();
  const Fidelity fid = analytic_fidelity(pt.scheme, params);
  const PopularityProfile pop = zipf_popularity(c.files, c.skewness);
  const std::vector<double> v = per_rank_values(pt.scheme, pt.metric, fid, params);
  const ProbCachePolicy opc = solve_prob_caching(pop, v, c.cache_size);
  const ProbCachePolicy mpc = mpc_policy(c.files, static_cast<int>(std::floor(c.cache_size)));
  ResultRow r1 = b.row(metric_label(pt.metric, "opc"), to_string(fid));
  r1.value = objective_prob(pop, opc, v);
  ResultRow r2 = b.row(metric_label(pt.metric, "mpc"), to_string(fid));
  r2.value = objective_prob(pop, mpc, v);
  out.rows.push_back(std::move(r1));
  out.rows.push_back(std::move(r2));
  b.add_prob_policy(out, metric_label(pt.metric, "opc"), pt.scheme, pop, opc);
  return out;
}

TaskOutput optimize_coded_task(const ExperimentConfig& c, const Builder& b) {
  TaskOutput out;
  const Point& pt = b.point();
  const NetworkParams params = b.params();
  const Fidelity fid = default_fidelity(pt.scheme, params);
  const PopularityProfile pop = zipf_popularity(c.files, c.skewness);
  const auto per = coded_value_table(pt.scheme, pt.metric, fid, params);
  const ValueTable table = uniform_value_table(c.files, per);
  const int M = static_cast<int>(c.cache_size);
  const CodedCachePolicy greedy = greedy_coded(pop, table, M, c.cluster_size);
  ResultRow g = b.row(metric_label(pt.metric, "greedy"), to_string(fid));
  g.value = objective_coded(pop, greedy, table);
  out.rows.push_back(std::move(g));
  ResultRow m = b.row(metric_label(pt.metric, "mpc"), to_string(fid));
  m.value = objective_coded(pop, mpc_coded(c.files, M), table);
  out.rows.push_back(std::move(m));
  b.add_coded_policy(out, metric_label(pt.metric, "greedy"), pt.scheme, pop, greedy);
  if (c.files <= kExhaustiveFileCap) {
    const CodedCachePolicy best = exhaustive_coded(pop, table, M, c.cluster_size);
    ResultRow e = b.row(metric_label(pt.metric, "exhaustive"), to_string(fid));
    e.value = objective_coded(pop, best, table);
    out.rows.push_back(std::move(e));
    b.add_coded_policy(out, metric_label(pt.metric, "exhaustive"), pt.scheme, pop, best);
  }
  return out;
}

TaskOutput compare_task(const ExperimentConfig& c, const Builder& b) {
  TaskOutput out;
  const Point& pt = b.point();
  const NetworkParams params = b.params();
  const PopularityProfile pop = zipf_popularity(c.files, c.skewness);
  const Fidelity mf_fid = analytic_fidelity(Scheme::mf, params);
  const std::vector<double> v = per_rank_values(Scheme::mf, pt.metric, mf_fid, params);
  const int M = static_cast<int>(c.cache_size);
  const double mpc = objective_prob(pop, mpc_policy(c.files, M), v);
  const double opc = objective_prob(pop, solve_prob_caching(pop, v, c.cache_size), v);
  auto emit = [&](std::string_view method, Scheme scheme, std::string_view fid,
                  std::optional<double> value, std::string status = "ok") {
    ResultRow r = b.row(metric_label(pt.metric, method), fid, scheme);
    r.value = value;
    r.status = std::move(status);
    out.rows.push_back(std::move(r));
  };
  emit("mpc", Scheme::mf, to_string(mf_fid), mpc);
  emit("opc", Scheme::mf, to_string(mf_fid), opc);
  emit("gain-opc", Scheme::mf, to_string(mf_fid), opc - mpc);
  for (Scheme scheme : {Scheme::no_mf, Scheme::o_zf}) {
    if (!params.perfect_csi()) {
      emit("cc", scheme, "-", std::nullopt, status_name(ErrorCode::domain));
      continue;
    }
    if (scheme == Scheme::o_zf && params.antennas < params.cluster_size) {
      emit("cc", scheme, "-", std::nullopt, status_name(ErrorCode::infeasible));
      continue;
    }
    const Fidelity fid = default_fidelity(scheme, params);
    const ValueTable table =
        uniform_value_table(c.files, coded_value_table(scheme, pt.metric, fid, params));
    const double cc = objective_coded(pop, greedy_coded(pop, table, M, c.cluster_size), table);
    emit("cc", scheme, to_string(fid), cc);
    emit("gain-cc", scheme, to_string(fid), cc - mpc);
  }
  return out;
}

// ---------------------------------------------------------------- output

std::string optional_text(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string csv_results(const std::vector<ResultRow>& rows) {
  std::string s =
      "scenario,scheme,L,K,B,b_n,k,gamma_db,metric,fidelity,value,std_error,trials,status\n";
  for (const ResultRow& r : rows) {
    s += r.scenario + ',' + r.scheme + ',' + std::to_string(r.antennas) + ',' +
         std::to_string(r.cluster_size) + ',' + optional_text(r.feedback_bits) + ',' +
         optional_text(r.serving_set) + ',' + optional_text(r.rank) + ',' +
         format_double(r.gamma_db) + ',' + r.metric + ',' + r.fidelity + ',' +
         (r.value ? format_double(*r.value) : "") + ',' +
         (r.std_error ? format_double(*r.std_error) : "") + ',' +
         (r.trials ? std::to_string(*r.trials) : "") + ',' + r.status + '\n';
  }
  return s;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string json_results(const std::vector<ResultRow>& rows) {
  json doc = json::array();
  for (const ResultRow& r : rows) {
    doc.push_back({{"scenario", r.scenario},
                   {"scheme", r.scheme},
                   {"L", r.antennas},
                   {"K", r.cluster_size},
                   {"B", optional_json(r.feedback_bits)},
                   {"b_n", optional_json(r.serving_set)},
                   {"k", optional_json(r.rank)},
                   {"gamma_db", r.gamma_db},
                   {"metric", r.metric},
                   {"fidelity", r.fidelity},
                   {"value", optional_json(r.value)},
                   {"std_error", optional_json(r.std_error)},
                   {"trials", optional_json(r.trials)},
                   {"status", r.status}});
  }
  return doc.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::io, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) raise(ErrorCode::io, "failed writing " + path.string());
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- public

std::string_view to_string(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::coverage: return "coverage";
    case Scenario::optimize_prob: return "optimize-prob";
    case Scenario::optimize_coded: return "optimize-coded";
    case Scenario::simulate: return "simulate";
    case Scenario::compare: return "compare";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  for (Scenario s : {Scenario::coverage, Scenario::optimize_prob, Scenario::optimize_coded,
                     Scenario::simulate, Scenario::compare}) {
    if (text == to_string(s)) return s;
  }
  raise(ErrorCode::config, "unknown scenario '" + std::string(text) + "'");
}

std::string_view to_string(OutputFormat format) noexcept {
  return format == OutputFormat::csv ? "csv" : "json";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  raise(ErrorCode::config, "unknown output format '" + std::string(text) + "'");
}

std::vector<Scheme> ExperimentConfig::resolved_schemes() const {
  if (!schemes.empty()) return schemes;
  switch (scenario) {
    case Scenario::coverage:
    case Scenario::simulate: return {Scheme::mf, Scheme::zf, Scheme::no_mf};
    case Scenario::optimize_prob: return {Scheme::mf};
    case Scenario::optimize_coded: return {Scheme::no_mf, Scheme::o_zf};
    case Scenario::compare: return {Scheme::mf, Scheme::no_mf, Scheme::o_zf};
  }
  return {};
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& path, const std::string& message) {
    if (!ok) field_error(path, message);
  };
  check(sbs_density > 0.0, "network.density", "must be positive");
  check(path_loss_exponent > 2.0, "network.alpha", "must exceed 2");
  check(cluster_size >= 2, "network.cluster_size", "must be at least 2");
  check(files >= 1, "popularity.files", "must be at least 1");
  check(skewness >= 0.0, "popularity.skewness", "must be non-negative");
  const bool placement = scenario == Scenario::optimize_prob ||
                         scenario == Scenario::optimize_coded || scenario == Scenario::compare;
  if (placement) {
    check(cache_size > 0.0 && cache_size < files, "popularity.cache_size",
          "must lie strictly between 0 and the number of files");
  }
  if (scenario == Scenario::optimize_coded || scenario == Scenario::compare) {
    check(cache_size == std::floor(cache_size), "popularity.cache_size",
          "coded placement needs an integer cache size");
  }
  check(!gamma_db.empty(), "sweep.gamma_db", "needs at least one threshold");
  check(!antennas.empty(), "sweep.antennas", "needs at least one antenna count");
  for (int L : antennas) check(L >= 1, "sweep.antennas", "antenna counts must be at least 1");
  check(!feedback_bits.empty(), "sweep.feedback_bits", "use [null] for perfect CSI");
  bool quantized = false;
  for (const auto& b : feedback_bits) {
    if (!b) continue;
    quantized = true;
    check(*b >= 1 && *b <= 52, "sweep.feedback_bits", "bits must lie in 1..52");
  }
  const std::vector<Scheme> active = resolved_schemes();
  const int min_l = *std::min_element(antennas.begin(), antennas.end());
  for (Scheme s : active) {
    const std::string name(to_string(s));
    if (is_zero_forcing(s) && scenario != Scenario::compare) {
      check(min_l >= cluster_size, "sweep.antennas",
            name + " needs L >= K = " + std::to_string(cluster_size));
    }
    if (quantized && scenario != Scenario::compare) {
      check(s == Scheme::mf || s == Scheme::zf, "sweep.feedback_bits",
            "quantized CSI is modelled for mf and zf only, not " + name);
    }
    if (scenario == Scenario::optimize_prob) {
      check(s == Scheme::mf || s == Scheme::zf, "sweep.schemes",
            "probabilistic caching uses mf or zf, not " + name);
    }
    if (scenario == Scenario::optimize_coded) {
      check(s == Scheme::no_mf || s == Scheme::o_zf, "sweep.schemes",
            "coded caching uses no-mf or o-zf, not " + name);
    }
  }
  for (int b : serving_sets) {
    check(b >= 1 && b <= cluster_size, "sweep.serving_sets", "sizes must lie in 1..K");
  }
  for (Fidelity f : fidelities) {
    const bool used = std::any_of(active.begin(), active.end(),
                                  [&](Scheme s) { return scheme_has_fidelity(s, f); });
    check(used, "analysis.fidelities",
          std::string(to_string(f)) + " applies to none of the selected schemes");
  }
  check(!metrics.empty(), "analysis.metrics", "needs at least one metric");
  if (scenario == Scenario::simulate) {
    check(trials >= 1, "simulation.trials", "must be at least 1");
    check(!(quantized && sim_fidelity == SimFidelity::construction_level),
          "simulation.fidelity", "quantized CSI is simulated at the gain level only");
  }
  check(window_radius >= 0.0, "simulation.window_radius", "must be non-negative");
  check(!out_dir.empty(), "output.dir", "must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    raise(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) {
    return config_from_json(doc.at("config"));
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::config, "cannot read config file " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config(os.str());
}

std::string config_text(const ExperimentConfig& config) {
  return config_to_json(config, true).dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ExperimentConfig& c = config;

  std::vector<Point> points;
  std::vector<Scheme> schemes = c.resolved_schemes();
  if (c.scenario == Scenario::compare) schemes = {Scheme::mf};
  const bool uses_metric = c.scenario == Scenario::optimize_prob ||
                           c.scenario == Scenario::optimize_coded ||
                           c.scenario == Scenario::compare;
  const std::vector<Metric> metrics = uses_metric ? c.metrics : std::vector<Metric>{Metric::fot};
  const bool coded = c.scenario == Scenario::optimize_coded;
  for (Metric m : metrics) {
    for (Scheme s : schemes) {
      for (int L : c.antennas) {
        for (const auto& bits : c.feedback_bits) {
          if (coded && bits) continue;
          for (double g : c.gamma_db) points.push_back({s, L, bits, g, m});
        }
      }
    }
  }

  unsigned pool = c.workers != 0 ? c.workers : std::thread::hardware_concurrency();
  pool = std::max(1u, std::min<unsigned>(pool, static_cast<unsigned>(points.size())));
  const unsigned sim_workers = pool > 1 ? 1 : c.workers;

  std::vector<TaskOutput> outputs(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const Builder b(c, points[i]);
      try {
        switch (c.scenario) {
          case Scenario::coverage: outputs[i] = coverage_task(c, b); break;
          case Scenario::simulate: outputs[i] = simulate_task(c, b, i, sim_workers); break;
          case Scenario::optimize_prob: outputs[i] = optimize_prob_task(c, b); break;
          case Scenario::optimize_coded: outputs[i] = optimize_coded_task(c, b); break;
          case Scenario::compare: outputs[i] = compare_task(c, b); break;
        }
      } catch (const Error& e) {
        TaskOutput failed;
        ResultRow r = b.row("*", "-");
        r.status = status_name(e.code());
        failed.rows.push_back(std::move(r));
        outputs[i] = std::move(failed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < pool; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (TaskOutput& o : outputs) {
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(result.rows));
    std::move(o.policies.begin(), o.policies.end(), std::back_inserter(result.policies));
  }
  return result;
}

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format) {
  return format == OutputFormat::csv ? csv_results(rows) : json_results(rows);
}

std::string format_policies(const std::vector<PolicyRow>& rows, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::string s = "scheme,L,B,gamma_db,method,n,p_n,value\n";
    for (const PolicyRow& r : rows) {
      s += r.scheme + ',' + std::to_string(r.antennas) + ',' + optional_text(r.feedback_bits) +
           ',' + format_double(r.gamma_db) + ',' + r.method + ',' + std::to_string(r.file) +
           ',' + format_double(r.popularity) + ',' + (r.value ? format_double(*r.value) : "") +
           '\n';
    }
    return s;
  }
  json doc = json::array();
  for (const PolicyRow& r : rows) {
    doc.push_back({{"scheme", r.scheme},
                   {"L", r.antennas},
                   {"B", optional_json(r.feedback_bits)},
                   {"gamma_db", r.gamma_db},
                   {"method", r.method},
                   {"n", r.file},
                   {"p_n", r.popularity},
                   {"value", optional_json(r.value)}});
  }
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  const std::string ext = config.format == OutputFormat::csv ? ".csv" : ".json";

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("results" + ext, format_results(result.rows, config.format));
  if (!result.policies.empty()) {
    files.emplace_back("policies" + ext, format_policies(result.policies, config.format));
  }

  std::vector<fs::path> written;
  json listing = json::array();
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    written.push_back(dir / name);
    listing.push_back({{"name", name}, {"fnv1a64", hex64(fnv1a64(content))}});
  }
  const json identity = config_to_json(config, false);
  json manifest;
  manifest["artifact"] = "cachebeam";
  manifest["version"] = CACHEBEAM_VERSION;
  manifest["config"] = config_to_json(config, true);
  manifest["config_hash"] = hex64(fnv1a64(identity.dump()));
  manifest["seed"] = config.seed;
  manifest["files"] = listing;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  written.push_back(dir / "manifest.json");
  return written;
}

}  // namespace cachebeam
