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


#ifndef CACHEBEAM_EXPERIMENT_HPP
#define CACHEBEAM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cachebeam/montecarlo.hpp"

namespace cachebeam {

enum class Scenario { coverage, optimize_prob, optimize_coded, simulate, compare };
enum class OutputFormat { csv, json };

std::string_view to_string(Scenario scenario) noexcept;
Scenario parse_scenario(std::string_view text);
std::string_view to_string(OutputFormat format) noexcept;
OutputFormat parse_output_format(std::string_view text);

struct ExperimentConfig {
  Scenario scenario = Scenario::coverage;

  double sbs_density = 1.0;
  double path_loss_exponent = 4.0;
  int cluster_size = 3;

  int files = 100;
  double cache_size = 10.0;
  double skewness = 0.5;

  std::vector<double> gamma_db{-10.0, 0.0, 10.0};
  std::vector<int> antennas{3};
  std::vector<std::optional<int>> feedback_bits{std::nullopt};  // nullopt: perfect CSI
  std::vector<Scheme> schemes;       // empty: scenario default
  std::vector<int> serving_sets;     // NO-MF; empty: 1..K
  std::vector<Fidelity> fidelities;  // coverage scenario; empty: default plus bounds
  std::vector<Metric> metrics{Metric::fot};

  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  SimFidelity sim_fidelity = SimFidelity::gain_level;
  double window_radius = 0.0;
  unsigned workers = 0;

  std::string out_dir = "out";
  OutputFormat format = OutputFormat::csv;

  // Field-level checks of every module precondition the sweep touches.
  void validate() const;
  std::vector<Scheme> resolved_schemes() const;
};

// Parses a config document, or the config embedded in a run manifest.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical JSON; parse_config(config_text(c)) reproduces c.
std::string config_text(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view data);

struct ResultRow {
  std::string scenario;
  std::string scheme;
  int antennas = 0;
  int cluster_size = 0;
  std::optional<int> feedback_bits;
  std::optional<int> serving_set;
  std::optional<int> rank;
  double gamma_db = 0.0;
  std::string metric;
  std::string fidelity;
  std::optional<double> value;
  std::optional<double> std_error;
  std::optional<std::uint64_t> trials;
  std::string status = "ok";
};

struct PolicyRow {
  std::string scheme;
  int antennas = 0;
  std::optional<int> feedback_bits;
  double gamma_db = 0.0;
  std::string method;
  int file = 0;
  double popularity = 0.0;
  std::optional<double> value;  // a_n, or b_n with empty meaning uncached
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<PolicyRow> policies;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format);
std::string format_policies(const std::vector<PolicyRow>& rows, OutputFormat format);

// Writes the results table, the policy table when non-empty, and manifest.json
// into config.out_dir.  Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const ExperimentResult& result);

}  // namespace cachebeam

#endif  // CACHEBEAM_EXPERIMENT_HPP
