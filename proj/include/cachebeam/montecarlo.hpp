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


#ifndef CACHEBEAM_MONTECARLO_HPP
#define CACHEBEAM_MONTECARLO_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cachebeam/metrics.hpp"

namespace cachebeam {

// Gain-level trials draw effective gains from their distributions;
// construction-level trials build Rayleigh channels and beamformers.
enum class SimFidelity { gain_level, construction_level };

std::string_view to_string(SimFidelity fidelity) noexcept;
SimFidelity parse_sim_fidelity(std::string_view text);

struct TrialPlan {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  SimFidelity fidelity = SimFidelity::gain_level;
  Scheme scheme = Scheme::mf;
  NetworkParams params;
  double window_radius = 0.0;      // 0 selects default_window_radius(params)
  unsigned workers = 0;            // 0 uses the hardware concurrency
  std::uint64_t chunk_size = 8192; // trials per random stream

  void validate() const;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  // Mean interference from SBSs beyond the simulation window.  It is added to
  // every interference sum as a deterministic far-field term.
  double truncation_bound = 0.0;
  double rejection_rate = 0.0;  // windows resampled for holding fewer than K SBSs
};

// SIR of a user whose desired signal has gain `desired_gain` from distance
// `desired_distance`, against interferers with the given gains and distances.
double sir(double desired_gain, double desired_distance, std::span<const double> gains,
           std::span<const double> distances, double alpha, double extra_interference = 0.0);

// P[SIR_k >= gamma] for k = 1..K (1..serving_set for NO-MF), all ranks
// estimated on the same trials.
std::vector<SimEstimate> sim_coverage_profile(const TrialPlan& plan, int serving_set = 0);
SimEstimate sim_coverage(const TrialPlan& plan, int k, int serving_set = 0);

// E[log2(1 + SIR_k)] for every rank.
std::vector<SimEstimate> sim_rate_profile(const TrialPlan& plan, int serving_set = 0);

struct SicReport {
  std::vector<SimEstimate> marginal;  // P[SIR_k >= gamma]
  std::vector<SimEstimate> joint;     // P[SIR_1..SIR_k all >= gamma]
  SimEstimate fot;                    // (1/b) sum_k joint_k, estimated per trial
};

// Successive decoding of b NO-MF fragments; plan.scheme must be NO-MF.
SicReport sim_sic(const TrialPlan& plan, int serving_set);
SimEstimate sim_sic_fot(const TrialPlan& plan, int serving_set);

SimEstimate sim_afot(const TrialPlan& plan, const ProbCachePolicy& policy,
                     const PopularityProfile& popularity);
SimEstimate sim_afot(const TrialPlan& plan, const CodedCachePolicy& policy,
                     const PopularityProfile& popularity);
SimEstimate sim_aese(const TrialPlan& plan, const ProbCachePolicy& policy,
                     const PopularityProfile& popularity);
SimEstimate sim_aese(const TrialPlan& plan, const CodedCachePolicy& policy,
                     const PopularityProfile& popularity);

}  // namespace cachebeam

#endif  // CACHEBEAM_MONTECARLO_HPP
