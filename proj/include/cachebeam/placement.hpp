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


#ifndef CACHEBEAM_PLACEMENT_HPP
#define CACHEBEAM_PLACEMENT_HPP

#include <vector>

#include "cachebeam/metrics.hpp"

namespace cachebeam {

struct SolverOptions {
  double dual_tolerance = 1e-8;   // on sum(a) - M
  double root_tolerance = 1e-10;  // on w_n
  int max_iterations = 200;

  void validate() const;
};

// Root in [0, 1] of p sum_k (1-w)^(k-2) (1-kw) V_k = mu, clamped to the ends
// when mu falls outside the range of the left side.
double kkt_weight(double p, const std::vector<double>& per_rank, double mu,
                  double tolerance = 1e-10);

// Optimal caching probabilities for per-rank values V_1..V_K (coverage or
// rates), by bisection on the dual variable of the cache budget.
ProbCachePolicy solve_prob_caching(const PopularityProfile& popularity,
                                   const std::vector<double>& per_rank, double cache_size,
                                   const SolverOptions& options = {});

ProbCachePolicy mpc_policy(int files, int cache_size);

// Q[n][b-1] is the value of file n when split into b fragments.
using ValueTable = std::vector<std::vector<double>>;

// Same per-fragment values for every file.
ValueTable uniform_value_table(int files, const std::vector<double>& per_fragments);

double objective_coded(const PopularityProfile& popularity, const CodedCachePolicy& policy,
                       const ValueTable& values);

// Greedy repartitioning starting from the most-popular placement.
CodedCachePolicy greedy_coded(const PopularityProfile& popularity, const ValueTable& values,
                              int cache_size, int cluster_size);

inline constexpr int kExhaustiveFileCap = 14;

// Best nondecreasing placement within the budget, by enumeration.
CodedCachePolicy exhaustive_coded(const PopularityProfile& popularity, const ValueTable& values,
                                  int cache_size, int cluster_size,
                                  int file_cap = kExhaustiveFileCap);

}  // namespace cachebeam

#endif  // CACHEBEAM_PLACEMENT_HPP
