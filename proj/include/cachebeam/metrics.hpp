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


#ifndef CACHEBEAM_METRICS_HPP
#define CACHEBEAM_METRICS_HPP

#include <compare>
#include <functional>
#include <vector>

#include "cachebeam/coverage.hpp"

namespace cachebeam {

struct PopularityProfile {
  int files = 0;
  double skewness = 0.0;  // Zipf exponent
  std::vector<double> p;

  void validate() const;
};

PopularityProfile zipf_popularity(int files, double skewness);

struct ProbCachePolicy {
  std::vector<double> a;  // caching probability per file

  double total() const;
  void validate(double cache_size) const;
};

// Number of fragments a file is split into, or "not cached".  Kept distinct
// from any integer so that 1/b can never be taken on the sentinel.
class Fragments {
 public:
  static Fragments uncached() { return Fragments(0); }
  static Fragments split(int count);

  bool cached() const { return count_ > 0; }
  int count() const;     // throws for uncached
  double share() const;  // cache space used per SBS: 1/b, or 0

  // Uncached orders after every cached value.
  std::strong_ordering operator<=>(const Fragments& other) const;
  bool operator==(const Fragments& other) const = default;

 private:
  explicit Fragments(int count) : count_(count) {}
  int count_;
};

struct CodedCachePolicy {
  std::vector<Fragments> b;

  double budget_used() const;
  // Budget, fragment range and nondecreasing structure.
  void validate(double cache_size, int cluster_size) const;
  bool monotone() const;
};

// Fraction of requests for one file served locally, given per-rank values
// V_1..V_K (coverage for FOT, rates for ESE).
double fot_prob(double a, const std::vector<double>& per_rank);
double ese_prob(double a, const std::vector<double>& per_rank);

double aggregate(const PopularityProfile& popularity, const std::vector<double>& per_file);

double objective_prob(const PopularityProfile& popularity, const ProbCachePolicy& policy,
                      const std::vector<double>& per_rank);

struct RateOptions {
  double truncation_level = 1e-4;  // stop where every integrand drops below this
  double max_exponent = 40.0;      // give up if not reached by x = log2(1 + gamma)
  double tolerance = 1e-4;         // successive refinements must agree to this
  int initial_nodes = 32;
  int max_levels = 6;
};

struct RateResult {
  double value = 0.0;
  double truncation_bound = 0.0;  // estimated integral beyond the cut
};

// int_0^inf P(2^x - 1) dx for every component of a vector-valued coverage
// function of the linear threshold.  Coverage is sampled on nested grids and
// interpolated with monotone cubics.
std::vector<RateResult> rate_integrals(
    const std::function<std::vector<double>(double)>& coverage_at, std::size_t components,
    const RateOptions& options = {});

RateResult rate_integral(const std::function<double(double)>& coverage_at,
                         const RateOptions& options = {});

// R_k for k = 1..K (1..serving_set for NO-MF) from a shared grid.
std::vector<RateResult> ese_rates(Scheme scheme, Fidelity fidelity, const NetworkParams& params,
                                  int serving_set = 0, const RateOptions& options = {});

RateResult ese_rate(int k, Scheme scheme, Fidelity fidelity, const NetworkParams& params,
                    const RateOptions& options = {});

// Coded caching, per file.  NO-MF decodes the b fragments successively and
// treats the per-stage successes as independent.
double fot_coded_nomf(Fragments b, Fidelity fidelity, const NetworkParams& params);
double fot_coded_ozf(Fragments b, Fidelity fidelity, const NetworkParams& params);
RateResult ese_coded_nomf(Fragments b, Fidelity fidelity, const NetworkParams& params,
                          const RateOptions& options = {});
RateResult ese_coded_ozf(Fragments b, Fidelity fidelity, const NetworkParams& params,
                         const RateOptions& options = {});

// Per-file value for b = 1..K (index b-1); uncached files are worth 0.
enum class Metric { fot, ese };
std::vector<double> coded_value_table(Scheme scheme, Metric metric, Fidelity fidelity,
                                      const NetworkParams& params,
                                      const RateOptions& options = {});

double objective_coded(const PopularityProfile& popularity, const CodedCachePolicy& policy,
                       const std::vector<double>& per_fragments);

}  // namespace cachebeam

#endif  // CACHEBEAM_METRICS_HPP
