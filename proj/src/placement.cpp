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


#include "cachebeam/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cachebeam/error.hpp"

namespace cachebeam {

namespace {

// Derivative of w (1-w)^(k-1) summed against V; the k = 1 term is V_1 exactly.
double marginal(double w, const std::vector<double>& v) {
  double total = v.empty() ? 0.0 : v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    total += std::pow(1.0 - w, k - 2) * (1.0 - k * w) * v[i];
  }
  return total;
}

void check_table(const ValueTable& values, std::size_t files, int cluster_size) {
  require(values.size() == files, ErrorCode::domain, "value table needs one row per file");
  for (const auto& row : values) {
    require(row.size() >= static_cast<std::size_t>(cluster_size), ErrorCode::domain,
            "value table needs a column per fragment count");
  }
}

double value_of(const ValueTable& values, std::size_t n, Fragments f) {
  return f.cached() ? values[n][f.count() - 1] : 0.0;
}

}  // namespace

void SolverOptions::validate() const {
  require(dual_tolerance > 0.0 && root_tolerance > 0.0, ErrorCode::domain,
          "solver tolerances must be positive");
  require(max_iterations >= 1, ErrorCode::domain, "solver needs at least one iteration");
}

double kkt_weight(double p, const std::vector<double>& per_rank, double mu, double tolerance) {
  if (mu <= p * marginal(1.0, per_rank)) return 1.0;  // ties saturate
  if (mu >= p * marginal(0.0, per_rank)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (p * marginal(mid, per_rank) > mu) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ProbCachePolicy solve_prob_caching(const PopularityProfile& popularity,
                                   const std::vector<double>& per_rank, double cache_size,
                                   const SolverOptions& options) {
  popularity.validate();
  options.validate();
  const std::size_t files = popularity.p.size();
  require(!per_rank.empty(), ErrorCode::domain, "need at least one per-rank value");
  for (std::size_t i = 0; i < per_rank.size(); ++i) {
    require(per_rank[i] >= 0.0, ErrorCode::domain, "per-rank values must be non-negative");
    if (i > 0) {
      require(per_rank[i] <= per_rank[i - 1] + 1e-12, ErrorCode::domain,
              "per-rank values must be nonincreasing");
    }
  }
  if (!(cache_size > 0.0 && cache_size < static_cast<double>(files))) {
    std::ostringstream os;
    os << "cache size " << cache_size << " must lie strictly between 0 and " << files;
    raise(ErrorCode::infeasible, os.str());
  }

  auto allocate = [&](double mu, std::vector<double>& a) {
    double sum = 0.0;
    for (std::size_t n = 0; n < files; ++n) {
      a[n] = kkt_weight(popularity.p[n], per_rank, mu, options.root_tolerance);
      sum += a[n];
    }
    return sum;
  };

  const double total_value = std::accumulate(per_rank.begin(), per_rank.end(), 0.0);
  double mu_lo = 0.0;
  double mu_hi = popularity.p.front() * total_value;
  std::vector<double> a_lo(files), a_hi(files), a_mid(files);
  double s_lo = allocate(mu_lo, a_lo);
  double s_hi = allocate(mu_hi, a_hi);
  if (total_value == 0.0) raise(ErrorCode::infeasible, "all per-rank values are zero");

  int iteration = 0;
  while (s_lo - s_hi > options.dual_tolerance * 1e-2 && mu_hi - mu_lo > 0.0) {
    if (++iteration > options.max_iterations) {
      raise(ErrorCode::non_convergence, "dual bisection did not converge");
    }
    const double mu = 0.5 * (mu_lo + mu_hi);
    if (mu <= mu_lo || mu >= mu_hi) break;
    const double s = allocate(mu, a_mid);
    require(s <= s_lo + 1e-12 && s >= s_hi - 1e-12, ErrorCode::internal,
            "allocated cache is not monotone in the dual variable");
    if (s >= cache_size) {
      mu_lo = mu;
      s_lo = s;
      a_lo.swap(a_mid);
    } else {
      mu_hi = mu;
      s_hi = s;
      a_hi.swap(a_mid);
    }
  }

  // Blend the two bracketing allocations so the budget holds exactly; this
  // also covers jumps where several files saturate at the same dual value.
  ProbCachePolicy out{std::vector<double>(files)};
  const double theta = s_lo > s_hi ? (s_lo - cache_size) / (s_lo - s_hi) : 0.0;
  for (std::size_t n = 0; n < files; ++n) {
    out.a[n] = std::clamp((1.0 - theta) * a_lo[n] + theta * a_hi[n], 0.0, 1.0);
  }
  if (std::abs(out.total() - cache_size) > options.dual_tolerance) {
    raise(ErrorCode::non_convergence, "cache budget not met after dual bisection");
  }
  return out;
}

ProbCachePolicy mpc_policy(int files, int cache_size) {
  require(files >= 1, ErrorCode::domain, "need at least one file");
  require(cache_size >= 0 && cache_size <= files, ErrorCode::infeasible,
          "cache size must lie between 0 and the file count");
  ProbCachePolicy out{std::vector<double>(static_cast<std::size_t>(files), 0.0)};
  for (int n = 0; n < cache_size; ++n) out.a[n] = 1.0;
  return out;
}

ValueTable uniform_value_table(int files, const std::vector<double>& per_fragments) {
  return ValueTable(static_cast<std::size_t>(files), per_fragments);
}

double objective_coded(const PopularityProfile& popularity, const CodedCachePolicy& policy,
                       const ValueTable& values) {
  require(policy.b.size() == popularity.p.size(), ErrorCode::domain,
          "policy length must match the popularity profile");
  require(values.size() == popularity.p.size(), ErrorCode::domain,
          "value table needs one row per file");
  double total = 0.0;
  for (std::size_t n = 0; n < policy.b.size(); ++n) {
    total += popularity.p[n] * value_of(values, n, policy.b[n]);
  }
  return total;
}

CodedCachePolicy greedy_coded(const PopularityProfile& popularity, const ValueTable& values,
                              int cache_size, int cluster_size) {
  popularity.validate();
  const std::size_t files = popularity.p.size();
  check_table(values, files, cluster_size);
  require(cluster_size >= 1, ErrorCode::domain, "cluster size must be positive");
  require(cache_size >= 1 && static_cast<std::size_t>(cache_size) <= files,
          ErrorCode::infeasible, "cache size must lie between 1 and the file count");

  CodedCachePolicy policy{std::vector<Fragments>(files, Fragments::uncached())};
  for (int n = 0; n < cache_size; ++n) policy.b[n] = Fragments::split(1);
  double profit = objective_coded(popularity, policy, values);

  for (int b0 = 1; b0 < cluster_size; ++b0) {
    for (;;) {
      // The block of files at b0 is contiguous; take its last b0 members.
      std::size_t first_uncached = files;
      std::vector<std::size_t> at_b0;
      for (std::size_t n = 0; n < files; ++n) {
        if (policy.b[n] == Fragments::split(b0)) at_b0.push_back(n);
        if (!policy.b[n].cached() && first_uncached == files) first_uncached = n;
      }
      if (first_uncached == files || at_b0.size() < static_cast<std::size_t>(b0)) break;

      CodedCachePolicy candidate = policy;
      for (std::size_t i = at_b0.size() - b0; i < at_b0.size(); ++i) {
        candidate.b[at_b0[i]] = Fragments::split(b0 + 1);
      }
      candidate.b[first_uncached] = Fragments::split(b0 + 1);
      const double candidate_profit = objective_coded(popularity, candidate, values);
      if (!(candidate_profit > profit)) break;
      policy = std::move(candidate);
      profit = candidate_profit;
    }
  }
  return policy;
}

CodedCachePolicy exhaustive_coded(const PopularityProfile& popularity, const ValueTable& values,
                                  int cache_size, int cluster_size, int file_cap) {
  popularity.validate();
  const int files = static_cast<int>(popularity.p.size());
  check_table(values, popularity.p.size(), cluster_size);
  require(cluster_size >= 1, ErrorCode::domain, "cluster size must be positive");
  require(cache_size >= 0, ErrorCode::infeasible, "cache size must be non-negative");
  if (files > file_cap) {
    std::ostringstream os;
    os << "exhaustive search supports at most " << file_cap << " files (got " << files << ")";
    raise(ErrorCode::cap_exceeded, os.str());
  }

  // Budget in units of 1/lcm(1..K) keeps the feasibility test exact.
  long long unit = 1;
  for (int k = 2; k <= cluster_size; ++k) unit = std::lcm(unit, static_cast<long long>(k));
  const long long budget = static_cast<long long>(cache_size) * unit;

  // counts[k-1] files get k fragments, in order of popularity.
  std::vector<int> counts(static_cast<std::size_t>(cluster_size), 0);
  std::vector<int> best_counts = counts;
  double best = 0.0;
  bool found = false;

  auto evaluate = [&]() {
    double total = 0.0;
    std::size_t n = 0;
    for (int k = 1; k <= cluster_size; ++k) {
      for (int i = 0; i < counts[k - 1]; ++i, ++n) total += popularity.p[n] * values[n][k - 1];
    }
    if (!found || total > best) {
      best = total;
      best_counts = counts;
      found = true;
    }
  };

  auto recurse = [&](auto&& self, int k, int used_files, long long used_budget) -> void {
    if (k > cluster_size) {
      evaluate();
      return;
    }
    const long long cost = unit / k;
    for (int c = 0; used_files + c <= files && used_budget + c * cost <= budget; ++c) {
      counts[k - 1] = c;
      self(self, k + 1, used_files + c, used_budget + c * cost);
    }
    counts[k - 1] = 0;
  };
  recurse(recurse, 1, 0, 0);

  CodedCachePolicy out{std::vector<Fragments>(static_cast<std::size_t>(files),
                                               Fragments::uncached())};
  std::size_t n = 0;
  for (int k = 1; k <= cluster_size; ++k) {
    for (int i = 0; i < best_counts[k - 1]; ++i) out.b[n++] = Fragments::split(k);
  }
  return out;
}

}  // namespace cachebeam
