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


#include <chrono>
#include <numeric>
#include <random>

#include "cachebeam/error.hpp"
#include "cachebeam/placement.hpp"
#include "doctest.h"
#include "reference_solvers.hpp"

using namespace cachebeam;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<Fragments> fragments(std::initializer_list<int> counts) {
  std::vector<Fragments> out;
  for (int c : counts) out.push_back(c == 0 ? Fragments::uncached() : Fragments::split(c));
  return out;
}

std::vector<double> mf_lower_profile(int L, double gamma) {
  NetworkParams p;
  p.antennas = L;
  p.sir_threshold = gamma;
  return coverage_profile(Scheme::mf, Fidelity::lower_bound, p).values;
}

}  // namespace

TEST_CASE("solver options validation") {
  SolverOptions o;
  CHECK_NOTHROW(o.validate());
  o.dual_tolerance = 0.0;
  CHECK_THROWS_AS(o.validate(), Error);
}

TEST_CASE("KKT weight thresholds") {
  const std::vector<double> v{0.8, 0.5, 0.1};
  const double p = 0.2;
  CHECK(kkt_weight(p, v, p * (0.8 - 0.5)) == 1.0);
  CHECK(kkt_weight(p, v, 0.0) == 1.0);
  CHECK(kkt_weight(p, v, p * (0.8 + 0.5 + 0.1)) == 0.0);
  double previous = 1.0;
  for (double mu = 0.07; mu < 0.28; mu += 0.02) {
    const double w = kkt_weight(p, v, mu);
    CHECK(w <= previous);
    previous = w;
  }
}

TEST_CASE("probabilistic caching meets the budget") {
  const PopularityProfile pop = zipf_popularity(100, 0.5);
  const auto v = mf_lower_profile(2, 0.1);
  const ProbCachePolicy a = solve_prob_caching(pop, v, 10.0);
  CHECK(std::abs(sum(a.a) - 10.0) <= 1e-8);
  for (std::size_t n = 1; n < a.a.size(); ++n) CHECK(a.a[n] <= a.a[n - 1] + 1e-12);
  CHECK(objective_prob(pop, a, v) >= objective_prob(pop, mpc_policy(100, 10), v));
}

TEST_CASE("uniform popularity spreads the cache evenly") {
  const PopularityProfile pop = zipf_popularity(40, 0.0);
  const ProbCachePolicy a = solve_prob_caching(pop, mf_lower_profile(2, 1.0), 7.0);
  for (double x : a.a) CHECK(x == doctest::Approx(7.0 / 40.0).epsilon(1e-6));
}

TEST_CASE("linear objective reduces to most-popular caching") {
  const PopularityProfile pop = zipf_popularity(20, 0.7);
  const ProbCachePolicy a = solve_prob_caching(pop, {0.6, 0.0, 0.0}, 5.0);
  const ProbCachePolicy mpc = mpc_policy(20, 5);
  for (std::size_t n = 0; n < 20; ++n) CHECK(a.a[n] == doctest::Approx(mpc.a[n]).epsilon(1e-8));
}

TEST_CASE("probabilistic caching agrees with projected gradient") {
  const PopularityProfile pop = zipf_popularity(20, 0.5);
  const auto v = mf_lower_profile(2, 1.0);
  const ProbCachePolicy a = solve_prob_caching(pop, v, 5.0);
  const auto oracle = reference::projected_gradient_prob(pop, v, 5.0, 500, 42);
  CHECK(std::abs(objective_prob(pop, a, v) - oracle.objective) <= 1e-6);
  for (std::size_t n = 0; n < a.a.size(); ++n) {
    CHECK(std::abs(a.a[n] - oracle.a[n]) <= 1e-3);
  }
}

TEST_CASE("objective is concave in each coordinate") {
  const PopularityProfile pop = zipf_popularity(10, 0.9);
  const auto v = mf_lower_profile(3, 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    ProbCachePolicy a{std::vector<double>(10)};
    for (double& x : a.a) x = u(rng);
    const double f0 = objective_prob(pop, a, v);
    for (std::size_t n = 0; n < 10; ++n) {
      ProbCachePolicy up = a, down = a;
      up.a[n] += h;
      down.a[n] -= h;
      const double second = objective_prob(pop, up, v) - 2 * f0 + objective_prob(pop, down, v);
      CHECK(second <= 1e-9);
    }
  }
}

TEST_CASE("probabilistic caching rejects bad inputs") {
  const PopularityProfile pop = zipf_popularity(10, 0.5);
  const std::vector<double> v{0.8, 0.5, 0.1};
  try {
    solve_prob_caching(pop, v, 10.0);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
  }
  CHECK_THROWS_AS(solve_prob_caching(pop, v, 0.0), Error);
  CHECK_THROWS_AS(solve_prob_caching(pop, {0.1, 0.5}, 2.0), Error);
}

TEST_CASE("most-popular caching") {
  CHECK(mpc_policy(5, 2).a == std::vector<double>{1, 1, 0, 0, 0});
  const auto tail = mpc_policy(6, 5).a;
  CHECK(tail.back() == 0.0);
  CHECK(sum(tail) == 5.0);
  const PopularityProfile pop = zipf_popularity(5, 1.0);
  const std::vector<double> v{0.7, 0.4, 0.2};
  CHECK(objective_prob(pop, mpc_policy(5, 2), v) ==
        doctest::Approx((pop.p[0] + pop.p[1]) * 0.7));
}

TEST_CASE("greedy keeps the most-popular start when no move helps") {
  const PopularityProfile pop = zipf_popularity(8, 0.6);
  const CodedCachePolicy c = greedy_coded(pop, uniform_value_table(8, {0.5, 0.2, 0.1}), 3, 3);
  CHECK(c.b == fragments({1, 1, 1, 0, 0, 0, 0, 0}));
}

TEST_CASE("greedy accepts an improving move") {
  const PopularityProfile pop = zipf_popularity(3, 0.0);
  const CodedCachePolicy c = greedy_coded(pop, uniform_value_table(3, {0.8, 0.7}), 2, 2);
  // {1, 1, 0} -> {1, 2, 2}: the budget stays at 2 and the profit rises.
  CHECK(c.b == fragments({1, 2, 2}));
  CHECK(c.budget_used() == doctest::Approx(2.0));
}

TEST_CASE("greedy output is monotone and spends the budget") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int K = 4;
    std::vector<double> per(K);
    for (double& x : per) x = u(rng);
    std::sort(per.rbegin(), per.rend());
    const PopularityProfile pop = zipf_popularity(30, 2.0 * u(rng));
    const CodedCachePolicy c = greedy_coded(pop, uniform_value_table(30, per), 6, K);
    CHECK(c.monotone());
    CHECK(c.budget_used() == doctest::Approx(6.0));
  }
}

TEST_CASE("exhaustive search examples") {
  const PopularityProfile one = zipf_popularity(1, 0.5);
  CHECK(exhaustive_coded(one, uniform_value_table(1, {0.9, 0.5}), 1, 2).b == fragments({1}));
  const PopularityProfile pop = zipf_popularity(6, 0.8);
  CHECK(exhaustive_coded(pop, uniform_value_table(6, {0.9, 0.6, 0.3}), 6, 3).b ==
        fragments({1, 1, 1, 1, 1, 1}));
  try {
    exhaustive_coded(zipf_popularity(15, 0.5), uniform_value_table(15, {0.9, 0.5}), 3, 2);
    FAIL("expected cap_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
  }
}

TEST_CASE("exhaustive search matches unpruned enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int K = 3;
    std::vector<double> per(K);
    for (double& x : per) x = u(rng);
    std::sort(per.rbegin(), per.rend());
    const PopularityProfile pop = zipf_popularity(10, 1.5 * u(rng));
    const ValueTable table = uniform_value_table(10, per);
    const int M = 2 + trial % 3;
    const CodedCachePolicy best = exhaustive_coded(pop, table, M, K);
    CHECK(objective_coded(pop, best, table) ==
          doctest::Approx(reference::unpruned_coded_optimum(pop, table, M, K)).epsilon(1e-12));
    CHECK(best.monotone());
    CHECK(best.budget_used() <= M + 1e-12);
  }
}

TEST_CASE("greedy is fast") {
  const PopularityProfile pop = zipf_popularity(1000, 0.5);
  const auto start = std::chrono::steady_clock::now();
  greedy_coded(pop, uniform_value_table(1000, {0.9, 0.8, 0.7, 0.6}), 100, 4);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 5.0);
}
