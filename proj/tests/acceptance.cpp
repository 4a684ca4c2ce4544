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


// Acceptance suite.  Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cachebeam/channel.hpp"
#include "cachebeam/coverage.hpp"
#include "cachebeam/error.hpp"
#include "cachebeam/experiment.hpp"
#include "cachebeam/metrics.hpp"
#include "cachebeam/montecarlo.hpp"
#include "cachebeam/placement.hpp"
#include "cachebeam/random.hpp"
#include "oracle_values.hpp"
#include "reference_solvers.hpp"

using namespace cachebeam;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double db(double x) { return std::pow(10.0, x / 10.0); }

NetworkParams net(int L, int K, double gamma_db, double alpha = 4.0) {
  NetworkParams p;
  p.antennas = L;
  p.cluster_size = K;
  p.sir_threshold = db(gamma_db);
  p.path_loss_exponent = alpha;
  return p;
}

TrialPlan plan(Scheme s, const NetworkParams& p, std::uint64_t trials, std::uint64_t seed) {
  TrialPlan t;
  t.scheme = s;
  t.params = p;
  t.trials = trials;
  t.seed = seed;
  return t;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[4096];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// One-sample Kolmogorov-Smirnov test with the asymptotic distribution.
double ks_p_value(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

Outcome c1_closed_form() {
  Outcome o;
  const double analytic = cov_mf_closed_alpha4(1, 1.0);
  const auto t0 = Clock::now();
  const SimEstimate e = sim_coverage(plan(Scheme::mf, net(1, 3, 0.0), 1000000, 101), 1);
  const double secs = seconds_since(t0);
  o.pass = std::abs(analytic - oracle::kMfL1K1) < 1e-12 && std::abs(e.mean - 0.56010) <= 0.005 &&
           std::abs(e.mean - analytic) <= 0.005 && secs < 60.0;
  o.detail = fmt("analytic %.6f, sim %.6f (s.e. %.1e), %.1f s", analytic, e.mean, e.std_error,
                 secs);
  return o;
}

Outcome c2_bound_sandwich() {
  Outcome o;
  const auto t0 = Clock::now();
  int good = 0, total = 0;
  double worst = 0.0;
  std::uint64_t seed = 200;
  for (int L : {2, 4}) {
    for (double g : {-10.0, 0.0, 10.0}) {
      const NetworkParams p = net(L, 3, g);
      const auto sims = sim_coverage_profile(plan(Scheme::mf, p, 100000, seed++));
      for (int k = 1; k <= 3; ++k) {
        const BoundPair b = cov_mf_bounds(k, p);
        const SimEstimate& e = sims[k - 1];
        const double slack = 3.0 * e.std_error;
        const bool ok = b.lower <= e.mean + slack && e.mean - slack <= b.upper;
        worst = std::max({worst, b.lower - e.mean - slack, e.mean - slack - b.upper});
        good += ok;
        ++total;
      }
    }
  }
  const double secs = seconds_since(t0);
  o.pass = good == total && secs < 300.0;
  o.detail = fmt("%d/%d points inside, worst excess %.2e, %.1f s", good, total, worst, secs);
  return o;
}

Outcome c3_coincidence() {
  Outcome o;
  double mf_gap = 0.0, zf_gap = 0.0;
  for (double g : {-10.0, 0.0, 10.0}) {
    for (int K : {2, 3, 4}) {
      for (int k = 1; k <= K; ++k) {
        const BoundPair m = cov_mf_bounds(k, net(1, K, g));
        mf_gap = std::max(mf_gap, std::abs(m.upper - m.lower));
        const BoundPair z = cov_zf_approx_bounds(k, net(K, K, g));
        zf_gap = std::max(zf_gap, std::abs(z.upper - z.lower));
      }
    }
  }
  o.pass = mf_gap <= 1e-12 && zf_gap <= 1e-12;
  o.detail = fmt("max MF gap at L=1 %.1e, max ZF gap at L=K %.1e", mf_gap, zf_gap);
  return o;
}

Outcome c4_zf_approximation() {
  Outcome o;
  double worst = 0.0;
  std::string where;
  std::uint64_t seed = 400;
  for (double g : {-10.0, 0.0, 10.0}) {
    const NetworkParams p = net(3, 3, g);
    const auto sims = sim_coverage_profile(plan(Scheme::zf, p, 200000, seed++));
    for (int k = 1; k <= 3; ++k) {
      const BoundPair b = cov_zf_approx_bounds(k, p);
      for (double v : {b.lower, b.upper}) {
        const double gap = std::abs(v - sims[k - 1].mean);
        if (gap > worst) {
          worst = gap;
          where = fmt("k=%d, %g dB: approx %.4f vs sim %.4f", k, g, v, sims[k - 1].mean);
        }
      }
    }
  }
  o.pass = worst <= 0.03;
  o.detail = fmt("max |approx - sim| %.4f (tol 0.03) at %s", worst, where.c_str());
  return o;
}

Outcome c5_gain_distributions() {
  Outcome o;
  const int n = 100000;
  Rng rng = make_stream(505, 0);
  std::vector<double> zf(n), mf(n);
  for (int i = 0; i < n; ++i) {
    const ChannelMatrix h = sample_rayleigh(4, rng);
    const ChannelMatrix others = sample_rayleigh(2, 4, rng);
    zf[i] = effective_gain(h, zf_beamformer(h, others));
  }
  const double p_zf =
      ks_p_value(zf, [](double x) { return boost::math::gamma_p(2.0, std::max(x, 0.0)); });
  double p_mf = 0.0;
  std::string mf_detail;
  for (int L : {1, 2, 4}) {
    for (int i = 0; i < n; ++i) {
      const ChannelMatrix h = sample_rayleigh(L, rng);
      mf[i] = effective_gain(h, mf_beamformer(h));
    }
    const double p = ks_p_value(
        mf, [L](double x) { return boost::math::gamma_p(static_cast<double>(L), std::max(x, 0.0)); });
    if (L == 4) p_mf = p;
    mf_detail += fmt(" L=%d p=%.3f", L, p);
  }
  o.pass = p_zf > 0.01 && p_mf > 0.01;
  o.detail = fmt("ZF L=4 K=3 vs Gamma(2,1) p=%.3f; MF L=4 vs Gamma(4,1) p=%.3f (gating); MF "
                 "vs Gamma(L,1)%s",
                 p_zf, p_mf, mf_detail.c_str());
  return o;
}

struct GridPoint {
  Scheme scheme;
  int L;
  int serving_set;
  int k;
  double gamma_db;
};

Outcome c6_exact_vs_sim() {
  Outcome o;
  const std::vector<GridPoint> grid = {
      {Scheme::mf, 2, 0, 1, 0.0},     {Scheme::mf, 4, 0, 2, -10.0},
      {Scheme::mf, 2, 0, 3, 10.0},    {Scheme::mf, 3, 0, 1, -5.0},
      {Scheme::zf, 4, 0, 2, 0.0},     {Scheme::zf, 3, 0, 1, -10.0},
      {Scheme::zf, 6, 0, 3, 0.0},     {Scheme::zf, 5, 0, 1, 10.0},
      {Scheme::no_mf, 2, 2, 1, 0.0},  {Scheme::no_mf, 2, 3, 2, -10.0},
      {Scheme::no_mf, 4, 3, 1, 0.0},  {Scheme::no_mf, 1, 3, 3, 0.0},
  };
  int good = 0;
  double worst_ratio = 0.0;
  std::uint64_t seed = 600;
  for (const GridPoint& g : grid) {
    const NetworkParams p = net(g.L, 3, g.gamma_db);
    const double exact = coverage(g.scheme, Fidelity::exact, g.k, p, g.serving_set);
    const SimEstimate e = sim_coverage(plan(g.scheme, p, 1000000, seed++), g.k, g.serving_set);
    const double tol = 3.0 * e.std_error + 1e-3;
    const double gap = std::abs(exact - e.mean);
    good += gap <= tol;
    worst_ratio = std::max(worst_ratio, gap / tol);
  }
  o.pass = good == static_cast<int>(grid.size());
  o.detail = fmt("%d/%zu points within 3 s.e. + 1e-3, worst gap/tol %.2f", good, grid.size(),
                 worst_ratio);
  return o;
}

Outcome c7_probabilistic_optimizer() {
  Outcome o;
  const PopularityProfile pop = zipf_popularity(100, 0.5);
  const NetworkParams p = net(2, 3, -10.0);
  const auto t0 = Clock::now();
  const std::vector<double> v = coverage_profile(Scheme::mf, Fidelity::exact, p).values;
  const ProbCachePolicy a = solve_prob_caching(pop, v, 10.0);
  const double secs = seconds_since(t0);
  const double opt = objective_prob(pop, a, v);
  const double mpc = objective_prob(pop, mpc_policy(100, 10), v);
  const reference::ProbOptimum ref = reference::projected_gradient_prob(pop, v, 10.0, 500, 7);
  const double budget_gap = std::abs(a.total() - 10.0);
  const double oracle_gap = std::abs(opt - ref.objective);
  o.pass = opt > mpc && budget_gap <= 1e-8 && oracle_gap <= 1e-6 && secs < 120.0;
  o.detail = fmt("AFOT opt %.6f > MPC %.6f, |sum a - M| %.1e, |opt - oracle| %.1e, %.2f s", opt,
                 mpc, budget_gap, oracle_gap, secs);
  return o;
}

Outcome c8_uniform_symmetry() {
  Outcome o;
  double worst = 0.0;
  for (int L : {1, 2, 4}) {
    for (double g : {-10.0, 0.0, 10.0}) {
      const std::vector<double> v = coverage_profile(Scheme::mf, Fidelity::exact, net(L, 3, g)).values;
      const ProbCachePolicy a = solve_prob_caching(zipf_popularity(100, 0.0), v, 10.0);
      for (double x : a.a) worst = std::max(worst, std::abs(x - 0.1));
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = fmt("max |a_n - M/N| %.1e", worst);
  return o;
}

Outcome c9_greedy_vs_exhaustive() {
  Outcome o;
  const NetworkParams p = net(4, 3, -10.0);
  double worst = 0.0, slowest = 0.0;
  std::string detail;
  for (Scheme s : {Scheme::o_zf, Scheme::no_mf}) {
    const std::vector<double> per_b = coded_value_table(s, Metric::fot, Fidelity::exact, p);
    const ValueTable table = uniform_value_table(12, per_b);
    for (double delta : {0.5, 1.0}) {
      const PopularityProfile pop = zipf_popularity(12, delta);
      const auto t0 = Clock::now();
      const CodedCachePolicy greedy = greedy_coded(pop, table, 4, 3);
      slowest = std::max(slowest, seconds_since(t0));
      const double g = objective_coded(pop, greedy, table);
      const double e = objective_coded(pop, exhaustive_coded(pop, table, 4, 3), table);
      const double rel = (e - g) / e;
      worst = std::max(worst, rel);
      detail += fmt(" %s/%.1f:%.4f", std::string(to_string(s)).c_str(), delta, rel);
    }
  }
  o.pass = worst <= 0.01 && slowest < 1.0;
  o.detail = fmt("relative shortfall%s; slowest greedy %.1e s", detail.c_str(), slowest);
  return o;
}

Outcome c10_sic_independence() {
  Outcome o;
  double worst = 0.0;
  std::string detail;
  std::uint64_t seed = 1000;
  for (int b : {2, 3}) {
    for (double g : {-10.0, 0.0}) {
      const NetworkParams p = net(2, 3, g);
      const SimEstimate joint = sim_sic_fot(plan(Scheme::no_mf, p, 400000, seed++), b);
      const double product = fot_coded_nomf(Fragments::split(b), Fidelity::exact, p);
      const double gap = std::abs(joint.mean - product);
      worst = std::max(worst, gap);
      detail += fmt(" b=%d/%gdB:%.4f", b, g, joint.mean - product);
    }
  }
  o.pass = worst < 0.02;
  o.detail = fmt("joint - product FOT%s; max %.4f", detail.c_str(), worst);
  return o;
}

Outcome c11_quantized_limit() {
  Outcome o;
  double mf_gap = 0.0, zf_gap = 0.0;
  for (int L : {3, 4}) {
    for (double g : {-10.0, 0.0, 10.0}) {
      NetworkParams perfect = net(L, 3, g);
      NetworkParams q = perfect;
      q.feedback_bits = 20;
      for (int k = 1; k <= 3; ++k) {
        const BoundPair mq = cov_quantized(Scheme::mf, k, q);
        const BoundPair mp = cov_mf_bounds(k, perfect);
        mf_gap = std::max({mf_gap, std::abs(mq.lower - mp.lower), std::abs(mq.upper - mp.upper)});
        const BoundPair zq = cov_quantized(Scheme::zf, k, q);
        const BoundPair zp = cov_zf_approx_bounds(k, perfect);
        zf_gap = std::max({zf_gap, std::abs(zq.lower - zp.lower), std::abs(zq.upper - zp.upper)});
      }
    }
  }
  bool direction = true;
  double mf_drop_sum = 0.0, zf_drop_sum = 0.0;
  for (double g : {-10.0, 0.0, 10.0}) {
    NetworkParams perfect = net(3, 3, g);
    NetworkParams q = perfect;
    q.feedback_bits = 4;
    for (int k = 1; k <= 3; ++k) {
      auto mid = [](const BoundPair& b) { return 0.5 * (b.lower + b.upper); };
      const double mf_drop = mid(cov_mf_bounds(k, perfect)) - mid(cov_quantized(Scheme::mf, k, q));
      const double zf_drop =
          mid(cov_zf_approx_bounds(k, perfect)) - mid(cov_quantized(Scheme::zf, k, q));
      direction = direction && mf_drop < zf_drop;
      mf_drop_sum += mf_drop;
      zf_drop_sum += zf_drop;
    }
  }
  o.pass = mf_gap <= 1e-2 && zf_gap <= 1e-2 && direction;
  o.detail = fmt("B=20 max gap MF %.2e, ZF %.2e (tol 1e-2); B=4 L=K=3 total drop MF %.4f < ZF %.4f: %s",
                 mf_gap, zf_gap, mf_drop_sum, zf_drop_sum, direction ? "yes" : "no");
  return o;
}

Outcome c12_monotonicity() {
  Outcome o;
  int checks = 0, violations = 0;
  std::map<std::string, int> by_kind;
  auto note = [&](bool ok, const std::string& kind) {
    ++checks;
    if (!ok) {
      ++violations;
      ++by_kind[kind];
    }
  };
  const std::vector<double> gammas = {-10.0, -5.0, 0.0, 5.0, 10.0};
  struct Case {
    Scheme scheme;
    Fidelity fidelity;
    int L;
    int serving_set;
    std::optional<int> bits;
  };
  std::vector<Case> cases;
  for (int L : {1, 2, 4}) {
    for (Fidelity f : {Fidelity::exact, Fidelity::lower_bound, Fidelity::upper_bound}) {
      cases.push_back({Scheme::mf, f, L, 0, std::nullopt});
      for (int b : {1, 2, 3}) cases.push_back({Scheme::no_mf, f, L, b, std::nullopt});
    }
  }
  cases.push_back({Scheme::mf, Fidelity::closed_form, 1, 0, std::nullopt});
  for (int L : {3, 4, 5}) {
    for (Scheme s : {Scheme::zf, Scheme::o_zf}) {
      for (Fidelity f : {Fidelity::exact, Fidelity::approx_lower, Fidelity::approx_upper}) {
        cases.push_back({s, f, L, 0, std::nullopt});
      }
    }
    for (int bits : {4, 8}) {
      for (Fidelity f : {Fidelity::lower_bound, Fidelity::upper_bound}) {
        cases.push_back({Scheme::mf, f, L, 0, bits});
      }
      for (Fidelity f : {Fidelity::approx_lower, Fidelity::approx_upper}) {
        cases.push_back({Scheme::zf, f, L, 0, bits});
      }
    }
  }
  for (const Case& c : cases) {
    const int ranks = c.scheme == Scheme::no_mf ? c.serving_set : 3;
    std::vector<std::vector<double>> v(gammas.size(), std::vector<double>(ranks));
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      NetworkParams p = net(c.L, 3, gammas[gi]);
      p.feedback_bits = c.bits;
      for (int k = 1; k <= ranks; ++k) {
        v[gi][k - 1] = coverage(c.scheme, c.fidelity, k, p, c.serving_set);
      }
    }
    const std::string tag = fmt("%s/%s L=%d", std::string(to_string(c.scheme)).c_str(),
                                std::string(to_string(c.fidelity)).c_str(), c.L);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      for (int k = 1; k < ranks; ++k) {
        note(v[gi][k] <= v[gi][k - 1] + 1e-12, tag + " in k");
      }
      if (gi == 0) continue;
      for (int k = 0; k < ranks; ++k) {
        note(v[gi][k] < v[gi - 1][k], tag + " in gamma");
      }
    }
  }
  for (Scheme s : {Scheme::no_mf, Scheme::o_zf}) {
    for (Metric m : {Metric::fot, Metric::ese}) {
      for (int L : {3, 4}) {
        for (double g : {-10.0, 0.0, 10.0}) {
          const auto t = coded_value_table(s, m, Fidelity::exact, net(L, 3, g));
          for (std::size_t b = 1; b < t.size(); ++b) {
            note(t[b] <= t[b - 1] + 1e-12,
                 fmt("coded %s %s in b", std::string(to_string(s)).c_str(),
                     m == Metric::fot ? "fot" : "ese"));
          }
        }
      }
    }
  }
  std::string kinds;
  for (const auto& [kind, n] : by_kind) kinds += fmt("; %s: %d", kind.c_str(), n);
  o.pass = violations == 0;
  o.detail = fmt("%d checks, %d violations%s", checks, violations, kinds.c_str());
  return o;
}

Outcome c13_rate_consistency() {
  Outcome o;
  double worst = 0.0;
  std::string detail;
  std::uint64_t seed = 1300;
  struct Case {
    Scheme scheme;
    int L;
  };
  for (const Case& c : {Case{Scheme::mf, 1}, Case{Scheme::zf, 3}}) {
    const NetworkParams p = net(c.L, 3, 0.0);
    const auto sims = sim_rate_profile(plan(c.scheme, p, 400000, seed++));
    for (int k : {1, 2}) {
      const double r = ese_rate(k, c.scheme, Fidelity::exact, p).value;
      const double rel = std::abs(r - sims[k - 1].mean) / sims[k - 1].mean;
      worst = std::max(worst, rel);
      detail += fmt(" %s k=%d: %.4f vs %.4f;", std::string(to_string(c.scheme)).c_str(), k, r,
                    sims[k - 1].mean);
    }
  }
  o.pass = worst <= 0.05;
  o.detail = fmt("analytic vs sim%s max rel %.4f", detail.c_str(), worst);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Outcome c14_determinism() {
  namespace fs = std::filesystem;
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "cachebeam_acceptance_replay";
  fs::remove_all(root);
  int files = 0, identical = 0;
  for (Scenario s : {Scenario::coverage, Scenario::simulate, Scenario::optimize_prob,
                     Scenario::optimize_coded, Scenario::compare}) {
    ExperimentConfig c;
    c.scenario = s;
    c.files = 30;
    c.cache_size = 5;
    c.gamma_db = {-10.0, 0.0};
    c.antennas = {3, 4};
    c.trials = 20000;
    c.seed = 1400;
    c.metrics = {Metric::fot, Metric::ese};
    if (s == Scenario::optimize_prob) c.schemes = {Scheme::mf, Scheme::zf};
    c.out_dir = (root / std::string(to_string(s))).string();
    const auto first = write_outputs(c, run_experiment(c));
    std::vector<std::string> before;
    for (const auto& p : first) before.push_back(slurp(p));
    const ExperimentConfig replay = load_config(fs::path(c.out_dir) / "manifest.json");
    const auto second = write_outputs(replay, run_experiment(replay));
    for (std::size_t i = 0; i < first.size(); ++i) {
      ++files;
      identical += i < second.size() && first[i] == second[i] && before[i] == slurp(second[i]);
    }
    if (second.size() != first.size()) ++files;
  }
  fs::remove_all(root);
  o.pass = files > 0 && identical == files;
  o.detail = fmt("%d/%d output files byte-identical after manifest replay (5 scenarios)",
                 identical, files);
  return o;
}

}  // namespace

// Optional arguments select criteria by number; none runs all of them.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"closed-form spot value", c1_closed_form},
      {"MF bound sandwich", c2_bound_sandwich},
      {"bound coincidence", c3_coincidence},
      {"ZF approximation quality", c4_zf_approximation},
      {"gain distributions", c5_gain_distributions},
      {"exact vs simulation grid", c6_exact_vs_sim},
      {"probabilistic optimizer", c7_probabilistic_optimizer},
      {"uniform popularity symmetry", c8_uniform_symmetry},
      {"greedy vs exhaustive", c9_greedy_vs_exhaustive},
      {"SIC independence gap", c10_sic_independence},
      {"quantized CSI limit", c11_quantized_limit},
      {"monotonicity", c12_monotonicity},
      {"rate integral consistency", c13_rate_consistency},
      {"manifest determinism", c14_determinism},
  };
  int failed = 0;
  int ran = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    if (!only.empty() && std::find(only.begin(), only.end(), index) == only.end()) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    failed += !o.pass;
    ++ran;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
