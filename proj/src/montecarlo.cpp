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


#include "cachebeam/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "cachebeam/error.hpp"

namespace cachebeam {

namespace {

// Running mean and sum of squared deviations; merged with Chan's update.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * b.n / out.n;
    out.m2 = a.m2 + b.m2 + delta * delta * a.n * b.n / out.n;
    return out;
  }
};

struct ChunkResult {
  std::vector<Moments> moments;
  SamplingReport report;
};

// Effective gains seen by the typical user in one trial.  serve[j] is the
// gain of SBS j when it beams to the user; leak[j] when it serves someone
// else.  Only the first `ranks` SBSs can serve.
class GainSampler {
 public:
  GainSampler(const TrialPlan& plan, int ranks)
      : fidelity_(plan.fidelity),
        zero_forcing_(is_zero_forcing(plan.scheme)),
        antennas_(plan.params.antennas),
        cluster_(plan.params.cluster_size),
        ranks_(ranks) {
    const NetworkParams& p = plan.params;
    const Scheme law_scheme = plan.scheme == Scheme::o_zf ? Scheme::zf : plan.scheme;
    const GainModel desired = GainModel::for_role(law_scheme, GainRole::desired, p);
    desired_shape_ = static_cast<int>(desired.shape);
    desired_scale_ = desired.scale;
    if (zero_forcing_ && !p.perfect_csi()) {
      intra_mean_ =
          GainModel::for_role(law_scheme, GainRole::intra_cluster_interferer, p).scale;
    }
  }

  void draw(std::size_t points, Rng& rng) {
    serve.resize(static_cast<std::size_t>(ranks_));
    leak.resize(points);
    if (fidelity_ == SimFidelity::gain_level) {
      for (double& g : serve) g = desired_scale_ * integer_gamma(desired_shape_, rng);
      for (std::size_t j = 0; j < points; ++j) {
        const bool intra = zero_forcing_ && j < static_cast<std::size_t>(cluster_);
        leak[j] = intra ? (intra_mean_ == 0.0 ? 0.0 : intra_mean_ * standard_exponential(rng))
                        : standard_exponential(rng);
      }
      return;
    }
    for (double& g : serve) {
      const ChannelMatrix h = sample_rayleigh(antennas_, rng);
      if (zero_forcing_) {
        // Channels to the other cluster users are auxiliary draws.
        const ChannelMatrix others = sample_rayleigh(cluster_ - 1, antennas_, rng);
        g = effective_gain(h, zf_beamformer(h, others));
      } else {
        g = effective_gain(h, mf_beamformer(h));
      }
    }
    for (std::size_t j = 0; j < points; ++j) {
      const ChannelMatrix h = sample_rayleigh(antennas_, rng);
      if (zero_forcing_ && j < static_cast<std::size_t>(cluster_)) {
        // SBS j serves its own user and nulls the typical user among the rest.
        const ChannelMatrix own = sample_rayleigh(antennas_, rng);
        ChannelMatrix others(cluster_ - 1, antennas_);
        others.row(0) = h.row(0);
        if (cluster_ > 2) others.bottomRows(cluster_ - 2) = sample_rayleigh(cluster_ - 2, antennas_, rng);
        leak[j] = effective_gain(h, zf_beamformer(own, others));
      } else {
        const ChannelMatrix own = sample_rayleigh(antennas_, rng);
        leak[j] = effective_gain(h, mf_beamformer(own));
      }
    }
  }

  std::vector<double> serve;
  std::vector<double> leak;

 private:
  SimFidelity fidelity_;
  bool zero_forcing_;
  int antennas_;
  int cluster_;
  int ranks_;
  int desired_shape_ = 1;
  double desired_scale_ = 1.0;
  double intra_mean_ = 0.0;
};

// Per-trial state shared by every estimator.
struct Trial {
  std::vector<double> distances;
  std::vector<double> power;  // r^-alpha
  GainSampler gains;
  double tail = 0.0;
  double leak_total = 0.0;

  Trial(const TrialPlan& plan, int ranks) : gains(plan, ranks) {}

  // SIR when SBS k (0-based) serves the user and every other SBS serves its
  // own user.
  double sir_single(int k) const {
    const double own = gains.leak[k] * power[k];
    const double interference = std::max(leak_total - own, 0.0) + tail;
    return gains.serve[k] * power[k] / interference;
  }

  // SIR at SIC stage k (0-based) with SBSs 0..b-1 all beaming to the user and
  // stages before k already cancelled.
  double sir_stage(int k, int b) const {
    double interference = tail;
    for (int j = k + 1; j < b; ++j) interference += gains.serve[j] * power[j];
    for (std::size_t j = static_cast<std::size_t>(b); j < power.size(); ++j) {
      interference += gains.leak[j] * power[j];
    }
    return gains.serve[k] * power[k] / interference;
  }
};

std::vector<SimEstimate> run(
    const TrialPlan& plan, int ranks, std::size_t outputs,
    const std::function<void(const Trial&, Rng&, std::vector<double>&)>& record) {
  plan.validate();
  const NetworkParams& params = plan.params;
  const double radius =
      plan.window_radius > 0.0 ? plan.window_radius : default_window_radius(params);
  const double tail = window_tail_interference(params, radius);
  const double alpha = params.path_loss_exponent;
  const std::uint64_t chunks = (plan.trials + plan.chunk_size - 1) / plan.chunk_size;

  std::vector<ChunkResult> results(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    try {
      Trial trial(plan, ranks);
      trial.tail = tail;
      std::vector<double> values(outputs);
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        Rng rng = make_stream(plan.seed, c);
        ChunkResult& out = results[c];
        out.moments.assign(outputs, Moments{});
        const std::uint64_t begin = c * plan.chunk_size;
        const std::uint64_t count = std::min(plan.chunk_size, plan.trials - begin);
        for (std::uint64_t t = 0; t < count; ++t) {
          sample_distances(params, radius, rng, trial.distances, &out.report);
          const std::size_t points = trial.distances.size();
          trial.power.resize(points);
          for (std::size_t j = 0; j < points; ++j) {
            trial.power[j] = alpha == 4.0
                                 ? 1.0 / (trial.distances[j] * trial.distances[j] *
                                          trial.distances[j] * trial.distances[j])
                                 : std::pow(trial.distances[j], -alpha);
          }
          trial.gains.draw(points, rng);
          trial.leak_total = 0.0;
          for (std::size_t j = 0; j < points; ++j) {
            trial.leak_total += trial.gains.leak[j] * trial.power[j];
          }
          record(trial, rng, values);
          for (std::size_t o = 0; o < outputs; ++o) out.moments[o].add(values[o]);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  unsigned workers = plan.workers != 0 ? plan.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Pairwise reduction in chunk order, independent of the worker count.
  std::vector<ChunkResult> level = std::move(results);
  while (level.size() > 1) {
    std::vector<ChunkResult> merged((level.size() + 1) / 2);
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (2 * i + 1 == level.size()) {
        merged[i] = std::move(level[2 * i]);
        continue;
      }
      const ChunkResult& a = level[2 * i];
      const ChunkResult& b = level[2 * i + 1];
      merged[i].moments.resize(outputs);
      for (std::size_t o = 0; o < outputs; ++o) {
        merged[i].moments[o] = Moments::merge(a.moments[o], b.moments[o]);
      }
      merged[i].report.draws = a.report.draws + b.report.draws;
      merged[i].report.rejected = a.report.rejected + b.report.rejected;
    }
    level = std::move(merged);
  }

  std::vector<SimEstimate> out(outputs);
  const ChunkResult& total = level.front();
  for (std::size_t o = 0; o < outputs; ++o) {
    const Moments& m = total.moments[o];
    SimEstimate& e = out[o];
    e.mean = m.mean;
    e.trials = static_cast<std::uint64_t>(m.n);
    e.std_error = m.n > 1.0 ? std::sqrt(m.m2 / (m.n - 1.0) / m.n) : 0.0;
    e.truncation_bound = tail;
    e.rejection_rate = total.report.rejection_rate();
  }
  return out;
}

int ranks_for(const TrialPlan& plan, int serving_set) {
  if (plan.scheme == Scheme::no_mf) {
    if (serving_set < 1 || serving_set > plan.params.cluster_size) {
      raise(ErrorCode::domain, "NO-MF needs a serving set size in 1..K");
    }
    return serving_set;
  }
  return plan.params.cluster_size;
}

double rate_of(double s) { return std::log2(1.0 + s); }

// Index of a file drawn from the popularity profile.
class FileSampler {
 public:
  explicit FileSampler(const PopularityProfile& popularity) : cumulative_(popularity.p.size()) {
    popularity.validate();
    double sum = 0.0;
    for (std::size_t n = 0; n < cumulative_.size(); ++n) cumulative_[n] = sum += popularity.p[n];
    cumulative_.back() = 1.0;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = open_uniform(rng);
    return static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

enum class Score { success, rate };

SimEstimate simulate_prob(const TrialPlan& plan, const ProbCachePolicy& policy,
                          const PopularityProfile& popularity, Score score) {
  require(plan.scheme == Scheme::mf || is_zero_forcing(plan.scheme), ErrorCode::domain,
          "probabilistic caching uses MF or ZF transmission");
  require(policy.a.size() == popularity.p.size(), ErrorCode::domain,
          "policy length must match the popularity profile");
  for (double a : policy.a) {
    require(a >= 0.0 && a <= 1.0, ErrorCode::domain, "caching probabilities must lie in [0, 1]");
  }
  const FileSampler files(popularity);
  const int K = plan.params.cluster_size;
  const double gamma = plan.params.sir_threshold;
  return run(plan, K, 1, [&](const Trial& trial, Rng& rng, std::vector<double>& out) {
    const double a = policy.a[files(rng)];
    out[0] = 0.0;
    for (int k = 0; k < K; ++k) {
      if (open_uniform(rng) >= a) continue;  // SBS k does not hold the file
      const double s = trial.sir_single(k);
      out[0] = score == Score::success ? (s >= gamma ? 1.0 : 0.0) : rate_of(s);
      return;
    }
  }).front();
}

SimEstimate simulate_coded(const TrialPlan& plan, const CodedCachePolicy& policy,
                           const PopularityProfile& popularity, Score score) {
  require(plan.scheme == Scheme::no_mf || is_zero_forcing(plan.scheme), ErrorCode::domain,
          "coded caching uses NO-MF or O-ZF transmission");
  require(policy.b.size() == popularity.p.size(), ErrorCode::domain,
          "policy length must match the popularity profile");
  const int K = plan.params.cluster_size;
  for (const Fragments& f : policy.b) {
    require(!f.cached() || f.count() <= K, ErrorCode::domain,
            "fragment count exceeds the cluster size");
  }
  const FileSampler files(popularity);
  const double gamma = plan.params.sir_threshold;
  const bool sic = plan.scheme == Scheme::no_mf;
  return run(plan, K, 1, [&](const Trial& trial, Rng& rng, std::vector<double>& out) {
    const Fragments f = policy.b[files(rng)];
    out[0] = 0.0;
    if (!f.cached()) return;
    const int b = f.count();
    if (sic) {
      double decoded = 0.0;
      double min_rate = std::numeric_limits<double>::infinity();
      bool alive = true;
      for (int k = 0; k < b; ++k) {
        const double s = trial.sir_stage(k, b);
        alive = alive && s >= gamma;
        if (alive) decoded += 1.0;
        min_rate = std::min(min_rate, rate_of(s));
      }
      out[0] = score == Score::success ? decoded / b : min_rate;
    } else {
      double total = 0.0;
      for (int k = 0; k < b; ++k) {
        const double s = trial.sir_single(k);
        total += score == Score::success ? (s >= gamma ? 1.0 : 0.0) : rate_of(s);
      }
      out[0] = total / b;
    }
  }).front();
}

}  // namespace

std::string_view to_string(SimFidelity fidelity) noexcept {
  return fidelity == SimFidelity::gain_level ? "gain-level" : "construction-level";
}

SimFidelity parse_sim_fidelity(std::string_view text) {
  if (text == "gain-level") return SimFidelity::gain_level;
  if (text == "construction-level") return SimFidelity::construction_level;
  raise(ErrorCode::config, "unknown simulation fidelity '" + std::string(text) + "'");
}

void TrialPlan::validate() const {
  params.validate();
  if (is_zero_forcing(scheme)) params.validate_zf();
  require(trials >= 1, ErrorCode::domain, "a trial plan needs at least one trial");
  require(chunk_size >= 1, ErrorCode::domain, "chunk size must be positive");
  require(window_radius >= 0.0, ErrorCode::domain, "window radius must be non-negative");
  if (!params.perfect_csi()) {
    require(fidelity == SimFidelity::gain_level, ErrorCode::domain,
            "quantized CSI is simulated at the gain level only");
    require(scheme == Scheme::mf || scheme == Scheme::zf, ErrorCode::domain,
            "quantized CSI is modelled for MF and ZF only");
  }
}

double sir(double desired_gain, double desired_distance, std::span<const double> gains,
           std::span<const double> distances, double alpha, double extra_interference) {
  require(gains.size() == distances.size(), ErrorCode::domain,
          "each interferer needs a gain and a distance");
  require(desired_distance > 0.0, ErrorCode::domain, "distance must be positive");
  double interference = extra_interference;
  for (std::size_t j = 0; j < gains.size(); ++j) {
    require(distances[j] > 0.0, ErrorCode::domain, "distance must be positive");
    interference += gains[j] * std::pow(distances[j], -alpha);
  }
  return desired_gain * std::pow(desired_distance, -alpha) / interference;
}

std::vector<SimEstimate> sim_coverage_profile(const TrialPlan& plan, int serving_set) {
  const int ranks = ranks_for(plan, serving_set);
  const double gamma = plan.params.sir_threshold;
  const bool sic = plan.scheme == Scheme::no_mf;
  return run(plan, ranks, static_cast<std::size_t>(ranks),
             [&](const Trial& trial, Rng&, std::vector<double>& out) {
               for (int k = 0; k < ranks; ++k) {
                 const double s = sic ? trial.sir_stage(k, ranks) : trial.sir_single(k);
                 out[k] = s >= gamma ? 1.0 : 0.0;
               }
             });
}

SimEstimate sim_coverage(const TrialPlan& plan, int k, int serving_set) {
  const int ranks = ranks_for(plan, serving_set);
  require(k >= 1 && k <= ranks, ErrorCode::domain, "rank outside the serving range");
  return sim_coverage_profile(plan, serving_set)[k - 1];
}

std::vector<SimEstimate> sim_rate_profile(const TrialPlan& plan, int serving_set) {
  const int ranks = ranks_for(plan, serving_set);
  const bool sic = plan.scheme == Scheme::no_mf;
  return run(plan, ranks, static_cast<std::size_t>(ranks),
             [&](const Trial& trial, Rng&, std::vector<double>& out) {
               for (int k = 0; k < ranks; ++k) {
                 out[k] = rate_of(sic ? trial.sir_stage(k, ranks) : trial.sir_single(k));
               }
             });
}

SicReport sim_sic(const TrialPlan& plan, int serving_set) {
  require(plan.scheme == Scheme::no_mf, ErrorCode::domain,
          "successive decoding is simulated for NO-MF");
  const int b = ranks_for(plan, serving_set);
  const double gamma = plan.params.sir_threshold;
  const auto estimates =
      run(plan, b, 2 * static_cast<std::size_t>(b) + 1,
          [&](const Trial& trial, Rng&, std::vector<double>& out) {
            bool alive = true;
            double decoded = 0.0;
            for (int k = 0; k < b; ++k) {
              const bool ok = trial.sir_stage(k, b) >= gamma;
              alive = alive && ok;
              out[k] = ok ? 1.0 : 0.0;
              out[b + k] = alive ? 1.0 : 0.0;
              decoded += alive ? 1.0 : 0.0;
            }
            out[2 * b] = decoded / b;
          });
  SicReport report;
  report.marginal.assign(estimates.begin(), estimates.begin() + b);
  report.joint.assign(estimates.begin() + b, estimates.begin() + 2 * b);
  report.fot = estimates.back();
  return report;
}

SimEstimate sim_sic_fot(const TrialPlan& plan, int serving_set) {
  return sim_sic(plan, serving_set).fot;
}

SimEstimate sim_afot(const TrialPlan& plan, const ProbCachePolicy& policy,
                     const PopularityProfile& popularity) {
  return simulate_prob(plan, policy, popularity, Score::success);
}

SimEstimate sim_afot(const TrialPlan& plan, const CodedCachePolicy& policy,
                     const PopularityProfile& popularity) {
  return simulate_coded(plan, policy, popularity, Score::success);
}

SimEstimate sim_aese(const TrialPlan& plan, const ProbCachePolicy& policy,
                     const PopularityProfile& popularity) {
  return simulate_prob(plan, policy, popularity, Score::rate);
}

SimEstimate sim_aese(const TrialPlan& plan, const CodedCachePolicy& policy,
                     const PopularityProfile& popularity) {
  return simulate_coded(plan, policy, popularity, Score::rate);
}

}  // namespace cachebeam
