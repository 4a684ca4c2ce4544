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

#include "cachebeam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cachebeam/error.hpp"

namespace cachebeam {

namespace {

constexpr int kWindowPointsPerClusterMember = 30;
constexpr int kMaxResamples = 1000000;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

void NetworkParams::validate() const {
  std::ostringstream os;
  if (!(sbs_density > 0.0)) os << "sbs_density must be positive; ";
  if (!(path_loss_exponent > 2.0)) os << "path_loss_exponent must exceed 2; ";
  if (antennas < 1) os << "antennas must be >= 1; ";
  if (cluster_size < 2) os << "cluster_size must be >= 2; ";
  if (!(sir_threshold >= 0.0) || !std::isfinite(sir_threshold))
    os << "sir_threshold must be finite and non-negative; ";
  if (feedback_bits && *feedback_bits < 1) os << "feedback_bits must be >= 1; ";
  const auto msg = os.str();
  if (!msg.empty()) raise(ErrorCode::domain, "invalid network parameters: " + msg);
}

void NetworkParams::validate_zf() const {
  validate();
  if (antennas < cluster_size) {
    std::ostringstream os;
    os << "zero-forcing needs antennas >= cluster_size (L=" << antennas
       << ", K=" << cluster_size << ")";
    raise(ErrorCode::infeasible, os.str());
  }
}

double default_window_radius(const NetworkParams& params) {
  params.validate();
  const double points = kWindowPointsPerClusterMember * params.cluster_size;
  return std::sqrt(points / (params.sbs_density * std::numbers::pi));
}

double window_tail_interference(const NetworkParams& params, double window_radius) {
  require(window_radius > 0.0, ErrorCode::domain, "window radius must be positive");
  const double a = params.path_loss_exponent;
  return 2.0 * std::numbers::pi * params.sbs_density * std::pow(window_radius, 2.0 - a) /
         (a - 2.0);
}

void sample_distances(const NetworkParams& params, double window_radius, Rng& rng,
                      std::vector<double>& out, SamplingReport* report) {
  require(window_radius > 0.0, ErrorCode::domain, "window radius must be positive");
  // Squared distances of a planar PPP seen from the origin are the arrival
  // times of a 1-D Poisson process with rate lambda*pi, so the points come out
  // sorted and the count inside the disc is Poisson(lambda*pi*R^2).
  const double rate = params.sbs_density * std::numbers::pi;
  const double area_limit = window_radius * window_radius;
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    out.clear();
    double r2 = 0.0;
    for (;;) {
      r2 += standard_exponential(rng) / rate;
      if (r2 > area_limit) break;
      out.push_back(std::sqrt(r2));
    }
    if (report) ++report->draws;
    if (static_cast<int>(out.size()) >= params.cluster_size) return;
    if (report) ++report->rejected;
  }
  raise(ErrorCode::domain, "window too small: could not place cluster_size SBSs");
}

Realization sample_realization(const NetworkParams& params, double window_radius,
                               Rng& rng, SamplingReport* report) {
  params.validate();
  Realization out;
  out.window_radius = window_radius;
  sample_distances(params, window_radius, rng, out.distances, report);
  return out;
}

double kth_distance_pdf(int k, double sbs_density, double r) {
  require(k >= 1, ErrorCode::domain, "rank k must be >= 1");
  require(r > 0.0, ErrorCode::domain, "distance must be positive");
  require(sbs_density > 0.0, ErrorCode::domain, "density must be positive");
  const double z = sbs_density * std::numbers::pi * r * r;
  return 2.0 * std::exp(k * std::log(z) - z - std::lgamma(static_cast<double>(k))) / r;
}

double joint_kK_pdf(int k, int cluster_size, double sbs_density, double r_k, double r_K) {
  require(k >= 1 && k < cluster_size, ErrorCode::domain, "joint pdf needs 1 <= k < K");
  require(r_k > 0.0 && r_K > 0.0, ErrorCode::domain, "radii must be positive");
  if (r_k >= r_K) return 0.0;
  const double lp = sbs_density * std::numbers::pi;
  const int K = cluster_size;
  const double log_norm = std::log(4.0) + K * std::log(lp) -
                          std::lgamma(static_cast<double>(K - k)) -
                          std::lgamma(static_cast<double>(k));
  const double gap = r_K * r_K - r_k * r_k;
  return std::exp(log_norm + std::log(r_k * r_K) + (k - 1) * std::log(r_k * r_k) +
                  (K - k - 1) * std::log(gap) - lp * r_K * r_K);
}

double delta_ratio_pdf(int k, int cluster_size, double x) {
  require(k >= 1 && k < cluster_size, ErrorCode::domain, "delta pdf needs 1 <= k < K");
  require(x >= 0.0 && x <= 1.0, ErrorCode::domain, "delta must lie in [0, 1]");
  const int K = cluster_size;
  if (x == 0.0) return 0.0;
  if (x == 1.0) return K - k - 1 == 0 ? 2.0 * (K - 1) : 0.0;
  const double log_norm =
      std::log(2.0) + log_factorial(K - 1) - log_factorial(k - 1) - log_factorial(K - k - 1);
  return std::exp(log_norm + (2 * k - 1) * std::log(x) + (K - k - 1) * std::log1p(-x * x));
}

double delta_ratio_cdf(int k, int cluster_size, double x) {
  require(k >= 1 && k < cluster_size, ErrorCode::domain, "delta cdf needs 1 <= k < K");
  require(x >= 0.0 && x <= 1.0, ErrorCode::domain, "delta must lie in [0, 1]");
  const int K = cluster_size;
  double tail = 0.0;
  const double x2 = x * x;
  for (int i = 0; i <= k - 1; ++i) {
    const double log_coef =
        log_factorial(K - 1) - log_factorial(K - k + i) - log_factorial(k - 1 - i);
    tail += std::exp(log_coef) * std::pow(x2, k - 1 - i) * std::pow(1.0 - x2, K - k + i);
  }
  return 1.0 - tail;
}

}  // namespace cachebeam
