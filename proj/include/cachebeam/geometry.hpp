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

#ifndef CACHEBEAM_GEOMETRY_HPP
#define CACHEBEAM_GEOMETRY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cachebeam/random.hpp"

namespace cachebeam {

// Physical-layer description of the network seen by the typical user.
struct NetworkParams {
  double sbs_density = 1.0;          // SBSs per unit area
  double path_loss_exponent = 4.0;   // must exceed 2
  int antennas = 1;                  // transmit antennas per SBS
  int cluster_size = 3;              // nearest SBSs forming the user-centric cluster
  double sir_threshold = 1.0;        // linear
  std::optional<int> feedback_bits;  // empty means perfect CSI

  void validate() const;
  // ZF-family schemes additionally need antennas >= cluster_size.
  void validate_zf() const;
  bool perfect_csi() const { return !feedback_bits.has_value(); }
};

// Sorted SBS distances around the origin inside a disc of radius window_radius.
struct Realization {
  std::vector<double> distances;
  double window_radius = 0.0;
};

struct SamplingReport {
  std::uint64_t draws = 0;
  std::uint64_t rejected = 0;  // draws with fewer than cluster_size points

  double rejection_rate() const {
    return draws == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(draws);
  }
};

// Smallest radius with sbs_density * pi * R^2 >= 30 * cluster_size.
double default_window_radius(const NetworkParams& params);

// Mean interference power (unit-mean gains) from SBSs beyond window_radius:
// 2 pi lambda R^(2 - alpha) / (alpha - 2).
double window_tail_interference(const NetworkParams& params, double window_radius);

// Draws a PPP realization conditioned on at least cluster_size points in the
// window.  Under-filled draws are rejected and counted in `report`.
Realization sample_realization(const NetworkParams& params, double window_radius,
                               Rng& rng, SamplingReport* report = nullptr);

// Allocation-free variant used by the simulation hot loop.
void sample_distances(const NetworkParams& params, double window_radius, Rng& rng,
                      std::vector<double>& out, SamplingReport* report = nullptr);

// Density of the distance to the k-th nearest SBS.
double kth_distance_pdf(int k, double sbs_density, double r);

// Joint density of (r_k, r_K), zero outside 0 < r_k < r_K.
double joint_kK_pdf(int k, int cluster_size, double sbs_density, double r_k, double r_K);

// Density and CDF of delta_k = r_k / r_K on [0, 1].
double delta_ratio_pdf(int k, int cluster_size, double x);
double delta_ratio_cdf(int k, int cluster_size, double x);

}  // namespace cachebeam

#endif  // CACHEBEAM_GEOMETRY_HPP
