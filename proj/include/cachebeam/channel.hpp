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

#ifndef CACHEBEAM_CHANNEL_HPP
#define CACHEBEAM_CHANNEL_HPP

#include <string_view>

#include <Eigen/Dense>

#include "cachebeam/geometry.hpp"
#include "cachebeam/random.hpp"

namespace cachebeam {

// Transmission schemes.  MF/ZF serve one user per SBS (probabilistic
// caching); NO-MF and O-ZF deliver coded packets from several SBSs.
enum class Scheme { mf, zf, no_mf, o_zf };

std::string_view to_string(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view text);
inline bool is_zero_forcing(Scheme s) { return s == Scheme::zf || s == Scheme::o_zf; }

// Rows are users, columns are antennas.
using ChannelMatrix = Eigen::MatrixXcd;
using Beamformer = Eigen::VectorXcd;

enum class GainRole {
  desired,
  intra_cluster_interferer,  // other members of the K-cluster
  serving_set_interferer,    // NO-MF: not-yet-decoded serving SBSs
  far_interferer,            // everything outside the cluster / serving set
};

// Distribution of an effective channel gain |h w|^2.
struct GainModel {
  enum class Law { gamma, exponential };

  Law law = Law::exponential;
  double shape = 1.0;
  double scale = 1.0;  // exponential: the mean

  double mean() const { return shape * scale; }
  void validate() const;

  static GainModel for_role(Scheme scheme, GainRole role, const NetworkParams& params);
};

// 1 x L (or rows x L) i.i.d. CN(0, 1) entries.
ChannelMatrix sample_rayleigh(int antennas, Rng& rng);
ChannelMatrix sample_rayleigh(int rows, int antennas, Rng& rng);

// w = h^H / |h|.
Beamformer mf_beamformer(const ChannelMatrix& h);

// Unit-norm projection of h^H onto the orthogonal complement of the
// co-scheduled users' channels, so that others * w = 0.  An empty `others`
// reduces to mf_beamformer.
Beamformer zf_beamformer(const ChannelMatrix& h, const ChannelMatrix& others);

double effective_gain(const ChannelMatrix& h, const Beamformer& w);

// zeta = 1 - 2^B beta(2^B, L/(L-1)), the desired-gain loss from B-bit
// channel direction feedback.
double csi_quantization_zeta(int feedback_bits, int antennas);

double sample_effective_gain(const GainModel& model, Rng& rng);

}  // namespace cachebeam

#endif  // CACHEBEAM_CHANNEL_HPP
