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

#ifndef CACHEBEAM_COVERAGE_HPP
#define CACHEBEAM_COVERAGE_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "cachebeam/channel.hpp"
#include "cachebeam/geometry.hpp"

namespace cachebeam {

// How a coverage value was obtained.  Approximate bounds come from replacing
// the random distance ratio by its RMS value and are not guaranteed to bracket
// the exact value.
enum class Fidelity {
  exact,
  upper_bound,
  lower_bound,
  approx_upper,
  approx_lower,
  closed_form,
};

std::string_view to_string(Fidelity fidelity) noexcept;
Fidelity parse_fidelity(std::string_view text);

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
};

// Coverage probabilities P_cov^k for k = 1..size(), one scheme and one
// threshold.  For NO-MF the profile is indexed 1..serving_set.
struct CoverageProfile {
  Scheme scheme = Scheme::mf;
  Fidelity fidelity = Fidelity::exact;
  std::vector<double> values;
  double sir_threshold = 0.0;
  std::optional<int> feedback_bits;
  int serving_set = 0;  // NO-MF only

  double at(int k) const { return values.at(static_cast<std::size_t>(k - 1)); }
};

// Exact evaluation costs grow with the number of Laplace derivatives; beyond
// these orders callers must fall back to bounds.
inline constexpr int kExactMaxAntennas = 8;
inline constexpr int kExactMaxZfExcess = 6;  // L - K

bool exact_within_cap(Scheme scheme, const NetworkParams& params);

// Exact coverage with MF beamforming, served by the k-th nearest SBS.
double cov_mf_exact(int k, const NetworkParams& params);

// Alzer sandwich: lower uses x = 1, upper uses x = (L!)^(-1/L).
BoundPair cov_mf_bounds(int k, const NetworkParams& params);

// Single-antenna, alpha = 4 closed form.
double cov_mf_closed_alpha4(int k, double sir_threshold);

// Exact coverage with ZF beamforming (needs L >= K).
double cov_zf_exact(int k, const NetworkParams& params);

// RMS-distance-ratio approximate bounds; lower uses kappa = 1.
BoundPair cov_zf_approx_bounds(int k, const NetworkParams& params);

// Exact coverage for the k-th SIC stage out of `serving_set` concurrent MF
// transmitters.
double cov_nomf_exact(int k, int serving_set, const NetworkParams& params);

BoundPair cov_nomf_bounds(int k, int serving_set, const NetworkParams& params);

// Bounds under B-bit limited feedback (params.feedback_bits must be set).
// The MF pair is a true sandwich; the ZF pair shares the RMS approximation of
// the perfect-CSI ZF bounds.
BoundPair cov_quantized(Scheme scheme, int k, const NetworkParams& params);

// Tagged dispatch.  `serving_set` is used by NO-MF only.
double coverage(Scheme scheme, Fidelity fidelity, int k, const NetworkParams& params,
                int serving_set = 0);

// Exact when the scheme is within the exact-mode cap and CSI is perfect,
// otherwise the (approximate) lower bound.
Fidelity default_fidelity(Scheme scheme, const NetworkParams& params);

// The bound used in place of exact values: lower bound for MF/NO-MF,
// approximate lower bound for ZF/O-ZF.
Fidelity lower_fidelity(Scheme scheme);
Fidelity upper_fidelity(Scheme scheme);

CoverageProfile coverage_profile(Scheme scheme, Fidelity fidelity,
                                 const NetworkParams& params, int serving_set = 0);

}  // namespace cachebeam

#endif  // CACHEBEAM_COVERAGE_HPP
