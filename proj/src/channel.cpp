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

#include "cachebeam/channel.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "cachebeam/error.hpp"

namespace cachebeam {

namespace {

constexpr double kNullingTolerance = 1e-10;

}  // namespace

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::mf: return "mf";
    case Scheme::zf: return "zf";
    case Scheme::no_mf: return "no-mf";
    case Scheme::o_zf: return "o-zf";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "mf" || text == "MF") return Scheme::mf;
  if (text == "zf" || text == "ZF") return Scheme::zf;
  if (text == "no-mf" || text == "NO-MF" || text == "no_mf") return Scheme::no_mf;
  if (text == "o-zf" || text == "O-ZF" || text == "o_zf") return Scheme::o_zf;
  raise(ErrorCode::config, "unknown scheme '" + std::string(text) + "'");
}

void GainModel::validate() const {
  require(shape > 0.0 && scale > 0.0, ErrorCode::domain,
          "gain model needs positive shape and scale");
  require(law == Law::gamma || shape == 1.0, ErrorCode::domain,
          "exponential gain model must have shape 1");
}

GainModel GainModel::for_role(Scheme scheme, GainRole role, const NetworkParams& params) {
  params.validate();
  const int L = params.antennas;
  const int K = params.cluster_size;
  const bool zf = is_zero_forcing(scheme);
  if (zf) params.validate_zf();
  double zeta = 1.0;
  if (!params.perfect_csi()) {
    require(scheme == Scheme::mf || scheme == Scheme::zf, ErrorCode::domain,
            "quantized CSI is modelled for MF and ZF only");
    zeta = csi_quantization_zeta(*params.feedback_bits, L);
  }
  switch (role) {
    case GainRole::desired:
      return {Law::gamma, static_cast<double>(zf ? L - K + 1 : L), zeta};
    case GainRole::intra_cluster_interferer:
      if (!zf) return {Law::exponential, 1.0, 1.0};
      require(!params.perfect_csi(), ErrorCode::domain,
              "intra-cluster interference is nulled under perfect-CSI zero-forcing");
      return {Law::exponential, 1.0, 1.0 - zeta};
    case GainRole::serving_set_interferer:
      require(scheme == Scheme::no_mf, ErrorCode::domain,
              "serving-set interferers exist only in NO-MF");
      return {Law::gamma, static_cast<double>(L), 1.0};
    case GainRole::far_interferer:
      return {Law::exponential, 1.0, 1.0};
  }
  raise(ErrorCode::internal, "unhandled gain role");
}

ChannelMatrix sample_rayleigh(int antennas, Rng& rng) { return sample_rayleigh(1, antennas, rng); }

ChannelMatrix sample_rayleigh(int rows, int antennas, Rng& rng) {
  require(antennas >= 1 && rows >= 0, ErrorCode::domain, "channel needs L >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ChannelMatrix h(rows, antennas);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < antennas; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(i, j) = {re, im};
    }
  }
  return h;
}

Beamformer mf_beamformer(const ChannelMatrix& h) {
  require(h.rows() == 1, ErrorCode::domain, "MF beamformer expects a 1 x L channel");
  const double norm = h.norm();
  require(norm > 0.0, ErrorCode::domain, "MF beamformer undefined for a zero channel");
  return h.adjoint() / norm;
}

Beamformer zf_beamformer(const ChannelMatrix& h, const ChannelMatrix& others) {
  require(h.rows() == 1, ErrorCode::domain, "ZF beamformer expects a 1 x L target channel");
  if (others.rows() == 0) return mf_beamformer(h);
  const Eigen::Index L = h.cols();
  require(others.cols() == L, ErrorCode::domain, "channel dimensions disagree");
  require(others.rows() < L, ErrorCode::infeasible,
          "zero-forcing needs more antennas than co-scheduled users");

  // h_j w = <h_j^H, w>, so w must be orthogonal to the columns of others^H.
  // Modified Gram-Schmidt with one re-orthogonalisation pass.
  const ChannelMatrix cols = others.adjoint();
  ChannelMatrix basis(L, cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Eigen::VectorXcd v = cols.col(j);
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) v -= basis.col(i) * basis.col(i).dot(v);
    }
    const double n = v.norm();
    require(n > kNullingTolerance * original && n > 0.0, ErrorCode::domain,
            "co-scheduled channels are numerically rank deficient");
    basis.col(j) = v / n;
  }
  Eigen::VectorXcd w = h.adjoint();
  for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.adjoint() * w);
  const double n = w.norm();
  require(n > kNullingTolerance * h.norm(), ErrorCode::domain,
          "target channel lies in the span of the co-scheduled channels");
  w /= n;
  const double residual = (others * w).cwiseAbs().maxCoeff();
  require(residual <= kNullingTolerance, ErrorCode::domain,
          "zero-forcing residual above tolerance");
  return w;
}

double effective_gain(const ChannelMatrix& h, const Beamformer& w) {
  require(h.rows() == 1 && h.cols() == w.size(), ErrorCode::domain,
          "gain needs a 1 x L channel and an L-vector");
  return std::norm((h * w)(0, 0));
}

double csi_quantization_zeta(int feedback_bits, int antennas) {
  require(feedback_bits >= 1, ErrorCode::domain, "feedback needs at least one bit");
  require(feedback_bits <= 62, ErrorCode::domain, "feedback bits beyond 62 overflow the codebook size");
  require(antennas >= 2, ErrorCode::domain,
          "direction quantization is undefined for a single antenna");
  const double codebook = std::ldexp(1.0, feedback_bits);
  const double y = static_cast<double>(antennas) / (antennas - 1);
  // 2^B beta(2^B, y) = 2^B Gamma(y) Gamma(2^B) / Gamma(2^B + y)
  const double loss =
      codebook * std::tgamma(y) * boost::math::tgamma_delta_ratio(codebook, y);
  return 1.0 - loss;
}

double sample_effective_gain(const GainModel& model, Rng& rng) {
  model.validate();
  if (model.law == GainModel::Law::exponential) return model.scale * standard_exponential(rng);
  if (model.shape == std::floor(model.shape) && model.shape <= 64.0)
    return model.scale * integer_gamma(static_cast<int>(model.shape), rng);
  std::gamma_distribution<double> gamma(model.shape, model.scale);
  return gamma(rng);
}

}  // namespace cachebeam
