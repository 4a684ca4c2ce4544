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


#include <cmath>

#include "cachebeam/channel.hpp"
#include "cachebeam/error.hpp"
#include "doctest.h"
#include "oracle_values.hpp"

using namespace cachebeam;
using namespace cachebeam::oracle;

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::mf, Scheme::zf, Scheme::no_mf, Scheme::o_zf}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("mmse"), Error);
}

TEST_CASE("beamformers have unit norm and the intended gains") {
  Rng rng = make_stream(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelMatrix h = sample_rayleigh(4, rng);
    const Beamformer mf = mf_beamformer(h);
    CHECK(mf.norm() == doctest::Approx(1.0));
    CHECK(effective_gain(h, mf) == doctest::Approx(h.squaredNorm()));

    const ChannelMatrix others = sample_rayleigh(2, 4, rng);
    const Beamformer zf = zf_beamformer(h, others);
    CHECK(zf.norm() == doctest::Approx(1.0));
    for (int i = 0; i < others.rows(); ++i) {
      CHECK(effective_gain(others.row(i), zf) < 1e-20);
    }
    CHECK(effective_gain(h, zf) <= h.squaredNorm() * (1.0 + 1e-12));
  }
}

TEST_CASE("zero-forcing needs enough antennas") {
  Rng rng = make_stream(1, 0);
  const ChannelMatrix h = sample_rayleigh(2, rng);
  const ChannelMatrix others = sample_rayleigh(2, 2, rng);
  CHECK_THROWS_AS(zf_beamformer(h, others), Error);
}

TEST_CASE("rayleigh entries have unit variance") {
  Rng rng = make_stream(5, 0);
  const ChannelMatrix h = sample_rayleigh(20000, 2, rng);
  CHECK(h.squaredNorm() / h.size() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("quantization loss") {
  CHECK(csi_quantization_zeta(4, 3) == doctest::Approx(kZetaB4L3).epsilon(1e-12));
  CHECK(csi_quantization_zeta(20, 3) == doctest::Approx(kZetaB20L3).epsilon(1e-12));
  CHECK(csi_quantization_zeta(20, 4) == doctest::Approx(kZetaB20L4).epsilon(1e-12));
  double previous = 0.0;
  for (int b = 1; b <= 40; ++b) {
    const double z = csi_quantization_zeta(b, 4);
    CHECK(z > previous);
    CHECK(z < 1.0);
    previous = z;
  }
  CHECK_THROWS_AS(csi_quantization_zeta(0, 4), Error);
  CHECK_THROWS_AS(csi_quantization_zeta(4, 1), Error);
}

TEST_CASE("gain laws per role") {
  NetworkParams p;
  p.antennas = 4;
  p.cluster_size = 3;
  const GainModel mf = GainModel::for_role(Scheme::mf, GainRole::desired, p);
  CHECK(mf.law == GainModel::Law::gamma);
  CHECK(mf.shape == 4.0);
  const GainModel zf = GainModel::for_role(Scheme::zf, GainRole::desired, p);
  CHECK(zf.shape == 2.0);
  CHECK(GainModel::for_role(Scheme::no_mf, GainRole::serving_set_interferer, p).shape == 4.0);
  CHECK(GainModel::for_role(Scheme::mf, GainRole::far_interferer, p).mean() == 1.0);
  CHECK_THROWS_AS(GainModel::for_role(Scheme::zf, GainRole::intra_cluster_interferer, p), Error);
  p.feedback_bits = 4;
  const double zeta = csi_quantization_zeta(4, 4);
  CHECK(GainModel::for_role(Scheme::zf, GainRole::desired, p).scale == doctest::Approx(zeta));
  CHECK(GainModel::for_role(Scheme::zf, GainRole::intra_cluster_interferer, p).mean() ==
        doctest::Approx(1.0 - zeta));
  CHECK_THROWS_AS(GainModel::for_role(Scheme::no_mf, GainRole::desired, p), Error);
}

TEST_CASE("sampled gains have the model mean") {
  Rng rng = make_stream(9, 0);
  const GainModel g{GainModel::Law::gamma, 3.0, 0.5};
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += sample_effective_gain(g, rng);
  CHECK(sum / 100000 == doctest::Approx(1.5).epsilon(0.01));
}
