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
#include <optional>
#include <numbers>

#include "cachebeam/coverage.hpp"
#include "cachebeam/error.hpp"
#include "doctest.h"
#include "oracle_values.hpp"

using namespace cachebeam;
using namespace cachebeam::oracle;

namespace {

NetworkParams make(int L, int K, double gamma, double alpha = 4.0) {
  NetworkParams p;
  p.antennas = L;
  p.cluster_size = K;
  p.sir_threshold = gamma;
  p.path_loss_exponent = alpha;
  return p;
}

double db(double x) { return std::pow(10.0, x / 10.0); }

}  // namespace

TEST_CASE("MF single antenna closed form") {
  CHECK(cov_mf_closed_alpha4(1, 1.0) == doctest::Approx(kMfL1K1).epsilon(1e-12));
  CHECK(cov_mf_exact(1, make(1, 3, 1.0)) == doctest::Approx(kMfL1K1).epsilon(1e-10));
  const double ref[] = {kMfL1A4k1g10, kMfL1A4k2g10, kMfL1A4k3g10};
  for (int k = 1; k <= 3; ++k) {
    CHECK(cov_mf_closed_alpha4(k, 10.0) == doctest::Approx(ref[k - 1]).epsilon(1e-10));
    CHECK(cov_mf_exact(k, make(1, 3, 10.0)) == doctest::Approx(ref[k - 1]).epsilon(1e-8));
  }
}

TEST_CASE("MF exact matches reference values") {
  const double a3[] = {kMfL1A3k1g1, kMfL1A3k2g1, kMfL1A3k3g1};
  const double l4[] = {kMfL4k1g1, kMfL4k2g1, kMfL4k3g1};
  for (int k = 1; k <= 3; ++k) {
    CHECK(cov_mf_exact(k, make(1, 3, 1.0, 3.0)) == doctest::Approx(a3[k - 1]).epsilon(1e-8));
    CHECK(cov_mf_exact(k, make(4, 3, 1.0)) == doctest::Approx(l4[k - 1]).epsilon(1e-8));
  }
  CHECK(cov_mf_exact(2, make(2, 3, db(-10), 3.0)) ==
        doctest::Approx(kMfL2k2gm10a3).epsilon(1e-8));
}

TEST_CASE("ZF exact matches reference values") {
  const double l3[] = {kZfL3K3k1g1, kZfL3K3k2g1, kZfL3K3k3g1};
  const double l4[] = {kZfL4K3k1g1, kZfL4K3k2g1, kZfL4K3k3g1};
  for (int k = 1; k <= 3; ++k) {
    CHECK(cov_zf_exact(k, make(3, 3, 1.0)) == doctest::Approx(l3[k - 1]).epsilon(1e-8));
    CHECK(cov_zf_exact(k, make(4, 3, 1.0)) == doctest::Approx(l4[k - 1]).epsilon(1e-8));
  }
  CHECK(cov_zf_exact(2, make(3, 3, db(10), 3.0)) ==
        doctest::Approx(kZfL3K3k2g10a3).epsilon(1e-7));
}

TEST_CASE("single antenna collapses the MF bounds") {
  for (double g : {0.1, 1.0, 10.0}) {
    for (int k = 1; k <= 3; ++k) {
      const NetworkParams p = make(1, 3, g);
      const BoundPair b = cov_mf_bounds(k, p);
      const double exact = cov_mf_exact(k, p);
      CHECK(std::abs(b.lower - b.upper) <= 1e-12);
      CHECK(b.lower == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("L = K collapses the ZF approximate bounds") {
  for (int K : {2, 3, 4}) {
    for (double g : {0.1, 1.0, 10.0}) {
      for (int k = 1; k <= K; ++k) {
        const BoundPair b = cov_zf_approx_bounds(k, make(K, K, g));
        CHECK(std::abs(b.lower - b.upper) <= 1e-12);
      }
    }
  }
}

TEST_CASE("MF bounds sandwich the exact value") {
  for (int L : {2, 3, 4, 6}) {
    for (double gdb : {-10.0, 0.0, 10.0}) {
      for (int k = 1; k <= 3; ++k) {
        const NetworkParams p = make(L, 3, db(gdb));
        const BoundPair b = cov_mf_bounds(k, p);
        const double exact = cov_mf_exact(k, p);
        CHECK(b.lower <= exact + 1e-9);
        CHECK(exact <= b.upper + 1e-9);
      }
    }
  }
}

TEST_CASE("NO-MF bounds sandwich the exact value") {
  for (int b = 1; b <= 3; ++b) {
    for (int k = 1; k <= b; ++k) {
      for (double gdb : {-10.0, 0.0, 10.0}) {
        const NetworkParams p = make(2, 3, db(gdb));
        const BoundPair pair = cov_nomf_bounds(k, b, p);
        const double exact = cov_nomf_exact(k, b, p);
        CHECK(pair.lower <= exact + 1e-9);
        CHECK(exact <= pair.upper + 1e-9);
      }
    }
  }
}

TEST_CASE("NO-MF special cases") {
  const NetworkParams p = make(2, 3, 1.0);
  // A single transmitter is plain MF from the nearest SBS.
  CHECK(cov_nomf_exact(1, 1, p) == doctest::Approx(cov_mf_exact(1, p)).epsilon(1e-10));
  // The last stage sees only far interferers with unit-mean exponential gain
  // and a Gamma(L) desired gain, like ZF with L - K + 1 = L.
  CHECK(cov_nomf_exact(3, 3, p) ==
        doctest::Approx(cov_zf_exact(3, make(4, 3, 1.0))).epsilon(1e-10));
}

TEST_CASE("coverage does not depend on the SBS density") {
  for (double lambda : {0.01, 1.0, 50.0}) {
    NetworkParams p = make(3, 3, 1.0);
    p.sbs_density = lambda;
    CHECK(cov_mf_exact(2, p) == doctest::Approx(cov_mf_exact(2, make(3, 3, 1.0))));
    CHECK(cov_zf_exact(2, p) == doctest::Approx(cov_zf_exact(2, make(3, 3, 1.0))));
  }
}

TEST_CASE("zero threshold means certain coverage") {
  for (Scheme s : {Scheme::mf, Scheme::zf}) {
    CHECK(coverage(s, Fidelity::exact, 2, make(3, 3, 0.0)) == 1.0);
  }
  CHECK(coverage(Scheme::no_mf, Fidelity::exact, 2, make(3, 3, 0.0), 3) == 1.0);
}

TEST_CASE("coverage is monotone in rank and threshold") {
  for (Scheme s : {Scheme::mf, Scheme::zf}) {
    for (Fidelity f : {Fidelity::exact, lower_fidelity(s), upper_fidelity(s)}) {
      double prev_g = 2.0;
      for (double gdb = -10.0; gdb <= 10.0; gdb += 5.0) {
        const auto prof = coverage_profile(s, f, make(4, 3, db(gdb))).values;
        for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k] <= prof[k - 1] + 1e-12);
        CHECK(prof[0] < prev_g);
        prev_g = prof[0];
      }
    }
  }
}

TEST_CASE("exact mode cap") {
  CHECK(exact_within_cap(Scheme::mf, make(kExactMaxAntennas, 3, 1.0)));
  CHECK_FALSE(exact_within_cap(Scheme::mf, make(kExactMaxAntennas + 1, 3, 1.0)));
  try {
    cov_mf_exact(1, make(kExactMaxAntennas + 1, 3, 1.0));
    FAIL("expected cap_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
  }
  CHECK(default_fidelity(Scheme::mf, make(kExactMaxAntennas + 1, 3, 1.0)) ==
        Fidelity::lower_bound);
  CHECK(default_fidelity(Scheme::zf, make(3 + kExactMaxZfExcess + 1, 3, 1.0)) ==
        Fidelity::approx_lower);
}

TEST_CASE("dispatch rejects mismatched requests") {
  const NetworkParams p = make(2, 3, 1.0);
  CHECK_THROWS_AS(coverage(Scheme::mf, Fidelity::approx_lower, 1, p), Error);
  CHECK_THROWS_AS(coverage(Scheme::zf, Fidelity::exact, 1, p), Error);
  CHECK_THROWS_AS(coverage(Scheme::mf, Fidelity::closed_form, 1, p), Error);
  CHECK_THROWS_AS(coverage(Scheme::mf, Fidelity::exact, 4, p), Error);
  CHECK_THROWS_AS(coverage(Scheme::no_mf, Fidelity::exact, 3, p, 2), Error);
  NetworkParams q = p;
  q.feedback_bits = 4;
  CHECK_THROWS_AS(coverage(Scheme::no_mf, Fidelity::lower_bound, 1, q, 2), Error);
  CHECK_THROWS_AS(coverage(Scheme::mf, Fidelity::exact, 1, q), Error);
}

TEST_CASE("fidelity names round-trip") {
  for (Fidelity f : {Fidelity::exact, Fidelity::upper_bound, Fidelity::lower_bound,
                     Fidelity::approx_upper, Fidelity::approx_lower, Fidelity::closed_form}) {
    CHECK(parse_fidelity(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_fidelity("guess"), Error);
}

TEST_CASE("quantized CSI approaches perfect CSI and loses coverage") {
  // 1 - zeta halves every L - 1 bits.  The MF gap is linear in 1 - zeta; the
  // ZF leak from SBSs inside the serving radius enters through
  // tau^(2/alpha), so for k >= 2 that gap shrinks like sqrt(1 - zeta).
  NetworkParams p = make(3, 3, 1.0);
  auto at = [&](Scheme s, int k, std::optional<int> bits) {
    NetworkParams q = p;
    q.feedback_bits = bits;
    if (!bits) return s == Scheme::mf ? cov_mf_bounds(k, q) : cov_zf_approx_bounds(k, q);
    return cov_quantized(s, k, q);
  };
  for (int k = 1; k <= 3; ++k) {
    const BoundPair perfect = at(Scheme::mf, k, std::nullopt);
    const BoundPair b30 = at(Scheme::mf, k, 30);
    const BoundPair b40 = at(Scheme::mf, k, 40);
    CHECK(std::abs(perfect.lower - b30.lower) < 1e-5);
    CHECK((perfect.lower - b40.lower) / (perfect.lower - b30.lower) ==
          doctest::Approx(1.0 / 32.0).epsilon(0.1));
    const BoundPair coarse = at(Scheme::mf, k, 4);
    CHECK(coarse.lower < perfect.lower);
    CHECK(coarse.upper < perfect.upper);

    const BoundPair zp = at(Scheme::zf, k, std::nullopt);
    const double g40 = zp.lower - at(Scheme::zf, k, 40).lower;
    const double g50 = zp.lower - at(Scheme::zf, k, 50).lower;
    const double rate = k == 1 ? 1.0 / 32.0 : std::pow(2.0, -2.5);
    CHECK(g50 / g40 == doctest::Approx(rate).epsilon(0.1));
    CHECK(std::abs(zp.lower - at(Scheme::zf, k, 60).lower) < 1e-4);
    CHECK(at(Scheme::zf, k, 4).upper < zp.upper);
  }
}

TEST_CASE("coverage profile carries its tags") {
  NetworkParams p = make(2, 3, 1.0);
  const CoverageProfile prof = coverage_profile(Scheme::no_mf, Fidelity::exact, p, 2);
  CHECK(prof.values.size() == 2);
  CHECK(prof.serving_set == 2);
  CHECK(prof.fidelity == Fidelity::exact);
  CHECK(prof.at(1) == doctest::Approx(cov_nomf_exact(1, 2, p)));
}
