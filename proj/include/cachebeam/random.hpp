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

#ifndef CACHEBEAM_RANDOM_HPP
#define CACHEBEAM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace cachebeam {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream `stream` derived from a master seed.  Streams with
// different ids never share state, so trials can be split across workers.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(stream + 1)),
                    splitmix64(stream)};
  return Rng(seq);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_exponential(Rng& rng) { return -std::log(open_uniform(rng)); }

// Gamma(shape, 1) for a positive integer shape, as a sum of exponentials.
inline double integer_gamma(int shape, Rng& rng) {
  double product = 1.0;
  for (int i = 0; i < shape; ++i) product *= open_uniform(rng);
  return -std::log(product);
}

}  // namespace cachebeam

#endif  // CACHEBEAM_RANDOM_HPP
