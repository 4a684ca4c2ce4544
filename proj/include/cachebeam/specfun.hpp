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

#ifndef CACHEBEAM_SPECFUN_HPP
#define CACHEBEAM_SPECFUN_HPP

#include <functional>

namespace cachebeam::specfun {

// Tolerances for the adaptive Gauss-Kronrod integrator that backs every
// analytical expression in the library.
struct QuadratureSpec {
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  unsigned max_subdivisions = 18;  // maximum bisection depth

  void validate() const;
};

// Adaptive 15-point Gauss-Kronrod on a finite interval [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

// B(x, y, z) = int_0^z u^(x-1) (1-u)^(y-1) du.  y <= 0 is accepted when z < 1.
double incomplete_beta(double x, double y, double z,
                       const QuadratureSpec& spec = {});

// B'(x, y, z) = int_z^1 u^(x-1) (1-u)^(y-1) du.  Requires y > 0 unless z == 1.
double complementary_incomplete_beta(double x, double y, double z,
                                     const QuadratureSpec& spec = {});

// int_lo^hi u^(x-1) (1-u)^(y-1) du for 0 <= lo <= hi <= 1.  Evaluated as a
// single integral, so it does not lose digits when lo and hi are close.
double incomplete_beta_segment(double x, double y, double lo, double hi,
                               const QuadratureSpec& spec = {});

// Complete Beta function Gamma(x)Gamma(y)/Gamma(x+y) through log-gamma.
double complete_beta(double x, double y);

// A(x) = int_x^inf du / (1 + u^(alpha/2)), alpha > 2.  Closed form
// arccot(x) at alpha = 4.
double tail_integral_A(double x, double alpha, const QuadratureSpec& spec = {});

// (m!)^(-1/m), the Alzer constant for a Gamma(m, 1) desired-signal gain.
double alzer_eta(int m);

}  // namespace cachebeam::specfun

#endif  // CACHEBEAM_SPECFUN_HPP
