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

#include "cachebeam/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cachebeam/error.hpp"

namespace cachebeam {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain error";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::non_convergence: return "numerical non-convergence";
    case ErrorCode::cap_exceeded: return "exact-mode cap exceeded";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

namespace specfun {

namespace {

// Split point between the left (u -> 0) and right (u -> 1) substitutions.
constexpr double kSplit = 0.5;

double checked_result(double value, double error, double l1, double a, double b,
                      const QuadratureSpec& spec) {
  if (!std::isfinite(value)) {
    raise(ErrorCode::non_convergence, "quadrature produced a non-finite value");
  }
  const double allowed = std::max(spec.absolute_tolerance, spec.relative_tolerance * l1);
  if (error > 100.0 * allowed) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature on [" << a << ", " << b << "] did not converge (error estimate "
       << error << ", allowed " << allowed << ")";
    raise(ErrorCode::non_convergence, os.str());
  }
  return value;
}

// Beta pieces keep a fractional power at one endpoint even after
// substitution; when the interval touches it, the double-exponential rule
// absorbs that without deep bisection.
template <class F>
double integrate_edge(F f, double a, double b, bool singular_end, const QuadratureSpec& spec) {
  if (a == b) return 0.0;
  if (!singular_end) return integrate(f, a, b, spec);
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    const double h = b - a;
    value = rule.integrate([&](double t) { return f(a + h * t) * h; }, 0.0, 1.0,
                           spec.relative_tolerance, &error, &l1);
  } catch (const std::exception& e) {
    raise(ErrorCode::non_convergence, std::string("quadrature failed: ") + e.what());
  }
  return checked_result(value, error, std::abs(l1), a, b, spec);
}

// True when [lo, hi] reaches close enough to 0, measured against its width,
// for a fractional power there to stall Gauss-Kronrod.
bool near_edge(double lo, double hi) { return lo <= 1e-3 * hi; }

// int_a^b u^(x-1) (1-u)^(y-1) du with 0 <= a <= b <= kSplit.  When x < 1 the
// substitution t = u^x removes the endpoint singularity at u = 0.
double left_piece(double x, double y, double a, double b,
                  const QuadratureSpec& spec) {
  if (b <= a) return 0.0;
  if (x >= 1.0) {
    return integrate_edge(
        [=](double u) { return std::pow(u, x - 1.0) * std::pow(1.0 - u, y - 1.0); },
        a, b, near_edge(a, b), spec);
  }
  const double inv_x = 1.0 / x;
  return integrate_edge(
      [=](double t) { return inv_x * std::pow(1.0 - std::pow(t, inv_x), y - 1.0); },
      std::pow(a, x), std::pow(b, x), near_edge(a, b), spec);
}

// Same integral on kSplit <= a <= b <= 1.  For 0 < y < 1 the substitution
// s = (1-u)^y removes the singularity at u = 1.  For y <= 0 (b < 1) the
// integrand blows up near b, so t = -log(1-u) turns it into a smooth
// exponential.
double right_piece(double x, double y, double a, double b,
                   const QuadratureSpec& spec) {
  if (b <= a) return 0.0;
  if (y <= 0.0) {
    return integrate_edge(
        [=](double t) { return std::pow(-std::expm1(-t), x - 1.0) * std::exp(-t * y); },
        -std::log1p(-a), -std::log1p(-b), false, spec);
  }
  if (y >= 1.0) {
    return integrate_edge(
        [=](double u) { return std::pow(u, x - 1.0) * std::pow(1.0 - u, y - 1.0); },
        a, b, near_edge(1.0 - b, 1.0 - a), spec);
  }
  const double inv_y = 1.0 / y;
  return integrate_edge(
      [=](double s) { return inv_y * std::pow(1.0 - std::pow(s, inv_y), x - 1.0); },
      std::pow(1.0 - b, y), std::pow(1.0 - a, y), near_edge(1.0 - b, 1.0 - a), spec);
}

void check_beta_args(double x, double y, double lo, double hi) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "incomplete beta: x must be positive (x=" << x << ")";
    raise(ErrorCode::domain, os.str());
  }
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
    std::ostringstream os;
    os << "incomplete beta: limits must satisfy 0 <= lo <= hi <= 1 (lo=" << lo
       << ", hi=" << hi << ")";
    raise(ErrorCode::domain, os.str());
  }
  if (y <= 0.0 && hi >= 1.0 && lo < hi) {
    raise(ErrorCode::domain,
          "incomplete beta: integrand is not integrable at u=1 for y <= 0");
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  require(relative_tolerance > 0.0 && absolute_tolerance > 0.0,
          ErrorCode::domain, "quadrature tolerances must be positive");
  require(max_subdivisions >= 1, ErrorCode::domain,
          "quadrature needs at least one subdivision level");
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  // Integrating over [0, 1] keeps the error estimate proportional to the
  // interval; on narrow intervals far from 0 it otherwise carries an absolute
  // floor near 1e-9.
  const double h = b - a;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double t) { return f(a + h * t) * h; }, 0.0, 1.0, spec.max_subdivisions,
      spec.relative_tolerance, &error, &l1);
  l1 = std::abs(l1);
  return checked_result(value, error, l1, a, b, spec);
}

double incomplete_beta_segment(double x, double y, double lo, double hi,
                               const QuadratureSpec& spec) {
  check_beta_args(x, y, lo, hi);
  if (lo == hi) return 0.0;
  return left_piece(x, y, lo, std::min(hi, kSplit), spec) +
         right_piece(x, y, std::max(lo, kSplit), hi, spec);
}

double incomplete_beta(double x, double y, double z, const QuadratureSpec& spec) {
  return incomplete_beta_segment(x, y, 0.0, z, spec);
}

double complementary_incomplete_beta(double x, double y, double z,
                                     const QuadratureSpec& spec) {
  return incomplete_beta_segment(x, y, z, 1.0, spec);
}

double complete_beta(double x, double y) {
  require(x > 0.0 && y > 0.0, ErrorCode::domain,
          "complete beta needs positive arguments");
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double tail_integral_A(double x, double alpha, const QuadratureSpec& spec) {
  require(alpha > 2.0, ErrorCode::domain,
          "tail integral diverges for path-loss exponent alpha <= 2");
  require(x >= 0.0, ErrorCode::domain, "tail integral needs x >= 0");
  if (alpha == 4.0) return std::numbers::pi / 2.0 - std::atan(x);
  // w = u^(a/2) / (1 + u^(a/2)) maps [x, inf) onto [w0, 1).
  const double delta = 2.0 / alpha;
  const double w0 = x == 0.0 ? 0.0 : 1.0 / (1.0 + std::pow(x, -alpha / 2.0));
  return delta * complementary_incomplete_beta(delta, 1.0 - delta, w0, spec);
}

double alzer_eta(int m) {
  require(m >= 1, ErrorCode::domain, "alzer_eta needs m >= 1");
  return std::exp(-std::lgamma(static_cast<double>(m) + 1.0) / m);
}

}  // namespace specfun
}  // namespace cachebeam
