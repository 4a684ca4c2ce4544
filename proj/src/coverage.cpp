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


#include "cachebeam/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "cachebeam/error.hpp"
#include "cachebeam/specfun.hpp"

namespace cachebeam {

namespace {

using specfun::QuadratureSpec;
using Series = std::vector<double>;

// Inner Beta integrals are tightened so the outer delta quadrature sees a
// smooth integrand.
const QuadratureSpec kInner{1e-11, 1e-13, 20};
const QuadratureSpec kOuter{1e-9, 1e-13, 18};

// Values outside [0, 1] by more than this are reported rather than clamped.
constexpr double kRangeSlack = 1e-6;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double sign(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

Series multiply(const Series& a, const Series& b) {
  const std::size_t m = a.size();
  Series out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; i + j < m; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Series power(const Series& a, int p) {
  Series out(a.size(), 0.0);
  out[0] = 1.0;
  for (int i = 0; i < p; ++i) out = multiply(out, a);
  return out;
}

// Writing L(s (1 + e)) as a power series in e, the i-th Taylor coefficient is
// s^i L^(i)(s) / i!.  Every factor below is expanded that way; y is the value
// of s r^-alpha at the reference radius used to normalise distances.

// exp(-z H(e)): PPP with unit-mean exponential gains beyond the reference
// radius, z = pi lambda r0^2.
Series exterior_coefficients(double y, double alpha, int m) {
  Series h(static_cast<std::size_t>(m), 0.0);
  if (y == 0.0) return h;
  const double d = 2.0 / alpha;
  const double scale = 2.0 * std::pow(y, d) / alpha;
  const double v0 = 1.0 / (1.0 + y);
  h[0] = scale * specfun::complementary_incomplete_beta(d, 1.0 - d, v0, kInner);
  for (int n = 1; n < m; ++n) {
    h[n] = -sign(n) * scale *
           specfun::complementary_incomplete_beta(1.0 + d, n - d, v0, kInner);
  }
  return h;
}

// Laplace factor of one exponential-gain interferer uniform in the unit disc.
Series disc_coefficients(double y, double alpha, int m) {
  Series c(static_cast<std::size_t>(m), 0.0);
  c[0] = 1.0;
  if (y == 0.0) return c;
  const double d = 2.0 / alpha;
  const double scale = 2.0 * std::pow(y, d) / alpha;
  const double v0 = 1.0 / (1.0 + y);
  c[0] = 1.0 - scale * specfun::incomplete_beta(d, 1.0 - d, v0, kInner);
  for (int n = 1; n < m; ++n) {
    c[n] = sign(n) * scale * specfun::incomplete_beta(1.0 + d, n - d, v0, kInner);
  }
  return c;
}

// Mean of f(a) over a point uniform in the annulus delta <= u <= 1, where
// a = y_outer u^-alpha.  Integrated in s = log(u^2), which keeps the
// transition of f resolvable when delta is tiny.
template <class F>
double annulus_mean(F f, double y_outer, double delta, double alpha) {
  const double d2 = delta * delta;
  if (1.0 - d2 < 1e-12) return f(y_outer);
  const double h = alpha / 2.0;
  const double total = specfun::integrate(
      [&](double s) { return f(y_outer * std::exp(-h * s)) * std::exp(s); }, std::log(d2), 0.0,
      kInner);
  return total / (1.0 - d2);
}

// Gamma(L)-gain interferer uniform in the annulus delta <= u <= 1.
Series annulus_coefficients(double y_outer, double delta, double alpha, int L, int m) {
  Series c(static_cast<std::size_t>(m), 0.0);
  for (int n = 0; n < m; ++n) {
    c[n] = sign(n) * binomial(L + n - 1, n) *
           annulus_mean([=](double a) { return std::pow(a, n) / std::pow(1.0 + a, n + L); },
                        y_outer, delta, alpha);
  }
  return c;
}

// Gamma(L)-gain interferer at the reference radius.
Series point_coefficients(double y, int L, int m) {
  Series c(static_cast<std::size_t>(m), 0.0);
  for (int n = 0; n < m; ++n) {
    c[n] = sign(n) * binomial(L + n - 1, n) * std::pow(y, n) / std::pow(1.0 + y, n + L);
  }
  return c;
}

// sum_{i<m} (-1)^i [e^i] (S(e) E_z[exp(-z H(e))]) with z ~ Gamma(shape, 1).
// exp(-z (H - H0)) expands into polynomials in z whose Gamma moments are
// closed form, so no quadrature over the reference radius is needed.
double gamma_average(const Series& s, const Series& h, int shape) {
  const std::size_t m = s.size();
  std::vector<std::vector<double>> e(m);
  e[0] = {1.0};
  for (std::size_t n = 1; n < m; ++n) {
    e[n].assign(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
      const double q = -static_cast<double>(j) * h[j] / static_cast<double>(n);
      const auto& prev = e[n - j];
      for (std::size_t p = 0; p < prev.size(); ++p) e[n][p + 1] += q * prev[p];
    }
  }
  std::vector<double> r(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double sg = sign(static_cast<int>(i));
    for (std::size_t j = 0; j <= i; ++j) {
      const double si = s[i - j];
      if (si == 0.0) continue;
      for (std::size_t p = 0; p < e[j].size(); ++p) r[p] += sg * si * e[j][p];
    }
  }
  const double base = 1.0 + h[0];
  double total = 0.0;
  double moment = std::pow(base, -shape);  // (shape)_p / base^(shape + p)
  for (std::size_t p = 0; p < m; ++p) {
    total += r[p] * moment;
    moment *= (shape + static_cast<double>(p)) / base;
  }
  return total;
}

double checked_probability(double value, const char* what) {
  if (!std::isfinite(value) || value < -kRangeSlack || value > 1.0 + kRangeSlack) {
    std::ostringstream os;
    os << what << ": value " << value << " is not a probability";
    raise(ErrorCode::non_convergence, os.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

void check_rank(int k, int limit, const char* what) {
  if (k < 1 || k > limit) {
    std::ostringstream os;
    os << what << ": rank " << k << " outside 1.." << limit;
    raise(ErrorCode::domain, os.str());
  }
}

void check_serving_set(int serving_set, const NetworkParams& params) {
  if (serving_set < 1 || serving_set > params.cluster_size) {
    std::ostringstream os;
    os << "serving set size " << serving_set << " outside 1.." << params.cluster_size;
    raise(ErrorCode::domain, os.str());
  }
}

void check_exact(Scheme scheme, const NetworkParams& params) {
  if (!params.perfect_csi()) {
    raise(ErrorCode::domain, "exact coverage is only available with perfect CSI");
  }
  if (!exact_within_cap(scheme, params)) {
    std::ostringstream os;
    os << "exact " << to_string(scheme) << " coverage supports L <= " << kExactMaxAntennas
       << " and L - K <= " << kExactMaxZfExcess << "; use the bounds instead";
    raise(ErrorCode::cap_exceeded, os.str());
  }
}

// (2 t^(2/a) / a) B'(2/a, 1 - 2/a, 1/(1 + t))
double beta2(double t, double alpha) {
  if (t == 0.0) return 0.0;
  const double d = 2.0 / alpha;
  return 2.0 * std::pow(t, d) / alpha *
         specfun::complementary_incomplete_beta(d, 1.0 - d, 1.0 / (1.0 + t), kInner);
}

// 1 - (2 t^(2/a) / a) B(2/a, 1 - 2/a, 1/(1 + t))
double disc_factor(double t, double alpha) {
  if (t == 0.0) return 1.0;
  const double d = 2.0 / alpha;
  return 1.0 - 2.0 * std::pow(t, d) / alpha *
                   specfun::incomplete_beta(d, 1.0 - d, 1.0 / (1.0 + t), kInner);
}

double mf_alzer(int k, double x, const NetworkParams& params) {
  const int L = params.antennas;
  const double alpha = params.path_loss_exponent;
  double total = 0.0;
  for (int l = 1; l <= L; ++l) {
    const double t = x * params.sir_threshold * l;
    total += binomial(L, l) * sign(l + 1) * std::pow(disc_factor(t, alpha), k - 1) /
             std::pow(1.0 + beta2(t, alpha), k);
  }
  return total;
}

// Inter-cluster factor with the random distance ratio replaced by its RMS
// value: t^(2/a) sqrt(k/K) A(sqrt(K/k) t^(-2/a)).
double rms_beta3(double t, int k, int K, double alpha) {
  if (t == 0.0) return 0.0;
  const double d = 2.0 / alpha;
  const double ratio = static_cast<double>(k) / K;
  return std::pow(t, d) * std::sqrt(ratio) *
         specfun::tail_integral_A(std::pow(t, -d) / std::sqrt(ratio), alpha, kInner);
}

double zf_rms(int k, double x, const NetworkParams& params) {
  const int m = params.antennas - params.cluster_size + 1;
  double total = 0.0;
  for (int l = 1; l <= m; ++l) {
    const double t = x * params.sir_threshold * l;
    total += binomial(m, l) * sign(l + 1) /
             std::pow(1.0 + rms_beta3(t, k, params.cluster_size, params.path_loss_exponent), k);
  }
  return total;
}

double nomf_alzer(int k, int b, double x, const NetworkParams& params) {
  const int L = params.antennas;
  const double alpha = params.path_loss_exponent;
  const double gamma = params.sir_threshold;
  if (k == b) {
    double total = 0.0;
    for (int l = 1; l <= L; ++l) {
      total += binomial(L, l) * sign(l + 1) / std::pow(1.0 + beta2(x * gamma * l, alpha), b);
    }
    return total;
  }

  auto integrand = [&](double delta) {
    const double da = std::pow(delta, alpha);
    double sum = 0.0;
    for (int l = 1; l <= L; ++l) {
      const double t = x * gamma * l;
      double b4 = std::pow(1.0 + t * da, -L);
      if (b - k - 1 > 0) {
        const double annulus = annulus_mean(
            [=](double a) { return std::pow(1.0 + a, -L); }, t * da, delta, alpha);
        b4 *= std::pow(annulus, b - k - 1);
      }
      sum += binomial(L, l) * sign(l + 1) * b4 / std::pow(1.0 + beta2(t * da, alpha), b);
    }
    return sum * delta_ratio_pdf(k, b, delta);
  };
  return specfun::integrate(integrand, 0.0, 1.0, kOuter);
}

// ZF under limited feedback: leaked intra-cluster interference has mean
// 1 - zeta, the desired gain is scaled by zeta.
double zf_quantized(int k, double x, double zeta, const NetworkParams& params) {
  const int K = params.cluster_size;
  const int m = params.antennas - K + 1;
  const double alpha = params.path_loss_exponent;
  const double gamma = params.sir_threshold;

  double total = 0.0;
  for (int l = 1; l <= m; ++l) {
    const double t = x * gamma * l / zeta;
    const double tau = x * gamma * l * (1.0 - zeta) / zeta;
    double term;
    if (k == K) {
      term = std::pow(disc_factor(tau, alpha), K - 1) / std::pow(1.0 + beta2(t, alpha), K);
    } else {
      const double inner = std::pow(disc_factor(tau, alpha), k - 1);
      const double c = rms_beta3(t, k, K, alpha);
      auto integrand = [&](double delta) {
        const double da = std::pow(delta, alpha);
        double value = delta_ratio_pdf(k, K, delta) / (1.0 + tau * da) /
                       std::pow(1.0 + c * delta * delta, K);
        if (K - k - 1 > 0 && tau > 0.0) {
          const double mid =
              annulus_mean([](double a) { return 1.0 / (1.0 + a); }, tau * da, delta, alpha);
          value *= std::pow(mid, K - k - 1);
        }
        return value;
      };
      term = inner * specfun::integrate(integrand, 0.0, 1.0, kOuter);
    }
    total += binomial(m, l) * sign(l + 1) * term;
  }
  return total;
}

}  // namespace

std::string_view to_string(Fidelity fidelity) noexcept {
  switch (fidelity) {
    case Fidelity::exact: return "exact";
    case Fidelity::upper_bound: return "upper-bound";
    case Fidelity::lower_bound: return "lower-bound";
    case Fidelity::approx_upper: return "approx-upper";
    case Fidelity::approx_lower: return "approx-lower";
    case Fidelity::closed_form: return "closed-form";
  }
  return "unknown";
}

Fidelity parse_fidelity(std::string_view text) {
  for (Fidelity f : {Fidelity::exact, Fidelity::upper_bound, Fidelity::lower_bound,
                     Fidelity::approx_upper, Fidelity::approx_lower, Fidelity::closed_form}) {
    if (text == to_string(f)) return f;
  }
  raise(ErrorCode::config, "unknown fidelity '" + std::string(text) + "'");
}

bool exact_within_cap(Scheme scheme, const NetworkParams& params) {
  if (params.antennas > kExactMaxAntennas) return false;
  if (is_zero_forcing(scheme)) {
    return params.antennas - params.cluster_size <= kExactMaxZfExcess;
  }
  return true;
}

double cov_mf_exact(int k, const NetworkParams& params) {
  params.validate();
  check_rank(k, params.cluster_size, "MF coverage");
  check_exact(Scheme::mf, params);
  const double gamma = params.sir_threshold;
  if (gamma == 0.0) return 1.0;
  const int m = params.antennas;
  const double alpha = params.path_loss_exponent;
  const Series s = power(disc_coefficients(gamma, alpha, m), k - 1);
  return checked_probability(gamma_average(s, exterior_coefficients(gamma, alpha, m), k),
                             "MF exact coverage");
}

BoundPair cov_mf_bounds(int k, const NetworkParams& params) {
  params.validate();
  check_rank(k, params.cluster_size, "MF coverage");
  if (params.sir_threshold == 0.0) return {1.0, 1.0};
  const double eta = specfun::alzer_eta(params.antennas);
  return {checked_probability(mf_alzer(k, 1.0, params), "MF lower bound"),
          checked_probability(mf_alzer(k, eta, params), "MF upper bound")};
}

double cov_mf_closed_alpha4(int k, double sir_threshold) {
  require(k >= 1, ErrorCode::domain, "rank k must be >= 1");
  require(sir_threshold >= 0.0 && std::isfinite(sir_threshold), ErrorCode::domain,
          "SIR threshold must be finite and non-negative");
  const double root = std::sqrt(sir_threshold);
  const double angle = std::asin(1.0 / std::sqrt(1.0 + sir_threshold));
  const double num = std::pow(1.0 - root * angle, k - 1);
  const double den = std::pow(1.0 + root * (std::numbers::pi / 2.0 - angle), k);
  return num / den;
}

double cov_zf_exact(int k, const NetworkParams& params) {
  params.validate();
  params.validate_zf();
  const int K = params.cluster_size;
  check_rank(k, K, "ZF coverage");
  check_exact(Scheme::zf, params);
  const double gamma = params.sir_threshold;
  if (gamma == 0.0) return 1.0;
  const int m = params.antennas - K + 1;
  const double alpha = params.path_loss_exponent;
  Series unit(static_cast<std::size_t>(m), 0.0);
  unit[0] = 1.0;
  if (k == K) {
    return checked_probability(
        gamma_average(unit, exterior_coefficients(gamma, alpha, m), K), "ZF exact coverage");
  }
  auto integrand = [&](double delta) {
    const double y = gamma * std::pow(delta, alpha);
    return delta_ratio_pdf(k, K, delta) *
           gamma_average(unit, exterior_coefficients(y, alpha, m), K);
  };
  return checked_probability(specfun::integrate(integrand, 0.0, 1.0, kOuter),
                             "ZF exact coverage");
}

BoundPair cov_zf_approx_bounds(int k, const NetworkParams& params) {
  params.validate();
  params.validate_zf();
  check_rank(k, params.cluster_size, "ZF coverage");
  if (params.sir_threshold == 0.0) return {1.0, 1.0};
  const double kappa = specfun::alzer_eta(params.antennas - params.cluster_size + 1);
  return {checked_probability(zf_rms(k, 1.0, params), "ZF approximate lower bound"),
          checked_probability(zf_rms(k, kappa, params), "ZF approximate upper bound")};
}

double cov_nomf_exact(int k, int serving_set, const NetworkParams& params) {
  params.validate();
  check_serving_set(serving_set, params);
  check_rank(k, serving_set, "NO-MF coverage");
  check_exact(Scheme::no_mf, params);
  const double gamma = params.sir_threshold;
  if (gamma == 0.0) return 1.0;
  const int L = params.antennas;
  const int m = L;
  const double alpha = params.path_loss_exponent;
  Series unit(static_cast<std::size_t>(m), 0.0);
  unit[0] = 1.0;
  if (k == serving_set) {
    return checked_probability(
        gamma_average(unit, exterior_coefficients(gamma, alpha, m), serving_set),
        "NO-MF exact coverage");
  }
  auto integrand = [&](double delta) {
    const double y = gamma * std::pow(delta, alpha);
    Series s = point_coefficients(y, L, m);
    if (serving_set - k - 1 > 0) {
      s = multiply(s, power(annulus_coefficients(y, delta, alpha, L, m),
                            serving_set - k - 1));
    }
    return delta_ratio_pdf(k, serving_set, delta) *
           gamma_average(s, exterior_coefficients(y, alpha, m), serving_set);
  };
  return checked_probability(specfun::integrate(integrand, 0.0, 1.0, kOuter),
                             "NO-MF exact coverage");
}

BoundPair cov_nomf_bounds(int k, int serving_set, const NetworkParams& params) {
  params.validate();
  check_serving_set(serving_set, params);
  check_rank(k, serving_set, "NO-MF coverage");
  if (params.sir_threshold == 0.0) return {1.0, 1.0};
  const double eta = specfun::alzer_eta(params.antennas);
  return {checked_probability(nomf_alzer(k, serving_set, 1.0, params), "NO-MF lower bound"),
          checked_probability(nomf_alzer(k, serving_set, eta, params), "NO-MF upper bound")};
}

BoundPair cov_quantized(Scheme scheme, int k, const NetworkParams& params) {
  params.validate();
  require(params.feedback_bits.has_value(), ErrorCode::domain,
          "quantized coverage needs a feedback bit count");
  const double zeta = csi_quantization_zeta(*params.feedback_bits, params.antennas);
  check_rank(k, params.cluster_size, "quantized coverage");
  if (params.sir_threshold == 0.0) return {1.0, 1.0};
  switch (scheme) {
    case Scheme::mf: {
      const double eta = specfun::alzer_eta(params.antennas);
      return {checked_probability(mf_alzer(k, 1.0 / zeta, params), "quantized MF lower bound"),
              checked_probability(mf_alzer(k, eta / zeta, params), "quantized MF upper bound")};
    }
    case Scheme::zf:
    case Scheme::o_zf: {
      params.validate_zf();
      const double kappa = specfun::alzer_eta(params.antennas - params.cluster_size + 1);
      return {checked_probability(zf_quantized(k, 1.0, zeta, params),
                                  "quantized ZF lower bound"),
              checked_probability(zf_quantized(k, kappa, zeta, params),
                                  "quantized ZF upper bound")};
    }
    case Scheme::no_mf: break;
  }
  raise(ErrorCode::domain, "quantized coverage is defined for MF and ZF only");
}

Fidelity lower_fidelity(Scheme scheme) {
  return is_zero_forcing(scheme) ? Fidelity::approx_lower : Fidelity::lower_bound;
}

Fidelity upper_fidelity(Scheme scheme) {
  return is_zero_forcing(scheme) ? Fidelity::approx_upper : Fidelity::upper_bound;
}

Fidelity default_fidelity(Scheme scheme, const NetworkParams& params) {
  if (params.perfect_csi() && exact_within_cap(scheme, params)) return Fidelity::exact;
  return lower_fidelity(scheme);
}

double coverage(Scheme scheme, Fidelity fidelity, int k, const NetworkParams& params,
                int serving_set) {
  auto mismatch = [&]() -> double {
    std::ostringstream os;
    os << "fidelity " << to_string(fidelity) << " is not available for "
       << to_string(scheme) << (params.perfect_csi() ? "" : " with quantized CSI");
    raise(ErrorCode::domain, os.str());
  };
  const bool quantized = !params.perfect_csi();
  switch (scheme) {
    case Scheme::mf:
      switch (fidelity) {
        case Fidelity::exact: return cov_mf_exact(k, params);
        case Fidelity::lower_bound:
          return quantized ? cov_quantized(scheme, k, params).lower
                           : cov_mf_bounds(k, params).lower;
        case Fidelity::upper_bound:
          return quantized ? cov_quantized(scheme, k, params).upper
                           : cov_mf_bounds(k, params).upper;
        case Fidelity::closed_form:
          require(params.antennas == 1 && params.path_loss_exponent == 4.0 && !quantized,
                  ErrorCode::domain, "closed form needs L = 1, alpha = 4 and perfect CSI");
          check_rank(k, params.cluster_size, "MF coverage");
          return cov_mf_closed_alpha4(k, params.sir_threshold);
        default: return mismatch();
      }
    case Scheme::zf:
    case Scheme::o_zf:
      switch (fidelity) {
        case Fidelity::exact: return cov_zf_exact(k, params);
        case Fidelity::approx_lower:
          return quantized ? cov_quantized(scheme, k, params).lower
                           : cov_zf_approx_bounds(k, params).lower;
        case Fidelity::approx_upper:
          return quantized ? cov_quantized(scheme, k, params).upper
                           : cov_zf_approx_bounds(k, params).upper;
        default: return mismatch();
      }
    case Scheme::no_mf:
      if (quantized) return mismatch();
      switch (fidelity) {
        case Fidelity::exact: return cov_nomf_exact(k, serving_set, params);
        case Fidelity::lower_bound: return cov_nomf_bounds(k, serving_set, params).lower;
        case Fidelity::upper_bound: return cov_nomf_bounds(k, serving_set, params).upper;
        default: return mismatch();
      }
  }
  return mismatch();
}

CoverageProfile coverage_profile(Scheme scheme, Fidelity fidelity, const NetworkParams& params,
                                 int serving_set) {
  CoverageProfile profile;
  profile.scheme = scheme;
  profile.fidelity = fidelity;
  profile.sir_threshold = params.sir_threshold;
  profile.feedback_bits = params.feedback_bits;
  int ranks = params.cluster_size;
  if (scheme == Scheme::no_mf) {
    check_serving_set(serving_set, params);
    profile.serving_set = serving_set;
    ranks = serving_set;
  }
  profile.values.reserve(static_cast<std::size_t>(ranks));
  for (int k = 1; k <= ranks; ++k) {
    profile.values.push_back(coverage(scheme, fidelity, k, params, serving_set));
  }
  return profile;
}

}  // namespace cachebeam
