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


#include "cachebeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "cachebeam/error.hpp"

namespace cachebeam {

namespace {

constexpr double kBudgetSlack = 1e-9;

// Fritsch-Carlson slopes for a monotone piecewise cubic through (x, y).
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    s[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = s[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
  }
  auto end_slope = [](double h0, double h1, double s0, double s1) {
    double e = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (e * s0 <= 0.0) return 0.0;
    if (s0 * s1 <= 0.0 && std::abs(e) > 3.0 * std::abs(s0)) e = 3.0 * s0;
    return e;
  };
  d[0] = end_slope(h[0], h[1], s[0], s[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
  return d;
}

// Exact integral of the cubic Hermite interpolant.
double pchip_integral(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> d = pchip_slopes(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    total += h * (y[i] + y[i + 1]) / 2.0 + h * h * (d[i] - d[i + 1]) / 12.0;
  }
  return total;
}

std::vector<double> prefix_means(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

double stage_product_mean(const std::vector<double>& stages) {
  double product = 1.0;
  double sum = 0.0;
  for (double p : stages) {
    product *= p;
    sum += product;
  }
  return sum / static_cast<double>(stages.size());
}

NetworkParams at_threshold(const NetworkParams& params, double gamma) {
  NetworkParams p = params;
  p.sir_threshold = gamma;
  return p;
}

}  // namespace

void PopularityProfile::validate() const {
  require(files >= 1 && p.size() == static_cast<std::size_t>(files), ErrorCode::domain,
          "popularity profile length must equal the file count");
  require(skewness >= 0.0, ErrorCode::domain, "Zipf exponent must be non-negative");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] >= 0.0, ErrorCode::domain, "popularity must be non-negative");
    if (i > 0) require(p[i] <= p[i - 1], ErrorCode::domain, "popularity must be nonincreasing");
    sum += p[i];
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::domain, "popularity must sum to 1");
}

PopularityProfile zipf_popularity(int files, double skewness) {
  require(files >= 1, ErrorCode::domain, "need at least one file");
  require(skewness >= 0.0 && std::isfinite(skewness), ErrorCode::domain,
          "Zipf exponent must be finite and non-negative");
  PopularityProfile out{files, skewness, std::vector<double>(static_cast<std::size_t>(files))};
  for (int n = 1; n <= files; ++n) out.p[n - 1] = std::pow(static_cast<double>(n), -skewness);
  // Sum smallest first to keep the normalisation tight.
  double norm = 0.0;
  for (auto it = out.p.rbegin(); it != out.p.rend(); ++it) norm += *it;
  for (double& v : out.p) v /= norm;
  return out;
}

double ProbCachePolicy::total() const {
  double sum = 0.0;
  for (double v : a) sum += v;
  return sum;
}

void ProbCachePolicy::validate(double cache_size) const {
  for (double v : a) {
    require(v >= 0.0 && v <= 1.0, ErrorCode::domain, "caching probabilities must lie in [0, 1]");
  }
  require(total() <= cache_size + kBudgetSlack, ErrorCode::domain,
          "caching probabilities exceed the cache size");
}

Fragments Fragments::split(int count) {
  require(count >= 1, ErrorCode::domain, "a cached file has at least one fragment");
  return Fragments(count);
}

int Fragments::count() const {
  require(cached(), ErrorCode::domain, "uncached file has no fragment count");
  return count_;
}

double Fragments::share() const { return cached() ? 1.0 / count_ : 0.0; }

std::strong_ordering Fragments::operator<=>(const Fragments& other) const {
  if (cached() != other.cached()) {
    return cached() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return count_ <=> other.count_;
}

double CodedCachePolicy::budget_used() const {
  double sum = 0.0;
  for (const Fragments& f : b) sum += f.share();
  return sum;
}

bool CodedCachePolicy::monotone() const { return std::is_sorted(b.begin(), b.end()); }

void CodedCachePolicy::validate(double cache_size, int cluster_size) const {
  for (const Fragments& f : b) {
    require(!f.cached() || f.count() <= cluster_size, ErrorCode::domain,
            "fragment count exceeds the cluster size");
  }
  require(budget_used() <= cache_size + kBudgetSlack, ErrorCode::domain,
          "coded placement exceeds the cache size");
}

double fot_prob(double a, const std::vector<double>& per_rank) {
  require(a >= 0.0 && a <= 1.0, ErrorCode::domain, "caching probability must lie in [0, 1]");
  double total = 0.0;
  double miss = 1.0;  // (1 - a)^(k-1)
  for (double v : per_rank) {
    total += a * miss * v;
    miss *= 1.0 - a;
  }
  return total;
}

double ese_prob(double a, const std::vector<double>& per_rank) { return fot_prob(a, per_rank); }

double aggregate(const PopularityProfile& popularity, const std::vector<double>& per_file) {
  require(per_file.size() == popularity.p.size(), ErrorCode::domain,
          "per-file values must match the popularity profile");
  double total = 0.0;
  for (std::size_t n = 0; n < per_file.size(); ++n) total += popularity.p[n] * per_file[n];
  return total;
}

double objective_prob(const PopularityProfile& popularity, const ProbCachePolicy& policy,
                      const std::vector<double>& per_rank) {
  require(policy.a.size() == popularity.p.size(), ErrorCode::domain,
          "policy length must match the popularity profile");
  std::vector<double> per_file(policy.a.size());
  for (std::size_t n = 0; n < per_file.size(); ++n) per_file[n] = fot_prob(policy.a[n], per_rank);
  return aggregate(popularity, per_file);
}

std::vector<RateResult> rate_integrals(
    const std::function<std::vector<double>(double)>& coverage_at, std::size_t components,
    const RateOptions& options) {
  require(options.truncation_level > 0.0 && options.tolerance > 0.0 &&
              options.initial_nodes >= 2 && options.max_levels >= 1,
          ErrorCode::domain, "invalid rate integration options");
  std::map<double, std::vector<double>> cache;
  auto eval = [&](double x) -> const std::vector<double>& {
    auto it = cache.find(x);
    if (it != cache.end()) return it->second;
    std::vector<double> v = coverage_at(std::exp2(x) - 1.0);
    require(v.size() == components, ErrorCode::internal, "coverage function size mismatch");
    return cache.emplace(x, std::move(v)).first->second;
  };
  auto below = [&](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double p) { return p < options.truncation_level; });
  };

  // Integer steps in x until every component is negligible.
  double cut = 1.0;
  while (!below(eval(cut))) {
    cut += 1.0;
    if (cut > options.max_exponent) {
      std::ostringstream os;
      os << "coverage stays above " << options.truncation_level << " up to x = "
         << options.max_exponent;
      raise(ErrorCode::non_convergence, os.str());
    }
  }

  std::vector<RateResult> out(components);
  {
    const std::vector<double> last = eval(cut);
    const std::vector<double> prev = eval(cut - 1.0);
    for (std::size_t c = 0; c < components; ++c) {
      const double rate = std::log(prev[c] / last[c]);
      out[c].truncation_bound =
          (std::isfinite(rate) && rate > 1e-3) ? last[c] / rate
                                               : last[c] * (options.max_exponent - cut);
      if (last[c] == 0.0) out[c].truncation_bound = 0.0;
    }
  }

  const double gamma_lo = 1e-6;
  const double gamma_hi = std::exp2(cut) - 1.0;
  std::vector<double> previous;
  for (int level = 0; level < options.max_levels; ++level) {
    const int n = options.initial_nodes << level;
    std::vector<double> xs;
    xs.reserve(2 * static_cast<std::size_t>(n) + 2);
    for (int i = 0; i <= n; ++i) xs.push_back(i * cut / n);
    for (int i = 0; i <= n; ++i) {
      const double g = gamma_lo * std::pow(gamma_hi / gamma_lo, static_cast<double>(i) / n);
      xs.push_back(std::log2(1.0 + g));
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    xs.front() = 0.0;
    xs.back() = cut;

    std::vector<double> current(components);
    std::vector<double> ys(xs.size());
    for (std::size_t c = 0; c < components; ++c) {
      for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = eval(xs[i])[c];
      current[c] = pchip_integral(xs, ys);
    }
    if (!previous.empty()) {
      double change = 0.0;
      for (std::size_t c = 0; c < components; ++c) {
        change = std::max(change, std::abs(current[c] - previous[c]));
      }
      if (change < options.tolerance) {
        for (std::size_t c = 0; c < components; ++c) out[c].value = current[c];
        return out;
      }
    }
    previous = std::move(current);
  }
  raise(ErrorCode::non_convergence, "rate integral did not settle under grid refinement");
}

RateResult rate_integral(const std::function<double(double)>& coverage_at,
                         const RateOptions& options) {
  return rate_integrals([&](double g) { return std::vector<double>{coverage_at(g)}; }, 1,
                        options)
      .front();
}

std::vector<RateResult> ese_rates(Scheme scheme, Fidelity fidelity, const NetworkParams& params,
                                  int serving_set, const RateOptions& options) {
  const std::size_t ranks = static_cast<std::size_t>(
      scheme == Scheme::no_mf ? serving_set : params.cluster_size);
  return rate_integrals(
      [&](double g) {
        return coverage_profile(scheme, fidelity, at_threshold(params, g), serving_set).values;
      },
      ranks, options);
}

RateResult ese_rate(int k, Scheme scheme, Fidelity fidelity, const NetworkParams& params,
                    const RateOptions& options) {
  return rate_integral(
      [&](double g) { return coverage(scheme, fidelity, k, at_threshold(params, g)); },
      options);
}

double fot_coded_nomf(Fragments b, Fidelity fidelity, const NetworkParams& params) {
  if (!b.cached()) return 0.0;
  return stage_product_mean(
      coverage_profile(Scheme::no_mf, fidelity, params, b.count()).values);
}

double fot_coded_ozf(Fragments b, Fidelity fidelity, const NetworkParams& params) {
  if (!b.cached()) return 0.0;
  require(b.count() <= params.cluster_size, ErrorCode::domain,
          "fragment count exceeds the cluster size");
  double sum = 0.0;
  for (int k = 1; k <= b.count(); ++k) sum += coverage(Scheme::o_zf, fidelity, k, params);
  return sum / b.count();
}

RateResult ese_coded_nomf(Fragments b, Fidelity fidelity, const NetworkParams& params,
                          const RateOptions& options) {
  if (!b.cached()) return {};
  return rate_integral(
      [&](double g) {
        const auto values =
            coverage_profile(Scheme::no_mf, fidelity, at_threshold(params, g), b.count()).values;
        return std::accumulate(values.begin(), values.end(), 1.0, std::multiplies<>());
      },
      options);
}

RateResult ese_coded_ozf(Fragments b, Fidelity fidelity, const NetworkParams& params,
                         const RateOptions& options) {
  if (!b.cached()) return {};
  require(b.count() <= params.cluster_size, ErrorCode::domain,
          "fragment count exceeds the cluster size");
  const auto rates = ese_rates(Scheme::o_zf, fidelity, params, 0, options);
  RateResult out;
  for (int k = 0; k < b.count(); ++k) {
    out.value += rates[k].value;
    out.truncation_bound += rates[k].truncation_bound;
  }
  out.value /= b.count();
  out.truncation_bound /= b.count();
  return out;
}

std::vector<double> coded_value_table(Scheme scheme, Metric metric, Fidelity fidelity,
                                      const NetworkParams& params, const RateOptions& options) {
  const int K = params.cluster_size;
  std::vector<double> table(static_cast<std::size_t>(K));
  switch (scheme) {
    case Scheme::no_mf:
      for (int b = 1; b <= K; ++b) {
        table[b - 1] = metric == Metric::fot
                           ? fot_coded_nomf(Fragments::split(b), fidelity, params)
                           : ese_coded_nomf(Fragments::split(b), fidelity, params, options).value;
      }
      return table;
    case Scheme::o_zf:
    case Scheme::zf: {
      std::vector<double> per_rank;
      if (metric == Metric::fot) {
        per_rank = coverage_profile(Scheme::o_zf, fidelity, params).values;
      } else {
        for (const RateResult& r : ese_rates(Scheme::o_zf, fidelity, params, 0, options)) {
          per_rank.push_back(r.value);
        }
      }
      return prefix_means(per_rank);
    }
    case Scheme::mf: break;
  }
  raise(ErrorCode::domain, "coded caching uses the NO-MF or O-ZF transmission scheme");
}

double objective_coded(const PopularityProfile& popularity, const CodedCachePolicy& policy,
                       const std::vector<double>& per_fragments) {
  require(policy.b.size() == popularity.p.size(), ErrorCode::domain,
          "policy length must match the popularity profile");
  double total = 0.0;
  for (std::size_t n = 0; n < policy.b.size(); ++n) {
    const Fragments& f = policy.b[n];
    if (!f.cached()) continue;
    require(static_cast<std::size_t>(f.count()) <= per_fragments.size(), ErrorCode::domain,
            "fragment count outside the value table");
    total += popularity.p[n] * per_fragments[f.count() - 1];
  }
  return total;
}

}  // namespace cachebeam
