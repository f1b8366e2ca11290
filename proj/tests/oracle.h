/*
 * Copyright 2026 The bipex Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reference computations for tests. Nothing here calls into the estimator or
// inference code: exposures, moments and variances are recomputed from their
// definitions by brute force.

#ifndef BIPEX_TESTS_ORACLE_H_
#define BIPEX_TESTS_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace bipex::oracle {

// Dense n x m weight matrix.
using Dense = std::vector<std::vector<double>>;

// Calls visit(z, probability) for all 2^m assignments of independent
// Bernoulli(p) units. When cluster_of is non-empty, the 2^C cluster patterns
// are enumerated instead and broadcast to members.
inline void ForEachAssignment(
    std::size_t m, double p, const std::vector<std::size_t>& cluster_of,
    const std::function<void(const std::vector<double>&, double)>& visit) {
  std::size_t units = m;
  if (!cluster_of.empty()) {
    units = *std::max_element(cluster_of.begin(), cluster_of.end()) + 1;
  }
  std::vector<double> draw(units), z(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << units); ++mask) {
    double prob = 1.0;
    for (std::size_t c = 0; c < units; ++c) {
      draw[c] = ((mask >> c) & 1) ? 1.0 : 0.0;
      prob *= draw[c] == 1.0 ? p : 1.0 - p;
    }
    for (std::size_t r = 0; r < m; ++r) z[r] = cluster_of.empty() ? draw[r] : draw[cluster_of[r]];
    visit(z, prob);
  }
}

inline std::vector<double> Exposure(const Dense& a, const std::vector<double>& z) {
  std::vector<double> h(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t r = 0; r < z.size(); ++r) h[i] += a[i][r] * z[r];
  }
  return h;
}

struct EnumeratedMoments {
  std::vector<double> mean;
  std::vector<double> var;
};

inline EnumeratedMoments ExposureMomentsByEnumeration(
    const Dense& a, std::size_t m, double p, const std::vector<std::size_t>& cluster_of = {}) {
  const std::size_t n = a.size();
  EnumeratedMoments out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> second(n, 0.0);
  ForEachAssignment(m, p, cluster_of, [&](const std::vector<double>& z, double prob) {
    const auto h = Exposure(a, z);
    for (std::size_t i = 0; i < n; ++i) {
      out.mean[i] += prob * h[i];
      second[i] += prob * h[i] * h[i];
    }
  });
  for (std::size_t i = 0; i < n; ++i) out.var[i] = second[i] - out.mean[i] * out.mean[i];
  return out;
}

// Exact distribution summaries of tau_erl(Z) = (1/n) sum y_i w_i(Z) and
// tau_f(Z), with w_i = (H_i - E[H_i]) / V[H_i] and y, f held fixed.
struct EnumeratedEstimator {
  double mean_erl = 0.0;
  double var_erl = 0.0;
  double mean_f = 0.0;
  double var_f = 0.0;
  double cov = 0.0;
  // Variance of tau_erl - lambda tau_f, enumerated directly.
  std::function<double(double)> var_adjusted;
};

inline EnumeratedEstimator EstimatorByEnumeration(const Dense& a, std::size_t m, double p,
                                                  const std::vector<double>& y,
                                                  const std::vector<double>& f) {
  const auto mom = ExposureMomentsByEnumeration(a, m, p);
  const std::size_t n = a.size();
  struct Point {
    double prob, erl, cov;
  };
  auto points = std::make_shared<std::vector<Point>>();
  ForEachAssignment(m, p, {}, [&](const std::vector<double>& z, double prob) {
    const auto h = Exposure(a, z);
    double erl = 0.0, tf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (h[i] - mom.mean[i]) / mom.var[i];
      erl += y[i] * w;
      tf += f.empty() ? 0.0 : f[i] * w;
    }
    points->push_back({prob, erl / n, tf / n});
  });
  EnumeratedEstimator out;
  for (const auto& pt : *points) {
    out.mean_erl += pt.prob * pt.erl;
    out.mean_f += pt.prob * pt.cov;
  }
  for (const auto& pt : *points) {
    const double de = pt.erl - out.mean_erl, df = pt.cov - out.mean_f;
    out.var_erl += pt.prob * de * de;
    out.var_f += pt.prob * df * df;
    out.cov += pt.prob * de * df;
  }
  out.var_adjusted = [points](double lambda) {
    double mean = 0.0, var = 0.0;
    for (const auto& pt : *points) mean += pt.prob * (pt.erl - lambda * pt.cov);
    for (const auto& pt : *points) {
      const double d = pt.erl - lambda * pt.cov - mean;
      var += pt.prob * d * d;
    }
    return var;
  };
  return out;
}

// (1/n^2) sum_i sum_j y_i y_j w_i w_j, evaluated term by term.
inline double SharpNullDoubleSum(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      total += static_cast<long double>(y[i]) * y[j] * w[i] * w[j];
    }
  }
  return static_cast<double>(total / (static_cast<long double>(n) * n));
}

// Same double sum restricted to ordered pairs whose dense rows share a
// randomization unit, or a cluster when cluster_of is given.
inline double SharpNullDependentPairs(const Dense& a, const std::vector<double>& y,
                                      const std::vector<double>& w,
                                      const std::vector<std::size_t>& cluster_of = {}) {
  const std::size_t n = y.size();
  std::size_t groups = 0;
  for (std::size_t i = 0; i < n; ++i) groups = std::max(groups, a[i].size());
  if (!cluster_of.empty()) {
    groups = *std::max_element(cluster_of.begin(), cluster_of.end()) + 1;
  }
  // support[i][c]: unit i has a nonzero weight inside group c.
  std::vector<std::vector<char>> support(n, std::vector<char>(groups, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < a[i].size(); ++r) {
      if (a[i][r] != 0.0) support[i][cluster_of.empty() ? r : cluster_of[r]] = 1;
    }
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bool dependent = false;
      for (std::size_t c = 0; c < groups && !dependent; ++c) {
        dependent = support[i][c] && support[j][c];
      }
      if (dependent) total += static_cast<long double>(y[i]) * y[j] * w[i] * w[j];
    }
  }
  return static_cast<double>(total / (static_cast<long double>(n) * n));
}

inline double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse of NormalCdf by bisection on the erfc-based CDF.
inline double QuantileByBisection(double prob) {
  long double lo = -40.0L, hi = 40.0L;
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double cdf = 0.5L * std::erfc(-mid / std::sqrt(2.0L));
    if (cdf < prob) lo = mid; else hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

struct SampleShape {
  double mean = 0.0;
  double var = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

inline SampleShape Shape(const std::vector<double>& x) {
  SampleShape s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.var = m2;
  s.skewness = m3 / std::pow(m2, 1.5);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return s;
}

// Kolmogorov-Smirnov distance between the sample and N(0, 1).
inline double KsDistanceToNormal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double cdf = NormalCdf(x[k]);
    d = std::max({d, (k + 1) / n - cdf, cdf - k / n});
  }
  return d;
}

}  // namespace bipex::oracle

#endif  // BIPEX_TESTS_ORACLE_H_
