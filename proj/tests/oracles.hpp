/*
 * Copyright 2026 The chaosidx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CHAOSIDX_TESTS_ORACLES_HPP
#define CHAOSIDX_TESTS_ORACLES_HPP

// Slow, direct reference computations used to check the production code.
// Nothing here shares code with the library beyond the input types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

// ---- Cao ------------------------------------------------------------------

struct CaoRef {
  double e = 0.0;
  double e_star = 0.0;
  std::vector<std::size_t> neighbors;
};

/// Cao E(m) and E*(m) from an all-pairs scan of the delay vectors.
inline CaoRef cao(const std::vector<double>& x, int m, int t) {
  const std::size_t count = x.size() - static_cast<std::size_t>(m) * static_cast<std::size_t>(t);
  auto coord = [&](std::size_t i, int k) { return x[i + static_cast<std::size_t>(k * t)]; };
  CaoRef out;
  double sum_a = 0.0, sum_star = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = count;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      double d = 0.0;
      for (int k = 0; k < m; ++k) d = std::max(d, std::fabs(coord(i, k) - coord(j, k)));
      if (d > 0.0 && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.neighbors.push_back(best);
    const double ahead = std::fabs(coord(i, m) - coord(best, m));
    sum_a += std::max(best_d, ahead) / best_d;
    sum_star += ahead;
  }
  out.e = sum_a / static_cast<double>(count);
  out.e_star = sum_star / static_cast<double>(count);
  return out;
}

/// Kennel false-nearest-neighbour fraction at dimension m (Euclidean, first
/// criterion only): neighbour at dimension m is false when the added
/// coordinate separates the pair by more than rtol times their distance.
inline double fnn_fraction(const std::vector<double>& x, int m, int t, double rtol = 15.0) {
  const std::size_t count = x.size() - static_cast<std::size_t>(m) * static_cast<std::size_t>(t);
  auto coord = [&](std::size_t i, int k) { return x[i + static_cast<std::size_t>(k * t)]; };
  std::size_t false_nn = 0, total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = count;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (int k = 0; k < m; ++k) {
        const double diff = coord(i, k) - coord(j, k);
        d2 += diff * diff;
      }
      if (d2 > 0.0 && d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    if (best == count) continue;
    ++total;
    if (std::fabs(coord(i, m) - coord(best, m)) / std::sqrt(best_d2) > rtol) ++false_nn;
  }
  return static_cast<double>(false_nn) / static_cast<double>(total);
}

// ---- correlation sum ------------------------------------------------------

/// Pairs (i, j), j - i > w, with Euclidean distance <= r among row-major points.
inline std::uint64_t pair_count(const std::vector<double>& pts, std::size_t dim, double r, int w) {
  const std::size_t n = pts.size() / dim;
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + static_cast<std::size_t>(w) + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = pts[i * dim + k] - pts[j * dim + k];
        d2 += diff * diff;
      }
      if (d2 <= r * r) ++c;
    }
  return c;
}

// ---- information ------------------------------------------------------------

/// Plug-in mutual information (bits) with explicit bin bookkeeping.
inline double mutual_information(const std::vector<double>& x, const std::vector<double>& y, int bins) {
  auto bin_of = [bins](const std::vector<double>& v) {
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    std::vector<int> out;
    for (double a : v) {
      int k = hi > lo ? static_cast<int>((a - lo) / (hi - lo) * bins) : 0;
      out.push_back(std::clamp(k, 0, bins - 1));
    }
    return out;
  };
  const auto bx = bin_of(x), by = bin_of(y);
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    joint[{bx[k], by[k]}] += 1.0 / n;
    px[bx[k]] += 1.0 / n;
    py[by[k]] += 1.0 / n;
  }
  double info = 0.0;
  for (const auto& [key, p] : joint) info += p * std::log2(p / (px[key.first] * py[key.second]));
  return info;
}

inline double auto_mutual_information(const std::vector<double>& x, int lag, int bins) {
  const std::size_t n = x.size() - static_cast<std::size_t>(lag);
  std::vector<double> a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> b(x.begin() + lag, x.begin() + lag + static_cast<std::ptrdiff_t>(n));
  return mutual_information(a, b, bins);
}

// ---- statistics ---------------------------------------------------------------

inline double t_density(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                   std::sqrt(df * std::numbers::pi);
  return c * std::pow(1.0 + t * t / df, -(df + 1.0) / 2.0);
}

/// Upper tail of Student's t by composite Simpson integration of the density
/// over [t, infinity).
inline double t_upper_tail(double t, double df, int intervals = 2'000'000) {
  // substitution s = tan(u) maps the half line onto [atan(t), pi/2)
  const double a = std::atan(t), b = std::numbers::pi / 2.0;
  const double h = (b - a) / intervals;
  auto f = [&](double u) {
    if (u >= b) return df == 1.0 ? t_density(0.0, df) : 0.0;  // limit at infinity
    const double s = std::tan(u);
    return t_density(s, df) * (1.0 + s * s);
  };
  double sum = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Two-pass mean and sample standard deviation.
inline MeanStd two_pass(const std::vector<double>& v) {
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace oracle

#endif  // CHAOSIDX_TESTS_ORACLES_HPP
