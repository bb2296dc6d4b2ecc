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

#ifndef CHAOSIDX_INFORMATION_HPP
#define CHAOSIDX_INFORMATION_HPP

// Plug-in (histogram) entropy and mutual information, in bits. No bias
// correction is applied, so small samples over-estimate mutual information.

#include <chaosidx/error.hpp>
#include <chaosidx/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace chaosidx {

struct DiscreteDistribution {
  std::vector<double> probabilities;
  std::vector<double> bin_edges;  // probabilities.size() + 1 entries
};

struct JointDistribution {
  std::size_t bins = 0;
  std::vector<double> probabilities;  // row-major bins x bins, row = x bin
  std::vector<double> x_edges;
  std::vector<double> y_edges;

  double at(std::size_t i, std::size_t j) const noexcept { return probabilities[i * bins + j]; }
  std::vector<double> x_marginal() const;
  std::vector<double> y_marginal() const;
};

namespace detail {

struct Binning {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 1;

  // Equal-width bins over [lo, hi]; the top edge belongs to the last bin.
  std::size_t index(double v) const noexcept {
    if (!(hi > lo)) return 0;
    const double pos = (v - lo) / (hi - lo) * static_cast<double>(bins);
    auto k = static_cast<std::size_t>(pos < 0.0 ? 0.0 : pos);
    return k >= bins ? bins - 1 : k;
  }

  std::vector<double> edges() const {
    std::vector<double> e(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
      e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    e[bins] = hi;
    return e;
  }
};

inline Binning make_binning(std::span<const double> x, std::size_t bins) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return Binning{*mn, *mx, bins};
}

inline double plogp_sum(std::span<const double> p) noexcept {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace detail

inline std::vector<double> JointDistribution::x_marginal() const {
  std::vector<double> m(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i)
    for (std::size_t j = 0; j < bins; ++j) m[i] += at(i, j);
  return m;
}

inline std::vector<double> JointDistribution::y_marginal() const {
  std::vector<double> m(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i)
    for (std::size_t j = 0; j < bins; ++j) m[j] += at(i, j);
  return m;
}

/// H = -sum p log2 p over the nonzero probabilities.
inline double entropy(const DiscreteDistribution& dist) {
  return detail::plogp_sum(dist.probabilities);
}

inline DiscreteDistribution histogram_distribution(std::span<const double> x, std::size_t bins) {
  if (x.empty()) throw Error(ErrorKind::Dimension, "histogram of an empty sequence");
  if (bins < 1) throw Error(ErrorKind::Configuration, "bin count must be >= 1");
  const auto binning = detail::make_binning(x, bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : x) counts[binning.index(v)] += 1.0;
  for (double& c : counts) c /= static_cast<double>(x.size());
  return {std::move(counts), binning.edges()};
}

inline JointDistribution joint_distribution(std::span<const double> x, std::span<const double> y,
                                            std::size_t bins) {
  if (x.size() != y.size())
    throw Error(ErrorKind::Configuration, "sequence length mismatch: " + std::to_string(x.size()) +
                                              " vs " + std::to_string(y.size()));
  if (bins < 2) throw Error(ErrorKind::Configuration, "bin count must be >= 2");
  if (x.size() < bins)
    throw Error(ErrorKind::Dimension, "need at least as many samples as bins");
  const auto bx = detail::make_binning(x, bins);
  const auto by = detail::make_binning(y, bins);
  JointDistribution joint;
  joint.bins = bins;
  joint.probabilities.assign(bins * bins, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k)
    joint.probabilities[bx.index(x[k]) * bins + by.index(y[k])] += 1.0;
  for (double& p : joint.probabilities) p /= static_cast<double>(x.size());
  joint.x_edges = bx.edges();
  joint.y_edges = by.edges();
  return joint;
}

/// I = H_X + H_Y - H_{X,Y}.
inline double mutual_information_from_entropies(const JointDistribution& joint) {
  const auto px = joint.x_marginal();
  const auto py = joint.y_marginal();
  return detail::plogp_sum(px) + detail::plogp_sum(py) - detail::plogp_sum(joint.probabilities);
}

/// I = sum p(x,y) log2( p(x,y) / (p(x) p(y)) ).
inline double mutual_information_from_ratios(const JointDistribution& joint) {
  const auto px = joint.x_marginal();
  const auto py = joint.y_marginal();
  double info = 0.0;
  for (std::size_t i = 0; i < joint.bins; ++i)
    for (std::size_t j = 0; j < joint.bins; ++j) {
      const double p = joint.at(i, j);
      if (p > 0.0) info += p * std::log2(p / (px[i] * py[j]));
    }
  return info;
}

inline double mutual_information(std::span<const double> x, std::span<const double> y,
                                 std::size_t bins) {
  return mutual_information_from_entropies(joint_distribution(x, y, bins));
}

/// Mutual information between the series and itself shifted by `lag` samples.
inline double auto_mutual_information(std::span<const double> x, int lag, std::size_t bins) {
  if (lag < 0) throw Error(ErrorKind::Configuration, "lag must be >= 0");
  if (x.size() < 2 || static_cast<std::size_t>(lag) >= x.size() - 1)
    throw Error(ErrorKind::Dimension, "lag " + std::to_string(lag) + " too large for series of length " +
                                          std::to_string(x.size()));
  const std::size_t n = x.size() - static_cast<std::size_t>(lag);
  return mutual_information(x.subspan(0, n), x.subspan(static_cast<std::size_t>(lag), n), bins);
}

inline double auto_mutual_information(const TimeSeries& series, int lag, std::size_t bins) {
  return auto_mutual_information(series.samples(), lag, bins);
}

/// First local minimum of an auto-MI profile indexed by lag (profile[0] is lag 0).
/// Lags in [1, max_lag] qualify; a lag needs a right-hand neighbor in the profile
/// to count as a minimum. No minimum gives max_lag with the saturation flag.
inline LagChoice first_local_minimum(std::span<const double> profile, int max_lag) {
  if (max_lag < 1 || profile.size() < 2)
    throw Error(ErrorKind::Configuration, "profile too short for a minimum search");
  const auto last = std::min<std::size_t>(static_cast<std::size_t>(max_lag), profile.size() - 1);
  for (std::size_t L = 1; L <= last; ++L) {
    if (L + 1 >= profile.size()) break;
    if (profile[L] < profile[L - 1] && profile[L] <= profile[L + 1]) return {static_cast<int>(L), false};
  }
  return {max_lag, true};
}

/// Auto-MI for lags 0..max_lag.
inline std::vector<double> auto_mutual_information_profile(std::span<const double> x, int max_lag,
                                                           std::size_t bins) {
  std::vector<double> profile;
  for (int lag = 0; lag <= max_lag; ++lag) profile.push_back(auto_mutual_information(x, lag, bins));
  return profile;
}

/// Embedding lag as the first local minimum of the auto-mutual-information.
inline LagChoice select_lag_first_minimum(std::span<const double> x, int max_lag, std::size_t bins) {
  if (max_lag < 2) throw Error(ErrorKind::Configuration, "max_lag must be >= 2");
  if (x.size() < 3 || static_cast<std::size_t>(max_lag) >= x.size() - 1)
    throw Error(ErrorKind::Dimension, "max_lag too large for series length");
  // One lag past max_lag when the series allows it, for the right-hand test.
  const int scan = static_cast<std::size_t>(max_lag) + 1 < x.size() - 1 ? max_lag + 1 : max_lag;
  return first_local_minimum(auto_mutual_information_profile(x, scan, bins), max_lag);
}

inline LagChoice select_lag_first_minimum(const TimeSeries& series, int max_lag, std::size_t bins) {
  return select_lag_first_minimum(series.samples(), max_lag, bins);
}

/// Expected plug-in MI (bits) between two independent variables on a
/// bins x bins histogram of n pairs (first-order bias).
inline double independence_bias_bits(std::size_t n, std::size_t bins) {
  const double b = static_cast<double>(bins) - 1.0;
  return b * b / (2.0 * static_cast<double>(n) * std::numbers::ln2);
}

struct EmbeddingLag {
  int lag = 1;
  bool saturated = false;
  bool at_noise_floor = false;  // first minimum was indistinguishable from independence
};

/// Delay used for embedding. The first auto-MI minimum, except when the MI
/// there is within noise_factor times the independence bias: then the
/// minimum is a sampling wiggle after the series has already decorrelated
/// (typical of maps), and the delay falls back to 1. noise_factor <= 0
/// disables the fallback.
inline EmbeddingLag select_embedding_lag(std::span<const double> x, int max_lag, std::size_t bins,
                                         double noise_factor) {
  if (max_lag < 2) throw Error(ErrorKind::Configuration, "max_lag must be >= 2");
  if (x.size() < 3 || static_cast<std::size_t>(max_lag) >= x.size() - 1)
    throw Error(ErrorKind::Dimension, "max_lag too large for series length");
  const int scan = static_cast<std::size_t>(max_lag) + 1 < x.size() - 1 ? max_lag + 1 : max_lag;
  const auto profile = auto_mutual_information_profile(x, scan, bins);
  const auto c = first_local_minimum(profile, max_lag);
  EmbeddingLag out{c.lag, c.saturated, false};
  if (!c.saturated && noise_factor > 0.0 &&
      profile[static_cast<std::size_t>(c.lag)] <=
          noise_factor * independence_bias_bits(x.size() - static_cast<std::size_t>(c.lag), bins)) {
    out.lag = 1;
    out.at_noise_floor = true;
  }
  return out;
}

}  // namespace chaosidx

#endif  // CHAOSIDX_INFORMATION_HPP
