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

#ifndef CHAOSIDX_CORRELATION_HPP
#define CHAOSIDX_CORRELATION_HPP

// Grassberger-Procaccia correlation integral with the Theiler correction,
// and the correlation dimension D2 as the slope of log C(R) against log R
// over an automatically selected scaling region.
//
// A pair (i, j), i < j, is admissible when j - i > W. C(R) is the fraction of
// admissible pairs with Euclidean distance <= R. Comparisons are made on
// squared distances.

#include <chaosidx/error.hpp>
#include <chaosidx/neighbors.hpp>
#include <chaosidx/series.hpp>
#include <chaosidx/synth.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace chaosidx {

struct CorrelationCurve {
  std::vector<double> radii;
  std::vector<double> c_values;
  std::vector<std::uint64_t> pair_counts;
  std::uint64_t admissible_pairs = 0;
  int theiler = 0;
  std::size_t n_points = 0;
};

struct D2Estimate {
  double d2 = 0.0;
  double r_low = 0.0;
  double r_high = 0.0;
  double fit_r2 = 0.0;
  std::size_t n_radii_in_fit = 0;
  std::uint64_t n_pairs_in_range = 0;  // pairs with r_low < distance <= r_high
};

struct CurveOptions {
  std::size_t n_radii = 24;
  double low_percentile = 0.001;
  std::size_t max_sampled_pairs = 1'000'000;
  std::uint64_t sample_seed = 0x5eed'c0de;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct ScalingOptions {
  double min_r2 = 0.98;
  double min_window_fraction = 0.4;
  std::size_t min_window = 4;
};

/// Number of unordered pairs (i, j) with j - i > W among n points.
inline std::uint64_t admissible_pair_count(std::size_t n, int theiler) {
  const auto w = static_cast<std::uint64_t>(theiler);
  const auto nn = static_cast<std::uint64_t>(n);
  if (nn <= w + 1) return 0;
  const std::uint64_t k = nn - w - 1;  // pairs at gap w + 1 .. n - 1
  return k * (k + 1) / 2;
}

namespace detail {

inline std::uint64_t require_pairs(std::size_t n, int theiler) {
  if (theiler < 0) throw Error(ErrorKind::Configuration, "Theiler window must be >= 0");
  const auto pairs = admissible_pair_count(n, theiler);
  if (pairs == 0)
    throw Error(ErrorKind::Configuration,
                "no admissible pairs: " + std::to_string(n) + " points with Theiler window " +
                    std::to_string(theiler));
  return pairs;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(begin, end, slot) over [0, n) split into contiguous chunks.
inline void parallel_chunks(std::size_t n, unsigned threads,
                            const std::function<void(std::size_t, std::size_t, unsigned)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    body(0, n, 0);
    return;
  }
  // Row i costs ~ (n - i) pair evaluations; balance by equal pair counts.
  std::vector<std::size_t> cuts{0};
  const double total = static_cast<double>(n) * static_cast<double>(n) / 2.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n && cuts.size() < threads; ++i) {
    acc += static_cast<double>(n - i);
    if (acc >= total * static_cast<double>(cuts.size()) / threads) cuts.push_back(i + 1);
  }
  cuts.push_back(n);
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
    pool.emplace_back(body, cuts[c], cuts[c + 1], static_cast<unsigned>(c));
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// C(R) via fixed-radius counting on a k-d tree.
inline double correlation_sum(const DelayVectors& v, double radius, int theiler) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Configuration, "radius must be > 0");
  const auto pairs = detail::require_pairs(v.size(), theiler);
  const KdTree tree(v.data(), v.dimension(), v.size());
  const double r2 = radius * radius;
  const auto gap = static_cast<std::size_t>(theiler);
  std::uint64_t inside = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    tree.within<SquaredEuclidean>(v.point(i), r2, [&](std::size_t j, double) {
      if (j > i + gap) ++inside;
    });
  }
  return static_cast<double>(inside) / static_cast<double>(pairs);
}

/// Admissible pairwise distances: all of them when there are at most
/// max_pairs, otherwise a seeded uniform sample (with replacement).
inline std::vector<double> sample_pair_distances(const DelayVectors& v, int theiler,
                                                 std::size_t max_pairs, std::uint64_t seed) {
  const auto pairs = detail::require_pairs(v.size(), theiler);
  const auto gap = static_cast<std::size_t>(theiler);
  const std::size_t n = v.size();
  std::vector<double> out;
  if (pairs <= max_pairs) {
    out.reserve(pairs);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + gap + 1; j < n; ++j)
        out.push_back(std::sqrt(distance<SquaredEuclidean>(v.point(i), v.point(j))));
    return out;
  }
  Xoshiro256 rng(seed);
  out.reserve(max_pairs);
  while (out.size() < max_pairs) {
    const std::size_t i = rng.below(n);
    const std::size_t j = rng.below(n);
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    if (hi <= lo + gap) continue;
    out.push_back(std::sqrt(distance<SquaredEuclidean>(v.point(lo), v.point(hi))));
  }
  return out;
}

/// Pair counts at each radius (distance <= radius). Exact; O(N^2) in time,
/// O(radii) in memory.
inline std::vector<std::uint64_t> count_pairs_at_radii(const DelayVectors& v,
                                                       const std::vector<double>& radii, int theiler,
                                                       unsigned threads = 0) {
  detail::require_pairs(v.size(), theiler);
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw Error(ErrorKind::Configuration, "radii must be increasing");
  std::vector<double> r2(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) r2[k] = radii[k] * radii[k];

  const std::size_t n = v.size();
  const auto gap = static_cast<std::size_t>(theiler);
  const unsigned nthreads = detail::resolve_threads(threads);
  // per-slot histograms: bin k counts pairs with r2[k-1] < d2 <= r2[k]
  std::vector<std::vector<std::uint64_t>> partial(nthreads, std::vector<std::uint64_t>(r2.size() + 1, 0));
  detail::parallel_chunks(n, nthreads, [&](std::size_t begin, std::size_t end, unsigned slot) {
    auto& hist = partial[slot];
    for (std::size_t i = begin; i < end; ++i) {
      const auto pi = v.point(i);
      for (std::size_t j = i + gap + 1; j < n; ++j) {
        const double d2 = distance<SquaredEuclidean>(pi, v.point(j));
        ++hist[static_cast<std::size_t>(std::lower_bound(r2.begin(), r2.end(), d2) - r2.begin())];
      }
    }
  });
  std::vector<std::uint64_t> counts(r2.size(), 0);
  std::uint64_t running = 0;
  for (std::size_t k = 0; k < r2.size(); ++k) {
    for (const auto& h : partial) running += h[k];
    counts[k] = running;
  }
  return counts;
}

/// Log-spaced radii from the low percentile to the maximum of the
/// (sampled) pair-distance distribution.
inline CorrelationCurve correlation_curve(const DelayVectors& v, int theiler,
                                          const CurveOptions& opts = {}) {
  if (opts.n_radii < 8) throw Error(ErrorKind::Configuration, "n_radii must be >= 8");
  const auto pairs = detail::require_pairs(v.size(), theiler);

  auto sample = sample_pair_distances(v, theiler, opts.max_sampled_pairs, opts.sample_seed);
  std::sort(sample.begin(), sample.end());
  const double r_max = sample.back();
  const auto lo_idx = static_cast<std::size_t>(opts.low_percentile * static_cast<double>(sample.size() - 1));
  double r_min = sample[lo_idx];
  if (!(r_min > 0.0)) {
    const auto pos = std::upper_bound(sample.begin(), sample.end(), 0.0);
    if (pos == sample.end())
      throw Error(ErrorKind::DegenerateInput, "all pair distances are zero");
    r_min = *pos;
  }
  if (!(r_max > r_min))
    throw Error(ErrorKind::DegenerateInput, "pair-distance distribution has no spread");

  CorrelationCurve curve;
  curve.theiler = theiler;
  curve.n_points = v.size();
  curve.admissible_pairs = pairs;
  const double log_lo = std::log(r_min), log_hi = std::log(r_max);
  for (std::size_t k = 0; k < opts.n_radii; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(opts.n_radii - 1);
    curve.radii.push_back(k + 1 == opts.n_radii ? r_max : std::exp(log_lo + f * (log_hi - log_lo)));
  }
  curve.radii.front() = r_min;
  curve.pair_counts = count_pairs_at_radii(v, curve.radii, theiler, opts.threads);
  for (auto c : curve.pair_counts)
    curve.c_values.push_back(static_cast<double>(c) / static_cast<double>(pairs));
  return curve;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

/// Slope of log C vs log R over the window (of at least max(4, 40%) of the
/// radii with 0 < C < 1) whose straight-line fit has the highest R^2, subject
/// to R^2 >= 0.98. Ties go to the wider window, then the lower start.
inline D2Estimate correlation_dimension(const CorrelationCurve& curve, const ScalingOptions& opts = {}) {
  std::vector<std::size_t> eligible;
  for (std::size_t k = 0; k < curve.radii.size(); ++k)
    if (curve.c_values[k] > 0.0 && curve.c_values[k] < 1.0 && curve.radii[k] > 0.0) eligible.push_back(k);
  if (eligible.size() < 8)
    throw Error(ErrorKind::NoScalingRegion,
                "only " + std::to_string(eligible.size()) + " radii with 0 < C(R) < 1; need 8");

  std::vector<double> lx, ly;
  for (auto k : eligible) {
    lx.push_back(std::log(curve.radii[k]));
    ly.push_back(std::log(curve.c_values[k]));
  }

  const std::size_t n = eligible.size();
  const auto frac_min =
      static_cast<std::size_t>(std::ceil(opts.min_window_fraction * static_cast<double>(n)));
  const std::size_t width_min = std::max(opts.min_window, frac_min);

  bool found = false;
  std::size_t best_start = 0, best_width = 0;
  LineFit best;
  for (std::size_t width = width_min; width <= n; ++width) {
    for (std::size_t start = 0; start + width <= n; ++start) {
      const auto fit = least_squares(std::span(lx).subspan(start, width), std::span(ly).subspan(start, width));
      if (!(fit.r2 >= opts.min_r2)) continue;
      // R^2 values closer than rounding noise count as tied
      const bool tied = found && std::fabs(fit.r2 - best.r2) <= 1e-12;
      const bool better = !found || (!tied && fit.r2 > best.r2) ||
                          (tied && (width > best_width || (width == best_width && start < best_start)));
      if (better) {
        found = true;
        best = fit;
        best_start = start;
        best_width = width;
      }
    }
  }
  if (!found)
    throw Error(ErrorKind::NoScalingRegion, "no window of the log-log curve reaches R^2 >= " +
                                                std::to_string(opts.min_r2));

  D2Estimate est;
  est.d2 = std::max(0.0, best.slope);
  est.fit_r2 = best.r2;
  const std::size_t k_lo = eligible[best_start], k_hi = eligible[best_start + best_width - 1];
  est.r_low = curve.radii[k_lo];
  est.r_high = curve.radii[k_hi];
  est.n_radii_in_fit = best_width;
  est.n_pairs_in_range = curve.pair_counts[k_hi] - curve.pair_counts[k_lo];
  return est;
}

}  // namespace chaosidx

#endif  // CHAOSIDX_CORRELATION_HPP
