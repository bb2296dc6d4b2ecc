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

#ifndef CHAOSIDX_WOLF_HPP
#define CHAOSIDX_WOLF_HPP

// Largest Lyapunov exponent by following a fiducial trajectory and one
// neighboring trajectory through the reconstructed phase space (Wolf et al.,
// fixed evolution time variant).
//
// The fiducial point walks forward evolve_steps samples at a time. Each
// segment contributes ln(d_end / d_start). When the separation exceeds
// max_separation the neighbor is replaced by the closest admissible point
// whose direction from the fiducial point stays within max_replacement_angle
// of the old separation vector; with an empty cone the closest admissible
// point is taken regardless of angle.

#include <chaosidx/error.hpp>
#include <chaosidx/neighbors.hpp>
#include <chaosidx/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaosidx {

struct WolfParams {
  int evolve_steps = 3;
  double min_separation = 1e-3;
  double max_separation = 1e-1;
  int theiler = 0;
  double max_replacement_angle = 0.5;  // radians

  /// Defaults scaled to the attractor: separations at 1e-3 and 0.1 of its extent.
  static WolfParams defaults_for(const DelayVectors& vectors);
};

/// Largest per-coordinate range of the point set.
inline double attractor_extent(const DelayVectors& vectors) {
  double extent = 0.0;
  for (std::size_t k = 0; k < vectors.dimension(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      lo = std::min(lo, vectors.at(i, k));
      hi = std::max(hi, vectors.at(i, k));
    }
    extent = std::max(extent, hi - lo);
  }
  return extent;
}

inline WolfParams WolfParams::defaults_for(const DelayVectors& vectors) {
  const double extent = attractor_extent(vectors);
  WolfParams p;
  p.min_separation = 1e-3 * extent;
  p.max_separation = 1e-1 * extent;
  p.theiler = vectors.params().theiler;
  return p;
}

inline void validate(const WolfParams& p) {
  if (p.evolve_steps < 1) throw Error(ErrorKind::Configuration, "evolve_steps must be >= 1");
  if (!(p.min_separation > 0.0) || !(p.max_separation > 0.0))
    throw Error(ErrorKind::Configuration, "separations must be > 0");
  if (!(p.min_separation < p.max_separation))
    throw Error(ErrorKind::Configuration, "min_separation must be < max_separation");
  if (p.theiler < 0) throw Error(ErrorKind::Configuration, "Theiler window must be >= 0");
  if (!(p.max_replacement_angle > 0.0 && p.max_replacement_angle < 3.14159265358979323846))
    throw Error(ErrorKind::Configuration, "max_replacement_angle must lie in (0, pi)");
}

struct LyapunovResult {
  double exponent = 0.0;  // nats per sample
  int n_renormalizations = 0;
  int n_replacements = 0;
  std::size_t total_evolved_samples = 0;
  bool low_confidence = false;  // fewer than 10 renormalizations
};

namespace detail {

class WolfTracker {
public:
  WolfTracker(const DelayVectors& v, const WolfParams& p)
      : v_(v), p_(p), tree_(v.data(), v.dimension(), v.size()) {}

  double dist(std::size_t a, std::size_t b) const {
    return std::sqrt(distance<SquaredEuclidean>(v_.point(a), v_.point(b)));
  }

  /// Closest admissible partner for fiducial point i. `reference`, when
  /// given, is the previous partner whose direction defines the cone.
  std::optional<std::size_t> partner(std::size_t i, std::optional<std::size_t> reference) const {
    const std::size_t last = v_.size() - 1;
    const auto gap = static_cast<std::size_t>(p_.theiler);
    const double lo2 = p_.min_separation * p_.min_separation;
    const double hi2 = p_.max_separation * p_.max_separation;

    std::vector<double> ref_dir;
    double ref_norm = 0.0;
    if (reference) {
      ref_dir.resize(v_.dimension());
      for (std::size_t k = 0; k < v_.dimension(); ++k) {
        ref_dir[k] = v_.at(*reference, k) - v_.at(i, k);
        ref_norm += ref_dir[k] * ref_dir[k];
      }
      ref_norm = std::sqrt(ref_norm);
    }
    const bool use_cone = reference && ref_norm > 0.0;
    const double cos_limit = std::cos(p_.max_replacement_angle);

    Neighbor best_cone, best_any;
    auto consider = [](Neighbor& best, std::size_t j, double d) {
      if (d < best.distance || (d == best.distance && j < best.index)) best = {j, d};
    };
    tree_.within<SquaredEuclidean>(v_.point(i), hi2, [&](std::size_t j, double d2) {
      if (j == i || j >= last) return;  // partner must be able to evolve
      if ((j > i ? j - i : i - j) <= gap) return;
      if (d2 < lo2) return;
      consider(best_any, j, d2);
      if (use_cone) {
        double dot = 0.0;
        for (std::size_t k = 0; k < v_.dimension(); ++k) dot += ref_dir[k] * (v_.at(j, k) - v_.at(i, k));
        if (dot >= cos_limit * ref_norm * std::sqrt(d2)) consider(best_cone, j, d2);
      }
    });
    if (best_cone.found()) return best_cone.index;
    if (best_any.found()) return best_any.index;
    return std::nullopt;
  }

private:
  const DelayVectors& v_;
  const WolfParams& p_;
  KdTree tree_;
};

}  // namespace detail

inline LyapunovResult largest_lyapunov_wolf(const DelayVectors& vectors, const WolfParams& params) {
  validate(params);
  const std::size_t n = vectors.size();
  if (n < 100)
    throw Error(ErrorKind::Dimension,
                "Wolf estimator needs at least 100 points, got " + std::to_string(n));

  detail::WolfTracker tracker(vectors, params);

  std::size_t i = 0;
  std::optional<std::size_t> j;
  for (; i + 1 < n && !j; ++i) j = tracker.partner(i, std::nullopt);
  if (!j)
    throw Error(ErrorKind::EstimationFailure,
                "no admissible initial neighbor (separation window or Theiler window too strict)");
  --i;

  const auto steps = static_cast<std::size_t>(params.evolve_steps);
  LyapunovResult out;
  double log_sum = 0.0;
  while (i + 1 < n && *j + 1 < n) {
    const std::size_t step = std::min({steps, n - 1 - i, n - 1 - *j});
    const double d0 = tracker.dist(i, *j);
    const double d1 = tracker.dist(i + step, *j + step);
    i += step;
    *j += step;
    if (d1 > 0.0) {
      log_sum += std::log(d1 / d0);
      out.total_evolved_samples += step;
      ++out.n_renormalizations;
    }
    if (i + 1 >= n) break;
    if (d1 > params.max_separation || !(d1 > 0.0)) {
      const auto reference = d1 > 0.0 ? std::optional<std::size_t>(*j) : std::nullopt;
      if (auto next = tracker.partner(i, reference)) {
        j = next;
        ++out.n_replacements;
      } else if (!(d1 > 0.0)) {
        break;  // trajectories merged and nothing to replace them with
      }
    }
  }

  if (out.n_renormalizations == 0)
    throw Error(ErrorKind::EstimationFailure, "no divergence segment could be evaluated");
  out.exponent = log_sum / static_cast<double>(out.total_evolved_samples);
  out.low_confidence = out.n_renormalizations < 10;
  return out;
}

}  // namespace chaosidx

#endif  // CHAOSIDX_WOLF_HPP
