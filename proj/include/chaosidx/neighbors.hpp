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

#ifndef CHAOSIDX_NEIGHBORS_HPP
#define CHAOSIDX_NEIGHBORS_HPP

// Static k-d tree over a row-major point buffer. Queries are parameterized by
// a norm policy so the same tree answers maximum-norm nearest-neighbor
// queries (Cao) and Euclidean range queries (Wolf, correlation sums).
//
// Every distance that decides a result is computed point-to-point in
// coordinate order, exactly as a direct scan would, so results are
// bit-identical to brute force. Box bounds are only used to prune, and a
// box bound never exceeds the true distance of any point inside it.

#include <chaosidx/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace chaosidx {

/// max_k |a_k - b_k|
struct MaxNorm {
  static double term(double diff) noexcept { return std::fabs(diff); }
  static double combine(double acc, double term) noexcept { return acc > term ? acc : term; }
};

/// sum_k (a_k - b_k)^2 ; callers compare against squared radii.
struct SquaredEuclidean {
  static double term(double diff) noexcept { return diff * diff; }
  static double combine(double acc, double term) noexcept { return acc + term; }
};

template <class Norm>
inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc = Norm::combine(acc, Norm::term(a[k] - b[k]));
  return acc;
}

struct Neighbor {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  double distance = std::numeric_limits<double>::infinity();

  bool found() const noexcept { return index != std::numeric_limits<std::size_t>::max(); }
};

class KdTree {
public:
  /// Indexes the first `count` rows of `coords` (row width `dim`).
  KdTree(std::span<const double> coords, std::size_t dim, std::size_t count,
         std::size_t leaf_size = 12)
      : coords_(coords), dim_(dim), count_(count), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (dim_ == 0) throw Error(ErrorKind::Configuration, "k-d tree needs dimension >= 1");
    if (count_ * dim_ > coords_.size())
      throw Error(ErrorKind::Configuration, "k-d tree point count exceeds buffer");
    perm_.resize(count_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (count_ > 0) build(0, count_);
  }

  std::size_t size() const noexcept { return count_; }
  std::size_t dimension() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  /// Closest point accepted by `accept(index, dist)`. Equal distances resolve
  /// to the lowest index.
  template <class Norm, class Accept>
  Neighbor nearest(std::span<const double> query, Accept&& accept) const {
    Neighbor best;
    if (count_ > 0) nearest_impl<Norm>(0, query, accept, best);
    return best;
  }

  /// Calls `visit(index, dist)` for every point with dist <= radius, where
  /// radius is in the norm's own units (squared for SquaredEuclidean).
  template <class Norm, class Visit>
  void within(std::span<const double> query, double radius, Visit&& visit) const {
    if (count_ > 0) within_impl<Norm>(0, query, radius, visit);
  }

private:
  struct Node {
    std::size_t begin = 0, end = 0;
    std::size_t left = 0, right = 0;  // 0 means leaf (root is never a child)
    std::size_t box = 0;              // offset into boxes_: dim lows then dim highs
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end, 0, 0, boxes_.size()});
    boxes_.resize(boxes_.size() + 2 * dim_);
    double* lo = boxes_.data() + nodes_[id].box;
    double* hi = lo + dim_;
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = std::numeric_limits<double>::infinity();
      hi[k] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t p = begin; p < end; ++p) {
      const double* row = coords_.data() + perm_[p] * dim_;
      for (std::size_t k = 0; k < dim_; ++k) {
        lo[k] = std::min(lo[k], row[k]);
        hi[k] = std::max(hi[k], row[k]);
      }
    }
    if (end - begin <= leaf_size_) return id;

    std::size_t split_dim = 0;
    double widest = -1.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (hi[k] - lo[k] > widest) {
        widest = hi[k] - lo[k];
        split_dim = k;
      }
    }
    if (!(widest > 0.0)) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                     perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return coords_[a * dim_ + split_dim] < coords_[b * dim_ + split_dim];
                     });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  template <class Norm>
  double box_bound(const Node& node, std::span<const double> q) const noexcept {
    const double* lo = boxes_.data() + node.box;
    const double* hi = lo + dim_;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      double gap = 0.0;
      if (q[k] < lo[k]) gap = lo[k] - q[k];
      else if (q[k] > hi[k]) gap = q[k] - hi[k];
      acc = Norm::combine(acc, Norm::term(gap));
    }
    return acc;
  }

  template <class Norm, class Accept>
  void nearest_impl(std::size_t id, std::span<const double> q, Accept& accept, Neighbor& best) const {
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t j = perm_[p];
        const double d = distance<Norm>(q, point(j));
        if (d > best.distance || (d == best.distance && j > best.index)) continue;
        if (!accept(j, d)) continue;
        best.index = j;
        best.distance = d;
      }
      return;
    }
    const double bl = box_bound<Norm>(nodes_[node.left], q);
    const double br = box_bound<Norm>(nodes_[node.right], q);
    const std::size_t first = bl <= br ? node.left : node.right;
    const std::size_t second = bl <= br ? node.right : node.left;
    if (std::min(bl, br) <= best.distance) nearest_impl<Norm>(first, q, accept, best);
    if (std::max(bl, br) <= best.distance) nearest_impl<Norm>(second, q, accept, best);
  }

  template <class Norm, class Visit>
  void within_impl(std::size_t id, std::span<const double> q, double radius, Visit& visit) const {
    const Node& node = nodes_[id];
    if (box_bound<Norm>(node, q) > radius) return;
    if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t j = perm_[p];
        const double d = distance<Norm>(q, point(j));
        if (d <= radius) visit(j, d);
      }
      return;
    }
    within_impl<Norm>(node.left, q, radius, visit);
    within_impl<Norm>(node.right, q, radius, visit);
  }

  std::span<const double> coords_;
  std::size_t dim_;
  std::size_t count_;
  std::size_t leaf_size_;
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
  std::vector<double> boxes_;
};

}  // namespace chaosidx

#endif  // CHAOSIDX_NEIGHBORS_HPP
