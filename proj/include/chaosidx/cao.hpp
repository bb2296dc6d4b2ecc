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

#ifndef CHAOSIDX_CAO_HPP
#define CHAOSIDX_CAO_HPP

// Cao's method for the minimum embedding dimension.
//
// For dimension m the points y_i(m), i < N - m t, are paired with their
// nearest neighbor n(i, m) under the maximum norm (self excluded, zero
// distances skipped, ties to the lowest index). Then
//   a(i, m)  = |y_i(m+1) - y_n(m+1)| / |y_i(m) - y_n(m)|
//   E(m)     = mean_i a(i, m)
//   E*(m)    = mean_i |x_{i + m t} - x_{n + m t}|
//   E1(m)    = E(m+1) / E(m),   E2(m) = E*(m+1) / E*(m)

#include <chaosidx/error.hpp>
#include <chaosidx/neighbors.hpp>
#include <chaosidx/series.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaosidx {

struct CaoTerms {
  double e = 0.0;       // E(m)
  double e_star = 0.0;  // E*(m)
  std::size_t points = 0;
};

struct CaoProfile {
  std::vector<double> e1;  // e1[k] = E1(k + 1)
  std::vector<double> e2;  // e2[k] = E2(k + 1)
  int m_max = 0;
  int lag = 1;
  std::optional<int> selected_m;
  bool plateau_found = false;
  bool deterministic = false;

  double e1_at(int m) const { return e1.at(static_cast<std::size_t>(m - 1)); }
  double e2_at(int m) const { return e2.at(static_cast<std::size_t>(m - 1)); }
};

struct CaoOptions {
  double plateau_tol = 0.05;
  double determinism_threshold = 0.1;  // |E2 - 1| above this marks determinism
};

namespace detail {

inline void check_cao_args(std::span<const double> x, int m, int t) {
  if (m < 1) throw Error(ErrorKind::Configuration, "Cao dimension must be >= 1");
  if (t < 1) throw Error(ErrorKind::Configuration, "Cao lag must be >= 1");
  const auto shift = static_cast<std::size_t>(m) * static_cast<std::size_t>(t);
  if (x.size() < shift + 2)
    throw Error(ErrorKind::Dimension, "Cao at m=" + std::to_string(m) + ", t=" + std::to_string(t) +
                                          " needs at least " + std::to_string(shift + 2) + " samples");
}

}  // namespace detail

/// n(i, m) for i < N - m t.
inline std::vector<std::size_t> cao_neighbors(std::span<const double> x, int m, int t) {
  detail::check_cao_args(x, m, t);
  const std::size_t count = x.size() - static_cast<std::size_t>(m) * static_cast<std::size_t>(t);
  const auto vectors = delay_embed(x, EmbeddingParams{m, t, 0});
  const KdTree tree(vectors.data(), vectors.dimension(), count);

  std::vector<std::size_t> nn(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto hit = tree.nearest<MaxNorm>(vectors.point(i), [i](std::size_t j, double d) {
      return j != i && d > 0.0;
    });
    if (!hit.found())
      throw Error(ErrorKind::DegenerateInput,
                  "no point at positive distance from point " + std::to_string(i) + " in dimension " +
                      std::to_string(m) + " (constant or fully duplicated series)");
    nn[i] = hit.index;
  }
  return nn;
}

/// E(m) and E*(m) from a given neighbor assignment.
inline CaoTerms cao_terms_from_neighbors(std::span<const double> x, int m, int t,
                                         std::span<const std::size_t> nn) {
  const std::size_t mt = static_cast<std::size_t>(m) * static_cast<std::size_t>(t);
  const std::size_t lag = static_cast<std::size_t>(t);
  double sum_a = 0.0, sum_star = 0.0;
  for (std::size_t i = 0; i < nn.size(); ++i) {
    const std::size_t j = nn[i];
    double dm = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(m); ++k)
      dm = MaxNorm::combine(dm, MaxNorm::term(x[i + k * lag] - x[j + k * lag]));
    const double ahead = std::fabs(x[i + mt] - x[j + mt]);
    const double dm1 = MaxNorm::combine(dm, ahead);
    sum_a += dm1 / dm;
    sum_star += ahead;
  }
  const auto n = static_cast<double>(nn.size());
  return {sum_a / n, sum_star / n, nn.size()};
}

inline CaoTerms cao_terms(std::span<const double> x, int m, int t) {
  const auto nn = cao_neighbors(x, m, t);
  return cao_terms_from_neighbors(x, m, t, nn);
}

inline double cao_e(std::span<const double> x, int m, int t) { return cao_terms(x, m, t).e; }
inline double cao_e_star(std::span<const double> x, int m, int t) { return cao_terms(x, m, t).e_star; }

inline double cao_e1(std::span<const double> x, int m, int t) {
  return cao_e(x, m + 1, t) / cao_e(x, m, t);
}

inline double cao_e2(std::span<const double> x, int m, int t) {
  const double lower = cao_e_star(x, m, t);
  if (!(lower > 0.0))
    throw Error(ErrorKind::DegenerateInput, "E*(" + std::to_string(m) + ") is zero");
  return cao_e_star(x, m + 1, t) / lower;
}

inline double cao_e(const TimeSeries& s, int m, int t) { return cao_e(s.samples(), m, t); }
inline double cao_e1(const TimeSeries& s, int m, int t) { return cao_e1(s.samples(), m, t); }
inline double cao_e2(const TimeSeries& s, int m, int t) { return cao_e2(s.samples(), m, t); }

/// Smallest m (1-based) from which E1 no longer changes: |E1(m+1) - E1(m)| < tol
/// and E1(m) within tol of the mean of E1 over the rest of the profile.
inline std::optional<int> e1_plateau_start(std::span<const double> e1, double tol) {
  for (std::size_t k = 0; k + 1 < e1.size(); ++k) {
    if (!(std::fabs(e1[k + 1] - e1[k]) < tol)) continue;
    double tail = 0.0;
    for (std::size_t q = k + 1; q < e1.size(); ++q) tail += e1[q];
    tail /= static_cast<double>(e1.size() - k - 1);
    if (std::fabs(e1[k] - tail) < tol) return static_cast<int>(k + 1);
  }
  return std::nullopt;
}

inline CaoProfile minimum_embedding_dimension(std::span<const double> x, int lag, int m_max,
                                              const CaoOptions& opts = {}) {
  if (m_max < 3) throw Error(ErrorKind::Configuration, "m_max must be >= 3");
  if (lag < 1) throw Error(ErrorKind::Configuration, "lag must be >= 1");
  detail::check_cao_args(x, m_max, lag);

  std::vector<CaoTerms> terms;
  for (int m = 1; m <= m_max; ++m) terms.push_back(cao_terms(x, m, lag));

  CaoProfile profile;
  profile.m_max = m_max;
  profile.lag = lag;
  for (int m = 1; m < m_max; ++m) {
    const auto& lo = terms[static_cast<std::size_t>(m - 1)];
    const auto& hi = terms[static_cast<std::size_t>(m)];
    if (!(lo.e_star > 0.0))
      throw Error(ErrorKind::DegenerateInput, "E*(" + std::to_string(m) + ") is zero");
    profile.e1.push_back(hi.e / lo.e);
    profile.e2.push_back(hi.e_star / lo.e_star);
  }

  bool e2_departs = false;
  for (double v : profile.e2)
    if (std::fabs(v - 1.0) > opts.determinism_threshold) e2_departs = true;

  // E1 has stopped changing for every m beyond m_0, so the first plateau
  // dimension is m_0 + 1.
  const auto plateau = e1_plateau_start(profile.e1, opts.plateau_tol);
  profile.plateau_found = plateau.has_value();
  profile.deterministic = profile.plateau_found && e2_departs;
  // A flat E1 from a stochastic series is a finite-sample artifact.
  if (profile.deterministic) profile.selected_m = *plateau;
  return profile;
}

inline CaoProfile minimum_embedding_dimension(const TimeSeries& s, int lag, int m_max,
                                              const CaoOptions& opts = {}) {
  return minimum_embedding_dimension(s.samples(), lag, m_max, opts);
}

}  // namespace chaosidx

#endif  // CHAOSIDX_CAO_HPP
