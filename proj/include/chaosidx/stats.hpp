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

#ifndef CHAOSIDX_STATS_HPP
#define CHAOSIDX_STATS_HPP

// Group summaries, the Welch two-sample t statistic, Student-t tail
// probabilities and normalized histograms.

#include <chaosidx/error.hpp>
#include <chaosidx/stages.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaosidx {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator
  std::size_t n = 0;
};

/// Streaming (Welford) mean and sample standard deviation.
inline Summary summarize(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::Dimension, "summary needs at least 2 values");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::DegenerateInput, "non-finite value in summary");
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  return {mean, std::sqrt(std::max(0.0, m2) / static_cast<double>(n - 1)), n};
}

struct GroupSummary {
  Group group = Group::Healthy;
  SleepStage stage = SleepStage::Unknown;
  std::string index_name;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

struct TStatistic {
  double t = 0.0;
  double df = 0.0;        // Welch-Satterthwaite
  bool infinite = false;  // both spreads zero, means differ
};

/// T = (m1 - m2) / sqrt(S1^2/n1 + S2^2/n2).
inline TStatistic welch_t(double m1, double s1, std::size_t n1, double m2, double s2, std::size_t n2) {
  if (n1 < 2 || n2 < 2) throw Error(ErrorKind::Dimension, "Welch t needs n >= 2 in both groups");
  const double v1 = s1 * s1 / static_cast<double>(n1);
  const double v2 = s2 * s2 / static_cast<double>(n2);
  const double se2 = v1 + v2;
  TStatistic out;
  if (!(se2 > 0.0)) {
    out.df = static_cast<double>(n1 + n2 - 2);
    if (m1 == m2) return out;
    out.infinite = true;
    out.t = m1 > m2 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return out;
  }
  out.t = (m1 - m2) / std::sqrt(se2);
  out.df = se2 * se2 /
           (v1 * v1 / static_cast<double>(n1 - 1) + v2 * v2 / static_cast<double>(n2 - 1));
  return out;
}

inline TStatistic welch_t(const GroupSummary& a, const GroupSummary& b) {
  return welch_t(a.mean, a.std, a.n, b.mean, b.std, b.n);
}

namespace detail {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw Error(ErrorKind::EstimationFailure, "incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b). `xc` is 1 - x, passed separately so
/// callers can keep precision when x is close to 1.
inline double incomplete_beta(double a, double b, double x, double xc) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::Configuration, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (xc <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(xc);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, xc) / b;
}

inline double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

/// P(T > t) for Student's t with df degrees of freedom.
inline double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorKind::Configuration, "degrees of freedom must be > 0");
  if (std::isnan(t)) throw Error(ErrorKind::Configuration, "t is NaN");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double both = incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
  return t > 0 ? 0.5 * both : 1.0 - 0.5 * both;
}

inline double student_t_cdf(double t, double df) { return student_t_upper_tail(-t, df); }

enum class Tail { Upper, TwoSided };

/// p = 1 - CDF(T) by default; TwoSided gives P(|T| > |t|).
inline double p_value(double t, double df, Tail tail = Tail::Upper) {
  if (tail == Tail::TwoSided) return std::min(1.0, 2.0 * student_t_upper_tail(std::fabs(t), df));
  return student_t_upper_tail(t, df);
}

inline double p_value(const TStatistic& stat, Tail tail = Tail::Upper) {
  if (stat.infinite) {
    if (tail == Tail::TwoSided) return 0.0;
    return stat.t > 0 ? 0.0 : 1.0;
  }
  return p_value(stat.t, stat.df, tail);
}

/// Tables show p no finer than this.
inline constexpr double kReportedPFloor = 0.0005;

inline double reported_p(double p) { return std::max(p, kReportedPFloor); }

struct Histogram {
  std::string index_name;
  Group group = Group::Healthy;
  SleepStage stage = SleepStage::Unknown;
  std::vector<double> bin_edges;
  std::vector<double> relative_frequencies;
};

/// Equal-width bins over [min, max], top edge inclusive, normalized to sum 1.
inline Histogram empirical_histogram(std::span<const double> values, std::size_t n_bins) {
  if (values.empty()) throw Error(ErrorKind::Dimension, "histogram of an empty sequence");
  if (n_bins < 1) throw Error(ErrorKind::Configuration, "n_bins must be >= 1");
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn_it, hi = *mx_it;
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k)
    h.bin_edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_bins);
  h.bin_edges[n_bins] = hi;
  std::vector<double> counts(n_bins, 0.0);
  for (double v : values) {
    std::size_t k = 0;
    if (hi > lo) {
      const double pos = (v - lo) / (hi - lo) * static_cast<double>(n_bins);
      k = std::min(n_bins - 1, static_cast<std::size_t>(pos));
    }
    counts[k] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(values.size());
  h.relative_frequencies = std::move(counts);
  return h;
}

/// One index value of one epoch, tagged with its cell.
struct Observation {
  Group group = Group::Healthy;
  SleepStage stage = SleepStage::Unknown;
  std::string index_name;
  double value = 0.0;
};

struct ComparisonResult {
  SleepStage stage = SleepStage::Unknown;
  std::string index_name;
  GroupSummary apnea;
  GroupSummary healthy;
  TStatistic stat;
  double p_value = 1.0;
};

inline std::vector<double> cell_values(std::span<const Observation> obs, Group g, SleepStage s,
                                       const std::string& index) {
  std::vector<double> out;
  for (const auto& o : obs)
    if (o.group == g && o.stage == s && o.index_name == index) out.push_back(o.value);
  return out;
}

inline std::optional<GroupSummary> summarize_cell(std::span<const Observation> obs, Group g, SleepStage s,
                                                  const std::string& index) {
  const auto values = cell_values(obs, g, s, index);
  if (values.size() < 2) return std::nullopt;
  const auto sm = summarize(values);
  return GroupSummary{g, s, index, sm.mean, sm.std, sm.n};
}

/// Welch comparison for every scored stage and index; T = (apnea - healthy)
/// so that p = 1 - CDF(T) is small when the apnea group sits higher. Cells
/// with fewer than 2 values in either group are left out.
inline std::vector<ComparisonResult> compare_groups(std::span<const Observation> obs,
                                                    std::span<const std::string> index_names,
                                                    Tail tail = Tail::Upper) {
  std::vector<ComparisonResult> out;
  for (auto stage : kScoredStages) {
    for (const auto& index : index_names) {
      const auto apnea = summarize_cell(obs, Group::Apnea, stage, index);
      const auto healthy = summarize_cell(obs, Group::Healthy, stage, index);
      if (!apnea || !healthy) continue;
      ComparisonResult r;
      r.stage = stage;
      r.index_name = index;
      r.apnea = *apnea;
      r.healthy = *healthy;
      r.stat = welch_t(*apnea, *healthy);
      r.p_value = p_value(r.stat, tail);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace chaosidx

#endif  // CHAOSIDX_STATS_HPP
