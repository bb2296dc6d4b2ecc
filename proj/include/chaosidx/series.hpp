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

#ifndef CHAOSIDX_SERIES_HPP
#define CHAOSIDX_SERIES_HPP

#include <chaosidx/error.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chaosidx {

/// Scalar samples in signal units plus the rate they were taken at.
class TimeSeries {
public:
  TimeSeries() = default;

  TimeSeries(std::vector<double> samples, double sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
      throw Error(ErrorKind::Configuration, "sample rate must be a positive finite number");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i]))
        throw Error(ErrorKind::DegenerateInput,
                    "non-finite sample at index " + std::to_string(i));
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  /// Samples [first, first + count) as a new series at the same rate.
  TimeSeries slice(std::size_t first, std::size_t count) const {
    if (first + count > samples_.size())
      throw Error(ErrorKind::Dimension, "slice exceeds series length");
    return TimeSeries(std::vector<double>(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                                          samples_.begin() + static_cast<std::ptrdiff_t>(first + count)),
                      sample_rate_hz_);
  }

private:
  std::vector<double> samples_;
  double sample_rate_hz_ = 1.0;
};

struct EmbeddingParams {
  int dimension = 1;  // m
  int lag = 1;        // samples between coordinates
  int theiler = 0;    // minimum index gap for neighbor / pair admissibility

  /// Number of samples a series must have to yield at least one point.
  std::size_t span_samples() const noexcept {
    return static_cast<std::size_t>(dimension - 1) * static_cast<std::size_t>(lag) + 1;
  }
};

inline void validate(const EmbeddingParams& params) {
  if (params.dimension < 1) throw Error(ErrorKind::Configuration, "embedding dimension must be >= 1");
  if (params.lag < 1) throw Error(ErrorKind::Configuration, "embedding lag must be >= 1");
  if (params.theiler < 0) throw Error(ErrorKind::Configuration, "Theiler window must be >= 0");
}

/// Reconstructed phase-space points, stored row-major (one row per point).
class DelayVectors {
public:
  DelayVectors() = default;

  DelayVectors(std::vector<double> coords, std::size_t dimension, EmbeddingParams params)
      : coords_(std::move(coords)), dim_(dimension), params_(params) {
    if (dim_ == 0 || coords_.size() % dim_ != 0)
      throw Error(ErrorKind::Configuration, "coordinate buffer is not a whole number of points");
  }

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dimension() const noexcept { return dim_; }
  const EmbeddingParams& params() const noexcept { return params_; }

  std::span<const double> point(std::size_t k) const noexcept {
    return {coords_.data() + k * dim_, dim_};
  }
  double at(std::size_t k, std::size_t j) const noexcept { return coords_[k * dim_ + j]; }

  /// Index of the first source sample of point k.
  std::size_t origin_index(std::size_t k) const noexcept { return k; }

  std::span<const double> data() const noexcept { return coords_; }

  /// Same points with every coordinate mapped through a * x + b.
  DelayVectors affine(double a, double b) const {
    std::vector<double> out(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) out[i] = a * coords_[i] + b;
    return DelayVectors(std::move(out), dim_, params_);
  }

private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  EmbeddingParams params_;
};

/// Point k is (x[k], x[k + t], ..., x[k + (m - 1) t]).
inline DelayVectors delay_embed(std::span<const double> samples, const EmbeddingParams& params) {
  validate(params);
  const std::size_t need = params.span_samples();
  if (samples.size() < need) {
    throw Error(ErrorKind::Dimension,
                "series of length " + std::to_string(samples.size()) + " is too short for m=" +
                    std::to_string(params.dimension) + ", t=" + std::to_string(params.lag) +
                    "; at least " + std::to_string(need) + " samples required");
  }
  const std::size_t m = static_cast<std::size_t>(params.dimension);
  const std::size_t t = static_cast<std::size_t>(params.lag);
  const std::size_t count = samples.size() - (m - 1) * t;
  std::vector<double> coords(count * m);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t j = 0; j < m; ++j) coords[k * m + j] = samples[k + j * t];
  return DelayVectors(std::move(coords), m, params);
}

inline DelayVectors delay_embed(const TimeSeries& series, const EmbeddingParams& params) {
  return delay_embed(series.samples(), params);
}

/// Wraps already-multivariate points (e.g. a planar point cloud) as a point set.
inline DelayVectors points_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::Dimension, "empty point set");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorKind::Configuration, "ragged point set");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return DelayVectors(std::move(coords), dim,
                      EmbeddingParams{static_cast<int>(dim), 1, 0});
}

/// Biased (divide-by-N) autocorrelation normalized so that lag 0 is 1.
inline std::vector<double> autocorrelation(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::Dimension, "autocorrelation needs at least 2 samples");
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
    throw Error(ErrorKind::Configuration, "max_lag must lie in [0, N)");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;

  double c0 = 0.0;
  for (double v : centered) c0 += v * v;
  if (!(c0 > 0.0))
    throw Error(ErrorKind::DegenerateInput, "zero-variance series has no autocorrelation");

  std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1);
  acf[0] = 1.0;
  for (std::size_t lag = 1; lag < acf.size(); ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += centered[i] * centered[i + lag];
    acf[lag] = c / c0;
  }
  return acf;
}

inline std::vector<double> autocorrelation(const TimeSeries& series, int max_lag) {
  return autocorrelation(series.samples(), max_lag);
}

/// A lag chosen by a scan, with a flag set when the scan ran out of range.
struct LagChoice {
  int lag = 1;
  bool saturated = false;
};

/// First lag whose autocorrelation is <= 0; max_lag (saturated) if none.
inline LagChoice theiler_window(std::span<const double> x, int max_lag) {
  if (max_lag < 1) throw Error(ErrorKind::Configuration, "max_lag must be >= 1");
  const auto acf = autocorrelation(x, max_lag);
  for (int lag = 1; lag <= max_lag; ++lag)
    if (acf[static_cast<std::size_t>(lag)] <= 0.0) return {lag, false};
  return {max_lag, true};
}

inline LagChoice theiler_window(const TimeSeries& series, int max_lag) {
  return theiler_window(series.samples(), max_lag);
}

}  // namespace chaosidx

#endif  // CHAOSIDX_SERIES_HPP
