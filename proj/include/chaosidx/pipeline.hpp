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

#ifndef CHAOSIDX_PIPELINE_HPP
#define CHAOSIDX_PIPELINE_HPP

// 30-second epoching of staged recordings, per-stage concatenation and the
// per-window chaos-index computation:
//   lag   first minimum of the auto mutual information (1 if that minimum
//         sits in the independence noise floor)
//   W     first zero of the autocorrelation
//   med   Cao minimum embedding dimension at that lag
//   lle   Wolf exponent on the (med, lag) embedding, in nats/s
//   d2    correlation dimension on the same embedding
//   mi    auto mutual information at the selected lag
// An estimator failure is recorded on the epoch and never aborts the batch.

#include <chaosidx/cao.hpp>
#include <chaosidx/correlation.hpp>
#include <chaosidx/error.hpp>
#include <chaosidx/information.hpp>
#include <chaosidx/series.hpp>
#include <chaosidx/stages.hpp>
#include <chaosidx/stats.hpp>
#include <chaosidx/wolf.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace chaosidx {

inline constexpr double kEpochSeconds = 30.0;

struct Recording {
  std::string subject_id;
  Group group = Group::Healthy;
  TimeSeries series;
  std::vector<SleepStage> hypnogram;  // one label per epoch
};

struct Epoch {
  int epoch_index = 0;
  SleepStage stage = SleepStage::Unknown;
  TimeSeries window;
};

struct EpochSplit {
  std::vector<Epoch> epochs;
  std::size_t dropped_samples = 0;  // trailing partial epoch
};

inline std::size_t samples_per_epoch(double sample_rate_hz) {
  const double exact = kEpochSeconds * sample_rate_hz;
  const double rounded = std::round(exact);
  if (!(rounded >= 1.0) || std::fabs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    std::ostringstream msg;
    msg << "30 s at " << sample_rate_hz << " Hz is not a whole number of samples";
    throw Error(ErrorKind::Configuration, msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

/// Window k carries hypnogram[k]; epochs past the end of the hypnogram are Unknown.
inline EpochSplit epoch_split(const Recording& rec) {
  const std::size_t width = samples_per_epoch(rec.series.sample_rate_hz());
  const std::size_t count = rec.series.size() / width;
  EpochSplit out;
  out.dropped_samples = rec.series.size() - count * width;
  out.epochs.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const SleepStage stage = k < rec.hypnogram.size() ? rec.hypnogram[k] : SleepStage::Unknown;
    out.epochs.push_back(Epoch{static_cast<int>(k), stage, rec.series.slice(k * width, width)});
  }
  return out;
}

using StageKey = std::pair<Group, SleepStage>;

/// Scored-stage windows joined per (group, stage), subject order then epoch
/// order. Cells without epochs are absent. A cell takes the rate of its first
/// contributing recording.
inline std::map<StageKey, TimeSeries> concatenate_by_stage(const std::vector<Recording>& recordings) {
  std::map<StageKey, std::vector<double>> joined;
  std::map<StageKey, double> rates;
  for (const auto& rec : recordings) {
    for (const auto& ep : epoch_split(rec).epochs) {
      if (ep.stage == SleepStage::Unknown) continue;
      const StageKey key{rec.group, ep.stage};
      auto& buf = joined[key];
      buf.insert(buf.end(), ep.window.samples().begin(), ep.window.samples().end());
      rates.emplace(key, rec.series.sample_rate_hz());
    }
  }
  std::map<StageKey, TimeSeries> out;
  for (auto& [key, buf] : joined) out.emplace(key, TimeSeries(std::move(buf), rates.at(key)));
  return out;
}

enum class AnalysisMode { PerEpoch, PerStageConcat };

inline const char* to_string(AnalysisMode m) {
  return m == AnalysisMode::PerEpoch ? "per-epoch" : "per-stage-concat";
}

struct EstimatorConfig {
  std::size_t bins = 16;
  int max_lag = 50;            // auto-MI scan for the embedding lag
  double lag_noise_factor = 2.0;  // MI minimum below this x independence bias -> lag 1
  int theiler_max_lag = 100;   // autocorrelation scan for W
  int m_max = 10;
  double plateau_tol = 0.05;
  double determinism_threshold = 0.1;
  int fallback_dimension = 3;  // embedding used when Cao selects nothing
  int evolve_steps = 3;
  double min_separation_fraction = 1e-3;
  double max_separation_fraction = 1e-1;
  double max_replacement_angle = 0.5;
  std::size_t n_radii = 24;
  double low_percentile = 0.001;
  AnalysisMode mode = AnalysisMode::PerEpoch;

  /// Stable text form of every parameter; the fingerprint hashes this.
  std::string canonical() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "bins=%zu;max_lag=%d;lag_noise_factor=%.17g;theiler_max_lag=%d;m_max=%d;plateau_tol=%.17g;"
                  "determinism_threshold=%.17g;fallback_dimension=%d;evolve_steps=%d;"
                  "min_separation_fraction=%.17g;max_separation_fraction=%.17g;"
                  "max_replacement_angle=%.17g;n_radii=%zu;low_percentile=%.17g;mode=%s",
                  bins, max_lag, lag_noise_factor, theiler_max_lag, m_max, plateau_tol, determinism_threshold,
                  fallback_dimension, evolve_steps, min_separation_fraction, max_separation_fraction,
                  max_replacement_angle, n_radii, low_percentile, to_string(mode));
    return buf;
  }

  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

struct EstimatorFailure {
  std::string index;  // lag, theiler, med, lle, d2, mi
  std::string reason;
};

struct EpochIndices {
  std::string subject_id;
  Group group = Group::Healthy;
  SleepStage stage = SleepStage::Unknown;
  int epoch_index = 0;
  double sample_rate_hz = 0.0;
  std::size_t n_samples = 0;

  std::optional<int> lag;
  bool lag_saturated = false;
  bool lag_at_noise_floor = false;
  std::optional<int> theiler;
  bool theiler_saturated = false;

  std::optional<int> med;
  std::optional<double> e1_at_selected;
  bool deterministic = false;
  std::optional<int> embedding_dimension;  // dimension actually used downstream

  std::optional<double> lle;            // nats/s
  std::optional<double> lle_per_sample; // nats/sample
  int lle_renormalizations = 0;
  bool lle_low_confidence = false;

  std::optional<double> mi;  // bits
  std::optional<double> d2;
  std::optional<double> d2_fit_r2;

  std::vector<EstimatorFailure> failures;
  std::string config_fingerprint;

  bool failed() const noexcept { return !failures.empty(); }
};

inline constexpr const char* kLleUnits = "nats/s";

/// The four reported index names, in report order.
inline const std::vector<std::string>& index_names() {
  static const std::vector<std::string> names{"lle", "mi", "med", "d2"};
  return names;
}

namespace detail {

template <class F>
bool attempt(EpochIndices& out, const char* index, F&& body) {
  try {
    body();
    return true;
  } catch (const Error& e) {
    out.failures.push_back({index, std::string(to_string(e.kind())) + ": " + e.what()});
  } catch (const std::exception& e) {
    out.failures.push_back({index, std::string("internal: ") + e.what()});
  }
  return false;
}

inline void fail_rest(EpochIndices& out, std::initializer_list<const char*> indices, const std::string& why) {
  for (const char* idx : indices) out.failures.push_back({idx, why});
}

}  // namespace detail

inline EpochIndices compute_epoch_indices(const TimeSeries& window, const EstimatorConfig& cfg) {
  EpochIndices out;
  out.sample_rate_hz = window.sample_rate_hz();
  out.n_samples = window.size();
  out.config_fingerprint = cfg.fingerprint();
  const auto x = window.samples();

  double lo = 0.0, hi = 0.0;
  if (!x.empty()) {
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    lo = *mn;
    hi = *mx;
  }
  if (x.size() < 2 || !(hi > lo)) {
    detail::fail_rest(out, {"lag", "theiler", "med", "lle", "d2", "mi"},
                      "degenerate-input: zero-variance series");
    return out;
  }

  const bool have_lag = detail::attempt(out, "lag", [&] {
    const int max_lag = std::min<int>(cfg.max_lag, static_cast<int>(x.size()) - 3);
    const auto choice = select_embedding_lag(x, max_lag, cfg.bins, cfg.lag_noise_factor);
    out.lag = choice.lag;
    out.lag_saturated = choice.saturated;
    out.lag_at_noise_floor = choice.at_noise_floor;
  });
  detail::attempt(out, "theiler", [&] {
    const int max_lag = std::min<int>(cfg.theiler_max_lag, static_cast<int>(x.size()) - 1);
    const auto w = theiler_window(x, max_lag);
    out.theiler = w.lag;
    out.theiler_saturated = w.saturated;
  });
  if (!have_lag) {
    detail::fail_rest(out, {"med", "lle", "d2", "mi"}, "skipped: no embedding lag");
    return out;
  }
  const int lag = *out.lag;
  const int w = out.theiler.value_or(0);

  detail::attempt(out, "mi", [&] { out.mi = auto_mutual_information(x, lag, cfg.bins); });

  detail::attempt(out, "med", [&] {
    const auto profile =
        minimum_embedding_dimension(x, lag, cfg.m_max, CaoOptions{cfg.plateau_tol, cfg.determinism_threshold});
    out.deterministic = profile.deterministic;
    if (!profile.selected_m)
      throw Error(ErrorKind::EstimationFailure,
                  profile.plateau_found ? "E1 plateau but E2 ~ 1 (stochastic)" : "E1 never plateaus");
    out.med = profile.selected_m;
    out.e1_at_selected = profile.e1_at(std::min(*profile.selected_m, profile.m_max - 1));
  });
  const int m = out.med.value_or(cfg.fallback_dimension);

  std::optional<DelayVectors> vectors;
  detail::attempt(out, "embed", [&] {
    vectors = delay_embed(x, EmbeddingParams{m, lag, w});
    out.embedding_dimension = m;
  });
  if (!vectors) {
    detail::fail_rest(out, {"lle", "d2"}, "skipped: embedding failed");
    return out;
  }

  detail::attempt(out, "lle", [&] {
    WolfParams p;
    const double extent = attractor_extent(*vectors);
    p.min_separation = cfg.min_separation_fraction * extent;
    p.max_separation = cfg.max_separation_fraction * extent;
    p.evolve_steps = cfg.evolve_steps;
    p.max_replacement_angle = cfg.max_replacement_angle;
    p.theiler = w;
    const auto r = largest_lyapunov_wolf(*vectors, p);
    out.lle_per_sample = r.exponent;
    out.lle = r.exponent * window.sample_rate_hz();
    out.lle_renormalizations = r.n_renormalizations;
    out.lle_low_confidence = r.low_confidence;
  });

  detail::attempt(out, "d2", [&] {
    CurveOptions opts;
    opts.n_radii = cfg.n_radii;
    opts.low_percentile = cfg.low_percentile;
    opts.threads = 1;  // epochs are already spread over workers
    const auto est = correlation_dimension(correlation_curve(*vectors, w, opts));
    out.d2 = est.d2;
    out.d2_fit_r2 = est.fit_r2;
  });
  return out;
}

/// Runs tasks[i]() for every i on `jobs` workers; results land at index i.
template <class Result, class Task>
std::vector<Result> run_indexed(std::size_t count, unsigned jobs, Task&& task) {
  std::vector<Result> results(count);
  jobs = std::max(1u, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        results[i] = task(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, count); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

struct BatchStats {
  std::size_t windows = 0;          // all 30 s windows
  std::size_t analyzed = 0;         // windows with a scored stage
  std::size_t dropped_samples = 0;  // trailing partial epochs
};

/// Per-epoch or per-cell indices ordered by (subject order, epoch index), or
/// by (group, stage) in concatenation mode. Completion order never matters.
inline std::vector<EpochIndices> run_batch(const std::vector<Recording>& recordings,
                                           const EstimatorConfig& cfg, unsigned jobs,
                                           BatchStats* stats = nullptr) {
  struct Job {
    std::string subject_id;
    Group group;
    SleepStage stage;
    int epoch_index;
    TimeSeries window;
  };
  std::vector<Job> work;
  BatchStats local;
  for (const auto& rec : recordings) {
    auto split = epoch_split(rec);
    local.windows += split.epochs.size();
    local.dropped_samples += split.dropped_samples;
    if (cfg.mode != AnalysisMode::PerEpoch) continue;
    for (auto& ep : split.epochs) {
      if (ep.stage == SleepStage::Unknown) continue;
      work.push_back({rec.subject_id, rec.group, ep.stage, ep.epoch_index, std::move(ep.window)});
    }
  }
  if (cfg.mode == AnalysisMode::PerStageConcat) {
    for (auto& [key, series] : concatenate_by_stage(recordings))
      work.push_back({std::string("concat-") + to_string(key.first), key.first, key.second, 0, series});
  }
  local.analyzed = work.size();
  if (stats) *stats = local;

  return run_indexed<EpochIndices>(work.size(), jobs, [&](std::size_t i) {
    const auto& job = work[i];
    auto rec = compute_epoch_indices(job.window, cfg);
    rec.subject_id = job.subject_id;
    rec.group = job.group;
    rec.stage = job.stage;
    rec.epoch_index = job.epoch_index;
    return rec;
  });
}

/// Present index values as tagged observations for the group statistics.
inline std::vector<Observation> to_observations(const std::vector<EpochIndices>& records) {
  std::vector<Observation> out;
  for (const auto& r : records) {
    if (r.lle) out.push_back({r.group, r.stage, "lle", *r.lle});
    if (r.mi) out.push_back({r.group, r.stage, "mi", *r.mi});
    if (r.med) out.push_back({r.group, r.stage, "med", static_cast<double>(*r.med)});
    if (r.d2) out.push_back({r.group, r.stage, "d2", *r.d2});
  }
  return out;
}

}  // namespace chaosidx

#endif  // CHAOSIDX_PIPELINE_HPP
