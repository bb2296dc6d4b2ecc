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

#ifndef CHAOSIDX_TOOLS_APP_HPP
#define CHAOSIDX_TOOLS_APP_HPP

// Command-line front end: analyze, estimate, synth, report.
// Exit codes: 0 success, 2 usage, 3 input (including estimator failures on
// the given series), 4 internal.

#include <chaosidx/cao.hpp>
#include <chaosidx/correlation.hpp>
#include <chaosidx/error.hpp>
#include <chaosidx/information.hpp>
#include <chaosidx/io.hpp>
#include <chaosidx/pipeline.hpp>
#include <chaosidx/series.hpp>
#include <chaosidx/stats.hpp>
#include <chaosidx/synth.hpp>
#include <chaosidx/wolf.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace chaosidx::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kInternal = 4 };

namespace fs = std::filesystem;

inline void add_estimator_flags(CLI::App& cmd, EstimatorConfig& cfg) {
  cmd.add_option("--bins", cfg.bins, "Histogram bins for mutual information")->check(CLI::Range(2, 4096));
  cmd.add_option("--max-lag", cfg.max_lag, "Largest lag scanned for the auto-MI minimum")->check(CLI::Range(2, 100000));
  cmd.add_option("--lag-noise-factor", cfg.lag_noise_factor,
                 "Auto-MI minimum below this multiple of the independence bias falls back to lag 1 (0 disables)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--theiler-max-lag", cfg.theiler_max_lag, "Largest lag scanned for the autocorrelation zero")
      ->check(CLI::Range(1, 100000));
  cmd.add_option("--m-max", cfg.m_max, "Largest embedding dimension tried by Cao's method")->check(CLI::Range(3, 64));
  cmd.add_option("--plateau-tol", cfg.plateau_tol, "E1 plateau tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--determinism-threshold", cfg.determinism_threshold, "|E2 - 1| marking determinism")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--fallback-dim", cfg.fallback_dimension, "Embedding dimension when Cao selects none")
      ->check(CLI::Range(1, 64));
  cmd.add_option("--evolve-steps", cfg.evolve_steps, "Wolf evolution length in samples")->check(CLI::Range(1, 100000));
  cmd.add_option("--min-sep-frac", cfg.min_separation_fraction, "Wolf minimum separation / attractor extent")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--max-sep-frac", cfg.max_separation_fraction, "Wolf maximum separation / attractor extent")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--max-angle", cfg.max_replacement_angle, "Wolf replacement cone half-angle (rad)")
      ->check(CLI::Range(1e-9, 3.14159265));
  cmd.add_option("--n-radii", cfg.n_radii, "Radii on the correlation curve")->check(CLI::Range(8, 10000));
  cmd.add_option("--low-percentile", cfg.low_percentile, "Pair-distance quantile for the smallest radius")
      ->check(CLI::Range(1e-9, 0.5));
}

inline json config_json(const EstimatorConfig& cfg) {
  json j;
  j["bins"] = cfg.bins;
  j["max_lag"] = cfg.max_lag;
  j["lag_noise_factor"] = cfg.lag_noise_factor;
  j["theiler_max_lag"] = cfg.theiler_max_lag;
  j["m_max"] = cfg.m_max;
  j["plateau_tol"] = cfg.plateau_tol;
  j["determinism_threshold"] = cfg.determinism_threshold;
  j["fallback_dimension"] = cfg.fallback_dimension;
  j["evolve_steps"] = cfg.evolve_steps;
  j["min_separation_fraction"] = cfg.min_separation_fraction;
  j["max_separation_fraction"] = cfg.max_separation_fraction;
  j["max_replacement_angle"] = cfg.max_replacement_angle;
  j["n_radii"] = cfg.n_radii;
  j["low_percentile"] = cfg.low_percentile;
  j["mode"] = to_string(cfg.mode);
  return j;
}

/// Every report file derived from a set of epoch records, keyed by path
/// relative to the output directory.
inline std::map<std::string, std::string> build_reports(const std::vector<EpochIndices>& records,
                                                        const std::string& fingerprint, std::size_t hist_bins) {
  std::map<std::string, std::string> files;
  const auto obs = to_observations(records);
  files["table1.csv"] = table1_csv(obs, fingerprint);
  files["pvalues.csv"] = pvalues_csv(compare_groups(obs, index_names()), fingerprint);
  for (const auto& index : index_names())
    for (auto stage : kScoredStages)
      for (auto group : kGroups) {
        const auto values = cell_values(obs, group, stage, index);
        if (values.empty()) continue;
        auto h = empirical_histogram(values, hist_bins);
        h.index_name = index;
        h.stage = stage;
        h.group = group;
        files["histograms/" + histogram_file_name(h)] = histogram_csv(h, values.size(), fingerprint);
      }
  return files;
}

inline void write_all(const fs::path& dir, const std::map<std::string, std::string>& files) {
  for (const auto& [name, content] : files) atomic_write(dir / name, content);
}

struct AnalyzeOptions {
  std::string manifest;
  std::string out_dir;
  unsigned jobs = 0;
  std::string mode = "per-epoch";
  std::size_t hist_bins = 10;
};

inline int cmd_analyze(const AnalyzeOptions& opt, EstimatorConfig cfg, std::ostream& out, std::ostream& err) {
  if (opt.mode == "per-epoch") cfg.mode = AnalysisMode::PerEpoch;
  else if (opt.mode == "per-stage-concat") cfg.mode = AnalysisMode::PerStageConcat;
  else {
    err << "error: unknown mode '" << opt.mode << "'\n";
    return kUsage;
  }

  // Parse every input before anything is written.
  const auto entries = read_manifest(opt.manifest);
  std::vector<Recording> recordings;
  for (const auto& e : entries) recordings.push_back(load_recording(e));
  for (const auto& rec : recordings) samples_per_epoch(rec.series.sample_rate_hz());

  const unsigned jobs = opt.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.jobs;
  BatchStats stats;
  const auto records = run_batch(recordings, cfg, jobs, &stats);
  if (stats.dropped_samples > 0)
    err << "note: dropped " << stats.dropped_samples << " trailing samples (partial epochs)\n";

  const std::string fingerprint = cfg.fingerprint();
  auto files = build_reports(records, fingerprint, opt.hist_bins);
  files["epochs.ndjson"] = to_ndjson(records);

  json manifest;
  manifest["tool"] = "chaosidx";
  manifest["config_fingerprint"] = fingerprint;
  manifest["config"] = config_json(cfg);
  manifest["histogram_bins"] = opt.hist_bins;
  manifest["prng"] = std::string(kPrngName);
  json inputs = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    inputs.push_back(json{{"subject_id", entries[i].subject_id},
                          {"group", to_string(entries[i].group)},
                          {"signal_path", entries[i].signal_path.string()},
                          {"hypnogram_path", entries[i].hypnogram_path.string()},
                          {"channel", entries[i].channel},
                          {"sample_rate_hz", recordings[i].series.sample_rate_hz()},
                          {"n_samples", recordings[i].series.size()}});
  }
  manifest["inputs"] = inputs;
  manifest["windows"] = stats.windows;
  manifest["analyzed"] = stats.analyzed;
  manifest["dropped_samples"] = stats.dropped_samples;
  manifest["failed_records"] =
      std::count_if(records.begin(), records.end(), [](const EpochIndices& r) { return r.failed(); });
  json cells = json::array();
  for (auto group : kGroups)
    for (auto stage : kScoredStages)
      if (std::any_of(records.begin(), records.end(),
                      [&](const EpochIndices& r) { return r.group == group && r.stage == stage; }))
        cells.push_back(std::string(to_string(group)) + "/" + to_string(stage));
  manifest["cells"] = cells;
  files["run_manifest.json"] = dump_json(manifest) + "\n";

  write_all(opt.out_dir, files);
  out << "wrote " << records.size() << " records, " << cells.size() << " stage cells to " << opt.out_dir << "\n";
  return kOk;
}

inline int cmd_report(const std::string& epochs_path, const std::string& out_dir, std::size_t hist_bins,
                      std::ostream& out, std::ostream& err) {
  const auto records = read_ndjson(epochs_path);
  if (records.empty()) throw Error(ErrorKind::Input, epochs_path + ": no records");
  const std::string fingerprint = records.front().config_fingerprint;
  for (const auto& r : records)
    if (r.config_fingerprint != fingerprint) {
      err << "warning: records carry more than one config fingerprint; using " << fingerprint << "\n";
      break;
    }
  write_all(out_dir, build_reports(records, fingerprint, hist_bins));
  out << "wrote reports for " << records.size() << " records to " << out_dir << "\n";
  return kOk;
}

struct EstimateOptions {
  std::string estimator;
  std::string input;
  std::string channel;
  std::optional<double> fs;
  std::optional<int> lag;
  std::optional<int> dim;
  std::optional<int> theiler;
  std::optional<double> min_sep;
  std::optional<double> max_sep;
  bool log2 = false;
};

inline int cmd_estimate(const EstimateOptions& opt, const EstimatorConfig& cfg, std::ostream& out) {
  static const std::vector<std::string> known{"lle", "mi", "med", "d2", "lag", "theiler"};
  if (std::find(known.begin(), known.end(), opt.estimator) == known.end()) {
    out << dump_json(json{{"error", {{"kind", "usage"}, {"message", "unknown estimator '" + opt.estimator + "'"}}}})
        << "\n";
    return kUsage;
  }
  const auto signal = read_signal_csv(opt.input, opt.channel, opt.fs);
  const auto& series = signal.series;
  const auto x = series.samples();

  json result;
  result["estimator"] = opt.estimator;
  json params;
  json diag;
  params["bins"] = cfg.bins;

  auto resolve_lag = [&] {
    if (opt.lag) return *opt.lag;
    const int max_lag = std::min<int>(cfg.max_lag, static_cast<int>(x.size()) - 3);
    const auto c = select_embedding_lag(x, max_lag, cfg.bins, cfg.lag_noise_factor);
    diag["lag_saturated"] = c.saturated;
    diag["lag_at_noise_floor"] = c.at_noise_floor;
    return c.lag;
  };
  auto resolve_theiler = [&] {
    if (opt.theiler) return *opt.theiler;
    const auto w = theiler_window(x, std::min<int>(cfg.theiler_max_lag, static_cast<int>(x.size()) - 1));
    diag["theiler_saturated"] = w.saturated;
    return w.lag;
  };
  auto resolve_dim = [&](int lag) {
    if (opt.dim) return *opt.dim;
    const auto p = minimum_embedding_dimension(x, lag, cfg.m_max, {cfg.plateau_tol, cfg.determinism_threshold});
    diag["cao_selected_m"] = p.selected_m ? json(*p.selected_m) : json(nullptr);
    return p.selected_m.value_or(cfg.fallback_dimension);
  };

  if (opt.estimator == "lag") {
    const int max_lag = std::min<int>(cfg.max_lag, static_cast<int>(x.size()) - 3);
    const auto c = select_lag_first_minimum(x, max_lag, cfg.bins);
    result["value"] = c.lag;
    result["units"] = "samples";
    diag["saturated"] = c.saturated;
    params["max_lag"] = max_lag;
  } else if (opt.estimator == "theiler") {
    const int max_lag = std::min<int>(cfg.theiler_max_lag, static_cast<int>(x.size()) - 1);
    const auto w = theiler_window(x, max_lag);
    result["value"] = w.lag;
    result["units"] = "samples";
    diag["saturated"] = w.saturated;
    params["max_lag"] = max_lag;
  } else if (opt.estimator == "mi") {
    const int lag = resolve_lag();
    result["value"] = auto_mutual_information(x, lag, cfg.bins);
    result["units"] = "bits";
    params["lag"] = lag;
  } else if (opt.estimator == "med") {
    const int lag = resolve_lag();
    const auto p = minimum_embedding_dimension(x, lag, cfg.m_max, {cfg.plateau_tol, cfg.determinism_threshold});
    result["value"] = p.selected_m ? json(*p.selected_m) : json(nullptr);
    result["units"] = "dimension";
    diag["deterministic"] = p.deterministic;
    diag["plateau_found"] = p.plateau_found;
    diag["e1"] = p.e1;
    diag["e2"] = p.e2;
    params["lag"] = lag;
    params["m_max"] = cfg.m_max;
    params["plateau_tol"] = cfg.plateau_tol;
  } else if (opt.estimator == "lle") {
    const int lag = resolve_lag();
    const int dim = resolve_dim(lag);
    const int w = resolve_theiler();
    const auto v = delay_embed(x, EmbeddingParams{dim, lag, w});
    const double extent = attractor_extent(v);
    WolfParams p;
    p.evolve_steps = cfg.evolve_steps;
    p.min_separation = opt.min_sep.value_or(cfg.min_separation_fraction * extent);
    p.max_separation = opt.max_sep.value_or(cfg.max_separation_fraction * extent);
    p.max_replacement_angle = cfg.max_replacement_angle;
    p.theiler = w;
    const auto r = largest_lyapunov_wolf(v, p);
    const double scale = opt.log2 ? 1.0 / std::numbers::ln2 : 1.0;
    result["value"] = r.exponent * series.sample_rate_hz() * scale;
    result["units"] = opt.log2 ? "bits/s" : "nats/s";
    result["value_per_sample"] = r.exponent * scale;
    diag["renormalizations"] = r.n_renormalizations;
    diag["replacements"] = r.n_replacements;
    diag["evolved_samples"] = r.total_evolved_samples;
    diag["low_confidence"] = r.low_confidence;
    params["lag"] = lag;
    params["dimension"] = dim;
    params["theiler"] = w;
    params["evolve_steps"] = p.evolve_steps;
    params["min_separation"] = p.min_separation;
    params["max_separation"] = p.max_separation;
    params["max_replacement_angle"] = p.max_replacement_angle;
  } else {  // d2
    const int lag = resolve_lag();
    const int dim = resolve_dim(lag);
    const int w = resolve_theiler();
    const auto v = delay_embed(x, EmbeddingParams{dim, lag, w});
    CurveOptions copts;
    copts.n_radii = cfg.n_radii;
    copts.low_percentile = cfg.low_percentile;
    const auto curve = correlation_curve(v, w, copts);
    const auto est = correlation_dimension(curve);
    result["value"] = est.d2;
    result["units"] = "dimension";
    diag["fit_r2"] = est.fit_r2;
    diag["r_low"] = est.r_low;
    diag["r_high"] = est.r_high;
    diag["radii_in_fit"] = est.n_radii_in_fit;
    diag["radii"] = curve.radii;
    diag["c_values"] = curve.c_values;
    params["lag"] = lag;
    params["dimension"] = dim;
    params["theiler"] = w;
    params["n_radii"] = cfg.n_radii;
    params["low_percentile"] = cfg.low_percentile;
  }
  params["sample_rate_hz"] = series.sample_rate_hz();
  params["n_samples"] = series.size();
  result["diagnostics"] = diag;
  result["parameters"] = params;
  out << dump_json(result) << "\n";
  return kOk;
}

inline int cmd_synth(const std::string& kind, GeneratorSpec spec, const std::string& out_path, std::ostream& out) {
  spec.kind = parse_generator_kind(kind);
  const auto samples = generate_samples(spec);
  std::ostringstream text;
  text << "# generator=" << to_string(spec.kind) << "\n";
  text << "# fs=" << format_number(spec.sample_rate_hz) << "\n";
  text << "# n=" << spec.n_samples << "\n";
  text << "# transient_skip=" << spec.transient_skip << "\n";
  text << "# seed=" << spec.seed << "\n";
  text << "# prng=" << kPrngName << "\n";
  for (double v : samples) text << format_number(v) << "\n";
  if (out_path.empty() || out_path == "-") out << text.str();
  else atomic_write(out_path, text.str());
  return kOk;
}

/// Entry point shared by main() and the tests. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaosidx: chaos indices for windowed time series and sleep-EEG batches", "chaosidx"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  EstimatorConfig cfg;

  AnalyzeOptions analyze_opt;
  auto* analyze = app.add_subcommand("analyze", "Run the epoch pipeline over a manifest and write reports");
  analyze->add_option("--manifest", analyze_opt.manifest, "Manifest JSON")->required();
  analyze->add_option("--out", analyze_opt.out_dir, "Output directory")->required();
  analyze->add_option("--jobs", analyze_opt.jobs, "Worker threads (0 = hardware concurrency)");
  analyze->add_option("--mode", analyze_opt.mode, "per-epoch | per-stage-concat");
  analyze->add_option("--hist-bins", analyze_opt.hist_bins, "Histogram bins")->check(CLI::Range(1, 10000));
  add_estimator_flags(*analyze, cfg);

  EstimateOptions est_opt;
  auto* estimate = app.add_subcommand("estimate", "Run one estimator on one series");
  estimate->add_option("estimator", est_opt.estimator, "lle | mi | med | d2 | lag | theiler")->required();
  estimate->add_option("--input", est_opt.input, "Signal CSV")->required();
  estimate->add_option("--channel", est_opt.channel, "Column name or index");
  estimate->add_option("--fs", est_opt.fs, "Sampling rate override (Hz)");
  estimate->add_option("--lag", est_opt.lag, "Embedding lag (default: auto-MI first minimum)");
  estimate->add_option("--dim", est_opt.dim, "Embedding dimension (default: Cao)");
  estimate->add_option("--theiler", est_opt.theiler, "Theiler window (default: autocorrelation zero)");
  estimate->add_option("--min-sep", est_opt.min_sep, "Wolf minimum separation (signal units)");
  estimate->add_option("--max-sep", est_opt.max_sep, "Wolf maximum separation (signal units)");
  estimate->add_flag("--log2", est_opt.log2, "Report the Lyapunov exponent in bits");
  add_estimator_flags(*estimate, cfg);

  std::string synth_kind, synth_out;
  GeneratorSpec spec;
  auto* synth = app.add_subcommand("synth", "Write a generated benchmark series as signal CSV");
  synth->add_option("kind", synth_kind, "logistic | henon | lorenz | sine | noise | ar1")->required();
  synth->add_option("--n", spec.n_samples, "Samples to emit");
  synth->add_option("--seed", spec.seed, "Seed for stochastic kinds");
  synth->add_option("--skip", spec.transient_skip, "Leading samples discarded");
  synth->add_option("--fs", spec.sample_rate_hz, "Sampling rate recorded in the header (Hz)");
  synth->add_option("--r", spec.r, "Logistic parameter");
  synth->add_option("--x0", spec.x0, "Initial x");
  synth->add_option("--y0", spec.y0, "Initial y");
  synth->add_option("--z0", spec.z0, "Initial z (Lorenz)");
  synth->add_option("--a", spec.a, "Henon a");
  synth->add_option("--b", spec.b, "Henon b");
  synth->add_option("--sigma", spec.sigma, "Lorenz sigma");
  synth->add_option("--rho", spec.rho, "Lorenz rho");
  synth->add_option("--beta", spec.beta, "Lorenz beta");
  synth->add_option("--dt", spec.dt, "Lorenz step");
  synth->add_option("--freq", spec.frequency_hz, "Sine frequency (Hz)");
  synth->add_option("--amp", spec.amplitude, "Amplitude (sine, noise, ar1 innovations)");
  synth->add_option("--phase", spec.phase, "Sine phase (rad)");
  synth->add_option("--noise", spec.noise_amplitude, "Additive uniform noise on the sine");
  synth->add_option("--phi", spec.phi, "AR(1) coefficient");
  synth->add_option("--out", synth_out, "Output file (default stdout)");

  std::string report_epochs, report_out;
  std::size_t report_bins = 10;
  auto* report = app.add_subcommand("report", "Re-derive tables and histograms from an epochs NDJSON");
  report->add_option("--epochs", report_epochs, "epochs.ndjson from analyze")->required();
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_option("--hist-bins", report_bins, "Histogram bins")->check(CLI::Range(1, 10000));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_opt, cfg, out, err);
    if (report->parsed()) return cmd_report(report_epochs, report_out, report_bins, out, err);
    if (synth->parsed()) return cmd_synth(synth_kind, spec, synth_out, out);
    if (estimate->parsed()) {
      try {
        return cmd_estimate(est_opt, cfg, out);
      } catch (const Error& e) {
        out << dump_json(json{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}}) << "\n";
        return kInput;
      }
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::Configuration && synth->parsed() ? kUsage : kInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace chaosidx::cli

#endif  // CHAOSIDX_TOOLS_APP_HPP
