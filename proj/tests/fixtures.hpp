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

#ifndef CHAOSIDX_TESTS_FIXTURES_HPP
#define CHAOSIDX_TESTS_FIXTURES_HPP

// Synthetic "subjects": healthy recordings are a sine with weak noise at
// 100 Hz, apnea recordings are a logistic-map orbit at 128 Hz.

#include <chaosidx/io.hpp>
#include <chaosidx/pipeline.hpp>
#include <chaosidx/synth.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace fixture {

using namespace chaosidx;

inline const std::vector<char> kAllStagesTwice{'W', 'W', 'R', 'R', '1', '1', '2', '2', '3', '3', '4', '4', '?'};

inline double rate_of(Group g) { return g == Group::Healthy ? 100.0 : 128.0; }

/// Samples for `epochs` full windows plus `extra` trailing samples.
inline std::vector<double> signal(Group g, std::size_t epochs, std::size_t extra, int subject) {
  const double fs = rate_of(g);
  GeneratorSpec spec;
  spec.n_samples = epochs * static_cast<std::size_t>(30.0 * fs) + extra;
  spec.sample_rate_hz = fs;
  spec.seed = 100 + static_cast<std::uint64_t>(subject);
  spec.transient_skip = 1000;
  if (g == Group::Healthy) {
    spec.kind = GeneratorKind::Sine;
    spec.frequency_hz = 2.345 + 0.05 * subject;
    spec.phase = 0.3 * subject;
    spec.noise_amplitude = 0.01;
  } else {
    spec.kind = GeneratorKind::Logistic;
    spec.x0 = 0.1 + 0.07 * subject;
  }
  return generate_samples(spec);
}

inline Recording recording(const std::string& id, Group g, const std::vector<char>& tokens, int subject,
                           std::size_t extra = 0) {
  std::vector<SleepStage> stages;
  for (char c : tokens) stages.push_back(stage_from_token(std::string(1, c)));
  return Recording{id, g, TimeSeries(signal(g, tokens.size(), extra, subject), rate_of(g)), stages};
}

inline std::string signal_csv(const std::vector<double>& x, double fs) {
  std::ostringstream s;
  s << "# fs=" << format_number(fs) << "\n# channel=C3\n";
  for (double v : x) s << format_number(v) << "\n";
  return s.str();
}

inline std::string hypnogram_csv(const std::vector<char>& tokens) {
  std::ostringstream s;
  s << "epoch_index,stage\n";
  for (std::size_t k = 0; k < tokens.size(); ++k) s << k << "," << tokens[k] << "\n";
  return s.str();
}

/// Writes n_per_group subjects per group plus manifest.json into dir;
/// returns the manifest path.
inline std::filesystem::path write_dataset(const std::filesystem::path& dir, int n_per_group,
                                           const std::vector<char>& tokens = kAllStagesTwice) {
  std::filesystem::create_directories(dir);
  json manifest = json::array();
  int subject = 0;
  for (auto g : kGroups)
    for (int k = 0; k < n_per_group; ++k, ++subject) {
      const std::string id = std::string(to_string(g)) + "-" + std::to_string(k + 1);
      // a partial trailing epoch is always present and must be dropped
      atomic_write(dir / (id + ".csv"), signal_csv(signal(g, tokens.size(), 517, subject), rate_of(g)));
      atomic_write(dir / (id + "_hyp.csv"), hypnogram_csv(tokens));
      manifest.push_back(json{{"subject_id", id},
                              {"group", to_string(g)},
                              {"signal_path", id + ".csv"},
                              {"hypnogram_path", id + "_hyp.csv"},
                              {"channel", "C3"}});
    }
  atomic_write(dir / "manifest.json", dump_json(manifest) + "\n");
  return dir / "manifest.json";
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("chaosidx-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace fixture

#endif  // CHAOSIDX_TESTS_FIXTURES_HPP
