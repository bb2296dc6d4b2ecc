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

#ifndef CHAOSIDX_IO_HPP
#define CHAOSIDX_IO_HPP

// File formats.
//
//   signal      one sample per line (or comma-separated columns), optional
//               '#' header lines of key=value: fs=100, channel=C3 or
//               channels=C3,C4 naming the columns
//   hypnogram   epoch_index,stage_token per line; tokens W R 1 2 3 4 ?
//   manifest    JSON array of {subject_id, group, signal_path,
//               hypnogram_path, channel[, fs]}
//   epochs      NDJSON, one EpochIndices record per line
//
// Numbers are written with 17 significant digits.

#include <chaosidx/error.hpp>
#include <chaosidx/pipeline.hpp>
#include <chaosidx/series.hpp>
#include <chaosidx/stages.hpp>
#include <chaosidx/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace chaosidx {

using json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump17(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump17(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump17(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Compact JSON with 17-significant-digit numbers; non-finite numbers become null.
inline std::string dump_json(const json& j) {
  std::string out;
  detail::dump17(j, out);
  return out;
}

struct SignalFile {
  TimeSeries series;
  std::map<std::string, std::string> metadata;
  std::string channel;
};

/// Reads a signal CSV. `channel` selects a column by header name or 0-based
/// index; empty accepts single-column files only. `fs_override` wins over
/// the fs= header.
inline SignalFile read_signal_csv(const std::filesystem::path& path, const std::string& channel = {},
                                  std::optional<double> fs_override = std::nullopt) {
  auto in = detail::open_input(path);
  SignalFile out;
  std::vector<std::vector<double>> columns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      const auto body = detail::trim(std::string_view(text).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        out.metadata[detail::trim(std::string_view(body).substr(0, eq))] =
            detail::trim(std::string_view(body).substr(eq + 1));
      continue;
    }
    const auto fields = detail::split(text, ',');
    if (columns.empty()) columns.resize(fields.size());
    if (fields.size() != columns.size())
      throw Error(ErrorKind::Input, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(columns.size()) + " columns");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorKind::Input, path.string() + ":" + std::to_string(line_no) +
                                          ": not a finite number: '" + fields[c] + "'");
      columns[c].push_back(*v);
    }
  }
  if (columns.empty()) throw Error(ErrorKind::Input, path.string() + ": no samples");

  std::vector<std::string> names;
  if (auto it = out.metadata.find("channels"); it != out.metadata.end()) names = detail::split(it->second, ',');
  else if (auto it2 = out.metadata.find("channel"); it2 != out.metadata.end()) names = {it2->second};

  std::size_t column = 0;
  if (channel.empty()) {
    if (columns.size() != 1)
      throw Error(ErrorKind::Input, path.string() + ": multi-column signal needs an explicit channel");
    out.channel = names.empty() ? std::string{} : names.front();
  } else {
    const auto named = std::find(names.begin(), names.end(), channel);
    if (named != names.end() && static_cast<std::size_t>(named - names.begin()) < columns.size()) {
      column = static_cast<std::size_t>(named - names.begin());
    } else if (const auto idx = detail::parse_long(channel); idx && *idx >= 0 &&
                                                             static_cast<std::size_t>(*idx) < columns.size()) {
      column = static_cast<std::size_t>(*idx);
    } else if (names.empty() && columns.size() == 1) {
      column = 0;  // unlabeled single column
    } else {
      throw Error(ErrorKind::Input, path.string() + ": channel '" + channel + "' not found");
    }
    out.channel = channel;
  }

  double fs = 0.0;
  if (fs_override) {
    fs = *fs_override;
  } else if (auto it = out.metadata.find("fs"); it != out.metadata.end()) {
    const auto v = detail::parse_double(it->second);
    if (!v) throw Error(ErrorKind::Input, path.string() + ": bad fs header '" + it->second + "'");
    fs = *v;
  } else {
    throw Error(ErrorKind::Input, path.string() + ": no sampling rate (add '# fs=...' or pass one)");
  }
  if (!(fs > 0.0) || !std::isfinite(fs))
    throw Error(ErrorKind::Input, path.string() + ": sampling rate must be positive");
  out.series = TimeSeries(std::move(columns[column]), fs);
  return out;
}

/// Epoch indices must run 0, 1, 2, ... in order. An optional header line
/// whose first field is not an integer is skipped.
inline std::vector<SleepStage> read_hypnogram_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::vector<SleepStage> stages;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto fields = detail::split(text, ',');
    const auto idx = fields.size() == 2 ? detail::parse_long(fields[0]) : std::nullopt;
    if (!idx) {
      if (!seen_data && fields.size() == 2) {
        seen_data = true;
        continue;
      }
      throw Error(ErrorKind::Input, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'epoch_index,stage_token'");
    }
    seen_data = true;
    if (*idx != static_cast<long>(stages.size()))
      throw Error(ErrorKind::Input, path.string() + ":" + std::to_string(line_no) + ": epoch index " +
                                        std::to_string(*idx) + " out of sequence (expected " +
                                        std::to_string(stages.size()) + ")");
    stages.push_back(stage_from_token(fields[1]));
  }
  return stages;
}

struct ManifestEntry {
  std::string subject_id;
  Group group = Group::Healthy;
  std::filesystem::path signal_path;
  std::filesystem::path hypnogram_path;
  std::string channel;
  std::optional<double> fs;
};

/// Relative paths resolve against the manifest's directory.
inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::Input, path.string() + ": manifest must be a JSON array");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    auto field = [&](const char* key) -> std::string {
      if (!e.is_object() || !e.contains(key) || !e[key].is_string() || e[key].get<std::string>().empty())
        throw Error(ErrorKind::Input, path.string() + ": entry " + std::to_string(i) + " needs string '" + key + "'");
      return e[key].get<std::string>();
    };
    ManifestEntry m;
    m.subject_id = field("subject_id");
    m.group = parse_group(field("group"));
    m.signal_path = resolve(field("signal_path"));
    m.hypnogram_path = resolve(field("hypnogram_path"));
    m.channel = field("channel");
    if (e.contains("fs")) {
      if (!e["fs"].is_number()) throw Error(ErrorKind::Input, path.string() + ": 'fs' must be a number");
      m.fs = e["fs"].get<double>();
    }
    out.push_back(std::move(m));
  }
  if (out.empty()) throw Error(ErrorKind::Input, path.string() + ": manifest lists no recordings");
  return out;
}

inline Recording load_recording(const ManifestEntry& entry) {
  auto signal = read_signal_csv(entry.signal_path, entry.channel, entry.fs);
  Recording rec{entry.subject_id, entry.group, std::move(signal.series), read_hypnogram_csv(entry.hypnogram_path)};
  const std::size_t epochs = rec.series.size() / samples_per_epoch(rec.series.sample_rate_hz());
  if (rec.hypnogram.size() > epochs)
    throw Error(ErrorKind::Input, entry.hypnogram_path.string() + ": " + std::to_string(rec.hypnogram.size()) +
                                      " stage labels for " + std::to_string(epochs) + " epochs of signal");
  return rec;
}

inline json to_json(const EpochIndices& r) {
  auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  json j;
  j["subject_id"] = r.subject_id;
  j["group"] = to_string(r.group);
  j["stage"] = to_string(r.stage);
  j["epoch_index"] = r.epoch_index;
  j["sample_rate_hz"] = r.sample_rate_hz;
  j["n_samples"] = r.n_samples;
  j["lag"] = opt(r.lag);
  j["lag_saturated"] = r.lag_saturated;
  j["lag_at_noise_floor"] = r.lag_at_noise_floor;
  j["theiler"] = opt(r.theiler);
  j["theiler_saturated"] = r.theiler_saturated;
  j["med"] = opt(r.med);
  j["e1_at_selected"] = opt(r.e1_at_selected);
  j["deterministic"] = r.deterministic;
  j["embedding_dimension"] = opt(r.embedding_dimension);
  j["lle"] = opt(r.lle);
  j["lle_units"] = kLleUnits;
  j["lle_per_sample"] = opt(r.lle_per_sample);
  j["lle_renormalizations"] = r.lle_renormalizations;
  j["lle_low_confidence"] = r.lle_low_confidence;
  j["mi"] = opt(r.mi);
  j["mi_units"] = "bits";
  j["d2"] = opt(r.d2);
  j["d2_fit_r2"] = opt(r.d2_fit_r2);
  j["failed"] = r.failed();
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back(json{{"index", f.index}, {"reason", f.reason}});
  j["failures"] = failures;
  j["config_fingerprint"] = r.config_fingerprint;
  return j;
}

inline EpochIndices epoch_from_json(const json& j) {
  auto opt_int = [&](const char* k) -> std::optional<int> {
    return j.contains(k) && !j[k].is_null() ? std::optional<int>(j[k].get<int>()) : std::nullopt;
  };
  auto opt_double = [&](const char* k) -> std::optional<double> {
    return j.contains(k) && !j[k].is_null() ? std::optional<double>(j[k].get<double>()) : std::nullopt;
  };
  try {
    EpochIndices r;
    r.subject_id = j.at("subject_id").get<std::string>();
    r.group = parse_group(j.at("group").get<std::string>());
    r.stage = stage_from_name(j.at("stage").get<std::string>());
    r.epoch_index = j.at("epoch_index").get<int>();
    r.sample_rate_hz = j.value("sample_rate_hz", 0.0);
    r.n_samples = j.value("n_samples", std::size_t{0});
    r.lag = opt_int("lag");
    r.lag_saturated = j.value("lag_saturated", false);
    r.lag_at_noise_floor = j.value("lag_at_noise_floor", false);
    r.theiler = opt_int("theiler");
    r.theiler_saturated = j.value("theiler_saturated", false);
    r.med = opt_int("med");
    r.e1_at_selected = opt_double("e1_at_selected");
    r.deterministic = j.value("deterministic", false);
    r.embedding_dimension = opt_int("embedding_dimension");
    r.lle = opt_double("lle");
    r.lle_per_sample = opt_double("lle_per_sample");
    r.lle_renormalizations = j.value("lle_renormalizations", 0);
    r.lle_low_confidence = j.value("lle_low_confidence", false);
    r.mi = opt_double("mi");
    r.d2 = opt_double("d2");
    r.d2_fit_r2 = opt_double("d2_fit_r2");
    if (j.contains("failures"))
      for (const auto& f : j["failures"])
        r.failures.push_back({f.at("index").get<std::string>(), f.at("reason").get<std::string>()});
    r.config_fingerprint = j.value("config_fingerprint", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, std::string("malformed epoch record: ") + e.what());
  }
}

inline std::string to_ndjson(const std::vector<EpochIndices>& records) {
  std::string out;
  for (const auto& r : records) {
    out += dump_json(to_json(r));
    out += '\n';
  }
  return out;
}

inline std::vector<EpochIndices> read_ndjson(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::vector<EpochIndices> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Input, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(epoch_from_json(j));
  }
  return out;
}

/// Writes through a temporary file and a rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Input, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Input, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Reports. Each starts with a '# config_fingerprint=...' line.

/// index,stage,group,n,mean,std for every populated cell (std blank when n < 2).
inline std::string table1_csv(const std::vector<Observation>& obs, const std::string& fingerprint) {
  std::ostringstream out;
  out << "# config_fingerprint=" << fingerprint << "\n";
  out << "index,stage,group,n,mean,std\n";
  for (const auto& index : index_names())
    for (auto stage : kScoredStages)
      for (auto group : kGroups) {
        const auto values = cell_values(obs, group, stage, index);
        if (values.empty()) continue;
        out << index << ',' << to_string(stage) << ',' << to_string(group) << ',' << values.size() << ',';
        if (values.size() >= 2) {
          const auto s = summarize(values);
          out << format_number(s.mean) << ',' << format_number(s.std) << '\n';
        } else {
          out << format_number(values.front()) << ",\n";
        }
      }
  return out.str();
}

inline std::string pvalues_csv(const std::vector<ComparisonResult>& results, const std::string& fingerprint) {
  std::ostringstream out;
  out << "# config_fingerprint=" << fingerprint << "\n";
  out << "stage,index,n_apnea,n_healthy,mean_apnea,mean_healthy,t_value,df,p_value,p_reported\n";
  for (const auto& r : results) {
    out << to_string(r.stage) << ',' << r.index_name << ',' << r.apnea.n << ',' << r.healthy.n << ','
        << format_number(r.apnea.mean) << ',' << format_number(r.healthy.mean) << ','
        << format_number(r.stat.t) << ',' << format_number(r.stat.df) << ',' << format_number(r.p_value) << ','
        << format_number(reported_p(r.p_value)) << '\n';
  }
  return out.str();
}

inline std::string histogram_csv(const Histogram& h, std::size_t n, const std::string& fingerprint) {
  std::ostringstream out;
  out << "# config_fingerprint=" << fingerprint << "\n";
  out << "# index=" << h.index_name << " stage=" << to_string(h.stage) << " group=" << to_string(h.group)
      << " n=" << n << "\n";
  out << "bin_low,bin_high,relative_frequency\n";
  for (std::size_t k = 0; k < h.relative_frequencies.size(); ++k)
    out << format_number(h.bin_edges[k]) << ',' << format_number(h.bin_edges[k + 1]) << ','
        << format_number(h.relative_frequencies[k]) << '\n';
  return out.str();
}

inline std::string histogram_file_name(const Histogram& h) {
  return h.index_name + "_" + to_string(h.stage) + "_" + to_string(h.group) + ".csv";
}

}  // namespace chaosidx

#endif  // CHAOSIDX_IO_HPP
