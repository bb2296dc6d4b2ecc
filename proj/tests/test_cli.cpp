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

#include "fixtures.hpp"

#include "chaosidx/app.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace chaosidx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = fixture::slurp(e.path());
  return files;
}

std::size_t csv_rows(const std::string& text) { return data_lines(text).size() - 1; }  // minus header

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"analyze", "--manifest", "x.json"}).code, 2);
  EXPECT_EQ(run({"synth", "logistic", "--n", "ten"}).code, 2);
  EXPECT_EQ(run({"synth", "logistic", "--r", "7"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SynthLogisticWritesHeaderAndSamples) {
  const auto r = run({"synth", "logistic", "--n", "20000", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# generator=logistic\n"), std::string::npos);
  EXPECT_NE(r.out.find("# seed=7\n"), std::string::npos);
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 20000u);
  for (const auto& l : lines) {
    const double v = std::stod(l);
    EXPECT_TRUE(v >= 0.0 && v <= 1.0);
  }
  EXPECT_EQ(run({"synth", "logistic", "--n", "20000", "--seed", "7"}).out, r.out);
}

TEST(Cli, SynthLorenzAndSine) {
  const auto lorenz = run({"synth", "lorenz", "--n", "5000"});
  ASSERT_EQ(lorenz.code, 0);
  for (const auto& l : data_lines(lorenz.out)) EXPECT_TRUE(std::isfinite(std::stod(l)));
  const auto sine = run({"synth", "sine", "--freq", "1", "--fs", "100", "--n", "200", "--skip", "0"});
  ASSERT_EQ(sine.code, 0);
  const auto lines = data_lines(sine.out);
  ASSERT_EQ(lines.size(), 200u);
  for (std::size_t k = 0; k < 100; ++k) EXPECT_NEAR(std::stod(lines[k]), std::stod(lines[k + 100]), 1e-9);
}

TEST(Cli, SynthToFile) {
  const auto dir = fixture::scratch("cli-synth");
  ASSERT_EQ(run({"synth", "henon", "--n", "100", "--out", (dir / "h.csv").string()}).code, 0);
  EXPECT_EQ(read_signal_csv(dir / "h.csv").series.size(), 100u);
}

TEST(Cli, EstimateLleLogistic) {
  const auto dir = fixture::scratch("cli-lle");
  ASSERT_EQ(run({"synth", "logistic", "--n", "20000", "--out", (dir / "l.csv").string()}).code, 0);
  const auto r = run({"estimate", "lle", "--input", (dir / "l.csv").string(), "--dim", "1", "--lag", "1",
                      "--evolve-steps", "1"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["estimator"], "lle");
  EXPECT_EQ(j["units"], "nats/s");
  EXPECT_NEAR(j["value_per_sample"].get<double>(), std::log(2.0), 0.07);
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), j["value_per_sample"].get<double>());  // fs defaults to 1
  const auto bits = json::parse(run({"estimate", "lle", "--input", (dir / "l.csv").string(), "--dim", "1", "--lag",
                                     "1", "--evolve-steps", "1", "--log2"})
                                    .out);
  EXPECT_NEAR(bits["value"].get<double>(), j["value"].get<double>() / std::log(2.0), 1e-12);
}

TEST(Cli, EstimateD2Segment) {
  const auto dir = fixture::scratch("cli-d2");
  std::vector<double> x(4000);
  Xoshiro256 rng(42);
  for (auto& v : x) v = rng.uniform();
  atomic_write(dir / "u.csv", fixture::signal_csv(x, 1.0));
  const auto r = run({"estimate", "d2", "--input", (dir / "u.csv").string(), "--dim", "1", "--lag", "1",
                      "--theiler", "0"});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 1.0, 0.05);
}

TEST(Cli, EstimateOtherIndices) {
  const auto dir = fixture::scratch("cli-other");
  ASSERT_EQ(run({"synth", "sine", "--freq", "1", "--fs", "40", "--n", "4000", "--out", (dir / "s.csv").string()}).code,
            0);
  const auto theiler = json::parse(run({"estimate", "theiler", "--input", (dir / "s.csv").string()}).out);
  EXPECT_NEAR(theiler["value"].get<int>(), 10, 1);
  for (const char* e : {"mi", "lag", "med"}) {
    const auto r = run({"estimate", e, "--input", (dir / "s.csv").string()});
    EXPECT_EQ(r.code, 0) << e << r.out;
    EXPECT_TRUE(json::parse(r.out).contains("parameters"));
  }
}

TEST(Cli, EstimateErrors) {
  const auto dir = fixture::scratch("cli-est-bad");
  const auto unknown = run({"estimate", "hurst", "--input", "x.csv"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_TRUE(json::parse(unknown.out).contains("error"));
  const auto missing = run({"estimate", "lle", "--input", (dir / "none.csv").string()});
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(json::parse(missing.out)["error"]["kind"], "input");
  std::string flat = "# fs=10\n";
  for (int k = 0; k < 200; ++k) flat += "1\n";
  atomic_write(dir / "flat.csv", flat);
  const auto r = run({"estimate", "d2", "--input", (dir / "flat.csv").string(), "--lag", "1", "--dim", "2", "--theiler", "0"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "degenerate-input");
}

TEST(Cli, AnalyzeWritesBoundedDeterministicReports) {
  const auto dir = fixture::scratch("cli-analyze");
  const auto manifest = fixture::write_dataset(dir / "data", 2);
  const auto a = run({"analyze", "--manifest", manifest.string(), "--out", (dir / "a").string(), "--jobs", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.err.find("dropped"), std::string::npos);
  const auto b = run({"analyze", "--manifest", manifest.string(), "--out", (dir / "b").string(), "--jobs", "2"});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto c = run({"analyze", "--manifest", manifest.string(), "--out", (dir / "c").string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto ta = tree(dir / "a");
  EXPECT_EQ(ta, tree(dir / "b"));
  EXPECT_EQ(ta, tree(dir / "c"));

  const auto m = json::parse(ta.at("run_manifest.json"));
  EXPECT_EQ(m["cells"].size(), 12u);
  EXPECT_EQ(m["windows"], 4 * 13);
  EXPECT_EQ(m["analyzed"], 4 * 12);
  EXPECT_EQ(m["dropped_samples"], 4 * 517);
  const std::string fp = m["config_fingerprint"];
  EXPECT_EQ(fp, EstimatorConfig{}.fingerprint());
  for (const auto& [name, content] : ta) {
    if (name.ends_with(".csv")) {
      EXPECT_EQ(content.rfind("# config_fingerprint=" + fp + "\n", 0), 0u) << name;
    }
  }

  EXPECT_LE(csv_rows(ta.at("pvalues.csv")), 24u);
  EXPECT_LE(csv_rows(ta.at("table1.csv")), 12u * index_names().size());
  std::size_t lle_cells = 0;
  for (const auto& l : data_lines(ta.at("table1.csv")))
    if (l.rfind("lle,", 0) == 0) ++lle_cells;
  EXPECT_EQ(lle_cells, 12u);
  EXPECT_EQ(read_ndjson(dir / "a" / "epochs.ndjson").size(), 4u * 12u);

  // report re-derives the same tables from the per-epoch records
  const auto rep = run({"report", "--epochs", (dir / "a" / "epochs.ndjson").string(), "--out", (dir / "r").string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  for (const auto& [name, content] : tree(dir / "r")) EXPECT_EQ(content, ta.at(name)) << name;
  EXPECT_EQ(tree(dir / "r").size() + 2, ta.size());
}

TEST(Cli, AnalyzePerStageConcat) {
  const auto dir = fixture::scratch("cli-concat");
  const auto manifest = fixture::write_dataset(dir / "data", 1, {'W', '2'});
  const auto r = run({"analyze", "--manifest", manifest.string(), "--out", (dir / "o").string(), "--mode",
                      "per-stage-concat"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_ndjson(dir / "o" / "epochs.ndjson").size(), 4u);
  EXPECT_EQ(run({"analyze", "--manifest", manifest.string(), "--out", (dir / "x").string(), "--mode", "nope"}).code, 2);
  EXPECT_FALSE(fs::exists(dir / "x"));
}

TEST(Cli, AnalyzeInputErrorWritesNothing) {
  const auto dir = fixture::scratch("cli-analyze-bad");
  const auto manifest = fixture::write_dataset(dir / "data", 1, {'W', '2'});
  atomic_write(dir / "data" / "apnea-1.csv", "# fs=128\n0.5\nnot-a-number\n");
  const auto r = run({"analyze", "--manifest", manifest.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(dir / "o"));
  EXPECT_EQ(run({"analyze", "--manifest", (dir / "none.json").string(), "--out", (dir / "o").string()}).code, 3);
  EXPECT_EQ(run({"report", "--epochs", (dir / "none.ndjson").string(), "--out", (dir / "o").string()}).code, 3);
}
