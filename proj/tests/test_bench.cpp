/*
 * Copyright (c) 2026 The relsched authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "bench.hpp"
#include "corpus.hpp"
#include "verifier.hpp"

using namespace relsched;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("relsched_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("median matches the sort-based oracle") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; trial++) {
    std::uniform_int_distribution<size_t> len_d(1, 50);
    std::uniform_int_distribution<uint64_t> val_d(0, 1000);
    std::vector<uint64_t> v(len_d(rng));
    for (auto& x : v) x = val_d(rng);

    std::vector<uint64_t> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    uint64_t oracle = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                        : (sorted[sorted.size() / 2 - 1] +
                                           sorted[sorted.size() / 2]) / 2;
    CHECK(median_ns(v) == oracle);
  }
}

TEST_CASE("bench produces configurations x runs raw rows and a summary") {
  TempDir tmp;
  fs::path program_path = tmp.path / "fig1.json";
  std::ofstream(program_path) << corpus_program_json("fig1_example");

  // emit a ladder via the verifier (fig1 pins its constraint: ladder length 1)
  Program p = Program::load_file(program_path.string());
  Verifier v(p, StrategyKind::DfsDefault);
  v.run(1000, nullptr, nullptr);
  std::vector<std::string> ladder_files;
  for (size_t i = 0; i < v.published().size(); i++) {
    fs::path f = tmp.path / ("prefix_" + std::to_string(i) + ".txt");
    v.published()[i].prefix.save_file(f.string());
    ladder_files.push_back(f.string());
  }
  REQUIRE(ladder_files.size() == 1);

  BenchConfig config;
  config.benchmark = "fig1_example";
  config.program_path = program_path.string();
  config.prefix_ladder = ladder_files;
  config.runs = 7;
  config.policy = WaitPolicy::Busy;
  config.input_text = "x=0,y=0";

  BenchResult result = run_bench(config, nullptr);
  CHECK(result.raw.size() == (1 + ladder_files.size()) * config.runs);
  REQUIRE(result.summary.size() == 1 + ladder_files.size());
  CHECK(result.summary[0].constraints == -1);
  CHECK(result.summary[0].overhead_pct == 0);
  CHECK(result.summary[1].constraints == 2);
  CHECK_FALSE(result.any_violation);

  // raw CSV shape: header + one line per row, comma-separated
  std::ostringstream raw;
  write_raw_csv(result, config.benchmark, raw);
  std::string raw_text = raw.str();
  size_t lines = static_cast<size_t>(std::count(raw_text.begin(), raw_text.end(), '\n'));
  CHECK(lines == result.raw.size() + 1);
  CHECK(raw_text.rfind("benchmark,constraints,run,ns\n", 0) == 0);

  std::ostringstream summary;
  write_summary_csv(result, summary);
  CHECK(summary.str().rfind("benchmark,constraints,median_ns,overhead_pct\n", 0) == 0);
}

TEST_CASE("runs=1 medians equal the single samples") {
  TempDir tmp;
  fs::path program_path = tmp.path / "bigshot.json";
  std::ofstream(program_path) << corpus_program_json("bigshot");

  Program p = Program::load_file(program_path.string());
  Verifier v(p, StrategyKind::DfsDefault);
  v.init();
  fs::path prefix_path = tmp.path / "prefix.txt";
  v.admissible().save_file(prefix_path.string());

  BenchConfig config;
  config.benchmark = "bigshot";
  config.program_path = program_path.string();
  config.prefix_ladder = {prefix_path.string()};
  config.runs = 1;

  BenchResult result = run_bench(config, nullptr);
  REQUIRE(result.raw.size() == 2);
  CHECK(result.summary[0].median_ns == result.raw[0].ns);
  CHECK(result.summary[1].median_ns == result.raw[1].ns);
}

TEST_CASE("bench rejects ladders that do not strictly decrease") {
  TempDir tmp;
  fs::path program_path = tmp.path / "fig1.json";
  std::ofstream(program_path) << corpus_program_json("fig1_example");
  Program p = Program::load_file(program_path.string());
  Verifier v(p, StrategyKind::DfsDefault);
  v.init();
  fs::path prefix_path = tmp.path / "prefix.txt";
  v.admissible().save_file(prefix_path.string());

  BenchConfig config;
  config.benchmark = "fig1_example";
  config.program_path = program_path.string();
  config.prefix_ladder = {prefix_path.string(), prefix_path.string()};
  config.runs = 1;
  CHECK_THROWS(run_bench(config, nullptr));
}

TEST_CASE("bench config files load with defaults") {
  TempDir tmp;
  fs::path cfg = tmp.path / "bench.json";
  std::ofstream(cfg) << R"({
    "benchmark": "b", "program": "p.json", "prefix_ladder": ["a.txt"],
    "runs": 3, "wait": "yield", "input": "x=0,y=0"
  })";
  BenchConfig config = BenchConfig::load_file(cfg.string());
  CHECK(config.benchmark == "b");
  CHECK(config.runs == 3);
  CHECK(config.policy == WaitPolicy::Yield);
  REQUIRE(config.input_text.has_value());
  CHECK(*config.input_text == "x=0,y=0");
  CHECK(config.fuzz_seed == 0);
}
