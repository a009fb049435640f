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

#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace relsched {

using nlohmann::json;

BenchConfig BenchConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench config '" + path + "'");
  json j;
  in >> j;
  BenchConfig c;
  c.benchmark = j.at("benchmark").get<std::string>();
  c.program_path = j.at("program").get<std::string>();
  c.prefix_ladder = j.at("prefix_ladder").get<std::vector<std::string>>();
  c.runs = j.value("runs", 1000u);
  if (c.runs < 1) throw std::runtime_error("bench config: runs must be >= 1");
  c.policy = wait_policy_from_name(j.value("wait", "busy"));
  if (j.contains("input")) c.input_text = j.at("input").get<std::string>();
  c.fuzz_seed = j.value("fuzz_seed", 0ull);
  return c;
}

uint64_t median_ns(std::vector<uint64_t> samples) {
  if (samples.empty()) throw std::invalid_argument("median of no samples");
  size_t mid = samples.size() / 2;
  std::nth_element(samples.begin(), samples.begin() + static_cast<long>(mid), samples.end());
  uint64_t hi = samples[mid];
  if (samples.size() % 2 == 1) return hi;
  std::nth_element(samples.begin(), samples.begin() + static_cast<long>(mid) - 1,
                   samples.begin() + static_cast<long>(mid));
  return (samples[mid - 1] + hi) / 2;
}

namespace {

int64_t overhead_pct(uint64_t median, uint64_t baseline) {
  if (baseline == 0) return 0;
  double rel = (static_cast<double>(median) / static_cast<double>(baseline) - 1.0) * 100.0;
  return std::llround(rel);
}

} // namespace

BenchResult run_bench(const BenchConfig& config, std::ostream* progress) {
  Program program = Program::load_file(config.program_path);
  InputState input =
      config.input_text ? program.parse_input(*config.input_text) : program.default_input();

  std::vector<TraceGraph> ladder;
  for (const std::string& path : config.prefix_ladder) ladder.push_back(TraceGraph::load_file(path));
  for (size_t i = 1; i < ladder.size(); i++) {
    if (!is_prefix_of(ladder[i], ladder[i - 1]))
      throw std::runtime_error("prefix ladder is not strictly decreasing at step " +
                               std::to_string(i));
  }

  RunOptions base_opts;
  base_opts.instrumented = false;
  base_opts.fuzz = config.fuzz_seed != 0;
  base_opts.fuzz_seed = config.fuzz_seed;

  BenchResult result;
  auto one_config = [&](int64_t constraints, const RunOptions& opts, PrefixSlot& slot) {
    std::vector<uint64_t> samples;
    samples.reserve(config.runs);
    for (size_t r = 0; r < config.runs; r++) {
      ExecutionReport rep = execute(program, input, slot, opts);
      if (rep.watchdog_fired) throw std::runtime_error("watchdog fired during bench run");
      if (rep.any_violation) result.any_violation = true;
      samples.push_back(rep.wall_ns);
      result.raw.push_back(RawRow{constraints, r, rep.wall_ns});
    }
    return median_ns(std::move(samples));
  };

  if (progress) *progress << "bench " << config.benchmark << ": baseline (" << config.runs
                          << " runs)\n";
  PrefixSlot empty_slot{TraceGraph()};
  result.baseline_median_ns = one_config(-1, base_opts, empty_slot);
  result.summary.push_back(
      TimingRecord{config.benchmark, -1, result.baseline_median_ns, 0});

  RunOptions opts;
  opts.instrumented = true;
  opts.policy = config.policy;
  opts.fuzz = config.fuzz_seed != 0;
  opts.fuzz_seed = config.fuzz_seed;
  for (const TraceGraph& prefix : ladder) {
    int64_t constraints = static_cast<int64_t>(prefix.constraint_count());
    if (progress) *progress << "bench " << config.benchmark << ": " << constraints
                            << " constraints (" << config.runs << " runs)\n";
    PrefixSlot slot(prefix);
    uint64_t med = one_config(constraints, opts, slot);
    result.summary.push_back(TimingRecord{config.benchmark, constraints, med,
                                          overhead_pct(med, result.baseline_median_ns)});
  }
  return result;
}

void write_raw_csv(const BenchResult& result, const std::string& benchmark, std::ostream& os) {
  os << "benchmark,constraints,run,ns\n";
  for (const RawRow& r : result.raw)
    os << benchmark << "," << r.constraints << "," << r.run << "," << r.ns << "\n";
}

void write_summary_csv(const BenchResult& result, std::ostream& os) {
  os << "benchmark,constraints,median_ns,overhead_pct\n";
  for (const TimingRecord& t : result.summary)
    os << t.benchmark << "," << t.constraints << "," << t.median_ns << "," << t.overhead_pct
       << "\n";
}

} // namespace relsched
