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

#ifndef RELSCHED_BENCH_HPP
#define RELSCHED_BENCH_HPP

#include <iosfwd>
#include <optional>

#include "runtime.hpp"

namespace relsched {

/// One timing experiment: a benchmark run uninstrumented and under a ladder
/// of strictly shrinking trace prefixes, a fixed number of runs each.
struct BenchConfig {
  std::string benchmark;
  std::string program_path;
  std::vector<std::string> prefix_ladder; // strictly decreasing under `<`
  size_t runs = 1000;
  WaitPolicy policy = WaitPolicy::Busy;
  std::optional<std::string> input_text;
  uint64_t fuzz_seed = 0; // 0 = no delay fuzzing (timing runs)

  static BenchConfig load_file(const std::string& path);
};

struct TimingRecord {
  std::string benchmark;
  int64_t constraints = 0; // -1 marks the uninstrumented baseline
  uint64_t median_ns = 0;
  int64_t overhead_pct = 0; // (median/baseline - 1) * 100, whole percent
};

struct RawRow {
  int64_t constraints = 0;
  size_t run = 0;
  uint64_t ns = 0;
};

struct BenchResult {
  std::vector<RawRow> raw;
  std::vector<TimingRecord> summary; // baseline first, then ladder order
  uint64_t baseline_median_ns = 0;
  bool any_violation = false;
};

uint64_t median_ns(std::vector<uint64_t> samples);

BenchResult run_bench(const BenchConfig& config, std::ostream* progress);

void write_raw_csv(const BenchResult& result, const std::string& benchmark, std::ostream& os);
void write_summary_csv(const BenchResult& result, std::ostream& os);

} // namespace relsched

#endif
