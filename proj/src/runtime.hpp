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

#ifndef RELSCHED_RUNTIME_HPP
#define RELSCHED_RUNTIME_HPP

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>

#include "trace_graph.hpp"

namespace relsched {

/// Per-thread counters of completed (signaled) events. Single writer per
/// counter, many readers; sequentially consistent accesses at event
/// boundaries.
class VectorClock {
public:
  explicit VectorClock(size_t threads) : counters_(threads) {
    for (auto& c : counters_) c.store(0, std::memory_order_seq_cst);
  }

  uint64_t completed(ThreadId t) const { return counters_[t].load(std::memory_order_seq_cst); }

  /// Marks `event` complete: counters_[thread] becomes index+1. The seq_cst
  /// store orders the preceding shared access before the counter update.
  void signal(const Event& e) {
    counters_[e.thread].store(e.index + 1, std::memory_order_seq_cst);
  }

  std::atomic<uint64_t>& raw(ThreadId t) { return counters_[t]; }
  size_t size() const { return counters_.size(); }

private:
  // avoid false sharing between the single-writer counters
  struct alignas(64) Cell : std::atomic<uint64_t> {};
  std::vector<Cell> counters_;
};

/// Atomically replaceable admissible-prefix snapshot. Replacements must be
/// strict prefixes of the current value (constraints are only ever removed);
/// the generation counter lets spinning readers notice swaps cheaply.
class PrefixSlot {
public:
  explicit PrefixSlot(TraceGraph initial);

  std::shared_ptr<const TraceGraph> snapshot(uint64_t* generation = nullptr) const;
  uint64_t generation() const { return generation_.load(std::memory_order_acquire); }

  /// Publishes a strictly smaller prefix. Throws std::invalid_argument when
  /// the replacement is not a strict prefix of the current one.
  void replace(TraceGraph next);

private:
  mutable std::mutex mu_;
  std::shared_ptr<const TraceGraph> current_;
  std::atomic<uint64_t> generation_{0};
};

enum class WaitPolicy : uint8_t { Busy, Yield, Block };
WaitPolicy wait_policy_from_name(const std::string& name);

struct RunOptions {
  WaitPolicy policy = WaitPolicy::Busy;
  bool instrumented = true;  // false: gating and callbacks compiled out
  bool keep_log = false;
  uint64_t fuzz_seed = 0;
  bool fuzz = false;         // randomized per-event delays (stress runs)
  std::chrono::nanoseconds watchdog = std::chrono::seconds(10);
};

struct EventLogEntry {
  uint64_t stamp = 0;   // global completion order
  uint64_t gen = 0;     // prefix generation active at the event
  ThreadId thread = 0;
  uint32_t index = 0;
  uint64_t wait_ns = 0;
  bool assert_failed = false;
};

struct ExecutionReport {
  Execution executed;                   // stamped order (full only with keep_log)
  std::vector<uint8_t> error_free;      // per visited state (0..n events)
  uint64_t wall_ns = 0;                 // parallel phase only
  uint64_t waits = 0;                   // permit checks that actually waited
  std::vector<uint64_t> generations_seen;
  std::vector<EventLogEntry> log;       // per-event, stamped order
  bool any_violation = false;
  bool watchdog_fired = false;
};

/// The permit check: `event` may proceed iff every active incoming cross
/// edge's source has signaled, i.e. completed[tid(src)] >= index(src)+1.
/// Events outside the prefix and events without active incoming cross edges
/// pass immediately.
bool permitted(const Program& program, const InputState& input, const TraceGraph& prefix,
               const Event& event, const std::vector<uint64_t>& completed);

/// Runs the program on one real worker thread per program thread, gating
/// dependent events through the vector clock so that the execution adheres
/// to the prefix snapshot in `slot` at every step.
ExecutionReport execute(const Program& program, const InputState& input, PrefixSlot& slot,
                        const RunOptions& options);

/// Audits a report's log: filtered to the events of each generation's prefix,
/// the stamped order must adhere to that prefix.
bool audit_adherence(const Program& program, const InputState& input,
                     const std::vector<std::shared_ptr<const TraceGraph>>& generations,
                     const ExecutionReport& report);

} // namespace relsched

#endif
