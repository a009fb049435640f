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

#ifndef RELSCHED_STATE_HPP
#define RELSCHED_STATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "program.hpp"

namespace relsched {

/// The k-th shared-memory access of a thread within an execution.
struct Event {
  ThreadId thread = 0;
  uint32_t index = 0;

  auto operator<=>(const Event&) const = default;
  std::string str() const {
    return std::to_string(thread) + ":" + std::to_string(index);
  }
};

/// An initial state plus the event sequence observed from it.
struct Execution {
  InputState initial;
  std::vector<Event> events;
  bool terminal = false;

  std::vector<ThreadId> schedule() const {
    std::vector<ThreadId> s;
    s.reserve(events.size());
    for (const Event& e : events) s.push_back(e.thread);
    return s;
  }
};

/// Structural program state: shared cells, per-thread program counters,
/// register files, occurrence counters and sticky assertion flags.
struct ProgramState {
  std::vector<int64_t> mem;
  std::vector<uint32_t> pc;       // next instruction index per thread
  std::vector<uint32_t> events;   // events executed per thread
  std::vector<int64_t> regs;      // flattened per-thread register files
  std::vector<uint8_t> violated;  // sticky per-thread assert failure

  bool operator==(const ProgramState&) const = default;
  uint64_t fingerprint() const;
};

enum class StepResult : uint8_t { Ok, Terminal, Blocked };

/// A program specialized to one input: guards (over inputs only) are folded
/// away, leaving per-thread streams where every entry is exactly one shared
/// access. Event (t,k) is entry k of stream t, so the location an event
/// touches is fixed before any scheduling happens.
class ProgramCtx {
public:
  ProgramCtx(const Program& program, InputState input);

  const Program& program() const { return *program_; }
  const InputState& input() const { return input_; }

  ProgramState initial_state() const;

  uint32_t stream_length(ThreadId t) const {
    return static_cast<uint32_t>(stream_[t].size());
  }
  const Instr& instr_at(ThreadId t, uint32_t k) const {
    return program_->threads[t][stream_[t][k]];
  }
  uint32_t cell_at(ThreadId t, uint32_t k) const { return cells_[t][k]; }

  /// Executes the next event of `thread` in place. Deterministic.
  StepResult step(ProgramState& s, ThreadId thread) const;

  bool thread_terminal(const ProgramState& s, ThreadId t) const {
    return s.events[t] >= stream_length(t);
  }
  bool thread_enabled(const ProgramState& s, ThreadId t) const;
  bool all_terminal(const ProgramState& s) const;
  std::vector<ThreadId> enabled_threads(const ProgramState& s) const;

  /// No failed assertion so far and every global assertion holds.
  bool error_free(const ProgramState& s) const;

  /// Replays a thread schedule from the initial state. Returns the resulting
  /// execution, or nullopt if some step is Terminal/Blocked.
  std::optional<Execution> replay(const std::vector<ThreadId>& schedule) const;
  std::optional<ProgramState> replay_state(const std::vector<ThreadId>& schedule) const;

  size_t total_events() const;

  const std::vector<uint32_t>& reg_base() const { return reg_base_; }

private:
  const Program* program_;
  InputState input_;
  std::vector<std::vector<uint32_t>> stream_; // instruction indices per thread
  std::vector<std::vector<uint32_t>> cells_;  // resolved cell per stream entry
  std::vector<uint32_t> reg_base_;            // register file offsets
  uint32_t total_regs_ = 0;
};

} // namespace relsched

#endif
