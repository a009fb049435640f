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

#ifndef RELSCHED_CLASSES_HPP
#define RELSCHED_CLASSES_HPP

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "trace_graph.hpp"

namespace relsched {

/// Precomputed pairwise dependence over the program's event universe, either
/// concrete (one input) or the union over all inputs. The union relation is
/// what the verifier explores: union-equivalence refines equivalence under
/// every single input.
class DepMatrix {
public:
  static DepMatrix from_ctx(const ProgramCtx& ctx);
  static DepMatrix from_union(const InputSpace& space);

  bool operator()(const Event& a, const Event& b) const {
    return bits_[gid(a) * n_ + gid(b)] != 0;
  }
  size_t gid(const Event& e) const { return base_[e.thread] + e.index; }
  ThreadId thread_count() const { return static_cast<ThreadId>(base_.size() - 1); }

private:
  std::vector<size_t> base_; // thread -> first global id; sentinel at the end
  size_t n_ = 0;
  std::vector<uint8_t> bits_;

  void init_layout(const std::vector<uint32_t>& lengths);
};

/// Canonical class identity: the orientation of every dependent cross-thread
/// pair. Executions are Mazurkiewicz-equivalent iff their keys are equal.
struct ClassKey {
  std::vector<std::pair<Event, Event>> oriented; // sorted

  auto operator<=>(const ClassKey&) const = default;
  uint64_t hash() const;
};

ClassKey class_key(const std::vector<Event>& events, const DepMatrix& dep);

/// A reversible race: a dependent cross-thread pair with no happens-before
/// intermediary, identified by its positions in the execution.
struct Race {
  size_t i = 0, j = 0;
  Event first, second;
};

/// Reversible races: dependent cross-thread pairs with no happens-before
/// intermediary, plus adjacent lock-acquisition pairs of one mutex (those are
/// never hb-immediate because the release sits between, yet their order is a
/// schedule choice). `ctx` supplies instruction kinds for the latter.
std::vector<Race> detect_races(const std::vector<Event>& events, const DepMatrix& dep,
                               const ProgramCtx* ctx = nullptr);

/// Schedule candidates that realize the reversal of `race`:  the prefix up to
/// the race, the independent middle, then the second event before the first.
/// When the direct reversal cannot execute (lock blocking), alternatives that
/// branch to every enabled thread at the reversal point are returned instead.
std::vector<std::vector<ThreadId>> reverse_race(const Execution& exec, const Race& race,
                                                const DepMatrix& dep, const ProgramCtx& ctx);

struct ClassSet {
  struct Entry {
    std::vector<ThreadId> schedule;
    std::vector<Event> events;
  };
  std::map<ClassKey, Entry> classes;
};

/// Enumerates Mazurkiewicz classes by race-reversal closure from a seed
/// schedule, deduplicating by class key. `race_allowed` restricts which races
/// may be reversed (used to enumerate only the classes consistent with a
/// candidate prefix); by default all races are reversible.
ClassSet enumerate_classes(const ProgramCtx& ctx, const DepMatrix& dep,
                           const std::vector<ThreadId>& seed, size_t ceiling = 1'000'000,
                           const std::function<bool(const Race&)>& race_allowed = nullptr);

/// Deterministic complete schedule: repeatedly steps the lowest-id enabled
/// thread (straight through each thread when nothing blocks).
std::vector<ThreadId> sequential_schedule(const ProgramCtx& ctx);

} // namespace relsched

#endif
