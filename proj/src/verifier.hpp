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

#ifndef RELSCHED_VERIFIER_HPP
#define RELSCHED_VERIFIER_HPP

#include <deque>
#include <functional>
#include <optional>
#include <set>

#include "classes.hpp"

namespace relsched {

struct NoCorrectTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StrategyKind { DfsDefault, Horizontal, Vertical, RoundRobin, EarlyWait };

/// Throws std::invalid_argument on unknown names.
StrategyKind strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind k);

/// The strategy's preferred complete schedule (which race orientation the
/// initial trace gets). The schedule is a thread sequence; replayed under any
/// input it yields the same event sequence.
std::vector<ThreadId> initial_schedule(StrategyKind kind, const ProgramCtx& ctx);

/// Depth-first trace explorer with race reversal over the union (symbolic)
/// dependence. Maintains the explored-class set, the proven-safe state
/// fingerprints and the published admissible trace prefix; publishes a
/// strictly `<`-decreasing chain by removing one maximal scheduling
/// constraint at a time, each removal justified by every consistent class
/// being explored and error-free.
class Verifier {
public:
  struct ClassRecord {
    std::vector<ThreadId> schedule;
    std::vector<Event> events;
    std::vector<uint8_t> error_free; // per input
    bool safe_all_inputs = false;
  };

  struct Publish {
    size_t classes_at_publish = 0;
    TraceGraph prefix;
    std::optional<TraceEdge> removed;
  };

  Verifier(const Program& program, StrategyKind strategy, size_t input_ceiling = 4096);

  /// Finds the initial complete, correct trace (error-free for every input)
  /// and publishes it. Throws NoCorrectTrace when no class qualifies.
  void init();

  bool finished() const { return finished_; }
  size_t classes_explored() const { return explored_.size(); }

  /// Explores one additional Mazurkiewicz class. Returns false (and sets
  /// finished) when the class space is exhausted.
  bool verify_step();

  /// Removes the happens-before-latest removable constraint whose shortened
  /// prefix is provably safe. Returns the removed edge, or nullopt when no
  /// candidate is provable yet (queueing the missing classes for directed
  /// exploration) or none remains.
  std::optional<TraceEdge> try_relax();

  const TraceGraph& admissible() const { return admissible_; }
  const std::vector<Publish>& published() const { return published_; }
  const std::set<uint64_t>& proven_safe() const { return proven_safe_; }
  const InputSpace& inputs() const { return space_; }
  const std::map<ClassKey, ClassRecord>& explored() const { return explored_; }

  /// Distinct classes of one input covered so far (projection of the
  /// explored union classes).
  size_t per_input_class_count(size_t input_idx) const;

  /// init + interleaved try_relax / verify_step until finished or the class
  /// budget is reached. `on_step` and `on_publish` may be null.
  void run(size_t class_budget, const std::function<void(size_t, size_t, bool, size_t)>& on_step,
           const std::function<void(const Publish&)>& on_publish);

private:
  const Program& program_;
  StrategyKind strategy_;
  InputSpace space_;
  DepMatrix union_dep_;

  std::map<ClassKey, ClassRecord> explored_;
  std::deque<std::vector<ThreadId>> directed_; // classes a pending candidate needs
  std::deque<std::vector<ThreadId>> pending_;  // reversal candidates to key
  std::deque<std::vector<ThreadId>> worklist_; // explored classes to expand

  TraceGraph admissible_;
  std::vector<ThreadId> origin_schedule_;
  std::vector<Event> origin_events_;
  std::vector<Publish> published_;

  std::set<std::pair<Event, Event>> dead_edges_; // pinned by an unsafe class
  struct Candidate {
    TraceEdge edge;
    TraceGraph shrunk;
    std::set<ClassKey> required;
  };
  std::optional<Candidate> candidate_;

  std::set<uint64_t> proven_safe_;
  bool finished_ = false;
  bool initialized_ = false;

  const ClassRecord* explore_schedule(const std::vector<ThreadId>& schedule, bool* fresh);
  std::vector<TraceEdge> removable_edges() const;
  TraceGraph shrink(const TraceEdge& edge) const;
  void record_linearization_states(const TraceGraph& prefix);
  size_t origin_pos(const Event& e) const;
};

} // namespace relsched

#endif
