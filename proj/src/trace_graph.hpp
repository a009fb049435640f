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

#ifndef RELSCHED_TRACE_GRAPH_HPP
#define RELSCHED_TRACE_GRAPH_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depend.hpp"

namespace relsched {

struct TraceEdge {
  Event src;
  Event dst;
  PathConstraint label;

  auto operator<=>(const TraceEdge&) const = default;
};

/// A symbolic trace graph: events plus constraint-labeled cross-thread
/// happens-before edges. Program order is implicit (execution validity
/// enforces it), so every stored edge is a scheduling constraint. The
/// constraint set of the graph is exactly the set of edge labels. The same
/// structure serves as the trace-prefix representation; `origin` names the
/// complete trace a prefix was shrunk from.
class TraceGraph {
public:
  TraceGraph() = default;
  TraceGraph(std::vector<Event> events, std::vector<TraceEdge> edges, std::string origin = "");

  /// Builds the symbolic graph of one execution: an edge (e_i, c, e_j) for
  /// every cross-thread pair ordered i < j whose symbolic dependence is c,
  /// then canonical transitive reduction (an edge is dropped when, under
  /// every input satisfying its label, an active bypass path exists).
  static TraceGraph build(const Execution& exec, const InputSpace& space,
                          std::string origin = "");

  const std::vector<Event>& events() const { return events_; }
  const std::vector<TraceEdge>& edges() const { return edges_; }
  std::set<PathConstraint> constraints() const;
  const std::string& origin() const { return origin_; }
  void set_origin(std::string o) { origin_ = std::move(o); }

  std::optional<uint64_t> attested_classes() const { return attested_; }
  void set_attested_classes(uint64_t n) { attested_ = n; }

  bool contains(const Event& e) const;
  size_t constraint_count() const { return edges_.size(); }
  bool empty() const { return events_.empty(); }

  /// Threads with at least one incoming cross edge (the waiting threads).
  std::set<ThreadId> waiting_threads() const;

  /// remove(e, O): drops e, all edges touching it, and any constraint that no
  /// longer labels an edge. Removing an absent event is the identity.
  TraceGraph remove_event(const Event& e) const;

  /// Events reachable from `e` through program order (within the graph's
  /// event set) and stored edges, excluding e itself.
  std::vector<Event> hb_successors(const Event& e) const;

  bool operator==(const TraceGraph&) const;

  // line-oriented text form; round-trips bit-exactly
  void save(std::ostream& os) const;
  void save_file(const std::string& path) const;
  static TraceGraph load(std::istream& is);
  static TraceGraph load_file(const std::string& path);

private:
  std::vector<Event> events_;    // sorted
  std::vector<TraceEdge> edges_; // sorted
  std::string origin_;
  std::optional<uint64_t> attested_;

  void canonicalize();
};

/// The adherence relation (s0, u) ⊑ O: each event in order must be a graph
/// event with no still-active incoming edge from an unexecuted source. An
/// edge is active when its label holds in the initial state.
bool adheres(const Program& program, const InputState& input, const std::vector<Event>& events,
             const TraceGraph& graph);
bool adheres(const Program& program, const Execution& exec, const TraceGraph& graph);

/// (s0, u) ≐ O: adherence plus event-set equality (u is a linearization).
bool matches(const Program& program, const InputState& input, const std::vector<Event>& events,
             const TraceGraph& graph);
bool matches(const Program& program, const Execution& exec, const TraceGraph& graph);

/// The strict prefix order g1 < g2: strictly fewer events, edges of g2
/// restricted to the remaining events, and the remaining set downward-closed
/// under g2's edges.
bool is_prefix_of(const TraceGraph& g1, const TraceGraph& g2);

/// All executions containing exactly the graph's events and adhering to it.
std::vector<Execution> linearizations(const TraceGraph& graph, const ProgramCtx& ctx,
                                      size_t ceiling = 10'000'000);

/// Greedy chooser over the synchronization-free continuations: a maximal run
/// of one eligible thread, round-robin over thread ids starting at
/// `start_hint`. An event is eligible when it is outside the graph or all of
/// its active incoming edges have executed sources. Returns an empty run only
/// when no thread can step at all.
std::vector<Event> choose_free_run(const ProgramCtx& ctx, const ProgramState& state,
                                   const TraceGraph& graph, ThreadId start_hint);

} // namespace relsched

#endif
