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

#include "trace_graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace relsched {

TraceGraph::TraceGraph(std::vector<Event> events, std::vector<TraceEdge> edges, std::string origin)
    : events_(std::move(events)), edges_(std::move(edges)), origin_(std::move(origin)) {
  canonicalize();
  for (const TraceEdge& e : edges_) {
    if (!contains(e.src) || !contains(e.dst))
      throw SchemaError("trace edge references an event outside the graph");
  }
}

void TraceGraph::canonicalize() {
  std::sort(events_.begin(), events_.end());
  events_.erase(std::unique(events_.begin(), events_.end()), events_.end());
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool TraceGraph::contains(const Event& e) const {
  return std::binary_search(events_.begin(), events_.end(), e);
}

std::set<PathConstraint> TraceGraph::constraints() const {
  std::set<PathConstraint> out;
  for (const TraceEdge& e : edges_) out.insert(e.label);
  return out;
}

std::set<ThreadId> TraceGraph::waiting_threads() const {
  std::set<ThreadId> out;
  for (const TraceEdge& e : edges_) out.insert(e.dst.thread);
  return out;
}

TraceGraph TraceGraph::remove_event(const Event& e) const {
  TraceGraph out;
  out.origin_ = origin_;
  out.attested_ = attested_;
  for (const Event& ev : events_)
    if (!(ev == e)) out.events_.push_back(ev);
  for (const TraceEdge& ed : edges_)
    if (!(ed.src == e) && !(ed.dst == e)) out.edges_.push_back(ed);
  return out;
}

std::vector<Event> TraceGraph::hb_successors(const Event& e) const {
  std::set<Event> seen;
  std::deque<Event> work{e};
  while (!work.empty()) {
    Event cur = work.front();
    work.pop_front();
    for (const Event& ev : events_) {
      if (seen.count(ev)) continue;
      bool succ = (ev.thread == cur.thread && ev.index > cur.index);
      if (!succ) {
        for (const TraceEdge& ed : edges_) {
          if (ed.src == cur && ed.dst == ev) {
            succ = true;
            break;
          }
        }
      }
      if (succ) {
        seen.insert(ev);
        work.push_back(ev);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

bool TraceGraph::operator==(const TraceGraph& o) const {
  return events_ == o.events_ && edges_ == o.edges_;
}

namespace {

// Is there a path src -> dst through program order plus the cross edges
// active under `input`, avoiding the direct edge (src, dst)?
bool active_bypass(const std::vector<Event>& events, const std::vector<TraceEdge>& edges,
                   const Program& program, const InputState& input, const Event& src,
                   const Event& dst) {
  std::set<Event> seen{src};
  std::deque<Event> work{src};
  while (!work.empty()) {
    Event cur = work.front();
    work.pop_front();
    auto push = [&](const Event& next) {
      if (!seen.count(next)) {
        seen.insert(next);
        work.push_back(next);
      }
    };
    for (const Event& ev : events)
      if (ev.thread == cur.thread && ev.index == cur.index + 1) push(ev);
    for (const TraceEdge& ed : edges) {
      if (!(ed.src == cur)) continue;
      if (cur == src && ed.dst == dst) continue; // skip the direct edge
      if (!ed.label.eval(program, input)) continue;
      push(ed.dst);
    }
    if (cur == dst && !(cur == src)) return true;
  }
  return seen.count(dst) > 0;
}

} // namespace

TraceGraph TraceGraph::build(const Execution& exec, const InputSpace& space, std::string origin) {
  const Program& program = space.program();
  std::vector<Event> events = exec.events;
  std::vector<TraceEdge> edges;
  for (size_t i = 0; i < exec.events.size(); i++) {
    for (size_t j = i + 1; j < exec.events.size(); j++) {
      const Event& a = exec.events[i];
      const Event& b = exec.events[j];
      if (a.thread == b.thread) continue; // program order is implicit
      if (auto c = space.symbolic_dependent(a, b))
        edges.push_back(TraceEdge{a, b, *c});
    }
  }
  std::sort(edges.begin(), edges.end());

  // canonical transitive reduction: drop an edge when every input that
  // activates it also admits an active bypass path
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < edges.size(); i++) {
      const TraceEdge& cand = edges[i];
      bool redundant = true;
      for (size_t k = 0; k < space.size() && redundant; k++) {
        const InputState& in = space.input(k);
        if (!cand.label.eval(program, in)) continue;
        if (!active_bypass(events, edges, program, in, cand.src, cand.dst)) redundant = false;
      }
      if (redundant) {
        edges.erase(edges.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }

  TraceGraph g(std::move(events), std::move(edges), std::move(origin));
  return g;
}

bool adheres(const Program& program, const InputState& input, const std::vector<Event>& events,
             const TraceGraph& graph) {
  // executed-source bookkeeping replaces the literal remove() recursion
  std::set<Event> executed;
  for (const Event& e : events) {
    if (!graph.contains(e)) return false;
    for (const TraceEdge& ed : graph.edges()) {
      if (!(ed.dst == e)) continue;
      if (executed.count(ed.src)) continue; // removed by an earlier step
      if (ed.label.eval(program, input)) return false;
    }
    executed.insert(e);
  }
  return true;
}

bool adheres(const Program& program, const Execution& exec, const TraceGraph& graph) {
  return adheres(program, exec.initial, exec.events, graph);
}

bool matches(const Program& program, const InputState& input, const std::vector<Event>& events,
             const TraceGraph& graph) {
  if (!adheres(program, input, events, graph)) return false;
  std::vector<Event> sorted = events;
  std::sort(sorted.begin(), sorted.end());
  return sorted == graph.events();
}

bool matches(const Program& program, const Execution& exec, const TraceGraph& graph) {
  return matches(program, exec.initial, exec.events, graph);
}

bool is_prefix_of(const TraceGraph& g1, const TraceGraph& g2) {
  const auto& e1 = g1.events();
  const auto& e2 = g2.events();
  if (e1.size() >= e2.size()) return false;
  if (!std::includes(e2.begin(), e2.end(), e1.begin(), e1.end())) return false;

  std::vector<TraceEdge> restricted;
  for (const TraceEdge& ed : g2.edges())
    if (g1.contains(ed.src) && g1.contains(ed.dst)) restricted.push_back(ed);
  if (restricted != g1.edges()) return false;

  // downward closure: a dropped source forces a dropped target
  for (const TraceEdge& ed : g2.edges())
    if (!g1.contains(ed.src) && g1.contains(ed.dst)) return false;
  return true;
}

namespace {

void linearize_rec(const TraceGraph& graph, const ProgramCtx& ctx, ProgramState& s,
                   std::vector<Event>& acc, std::set<Event>& executed,
                   std::vector<Execution>& out, size_t ceiling) {
  if (acc.size() == graph.events().size()) {
    Execution e;
    e.initial = ctx.input();
    e.events = acc;
    e.terminal = ctx.enabled_threads(s).empty();
    out.push_back(std::move(e));
    if (out.size() > ceiling)
      throw std::runtime_error("linearization enumeration exceeded ceiling");
    return;
  }
  for (ThreadId t = 0; t < ctx.program().thread_count(); t++) {
    if (!ctx.thread_enabled(s, t)) continue;
    Event next{t, s.events[t]};
    if (!graph.contains(next)) continue;
    bool blocked = false;
    for (const TraceEdge& ed : graph.edges()) {
      if (!(ed.dst == next) || executed.count(ed.src)) continue;
      if (ed.label.eval(ctx.program(), ctx.input())) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    ProgramState saved = s;
    ctx.step(s, t);
    acc.push_back(next);
    executed.insert(next);
    linearize_rec(graph, ctx, s, acc, executed, out, ceiling);
    executed.erase(next);
    acc.pop_back();
    s = std::move(saved);
  }
}

} // namespace

std::vector<Execution> linearizations(const TraceGraph& graph, const ProgramCtx& ctx,
                                      size_t ceiling) {
  std::vector<Execution> out;
  ProgramState s = ctx.initial_state();
  std::vector<Event> acc;
  std::set<Event> executed;
  linearize_rec(graph, ctx, s, acc, executed, out, ceiling);
  return out;
}

std::vector<Event> choose_free_run(const ProgramCtx& ctx, const ProgramState& state,
                                   const TraceGraph& graph, ThreadId start_hint) {
  ThreadId n = ctx.program().thread_count();
  auto eligible = [&](const ProgramState& s, ThreadId t) {
    if (!ctx.thread_enabled(s, t)) return false;
    Event next{t, s.events[t]};
    if (!graph.contains(next)) return true; // already-reversed races run free
    for (const TraceEdge& ed : graph.edges()) {
      if (!(ed.dst == next)) continue;
      const Event& src = ed.src;
      bool src_done = src.index < s.events[src.thread];
      if (!src_done && ed.label.eval(ctx.program(), ctx.input())) return false;
    }
    return true;
  };

  ProgramState s = state;
  for (ThreadId off = 0; off < n; off++) {
    ThreadId t = static_cast<ThreadId>((start_hint + off) % n);
    if (!eligible(s, t)) continue;
    std::vector<Event> run;
    while (eligible(s, t)) {
      Event e{t, s.events[t]};
      ctx.step(s, t);
      run.push_back(e);
    }
    return run;
  }
  return {};
}

void TraceGraph::save(std::ostream& os) const {
  os << "prefix " << (origin_.empty() ? "-" : origin_) << "\n";
  if (attested_) os << "attested classes=" << *attested_ << "\n";
  for (const Event& e : events_) os << "event " << e.thread << ":" << e.index << "\n";
  for (const TraceEdge& ed : edges_) {
    os << "edge " << ed.src.thread << ":" << ed.src.index << " -> " << ed.dst.thread << ":"
       << ed.dst.index << " [" << ed.label.str() << "]\n";
  }
}

void TraceGraph::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace-prefix file '" + path + "'");
  save(out);
}

namespace {

Event parse_event_ref(const std::string& text) {
  size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw SchemaError("malformed event reference '" + text + "'");
  Event e;
  e.thread = static_cast<ThreadId>(std::stoul(text.substr(0, colon)));
  e.index = static_cast<uint32_t>(std::stoul(text.substr(colon + 1)));
  return e;
}

} // namespace

TraceGraph TraceGraph::load(std::istream& is) {
  std::string line;
  std::vector<Event> events;
  std::vector<TraceEdge> edges;
  std::string origin;
  std::optional<uint64_t> attested;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "prefix") {
      ls >> origin;
      if (origin == "-") origin.clear();
      have_header = true;
    } else if (kw == "attested") {
      std::string rest;
      ls >> rest;
      if (rest.rfind("classes=", 0) != 0) throw SchemaError("malformed attested line");
      attested = std::stoull(rest.substr(8));
    } else if (kw == "event") {
      std::string ref;
      ls >> ref;
      events.push_back(parse_event_ref(ref));
    } else if (kw == "edge") {
      std::string a, arrow, b;
      ls >> a >> arrow >> b;
      if (arrow != "->") throw SchemaError("malformed edge line '" + line + "'");
      size_t lb = line.find('[');
      size_t rb = line.rfind(']');
      if (lb == std::string::npos || rb == std::string::npos || rb < lb)
        throw SchemaError("edge line missing [constraint]: '" + line + "'");
      TraceEdge ed;
      ed.src = parse_event_ref(a);
      ed.dst = parse_event_ref(b);
      ed.label = PathConstraint::parse(line.substr(lb + 1, rb - lb - 1));
      edges.push_back(std::move(ed));
    } else {
      throw SchemaError("unknown trace-prefix line '" + line + "'");
    }
  }
  if (!have_header) throw SchemaError("trace-prefix file missing 'prefix' header");
  TraceGraph g(std::move(events), std::move(edges), std::move(origin));
  if (attested) g.set_attested_classes(*attested);
  return g;
}

TraceGraph TraceGraph::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace-prefix file '" + path + "'");
  return load(in);
}

} // namespace relsched
