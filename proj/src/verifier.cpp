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

#include "verifier.hpp"

#include <algorithm>

namespace relsched {

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "dfs-default") return StrategyKind::DfsDefault;
  if (name == "horizontal") return StrategyKind::Horizontal;
  if (name == "vertical") return StrategyKind::Vertical;
  if (name == "round-robin") return StrategyKind::RoundRobin;
  if (name == "early-wait") return StrategyKind::EarlyWait;
  throw std::invalid_argument("unknown exploration strategy '" + name + "'");
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::DfsDefault: return "dfs-default";
    case StrategyKind::Horizontal: return "horizontal";
    case StrategyKind::Vertical: return "vertical";
    case StrategyKind::RoundRobin: return "round-robin";
    case StrategyKind::EarlyWait: return "early-wait";
  }
  return "?";
}

namespace {

std::vector<ThreadId> schedule_by_priority(const ProgramCtx& ctx,
                                           const std::vector<ThreadId>& order) {
  std::vector<ThreadId> schedule;
  ProgramState s = ctx.initial_state();
  for (;;) {
    bool progressed = false;
    for (ThreadId t : order) {
      while (ctx.thread_enabled(s, t)) {
        ctx.step(s, t);
        schedule.push_back(t);
        progressed = true;
      }
      if (progressed) break; // rescan from the highest priority
    }
    if (!progressed) break;
  }
  return schedule;
}

std::vector<ThreadId> round_robin_schedule(const ProgramCtx& ctx) {
  std::vector<ThreadId> schedule;
  ProgramState s = ctx.initial_state();
  for (;;) {
    bool progressed = false;
    for (ThreadId t = 0; t < ctx.program().thread_count(); t++) {
      if (!ctx.thread_enabled(s, t)) continue;
      ctx.step(s, t);
      schedule.push_back(t);
      progressed = true;
    }
    if (!progressed) break;
  }
  return schedule;
}

} // namespace

std::vector<ThreadId> initial_schedule(StrategyKind kind, const ProgramCtx& ctx) {
  ThreadId n = ctx.program().thread_count();
  switch (kind) {
    case StrategyKind::DfsDefault:
    case StrategyKind::Horizontal:
    case StrategyKind::EarlyWait: {
      std::vector<ThreadId> order(n);
      for (ThreadId t = 0; t < n; t++) order[t] = t;
      return schedule_by_priority(ctx, order);
    }
    case StrategyKind::Vertical: {
      // defer thread 0 to the end: its conflicting events wait, nobody else does
      std::vector<ThreadId> order;
      for (ThreadId t = 1; t < n; t++) order.push_back(t);
      if (n > 0) order.push_back(0);
      return schedule_by_priority(ctx, order);
    }
    case StrategyKind::RoundRobin: return round_robin_schedule(ctx);
  }
  return {};
}

Verifier::Verifier(const Program& program, StrategyKind strategy, size_t input_ceiling)
    : program_(program), strategy_(strategy), space_(program, input_ceiling),
      union_dep_(DepMatrix::from_union(space_)) {
  if (!program.global_assertions.empty())
    throw std::invalid_argument(
        "verifier requires assert instructions (global state predicates are not "
        "invariant across linearizations of one class)");
}

const Verifier::ClassRecord* Verifier::explore_schedule(const std::vector<ThreadId>& schedule,
                                                        bool* fresh) {
  auto exec0 = space_.ctx(0).replay(schedule);
  if (!exec0) {
    if (fresh) *fresh = false;
    return nullptr;
  }
  ClassKey key = class_key(exec0->events, union_dep_);
  auto it = explored_.find(key);
  if (it != explored_.end()) {
    if (fresh) *fresh = false;
    return &it->second;
  }

  ClassRecord rec;
  rec.schedule = schedule;
  rec.events = exec0->events;
  rec.error_free.assign(space_.size(), 0);
  bool all_ok = true;
  for (size_t i = 0; i < space_.size(); i++) {
    const ProgramCtx& ctx = space_.ctx(i);
    ProgramState s = ctx.initial_state();
    bool ok = ctx.error_free(s);
    bool feasible = true;
    for (ThreadId t : schedule) {
      if (ctx.step(s, t) != StepResult::Ok) {
        feasible = false;
        break;
      }
      if (ok && !ctx.error_free(s)) ok = false;
    }
    if (!feasible || !ctx.all_terminal(s)) {
      // the schedule is not a complete execution under this input; the class
      // cannot back a symbolic trace
      ok = false;
    } else if (ok) {
      proven_safe_.insert(s.fingerprint()); // terminal and error-free
    }
    rec.error_free[i] = ok ? 1 : 0;
    all_ok = all_ok && ok;
  }
  rec.safe_all_inputs = all_ok;
  auto [pos, inserted] = explored_.emplace(std::move(key), std::move(rec));
  worklist_.push_back(schedule);
  if (fresh) *fresh = inserted;
  return &pos->second;
}

void Verifier::init() {
  std::vector<ThreadId> seed = initial_schedule(strategy_, space_.ctx(0));
  bool fresh = false;
  const ClassRecord* rec = explore_schedule(seed, &fresh);
  if (!rec) throw NoCorrectTrace("strategy schedule does not execute");

  // depth-first search over classes until one is error-free for every input
  while (!rec->safe_all_inputs) {
    const ClassRecord* found = nullptr;
    while (!pending_.empty() && !found) {
      std::vector<ThreadId> cand = std::move(pending_.front());
      pending_.pop_front();
      bool is_new = false;
      const ClassRecord* r = explore_schedule(cand, &is_new);
      if (is_new && r && r->safe_all_inputs) found = r;
    }
    if (found) {
      rec = found;
      break;
    }
    if (worklist_.empty()) throw NoCorrectTrace("no complete trace is error-free for all inputs");
    std::vector<ThreadId> sched = std::move(worklist_.front());
    worklist_.pop_front();
    auto exec = space_.ctx(0).replay(sched);
    for (const Race& r : detect_races(exec->events, union_dep_, &space_.ctx(0)))
      for (auto& cand : reverse_race(*exec, r, union_dep_, space_.ctx(0)))
        pending_.push_back(std::move(cand));
  }

  origin_schedule_ = rec->schedule;
  origin_events_ = rec->events;
  auto exec = space_.ctx(0).replay(origin_schedule_);
  admissible_ = TraceGraph::build(*exec, space_, "trace-" + program_.name);
  admissible_.set_attested_classes(explored_.size());
  record_linearization_states(admissible_);
  published_.push_back(Publish{explored_.size(), admissible_, std::nullopt});
  initialized_ = true;
}

bool Verifier::verify_step() {
  for (;;) {
    std::vector<ThreadId> cand;
    if (!directed_.empty()) {
      cand = std::move(directed_.front());
      directed_.pop_front();
    } else if (!pending_.empty()) {
      cand = std::move(pending_.front());
      pending_.pop_front();
    } else if (!worklist_.empty()) {
      std::vector<ThreadId> sched = std::move(worklist_.front());
      worklist_.pop_front();
      auto exec = space_.ctx(0).replay(sched);
      for (const Race& r : detect_races(exec->events, union_dep_, &space_.ctx(0)))
        for (auto& c : reverse_race(*exec, r, union_dep_, space_.ctx(0)))
          pending_.push_back(std::move(c));
      continue;
    } else {
      finished_ = true;
      return false;
    }
    bool fresh = false;
    explore_schedule(cand, &fresh);
    if (fresh) return true;
  }
}

size_t Verifier::origin_pos(const Event& e) const {
  for (size_t i = 0; i < origin_events_.size(); i++)
    if (origin_events_[i] == e) return i;
  return origin_events_.size();
}

std::vector<TraceEdge> Verifier::removable_edges() const {
  // delayed-removal rule: only edges whose target has no happens-before
  // successor touching a cross edge
  std::vector<TraceEdge> out;
  std::set<Event> cross_events;
  for (const TraceEdge& e : admissible_.edges()) {
    cross_events.insert(e.src);
    cross_events.insert(e.dst);
  }
  for (const TraceEdge& e : admissible_.edges()) {
    bool ok = true;
    for (const Event& succ : admissible_.hb_successors(e.dst))
      if (cross_events.count(succ)) ok = false;
    if (ok) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [this](const TraceEdge& a, const TraceEdge& b) {
    return origin_pos(a.dst) > origin_pos(b.dst); // happens-before-latest first
  });
  return out;
}

TraceGraph Verifier::shrink(const TraceEdge& edge) const {
  std::set<Event> removed{edge.src, edge.dst};
  for (const Event& e : admissible_.hb_successors(edge.src)) removed.insert(e);
  for (const Event& e : admissible_.hb_successors(edge.dst)) removed.insert(e);
  TraceGraph g = admissible_;
  for (const Event& e : removed) g = g.remove_event(e);
  return g;
}

std::optional<TraceEdge> Verifier::try_relax() {
  if (!initialized_) return std::nullopt;

  for (;;) {
    if (!candidate_) {
      for (const TraceEdge& edge : removable_edges()) {
        if (dead_edges_.count({edge.src, edge.dst})) continue;
        Candidate cand;
        cand.edge = edge;
        cand.shrunk = shrink(edge);
        auto blocked = [&](const Race& r) {
          return !cand.shrunk.contains(r.first) && !cand.shrunk.contains(r.second);
        };
        ClassSet consistent = enumerate_classes(space_.ctx(0), union_dep_, origin_schedule_,
                                                1'000'000, blocked);
        bool queued = false;
        for (auto& [key, entry] : consistent.classes) {
          cand.required.insert(key);
          if (!explored_.count(key)) {
            directed_.push_back(entry.schedule);
            queued = true;
          }
        }
        candidate_ = std::move(cand);
        if (queued) return std::nullopt; // explore those classes first
        break;
      }
      if (!candidate_) return std::nullopt; // nothing removable remains
    }

    bool any_unsafe = false;
    bool all_explored = true;
    for (const ClassKey& key : candidate_->required) {
      auto it = explored_.find(key);
      if (it == explored_.end()) all_explored = false;
      else if (!it->second.safe_all_inputs) any_unsafe = true;
    }
    if (any_unsafe) {
      // the guarding constraint is pinned for good (buggy class behind it)
      dead_edges_.insert({candidate_->edge.src, candidate_->edge.dst});
      directed_.clear();
      candidate_.reset();
      continue;
    }
    if (!all_explored) return std::nullopt;

    TraceEdge removed = candidate_->edge;
    TraceGraph next = candidate_->shrunk;
    next.set_attested_classes(explored_.size());
    if (!is_prefix_of(next, admissible_))
      throw std::logic_error("relaxation would not publish a strict prefix");
    admissible_ = next;
    record_linearization_states(admissible_);
    published_.push_back(Publish{explored_.size(), admissible_, removed});
    directed_.clear();
    candidate_.reset();
    return removed;
  }
}

void Verifier::record_linearization_states(const TraceGraph& prefix) {
  // feasible only at desk scale; larger prefixes rely on the class argument
  constexpr size_t kMaxLinearizations = 4096;
  for (size_t i = 0; i < space_.size(); i++) {
    try {
      for (const Execution& lin : linearizations(prefix, space_.ctx(i), kMaxLinearizations)) {
        auto st = space_.ctx(i).replay_state(lin.schedule());
        if (st) proven_safe_.insert(st->fingerprint());
      }
    } catch (const std::runtime_error&) {
      // ceiling hit: skip state-level bookkeeping for this input
    }
  }
}

size_t Verifier::per_input_class_count(size_t input_idx) const {
  DepMatrix dep = DepMatrix::from_ctx(space_.ctx(input_idx));
  std::set<ClassKey> keys;
  for (const auto& [key, rec] : explored_) {
    (void)key;
    keys.insert(class_key(rec.events, dep));
  }
  return keys.size();
}

void Verifier::run(size_t class_budget,
                   const std::function<void(size_t, size_t, bool, size_t)>& on_step,
                   const std::function<void(const Publish&)>& on_publish) {
  init();
  if (on_publish) on_publish(published_.back());
  size_t step = 0;
  if (on_step) on_step(step, explored_.size(), true, admissible_.constraint_count());
  while (!finished_ && explored_.size() < class_budget) {
    if (auto removed = try_relax()) {
      if (on_publish) on_publish(published_.back());
      continue;
    }
    if (!verify_step()) break;
    step++;
    bool last_safe = true;
    // the most recent record is the one just explored; find it via worklist back
    if (!worklist_.empty()) {
      auto exec = space_.ctx(0).replay(worklist_.back());
      if (exec) {
        auto it = explored_.find(class_key(exec->events, union_dep_));
        if (it != explored_.end()) last_safe = it->second.safe_all_inputs;
      }
    }
    if (on_step) on_step(step, explored_.size(), last_safe, admissible_.constraint_count());
  }
  // a final relax may have become provable on the last step
  while (auto removed = try_relax()) {
    if (on_publish) on_publish(published_.back());
  }
}

} // namespace relsched
