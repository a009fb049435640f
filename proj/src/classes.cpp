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

#include "classes.hpp"

#include <algorithm>
#include <stdexcept>

namespace relsched {

void DepMatrix::init_layout(const std::vector<uint32_t>& lengths) {
  base_.resize(lengths.size() + 1);
  size_t acc = 0;
  for (size_t t = 0; t < lengths.size(); t++) {
    base_[t] = acc;
    acc += lengths[t];
  }
  base_[lengths.size()] = acc;
  n_ = acc;
  bits_.assign(n_ * n_, 0);
}

DepMatrix DepMatrix::from_ctx(const ProgramCtx& ctx) {
  DepMatrix m;
  ThreadId n = ctx.program().thread_count();
  std::vector<uint32_t> lengths(n);
  for (ThreadId t = 0; t < n; t++) lengths[t] = ctx.stream_length(t);
  m.init_layout(lengths);
  for (ThreadId t1 = 0; t1 < n; t1++) {
    for (uint32_t k1 = 0; k1 < lengths[t1]; k1++) {
      for (ThreadId t2 = 0; t2 < n; t2++) {
        for (uint32_t k2 = 0; k2 < lengths[t2]; k2++) {
          if (dependent(ctx, Event{t1, k1}, Event{t2, k2}))
            m.bits_[m.gid(Event{t1, k1}) * m.n_ + m.gid(Event{t2, k2})] = 1;
        }
      }
    }
  }
  return m;
}

DepMatrix DepMatrix::from_union(const InputSpace& space) {
  DepMatrix m;
  ThreadId n = space.program().thread_count();
  std::vector<uint32_t> lengths(n, 0);
  for (size_t i = 0; i < space.size(); i++)
    for (ThreadId t = 0; t < n; t++)
      lengths[t] = std::max(lengths[t], space.ctx(i).stream_length(t));
  m.init_layout(lengths);
  for (size_t i = 0; i < space.size(); i++) {
    const ProgramCtx& ctx = space.ctx(i);
    for (ThreadId t1 = 0; t1 < n; t1++) {
      for (uint32_t k1 = 0; k1 < ctx.stream_length(t1); k1++) {
        for (ThreadId t2 = 0; t2 < n; t2++) {
          for (uint32_t k2 = 0; k2 < ctx.stream_length(t2); k2++) {
            if (dependent(ctx, Event{t1, k1}, Event{t2, k2}))
              m.bits_[m.gid(Event{t1, k1}) * m.n_ + m.gid(Event{t2, k2})] = 1;
          }
        }
      }
    }
  }
  return m;
}

uint64_t ClassKey::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [a, b] : oriented) {
    uint64_t v = (static_cast<uint64_t>(a.thread) << 48) ^ (static_cast<uint64_t>(a.index) << 32) ^
                 (static_cast<uint64_t>(b.thread) << 16) ^ b.index;
    h = (h ^ v) * 0x100000001b3ull;
  }
  return h;
}

ClassKey class_key(const std::vector<Event>& events, const DepMatrix& dep) {
  ClassKey key;
  for (size_t i = 0; i < events.size(); i++) {
    for (size_t j = i + 1; j < events.size(); j++) {
      if (events[i].thread == events[j].thread) continue;
      if (dep(events[i], events[j])) key.oriented.emplace_back(events[i], events[j]);
    }
  }
  std::sort(key.oriented.begin(), key.oriented.end());
  return key;
}

namespace {

// happens-before clocks: clk[i][t] = number of events of thread t that
// happen before or at position i
std::vector<std::vector<uint32_t>> hb_clocks(const std::vector<Event>& events,
                                             const DepMatrix& dep) {
  ThreadId T = dep.thread_count();
  size_t n = events.size();
  std::vector<std::vector<uint32_t>> clk(n, std::vector<uint32_t>(T, 0));
  std::vector<int64_t> last_of(T, -1);
  for (size_t i = 0; i < n; i++) {
    ThreadId t = events[i].thread;
    if (last_of[t] >= 0) clk[i] = clk[static_cast<size_t>(last_of[t])];
    for (size_t k = 0; k < i; k++) {
      if (events[k].thread == t) continue;
      if (!dep(events[k], events[i])) continue;
      for (ThreadId x = 0; x < T; x++) clk[i][x] = std::max(clk[i][x], clk[k][x]);
    }
    clk[i][t] = events[i].index + 1;
    last_of[t] = static_cast<int64_t>(i);
  }
  return clk;
}

inline bool hb_before(const std::vector<std::vector<uint32_t>>& clk,
                      const std::vector<Event>& events, size_t i, size_t j) {
  return clk[j][events[i].thread] >= events[i].index + 1;
}

} // namespace

std::vector<Race> detect_races(const std::vector<Event>& events, const DepMatrix& dep,
                               const ProgramCtx* ctx) {
  auto clk = hb_clocks(events, dep);
  std::vector<Race> races;
  auto is_lock = [&](const Event& e) {
    return ctx && e.index < ctx->stream_length(e.thread) &&
           ctx->instr_at(e.thread, e.index).op == Instr::Op::Lock;
  };
  for (size_t i = 0; i < events.size(); i++) {
    for (size_t j = i + 1; j < events.size(); j++) {
      if (events[i].thread == events[j].thread) continue;
      if (!dep(events[i], events[j])) continue;
      bool immediate = true;
      for (size_t k = i + 1; k < j && immediate; k++) {
        if (hb_before(clk, events, i, k) && hb_before(clk, events, k, j)) immediate = false;
      }
      if (!immediate && is_lock(events[i]) && is_lock(events[j]) &&
          ctx->cell_at(events[i].thread, events[i].index) ==
              ctx->cell_at(events[j].thread, events[j].index)) {
        // adjacent acquisitions of one mutex: no third acquisition in between
        bool adjacent = true;
        for (size_t k = i + 1; k < j && adjacent; k++) {
          if (is_lock(events[k]) && ctx->cell_at(events[k].thread, events[k].index) ==
                                        ctx->cell_at(events[i].thread, events[i].index))
            adjacent = false;
        }
        immediate = adjacent;
      }
      if (immediate) races.push_back(Race{i, j, events[i], events[j]});
    }
  }
  return races;
}

namespace {

// completes `schedule` with `remaining` events in order, skipping past
// temporarily blocked ones; false when stuck
bool complete_in_order(const ProgramCtx& ctx, std::vector<ThreadId>& schedule,
                       std::vector<Event> remaining) {
  auto st = ctx.replay_state(schedule);
  if (!st) return false;
  ProgramState s = std::move(*st);
  while (!remaining.empty()) {
    bool progressed = false;
    for (size_t i = 0; i < remaining.size(); i++) {
      ThreadId t = remaining[i].thread;
      if (remaining[i].index != s.events[t]) continue;
      if (!ctx.thread_enabled(s, t)) continue;
      ctx.step(s, t);
      schedule.push_back(t);
      remaining.erase(remaining.begin() + static_cast<long>(i));
      progressed = true;
      break;
    }
    if (!progressed) return false;
  }
  return true;
}

} // namespace

std::vector<std::vector<ThreadId>> reverse_race(const Execution& exec, const Race& race,
                                                const DepMatrix& dep, const ProgramCtx& ctx) {
  const auto& u = exec.events;
  auto clk = hb_clocks(u, dep);

  std::vector<ThreadId> prefix;
  for (size_t k = 0; k < race.i; k++) prefix.push_back(u[k].thread);

  std::vector<Event> mid, after;
  for (size_t k = race.i + 1; k < race.j; k++) {
    if (hb_before(clk, u, race.i, k)) after.push_back(u[k]);
    else mid.push_back(u[k]);
  }

  std::vector<ThreadId> direct = prefix;
  for (const Event& e : mid) direct.push_back(e.thread);
  direct.push_back(race.second.thread);
  direct.push_back(race.first.thread);
  std::vector<Event> rest = after;
  for (size_t k = race.j + 1; k < u.size(); k++) rest.push_back(u[k]);

  if (ctx.replay_state(direct)) {
    std::vector<ThreadId> full = direct;
    if (complete_in_order(ctx, full, rest)) return {full};
  }

  // blocked reversal (lock acquisition order): branch to every enabled thread
  // at the reversal point and let the in-order completion sort the rest out
  std::vector<std::vector<ThreadId>> out;
  std::vector<ThreadId> base = prefix;
  for (const Event& e : mid) base.push_back(e.thread);
  auto st = ctx.replay_state(base);
  if (!st) return out;
  for (ThreadId t : ctx.enabled_threads(*st)) {
    if (t == race.first.thread) continue;
    std::vector<ThreadId> cand = base;
    cand.push_back(t);
    ProgramState probe = *st;
    ctx.step(probe, t);
    std::vector<Event> remaining;
    for (const Event& e : u)
      if (e.index >= probe.events[e.thread]) remaining.push_back(e);
    if (complete_in_order(ctx, cand, remaining)) out.push_back(std::move(cand));
  }
  return out;
}

ClassSet enumerate_classes(const ProgramCtx& ctx, const DepMatrix& dep,
                           const std::vector<ThreadId>& seed, size_t ceiling,
                           const std::function<bool(const Race&)>& race_allowed) {
  ClassSet result;
  std::vector<std::vector<ThreadId>> work;

  auto try_add = [&](const std::vector<ThreadId>& schedule) -> bool {
    auto exec = ctx.replay(schedule);
    if (!exec) return false;
    ClassKey key = class_key(exec->events, dep);
    auto [it, fresh] = result.classes.emplace(key, ClassSet::Entry{schedule, exec->events});
    if (fresh && result.classes.size() > ceiling)
      throw std::runtime_error("class enumeration exceeded ceiling of " + std::to_string(ceiling));
    return fresh;
  };

  if (try_add(seed)) work.push_back(seed);
  while (!work.empty()) {
    std::vector<ThreadId> schedule = std::move(work.back());
    work.pop_back();
    auto exec = ctx.replay(schedule);
    for (const Race& r : detect_races(exec->events, dep, &ctx)) {
      if (race_allowed && !race_allowed(r)) continue;
      for (auto& cand : reverse_race(*exec, r, dep, ctx)) {
        if (try_add(cand)) work.push_back(std::move(cand));
      }
    }
  }
  return result;
}

std::vector<ThreadId> sequential_schedule(const ProgramCtx& ctx) {
  std::vector<ThreadId> schedule;
  ProgramState s = ctx.initial_state();
  for (;;) {
    bool progressed = false;
    for (ThreadId t = 0; t < ctx.program().thread_count() && !progressed; t++) {
      while (ctx.thread_enabled(s, t)) {
        ctx.step(s, t);
        schedule.push_back(t);
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return schedule;
}

} // namespace relsched
