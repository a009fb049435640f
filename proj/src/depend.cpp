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

#include "depend.hpp"

#include <algorithm>
#include <stdexcept>

namespace relsched {

bool dependent(const ProgramCtx& ctx, Event a, Event b) {
  if (a.index >= ctx.stream_length(a.thread) || b.index >= ctx.stream_length(b.thread))
    return false;
  if (ctx.cell_at(a.thread, a.index) != ctx.cell_at(b.thread, b.index)) return false;
  return ctx.instr_at(a.thread, a.index).writes() || ctx.instr_at(b.thread, b.index).writes();
}

InputSpace::InputSpace(const Program& program, size_t ceiling) : program_(&program) {
  for (InputState& in : program.enumerate_inputs(ceiling))
    ctxs_.emplace_back(program, std::move(in));

  // atom vocabulary for weakest-constraint synthesis
  const auto& ptrs = program.ptr_inputs();
  for (size_t i = 0; i < ptrs.size(); i++) {
    for (size_t j = i + 1; j < ptrs.size(); j++) {
      const std::string& p = program.inputs[static_cast<size_t>(ptrs[i])].name;
      const std::string& q = program.inputs[static_cast<size_t>(ptrs[j])].name;
      vocabulary_.push_back({ConstraintAtom::Op::Eq, p, true, q, 0});
      vocabulary_.push_back({ConstraintAtom::Op::Ne, p, true, q, 0});
    }
  }
  for (size_t i = 0; i < program.inputs.size(); i++) {
    const InputDecl& d = program.inputs[i];
    if (d.kind != InputDecl::Kind::Int) continue;
    for (int64_t c : d.domain) {
      vocabulary_.push_back({ConstraintAtom::Op::Eq, d.name, false, "", c});
      vocabulary_.push_back({ConstraintAtom::Op::Ne, d.name, false, "", c});
      vocabulary_.push_back({ConstraintAtom::Op::Lt, d.name, false, "", c});
    }
    for (size_t j = i + 1; j < program.inputs.size(); j++) {
      if (program.inputs[j].kind != InputDecl::Kind::Int) continue;
      vocabulary_.push_back({ConstraintAtom::Op::Eq, d.name, true, program.inputs[j].name, 0});
      vocabulary_.push_back({ConstraintAtom::Op::Ne, d.name, true, program.inputs[j].name, 0});
    }
  }
}

int InputSpace::index_of(const InputState& in) const {
  for (size_t i = 0; i < ctxs_.size(); i++)
    if (ctxs_[i].input() == in) return static_cast<int>(i);
  return -1;
}

std::optional<PathConstraint> InputSpace::symbolic_dependent(Event a, Event b) const {
  auto key = std::make_pair(std::min(a, b), std::max(a, b));
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  std::vector<bool> dep(ctxs_.size());
  for (size_t i = 0; i < ctxs_.size(); i++) dep[i] = dependent(ctxs_[i], a, b);
  auto result = synthesize(dep);
  cache_.emplace(key, result);
  return result;
}

std::optional<PathConstraint> InputSpace::synthesize(const std::vector<bool>& dep) const {
  if (std::none_of(dep.begin(), dep.end(), [](bool d) { return d; })) return std::nullopt;

  auto eval_set = [&](const PathConstraint& c) {
    std::vector<bool> sat(ctxs_.size());
    for (size_t i = 0; i < ctxs_.size(); i++) sat[i] = c.eval(*program_, ctxs_[i].input());
    return sat;
  };

  // strongest conjunction true on every dependent input
  std::vector<ConstraintAtom> atoms;
  for (const ConstraintAtom& a : vocabulary_) {
    PathConstraint single({a});
    bool on_all = true;
    for (size_t i = 0; i < ctxs_.size() && on_all; i++)
      if (dep[i] && !single.eval(*program_, ctxs_[i].input())) on_all = false;
    if (on_all) atoms.push_back(a);
  }
  PathConstraint cand(atoms);
  if (eval_set(cand) != dep)
    throw std::runtime_error("dependence of events not expressible as a conjunction of "
                             "supported path-constraint atoms");

  // drop atoms while the satisfying set stays exact, leaving a weakest form
  std::vector<ConstraintAtom> kept = cand.atoms();
  for (size_t i = 0; i < kept.size();) {
    std::vector<ConstraintAtom> trial = kept;
    trial.erase(trial.begin() + static_cast<long>(i));
    PathConstraint pc(trial);
    if (eval_set(pc) == dep) kept = pc.atoms();
    else i++;
  }
  return PathConstraint(kept);
}

bool InputSpace::union_dependent(Event a, Event b) const {
  for (const ProgramCtx& c : ctxs_)
    if (dependent(c, a, b)) return true;
  return false;
}

namespace {

void enumerate_rec(const ProgramCtx& ctx, ProgramState& s, std::vector<Event>& events,
                   std::vector<Execution>& out, std::optional<size_t> limit, size_t ceiling) {
  if (limit && out.size() >= *limit) return;
  std::vector<ThreadId> enabled = ctx.enabled_threads(s);
  if (enabled.empty()) {
    Execution e;
    e.initial = ctx.input();
    e.events = events;
    e.terminal = true;
    out.push_back(std::move(e));
    if (out.size() > ceiling)
      throw std::runtime_error("execution enumeration exceeded ceiling of " +
                               std::to_string(ceiling));
    return;
  }
  for (ThreadId t : enabled) {
    ProgramState saved = s;
    uint32_t k = s.events[t];
    ctx.step(s, t);
    events.push_back(Event{t, k});
    enumerate_rec(ctx, s, events, out, limit, ceiling);
    events.pop_back();
    s = std::move(saved);
  }
}

} // namespace

std::vector<Execution> enumerate_executions(const ProgramCtx& ctx, std::optional<size_t> limit,
                                            size_t ceiling) {
  if (limit && *limit < 1) throw std::invalid_argument("enumeration limit must be >= 1");
  std::vector<Execution> out;
  ProgramState s = ctx.initial_state();
  std::vector<Event> events;
  enumerate_rec(ctx, s, events, out, limit, ceiling);
  return out;
}

} // namespace relsched
