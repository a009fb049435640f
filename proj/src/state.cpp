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

#include "state.hpp"

namespace relsched {

namespace {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

} // namespace

uint64_t ProgramState::fingerprint() const {
  uint64_t h = 0x2545f4914f6cdd1dull;
  auto fold = [&h](uint64_t v) { h = mix64(h ^ v); };
  for (int64_t v : mem) fold(static_cast<uint64_t>(v));
  for (uint32_t v : pc) fold(v);
  for (uint32_t v : events) fold(v + 0x1000000ull);
  for (int64_t v : regs) fold(static_cast<uint64_t>(v) + 0x2000000ull);
  for (uint8_t v : violated) fold(v + 0x3000000ull);
  return h;
}

ProgramCtx::ProgramCtx(const Program& program, InputState input)
    : program_(&program), input_(std::move(input)) {
  ThreadId n = program.thread_count();
  stream_.resize(n);
  cells_.resize(n);
  reg_base_.resize(n);
  Expr::EvalCtx gctx;
  gctx.inputs = input_.values().data();
  for (ThreadId t = 0; t < n; t++) {
    reg_base_[t] = total_regs_;
    total_regs_ += static_cast<uint32_t>(program.register_count(t));
    for (uint32_t i = 0; i < program.threads[t].size(); i++) {
      const Instr& ins = program.threads[t][i];
      if (ins.has_guard && ins.guard.eval(gctx) == 0) continue;
      stream_[t].push_back(i);
      cells_[t].push_back(program.cell_of(ins.loc, input_));
    }
  }
}

ProgramState ProgramCtx::initial_state() const {
  ProgramState s;
  s.mem.assign(program_->cell_count(), 0);
  for (size_t i = 0; i < program_->shared.size(); i++) {
    uint32_t base = program_->shared_base(static_cast<int32_t>(i));
    for (uint32_t k = 0; k < program_->shared[i].size; k++)
      s.mem[base + k] = program_->shared[i].init;
  }
  ThreadId n = program_->thread_count();
  s.pc.assign(n, 0);
  s.events.assign(n, 0);
  s.regs.assign(total_regs_, 0);
  s.violated.assign(n, 0);
  return s;
}

StepResult ProgramCtx::step(ProgramState& s, ThreadId t) const {
  uint32_t k = s.events[t];
  if (k >= stream_length(t)) return StepResult::Terminal;
  const Instr& ins = instr_at(t, k);
  uint32_t cell = cells_[t][k];

  Expr::EvalCtx ctx;
  ctx.regs = s.regs.data() + reg_base_[t];
  ctx.inputs = input_.values().data();
  ctx.shared = s.mem.data();

  switch (ins.op) {
    case Instr::Op::Read:
      s.regs[reg_base_[t] + static_cast<uint32_t>(ins.reg)] = s.mem[cell];
      break;
    case Instr::Op::Write:
      s.mem[cell] = ins.value.eval(ctx);
      break;
    case Instr::Op::Rmw: {
      int64_t old = s.mem[cell];
      s.regs[reg_base_[t] + static_cast<uint32_t>(ins.reg)] = old;
      // the value expression sees the old value through the destination reg
      s.mem[cell] = ins.value.eval(ctx);
      break;
    }
    case Instr::Op::AssertRead: {
      ctx.read_val = s.mem[cell];
      if (ins.pred.eval(ctx) == 0) s.violated[t] = 1;
      break;
    }
    case Instr::Op::Lock:
      if (s.mem[cell] != 0) return StepResult::Blocked;
      s.mem[cell] = 1;
      break;
    case Instr::Op::Unlock:
      s.mem[cell] = 0;
      break;
  }
  s.pc[t] = stream_[t][k] + 1;
  s.events[t] = k + 1;
  return StepResult::Ok;
}

bool ProgramCtx::thread_enabled(const ProgramState& s, ThreadId t) const {
  uint32_t k = s.events[t];
  if (k >= stream_length(t)) return false;
  const Instr& ins = instr_at(t, k);
  if (ins.op == Instr::Op::Lock && s.mem[cells_[t][k]] != 0) return false;
  return true;
}

bool ProgramCtx::all_terminal(const ProgramState& s) const {
  for (ThreadId t = 0; t < program_->thread_count(); t++)
    if (!thread_terminal(s, t)) return false;
  return true;
}

std::vector<ThreadId> ProgramCtx::enabled_threads(const ProgramState& s) const {
  std::vector<ThreadId> out;
  for (ThreadId t = 0; t < program_->thread_count(); t++)
    if (thread_enabled(s, t)) out.push_back(t);
  return out;
}

bool ProgramCtx::error_free(const ProgramState& s) const {
  for (uint8_t v : s.violated)
    if (v) return false;
  Expr::EvalCtx ctx;
  ctx.shared = s.mem.data();
  for (const Expr& a : program_->global_assertions)
    if (a.eval(ctx) == 0) return false;
  return true;
}

std::optional<Execution> ProgramCtx::replay(const std::vector<ThreadId>& schedule) const {
  ProgramState s = initial_state();
  Execution exec;
  exec.initial = input_;
  exec.events.reserve(schedule.size());
  for (ThreadId t : schedule) {
    uint32_t k = s.events[t];
    if (step(s, t) != StepResult::Ok) return std::nullopt;
    exec.events.push_back(Event{t, k});
  }
  // terminal when no thread can take another step (all done or all blocked)
  exec.terminal = enabled_threads(s).empty();
  return exec;
}

std::optional<ProgramState> ProgramCtx::replay_state(const std::vector<ThreadId>& schedule) const {
  ProgramState s = initial_state();
  for (ThreadId t : schedule)
    if (step(s, t) != StepResult::Ok) return std::nullopt;
  return s;
}

size_t ProgramCtx::total_events() const {
  size_t n = 0;
  for (const auto& st : stream_) n += st.size();
  return n;
}

} // namespace relsched
