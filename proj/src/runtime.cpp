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

#include "runtime.hpp"

#include <algorithm>
#include <condition_variable>
#include <thread>

namespace relsched {

PrefixSlot::PrefixSlot(TraceGraph initial)
    : current_(std::make_shared<const TraceGraph>(std::move(initial))) {}

std::shared_ptr<const TraceGraph> PrefixSlot::snapshot(uint64_t* generation) const {
  std::lock_guard<std::mutex> lk(mu_);
  if (generation) *generation = generation_.load(std::memory_order_relaxed);
  return current_;
}

void PrefixSlot::replace(TraceGraph next) {
  std::lock_guard<std::mutex> lk(mu_);
  if (!is_prefix_of(next, *current_))
    throw std::invalid_argument("prefix replacement must be a strict prefix of the current one");
  current_ = std::make_shared<const TraceGraph>(std::move(next));
  generation_.fetch_add(1, std::memory_order_release);
}

WaitPolicy wait_policy_from_name(const std::string& name) {
  if (name == "busy") return WaitPolicy::Busy;
  if (name == "yield") return WaitPolicy::Yield;
  if (name == "block") return WaitPolicy::Block;
  throw std::invalid_argument("unknown wait policy '" + name + "' (busy|yield|block)");
}

namespace {

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#else
  std::this_thread::yield();
#endif
}

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void spin_ns(uint64_t ns) {
  auto until = std::chrono::steady_clock::now() + std::chrono::nanoseconds(ns);
  while (std::chrono::steady_clock::now() < until) cpu_relax();
}

constexpr uint32_t kSpinBudget = 10'000; // spins before yielding (Yield policy)

struct Shared {
  const Program& program;
  const InputState& input;
  const ProgramCtx& ctx;
  PrefixSlot& slot;
  const RunOptions& opts;
  std::unique_ptr<std::atomic<int64_t>[]> mem;
  VectorClock clock;
  std::atomic<uint64_t> stamps{0};
  std::atomic<uint64_t> ticks{0}; // progress heartbeat for watchdog/block
  std::atomic<bool> abort{false};
  std::atomic<bool> violated{false};
  std::mutex block_mu;
  std::condition_variable block_cv;

  Shared(const Program& p, const InputState& in, const ProgramCtx& c, PrefixSlot& s,
         const RunOptions& o)
      : program(p), input(in), ctx(c), slot(s), opts(o),
        mem(new std::atomic<int64_t>[p.cell_count() ? p.cell_count() : 1]),
        clock(p.thread_count()) {
    ProgramState init = c.initial_state();
    for (size_t i = 0; i < init.mem.size(); i++)
      mem[i].store(init.mem[i], std::memory_order_seq_cst);
  }

  void progress() {
    ticks.fetch_add(1, std::memory_order_release);
    if (opts.policy == WaitPolicy::Block) block_cv.notify_all();
  }
};

struct Gate {
  ThreadId src_thread;
  uint64_t need; // src index + 1
};

struct EventGating {
  bool in_prefix = false;
  std::vector<Gate> gates; // active incoming cross edges only
};

std::vector<EventGating> prepare_gating(const Shared& sh, ThreadId t,
                                        const TraceGraph& prefix) {
  std::vector<EventGating> table(sh.ctx.stream_length(t));
  for (uint32_t k = 0; k < table.size(); k++) {
    Event e{t, k};
    table[k].in_prefix = prefix.contains(e);
    if (!table[k].in_prefix) continue; // outside the prefix: runs free
    for (const TraceEdge& ed : prefix.edges()) {
      if (!(ed.dst == e) || ed.src.thread == t) continue;
      if (!ed.label.eval(sh.program, sh.input)) continue;
      table[k].gates.push_back(Gate{ed.src.thread, ed.src.index + 1});
    }
  }
  return table;
}

struct WorkerResult {
  std::vector<EventLogEntry> log;
  uint64_t waits = 0;
  bool aborted = false;
};

template <bool kInstrumented>
void worker_body(Shared& sh, ThreadId t, WorkerResult& res) {
  const ProgramCtx& ctx = sh.ctx;
  const uint32_t len = ctx.stream_length(t);
  std::vector<int64_t> regs(sh.program.register_count(t), 0);
  uint64_t rng = sh.opts.fuzz_seed * 0x9e3779b97f4a7c15ull + t + 1;

  uint64_t my_gen = 0;
  std::vector<EventGating> gating;
  if constexpr (kInstrumented) {
    auto snap = sh.slot.snapshot(&my_gen);
    gating = prepare_gating(sh, t, *snap);
    if (sh.opts.keep_log) res.log.reserve(len);
  }

  Expr::EvalCtx ectx;
  ectx.regs = regs.data();
  ectx.inputs = sh.input.values().data();
  ectx.shared = nullptr; // thread expressions never touch shared cells directly

  for (uint32_t k = 0; k < len; k++) {
    const Instr& ins = ctx.instr_at(t, k);
    uint32_t cell = ctx.cell_at(t, k);

    if (sh.opts.fuzz && (splitmix64(rng) & 1)) spin_ns(splitmix64(rng) % 10'000);

    uint64_t wait_ns = 0;
    if constexpr (kInstrumented) {
      // permit(): wait until every active cross predecessor has signaled
      uint32_t spins = 0;
      bool waited = false;
      std::chrono::steady_clock::time_point wait_start;
      for (;;) {
        uint64_t g = sh.slot.generation();
        if (g != my_gen) {
          auto snap = sh.slot.snapshot(&my_gen);
          gating = prepare_gating(sh, t, *snap);
        }
        const EventGating& eg = gating[k];
        bool ready = true;
        if (eg.in_prefix) {
          for (const Gate& gate : eg.gates) {
            if (sh.clock.completed(gate.src_thread) < gate.need) {
              ready = false;
              break;
            }
          }
        }
        if (ready || sh.abort.load(std::memory_order_acquire)) break;
        if (!waited) {
          waited = true;
          res.waits++;
          wait_start = std::chrono::steady_clock::now();
        }
        switch (sh.opts.policy) {
          case WaitPolicy::Busy: cpu_relax(); break;
          case WaitPolicy::Yield:
            if (++spins < kSpinBudget) cpu_relax();
            else std::this_thread::yield();
            break;
          case WaitPolicy::Block: {
            std::unique_lock<std::mutex> lk(sh.block_mu);
            sh.block_cv.wait_for(lk, std::chrono::milliseconds(1));
            break;
          }
        }
      }
      if (waited)
        wait_ns = static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                            std::chrono::steady_clock::now() - wait_start)
                                            .count());
      if (sh.abort.load(std::memory_order_acquire)) {
        res.aborted = true;
        return;
      }
    }

    bool assert_failed = false;
    switch (ins.op) {
      case Instr::Op::Read:
        regs[static_cast<size_t>(ins.reg)] = sh.mem[cell].load(std::memory_order_seq_cst);
        break;
      case Instr::Op::Write:
        sh.mem[cell].store(ins.value.eval(ectx), std::memory_order_seq_cst);
        break;
      case Instr::Op::Rmw: {
        int64_t old = sh.mem[cell].load(std::memory_order_seq_cst);
        for (;;) {
          regs[static_cast<size_t>(ins.reg)] = old;
          int64_t next = ins.value.eval(ectx);
          if (sh.mem[cell].compare_exchange_strong(old, next, std::memory_order_seq_cst)) break;
        }
        break;
      }
      case Instr::Op::AssertRead: {
        ectx.read_val = sh.mem[cell].load(std::memory_order_seq_cst);
        if (ins.pred.eval(ectx) == 0) {
          assert_failed = true;
          sh.violated.store(true, std::memory_order_seq_cst);
        }
        break;
      }
      case Instr::Op::Lock: {
        uint32_t spins = 0;
        for (;;) {
          int64_t expected = 0;
          if (sh.mem[cell].compare_exchange_strong(expected, 1, std::memory_order_seq_cst)) break;
          if (sh.abort.load(std::memory_order_acquire)) {
            res.aborted = true;
            return;
          }
          if (sh.opts.policy == WaitPolicy::Yield && ++spins >= kSpinBudget)
            std::this_thread::yield();
          else cpu_relax();
        }
        break;
      }
      case Instr::Op::Unlock:
        sh.mem[cell].store(0, std::memory_order_seq_cst);
        break;
    }

    if constexpr (kInstrumented) {
      // the seq_cst access above is ordered before this stamp and signal
      uint64_t stamp = sh.stamps.fetch_add(1, std::memory_order_seq_cst);
      if (sh.opts.keep_log)
        res.log.push_back(EventLogEntry{stamp, my_gen, t, k, wait_ns, assert_failed});
      else if (assert_failed)
        res.log.push_back(EventLogEntry{stamp, my_gen, t, k, wait_ns, true});
      sh.clock.signal(Event{t, k});
      sh.progress();
    } else if (assert_failed) {
      res.log.push_back(EventLogEntry{0, 0, t, k, 0, true});
    }
  }
}

} // namespace

bool permitted(const Program& program, const InputState& input, const TraceGraph& prefix,
               const Event& event, const std::vector<uint64_t>& completed) {
  if (!prefix.contains(event)) return true;
  for (const TraceEdge& ed : prefix.edges()) {
    if (!(ed.dst == event) || ed.src.thread == event.thread) continue;
    if (!ed.label.eval(program, input)) continue;
    if (completed[ed.src.thread] < ed.src.index + 1) return false;
  }
  return true;
}

ExecutionReport execute(const Program& program, const InputState& input, PrefixSlot& slot,
                        const RunOptions& options) {
  ProgramCtx ctx(program, input);
  Shared sh(program, input, ctx, slot, options);
  ThreadId n = program.thread_count();

  ExecutionReport report;
  report.executed.initial = input;
  if (n == 0) {
    report.error_free.push_back(1);
    report.executed.terminal = true;
    return report;
  }

  std::vector<WorkerResult> results(n);

  // watchdog: firing means enforcement deadlocked, which the progress
  // property rules out for verifier-published prefixes
  std::mutex done_mu;
  std::condition_variable done_cv;
  bool done = false;
  std::thread watchdog([&] {
    uint64_t last = sh.ticks.load(std::memory_order_acquire);
    auto last_change = std::chrono::steady_clock::now();
    std::unique_lock<std::mutex> lk(done_mu);
    for (;;) {
      if (done_cv.wait_for(lk, std::chrono::milliseconds(20), [&] { return done; })) return;
      uint64_t now_ticks = sh.ticks.load(std::memory_order_acquire);
      auto now = std::chrono::steady_clock::now();
      if (now_ticks != last) {
        last = now_ticks;
        last_change = now;
      } else if (now - last_change > options.watchdog) {
        report.watchdog_fired = true;
        sh.abort.store(true, std::memory_order_release);
        sh.block_cv.notify_all();
        return;
      }
    }
  });

  auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<std::thread> workers;
    workers.reserve(n);
    for (ThreadId t = 0; t < n; t++) {
      workers.emplace_back([&, t] {
        if (options.instrumented) worker_body<true>(sh, t, results[t]);
        else worker_body<false>(sh, t, results[t]);
      });
    }
    for (auto& w : workers) w.join();
  }
  auto t1 = std::chrono::steady_clock::now();
  {
    std::lock_guard<std::mutex> lk(done_mu);
    done = true;
  }
  done_cv.notify_all();
  watchdog.join();

  report.wall_ns = static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());

  for (ThreadId t = 0; t < n; t++) {
    report.waits += results[t].waits;
    for (EventLogEntry& e : results[t].log) report.log.push_back(e);
  }
  std::sort(report.log.begin(), report.log.end(),
            [](const EventLogEntry& a, const EventLogEntry& b) { return a.stamp < b.stamp; });

  for (const EventLogEntry& e : report.log) {
    report.executed.events.push_back(Event{e.thread, e.index});
    report.generations_seen.push_back(e.gen);
    if (e.assert_failed) report.any_violation = true;
  }
  std::sort(report.generations_seen.begin(), report.generations_seen.end());
  report.generations_seen.erase(
      std::unique(report.generations_seen.begin(), report.generations_seen.end()),
      report.generations_seen.end());
  if (sh.violated.load()) report.any_violation = true;

  // per-state error flags from the physical assert outcomes along the
  // stamped order (global assertions are a model-layer concern)
  report.error_free.assign(report.log.size() + 1, 1);
  bool bad = false;
  for (size_t i = 0; i < report.log.size(); i++) {
    if (report.log[i].assert_failed) bad = true;
    if (bad) report.error_free[i + 1] = 0;
  }

  bool complete = true;
  for (ThreadId t = 0; t < n; t++)
    if (results[t].aborted) complete = false;
  report.executed.terminal = complete && !report.watchdog_fired;
  return report;
}

bool audit_adherence(const Program& program, const InputState& input,
                     const std::vector<std::shared_ptr<const TraceGraph>>& generations,
                     const ExecutionReport& report) {
  std::vector<uint64_t> done(program.thread_count(), 0);
  for (const EventLogEntry& e : report.log) {
    if (e.gen >= generations.size()) return false;
    const TraceGraph& g = *generations[e.gen];
    Event ev{e.thread, e.index};
    if (g.contains(ev)) {
      for (const TraceEdge& ed : g.edges()) {
        if (!(ed.dst == ev) || ed.src.thread == ev.thread) continue;
        if (!ed.label.eval(program, input)) continue;
        if (done[ed.src.thread] < ed.src.index + 1) return false;
      }
    }
    if (done[e.thread] != e.index) return false; // per-thread order must hold
    done[e.thread] = e.index + 1;
  }
  return true;
}

} // namespace relsched
