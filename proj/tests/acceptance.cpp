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

// End-to-end acceptance suite. Each criterion runs standalone and prints one
// pass/fail line; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "bench.hpp"
#include "corpus.hpp"
#include "random_programs.hpp"
#include "verifier.hpp"

using namespace relsched;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define EXPECT(cond, msg)                                                                \
  do {                                                                                   \
    if (!(cond)) throw CheckFailure(std::string(msg) + " [" #cond "]");                  \
  } while (0)

Program load_fig1() { return Program::load(corpus_program_json("fig1_example")); }

TraceGraph fig2_graph(const Program& p, const InputSpace& space) {
  int ali = space.index_of(p.parse_input("x=0,y=0"));
  auto exec = space.ctx(static_cast<size_t>(ali)).replay({0, 0, 0, 1, 1});
  return TraceGraph::build(*exec, space, "fig2");
}

// ---------------------------------------------------------------- criterion 1
void fig2_reproduction(std::ostream& log) {
  Program p = load_fig1();
  InputSpace space(p);
  TraceGraph g = fig2_graph(p, space);
  EXPECT(g.events().size() == 5, "fig2 must hold all five events");
  EXPECT(g.edges().size() == 2, "fig2 must have exactly two cross edges");
  EXPECT(g.edges()[0].src == (Event{0, 1}) && g.edges()[0].dst == (Event{1, 0}),
         "first edge must be (T1,1) -> (T2,0)");
  EXPECT(g.edges()[1].src == (Event{0, 2}) && g.edges()[1].dst == (Event{1, 1}),
         "second edge must be (T1,2) -> (T2,1)");
  EXPECT(g.edges()[0].label.str() == "x == y" && g.edges()[1].label.str() == "x == y",
         "both edges must carry the aliasing constraint");
  log << "two edges, both labeled x == y";
}

// ---------------------------------------------------------------- criterion 2
void bug_exposure_vs_protection(std::ostream& log) {
  Program p = load_fig1();
  InputState ali = p.parse_input("x=0,y=0");
  ProgramCtx ctx(p, ali);

  size_t violating = 0;
  auto execs = enumerate_executions(ctx);
  EXPECT(execs.size() == 10, "fig1 aliased must have 10 interleavings");
  for (const Execution& e : execs) {
    auto end = ctx.replay_state(e.schedule());
    if (!ctx.error_free(*end)) violating++;
  }
  EXPECT(violating >= 1, "brute force must expose the assertion violation");

  InputSpace space(p);
  TraceGraph g = fig2_graph(p, space);
  RunOptions opts;
  opts.fuzz = true;
  size_t violations = 0;
  for (int run = 0; run < 10'000; run++) {
    opts.fuzz_seed = static_cast<uint64_t>(run) + 1;
    PrefixSlot slot(g);
    ExecutionReport rep = execute(p, ali, slot, opts);
    EXPECT(!rep.watchdog_fired, "watchdog must not fire");
    if (rep.any_violation) violations++;
  }
  EXPECT(violations == 0, "enforced runs must never violate the assertion");
  log << violating << "/10 interleavings violate unprotected; 0/10000 enforced runs";
}

// ---------------------------------------------------------------- criterion 3
void mazurkiewicz_count(std::ostream& log) {
  Program p = Program::load(make_indexer_json(15));
  ProgramCtx ctx(p, p.default_input());
  DepMatrix dep = DepMatrix::from_ctx(ctx);
  ClassSet classes = enumerate_classes(ctx, dep, sequential_schedule(ctx), 10000);
  EXPECT(classes.classes.size() == 4096, "indexer(15) must have exactly 4096 classes");
  log << "4096 classes";
}

// ---------------------------------------------------------------- criterion 4
void strategy_counts(std::ostream& log) {
  Program p = Program::load(make_indexer_json(15));

  // vertical: after exactly 8 classes the published prefix is the optimized
  // one (9 constraints, every edge into the single waiting thread)
  {
    Verifier v(p, StrategyKind::Vertical);
    v.run(8, nullptr, nullptr);
    const auto& pubs = v.published();
    EXPECT(v.classes_explored() == 8, "vertical budget must stop at 8 classes");
    for (const auto& pub : pubs) {
      if (pub.classes_at_publish < 8)
        EXPECT(pub.prefix.constraint_count() > 9,
               "no prefix with <= 9 constraints may publish before 8 classes");
    }
    const Verifier::Publish& last = pubs.back();
    EXPECT(last.classes_at_publish == 8, "the optimized prefix must publish at 8 classes");
    EXPECT(last.prefix.constraint_count() == 9, "the optimized prefix has 9 constraints");
    auto waiting = last.prefix.waiting_threads();
    EXPECT(waiting.size() == 1, "14 of 15 threads are constraint-free (never wait)");
    EXPECT(*waiting.begin() == 0, "only the overflow thread waits");
  }

  // horizontal: 16 classes to publish the corresponding 8-constraint prefix
  {
    Verifier v(p, StrategyKind::Horizontal);
    v.run(16, nullptr, nullptr);
    const auto& pubs = v.published();
    EXPECT(v.classes_explored() == 16, "horizontal budget must stop at 16 classes");
    for (const auto& pub : pubs) {
      if (pub.classes_at_publish < 16)
        EXPECT(pub.prefix.constraint_count() > 8,
               "no prefix with <= 8 constraints may publish before 16 classes");
    }
    const Verifier::Publish& last = pubs.back();
    EXPECT(last.classes_at_publish == 16, "the 8-constraint prefix must publish at 16 classes");
    EXPECT(last.prefix.constraint_count() == 8, "horizontal prefix has 8 constraints left");
    EXPECT(last.prefix.waiting_threads().size() == 8, "8 inserter threads still wait");
  }
  log << "vertical: 9 constraints at 8 classes; horizontal: 8 constraints at 16";
}

// ---------------------------------------------------------------- criterion 5
void progress(std::ostream& log) {
  size_t total_runs = 0;
  for (const std::string& name : corpus_names()) {
    Program p = Program::load(corpus_program_json(name));
    Verifier v(p, StrategyKind::DfsDefault);
    v.init();
    TraceGraph prefix = v.admissible();
    for (WaitPolicy policy : {WaitPolicy::Busy, WaitPolicy::Yield, WaitPolicy::Block}) {
      RunOptions opts;
      opts.policy = policy;
      PrefixSlot slot(prefix);
      for (int run = 0; run < 1000; run++) {
        ExecutionReport rep = execute(p, p.default_input(), slot, opts);
        EXPECT(!rep.watchdog_fired, "watchdog fired on " + name);
        EXPECT(!rep.any_violation, "verified prefix must be safe on " + name);
        total_runs++;
      }
    }
  }
  log << total_runs << " runs, watchdog never fired";
}

// ---------------------------------------------------------------- criterion 6
void prefix_chain_soundness(std::ostream& log) {
  // exhaustive safe(prefix) audit on the small-program corpus, against the
  // brute-force oracle: every linearization end state is proven safe and all
  // of its continuations stay error-free; adherent partials stay error-free
  size_t audited = 0;
  for (const char* name : {"fig1_example", "bigshot", "dekker"}) {
    Program p = Program::load(corpus_program_json(name));
    Verifier v(p, StrategyKind::DfsDefault);
    v.run(100000, nullptr, nullptr);
    EXPECT(v.finished(), "small programs must verify to completion");

    const auto& pubs = v.published();
    for (size_t i = 1; i < pubs.size(); i++)
      for (size_t j = 0; j < i; j++)
        EXPECT(is_prefix_of(pubs[i].prefix, pubs[j].prefix),
               "ladder must be a strict <-chain");

    for (const auto& pub : pubs) {
      for (size_t i = 0; i < v.inputs().size(); i++) {
        const ProgramCtx& ctx = v.inputs().ctx(i);

        // matched states: proven safe and exhaustively error-free
        for (const Execution& lin : linearizations(pub.prefix, ctx)) {
          auto st = ctx.replay_state(lin.schedule());
          EXPECT(st.has_value(), "linearizations must replay");
          EXPECT(v.proven_safe().count(st->fingerprint()) == 1,
                 "linearization end states must be in proven_safe");
          std::function<void(ProgramState&)> walk = [&](ProgramState& s) {
            EXPECT(ctx.error_free(s), "continuation of a safe prefix hit an error state");
            for (ThreadId t : ctx.enabled_threads(s)) {
              ProgramState saved = s;
              ctx.step(s, t);
              walk(s);
              s = std::move(saved);
            }
          };
          ProgramState s = *st;
          walk(s);
          audited++;
        }

        // adherent partials: error-free along the way
        std::function<void(ProgramState&, std::vector<Event>&)> dfs =
            [&](ProgramState& s, std::vector<Event>& acc) {
              EXPECT(ctx.error_free(s), "adherent partial hit an error state");
              for (ThreadId t : ctx.enabled_threads(s)) {
                Event next{t, s.events[t]};
                acc.push_back(next);
                if (adheres(p, ctx.input(), acc, pub.prefix)) {
                  ProgramState saved = s;
                  ctx.step(s, t);
                  dfs(s, acc);
                  s = std::move(saved);
                }
                acc.pop_back();
              }
            };
        ProgramState init = ctx.initial_state();
        std::vector<Event> acc;
        dfs(init, acc);
      }
    }
  }
  log << audited << " linearization subtrees audited";
}

// ---------------------------------------------------------------- criterion 7
void overhead_trend(std::ostream& log) {
  Program p = Program::load(make_indexer_json(15));
  InputState input = p.default_input();
  constexpr int kRuns = 300;

  auto median_of = [&](const TraceGraph* prefix, bool instrumented) {
    RunOptions opts;
    opts.instrumented = instrumented;
    opts.policy = WaitPolicy::Busy;
    std::vector<uint64_t> samples;
    PrefixSlot slot(prefix ? *prefix : TraceGraph());
    for (int r = 0; r < kRuns; r++) {
      ExecutionReport rep = execute(p, input, slot, opts);
      EXPECT(!rep.watchdog_fired, "watchdog during timing run");
      samples.push_back(rep.wall_ns);
    }
    return median_ns(std::move(samples));
  };

  Verifier hor(p, StrategyKind::Horizontal);
  hor.init();
  Verifier ver(p, StrategyKind::Vertical);
  ver.init();

  uint64_t baseline = median_of(nullptr, false);
  TraceGraph empty;
  uint64_t zero = median_of(&empty, true);
  TraceGraph hfull = hor.admissible();
  uint64_t full_h = median_of(&hfull, true);
  TraceGraph vfull = ver.admissible();
  uint64_t full_v = median_of(&vfull, true);

  log << "baseline=" << baseline / 1000 << "us zero=" << zero / 1000
      << "us full_horizontal=" << full_h / 1000 << "us full_vertical=" << full_v / 1000 << "us";

  EXPECT(full_h >= 2 * zero,
         "full-constraint busy-wait median must be at least twice the 0-constraint median");
  EXPECT(full_v < full_h,
         "the optimized (vertical) prefix must run faster than the unoptimized one");
  EXPECT(zero < 2 * baseline, "signal-only instrumentation must stay below 2x baseline");
}

// ---------------------------------------------------------------- criterion 8
void oracle_equivalence(std::ostream& log) {
  // literal recursive definitions, built on remove()
  std::function<bool(const Program&, const InputState&, const std::vector<Event>&, size_t,
                     const TraceGraph&)>
      adheres_rec = [&](const Program& p, const InputState& in, const std::vector<Event>& ev,
                        size_t pos, const TraceGraph& g) -> bool {
    if (pos == ev.size()) return true;
    if (!g.contains(ev[pos])) return false;
    for (const TraceEdge& ed : g.edges())
      if (ed.dst == ev[pos] && ed.label.eval(p, in)) return false;
    return adheres_rec(p, in, ev, pos + 1, g.remove_event(ev[pos]));
  };

  std::mt19937 rng(808);
  size_t checks = 0;
  for (int trial = 0; trial < 500; trial++) {
    Program p = testing::random_program(rng);
    InputSpace space(p);
    const ProgramCtx& base = space.ctx(trial % space.size());
    auto execs = enumerate_executions(base);
    TraceGraph g = TraceGraph::build(execs[trial % execs.size()], space);

    for (size_t i = 0; i < space.size(); i++) {
      const ProgramCtx& ctx = space.ctx(i);
      auto all = enumerate_executions(ctx);
      size_t stride = std::max<size_t>(1, all.size() / 16);
      size_t matching = 0;
      for (size_t k = 0; k < all.size(); k++) {
        const Execution& e = all[k];
        bool m = matches(p, e, g);
        if (m) matching++;
        if (k % stride) continue;
        bool slow = adheres_rec(p, e.initial, e.events, 0, g);
        EXPECT(adheres(p, e.initial, e.events, g) == slow, "adheres must equal the oracle");
        std::vector<Event> sorted = e.events;
        std::sort(sorted.begin(), sorted.end());
        EXPECT(m == (slow && sorted == g.events()), "matches must equal the oracle");
        checks++;
      }
      EXPECT(linearizations(g, ctx).size() == matching,
             "linearizations must equal brute-force filtering");
    }
  }
  log << checks << " oracle comparisons over 500 random programs";
}

} // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    void (*run)(std::ostream&);
  };
  const Criterion criteria[] = {
      {"fig2-reproduction", fig2_reproduction},
      {"bug-exposure-vs-protection", bug_exposure_vs_protection},
      {"mazurkiewicz-count", mazurkiewicz_count},
      {"strategy-counts", strategy_counts},
      {"progress", progress},
      {"prefix-chain-soundness", prefix_chain_soundness},
      {"overhead-trend", overhead_trend},
      {"oracle-equivalence", oracle_equivalence},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (argc > 1 && std::strcmp(argv[1], c.name) != 0) continue;
    std::ostringstream detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string error;
    try {
      c.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    auto secs = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count() /
                1000.0;
    std::cout << (ok ? "PASS" : "FAIL") << " " << c.name << " (" << secs << "s)";
    if (!detail.str().empty()) std::cout << " — " << detail.str();
    if (!ok) std::cout << " — " << error;
    std::cout << std::endl;
    if (!ok) failures++;
  }
  return failures;
}
