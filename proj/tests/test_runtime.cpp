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

#include <doctest.h>

#include <thread>

#include <json.hpp>

#include "corpus.hpp"
#include "runtime.hpp"
#include "verifier.hpp"

using namespace relsched;

namespace {

struct Fig1 {
  Program p;
  InputSpace space;
  InputState ali;
  InputState dis;
  Fig1()
      : p(Program::load(corpus_program_json("fig1_example"))), space(p),
        ali(p.parse_input("x=0,y=0")), dis(p.parse_input("x=0,y=1")) {}

  TraceGraph fig2() const {
    auto exec = space.ctx(static_cast<size_t>(space.index_of(ali))).replay({0, 0, 0, 1, 1});
    return TraceGraph::build(*exec, space, "fig2");
  }
};

} // namespace

TEST_CASE("permit thresholds against the vector clock") {
  Fig1 f;
  TraceGraph g = f.fig2();

  // (T2,0) waits for (T1,1): completed[0] must reach 2
  CHECK(permitted(f.p, f.ali, g, Event{1, 0}, {2, 0}));
  CHECK_FALSE(permitted(f.p, f.ali, g, Event{1, 0}, {1, 0}));

  // minimal events proceed regardless of the clock
  CHECK(permitted(f.p, f.ali, g, Event{0, 0}, {0, 0}));
  CHECK(permitted(f.p, f.ali, g, Event{0, 2}, {2, 0}));

  // inactive constraints (distinct pointers) never gate
  CHECK(permitted(f.p, f.dis, g, Event{1, 0}, {0, 0}));

  // events outside the prefix run free
  TraceGraph shrunk = g.remove_event(Event{1, 1}).remove_event(Event{0, 2});
  CHECK(permitted(f.p, f.ali, shrunk, Event{1, 1}, {0, 0}));
}

TEST_CASE("signal semantics: increments, per-thread order") {
  VectorClock clock(2);
  CHECK(clock.completed(0) == 0);
  clock.signal(Event{0, 0});
  CHECK(clock.completed(0) == 1);
  CHECK(clock.completed(1) == 0);
  clock.signal(Event{0, 1});
  clock.signal(Event{0, 2});
  CHECK(clock.completed(0) == 3);
}

TEST_CASE("concurrent signals from distinct threads never lose updates") {
  constexpr size_t kThreads = 16;
  constexpr uint32_t kEvents = 10'000;
  VectorClock clock(kThreads);
  std::vector<std::thread> workers;
  for (size_t t = 0; t < kThreads; t++) {
    workers.emplace_back([&clock, t] {
      for (uint32_t k = 0; k < kEvents; k++) clock.signal(Event{static_cast<ThreadId>(t), k});
    });
  }
  for (auto& w : workers) w.join();
  for (size_t t = 0; t < kThreads; t++)
    CHECK(clock.completed(static_cast<ThreadId>(t)) == kEvents);
}

TEST_CASE("fig2 prefix under adversarial delays: no violations, order enforced") {
  Fig1 f;
  TraceGraph g = f.fig2();

  RunOptions opts;
  opts.keep_log = true;
  opts.fuzz = true;
  for (int run = 0; run < 1000; run++) {
    opts.fuzz_seed = static_cast<uint64_t>(run) + 1;
    PrefixSlot slot(g);
    ExecutionReport rep = execute(f.p, f.ali, slot, opts);
    REQUIRE_FALSE(rep.watchdog_fired);
    CHECK_FALSE(rep.any_violation);
    for (uint8_t ok : rep.error_free) CHECK(ok == 1);

    // stamped order always has (T1,1) before (T2,0)
    size_t pos_w = 0, pos_r = 0;
    for (size_t i = 0; i < rep.executed.events.size(); i++) {
      if (rep.executed.events[i] == Event{0, 1}) pos_w = i;
      if (rep.executed.events[i] == Event{1, 0}) pos_r = i;
    }
    CHECK(pos_w < pos_r);
    CHECK(audit_adherence(f.p, f.ali, {std::make_shared<const TraceGraph>(g)}, rep));
  }
}

TEST_CASE("unconstrained and inactive prefixes run without waits") {
  Fig1 f;

  RunOptions opts;
  opts.keep_log = true;
  SUBCASE("empty prefix") {
    PrefixSlot slot{TraceGraph()};
    ExecutionReport rep = execute(f.p, f.ali, slot, opts);
    CHECK(rep.waits == 0);
    CHECK(rep.executed.events.size() == 5);
  }
  SUBCASE("fig2 with distinct pointers") {
    PrefixSlot slot(f.fig2());
    ExecutionReport rep = execute(f.p, f.dis, slot, opts);
    CHECK(rep.waits == 0);
    CHECK_FALSE(rep.any_violation);
  }
}

TEST_CASE("prefix slot rejects non-shrinking replacements") {
  Fig1 f;
  TraceGraph g = f.fig2();
  PrefixSlot slot(g);
  CHECK_THROWS_AS(slot.replace(g), std::invalid_argument); // identical: not strict
  TraceGraph grown(
      {Event{0, 0}, Event{0, 1}, Event{0, 2}, Event{1, 0}, Event{1, 1}, Event{1, 2}}, {});
  CHECK_THROWS_AS(slot.replace(grown), std::invalid_argument);

  slot.replace(g.remove_event(Event{1, 1}).remove_event(Event{0, 2}));
  CHECK(slot.generation() == 1);
}

TEST_CASE("mid-run relaxation: generations stay monotone and runs complete") {
  // wide program so the relaxer lands mid-run: T0 writes a long private
  // column, T1's only event is gated on T0's last write
  const char* text = R"({
    "name": "column", "inputs": [],
    "shared": [{"name": "col", "init": 0, "size": 256}, {"name": "x", "init": 0}],
    "threads": [[], []]
  })";
  nlohmann::json j = nlohmann::json::parse(text);
  for (int k = 0; k < 256; k++)
    j["threads"][0].push_back({{"op", "write"}, {"loc", "col[" + std::to_string(k) + "]"},
                               {"value", "1"}});
  j["threads"][0].push_back({{"op", "write"}, {"loc", "x"}, {"value", "1"}});
  j["threads"][1].push_back({{"op", "read"}, {"reg", "r"}, {"loc", "x"}});
  Program p = Program::load(j.dump());
  InputSpace space(p);
  auto exec = space.ctx(0).replay(sequential_schedule(space.ctx(0)));
  TraceGraph full = TraceGraph::build(*exec, space, "column");
  REQUIRE(full.constraint_count() == 1);

  TraceGraph mid = full.remove_event(Event{1, 0});
  TraceGraph empty = mid;
  for (const Event& e : mid.events()) empty = empty.remove_event(e);

  for (int run = 0; run < 100; run++) {
    PrefixSlot slot(full);
    RunOptions opts;
    opts.keep_log = true;
    opts.fuzz = true;
    opts.fuzz_seed = static_cast<uint64_t>(run) + 1;
    opts.policy = run % 2 ? WaitPolicy::Block : WaitPolicy::Busy;

    ExecutionReport rep;
    std::thread runner([&] { rep = execute(p, p.default_input(), slot, opts); });
    std::thread relaxer([&] {
      std::this_thread::sleep_for(std::chrono::microseconds(200));
      slot.replace(mid);
      std::this_thread::sleep_for(std::chrono::microseconds(200));
      slot.replace(empty);
    });
    runner.join();
    relaxer.join();

    REQUIRE_FALSE(rep.watchdog_fired);
    CHECK(rep.executed.events.size() == 258);
    // per-worker generation monotonicity: entries of one thread ordered by
    // stamp must carry non-decreasing generations
    std::vector<uint64_t> last_gen(p.thread_count(), 0);
    for (const EventLogEntry& e : rep.log) {
      CHECK(e.gen >= last_gen[e.thread]);
      last_gen[e.thread] = e.gen;
    }
    auto snaps = std::vector<std::shared_ptr<const TraceGraph>>{
        std::make_shared<const TraceGraph>(full), std::make_shared<const TraceGraph>(mid),
        std::make_shared<const TraceGraph>(empty)};
    CHECK(audit_adherence(p, p.default_input(), snaps, rep));
  }
}

TEST_CASE("watchdog never fires across the corpus under all wait policies") {
  for (const std::string& name : corpus_names()) {
    Program p = Program::load(corpus_program_json(name));
    Verifier v(p, StrategyKind::DfsDefault);
    v.init();
    TraceGraph prefix = v.admissible();
    for (WaitPolicy policy : {WaitPolicy::Busy, WaitPolicy::Yield, WaitPolicy::Block}) {
      RunOptions opts;
      opts.policy = policy;
      for (int run = 0; run < 20; run++) {
        PrefixSlot slot(prefix);
        ExecutionReport rep = execute(p, p.default_input(), slot, opts);
        REQUIRE_FALSE(rep.watchdog_fired);
        CHECK_FALSE(rep.any_violation);
      }
    }
  }
}

TEST_CASE("lock programs execute correctly under enforcement") {
  Program p = Program::load(corpus_program_json("shared_pointer"));
  Verifier v(p, StrategyKind::DfsDefault);
  v.init();
  RunOptions opts;
  opts.keep_log = true;
  opts.fuzz = true;
  for (int run = 0; run < 200; run++) {
    opts.fuzz_seed = static_cast<uint64_t>(run) + 1;
    PrefixSlot slot(v.admissible());
    ExecutionReport rep = execute(p, p.default_input(), slot, opts);
    REQUIRE_FALSE(rep.watchdog_fired);
    CHECK_FALSE(rep.any_violation);
  }
}

TEST_CASE("execution reports carry wall time and input") {
  Fig1 f;
  PrefixSlot slot(f.fig2());
  RunOptions opts;
  opts.keep_log = true;
  ExecutionReport rep = execute(f.p, f.ali, slot, opts);
  CHECK(rep.wall_ns > 0);
  CHECK(rep.executed.initial == f.ali);
  CHECK(rep.executed.terminal);
  CHECK(rep.error_free.size() == 6);
}
