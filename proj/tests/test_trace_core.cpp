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

#include <sstream>

#include "classes.hpp"
#include "corpus.hpp"

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

  const ProgramCtx& ali_ctx() const { return space.ctx(static_cast<size_t>(space.index_of(ali))); }
  const ProgramCtx& dis_ctx() const { return space.ctx(static_cast<size_t>(space.index_of(dis))); }

  TraceGraph fig2() const {
    auto exec = ali_ctx().replay({0, 0, 0, 1, 1});
    return TraceGraph::build(*exec, space, "fig2");
  }
};

} // namespace

TEST_CASE("fig2: canonical graph has exactly the two labeled cross edges") {
  Fig1 f;
  TraceGraph g = f.fig2();
  REQUIRE(g.events().size() == 5);
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0].src == Event{0, 1});
  CHECK(g.edges()[0].dst == Event{1, 0});
  CHECK(g.edges()[0].label.str() == "x == y");
  CHECK(g.edges()[1].src == Event{0, 2});
  CHECK(g.edges()[1].dst == Event{1, 1});
  CHECK(g.edges()[1].label.str() == "x == y");
  CHECK(g.constraints().size() == 1);
}

TEST_CASE("single-thread execution builds a graph without cross edges") {
  Fig1 f;
  // thread 1 alone: project an execution of just T2
  auto exec = f.ali_ctx().replay({1, 1});
  Execution partial = *exec;
  TraceGraph g = TraceGraph::build(partial, f.space);
  CHECK(g.events().size() == 2);
  CHECK(g.edges().empty());
}

TEST_CASE("reversed fig1 order yields the T2-before-T1 graph") {
  Fig1 f;
  auto exec = f.ali_ctx().replay({1, 1, 0, 0, 0});
  TraceGraph g = TraceGraph::build(*exec, f.space);
  // T2 runs entirely before T1, so one edge from T2's last write to T1's
  // first read carries the whole ordering after reduction
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0].src == Event{1, 1});
  CHECK(g.edges()[0].dst == Event{0, 0});
  CHECK(g.edges()[0].label.str() == "x == y");
}

TEST_CASE("remove_event follows the three-bullet definition") {
  Fig1 f;
  TraceGraph g = f.fig2();

  TraceGraph g1 = g.remove_event(Event{0, 0});
  CHECK(g1.events().size() == 4);
  CHECK(g1.edges().size() == 2); // (T1,0) carries no cross edge

  TraceGraph g2 = g.remove_event(Event{7, 7});
  CHECK(g2 == g); // absent event: identity

  TraceGraph g3 = g.remove_event(Event{0, 1});
  CHECK(g3.events().size() == 4);
  REQUIRE(g3.edges().size() == 1);
  CHECK(g3.edges()[0].src == Event{0, 2});
  // the constraint x == y still labels the surviving edge
  CHECK(g3.constraints().count(PathConstraint::parse("x == y")) == 1);
}

TEST_CASE("adheres: empty execution adheres to any graph") {
  Fig1 f;
  CHECK(adheres(f.p, f.ali, {}, f.fig2()));
  CHECK(adheres(f.p, f.ali, {}, TraceGraph()));
}

TEST_CASE("adheres: aliased execution with both edge sources first") {
  Fig1 f;
  TraceGraph g = f.fig2();
  std::vector<Event> ok{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}};
  CHECK(adheres(f.p, f.ali, ok, g));
}

TEST_CASE("adheres: aliased execution starting with T2 is blocked") {
  Fig1 f;
  TraceGraph g = f.fig2();
  std::vector<Event> bad{{1, 0}};
  CHECK_FALSE(adheres(f.p, f.ali, bad, g));
  // without aliasing the edge constraints are false in s0, so it adheres
  CHECK(adheres(f.p, f.dis, bad, g));
}

TEST_CASE("matches: exact linearization, strict prefixes, foreign events") {
  Fig1 f;
  TraceGraph g = f.fig2();
  std::vector<Event> lin{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}};
  CHECK(matches(f.p, f.ali, lin, g));

  std::vector<Event> prefix(lin.begin(), lin.end() - 1);
  CHECK(adheres(f.p, f.ali, prefix, g));
  CHECK_FALSE(matches(f.p, f.ali, prefix, g));

  TraceGraph shrunk = g.remove_event(Event{1, 1});
  CHECK_FALSE(matches(f.p, f.ali, lin, shrunk)); // (1,1) is not in E_O
}

TEST_CASE("is_prefix_of: downward-closed strict subgraphs only") {
  Fig1 f;
  TraceGraph g = f.fig2();

  TraceGraph two_removed = g.remove_event(Event{1, 1}).remove_event(Event{0, 2});
  CHECK(is_prefix_of(two_removed, g));
  CHECK_FALSE(is_prefix_of(g, g)); // strict subset required

  // dropping (0,2) but keeping its successor (1,1) violates closure
  TraceGraph bad = g.remove_event(Event{0, 2});
  CHECK_FALSE(is_prefix_of(bad, g));
}

TEST_CASE("is_prefix_of is irreflexive and transitive along removal chains") {
  Fig1 f;
  TraceGraph g = f.fig2();
  TraceGraph g1 = g.remove_event(Event{1, 1});
  TraceGraph g2 = g1.remove_event(Event{0, 2});
  TraceGraph g3 = g2.remove_event(Event{1, 0});
  CHECK(is_prefix_of(g1, g));
  CHECK(is_prefix_of(g2, g1));
  CHECK(is_prefix_of(g2, g));
  CHECK(is_prefix_of(g3, g2));
  CHECK(is_prefix_of(g3, g));
  CHECK_FALSE(is_prefix_of(g, g2));
  CHECK_FALSE(is_prefix_of(g2, g2));
}

TEST_CASE("free runs: blocked T2 first, then a maximal T1 run") {
  Fig1 f;
  TraceGraph g = f.fig2();
  const ProgramCtx& ctx = f.ali_ctx();
  ProgramState init = ctx.initial_state();

  // (T2,0) has an active incoming edge from the unexecuted (T1,1)
  auto run_from_t2 = choose_free_run(ctx, init, g, 1);
  REQUIRE(run_from_t2.size() == 3);
  CHECK(run_from_t2[0] == Event{0, 0});
  CHECK(run_from_t2[2] == Event{0, 2});

  // without aliasing both threads are fully eligible
  const ProgramCtx& dctx = f.dis_ctx();
  ProgramState dinit = dctx.initial_state();
  auto t2_run = choose_free_run(dctx, dinit, g, 1);
  REQUIRE(t2_run.size() == 2);
  CHECK(t2_run[0] == Event{1, 0});

  // an unconstrained graph makes every continuation free
  auto any_run = choose_free_run(ctx, init, TraceGraph(), 0);
  CHECK(any_run.size() == 3); // maximal single-thread run of T1
}

TEST_CASE("free runs: appended events keep the adheres-or-outside property") {
  Fig1 f;
  TraceGraph g = f.fig2();
  const ProgramCtx& ctx = f.ali_ctx();
  ProgramState s = ctx.initial_state();
  std::vector<Event> u;
  ThreadId hint = 0;
  while (true) {
    auto v = choose_free_run(ctx, s, g, hint);
    if (v.empty()) break;
    for (const Event& e : v) {
      u.push_back(e);
      REQUIRE(ctx.step(s, e.thread) == StepResult::Ok);
      CHECK((!g.contains(e) || adheres(f.p, f.ali, u, g)));
    }
    hint = static_cast<ThreadId>((v.back().thread + 1) % f.p.thread_count());
  }
  CHECK(u.size() == 5); // ran to completion
}

TEST_CASE("linearizations of fig2: two aliased, all ten unconstrained") {
  Fig1 f;
  TraceGraph g = f.fig2();
  auto ali_lins = linearizations(g, f.ali_ctx());
  CHECK(ali_lins.size() == 2);
  for (const Execution& e : ali_lins) CHECK(matches(f.p, e, g));

  auto dis_lins = linearizations(g, f.dis_ctx());
  CHECK(dis_lins.size() == 10);
}

TEST_CASE("linearizations agree with brute-force filtering") {
  Fig1 f;
  TraceGraph g = f.fig2();
  for (const ProgramCtx* ctx : {&f.ali_ctx(), &f.dis_ctx()}) {
    size_t matching = 0;
    for (const Execution& e : enumerate_executions(*ctx))
      if (matches(f.p, e, g)) matching++;
    CHECK(matching == linearizations(g, *ctx).size());
  }
}

TEST_CASE("linearization of a single-thread program is unique") {
  const char* text = R"({
    "name": "single", "inputs": [], "shared": [{"name": "x", "init": 0}],
    "threads": [[
      {"op": "write", "loc": "x", "value": "1"},
      {"op": "write", "loc": "x", "value": "2"}
    ]]
  })";
  Program p = Program::load(text);
  InputSpace space(p);
  auto exec = space.ctx(0).replay({0, 0});
  TraceGraph g = TraceGraph::build(*exec, space);
  CHECK(linearizations(g, space.ctx(0)).size() == 1);
}

TEST_CASE("trace-prefix files round-trip bit-exactly") {
  Fig1 f;
  TraceGraph g = f.fig2();
  g.set_attested_classes(2);

  std::ostringstream os1;
  g.save(os1);
  std::istringstream is(os1.str());
  TraceGraph back = TraceGraph::load(is);
  std::ostringstream os2;
  back.save(os2);
  CHECK(os1.str() == os2.str());
  CHECK(back == g);
  CHECK(back.origin() == "fig2");
  CHECK(back.attested_classes() == g.attested_classes());
}

TEST_CASE("prefix files reject edges over unknown events") {
  std::istringstream is("prefix t\nevent 0:0\nedge 0:0 -> 1:0 [true]\n");
  CHECK_THROWS_AS(TraceGraph::load(is), SchemaError);
}

TEST_CASE("fig1 aliased partitions into six classes; oracle: swap closure") {
  Fig1 f;
  const ProgramCtx& ctx = f.ali_ctx();
  DepMatrix dep = DepMatrix::from_ctx(ctx);

  ClassSet classes = enumerate_classes(ctx, dep, sequential_schedule(ctx));

  // oracle: connected components of the adjacent-independent-swap relation
  auto execs = enumerate_executions(ctx);
  std::vector<int> comp(execs.size(), -1);
  std::vector<std::vector<ThreadId>> scheds;
  for (const Execution& e : execs) scheds.push_back(e.schedule());
  int ncomp = 0;
  for (size_t i = 0; i < execs.size(); i++) {
    if (comp[i] != -1) continue;
    std::vector<size_t> stack{i};
    comp[i] = ncomp;
    while (!stack.empty()) {
      size_t cur = stack.back();
      stack.pop_back();
      const auto& ev = execs[cur].events;
      for (size_t k = 0; k + 1 < ev.size(); k++) {
        if (ev[k].thread == ev[k + 1].thread) continue;
        if (dependent(ctx, ev[k], ev[k + 1])) continue;
        std::vector<ThreadId> swapped = scheds[cur];
        std::swap(swapped[k], swapped[k + 1]);
        for (size_t other = 0; other < execs.size(); other++) {
          if (comp[other] == -1 && scheds[other] == swapped) {
            comp[other] = ncomp;
            stack.push_back(other);
          }
        }
      }
    }
    ncomp++;
  }

  CHECK(ncomp == 6);
  CHECK(classes.classes.size() == 6);

  // classes are invariant under one adjacent independent swap
  for (const auto& [key, entry] : classes.classes) {
    const auto& ev = entry.events;
    for (size_t k = 0; k + 1 < ev.size(); k++) {
      if (ev[k].thread == ev[k + 1].thread) continue;
      if (dependent(ctx, ev[k], ev[k + 1])) continue;
      std::vector<ThreadId> swapped = entry.schedule;
      std::swap(swapped[k], swapped[k + 1]);
      auto exec = ctx.replay(swapped);
      REQUIRE(exec.has_value());
      CHECK(class_key(exec->events, dep) == key);
      break;
    }
  }
}

TEST_CASE("single-thread programs have one class") {
  const char* text = R"({
    "name": "single", "inputs": [], "shared": [{"name": "x", "init": 0}],
    "threads": [[
      {"op": "write", "loc": "x", "value": "1"},
      {"op": "read", "reg": "r", "loc": "x"}
    ]]
  })";
  Program p = Program::load(text);
  ProgramCtx ctx(p, p.default_input());
  DepMatrix dep = DepMatrix::from_ctx(ctx);
  CHECK(enumerate_classes(ctx, dep, sequential_schedule(ctx)).classes.size() == 1);
}

TEST_CASE("small indexer instances have 2^races classes") {
  // threads = spokes + 3, one write-write collision per spoke
  for (int threads : {4, 5, 6}) {
    Program p = Program::load(make_indexer_json(threads));
    ProgramCtx ctx(p, p.default_input());
    DepMatrix dep = DepMatrix::from_ctx(ctx);
    size_t expect = size_t{1} << (threads - 3);
    CHECK(enumerate_classes(ctx, dep, sequential_schedule(ctx)).classes.size() == expect);
  }
}

TEST_CASE("calibrated indexer(15) has exactly 4096 Mazurkiewicz classes") {
  Program p = Program::load(make_indexer_json(15));
  ProgramCtx ctx(p, p.default_input());
  DepMatrix dep = DepMatrix::from_ctx(ctx);
  ClassSet classes = enumerate_classes(ctx, dep, sequential_schedule(ctx), 10000);
  CHECK(classes.classes.size() == 4096);
}

TEST_CASE("shared_pointer classes: reversal closure matches brute force") {
  Program p = Program::load(corpus_program_json("shared_pointer"));
  ProgramCtx ctx(p, p.default_input());
  DepMatrix dep = DepMatrix::from_ctx(ctx);

  std::set<ClassKey> brute;
  for (const Execution& e : enumerate_executions(ctx)) brute.insert(class_key(e.events, dep));
  ClassSet closure = enumerate_classes(ctx, dep, sequential_schedule(ctx));
  CHECK(closure.classes.size() == brute.size());
}
