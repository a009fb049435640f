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

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "../src/bench.hpp"
#include "../src/corpus.hpp"
#include "../src/verifier.hpp"

namespace fs = std::filesystem;
using namespace relsched;

namespace {

int cmd_verify(const std::string& program_path, const std::string& strategy,
               const std::string& out_dir, size_t budget) {
  Program program = Program::load_file(program_path);
  fs::create_directories(out_dir);
  Verifier verifier(program, strategy_from_name(strategy));

  size_t file_idx = 0;
  auto on_publish = [&](const Verifier::Publish& pub) {
    std::ostringstream name;
    name << "prefix_" << std::setw(3) << std::setfill('0') << file_idx++ << ".txt";
    fs::path path = fs::path(out_dir) / name.str();
    pub.prefix.save_file(path.string());
    std::cout << "publish file=" << path.string() << " classes=" << pub.classes_at_publish
              << " constraints=" << pub.prefix.constraint_count() << "\n";
  };
  auto on_step = [&](size_t step, size_t classes, bool safe, size_t constraints) {
    std::cout << "step=" << step << " classes=" << classes << " safe=" << (safe ? "true" : "false")
              << " constraints=" << constraints << "\n";
  };

  try {
    verifier.run(budget, on_step, on_publish);
  } catch (const NoCorrectTrace& e) {
    std::cerr << "error: no correct trace: " << e.what() << "\n";
    return 2;
  }
  std::cout << (verifier.finished() ? "finished" : "budget-exhausted")
            << " classes=" << verifier.classes_explored()
            << " ladder=" << verifier.published().size() << "\n";
  return 0;
}

int cmd_run(const std::string& program_path, const std::string& prefix_path,
            const std::string& input_text, size_t runs, const std::string& wait, bool log,
            uint64_t fuzz_seed, bool fuzz) {
  Program program = Program::load_file(program_path);
  InputState input = input_text.empty() ? program.default_input() : program.parse_input(input_text);

  TraceGraph prefix = TraceGraph::load_file(prefix_path);
  // events of the prefix must belong to the program
  ProgramCtx probe(program, input);
  for (const Event& e : prefix.events()) {
    if (e.thread >= program.thread_count() || e.index >= probe.stream_length(e.thread))
      throw SchemaError("prefix event " + e.str() + " does not belong to program '" +
                        program.name + "'");
  }

  RunOptions opts;
  opts.policy = wait_policy_from_name(wait);
  opts.keep_log = log;
  opts.fuzz = fuzz;
  opts.fuzz_seed = fuzz_seed;

  bool violated = false;
  bool watchdog = false;
  for (size_t r = 0; r < runs; r++) {
    PrefixSlot slot(prefix);
    ExecutionReport rep = execute(program, input, slot, opts);
    std::cout << rep.wall_ns << "\n";
    if (log) {
      for (const EventLogEntry& e : rep.log)
        std::cout << "gen=" << e.gen << " t=" << e.thread << " k=" << e.index
                  << " wait_ns=" << e.wait_ns << "\n";
    }
    violated = violated || rep.any_violation;
    watchdog = watchdog || rep.watchdog_fired;
  }
  if (watchdog) {
    std::cerr << "error: deadlock watchdog fired\n";
    return 3;
  }
  return violated ? 1 : 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  BenchConfig config = BenchConfig::load_file(config_path);
  BenchResult result = run_bench(config, &std::cerr);
  fs::create_directories(out_dir);

  std::ofstream raw(fs::path(out_dir) / "raw.csv");
  write_raw_csv(result, config.benchmark, raw);
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  write_summary_csv(result, summary);

  write_summary_csv(result, std::cout);
  return result.any_violation ? 1 : 0;
}

int cmd_gen(const std::string& name, int threads, const std::string& out_path, bool all) {
  if (all) {
    fs::create_directories(out_path);
    for (const std::string& n : corpus_names()) {
      fs::path p = fs::path(out_path) / (n + ".json");
      std::ofstream out(p);
      out << corpus_program_json(n);
      std::cout << p.string() << "\n";
    }
    return 0;
  }
  std::string text;
  if (name == "indexer" && threads > 0) text = make_indexer_json(threads);
  else if (name == "last_zero" && threads > 0) text = make_last_zero_json(threads);
  else text = corpus_program_json(name);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-by-trace verification and constrained execution of finite "
               "concurrent programs"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "explore traces and emit a shrinking prefix ladder");
  std::string v_program, v_strategy = "dfs-default", v_out = "out";
  size_t v_budget = SIZE_MAX;
  verify->add_option("program", v_program, "program JSON file")->required();
  verify->add_option("--strategy", v_strategy, "dfs-default|horizontal|vertical|round-robin|early-wait");
  verify->add_option("--out", v_out, "output directory for prefix files")->required();
  verify->add_option("--budget", v_budget, "stop after this many explored classes");

  auto* run = app.add_subcommand("run", "execute a program under an enforced trace prefix");
  std::string r_program, r_prefix, r_input, r_wait = "busy";
  size_t r_runs = 1;
  bool r_log = false;
  uint64_t r_fuzz = 0;
  run->add_option("program", r_program, "program JSON file")->required();
  run->add_option("--prefix", r_prefix, "trace-prefix file")->required();
  run->add_option("--input", r_input, "input binding, e.g. x=0,y=0 (default: first input)");
  run->add_option("--runs", r_runs, "number of runs");
  run->add_option("--wait", r_wait, "busy|yield|block");
  run->add_flag("--log", r_log, "print one line per event");
  auto* fuzz_opt = run->add_option("--delay-fuzz", r_fuzz, "seed for randomized per-event delays");

  auto* bench = app.add_subcommand("bench", "timing ladder per the experiment protocol");
  std::string b_config, b_out = ".";
  bench->add_option("--config", b_config, "bench config JSON")->required();
  bench->add_option("--out", b_out, "output directory for raw.csv and summary.csv");

  auto* gen = app.add_subcommand("gen", "emit benchmark program documents");
  std::string g_name, g_out;
  int g_threads = 0;
  bool g_all = false;
  gen->add_option("--name", g_name, "benchmark name");
  gen->add_option("--threads", g_threads, "thread count (indexer, last_zero)");
  gen->add_option("-o,--out", g_out, "output file or directory (default stdout)");
  gen->add_flag("--all", g_all, "write the whole corpus into the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(v_program, v_strategy, v_out, v_budget);
    if (run->parsed())
      return cmd_run(r_program, r_prefix, r_input, r_runs, r_wait, r_log, r_fuzz,
                     fuzz_opt->count() > 0);
    if (bench->parsed()) return cmd_bench(b_config, b_out);
    if (gen->parsed()) return cmd_gen(g_name, g_threads, g_out, g_all);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
