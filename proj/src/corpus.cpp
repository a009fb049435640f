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

#include "corpus.hpp"

#include <stdexcept>

#include <json.hpp>

namespace relsched {

using nlohmann::json;

namespace {

json instr(std::initializer_list<std::pair<std::string, std::string>> fields) {
  json j;
  for (const auto& [k, v] : fields) j[k] = v;
  return j;
}

json shared_var(const std::string& name, int64_t init = 0, uint32_t size = 1) {
  json j;
  j["name"] = name;
  j["init"] = init;
  if (size != 1) j["size"] = size;
  return j;
}

std::string fig1_example() {
  json j;
  j["name"] = "fig1_example";
  j["inputs"] = {{{"name", "x"}, {"kind", "ptr"}}, {{"name", "y"}, {"kind", "ptr"}}};
  j["shared"] = json::array();
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "read"}, {"reg", "a"}, {"loc", "*x"}}),
      instr({{"op", "write"}, {"loc", "*x"}, {"value", "a + 1"}}),
      instr({{"op", "assert"}, {"loc", "*x"}, {"pred", "val == a + 1"}}),
  });
  j["threads"].push_back({
      instr({{"op", "read"}, {"reg", "b"}, {"loc", "*y"}}),
      instr({{"op", "write"}, {"loc", "*y"}, {"value", "b + 1"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::string bigshot() {
  json j;
  j["name"] = "bigshot";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("s"), shared_var("v")};
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "s"}, {"value", "7"}}),
      instr({{"op", "write"}, {"loc", "v"}, {"value", "1"}}),
  });
  j["threads"].push_back({
      instr({{"op", "read"}, {"reg", "r"}, {"loc", "v"}}),
      instr({{"op", "assert"}, {"loc", "s"}, {"pred", "r != 1 || val == 7"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

// one-shot flag protocol: a thread increments the critical counter only when
// it saw the other flag down; the store-buffer-free cycle argument makes
// double entry impossible, so the counter never exceeds 1
std::string dekker() {
  json j;
  j["name"] = "dekker";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("f1"), shared_var("f2"), shared_var("c")};
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "f1"}, {"value", "1"}}),
      instr({{"op", "read"}, {"reg", "a"}, {"loc", "f2"}}),
      instr({{"op", "rmw"}, {"reg", "o"}, {"loc", "c"}, {"value", "o + (a == 0 ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "a != 0 || val <= 1"}}),
  });
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "f2"}, {"value", "1"}}),
      instr({{"op", "read"}, {"reg", "b"}, {"loc", "f1"}}),
      instr({{"op", "rmw"}, {"reg", "p"}, {"loc", "c"}, {"value", "p + (b == 0 ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "b != 0 || val <= 1"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::string peterson() {
  json j;
  j["name"] = "peterson";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("f1"), shared_var("f2"), shared_var("turn"), shared_var("c")};
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "f1"}, {"value", "1"}}),
      instr({{"op", "write"}, {"loc", "turn"}, {"value", "2"}}),
      instr({{"op", "read"}, {"reg", "a"}, {"loc", "f2"}}),
      instr({{"op", "read"}, {"reg", "u"}, {"loc", "turn"}}),
      instr({{"op", "rmw"}, {"reg", "o"}, {"loc", "c"},
             {"value", "o + ((a == 0 || u == 1) ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "(a != 0 && u != 1) || val <= 1"}}),
  });
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "f2"}, {"value", "1"}}),
      instr({{"op", "write"}, {"loc", "turn"}, {"value", "1"}}),
      instr({{"op", "read"}, {"reg", "b"}, {"loc", "f1"}}),
      instr({{"op", "read"}, {"reg", "w"}, {"loc", "turn"}}),
      instr({{"op", "rmw"}, {"reg", "p"}, {"loc", "c"},
             {"value", "p + ((b == 0 || w == 2) ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "(b != 0 && w != 2) || val <= 1"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

// fast-mutex style collision detection: enter only when no competitor is
// visible at all; crossing announcements make double entry a cycle
std::string lamport() {
  json j;
  j["name"] = "lamport";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("ch1"), shared_var("ch2"), shared_var("n1"), shared_var("n2"),
                 shared_var("c")};
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "ch1"}, {"value", "1"}}),
      instr({{"op", "write"}, {"loc", "n1"}, {"value", "1"}}),
      instr({{"op", "read"}, {"reg", "b"}, {"loc", "ch2"}}),
      instr({{"op", "read"}, {"reg", "d"}, {"loc", "n2"}}),
      instr({{"op", "rmw"}, {"reg", "o"}, {"loc", "c"},
             {"value", "o + ((b == 0 && d == 0) ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "(b != 0 || d != 0) || val <= 1"}}),
  });
  j["threads"].push_back({
      instr({{"op", "write"}, {"loc", "ch2"}, {"value", "1"}}),
      instr({{"op", "write"}, {"loc", "n2"}, {"value", "1"}}),
      instr({{"op", "read"}, {"reg", "e"}, {"loc", "ch1"}}),
      instr({{"op", "read"}, {"reg", "g"}, {"loc", "n1"}}),
      instr({{"op", "rmw"}, {"reg", "p"}, {"loc", "c"},
             {"value", "p + ((e == 0 && g == 0) ? 1 : 0)"}}),
      instr({{"op", "assert"}, {"loc", "c"}, {"pred", "(e != 0 || g != 0) || val <= 1"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::string fibonacci() {
  json j;
  j["name"] = "fibonacci";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("i", 1), shared_var("jv", 1)};
  json t1 = json::array();
  json t2 = json::array();
  for (int r = 0; r < 4; r++) {
    t1.push_back(instr({{"op", "read"}, {"reg", "b"}, {"loc", "jv"}}));
    t1.push_back(instr({{"op", "rmw"}, {"reg", "o"}, {"loc", "i"}, {"value", "o + b"}}));
    t2.push_back(instr({{"op", "read"}, {"reg", "e"}, {"loc", "i"}}));
    t2.push_back(instr({{"op", "rmw"}, {"reg", "p"}, {"loc", "jv"}, {"value", "p + e"}}));
  }
  // perfectly alternating additions reach fib(9)=34 and fib(10)=55
  t1.push_back(instr({{"op", "assert"}, {"loc", "i"}, {"pred", "val <= 34"}}));
  t2.push_back(instr({{"op", "assert"}, {"loc", "jv"}, {"pred", "val <= 55"}}));
  j["threads"] = {t1, t2};
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::string shared_pointer() {
  json j;
  j["name"] = "shared_pointer";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("m"), shared_var("rc", 1), shared_var("d")};
  j["threads"] = json::array();
  j["threads"].push_back({
      instr({{"op", "lock"}, {"loc", "m"}}),
      instr({{"op", "rmw"}, {"reg", "o"}, {"loc", "rc"}, {"value", "o + 1"}}),
      instr({{"op", "unlock"}, {"loc", "m"}}),
      instr({{"op", "read"}, {"reg", "x"}, {"loc", "d"}}),
      instr({{"op", "lock"}, {"loc", "m"}}),
      instr({{"op", "rmw"}, {"reg", "o2"}, {"loc", "rc"}, {"value", "o2 - 1"}}),
      instr({{"op", "unlock"}, {"loc", "m"}}),
      instr({{"op", "assert"}, {"loc", "rc"}, {"pred", "val >= 1 && val <= 3"}}),
  });
  j["threads"].push_back({
      instr({{"op", "lock"}, {"loc", "m"}}),
      instr({{"op", "rmw"}, {"reg", "q"}, {"loc", "rc"}, {"value", "q + 1"}}),
      instr({{"op", "unlock"}, {"loc", "m"}}),
      instr({{"op", "write"}, {"loc", "d"}, {"value", "42"}}),
      instr({{"op", "lock"}, {"loc", "m"}}),
      instr({{"op", "rmw"}, {"reg", "q2"}, {"loc", "rc"}, {"value", "q2 - 1"}}),
      instr({{"op", "unlock"}, {"loc", "m"}}),
      instr({{"op", "assert"}, {"loc", "rc"}, {"pred", "val >= 1 && val <= 3"}}),
  });
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

json write_slot(int64_t w) {
  int64_t slot = (w * 7) % 128;
  json j;
  j["op"] = "write";
  j["loc"] = "table[" + std::to_string(slot) + "]";
  j["value"] = std::to_string(w);
  return j;
}

} // namespace

std::string make_indexer_json(int threads) {
  if (threads < 2 || threads > 15)
    throw std::invalid_argument("indexer supports 2..15 threads");
  int spokes = std::max(0, std::min(threads - 3, 12));
  json j;
  j["name"] = "indexer";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("table", 0, 128)};
  j["threads"] = json::array();

  // thread 0 is the overflow inserter: its message values wrap around the
  // table modulus, landing on the first slot of each spoke thread
  json hub = json::array();
  for (int s = 1; s <= spokes; s++) {
    hub.push_back(write_slot(112 + (s - 1))); // private filler
    hub.push_back(write_slot(128 + 8 * (s - 1)));
  }
  j["threads"].push_back(hub);

  for (int t = 1; t < threads; t++) {
    json jt = json::array();
    for (int m = 0; m < 8; m++) jt.push_back(write_slot(8 * (t - 1) + m));
    j["threads"].push_back(jt);
  }
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::string make_last_zero_json(int threads) {
  if (threads < 2 || threads > 32)
    throw std::invalid_argument("last_zero supports 2..32 threads");
  json j;
  j["name"] = "last_zero";
  j["inputs"] = json::array();
  j["shared"] = {shared_var("a", 0, static_cast<uint32_t>(threads))};
  j["threads"] = json::array();

  json reader = json::array();
  for (int k = threads - 1; k >= 1; k--)
    reader.push_back(instr({{"op", "read"}, {"reg", "r"}, {"loc", "a[" + std::to_string(k) + "]"}}));
  reader.push_back(instr({{"op", "assert"}, {"loc", "a[0]"}, {"pred", "val == 0"}}));
  j["threads"].push_back(reader);

  for (int t = 1; t < threads; t++) {
    j["threads"].push_back(json::array({
        instr({{"op", "read"}, {"reg", "p"}, {"loc", "a[" + std::to_string(t - 1) + "]"}}),
        instr({{"op", "write"}, {"loc", "a[" + std::to_string(t) + "]"}, {"value", "p + 1"}}),
    }));
  }
  j["assertions"] = json::array();
  return j.dump(2) + "\n";
}

std::vector<std::string> corpus_names() {
  return {"bigshot",        "dekker",  "fibonacci", "lamport", "peterson",
          "shared_pointer", "indexer", "last_zero", "fig1_example"};
}

std::string corpus_program_json(const std::string& name) {
  if (name == "fig1_example") return fig1_example();
  if (name == "bigshot") return bigshot();
  if (name == "dekker") return dekker();
  if (name == "peterson") return peterson();
  if (name == "lamport") return lamport();
  if (name == "fibonacci") return fibonacci();
  if (name == "shared_pointer") return shared_pointer();
  if (name == "indexer") return make_indexer_json(15);
  if (name == "last_zero") return make_last_zero_json(16);
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

} // namespace relsched
