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

#include "program.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relsched {

using nlohmann::json;

InputState::InputState(const Program& program, std::vector<int64_t> values)
    : values_(std::move(values)) {
  if (values_.size() != program.inputs.size())
    throw SchemaError("input state arity mismatch for program '" + program.name + "'");
}

bool InputState::aliased(const Program& program, const std::string& p, const std::string& q) const {
  int pi = program.input_index(p);
  int qi = program.input_index(q);
  if (pi < 0 || qi < 0) throw SchemaError("aliasing query on undeclared input");
  return values_[static_cast<size_t>(pi)] == values_[static_cast<size_t>(qi)];
}

std::string InputState::label(const Program& program) const {
  std::ostringstream os;
  for (size_t i = 0; i < program.inputs.size(); i++) {
    if (i) os << ",";
    os << program.inputs[i].name << "=" << values_[i];
  }
  return os.str();
}

namespace {

Location parse_location(const std::string& text, const Program& p) {
  if (text.empty()) throw SchemaError("empty location");
  Location loc;
  if (text[0] == '*') {
    std::string name = text.substr(1);
    int idx = p.input_index(name);
    if (idx < 0 || p.inputs[static_cast<size_t>(idx)].kind != InputDecl::Kind::Ptr)
      throw SchemaError("dereference of undeclared pointer input '" + name + "'");
    const auto& ptrs = p.ptr_inputs();
    auto it = std::find(ptrs.begin(), ptrs.end(), idx);
    loc.var = -1;
    loc.ptr = static_cast<int32_t>(it - ptrs.begin());
    return loc;
  }
  std::string name = text;
  uint32_t offset = 0;
  size_t br = text.find('[');
  if (br != std::string::npos) {
    if (text.back() != ']') throw SchemaError("malformed location '" + text + "'");
    name = text.substr(0, br);
    offset = static_cast<uint32_t>(std::stoul(text.substr(br + 1, text.size() - br - 2)));
  }
  for (size_t i = 0; i < p.shared.size(); i++) {
    if (p.shared[i].name == name) {
      if (offset >= p.shared[i].size)
        throw SchemaError("location '" + text + "' out of bounds");
      loc.var = static_cast<int32_t>(i);
      loc.offset = offset;
      return loc;
    }
  }
  throw SchemaError("undeclared shared variable '" + name + "'");
}

std::string location_str(const Location& loc, const Program& p) {
  if (loc.is_deref()) return "*" + p.inputs[static_cast<size_t>(p.ptr_inputs()[loc.ptr])].name;
  const SharedDecl& d = p.shared[static_cast<size_t>(loc.var)];
  if (d.size == 1) return d.name;
  return d.name + "[" + std::to_string(loc.offset) + "]";
}

} // namespace

class ProgramLoader {
public:
  static Program load(const json& j) {
    Program p;
    p.name = j.at("name").get<std::string>();
    for (const json& ji : j.value("inputs", json::array())) {
      InputDecl d;
      d.name = ji.at("name").get<std::string>();
      std::string kind = ji.at("kind").get<std::string>();
      if (kind == "int") {
        d.kind = InputDecl::Kind::Int;
        d.domain = ji.at("domain").get<std::vector<int64_t>>();
        if (d.domain.empty()) throw SchemaError("int input '" + d.name + "' has empty domain");
      } else if (kind == "ptr") {
        d.kind = InputDecl::Kind::Ptr;
      } else {
        throw SchemaError("unknown input kind '" + kind + "'");
      }
      p.inputs.push_back(std::move(d));
    }
    for (const json& js : j.value("shared", json::array())) {
      SharedDecl d;
      d.name = js.at("name").get<std::string>();
      d.init = js.value("init", 0);
      d.size = js.value("size", 1u);
      if (d.size == 0) throw SchemaError("shared '" + d.name + "' has size 0");
      p.shared.push_back(std::move(d));
    }
    p.finalize_layout();

    const json& jthreads = j.at("threads");
    p.threads.resize(jthreads.size());
    p.reg_names_.resize(jthreads.size());
    for (size_t t = 0; t < jthreads.size(); t++) {
      // first pass: collect register names in first-use order
      for (const json& ji : jthreads[t]) {
        if (ji.contains("reg")) {
          std::string r = ji.at("reg").get<std::string>();
          if (p.input_index(r) >= 0)
            throw SchemaError("register '" + r + "' shadows an input");
          auto& regs = p.reg_names_[t];
          if (std::find(regs.begin(), regs.end(), r) == regs.end()) regs.push_back(r);
        }
      }
      for (const json& ji : jthreads[t]) {
        p.threads[t].push_back(load_instr(ji, p, t));
      }
    }
    for (const json& ja : j.value("assertions", json::array())) {
      p.global_assertions.push_back(
          Expr::parse(ja.get<std::string>(), shared_resolver(p)));
    }
    p.validate();
    return p;
  }

  static json dump(const Program& p) {
    json j;
    j["name"] = p.name;
    j["inputs"] = json::array();
    for (const InputDecl& d : p.inputs) {
      json ji;
      ji["name"] = d.name;
      ji["kind"] = d.kind == InputDecl::Kind::Int ? "int" : "ptr";
      if (d.kind == InputDecl::Kind::Int) ji["domain"] = d.domain;
      j["inputs"].push_back(ji);
    }
    j["shared"] = json::array();
    for (const SharedDecl& d : p.shared) {
      json js;
      js["name"] = d.name;
      js["init"] = d.init;
      if (d.size != 1) js["size"] = d.size;
      j["shared"].push_back(js);
    }
    j["threads"] = json::array();
    for (size_t t = 0; t < p.threads.size(); t++) {
      json jt = json::array();
      for (const Instr& ins : p.threads[t]) jt.push_back(dump_instr(ins, p, t));
      j["threads"].push_back(jt);
    }
    j["assertions"] = json::array();
    for (const Expr& e : p.global_assertions) j["assertions"].push_back(e.text());
    return j;
  }

private:
  static Expr::Resolver thread_resolver(const Program& p, size_t t, bool allow_regs,
                                        bool inputs_only) {
    return [&p, t, allow_regs, inputs_only](const std::string& name) -> std::pair<Expr::Sym, int64_t> {
      if (allow_regs && !inputs_only) {
        const auto& regs = p.reg_names_[t];
        auto it = std::find(regs.begin(), regs.end(), name);
        if (it != regs.end())
          return {Expr::Sym::Reg, it - regs.begin()};
      }
      int ii = p.input_index(name);
      if (ii >= 0) {
        if (p.inputs[static_cast<size_t>(ii)].kind == InputDecl::Kind::Ptr)
          throw SchemaError("pointer input '" + name + "' used as a value");
        return {Expr::Sym::Input, ii};
      }
      if (inputs_only)
        throw SchemaError("guard references non-input '" + name + "'");
      throw SchemaError("undeclared name '" + name + "' in expression");
    };
  }

  static Expr::Resolver shared_resolver(const Program& p) {
    return [&p](const std::string& name) -> std::pair<Expr::Sym, int64_t> {
      Location loc = parse_location(name, p);
      if (loc.is_deref()) throw SchemaError("global assertion cannot dereference inputs");
      return {Expr::Sym::Shared, p.shared_base(loc.var) + loc.offset};
    };
  }

  static Instr load_instr(const json& ji, Program& p, size_t t) {
    Instr ins;
    std::string op = ji.at("op").get<std::string>();
    ins.loc = parse_location(ji.at("loc").get<std::string>(), p);
    auto reg_slot = [&](const std::string& r) {
      const auto& regs = p.reg_names_[t];
      return static_cast<int32_t>(std::find(regs.begin(), regs.end(), r) - regs.begin());
    };
    if (op == "read") {
      ins.op = Instr::Op::Read;
      ins.reg = reg_slot(ji.at("reg").get<std::string>());
    } else if (op == "write") {
      ins.op = Instr::Op::Write;
      ins.value = Expr::parse(ji.at("value").get<std::string>(), thread_resolver(p, t, true, false));
    } else if (op == "rmw") {
      ins.op = Instr::Op::Rmw;
      ins.reg = reg_slot(ji.at("reg").get<std::string>());
      ins.value = Expr::parse(ji.at("value").get<std::string>(), thread_resolver(p, t, true, false));
    } else if (op == "assert") {
      ins.op = Instr::Op::AssertRead;
      ins.pred = Expr::parse(ji.at("pred").get<std::string>(), thread_resolver(p, t, true, false));
    } else if (op == "lock") {
      ins.op = Instr::Op::Lock;
    } else if (op == "unlock") {
      ins.op = Instr::Op::Unlock;
    } else {
      throw SchemaError("unknown instruction op '" + op + "'");
    }
    if (ji.contains("guard")) {
      ins.guard = Expr::parse(ji.at("guard").get<std::string>(), thread_resolver(p, t, false, true));
      ins.has_guard = true;
    }
    return ins;
  }

  static json dump_instr(const Instr& ins, const Program& p, size_t t) {
    json j;
    switch (ins.op) {
      case Instr::Op::Read: j["op"] = "read"; break;
      case Instr::Op::Write: j["op"] = "write"; break;
      case Instr::Op::Rmw: j["op"] = "rmw"; break;
      case Instr::Op::AssertRead: j["op"] = "assert"; break;
      case Instr::Op::Lock: j["op"] = "lock"; break;
      case Instr::Op::Unlock: j["op"] = "unlock"; break;
    }
    j["loc"] = location_str(ins.loc, p);
    if (ins.op == Instr::Op::Read || ins.op == Instr::Op::Rmw)
      j["reg"] = p.register_names(static_cast<ThreadId>(t))[static_cast<size_t>(ins.reg)];
    if (!ins.value.empty()) j["value"] = ins.value.text();
    if (!ins.pred.empty()) j["pred"] = ins.pred.text();
    if (ins.has_guard) j["guard"] = ins.guard.text();
    return j;
  }
};

void Program::finalize_layout() {
  shared_base_.clear();
  uint32_t next = 0;
  std::set<std::string> names;
  for (const SharedDecl& d : shared) {
    if (!names.insert(d.name).second) throw SchemaError("duplicate shared name '" + d.name + "'");
    shared_base_.push_back(next);
    next += d.size;
  }
  ptr_cell_base_ = next;
  ptr_inputs_.clear();
  for (size_t i = 0; i < inputs.size(); i++) {
    if (!names.insert(inputs[i].name).second)
      throw SchemaError("input '" + inputs[i].name + "' collides with another name");
    if (inputs[i].kind == InputDecl::Kind::Ptr) ptr_inputs_.push_back(static_cast<int>(i));
  }
  total_cells_ = next + static_cast<uint32_t>(ptr_inputs_.size());
}

void Program::validate() const {
  // instruction lists are straight-line by construction; nothing cyclic can
  // be expressed, so acyclicity of the transition relation holds trivially
}

uint32_t Program::cell_of(const Location& loc, const InputState& in) const {
  if (!loc.is_deref()) return shared_base_[static_cast<size_t>(loc.var)] + loc.offset;
  int input_idx = ptr_inputs_[static_cast<size_t>(loc.ptr)];
  return ptr_cell_base_ + static_cast<uint32_t>(in.value(static_cast<size_t>(input_idx)));
}

std::string Program::cell_name(uint32_t cell) const {
  for (size_t i = 0; i < shared.size(); i++) {
    if (cell >= shared_base_[i] && cell < shared_base_[i] + shared[i].size) {
      if (shared[i].size == 1) return shared[i].name;
      return shared[i].name + "[" + std::to_string(cell - shared_base_[i]) + "]";
    }
  }
  return "heap" + std::to_string(cell - ptr_cell_base_);
}

int Program::input_index(const std::string& name) const {
  for (size_t i = 0; i < inputs.size(); i++)
    if (inputs[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<InputState> Program::enumerate_inputs(size_t ceiling) const {
  // aliasing patterns: restricted growth strings over the pointer inputs
  std::vector<std::vector<int64_t>> partitions;
  size_t k = ptr_inputs_.size();
  std::vector<int64_t> rgs(k, 0);
  for (;;) {
    partitions.push_back(rgs);
    // next RGS in lexicographic order
    size_t i = k;
    while (i > 0) {
      i--;
      if (i == 0) { i = k; break; } // first element is pinned to 0
      int64_t maxprev = 0;
      for (size_t j = 0; j < i; j++) maxprev = std::max(maxprev, rgs[j]);
      if (rgs[i] <= maxprev) { rgs[i]++; break; }
      rgs[i] = 0;
    }
    if (i == k || k == 0) break;
  }

  std::vector<InputState> out;
  std::vector<size_t> idx(inputs.size(), 0);
  for (;;) {
    for (const auto& part : partitions) {
      std::vector<int64_t> vals(inputs.size(), 0);
      size_t pslot = 0;
      for (size_t i = 0; i < inputs.size(); i++) {
        if (inputs[i].kind == InputDecl::Kind::Int) vals[i] = inputs[i].domain[idx[i]];
        else vals[i] = part[pslot++];
      }
      out.emplace_back(*this, std::move(vals));
      if (out.size() > ceiling)
        throw std::runtime_error("input space of '" + name + "' exceeds ceiling " +
                                 std::to_string(ceiling));
    }
    // advance int-domain counters
    size_t i = 0;
    for (; i < inputs.size(); i++) {
      if (inputs[i].kind != InputDecl::Kind::Int) continue;
      if (++idx[i] < inputs[i].domain.size()) break;
      idx[i] = 0;
    }
    if (i == inputs.size()) break;
  }
  return out;
}

InputState Program::default_input() const {
  std::vector<int64_t> vals(inputs.size(), 0);
  for (size_t i = 0; i < inputs.size(); i++)
    if (inputs[i].kind == InputDecl::Kind::Int) vals[i] = inputs[i].domain[0];
  return InputState(*this, std::move(vals));
}

InputState Program::parse_input(const std::string& text) const {
  std::vector<int64_t> vals(inputs.size(), 0);
  std::vector<bool> seen(inputs.size(), false);
  std::istringstream is(text);
  std::string piece;
  while (std::getline(is, piece, ',')) {
    if (piece.empty()) continue;
    size_t eq = piece.find('=');
    if (eq == std::string::npos) throw SchemaError("malformed input binding '" + piece + "'");
    std::string name = piece.substr(0, eq);
    int idx = input_index(name);
    if (idx < 0) throw SchemaError("unknown input '" + name + "'");
    int64_t v = std::stoll(piece.substr(eq + 1));
    const InputDecl& d = inputs[static_cast<size_t>(idx)];
    if (d.kind == InputDecl::Kind::Int &&
        std::find(d.domain.begin(), d.domain.end(), v) == d.domain.end())
      throw SchemaError("value " + std::to_string(v) + " outside domain of '" + name + "'");
    if (d.kind == InputDecl::Kind::Ptr &&
        (v < 0 || v >= static_cast<int64_t>(ptr_inputs_.size())))
      throw SchemaError("cell id " + std::to_string(v) + " out of range for '" + name + "'");
    vals[static_cast<size_t>(idx)] = v;
    seen[static_cast<size_t>(idx)] = true;
  }
  for (size_t i = 0; i < inputs.size(); i++)
    if (!seen[i]) throw SchemaError("input '" + inputs[i].name + "' not bound");
  return InputState(*this, std::move(vals));
}

Program Program::load(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("program is not valid JSON: ") + e.what());
  }
  try {
    return ProgramLoader::load(j);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("program schema violation: ") + e.what());
  }
}

Program Program::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open program file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load(ss.str());
}

std::string Program::serialize() const { return ProgramLoader::dump(*this).dump(2) + "\n"; }

} // namespace relsched
