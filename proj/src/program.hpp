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

#ifndef RELSCHED_PROGRAM_HPP
#define RELSCHED_PROGRAM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"

namespace relsched {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ThreadId = uint16_t;

struct InputDecl {
  std::string name;
  enum class Kind : uint8_t { Int, Ptr } kind = Kind::Int;
  std::vector<int64_t> domain; // Int only; finite and non-empty
};

struct SharedDecl {
  std::string name;
  int64_t init = 0;
  uint32_t size = 1; // size > 1 declares an array
};

/// A static shared-memory location: either a named shared variable (with a
/// constant array offset) or the dereference of a pointer input. Pointer
/// targets are anonymous cells assigned by the input's aliasing pattern, so
/// which cell an instruction touches never depends on another thread.
struct Location {
  int32_t var = -1;    // index into Program::shared, or -1 for a deref
  uint32_t offset = 0; // array offset when var >= 0
  int32_t ptr = -1;    // index into the pointer inputs when var < 0

  bool is_deref() const { return var < 0; }
  auto operator<=>(const Location&) const = default;
};

struct Instr {
  enum class Op : uint8_t { Read, Write, Rmw, AssertRead, Lock, Unlock };
  Op op = Op::Read;
  Location loc;
  int32_t reg = -1; // destination register for Read/Rmw (Rmw: the old value)
  Expr value;       // stored value for Write/Rmw
  Expr pred;        // AssertRead predicate over `val`, registers and inputs
  Expr guard;       // optional; over inputs and constants only
  bool has_guard = false;

  bool writes() const {
    return op == Op::Write || op == Op::Rmw || op == Op::Lock || op == Op::Unlock;
  }
  bool reads() const { return op != Op::Write; }
};

class Program;

/// Assignment of every declared input: integer value for int inputs, abstract
/// cell id for pointer inputs. Two pointers alias iff their cell ids match.
class InputState {
public:
  InputState() = default;
  InputState(const Program& program, std::vector<int64_t> values);

  const std::vector<int64_t>& values() const { return values_; }
  int64_t value(size_t input_idx) const { return values_[input_idx]; }

  bool aliased(const Program& program, const std::string& p, const std::string& q) const;

  /// Canonical "name=value,..." form, stable across runs.
  std::string label(const Program& program) const;

  auto operator<=>(const InputState&) const = default;

private:
  std::vector<int64_t> values_;
};

/// A finite concurrent program: straight-line per-thread instruction lists
/// over shared cells, with inputs as the only data nondeterminism and
/// scheduling as the only control nondeterminism.
class Program {
public:
  std::string name;
  std::vector<InputDecl> inputs;
  std::vector<SharedDecl> shared;
  std::vector<std::vector<Instr>> threads;
  std::vector<Expr> global_assertions; // state predicates over shared cells

  static Program load(const std::string& json_text);
  static Program load_file(const std::string& path);
  std::string serialize() const; // round-trips through load()

  ThreadId thread_count() const { return static_cast<ThreadId>(threads.size()); }

  // memory layout: shared scalars/arrays first, then one cell per ptr input
  uint32_t cell_count() const { return total_cells_; }
  uint32_t shared_base(int32_t var) const { return shared_base_[static_cast<size_t>(var)]; }
  uint32_t ptr_cell_base() const { return ptr_cell_base_; }
  uint32_t cell_of(const Location& loc, const InputState& in) const;
  std::string cell_name(uint32_t cell) const;

  size_t register_count(ThreadId t) const { return reg_names_[t].size(); }
  const std::vector<std::string>& register_names(ThreadId t) const { return reg_names_[t]; }

  int input_index(const std::string& name) const; // -1 if unknown
  const std::vector<int>& ptr_inputs() const { return ptr_inputs_; }

  /// All input states: cartesian product of int domains with every aliasing
  /// pattern (set partition) of the pointer inputs. Throws if the count
  /// exceeds `ceiling`.
  std::vector<InputState> enumerate_inputs(size_t ceiling = 4096) const;

  /// First input in enumeration order (canonical default).
  InputState default_input() const;

  /// Parses "x=0,y=1" against the declared inputs.
  InputState parse_input(const std::string& text) const;

private:
  std::vector<uint32_t> shared_base_;
  uint32_t ptr_cell_base_ = 0;
  uint32_t total_cells_ = 0;
  std::vector<int> ptr_inputs_; // indices of ptr-kind inputs
  std::vector<std::vector<std::string>> reg_names_;

  void finalize_layout();
  void validate() const;
  friend class ProgramLoader;
};

} // namespace relsched

#endif
