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

#ifndef RELSCHED_EXPR_HPP
#define RELSCHED_EXPR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace relsched {

/// Integer expression over thread-local registers, program inputs and the
/// special name `val` (the value just read by an assert instruction).
/// Shared variables are not directly readable here; threads must read them
/// into a register first, which is what makes every shared access an event.
class Expr {
public:
  enum class Kind : uint8_t {
    Const,
    Reg,    // resolved register slot
    Input,  // resolved input slot
    Shared, // resolved shared cell (global assertions only)
    Val,    // read value inside an assert predicate
    Not,
    Neg,
    Mul,
    Mod,
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Cond, // a ? b : c
  };

  struct Node {
    Kind kind = Kind::Const;
    int64_t value = 0; // Const payload or resolved slot index
    std::string name;  // unresolved identifier (kept for printing)
    int32_t a = -1, b = -1, c = -1; // child node indices
  };

  Expr() = default;

  bool empty() const { return nodes_.empty(); }
  const std::string& text() const { return text_; }

  struct EvalCtx {
    const int64_t* regs = nullptr;
    const int64_t* inputs = nullptr;
    const int64_t* shared = nullptr;
    int64_t read_val = 0;
  };

  int64_t eval(const EvalCtx& ctx) const;

  /// What an identifier may resolve to.
  enum class Sym : uint8_t { Reg, Input, Shared, Val };
  using Resolver = std::function<std::pair<Sym, int64_t>(const std::string&)>;

  /// Parses `text` and binds every identifier through `resolve`.
  /// Throws std::runtime_error on syntax errors or unknown names.
  static Expr parse(const std::string& text, const Resolver& resolve);

  /// Names referenced before resolution (for validation/diagnostics).
  std::vector<std::string> identifiers() const;

private:
  std::vector<Node> nodes_;
  int32_t root_ = -1;
  std::string text_;

  int64_t eval_node(int32_t idx, const EvalCtx& ctx) const;
  friend class ExprParser;
};

} // namespace relsched

#endif
