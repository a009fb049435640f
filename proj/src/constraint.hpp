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

#ifndef RELSCHED_CONSTRAINT_HPP
#define RELSCHED_CONSTRAINT_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace relsched {

class Program;
class InputState;

/// One atom of a path constraint. Supported forms:
///   v == w, v != w   (v, w input variables; pointer atoms test aliasing)
///   v == c, v != c, v < c   (c an integer constant)
struct ConstraintAtom {
  enum class Op : uint8_t { Eq, Ne, Lt };
  Op op = Op::Eq;
  std::string lhs;
  bool rhs_is_var = false;
  std::string rhs_var;
  int64_t rhs_const = 0;

  auto operator<=>(const ConstraintAtom&) const = default;

  std::string str() const;
};

/// A conjunction of atoms over a program's input variables. The empty
/// conjunction is the always-true constraint (printed "true").
/// Atoms are kept sorted and deduplicated so equal constraints compare equal
/// and print identically.
class PathConstraint {
public:
  PathConstraint() = default;
  explicit PathConstraint(std::vector<ConstraintAtom> atoms);

  static PathConstraint always_true() { return PathConstraint(); }

  bool is_true() const { return atoms_.empty(); }
  const std::vector<ConstraintAtom>& atoms() const { return atoms_; }

  bool eval(const Program& program, const InputState& input) const;

  std::string str() const;
  /// Parses the textual form produced by str(). Throws on malformed input.
  static PathConstraint parse(const std::string& text);

  auto operator<=>(const PathConstraint&) const = default;

private:
  std::vector<ConstraintAtom> atoms_;
};

} // namespace relsched

#endif
