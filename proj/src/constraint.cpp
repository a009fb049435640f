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

#include "constraint.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "program.hpp"

namespace relsched {

std::string ConstraintAtom::str() const {
  std::ostringstream os;
  os << lhs;
  switch (op) {
    case Op::Eq: os << " == "; break;
    case Op::Ne: os << " != "; break;
    case Op::Lt: os << " < "; break;
  }
  if (rhs_is_var) os << rhs_var;
  else os << rhs_const;
  return os.str();
}

PathConstraint::PathConstraint(std::vector<ConstraintAtom> atoms) : atoms_(std::move(atoms)) {
  // normalize symmetric var-var atoms so `y == x` and `x == y` coincide
  for (ConstraintAtom& a : atoms_) {
    if (a.rhs_is_var && (a.op == ConstraintAtom::Op::Eq || a.op == ConstraintAtom::Op::Ne) &&
        a.rhs_var < a.lhs) {
      std::swap(a.lhs, a.rhs_var);
    }
  }
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool PathConstraint::eval(const Program& program, const InputState& input) const {
  for (const ConstraintAtom& a : atoms_) {
    int li = program.input_index(a.lhs);
    if (li < 0) throw SchemaError("constraint references undeclared input '" + a.lhs + "'");
    int64_t lv = input.value(static_cast<size_t>(li));
    int64_t rv;
    if (a.rhs_is_var) {
      int ri = program.input_index(a.rhs_var);
      if (ri < 0) throw SchemaError("constraint references undeclared input '" + a.rhs_var + "'");
      if (program.inputs[static_cast<size_t>(li)].kind !=
          program.inputs[static_cast<size_t>(ri)].kind)
        throw SchemaError("constraint mixes pointer and integer inputs");
      rv = input.value(static_cast<size_t>(ri));
    } else {
      if (program.inputs[static_cast<size_t>(li)].kind == InputDecl::Kind::Ptr)
        throw SchemaError("pointer input compared against a constant");
      rv = a.rhs_const;
    }
    bool ok = false;
    switch (a.op) {
      case ConstraintAtom::Op::Eq: ok = lv == rv; break;
      case ConstraintAtom::Op::Ne: ok = lv != rv; break;
      case ConstraintAtom::Op::Lt: ok = lv < rv; break;
    }
    if (!ok) return false;
  }
  return true;
}

std::string PathConstraint::str() const {
  if (atoms_.empty()) return "true";
  std::ostringstream os;
  for (size_t i = 0; i < atoms_.size(); i++) {
    if (i) os << " && ";
    os << atoms_[i].str();
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

ConstraintAtom parse_atom(const std::string& text) {
  ConstraintAtom a;
  size_t pos;
  if ((pos = text.find("==")) != std::string::npos) a.op = ConstraintAtom::Op::Eq;
  else if ((pos = text.find("!=")) != std::string::npos) a.op = ConstraintAtom::Op::Ne;
  else if ((pos = text.find('<')) != std::string::npos) a.op = ConstraintAtom::Op::Lt;
  else throw SchemaError("malformed constraint atom '" + text + "'");
  size_t oplen = a.op == ConstraintAtom::Op::Lt ? 1 : 2;
  a.lhs = trim(text.substr(0, pos));
  std::string rhs = trim(text.substr(pos + oplen));
  if (a.lhs.empty() || rhs.empty()) throw SchemaError("malformed constraint atom '" + text + "'");
  if (std::isdigit(static_cast<unsigned char>(rhs[0])) || rhs[0] == '-') {
    a.rhs_is_var = false;
    a.rhs_const = std::stoll(rhs);
  } else {
    a.rhs_is_var = true;
    a.rhs_var = rhs;
  }
  return a;
}

} // namespace

PathConstraint PathConstraint::parse(const std::string& text) {
  std::string t = trim(text);
  if (t == "true" || t.empty()) return PathConstraint();
  std::vector<ConstraintAtom> atoms;
  size_t start = 0;
  for (;;) {
    size_t amp = t.find("&&", start);
    std::string piece = amp == std::string::npos ? t.substr(start) : t.substr(start, amp - start);
    atoms.push_back(parse_atom(trim(piece)));
    if (amp == std::string::npos) break;
    start = amp + 2;
  }
  return PathConstraint(std::move(atoms));
}

} // namespace relsched
