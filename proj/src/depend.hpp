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

#ifndef RELSCHED_DEPEND_HPP
#define RELSCHED_DEPEND_HPP

#include <map>
#include <optional>
#include <vector>

#include "constraint.hpp"
#include "state.hpp"

namespace relsched {

/// Location-based dependence with the one-writer rule: two events conflict
/// when they touch the same cell and at least one writes it. Events that do
/// not exist under this input are dependent on nothing.
bool dependent(const ProgramCtx& ctx, Event a, Event b);

/// The program's enumerated input space with one compiled context per input.
/// Also the home of the symbolic (input-quantified) dependence.
class InputSpace {
public:
  explicit InputSpace(const Program& program, size_t ceiling = 4096);

  const Program& program() const { return *program_; }
  size_t size() const { return ctxs_.size(); }
  const ProgramCtx& ctx(size_t i) const { return ctxs_[i]; }
  const InputState& input(size_t i) const { return ctxs_[i].input(); }
  int index_of(const InputState& in) const; // -1 if not in the space

  /// Weakest path constraint under which a and b are dependent, or nullopt if
  /// they are dependent under no input. Satisfies, for every input i:
  ///   dependent(ctx(i), a, b) == constraint.eval(program, input(i))
  /// Throws if the dependent-input set is not expressible as a conjunction of
  /// the supported atoms.
  std::optional<PathConstraint> symbolic_dependent(Event a, Event b) const;

  /// Dependent under at least one input. This union relation is what makes a
  /// schedule class cover every input at once.
  bool union_dependent(Event a, Event b) const;

private:
  const Program* program_;
  std::vector<ProgramCtx> ctxs_;
  std::vector<ConstraintAtom> vocabulary_;
  mutable std::map<std::pair<Event, Event>, std::optional<PathConstraint>> cache_;

  std::optional<PathConstraint> synthesize(const std::vector<bool>& dep) const;
};

/// Brute-force oracle: every complete interleaving from the given input.
/// `limit` truncates the result; the ceiling aborts runaway enumerations.
std::vector<Execution> enumerate_executions(const ProgramCtx& ctx,
                                            std::optional<size_t> limit = std::nullopt,
                                            size_t ceiling = 10'000'000);

} // namespace relsched

#endif
