#pragma once

#include <chrono>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "symcons/codegen.hpp"
#include "symcons/term.hpp"

namespace symcons {

/// Validated program plus its register-file size. Validation (the
/// compile-stage analog) checks SSA form and reference ranges once, so run()
/// performs no further checks.
struct PreparedProgram {
  StraightLineProgram program;
  std::size_t register_count = 0;
  std::chrono::nanoseconds prep_time{0};
};

/// Validates `p`; throws ValidationError naming the first malformed instruction.
PreparedProgram prepare(StraightLineProgram p);

struct RunResult {
  std::vector<double> values;
  bool non_finite = false;  // set when any intermediate or output is inf/NaN
};

/// IEEE-754 double evaluation; division by zero and domain violations produce
/// inf/NaN and set the flag rather than erroring.
/// Throws ArityMismatch on a wrong input count.
RunResult run(const PreparedProgram& pp, std::span<const double> inputs);

/// Recursive tree/DAG evaluator used as the independent oracle. Uses the same
/// per-node operand order and left-fold as the lowering, so results match the
/// generated programs bitwise. Memoized per node id within one call.
/// Throws UnboundVariable if env misses a reachable variable.
double eval_tree(const Term& root, const std::unordered_map<std::string, double>& env);

}  // namespace symcons
