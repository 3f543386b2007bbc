#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "symcons/term.hpp"

namespace symcons {

struct JacobianResult {
  std::vector<std::vector<Term>> entries;  // rows = equations, cols = variables
  std::uint64_t distinct_nodes = 0;        // DAG nodes reachable from all entries combined
  std::uint64_t allocated_nodes = 0;       // constructor invocations during the build
  std::chrono::nanoseconds build_time{0};

  std::size_t rows() const noexcept { return entries.size(); }
  std::size_t cols() const noexcept { return entries.empty() ? 0 : entries.front().size(); }
};

/// d t / d var, built bottom-up through the session constructors (hence
/// normalized and shared) and memoized per (term, var) node-id pair.
Term derivative(const Term& t, const Term& var, Session& session);

/// Entry (i, j) = d eqs[i] / d vars[j]. One memo is shared across all entries,
/// so derivatives of common subterms are computed once.
JacobianResult jacobian(std::span<const Term> eqs, std::span<const Term> vars,
                        Session& session);

/// (hits, misses) of the session's differentiation memo.
std::pair<std::uint64_t, std::uint64_t> cache_stats(const Session& session);

}  // namespace symcons
