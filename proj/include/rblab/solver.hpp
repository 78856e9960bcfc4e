#pragma once

#include <cstdint>
#include <optional>

#include "rblab/instance.hpp"

namespace rblab {

constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;  // overridable via RBLAB_NODE_BUDGET

enum class SolveMode { Decide, CountAll, CheckUnique };

struct SolveResult {
    bool sat = false;
    // Exact in CountAll; min(actual, 2) in CheckUnique; absent in Decide.
    std::optional<std::uint64_t> count;
    std::optional<Assignment> witness;  // present iff sat (first solution in search order)
    std::uint64_t nodes_expanded = 0;
};

// True iff the assignment's projection onto the constraint's scope is permitted.
bool satisfies(const Constraint& constraint, const Assignment& assignment);
bool satisfies_all(const Instance& instance, const Assignment& assignment);

// Backtracking search with forward checking. Static variable order (index
// order), ascending value order, fully deterministic. Decide stops at the
// first solution, CheckUnique after the second. Throws BudgetExceeded when
// node_budget is exhausted. Domains up to 64 values (bitmask representation).
SolveResult solve(const Instance& instance, SolveMode mode,
                  std::uint64_t node_budget = kDefaultNodeBudget);

// Test oracle: iterates every one of the d^n assignments. Guarded at
// d^n <= 2^22; semantics identical to solve(CountAll).
SolveResult enumerate_oracle(const Instance& instance);

// Copy of the instance with constraint u's permitted set complemented within
// [0,d)^k. Solutions of the result are exactly the near-misses at u.
Instance with_complemented_constraint(const Instance& instance, int u);

// An assignment satisfying every constraint except u and violating u, if one
// exists within the budget.
std::optional<Assignment> find_near_miss(const Instance& instance, int u,
                                         std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace rblab
