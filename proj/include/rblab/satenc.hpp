#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rblab/instance.hpp"

namespace rblab::satenc {

// CNF over num_vars boolean variables, DIMACS conventions: positive literal
// = true, 1-based. Log-encoding gives each CSP variable b = ceil(log2 d)
// bits, little-endian (bit 0 least significant), so boolean variable
// x*b + i + 1 carries bit i of CSP variable x and num_vars = n*b.
struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    // var_map parameters; zero when the CNF did not come from encode()/a
    // DIMACS file carrying vmap comments.
    int csp_n = 0;
    std::int64_t csp_d = 0;
    int bits_per_var = 0;
};

int bits_for_domain(std::int64_t d);

// Boolean variable (1-based) carrying bit `bit` of CSP variable `var`.
int bool_var(const Cnf& cnf, int var, int bit);

// One clause per forbidden tuple (the complement of each permitted set):
// the disjunction of the negations of the bit literals selecting that tuple.
// When d < 2^b, every variable also gets one exclusion clause per invalid
// code in [d, 2^b). Clause order is fixed: exclusion clauses first (variable,
// then code ascending), then constraint clauses (constraint index, then
// forbidden tuple lexicographic). Throws SizeError when the total clause
// count would exceed clause_budget.
Cnf encode(const Instance& instance, std::uint64_t clause_budget = 5'000'000);

// Reads each variable's bits from a total model. Throws InvalidModel naming
// the variable if a decoded value lands outside [0, d).
Assignment decode(const Cnf& cnf, const std::vector<bool>& model);

struct DpllResult {
    bool sat = false;
    std::vector<bool> model;  // size num_vars when sat
    std::uint64_t nodes = 0;
};

// Complete DPLL: unit propagation to fixpoint, then branch on the
// lowest-index unassigned variable, false branch first. Deterministic.
DpllResult dpll_sat(const Cnf& cnf, std::uint64_t node_budget = 100'000'000);

// "p cnf <vars> <clauses>" header, one 0-terminated clause per line, with
// leading comments carrying the var_map ("c vmap <var> <bit> <boolvar>").
// read_dimacs(write_dimacs(f)) is the identity on (num_vars, clauses).
void write_dimacs(const Cnf& cnf, std::ostream& out);
Cnf read_dimacs(std::istream& in);

}  // namespace rblab::satenc
