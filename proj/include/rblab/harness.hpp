#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rblab/params.hpp"
#include "rblab/solver.hpp"

namespace rblab::harness {

// One sweep cell. CSV columns follow field order exactly; se is the standard
// error of mean_solution_count.
struct SweepRecord {
    double r = 0.0;
    int n = 0;
    std::int64_t d = 0;
    std::uint64_t trials = 0;
    std::uint64_t sat_count = 0;
    double pr_sat = 0.0;
    double mean_solution_count = 0.0;
    double se = 0.0;
    double mean_nodes = 0.0;
    std::uint64_t budget_exceeded = 0;  // trials that hit the node budget (excluded from stats)
};

// For each r, generates `trials` original-variant instances (trial j at seed
// base + j) and counts their solutions. Deterministic in the full argument
// list; jobs only changes wall time, never output.
std::vector<SweepRecord> sweep(int n, double alpha, int k, double p,
                               const std::vector<double>& r_values, std::uint64_t trials,
                               std::uint64_t seed, int jobs = 1,
                               std::uint64_t node_budget = kDefaultNodeBudget);

struct FlipReport {
    std::string direction;
    std::uint64_t attempted = 0;       // instances sampled while filtering
    std::uint64_t flip_found = 0;      // filtered instances successfully flipped
    std::uint64_t kill_confirmed = 0;  // construction guarantee re-checked; == flip_found
    std::uint64_t unsat_after_flip = 0;
    std::uint64_t sat_after_flip = 0;
    double residual_new_solution_rate = 0.0;  // sat->unsat: flips leaving a new solution
    double union_bound_value = 0.0;           // analytic 2 d^{n-2} (1-p)^{m-1}
    double near_miss_c0_rate = 0.0;           // unsat->sat: UNSAT instances with a near-miss at C_0
    double near_miss_asymptote = 0.0;         // p/3, for the report
};

// Collects `trials` unique-solution instances at the calibrated density by
// rejection sampling (CheckUnique), flips each with the solution-anchored
// swap, verifies the kill, re-solves, and compares the residual-SAT rate
// against the union bound. attempt_cap bounds the rejection sampling; 0
// means 400 * trials.
FlipReport flip_experiment_sat_to_unsat(int n, double alpha, double p, std::uint64_t trials,
                                        std::uint64_t seed, int k = 2, int jobs = 1,
                                        std::uint64_t node_budget = kDefaultNodeBudget,
                                        std::uint64_t attempt_cap = 0);

// Collects UNSAT instances, finds a near-miss (scanning constraints from 0)
// and a qualifying tuple pair, flips, and verifies the recorded witness
// satisfies the result. Also reports how often constraint 0 admits a
// near-miss, next to the p/3 asymptote.
FlipReport flip_experiment_unsat_to_sat(int n, double alpha, double p, std::uint64_t trials,
                                        std::uint64_t seed, int k = 2, int jobs = 1,
                                        std::uint64_t node_budget = kDefaultNodeBudget,
                                        std::uint64_t attempt_cap = 0);

struct CoverageReport {
    int n = 0;
    std::int64_t d = 0;
    int k = 0;
    double p = 0.0;
    double r = 0.0;
    std::uint64_t trials = 0;          // UNSAT instances examined
    std::uint64_t attempted = 0;       // instances sampled to find them
    std::uint64_t fully_covered = 0;   // every variable in >= 1 self-unsatisfiable constraint
    double covered_fraction = 0.0;
    double union_bound = 0.0;          // Pr[some variable uncovered] <= this (vacuous at desk scale)
    double one_minus_bound = 0.0;
};

// Brute-force coverage check on sampled UNSAT instances at the calibrated
// density: a constraint is self-unsatisfiable iff it admits a near-miss.
CoverageReport coverage_experiment(int n, double alpha, int k, double p, std::uint64_t trials,
                                   std::uint64_t seed, int jobs = 1,
                                   std::uint64_t node_budget = kDefaultNodeBudget,
                                   std::uint64_t attempt_cap = 0);

struct DegreeReport {
    double expected_degree = 0.0;
    double threshold = 0.0;   // (1/2) r k ln d
    double prob_bound = 0.0;  // exp(-(1/8) r k ln d)
    std::uint64_t trials = 0;
    std::uint64_t below_threshold = 0;  // instances with deg(x_0) <= threshold
    double empirical_rate = 0.0;
    double se = 0.0;  // binomial standard error of empirical_rate
};

// Samples the degree of variable 0 (scopes only; same scope streams as full
// generation) and confronts the Chernoff tail bound.
DegreeReport degree_experiment(const RBParams& params, std::uint64_t trials, std::uint64_t seed,
                               int jobs = 1);

// CSV with a mandatory header row, one record per row.
void write_sweep_csv(const std::vector<SweepRecord>& records, std::ostream& out);
void write_flip_csv(const FlipReport& report, std::ostream& out);
void write_coverage_csv(const CoverageReport& report, std::ostream& out);
void write_degree_csv(const DegreeReport& report, std::ostream& out);

// JSON summaries of the same records.
std::string sweep_json(const std::vector<SweepRecord>& records);
std::string flip_json(const FlipReport& report);
std::string coverage_json(const CoverageReport& report);
std::string degree_json(const DegreeReport& report);

}  // namespace rblab::harness
