#pragma once

#include <cstdint>
#include <vector>

#include "rblab/params.hpp"

namespace rblab::moments {

// Threshold density 1/(-ln(1-p)). Satisfiability probability tends to 1
// below it and 0 above it as n grows.
double r_critical(double p);

// ln E[X] = n ln d + m ln(1-p), with X the solution count. Always finite for
// valid params; the linear-space twin may saturate for huge exponents.
double log_expected_solutions(const RBParams& params);
double expected_solutions(const RBParams& params);

// Markov bound min(1, E[X]) on Pr[instance is satisfiable].
double sat_upper_bound(const RBParams& params);

struct Calibration {
    double r;
    double epsilon;
};

// epsilon = ln(1/2) / (alpha n ln n ln(1-p)) and r = r_critical(p) + epsilon.
// With real-valued m = r n ln d and d = n^alpha taken exactly, E[X] = 1/2.
Calibration calibrate_r(int n, double alpha, double p);

// ln C(n, k); exact 128-bit integer path for n <= 64, lgamma beyond.
double log_binom(std::int64_t n, std::int64_t k);

// (exact, asymptotic) = (C(S,k)/C(n,k), (S/n)^k). Exact value is 0 for S < k.
struct BinomRatio {
    double exact;
    double asymptotic;
};
BinomRatio binom_ratio(int S, int n, int k);

// Full second-moment summation over S = 0..n agreement sizes:
//   E[X^2] = sum_S d^n C(n,S) (d-1)^{n-S} [q_S t/D + (1-q_S) t(t-1)/(D(D-1))]^m
// with q_S = C(S,k)/C(n,k) and D = d^k, evaluated in log space with exact
// binomials and the instance's integer m. Exact for the original variant;
// the distinct-tuple factor t(t-1)/(D(D-1)) tends to (1-p)^2 as D grows,
// recovering the asymptotic form. Guarded at n <= 200.
double second_moment_exact(const RBParams& params);

// F(S) = C(n,S) (1-1/d)^{n-S} (1/d)^S [1 + p/(1-p) s^k]^{r n ln d}, s = S/n,
// with the real-valued exponent r n ln d. F(0) -> 1 as d grows; at the
// E[X] = 1/2 calibration F(n) = 2 and the factored form approaches 3 E[X]^2.
std::vector<double> f_terms(const RBParams& params);

// E[X]^2 * sum_S F(S), the factored approximation with the 1+O(1/n) factor
// dropped and the real-valued exponent used throughout (like f_terms).
double second_moment_f_approx(const RBParams& params);

// Asymptotic Pr[X > 0] >= E[X]^2 / E[X^2] = 1/3 under the E[X] = 1/2
// calibration as n, d -> infinity. Not a finite-n guarantee.
constexpr double sat_lower_bound_asymptotic() { return 1.0 / 3.0; }

// Finite-n counterpart E[X]^2 / second_moment_exact (reported, not a bound).
double sat_lower_bound_finite(const RBParams& params);

// Asymptotic Pr[exactly one solution] >= 1/3 - (1/2 - x) <= x  =>  x >= 1/6.
constexpr double unique_solution_lower_bound_asymptotic() { return 1.0 / 6.0; }

// Near-miss count N at a fixed constraint: assignments satisfying every other
// constraint and violating that one. E[N] = d^n (1-p)^{m-1} p.
double log_expected_near_miss(const RBParams& params);
double expected_near_miss(const RBParams& params);

// E[N^2]/E[X^2] = sum_S [p q_S + p^2(1-q_S)] / [(1-p) q_S + (1-p)^2(1-q_S)].
double near_miss_second_moment_ratio(const RBParams& params);

// Asymptotic Pr[N > 0] >= p/3.
double near_miss_lower_bound_asymptotic(double p);

// A variable's constraint degree is Binomial(m, k/n) with mean ~ r k ln d.
// Chernoff: Pr[deg <= (1-delta) r k ln d] <= exp(-delta^2/2 * r k ln d).
struct DegreeTail {
    double expected_degree;
    double threshold;
    double prob_bound;
};
DegreeTail degree_tail_bound(const RBParams& params, double delta = 0.5);

// Union bound n (1 - p/3)^{(1/2) r k ln d} on Pr[some variable lies in no
// self-unsatisfiable constraint]. Vacuous (> 1) at desk scale.
double coverage_union_bound(const RBParams& params);

// Same bound written with n as the base: n^E, E = 1 + (1/2) alpha r k ln(1-p/3).
// Matches coverage_union_bound exactly when d = n^alpha without rounding.
double coverage_union_bound_base_n(const RBParams& params);

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;  // sample stddev / sqrt(trials)
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo over generated original-variant instances: exact solution
// counts (X), their squares (X^2), Pr[SAT], Pr[exactly one solution].
// Trial j uses seed base_seed + j; merging is order-independent.
struct SolutionMoments {
    McEstimate x;
    McEstimate x2;
    double pr_sat = 0.0;
    double pr_unique = 0.0;
    std::uint64_t trials = 0;
};
SolutionMoments mc_solution_moments(const RBParams& params, std::uint64_t trials,
                                    std::uint64_t seed, int jobs = 1);

// Monte Carlo E[N]: exact count of assignments violating constraint u and
// satisfying all others, per generated instance.
McEstimate mc_near_miss_count(const RBParams& params, std::uint64_t trials, std::uint64_t seed,
                              int u = 0, int jobs = 1);

// Everything above for one parameter point, JSON-serializable.
struct MomentReport {
    RBParams params;
    double r_cr = 0.0;
    double epsilon = 0.0;          // calibration offset at (n, alpha, p)
    double log_e_x = 0.0;
    double e_x = 0.0;
    double sat_upper = 0.0;
    double e_x2 = 0.0;             // exact summation (integer m); NaN above the n guard
    double e_x2_f_approx = 0.0;    // E[X]^2 sum F(S); NaN above the n guard
    std::vector<double> f_terms;   // F(0..n); empty above the n guard
    double sat_lower_finite = 0.0; // E[X]^2 / E[X^2]
    double sat_lower_asymptotic = sat_lower_bound_asymptotic();
    double unique_lower_asymptotic = unique_solution_lower_bound_asymptotic();
    double log_e_n = 0.0;
    double e_n = 0.0;
    double near_miss_ratio = 0.0;  // E[N^2]/E[X^2] summation; NaN above the n guard
    double near_miss_lower_asymptotic = 0.0;  // p/3
    DegreeTail degree;
    double coverage_bound = 0.0;
};
MomentReport moment_report(const RBParams& params);

}  // namespace rblab::moments
