#include "rblab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rblab/errors.hpp"
#include "rblab/instance.hpp"
#include "rblab/solver.hpp"

namespace rblab::moments {

namespace {

constexpr int kSummationGuard = 200;  // cost guard for the S = 0..n summations

double log_sum_exp(const std::vector<double>& logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logs) hi = std::max(hi, v);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

double q_ratio(int S, int n, int k) {
    if (S < k) return 0.0;
    return std::exp(log_binom(S, k) - log_binom(n, k));
}

void guard_summation(const RBParams& params) {
    if (params.n > kSummationGuard)
        throw DomainError("summation guard: n = " + std::to_string(params.n) + " exceeds " +
                          std::to_string(kSummationGuard));
}

// Statistics of one scalar sample per trial.
McEstimate estimate(const std::vector<double>& samples, std::uint64_t seed) {
    McEstimate est;
    est.trials = samples.size();
    est.seed = seed;
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double v : samples) sum += v;
    est.mean = sum / static_cast<double>(samples.size());
    if (samples.size() >= 2) {
        double ss = 0.0;
        for (double v : samples) ss += (v - est.mean) * (v - est.mean);
        const double var = ss / static_cast<double>(samples.size() - 1);
        est.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
    }
    return est;
}

// Runs fn(trial_index) for every index, optionally across threads; results
// land in a preallocated slot per index, so the merge order is fixed. The
// first worker exception is rethrown after the join.
template <typename Fn>
void for_each_trial(std::uint64_t trials, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (std::uint64_t i = 0; i < trials; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    const int lanes = std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), trials);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int lane = 0; lane < lanes; ++lane) {
        workers.emplace_back([&, lane] {
            try {
                for (std::uint64_t i = static_cast<std::uint64_t>(lane); i < trials;
                     i += static_cast<std::uint64_t>(lanes))
                    fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

double r_critical(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1), got " + std::to_string(p));
    return 1.0 / (-std::log1p(-p));
}

double log_expected_solutions(const RBParams& params) {
    return static_cast<double>(params.n) * std::log(static_cast<double>(params.d)) +
           static_cast<double>(params.m) * std::log1p(-params.p);
}

double expected_solutions(const RBParams& params) {
    return std::exp(log_expected_solutions(params));
}

double sat_upper_bound(const RBParams& params) {
    const double lg = log_expected_solutions(params);
    return lg >= 0.0 ? 1.0 : std::exp(lg);
}

Calibration calibrate_r(int n, double alpha, double p) {
    if (n < 3) throw DomainError("calibration requires n >= 3, got " + std::to_string(n));
    if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1), got " + std::to_string(p));
    Calibration cal;
    cal.epsilon = std::log(0.5) / (alpha * static_cast<double>(n) *
                                   std::log(static_cast<double>(n)) * std::log1p(-p));
    cal.r = r_critical(p) + cal.epsilon;
    return cal;
}

double log_binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    if (n <= 64) {
        unsigned __int128 num = 1;
        k = std::min(k, n - k);
        for (std::int64_t i = 1; i <= k; ++i) {
            num = num * static_cast<unsigned __int128>(n - k + i);
            num /= static_cast<unsigned __int128>(i);  // exact: prefix is C(n-k+i, i)
        }
        return std::log(static_cast<double>(num));
    }
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

BinomRatio binom_ratio(int S, int n, int k) {
    if (S < 0 || S > n || k > n || k < 0)
        throw DomainError("binom_ratio requires 0 <= S <= n and 0 <= k <= n");
    BinomRatio out;
    out.exact = S < k ? 0.0 : std::exp(log_binom(S, k) - log_binom(n, k));
    out.asymptotic = std::pow(static_cast<double>(S) / static_cast<double>(n), k);
    return out;
}

double second_moment_exact(const RBParams& params) {
    guard_summation(params);
    const int n = params.n;
    const double log_d = std::log(static_cast<double>(params.d));
    const double log_dm1 = std::log(static_cast<double>(params.d - 1));
    // Exact pair-satisfaction probabilities for a uniform t-subset of the
    // tuple space: identical projected tuples survive with t/D, distinct ones
    // with t(t-1)/(D(D-1)). The latter tends to (1-p)^2 as D grows, which is
    // the form the asymptotic derivations use.
    const double space = static_cast<double>(params.tuple_space());
    const double t = static_cast<double>(params.t);
    const double p_same = t / space;
    const double p_cross = t * (t - 1.0) / (space * (space - 1.0));
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n + 1));
    for (int S = 0; S <= n; ++S) {
        const double q = q_ratio(S, n, params.k);
        const double per_constraint = q * p_same + (1.0 - q) * p_cross;
        double log_term = static_cast<double>(n) * log_d + log_binom(n, S) +
                          static_cast<double>(params.m) * std::log(per_constraint);
        if (S < n) log_term += static_cast<double>(n - S) * log_dm1;
        terms.push_back(log_term);
    }
    return std::exp(log_sum_exp(terms));
}

std::vector<double> f_terms(const RBParams& params) {
    guard_summation(params);
    const int n = params.n;
    const double log_d = std::log(static_cast<double>(params.d));
    const double m_real = params.r * static_cast<double>(n) * log_d;
    const double ratio = params.p / (1.0 - params.p);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    for (int S = 0; S <= n; ++S) {
        const double s = static_cast<double>(S) / static_cast<double>(n);
        double log_f = log_binom(n, S) - static_cast<double>(S) * log_d +
                       m_real * std::log1p(ratio * std::pow(s, params.k));
        // (1 - 1/d)^{n-S} via log1p for accuracy at large d
        log_f += static_cast<double>(n - S) * std::log1p(-1.0 / static_cast<double>(params.d));
        out.push_back(std::exp(log_f));
    }
    return out;
}

double second_moment_f_approx(const RBParams& params) {
    const std::vector<double> terms = f_terms(params);
    double sum = 0.0;
    for (double f : terms) sum += f;
    // real-valued exponent throughout the factored route, matching f_terms
    const double log_d = std::log(static_cast<double>(params.d));
    const double m_real = params.r * static_cast<double>(params.n) * log_d;
    const double log_ex = static_cast<double>(params.n) * log_d + m_real * std::log1p(-params.p);
    return std::exp(2.0 * log_ex) * sum;
}

double sat_lower_bound_finite(const RBParams& params) {
    return std::exp(2.0 * log_expected_solutions(params)) / second_moment_exact(params);
}

double log_expected_near_miss(const RBParams& params) {
    if (params.m < 1) throw DomainError("expected_near_miss requires m >= 1");
    return static_cast<double>(params.n) * std::log(static_cast<double>(params.d)) +
           static_cast<double>(params.m - 1) * std::log1p(-params.p) + std::log(params.p);
}

double expected_near_miss(const RBParams& params) {
    return std::exp(log_expected_near_miss(params));
}

double near_miss_second_moment_ratio(const RBParams& params) {
    guard_summation(params);
    const double p = params.p;
    double sum = 0.0;
    for (int S = 0; S <= params.n; ++S) {
        const double q = q_ratio(S, params.n, params.k);
        const double num = p * q + p * p * (1.0 - q);
        const double den = (1.0 - p) * q + (1.0 - p) * (1.0 - p) * (1.0 - q);
        sum += num / den;
    }
    return sum;
}

double near_miss_lower_bound_asymptotic(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1), got " + std::to_string(p));
    return p / 3.0;
}

DegreeTail degree_tail_bound(const RBParams& params, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw DomainError("delta must lie in [0,1], got " + std::to_string(delta));
    DegreeTail tail;
    tail.expected_degree =
        params.r * static_cast<double>(params.k) * std::log(static_cast<double>(params.d));
    tail.threshold = (1.0 - delta) * tail.expected_degree;
    tail.prob_bound = std::exp(-delta * delta / 2.0 * tail.expected_degree);
    return tail;
}

double coverage_union_bound(const RBParams& params) {
    const double exponent = 0.5 * params.r * static_cast<double>(params.k) *
                            std::log(static_cast<double>(params.d));
    return static_cast<double>(params.n) * std::exp(exponent * std::log1p(-params.p / 3.0));
}

double coverage_union_bound_base_n(const RBParams& params) {
    const double e = 1.0 + 0.5 * params.alpha * params.r * static_cast<double>(params.k) *
                               std::log1p(-params.p / 3.0);
    return std::pow(static_cast<double>(params.n), e);
}

SolutionMoments mc_solution_moments(const RBParams& params, std::uint64_t trials,
                                    std::uint64_t seed, int jobs) {
    std::vector<double> xs(trials), x2s(trials);
    std::vector<char> sat(trials), unique(trials);
    for_each_trial(trials, jobs, [&](std::uint64_t j) {
        RBParams trial_params = params;
        trial_params.seed = seed + j;
        const SolveResult res = solve(generate_original(trial_params), SolveMode::CountAll);
        const double x = static_cast<double>(*res.count);
        xs[j] = x;
        x2s[j] = x * x;
        sat[j] = res.sat ? 1 : 0;
        unique[j] = *res.count == 1 ? 1 : 0;
    });
    SolutionMoments out;
    out.x = estimate(xs, seed);
    out.x2 = estimate(x2s, seed);
    out.trials = trials;
    out.pr_sat = static_cast<double>(std::count(sat.begin(), sat.end(), 1)) /
                 static_cast<double>(trials);
    out.pr_unique = static_cast<double>(std::count(unique.begin(), unique.end(), 1)) /
                    static_cast<double>(trials);
    return out;
}

McEstimate mc_near_miss_count(const RBParams& params, std::uint64_t trials, std::uint64_t seed,
                              int u, int jobs) {
    std::vector<double> counts(trials);
    for_each_trial(trials, jobs, [&](std::uint64_t j) {
        RBParams trial_params = params;
        trial_params.seed = seed + j;
        const Instance inst = generate_original(trial_params);
        const SolveResult res =
            solve(with_complemented_constraint(inst, u), SolveMode::CountAll);
        counts[j] = static_cast<double>(*res.count);
    });
    return estimate(counts, seed);
}

MomentReport moment_report(const RBParams& params) {
    MomentReport rep;
    rep.params = params;
    rep.r_cr = r_critical(params.p);
    if (params.n >= 3) {
        const Calibration cal = calibrate_r(params.n, params.alpha, params.p);
        rep.epsilon = cal.epsilon;
    }
    rep.log_e_x = log_expected_solutions(params);
    rep.e_x = expected_solutions(params);
    rep.sat_upper = sat_upper_bound(params);
    if (params.n <= kSummationGuard) {
        rep.e_x2 = second_moment_exact(params);
        rep.f_terms = f_terms(params);
        rep.e_x2_f_approx = second_moment_f_approx(params);
        rep.sat_lower_finite = sat_lower_bound_finite(params);
        rep.near_miss_ratio = near_miss_second_moment_ratio(params);
    } else {
        rep.e_x2 = std::numeric_limits<double>::quiet_NaN();
        rep.e_x2_f_approx = std::numeric_limits<double>::quiet_NaN();
        rep.sat_lower_finite = std::numeric_limits<double>::quiet_NaN();
        rep.near_miss_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    rep.log_e_n = log_expected_near_miss(params);
    rep.e_n = expected_near_miss(params);
    rep.near_miss_lower_asymptotic = near_miss_lower_bound_asymptotic(params.p);
    rep.degree = degree_tail_bound(params);
    rep.coverage_bound = coverage_union_bound(params);
    return rep;
}

}  // namespace rblab::moments
