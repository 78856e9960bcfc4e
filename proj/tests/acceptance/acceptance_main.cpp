// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Statistical lines state trials, standard error, and tolerance.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rblab/errors.hpp"
#include "rblab/feasibility.hpp"
#include "rblab/flip.hpp"
#include "rblab/harness.hpp"
#include "rblab/json_io.hpp"
#include "rblab/moments.hpp"
#include "rblab/rng.hpp"
#include "rblab/satenc.hpp"
#include "rblab/solver.hpp"

using namespace rblab;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s criterion-%d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

bool params_preserved(const Instance& before, const Instance& after) {
    if (before.params.n != after.params.n || before.params.d != after.params.d ||
        before.params.k != after.params.k || before.params.m != after.params.m)
        return false;
    if (before.constraints.size() != after.constraints.size()) return false;
    for (std::size_t i = 0; i < before.constraints.size(); ++i) {
        if (before.constraints[i].scope != after.constraints[i].scope) return false;
        if (before.constraints[i].permitted.size() != after.constraints[i].permitted.size())
            return false;
    }
    return true;
}

// ---- criterion 1: phase transition sweep ----------------------------------
void criterion_phase_transition() {
    const auto start = std::chrono::steady_clock::now();
    const double r_cr = moments::r_critical(0.5);
    std::vector<double> r_values;
    for (int i = 0; i <= 12; ++i) r_values.push_back((0.6 + 0.1 * i) * r_cr);
    const auto records = harness::sweep(8, 1.0, 2, 0.5, r_values, 200, 1001, 4);

    const double pr_low = records.front().pr_sat;    // 0.6 r_cr
    const double pr_high = records[10].pr_sat;       // 1.6 r_cr
    // first downward 0.5 crossing, linearly interpolated
    double r_cross = 0.0;
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        if (records[i].pr_sat >= 0.5 && records[i + 1].pr_sat < 0.5) {
            const double span = records[i].pr_sat - records[i + 1].pr_sat;
            const double frac = (records[i].pr_sat - 0.5) / span;
            r_cross = records[i].r + frac * (records[i + 1].r - records[i].r);
            break;
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = pr_low >= 0.9 && pr_high <= 0.1 && r_cross > 0.0 &&
                      std::abs(r_cross - r_cr) <= 0.2 * r_cr && elapsed <= 120.0;
    report(1, pass,
           fmt("phase transition (n=8,d=8,k=2,p=0.5, 200 trials x 13 r): Pr[SAT](0.6 r_cr)=%.3f "
               ">= 0.9; Pr[SAT](1.6 r_cr)=%.3f <= 0.1; crossing r=%.4f within +-20%% of "
               "r_cr=%.4f; runtime %.1fs <= 120s",
               pr_low, pr_high, r_cross, r_cr, elapsed));
}

// ---- criteria 2-4: moment formulas against Monte Carlo ---------------------
void criteria_moments() {
    const RBParams params = derive_params(4, 1.0, 2, 0.5, 1.4427, 0);

    auto start = std::chrono::steady_clock::now();
    const moments::SolutionMoments mc = moments::mc_solution_moments(params, 2000, 90210, 4);
    const double e_x = moments::expected_solutions(params);
    const double elapsed_x = seconds_since(start);
    const double dev_x = std::abs(mc.x.mean - e_x);
    report(2, dev_x <= 3.0 * mc.x.standard_error && elapsed_x <= 30.0,
           fmt("E[X] (n=4,d=4,p=0.5,m=8, 2000 trials): analytic %.6f, MC %.4f +- %.4f SE, "
               "|dev|=%.4f <= 3 SE=%.4f; runtime %.1fs <= 30s",
               e_x, mc.x.mean, mc.x.standard_error, dev_x, 3.0 * mc.x.standard_error, elapsed_x));

    const double e_x2 = moments::second_moment_exact(params);
    const double dev_x2 = std::abs(mc.x2.mean - e_x2);
    report(3, dev_x2 <= 5.0 * mc.x2.standard_error && elapsed_x <= 30.0,
           fmt("E[X^2] (same point, same 2000 trials): summation %.6f, MC %.4f +- %.4f SE, "
               "|dev|=%.4f <= 5 SE=%.4f",
               e_x2, mc.x2.mean, mc.x2.standard_error, dev_x2, 5.0 * mc.x2.standard_error));

    start = std::chrono::steady_clock::now();
    const moments::McEstimate nm = moments::mc_near_miss_count(params, 2000, 90210, 0, 4);
    const double e_n = moments::expected_near_miss(params);
    const double dev_n = std::abs(nm.mean - e_n);
    const double ratio = moments::expected_near_miss(params) / moments::expected_solutions(params);
    const double ratio_sq = ratio * ratio;
    const bool identities =
        std::abs(ratio - params.p / (1.0 - params.p)) <= 1e-12 &&
        std::abs(ratio_sq - std::pow(params.p / (1.0 - params.p), 2)) <= 1e-12;
    report(4, dev_n <= 3.0 * nm.standard_error && identities && seconds_since(start) <= 30.0,
           fmt("E[N] (constraint 0, 2000 trials): analytic %.6f, MC %.4f +- %.4f SE, |dev|=%.4f "
               "<= 3 SE=%.4f; identities E[N]/E[X]=p/(1-p), E[N]^2/E[X]^2=p^2/(1-p)^2 to 1e-12: %s",
               e_n, nm.mean, nm.standard_error, dev_n, 3.0 * nm.standard_error,
               identities ? "hold" : "VIOLATED"));
}

// ---- criterion 5: calibration ----------------------------------------------
void criterion_calibration() {
    const moments::Calibration cal = moments::calibrate_r(12, 1.0, 0.5);
    // real-valued m with d = n^alpha exact
    const double log_d = std::log(12.0);
    const double m_real = cal.r * 12.0 * log_d;
    const double e_x_real = std::exp(12.0 * log_d + m_real * std::log(0.5));
    const bool real_ok = std::abs(e_x_real - 0.5) <= 1e-9;

    const RBParams p12 = derive_params(12, 1.0, 2, 0.5, cal.r, 0);
    const double e_x_int = moments::expected_solutions(p12);
    const double lo = 0.5 * std::sqrt(0.5), hi = 0.5 / std::sqrt(0.5);
    const bool int_ok = e_x_int >= lo && e_x_int <= hi;

    bool empirical_ok = true;
    std::ostringstream emp;
    for (int n : {8, 10, 12}) {
        const moments::Calibration c = moments::calibrate_r(n, 1.0, 0.5);
        const RBParams params = derive_params(n, 1.0, 2, 0.5, c.r, 0);
        std::uint64_t sat = 0;
        for (std::uint64_t trial = 0; trial < 300; ++trial) {
            RBParams tp = params;
            tp.seed = 5000 + trial;
            if (solve(generate_original(tp), SolveMode::Decide).sat) ++sat;
        }
        const double pr = static_cast<double>(sat) / 300.0;
        // finite-n second-moment floor for context: at alpha = 1 it sits far
        // below the asymptotic 1/3 the window was widened from
        const double floor_n = moments::sat_lower_bound_finite(params);
        emp << " n=" << n << ": " << pr << " (exact E[X]^2/E[X^2] floor " << floor_n << ")";
        if (pr < 0.15 || pr > 0.85) empirical_ok = false;
    }
    report(5, real_ok && int_ok && empirical_ok,
           fmt("calibration: real-m E[X]=%.12f within 1e-9 of 0.5 (%s); integer-m E[X]=%.4f in "
               "[%.3f, %.3f] (%s); empirical Pr[SAT] at 300 trials in [0.15, 0.85]:%s (%s)",
               e_x_real, real_ok ? "ok" : "FAIL", e_x_int, lo, hi, int_ok ? "ok" : "FAIL",
               emp.str().c_str(), empirical_ok ? "ok" : "FAIL"));
}

// ---- criteria 6-7: flips in both directions --------------------------------
void criteria_flips() {
    const auto start = std::chrono::steady_clock::now();
    const moments::Calibration cal = moments::calibrate_r(8, 1.0, 0.5);
    const RBParams base = derive_params(8, 1.0, 2, 0.5, cal.r, 0);

    // sat -> unsat on 50 unique-solution instances
    std::uint64_t kills = 0, unsat_after = 0, residual = 0, collected = 0, preserved = 0;
    std::uint64_t seed = 0;
    while (collected < 50 && seed < 50000) {
        RBParams tp = base;
        tp.seed = 20000 + seed++;
        const Instance inst = generate_original(tp);
        const SolveResult res = solve(inst, SolveMode::CheckUnique);
        if (!res.sat || *res.count != 1) continue;
        ++collected;
        const auto [flipped, cert] = flip_sat_to_unsat(inst, *res.witness);
        if (!satisfies(flipped.constraints[static_cast<std::size_t>(cert.u)], *res.witness) &&
            verify_certificate(flipped, cert))
            ++kills;
        if (params_preserved(inst, flipped)) ++preserved;
        if (solve(flipped, SolveMode::Decide).sat)
            ++residual;
        else
            ++unsat_after;
    }
    const double union_bound =
        2.0 * std::exp(6.0 * std::log(8.0) + static_cast<double>(base.m - 1) * std::log(0.5));
    const double residual_rate = static_cast<double>(residual) / 50.0;
    const double se = std::sqrt(union_bound * (1.0 - union_bound) / 50.0);
    const double unsat_rate = static_cast<double>(unsat_after) / 50.0;
    const double elapsed = seconds_since(start);
    const bool pass6 = collected == 50 && kills == 50 && unsat_rate >= 0.90 &&
                       residual_rate <= union_bound + 3.0 * se && elapsed <= 300.0;
    report(6, pass6,
           fmt("flip sat->unsat (n=8,d=8, calibrated m=%lld, 50 flips): kill %llu/50; UNSAT rate "
               "%.2f >= 0.90; residual rate %.3f <= union bound %.4f + 3 SE (SE=%.4f); runtime "
               "%.1fs <= 300s",
               static_cast<long long>(base.m), static_cast<unsigned long long>(kills), unsat_rate,
               residual_rate, union_bound, se, elapsed));

    // unsat -> sat on 50 UNSAT instances admitting a near-miss and pair
    std::uint64_t witness_ok = 0, flips = 0;
    seed = 0;
    while (flips < 50 && seed < 50000) {
        RBParams tp = base;
        tp.seed = 40000 + seed++;
        const Instance inst = generate_original(tp);
        if (solve(inst, SolveMode::Decide).sat) continue;
        for (int u = 0; u < static_cast<int>(inst.constraints.size()); ++u) {
            const auto near = find_near_miss(inst, u);
            if (!near) continue;
            try {
                const auto [flipped, cert] = flip_unsat_to_sat(inst, u, *near);
                ++flips;
                if (satisfies_all(flipped, cert.witness) && verify_certificate(flipped, cert))
                    ++witness_ok;
                if (params_preserved(inst, flipped)) ++preserved;
                break;
            } catch (const NoFlipPairFound&) {
            }
        }
    }
    const bool pass7 = flips == 50 && witness_ok == 50 && preserved == 100;
    report(7, pass7,
           fmt("flip unsat->sat (50 flips): recorded witness satisfies %llu/50; parameters "
               "(n,d,k,m,|R_i|) preserved in %llu/100 flips of criteria 6-7",
               static_cast<unsigned long long>(witness_ok),
               static_cast<unsigned long long>(preserved)));
}

// ---- criterion 8: encoding round trip ---------------------------------------
void criterion_encoding() {
    Rng rng(777);
    std::uint64_t status_agree = 0, models_ok = 0, sat_count = 0;
    for (int it = 0; it < 500; ++it) {
        const int n = 2 + static_cast<int>(rng.below(5));               // 2..6
        const std::int64_t d = 2 + static_cast<std::int64_t>(rng.below(3));  // 2..4
        const double p = 0.25 + 0.25 * static_cast<double>(rng.below(3));
        const double alpha = std::log(static_cast<double>(d)) / std::log(static_cast<double>(n));
        const double r = 0.4 + 0.2 * static_cast<double>(rng.below(8));
        const RBParams params = derive_params(n, alpha, 2, p, r, rng.next());
        const Instance inst = generate_original(params);
        const satenc::Cnf cnf = satenc::encode(inst);
        const bool truth = enumerate_oracle(inst).sat;
        const satenc::DpllResult res = satenc::dpll_sat(cnf);
        if (res.sat == truth) ++status_agree;
        if (res.sat) {
            ++sat_count;
            if (satisfies_all(inst, satenc::decode(cnf, res.model))) ++models_ok;
        }
    }
    std::uint64_t dimacs_ok = 0;
    for (int it = 0; it < 100; ++it) {
        satenc::Cnf cnf;
        cnf.num_vars = 1 + static_cast<int>(rng.below(10));
        const int m = static_cast<int>(rng.below(25));
        for (int i = 0; i < m; ++i) {
            std::vector<int> clause;
            const int len = 1 + static_cast<int>(rng.below(4));
            for (int j = 0; j < len; ++j) {
                const int v =
                    1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cnf.num_vars)));
                clause.push_back(rng.below(2) ? v : -v);
            }
            cnf.clauses.push_back(std::move(clause));
        }
        std::ostringstream out;
        satenc::write_dimacs(cnf, out);
        std::istringstream in(out.str());
        const satenc::Cnf back = satenc::read_dimacs(in);
        if (back.num_vars == cnf.num_vars && back.clauses == cnf.clauses) ++dimacs_ok;
    }
    report(8, status_agree == 500 && models_ok == sat_count && dimacs_ok == 100,
           fmt("encoding (500 random instances, n<=6, d in {2,3,4}): CSP/DPLL status agrees "
               "%llu/500; %llu/%llu SAT models decode to verified solutions; DIMACS round trip "
               "%llu/100",
               static_cast<unsigned long long>(status_agree),
               static_cast<unsigned long long>(models_ok),
               static_cast<unsigned long long>(sat_count),
               static_cast<unsigned long long>(dimacs_ok)));
}

// ---- criterion 9: feasibility checker ---------------------------------------
void criterion_feasibility() {
    const auto good = feasibility::check(100, 3.0, 3, 0.5);
    const auto bad5 = feasibility::check(100, 2.0, 3, 0.5);
    std::vector<int> bad5_failing;
    for (const auto& c : bad5.conditions)
        if (!c.pass) bad5_failing.push_back(c.id);
    const auto badk = feasibility::check(100, 3.0, 1, 0.5);
    const bool k1_flags_c1 = !badk.overall && !badk.conditions[0].pass;

    bool upward = true, seen_pass = false;
    for (double alpha = 1.0; alpha <= 6.0 + 1e-9; alpha += 0.25) {
        const bool pass = feasibility::check(100, alpha, 3, 0.5).overall;
        if (seen_pass && !pass) upward = false;
        seen_pass = seen_pass || pass;
    }
    const bool pass = good.overall && bad5_failing == std::vector<int>{5} && k1_flags_c1 &&
                      upward && seen_pass;
    report(9, pass,
           fmt("feasibility: (100,3,3,0.5) accepted (%s); (100,2,3,0.5) rejected flagging exactly "
               "condition 5 (%s); k=1 rejected flagging condition 1 (%s); upward closure on the "
               "alpha grid (%s)",
               good.overall ? "ok" : "FAIL", bad5_failing == std::vector<int>{5} ? "ok" : "FAIL",
               k1_flags_c1 ? "ok" : "FAIL", upward && seen_pass ? "ok" : "FAIL"));
}

// ---- criterion 10: oracle equivalence ----------------------------------------
void criterion_oracle() {
    Rng rng(271828);
    std::uint64_t agree = 0;
    for (int it = 0; it < 1000; ++it) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const std::int64_t d = 2 + static_cast<std::int64_t>(rng.below(3));
        const int k = (n >= 3 && rng.below(4) == 0) ? 3 : 2;
        const double p = 0.25 + 0.25 * static_cast<double>(rng.below(3));
        const double alpha = std::log(static_cast<double>(d)) / std::log(static_cast<double>(n));
        const double r = 0.4 + 0.2 * static_cast<double>(rng.below(8));
        const RBParams params = derive_params(n, alpha, k, p, r, rng.next());
        const Instance inst = generate_original(params);
        if (*solve(inst, SolveMode::CountAll).count == *enumerate_oracle(inst).count) ++agree;
    }
    report(10, agree == 1000,
           fmt("oracle equivalence: backtracking count == full enumeration on %llu/1000 random "
               "instances",
               static_cast<unsigned long long>(agree)));
}

// ---- criterion 11: asymptotics trend + Chernoff ------------------------------
void criterion_asymptotics() {
    double prev = 1.0;
    bool decreasing = true;
    std::ostringstream gaps;
    for (int n : {10, 100, 1000}) {
        const moments::BinomRatio br = moments::binom_ratio(n / 2, n, 2);
        const double gap = std::abs(br.exact - br.asymptotic);
        gaps << " n=" << n << ": " << gap;
        if (gap >= prev) decreasing = false;
        prev = gap;
    }
    const RBParams params = derive_params(8, 1.0, 3, 0.5, 1.4427, 0);
    const harness::DegreeReport deg = harness::degree_experiment(params, 10000, 31337, 4);
    const bool chernoff = deg.empirical_rate <= deg.prob_bound + 3.0 * deg.se;
    report(11, decreasing && chernoff,
           fmt("asymptotics: |C(S,k)/C(n,k) - s^k| at s=0.5,k=2 strictly decreases (%s:%s); "
               "Chernoff over 10^4 instances: Pr[deg <= %.3f] = %.4f <= bound %.4f + 3 SE "
               "(SE=%.4f) (%s)",
               decreasing ? "ok" : "FAIL", gaps.str().c_str(), deg.threshold, deg.empirical_rate,
               deg.prob_bound, deg.se, chernoff ? "ok" : "FAIL"));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_phase_transition();
    criteria_moments();
    criterion_calibration();
    criteria_flips();
    criterion_encoding();
    criterion_feasibility();
    criterion_oracle();
    criterion_asymptotics();
    std::printf("acceptance: %d criteria failed (total runtime %.1fs)\n", g_failures,
                seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
