#include "rblab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "rblab/errors.hpp"
#include "rblab/flip.hpp"
#include "rblab/instance.hpp"
#include "rblab/moments.hpp"

namespace rblab::harness {

namespace {

using json = nlohmann::ordered_json;

void parallel_indices(std::uint64_t begin, std::uint64_t end, int jobs, auto&& fn) {
    if (jobs <= 1 || end - begin <= 1) {
        for (std::uint64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    const std::uint64_t span = end - begin;
    const int lanes = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), span));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(lanes));
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int lane = 0; lane < lanes; ++lane) {
        workers.emplace_back([&, lane] {
            try {
                for (std::uint64_t i = begin + static_cast<std::uint64_t>(lane); i < end;
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

// Rejection sampling in index order: classify(i) either yields a sample or
// not; samples are consumed strictly by attempt index until consume() says
// it has enough, so the outcome is identical at any jobs value (blocks past
// the stopping index are computed and discarded). Returns the number of
// attempts examined. Throws SamplingExhausted at the attempt cap.
template <typename Sample, typename Classify, typename Consume>
std::uint64_t block_scan(std::uint64_t attempt_cap, int jobs, Classify&& classify,
                         Consume&& consume) {
    const std::uint64_t block = std::max<std::uint64_t>(64, static_cast<std::uint64_t>(jobs) * 16);
    std::vector<std::optional<Sample>> slots;
    for (std::uint64_t start = 0; start < attempt_cap; start += block) {
        const std::uint64_t end = std::min(attempt_cap, start + block);
        slots.assign(end - start, std::nullopt);
        parallel_indices(start, end, jobs, [&](std::uint64_t i) { slots[i - start] = classify(i); });
        for (std::uint64_t i = start; i < end; ++i) {
            if (!slots[i - start]) continue;
            if (consume(std::move(*slots[i - start]))) return i + 1;
        }
    }
    throw SamplingExhausted("rejection sampling did not find enough filtered instances within " +
                            std::to_string(attempt_cap) + " attempts");
}

// block_scan specialization: collect exactly `wanted` samples.
template <typename Sample, typename Classify>
std::uint64_t collect_by_rejection(std::uint64_t wanted, std::uint64_t attempt_cap, int jobs,
                                   Classify&& classify, std::vector<Sample>& out) {
    return block_scan<Sample>(attempt_cap, jobs, std::forward<Classify>(classify),
                              [&](Sample&& s) {
                                  out.push_back(std::move(s));
                                  return out.size() == wanted;
                              });
}

double binomial_se(double rate, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::vector<SweepRecord> sweep(int n, double alpha, int k, double p,
                               const std::vector<double>& r_values, std::uint64_t trials,
                               std::uint64_t seed, int jobs, std::uint64_t node_budget) {
    if (trials == 0) throw DomainError("sweep requires trials >= 1");
    std::vector<SweepRecord> records;
    records.reserve(r_values.size());
    for (double r : r_values) {
        const RBParams params = derive_params(n, alpha, k, p, r, seed);
        struct Trial {
            std::uint64_t count = 0;
            std::uint64_t nodes = 0;
            bool exceeded = false;
        };
        std::vector<Trial> results(trials);
        parallel_indices(0, trials, jobs, [&](std::uint64_t j) {
            RBParams tp = params;
            tp.seed = seed + j;
            try {
                const SolveResult res = solve(generate_original(tp), SolveMode::CountAll, node_budget);
                results[j] = {*res.count, res.nodes_expanded, false};
            } catch (const BudgetExceeded& e) {
                results[j] = {0, e.nodes, true};
            }
        });

        SweepRecord rec;
        rec.r = r;
        rec.n = n;
        rec.d = params.d;
        rec.trials = trials;
        std::uint64_t decided = 0;
        double sum = 0.0, nodes_sum = 0.0;
        for (const Trial& t : results) {
            if (t.exceeded) {
                ++rec.budget_exceeded;
                continue;
            }
            ++decided;
            if (t.count > 0) ++rec.sat_count;
            sum += static_cast<double>(t.count);
            nodes_sum += static_cast<double>(t.nodes);
        }
        if (decided > 0) {
            rec.pr_sat = static_cast<double>(rec.sat_count) / static_cast<double>(decided);
            rec.mean_solution_count = sum / static_cast<double>(decided);
            rec.mean_nodes = nodes_sum / static_cast<double>(decided);
            if (decided >= 2) {
                double ss = 0.0;
                for (const Trial& t : results)
                    if (!t.exceeded) {
                        const double delta = static_cast<double>(t.count) - rec.mean_solution_count;
                        ss += delta * delta;
                    }
                rec.se = std::sqrt(ss / static_cast<double>(decided - 1) /
                                   static_cast<double>(decided));
            }
        }
        records.push_back(rec);
    }
    return records;
}

FlipReport flip_experiment_sat_to_unsat(int n, double alpha, double p, std::uint64_t trials,
                                        std::uint64_t seed, int k, int jobs,
                                        std::uint64_t node_budget, std::uint64_t attempt_cap) {
    const moments::Calibration cal = moments::calibrate_r(n, alpha, p);
    const RBParams base = derive_params(n, alpha, k, p, cal.r, seed);
    if (attempt_cap == 0) attempt_cap = trials * 400;

    struct UniqueInstance {
        Instance inst;
        Assignment solution;
    };
    std::vector<UniqueInstance> uniques;
    FlipReport rep;
    rep.direction = "sat_to_unsat";
    rep.attempted = collect_by_rejection<UniqueInstance>(
        trials, attempt_cap, jobs,
        [&](std::uint64_t i) -> std::optional<UniqueInstance> {
            RBParams tp = base;
            tp.seed = seed + i;
            Instance inst = generate_original(tp);
            const SolveResult res = solve(inst, SolveMode::CheckUnique, node_budget);
            if (!res.sat || *res.count != 1) return std::nullopt;
            return UniqueInstance{std::move(inst), *res.witness};
        },
        uniques);

    for (const UniqueInstance& u : uniques) {
        Instance flipped;
        FlipCertificate cert;
        try {
            std::tie(flipped, cert) = flip_sat_to_unsat(u.inst, u.solution);
        } catch (const NoFlipPairFound&) {
            continue;
        }
        ++rep.flip_found;
        const Constraint& cu = flipped.constraints[static_cast<std::size_t>(cert.u)];
        if (!satisfies(cu, u.solution) && verify_certificate(flipped, cert)) ++rep.kill_confirmed;
        const SolveResult after = solve(flipped, SolveMode::Decide, node_budget);
        if (!after.sat) ++rep.unsat_after_flip;
    }
    if (rep.flip_found > 0)
        rep.residual_new_solution_rate =
            static_cast<double>(rep.flip_found - rep.unsat_after_flip) /
            static_cast<double>(rep.flip_found);
    // Turn-60 union bound on residual solutions, 2 d^{n-2} (1-p)^{m-1};
    // equals (1-p)^{-1} / d^2 exactly at the E[X] = 1/2 calibration.
    rep.union_bound_value =
        2.0 * std::exp(static_cast<double>(n - 2) * std::log(static_cast<double>(base.d)) +
                       static_cast<double>(base.m - 1) * std::log1p(-p));
    rep.near_miss_asymptote = p / 3.0;
    return rep;
}

FlipReport flip_experiment_unsat_to_sat(int n, double alpha, double p, std::uint64_t trials,
                                        std::uint64_t seed, int k, int jobs,
                                        std::uint64_t node_budget, std::uint64_t attempt_cap) {
    const moments::Calibration cal = moments::calibrate_r(n, alpha, p);
    const RBParams base = derive_params(n, alpha, k, p, cal.r, seed);
    if (attempt_cap == 0) attempt_cap = trials * 400;

    // One record per sampled UNSAT instance; collection runs until `trials`
    // of them carried both a near-miss and a qualifying tuple pair.
    struct UnsatOutcome {
        bool c0_near_miss = false;
        bool flipped = false;
        bool witness_ok = false;
        bool resolved_sat = false;
    };
    FlipReport rep;
    rep.direction = "unsat_to_sat";
    std::uint64_t unsat_seen = 0, with_c0_near_miss = 0;
    rep.attempted = block_scan<UnsatOutcome>(
        attempt_cap, jobs,
        [&](std::uint64_t i) -> std::optional<UnsatOutcome> {
            RBParams tp = base;
            tp.seed = seed + i;
            const Instance inst = generate_original(tp);
            if (solve(inst, SolveMode::Decide, node_budget).sat) return std::nullopt;
            UnsatOutcome outcome;
            for (int u = 0; u < static_cast<int>(inst.constraints.size()); ++u) {
                const std::optional<Assignment> near_miss = find_near_miss(inst, u, node_budget);
                if (u == 0) outcome.c0_near_miss = near_miss.has_value();
                if (!near_miss) continue;
                try {
                    auto [flipped, cert] = flip_unsat_to_sat(inst, u, *near_miss);
                    outcome.flipped = true;
                    outcome.witness_ok =
                        satisfies_all(flipped, cert.witness) && verify_certificate(flipped, cert);
                    outcome.resolved_sat = solve(flipped, SolveMode::Decide, node_budget).sat;
                    break;
                } catch (const NoFlipPairFound&) {
                    // no qualifying pair at this constraint, try the next
                }
            }
            return outcome;
        },
        [&](UnsatOutcome&& outcome) {
            ++unsat_seen;
            if (outcome.c0_near_miss) ++with_c0_near_miss;
            if (!outcome.flipped) return false;
            ++rep.flip_found;
            if (outcome.witness_ok) ++rep.kill_confirmed;
            if (outcome.resolved_sat) ++rep.sat_after_flip;
            return rep.flip_found == trials;
        });
    rep.near_miss_c0_rate =
        unsat_seen > 0 ? static_cast<double>(with_c0_near_miss) / static_cast<double>(unsat_seen)
                       : 0.0;
    rep.near_miss_asymptote = p / 3.0;
    rep.union_bound_value =
        2.0 * std::exp(static_cast<double>(n - 2) * std::log(static_cast<double>(base.d)) +
                       static_cast<double>(base.m - 1) * std::log1p(-p));
    return rep;
}

CoverageReport coverage_experiment(int n, double alpha, int k, double p, std::uint64_t trials,
                                   std::uint64_t seed, int jobs, std::uint64_t node_budget,
                                   std::uint64_t attempt_cap) {
    const moments::Calibration cal = moments::calibrate_r(n, alpha, p);
    const RBParams base = derive_params(n, alpha, k, p, cal.r, seed);
    if (attempt_cap == 0) attempt_cap = trials * 400;

    std::vector<Instance> unsats;
    CoverageReport rep;
    rep.n = n;
    rep.d = base.d;
    rep.k = k;
    rep.p = p;
    rep.r = cal.r;
    rep.trials = trials;
    rep.attempted = collect_by_rejection<Instance>(
        trials, attempt_cap, jobs,
        [&](std::uint64_t i) -> std::optional<Instance> {
            RBParams tp = base;
            tp.seed = seed + i;
            Instance inst = generate_original(tp);
            if (solve(inst, SolveMode::Decide, node_budget).sat) return std::nullopt;
            return inst;
        },
        unsats);

    std::vector<char> covered_flags(unsats.size(), 0);
    parallel_indices(0, unsats.size(), jobs, [&](std::uint64_t idx) {
        const Instance& inst = unsats[idx];
        std::vector<char> var_covered(static_cast<std::size_t>(n), 0);
        for (int u = 0; u < static_cast<int>(inst.constraints.size()); ++u) {
            if (find_near_miss(inst, u, node_budget)) {
                for (int var : inst.constraints[static_cast<std::size_t>(u)].scope)
                    var_covered[static_cast<std::size_t>(var)] = 1;
            }
        }
        covered_flags[idx] =
            std::all_of(var_covered.begin(), var_covered.end(), [](char c) { return c != 0; }) ? 1
                                                                                               : 0;
    });
    rep.fully_covered =
        static_cast<std::uint64_t>(std::count(covered_flags.begin(), covered_flags.end(), 1));
    rep.covered_fraction =
        trials > 0 ? static_cast<double>(rep.fully_covered) / static_cast<double>(trials) : 0.0;
    rep.union_bound = moments::coverage_union_bound(base);
    rep.one_minus_bound = 1.0 - rep.union_bound;
    return rep;
}

DegreeReport degree_experiment(const RBParams& params, std::uint64_t trials, std::uint64_t seed,
                               int jobs) {
    const moments::DegreeTail tail = moments::degree_tail_bound(params);
    DegreeReport rep;
    rep.expected_degree = tail.expected_degree;
    rep.threshold = tail.threshold;
    rep.prob_bound = tail.prob_bound;
    rep.trials = trials;

    std::vector<char> below(trials, 0);
    parallel_indices(0, trials, jobs, [&](std::uint64_t j) {
        RBParams tp = params;
        tp.seed = seed + j;
        std::uint64_t degree = 0;
        for (const auto& scope : sample_scopes(tp))
            if (std::find(scope.begin(), scope.end(), 0) != scope.end()) ++degree;
        below[j] = static_cast<double>(degree) <= rep.threshold ? 1 : 0;
    });
    rep.below_threshold = static_cast<std::uint64_t>(std::count(below.begin(), below.end(), 1));
    rep.empirical_rate =
        trials > 0 ? static_cast<double>(rep.below_threshold) / static_cast<double>(trials) : 0.0;
    rep.se = binomial_se(rep.empirical_rate, trials);
    return rep;
}

void write_sweep_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
    out << "r,n,d,trials,sat_count,pr_sat,mean_solution_count,se,mean_nodes,budget_exceeded\n";
    for (const SweepRecord& rec : records) {
        out << fmt(rec.r) << "," << rec.n << "," << rec.d << "," << rec.trials << ","
            << rec.sat_count << "," << fmt(rec.pr_sat) << "," << fmt(rec.mean_solution_count)
            << "," << fmt(rec.se) << "," << fmt(rec.mean_nodes) << "," << rec.budget_exceeded
            << "\n";
    }
}

void write_flip_csv(const FlipReport& rep, std::ostream& out) {
    out << "direction,attempted,flip_found,kill_confirmed,unsat_after_flip,sat_after_flip,"
           "residual_new_solution_rate,union_bound_value,near_miss_c0_rate,near_miss_asymptote\n";
    out << rep.direction << "," << rep.attempted << "," << rep.flip_found << ","
        << rep.kill_confirmed << "," << rep.unsat_after_flip << "," << rep.sat_after_flip << ","
        << fmt(rep.residual_new_solution_rate) << "," << fmt(rep.union_bound_value) << ","
        << fmt(rep.near_miss_c0_rate) << "," << fmt(rep.near_miss_asymptote) << "\n";
}

void write_coverage_csv(const CoverageReport& rep, std::ostream& out) {
    out << "n,d,k,p,r,trials,attempted,fully_covered,covered_fraction,union_bound,"
           "one_minus_bound\n";
    out << rep.n << "," << rep.d << "," << rep.k << "," << fmt(rep.p) << "," << fmt(rep.r) << ","
        << rep.trials << "," << rep.attempted << "," << rep.fully_covered << ","
        << fmt(rep.covered_fraction) << "," << fmt(rep.union_bound) << ","
        << fmt(rep.one_minus_bound) << "\n";
}

void write_degree_csv(const DegreeReport& rep, std::ostream& out) {
    out << "expected_degree,threshold,prob_bound,trials,below_threshold,empirical_rate,se\n";
    out << fmt(rep.expected_degree) << "," << fmt(rep.threshold) << "," << fmt(rep.prob_bound)
        << "," << rep.trials << "," << rep.below_threshold << "," << fmt(rep.empirical_rate) << ","
        << fmt(rep.se) << "\n";
}

std::string sweep_json(const std::vector<SweepRecord>& records) {
    json arr = json::array();
    for (const SweepRecord& rec : records) {
        json j;
        j["r"] = rec.r;
        j["n"] = rec.n;
        j["d"] = rec.d;
        j["trials"] = rec.trials;
        j["sat_count"] = rec.sat_count;
        j["pr_sat"] = rec.pr_sat;
        j["mean_solution_count"] = rec.mean_solution_count;
        j["se"] = rec.se;
        j["mean_nodes"] = rec.mean_nodes;
        j["budget_exceeded"] = rec.budget_exceeded;
        arr.push_back(std::move(j));
    }
    return json{{"records", std::move(arr)}}.dump(2) + "\n";
}

std::string flip_json(const FlipReport& rep) {
    json j;
    j["direction"] = rep.direction;
    j["attempted"] = rep.attempted;
    j["flip_found"] = rep.flip_found;
    j["kill_confirmed"] = rep.kill_confirmed;
    j["unsat_after_flip"] = rep.unsat_after_flip;
    j["sat_after_flip"] = rep.sat_after_flip;
    j["residual_new_solution_rate"] = rep.residual_new_solution_rate;
    j["union_bound_value"] = rep.union_bound_value;
    j["near_miss_c0_rate"] = rep.near_miss_c0_rate;
    j["near_miss_asymptote"] = rep.near_miss_asymptote;
    return j.dump(2) + "\n";
}

std::string coverage_json(const CoverageReport& rep) {
    json j;
    j["n"] = rep.n;
    j["d"] = rep.d;
    j["k"] = rep.k;
    j["p"] = rep.p;
    j["r"] = rep.r;
    j["trials"] = rep.trials;
    j["attempted"] = rep.attempted;
    j["fully_covered"] = rep.fully_covered;
    j["covered_fraction"] = rep.covered_fraction;
    j["union_bound"] = rep.union_bound;
    j["one_minus_bound"] = rep.one_minus_bound;
    return j.dump(2) + "\n";
}

std::string degree_json(const DegreeReport& rep) {
    json j;
    j["expected_degree"] = rep.expected_degree;
    j["threshold"] = rep.threshold;
    j["prob_bound"] = rep.prob_bound;
    j["trials"] = rep.trials;
    j["below_threshold"] = rep.below_threshold;
    j["empirical_rate"] = rep.empirical_rate;
    j["se"] = rep.se;
    return j.dump(2) + "\n";
}

}  // namespace rblab::harness
