#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rblab/errors.hpp"
#include "rblab/feasibility.hpp"
#include "rblab/flip.hpp"
#include "rblab/harness.hpp"
#include "rblab/json_io.hpp"
#include "rblab/moments.hpp"
#include "rblab/satenc.hpp"
#include "rblab/solver.hpp"

namespace {

using namespace rblab;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitBudget = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUsage = 64;

std::uint64_t node_budget_from_env() {
    if (const char* env = std::getenv("RBLAB_NODE_BUDGET")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw DomainError("RBLAB_NODE_BUDGET is not a valid integer: " + std::string(env));
        }
    }
    return kDefaultNodeBudget;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open " + path + " for writing");
    out << content;
}

// <stem>.json next to a csv output path, for the summary twin
std::string sibling_json(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    if (dot == std::string::npos || csv_path.substr(dot) == ".json") return csv_path + ".summary.json";
    return csv_path.substr(0, dot) + ".json";
}

// Output paths are validated before any long computation starts.
void ensure_writable(const std::string& path) {
    std::ofstream probe(path, std::ios::binary | std::ios::app);
    if (!probe) throw DomainError("cannot open " + path + " for writing");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

// Single-level key=value config support: keys expand to --key value arguments
// appended after the explicit command line: flags given explicitly win, and
// unknown keys surface as unknown-flag usage errors.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));

    std::ifstream in(config_path);
    if (!in) throw DomainError("cannot open config file " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = "--" + trim(stripped.substr(0, eq));
        if (given.count(key)) continue;  // explicit flag wins
        args.push_back(key);
        std::istringstream values(trim(stripped.substr(eq + 1)));
        for (std::string token; values >> token;) args.push_back(token);
    }
    return args;
}

struct ParamFlags {
    int n = 0;
    double alpha = 1.0;
    int k = 2;
    double p = 0.5;
    double r = 0.0;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd, bool with_r = true) {
        cmd->add_option("--n", n, "variable count")->required();
        cmd->add_option("--alpha", alpha, "domain exponent (d = round(n^alpha))")->required();
        cmd->add_option("--k", k, "constraint arity");
        cmd->add_option("--p", p, "constraint tightness in (0,1)")->required();
        if (with_r) cmd->add_option("--r", r, "constraint density")->required();
        cmd->add_option("--seed", seed, "64-bit reproducibility seed");
    }
    RBParams derive() const { return derive_params(n, alpha, k, p, r, seed); }
};

int run(int argc, char** argv) {
    CLI::App app{"Model RB laboratory: generation, solving, flips, analytics, encoding"};
    app.require_subcommand(1);
    app.footer("Environment: RBLAB_NODE_BUDGET overrides the default solver node budget.");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance and write it as JSON");
    ParamFlags gen_flags;
    gen_flags.attach(gen);
    std::string gen_out;
    std::string gen_variant = "original";
    std::uint64_t gen_rstar_seed = 0;
    bool gen_rstar_seed_set = false;
    gen->add_option("--out", gen_out, "output instance path (.json)")->required();
    gen->add_option("--variant", gen_variant, "original | symmetric")
        ->check(CLI::IsMember({"original", "symmetric"}));
    gen->add_option("--rstar-seed", gen_rstar_seed, "seed of the shared symmetric relation")
        ->each([&](const std::string&) { gen_rstar_seed_set = true; });

    // solve / count
    auto* solve_cmd = app.add_subcommand("solve", "decide or count an instance file");
    std::string solve_in, solve_mode = "decide";
    solve_cmd->add_option("--in", solve_in, "instance path")->required();
    solve_cmd->add_option("--mode", solve_mode, "decide | count | unique")
        ->check(CLI::IsMember({"decide", "count", "unique"}));
    auto* count_cmd = app.add_subcommand("count", "exact solution count (solve --mode count)");
    std::string count_in;
    count_cmd->add_option("--in", count_in, "instance path")->required();

    // flip
    auto* flip_cmd = app.add_subcommand("flip", "apply the satisfiability-changing tuple swap");
    std::string flip_in, flip_out, flip_cert_path, flip_direction;
    flip_cmd->add_option("--in", flip_in, "instance path")->required();
    flip_cmd->add_option("--direction", flip_direction, "sat2unsat | unsat2sat")
        ->required()
        ->check(CLI::IsMember({"sat2unsat", "unsat2sat"}));
    flip_cmd->add_option("--out", flip_out, "flipped instance path")->required();
    flip_cmd->add_option("--cert", flip_cert_path, "certificate output path (.json)");

    // near-miss
    auto* near_cmd = app.add_subcommand("near-miss",
                                        "assignment satisfying all constraints except --u");
    std::string near_in;
    int near_u = 0;
    near_cmd->add_option("--in", near_in, "instance path")->required();
    near_cmd->add_option("--u", near_u, "constraint index (1-based)")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "satisfiability sweep over densities r");
    ParamFlags sweep_flags;
    sweep_flags.attach(sweep_cmd, /*with_r=*/false);
    std::vector<double> sweep_rs;
    std::uint64_t sweep_trials = 100;
    int sweep_jobs = 1;
    std::string sweep_out;
    sweep_cmd->add_option("--r-values", sweep_rs, "densities to sweep")->required()->expected(-1);
    sweep_cmd->add_option("--trials", sweep_trials, "instances per density");
    sweep_cmd->add_option("--jobs", sweep_jobs, "worker threads (same output at any value)");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path (JSON summary written alongside)")
        ->required();

    // flip-exp
    auto* fexp_cmd = app.add_subcommand("flip-exp", "flip experiment at the calibrated density");
    int fexp_n = 8;
    double fexp_alpha = 1.0, fexp_p = 0.5;
    std::uint64_t fexp_trials = 50, fexp_seed = 0;
    int fexp_jobs = 1;
    std::string fexp_direction, fexp_out;
    fexp_cmd->add_option("--direction", fexp_direction, "sat2unsat | unsat2sat")
        ->required()
        ->check(CLI::IsMember({"sat2unsat", "unsat2sat"}));
    fexp_cmd->add_option("--n", fexp_n, "variable count");
    fexp_cmd->add_option("--alpha", fexp_alpha, "domain exponent");
    fexp_cmd->add_option("--p", fexp_p, "constraint tightness");
    fexp_cmd->add_option("--trials", fexp_trials, "filtered instances to flip");
    fexp_cmd->add_option("--seed", fexp_seed, "seed");
    fexp_cmd->add_option("--jobs", fexp_jobs, "worker threads");
    fexp_cmd->add_option("--out", fexp_out, "CSV output path")->required();

    // coverage-exp
    auto* cov_cmd = app.add_subcommand("coverage-exp",
                                       "self-unsatisfiable-constraint coverage on UNSAT samples");
    int cov_n = 6, cov_k = 2, cov_jobs = 1;
    double cov_alpha = 1.0, cov_p = 0.5;
    std::uint64_t cov_trials = 20, cov_seed = 0;
    std::string cov_out;
    cov_cmd->add_option("--n", cov_n, "variable count");
    cov_cmd->add_option("--alpha", cov_alpha, "domain exponent");
    cov_cmd->add_option("--k", cov_k, "constraint arity");
    cov_cmd->add_option("--p", cov_p, "constraint tightness");
    cov_cmd->add_option("--trials", cov_trials, "UNSAT instances to examine");
    cov_cmd->add_option("--seed", cov_seed, "seed");
    cov_cmd->add_option("--jobs", cov_jobs, "worker threads");
    cov_cmd->add_option("--out", cov_out, "CSV output path")->required();

    // moments
    auto* mom_cmd = app.add_subcommand("moments", "analytic quantities for one parameter point");
    ParamFlags mom_flags;
    mom_flags.attach(mom_cmd);
    std::string mom_out;
    std::uint64_t mom_trials = 0;
    int mom_jobs = 1;
    mom_cmd->add_option("--out", mom_out, "JSON output path (stdout when omitted)");
    mom_cmd->add_option("--trials", mom_trials,
                        "when > 0, add Monte Carlo estimates over this many instances");
    mom_cmd->add_option("--jobs", mom_jobs, "worker threads for the Monte Carlo block");

    // check-params
    auto* chk_cmd = app.add_subcommand("check-params",
                                       "verdict table for the five parameter conditions");
    int chk_n = 100, chk_k = 3;
    double chk_alpha = 3.0, chk_p = 0.5;
    chk_cmd->add_option("--n", chk_n, "variable count")->required();
    chk_cmd->add_option("--alpha", chk_alpha, "domain exponent")->required();
    chk_cmd->add_option("--k", chk_k, "constraint arity")->required();
    chk_cmd->add_option("--p", chk_p, "constraint tightness")->required();

    // encode
    auto* enc_cmd = app.add_subcommand("encode", "log-encode an instance into DIMACS CNF");
    std::string enc_in, enc_out;
    std::uint64_t enc_budget = 5'000'000;
    enc_cmd->add_option("--in", enc_in, "instance path")->required();
    enc_cmd->add_option("--out", enc_out, "DIMACS output path (.cnf)")->required();
    enc_cmd->add_option("--clause-budget", enc_budget, "maximum clauses before SizeError");

    std::string config_path;
    for (CLI::App* sub : app.get_subcommands(nullptr))
        sub->add_option("--config", config_path,
                        "single-level key=value config file; explicit flags win");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes in reverse
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the per-flag diagnostic
        return kExitUsage;
    }
    const std::uint64_t budget = node_budget_from_env();

    if (gen->parsed()) {
        const RBParams params = gen_flags.derive();
        Instance inst;
        if (gen_variant == "original") {
            inst = generate_original(params);
        } else {
            const SymmetricRelation rstar = generate_symmetric_relation(
                params.d, params.k, params.t, gen_rstar_seed_set ? gen_rstar_seed : params.seed);
            inst = instantiate_symmetric(params, rstar);
        }
        write_file(gen_out, instance_to_json(inst));
        std::printf("gen: n=%d d=%lld k=%d m=%lld variant=%s -> %s\n", params.n,
                    static_cast<long long>(params.d), params.k,
                    static_cast<long long>(params.m), gen_variant.c_str(), gen_out.c_str());
        return kExitOk;
    }

    if (solve_cmd->parsed() || count_cmd->parsed()) {
        const std::string path = solve_cmd->parsed() ? solve_in : count_in;
        const std::string mode_name = solve_cmd->parsed() ? solve_mode : "count";
        const Instance inst = instance_from_json(read_file(path));
        const SolveMode mode = mode_name == "decide"  ? SolveMode::Decide
                               : mode_name == "count" ? SolveMode::CountAll
                                                      : SolveMode::CheckUnique;
        const SolveResult res = solve(inst, mode, budget);
        std::string count_text = res.count ? std::to_string(*res.count) : "-";
        std::printf("solve: %s mode=%s status=%s count=%s nodes=%llu\n", path.c_str(),
                    mode_name.c_str(), res.sat ? "SAT" : "UNSAT", count_text.c_str(),
                    static_cast<unsigned long long>(res.nodes_expanded));
        return kExitOk;
    }

    if (flip_cmd->parsed()) {
        const Instance inst = instance_from_json(read_file(flip_in));
        Instance flipped;
        FlipCertificate cert;
        if (flip_direction == "sat2unsat") {
            const SolveResult res = solve(inst, SolveMode::CheckUnique, budget);
            if (!res.sat) throw DomainError("sat2unsat flip needs a satisfiable instance");
            if (*res.count != 1)
                throw DomainError("sat2unsat flip needs a unique-solution instance");
            std::tie(flipped, cert) = flip_sat_to_unsat(inst, *res.witness);
        } else {
            bool done = false;
            for (int u = 0; u < static_cast<int>(inst.constraints.size()) && !done; ++u) {
                const auto near_miss = find_near_miss(inst, u, budget);
                if (!near_miss) continue;
                try {
                    std::tie(flipped, cert) = flip_unsat_to_sat(inst, u, *near_miss);
                    done = true;
                } catch (const NoFlipPairFound&) {
                }
            }
            if (!done)
                throw NoFlipPairFound("no constraint admits a near-miss with a qualifying pair");
        }
        write_file(flip_out, instance_to_json(flipped));
        if (!flip_cert_path.empty()) write_file(flip_cert_path, certificate_to_json(cert));
        std::printf("flip: %s u=%d a=(%d,%d) b=(%d,%d) -> %s\n", flip_direction.c_str(),
                    cert.u + 1, cert.a[0] + 1, cert.a[1] + 1, cert.b[0] + 1, cert.b[1] + 1,
                    flip_out.c_str());
        return kExitOk;
    }

    if (near_cmd->parsed()) {
        const Instance inst = instance_from_json(read_file(near_in));
        if (near_u < 1 || near_u > static_cast<int>(inst.constraints.size()))
            throw DomainError("--u must lie in [1, m]");
        const auto near = find_near_miss(inst, near_u - 1, budget);
        if (!near) {
            std::printf("near-miss: u=%d NotFound\n", near_u);
            return kExitOk;
        }
        std::string values;
        for (Value v : *near) values += std::to_string(v + 1) + " ";
        std::printf("near-miss: u=%d assignment= %s\n", near_u, values.c_str());
        return kExitOk;
    }

    if (sweep_cmd->parsed()) {
        ensure_writable(sweep_out);
        const auto records = harness::sweep(sweep_flags.n, sweep_flags.alpha, sweep_flags.k,
                                            sweep_flags.p, sweep_rs, sweep_trials,
                                            sweep_flags.seed, sweep_jobs, budget);
        std::ostringstream csv;
        harness::write_sweep_csv(records, csv);
        write_file(sweep_out, csv.str());
        write_file(sibling_json(sweep_out), harness::sweep_json(records));
        std::printf("sweep: %zu densities x %llu trials -> %s\n", records.size(),
                    static_cast<unsigned long long>(sweep_trials), sweep_out.c_str());
        return kExitOk;
    }

    if (fexp_cmd->parsed()) {
        ensure_writable(fexp_out);
        const harness::FlipReport rep =
            fexp_direction == "sat2unsat"
                ? harness::flip_experiment_sat_to_unsat(fexp_n, fexp_alpha, fexp_p, fexp_trials,
                                                        fexp_seed, 2, fexp_jobs, budget)
                : harness::flip_experiment_unsat_to_sat(fexp_n, fexp_alpha, fexp_p, fexp_trials,
                                                        fexp_seed, 2, fexp_jobs, budget);
        std::ostringstream csv;
        harness::write_flip_csv(rep, csv);
        write_file(fexp_out, csv.str());
        write_file(sibling_json(fexp_out), harness::flip_json(rep));
        std::printf("flip-exp: %s attempted=%llu flips=%llu confirmed=%llu -> %s\n",
                    rep.direction.c_str(), static_cast<unsigned long long>(rep.attempted),
                    static_cast<unsigned long long>(rep.flip_found),
                    static_cast<unsigned long long>(rep.kill_confirmed), fexp_out.c_str());
        return kExitOk;
    }

    if (cov_cmd->parsed()) {
        ensure_writable(cov_out);
        const harness::CoverageReport rep = harness::coverage_experiment(
            cov_n, cov_alpha, cov_k, cov_p, cov_trials, cov_seed, cov_jobs, budget);
        std::ostringstream csv;
        harness::write_coverage_csv(rep, csv);
        write_file(cov_out, csv.str());
        write_file(sibling_json(cov_out), harness::coverage_json(rep));
        std::printf("coverage-exp: %llu/%llu fully covered (union bound %.4g) -> %s\n",
                    static_cast<unsigned long long>(rep.fully_covered),
                    static_cast<unsigned long long>(rep.trials), rep.union_bound,
                    cov_out.c_str());
        return kExitOk;
    }

    if (mom_cmd->parsed()) {
        const RBParams params = mom_flags.derive();
        const moments::MomentReport rep = moments::moment_report(params);
        std::ostringstream out;
        out.precision(12);
        out << "{\n";
        out << "  \"r_cr\": " << rep.r_cr << ",\n";
        out << "  \"epsilon\": " << rep.epsilon << ",\n";
        out << "  \"log_e_x\": " << rep.log_e_x << ",\n";
        out << "  \"e_x\": " << rep.e_x << ",\n";
        out << "  \"sat_upper_bound\": " << rep.sat_upper << ",\n";
        out << "  \"e_x2\": " << rep.e_x2 << ",\n";
        out << "  \"e_x2_f_approx\": " << rep.e_x2_f_approx << ",\n";
        out << "  \"sat_lower_finite\": " << rep.sat_lower_finite << ",\n";
        out << "  \"sat_lower_asymptotic\": " << rep.sat_lower_asymptotic << ",\n";
        out << "  \"unique_lower_asymptotic\": " << rep.unique_lower_asymptotic << ",\n";
        out << "  \"log_e_n\": " << rep.log_e_n << ",\n";
        out << "  \"e_n\": " << rep.e_n << ",\n";
        out << "  \"near_miss_ratio\": " << rep.near_miss_ratio << ",\n";
        out << "  \"near_miss_lower_asymptotic\": " << rep.near_miss_lower_asymptotic << ",\n";
        out << "  \"degree_expected\": " << rep.degree.expected_degree << ",\n";
        out << "  \"degree_threshold\": " << rep.degree.threshold << ",\n";
        out << "  \"degree_bound\": " << rep.degree.prob_bound << ",\n";
        out << "  \"coverage_union_bound\": " << rep.coverage_bound << ",\n";
        out << "  \"f_terms\": [";
        for (std::size_t i = 0; i < rep.f_terms.size(); ++i)
            out << (i ? ", " : "") << rep.f_terms[i];
        out << "]";
        if (mom_trials > 0) {
            const moments::SolutionMoments mc =
                moments::mc_solution_moments(params, mom_trials, params.seed, mom_jobs);
            const moments::McEstimate nm =
                moments::mc_near_miss_count(params, mom_trials, params.seed, 0, mom_jobs);
            out << ",\n  \"mc\": {\"trials\": " << mom_trials << ", \"x_mean\": " << mc.x.mean
                << ", \"x_se\": " << mc.x.standard_error << ", \"x2_mean\": " << mc.x2.mean
                << ", \"x2_se\": " << mc.x2.standard_error << ", \"pr_sat\": " << mc.pr_sat
                << ", \"pr_unique\": " << mc.pr_unique << ", \"n_mean\": " << nm.mean
                << ", \"n_se\": " << nm.standard_error << "}";
        }
        out << "\n}\n";
        if (mom_out.empty()) {
            std::fputs(out.str().c_str(), stdout);
        } else {
            write_file(mom_out, out.str());
            std::printf("moments: n=%d d=%lld -> %s\n", params.n,
                        static_cast<long long>(params.d), mom_out.c_str());
        }
        return kExitOk;
    }

    if (chk_cmd->parsed()) {
        const feasibility::FeasibilityReport rep =
            feasibility::check(chk_n, chk_alpha, chk_k, chk_p);
        std::printf("check-params: n=%d alpha=%g k=%d p=%g (r_cr=%.6f eps=%.3e r=%.6f)\n", chk_n,
                    chk_alpha, chk_k, chk_p, rep.r_cr, rep.epsilon, rep.r);
        std::printf("%-4s %-45s %-12s %-8s %s\n", "id", "condition", "value", "verdict", "slack");
        for (const auto& cond : rep.conditions) {
            std::printf("%-4d %-45s %-12.5g %-8s %.5g\n", cond.id, cond.expression.c_str(),
                        cond.value, cond.pass ? "pass" : "FAIL", cond.slack);
            for (const auto& part : cond.parts)
                std::printf("     - %-41s %-12.5g %s\n", part.label.c_str(), part.value,
                            part.pass ? "pass" : "FAIL");
        }
        std::printf("overall: %s\n", rep.overall ? "pass" : "FAIL");
        return rep.overall ? kExitOk : kExitInfeasible;
    }

    if (enc_cmd->parsed()) {
        const Instance inst = instance_from_json(read_file(enc_in));
        const satenc::Cnf cnf = satenc::encode(inst, enc_budget);
        std::ostringstream out;
        satenc::write_dimacs(cnf, out);
        write_file(enc_out, out.str());
        std::printf("encode: %d bool vars, %zu clauses -> %s\n", cnf.num_vars,
                    cnf.clauses.size(), enc_out.c_str());
        return kExitOk;
    }

    return kExitUsage;  // unreachable: require_subcommand
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBudget;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    }
}
