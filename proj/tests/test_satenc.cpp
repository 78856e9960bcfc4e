#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "rblab/errors.hpp"
#include "rblab/rng.hpp"
#include "rblab/satenc.hpp"
#include "rblab/solver.hpp"

using namespace rblab;
using namespace rblab::satenc;

namespace {

TupleSet make_pairs(std::int64_t d, std::initializer_list<std::pair<int, int>> pairs) {
    TupleSet set(2, d);
    for (auto [a, b] : pairs) {
        const Value t[2] = {static_cast<Value>(a), static_cast<Value>(b)};
        set.insert(set.encode(std::span<const Value>(t, 2)));
    }
    return set;
}

Instance make_instance(int n, std::int64_t d, std::vector<Constraint> constraints) {
    Instance inst;
    inst.params = derive_params(n, 1.0, 2, 0.5, 1.0, 0);
    inst.params.d = d;
    inst.params.m = static_cast<std::int64_t>(constraints.size());
    inst.constraints = std::move(constraints);
    return inst;
}

RBParams random_small_params(Rng& rng) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const int d = 2 + static_cast<int>(rng.below(3));
    const double p = 0.25 + 0.25 * static_cast<double>(rng.below(3));
    const double alpha = std::log(static_cast<double>(d)) / std::log(static_cast<double>(n));
    const double r = 0.4 + 0.2 * static_cast<double>(rng.below(8));
    return derive_params(n, alpha, 2, p, r, rng.next());
}

std::set<int> as_set(const std::vector<int>& clause) { return {clause.begin(), clause.end()}; }

}  // namespace

TEST_CASE("bit widths") {
    CHECK(bits_for_domain(2) == 1);
    CHECK(bits_for_domain(3) == 2);
    CHECK(bits_for_domain(4) == 2);
    CHECK(bits_for_domain(5) == 3);
    CHECK(bits_for_domain(64) == 6);
    CHECK(bits_for_domain(65) == 7);
}

TEST_CASE("d=2: one clause per forbidden pair, in the documented shape") {
    // permitted everything except (1,0)
    Constraint c;
    c.scope = {0, 1};
    c.permitted = make_pairs(2, {{0, 0}, {0, 1}, {1, 1}});
    const Instance inst = make_instance(2, 2, {c});
    const Cnf cnf = encode(inst);
    CHECK(cnf.num_vars == 2);  // n * ceil(log2 d) = 2 * 1
    REQUIRE(cnf.clauses.size() == 1);
    // forbidden (1,0): x0 bit set -> -1, x1 bit clear -> +2
    CHECK(as_set(cnf.clauses[0]) == std::set<int>{-1, 2});
}

TEST_CASE("d=3: invalid code 3 excluded per variable") {
    const Instance inst = make_instance(2, 3, {});
    const Cnf cnf = encode(inst);
    CHECK(cnf.num_vars == 4);  // 2 vars * 2 bits
    REQUIRE(cnf.clauses.size() == 2);
    // code 3 = bits (1,1): clause (!lo or !hi) per variable
    CHECK(as_set(cnf.clauses[0]) == std::set<int>{-1, -2});
    CHECK(as_set(cnf.clauses[1]) == std::set<int>{-3, -4});
}

TEST_CASE("vacuous constraints and power-of-two domain give zero clauses") {
    Constraint full;
    full.scope = {0, 1};
    full.permitted = make_pairs(4, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2},
                                    {1, 3}, {2, 0}, {2, 1}, {2, 2}, {2, 3}, {3, 0}, {3, 1},
                                    {3, 2}, {3, 3}});
    const Instance inst = make_instance(2, 4, {full});
    const Cnf cnf = encode(inst);
    CHECK(cnf.clauses.empty());
    CHECK(dpll_sat(cnf).sat);
}

TEST_CASE("num_vars is n * ceil(log2 d) exactly") {
    Rng rng(64);
    for (int it = 0; it < 20; ++it) {
        const Instance inst = generate_original(random_small_params(rng));
        const Cnf cnf = encode(inst);
        CHECK(cnf.num_vars == inst.params.n * bits_for_domain(inst.params.d));
    }
}

TEST_CASE("clause budget is a hard guard") {
    const RBParams params = derive_params(6, 1.0, 2, 0.5, 1.3, 2);
    const Instance inst = generate_original(params);
    CHECK_THROWS_AS(encode(inst, 3), SizeError);
}

TEST_CASE("decode round trip and invalid models") {
    Constraint c;
    c.scope = {0, 1};
    c.permitted = make_pairs(3, {{0, 1}, {1, 2}, {2, 0}});
    const Instance inst = make_instance(2, 3, {c});
    const Cnf cnf = encode(inst);

    SUBCASE("a known solution's bit pattern decodes back") {
        // assignment (1, 2): x0 bits 01 -> var1 true; x1 bits 10 -> var4 true
        const std::vector<bool> model{true, false, false, true};
        CHECK(decode(cnf, model) == Assignment{1, 2});
    }
    SUBCASE("invalid code 3 is rejected with the variable name") {
        const std::vector<bool> model{true, true, false, false};
        CHECK_THROWS_WITH_AS(decode(cnf, model), doctest::Contains("variable 0"), InvalidModel);
    }
    SUBCASE("wrong model size is rejected") {
        CHECK_THROWS_AS(decode(cnf, std::vector<bool>{true}), InvalidModel);
    }
}

TEST_CASE("dpll basics") {
    SUBCASE("empty clause set is satisfied by the all-false model") {
        Cnf cnf;
        cnf.num_vars = 3;
        const DpllResult res = dpll_sat(cnf);
        REQUIRE(res.sat);
        CHECK(res.model == std::vector<bool>{false, false, false});
    }
    SUBCASE("unit contradiction") {
        Cnf cnf;
        cnf.num_vars = 1;
        cnf.clauses = {{1}, {-1}};
        CHECK_FALSE(dpll_sat(cnf).sat);
    }
    SUBCASE("propagation chains") {
        Cnf cnf;
        cnf.num_vars = 3;
        cnf.clauses = {{1}, {-1, 2}, {-2, 3}};
        const DpllResult res = dpll_sat(cnf);
        REQUIRE(res.sat);
        CHECK(res.model == std::vector<bool>{true, true, true});
    }
    SUBCASE("budget raises") {
        // 10 free variables, a single wide clause: tiny budget trips
        Cnf cnf;
        cnf.num_vars = 10;
        cnf.clauses = {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
        CHECK_THROWS_AS(dpll_sat(cnf, 1), BudgetExceeded);
    }
}

TEST_CASE("equisatisfiability and model decoding over random instances") {
    Rng rng(1618);
    int sat_seen = 0, unsat_seen = 0;
    for (int it = 0; it < 120; ++it) {
        const Instance inst = generate_original(random_small_params(rng));
        const Cnf cnf = encode(inst);
        const SolveResult truth = enumerate_oracle(inst);
        const DpllResult res = dpll_sat(cnf);
        CHECK(res.sat == truth.sat);
        if (res.sat) {
            ++sat_seen;
            const Assignment decoded = decode(cnf, res.model);
            CHECK(satisfies_all(inst, decoded));
        } else {
            ++unsat_seen;
        }
    }
    CHECK(sat_seen > 10);
    CHECK(unsat_seen > 10);
}

TEST_CASE("every csp solution has a model: solution bits satisfy the cnf") {
    Rng rng(6022);
    for (int it = 0; it < 30; ++it) {
        const Instance inst = generate_original(random_small_params(rng));
        const SolveResult res = solve(inst, SolveMode::Decide);
        if (!res.sat) continue;
        const Cnf cnf = encode(inst);
        std::vector<bool> model(static_cast<std::size_t>(cnf.num_vars), false);
        for (int var = 0; var < inst.params.n; ++var)
            for (int bit = 0; bit < cnf.bits_per_var; ++bit)
                model[static_cast<std::size_t>(bool_var(cnf, var, bit) - 1)] =
                    ((*res.witness)[static_cast<std::size_t>(var)] >> bit) & 1;
        for (const auto& clause : cnf.clauses) {
            const bool satisfied = std::any_of(clause.begin(), clause.end(), [&](int lit) {
                const bool v = model[static_cast<std::size_t>(std::abs(lit) - 1)];
                return lit > 0 ? v : !v;
            });
            CHECK(satisfied);
        }
    }
}

TEST_CASE("dimacs format") {
    SUBCASE("exact bytes for a tiny formula") {
        Cnf cnf;
        cnf.num_vars = 2;
        cnf.clauses = {{1, -2}};
        std::ostringstream out;
        write_dimacs(cnf, out);
        CHECK(out.str() == "p cnf 2 1\n1 -2 0\n");
    }
    SUBCASE("round trip identity on random formulas") {
        Rng rng(100);
        for (int it = 0; it < 100; ++it) {
            Cnf cnf;
            cnf.num_vars = 1 + static_cast<int>(rng.below(12));
            const int m = static_cast<int>(rng.below(20));
            for (int i = 0; i < m; ++i) {
                std::vector<int> clause;
                const int len = 1 + static_cast<int>(rng.below(4));
                for (int j = 0; j < len; ++j) {
                    const int v = 1 + static_cast<int>(rng.below(
                                          static_cast<std::uint64_t>(cnf.num_vars)));
                    clause.push_back(rng.below(2) ? v : -v);
                }
                cnf.clauses.push_back(std::move(clause));
            }
            std::ostringstream out;
            write_dimacs(cnf, out);
            std::istringstream in(out.str());
            const Cnf back = read_dimacs(in);
            CHECK(back.num_vars == cnf.num_vars);
            CHECK(back.clauses == cnf.clauses);
        }
    }
    SUBCASE("vmap comments survive the round trip") {
        const Instance inst = make_instance(2, 3, {});
        const Cnf cnf = encode(inst);
        std::ostringstream out;
        write_dimacs(cnf, out);
        std::istringstream in(out.str());
        const Cnf back = read_dimacs(in);
        CHECK(back.csp_n == cnf.csp_n);
        CHECK(back.csp_d == cnf.csp_d);
        CHECK(back.bits_per_var == cnf.bits_per_var);
    }
    SUBCASE("parse errors carry line numbers") {
        std::istringstream missing("1 -2 0\n");
        CHECK_THROWS_AS(read_dimacs(missing), ParseError);
        std::istringstream bad_header("p cnf x y\n");
        CHECK_THROWS_AS(read_dimacs(bad_header), ParseError);
        std::istringstream overflow("p cnf 1 1\n2 0\n");
        try {
            read_dimacs(overflow);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
        std::istringstream wrong_count("p cnf 2 2\n1 0\n");
        CHECK_THROWS_AS(read_dimacs(wrong_count), ParseError);
        std::istringstream unterminated("p cnf 2 1\n1 -2\n");
        CHECK_THROWS_AS(read_dimacs(unterminated), ParseError);
    }
}
