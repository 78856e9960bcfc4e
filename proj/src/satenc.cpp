#include "rblab/satenc.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rblab/errors.hpp"

namespace rblab::satenc {

int bits_for_domain(std::int64_t d) {
    int b = 1;
    while ((std::int64_t{1} << b) < d) ++b;
    return b;
}

int bool_var(const Cnf& cnf, int var, int bit) {
    return var * cnf.bits_per_var + bit + 1;
}

namespace {

// Literals selecting "CSP variable var takes value v", negated: the clause
// fragment that forbids this (var, value) combination.
void append_forbidding_literals(const Cnf& cnf, int var, std::int64_t v, std::vector<int>& clause) {
    for (int bit = 0; bit < cnf.bits_per_var; ++bit) {
        const int bv = bool_var(cnf, var, bit);
        clause.push_back((v >> bit) & 1 ? -bv : bv);
    }
}

}  // namespace

Cnf encode(const Instance& instance, std::uint64_t clause_budget) {
    Cnf cnf;
    cnf.csp_n = instance.params.n;
    cnf.csp_d = instance.params.d;
    cnf.bits_per_var = bits_for_domain(instance.params.d);
    cnf.num_vars = instance.params.n * cnf.bits_per_var;

    const std::int64_t code_space = std::int64_t{1} << cnf.bits_per_var;
    const std::uint64_t tuple_space = instance.params.tuple_space();

    std::uint64_t total = static_cast<std::uint64_t>(instance.params.n) *
                          static_cast<std::uint64_t>(code_space - instance.params.d);
    for (const Constraint& c : instance.constraints)
        total += tuple_space - c.permitted.size();
    if (total > clause_budget)
        throw SizeError("encoding needs " + std::to_string(total) + " clauses, budget is " +
                        std::to_string(clause_budget));
    cnf.clauses.reserve(total);

    for (int var = 0; var < instance.params.n; ++var) {
        for (std::int64_t code = instance.params.d; code < code_space; ++code) {
            std::vector<int> clause;
            append_forbidding_literals(cnf, var, code, clause);
            cnf.clauses.push_back(std::move(clause));
        }
    }

    for (const Constraint& c : instance.constraints) {
        for (std::uint64_t code = 0; code < tuple_space; ++code) {
            if (c.permitted.contains(code)) continue;
            const std::vector<Value> tuple = c.permitted.decode(code);
            std::vector<int> clause;
            for (std::size_t pos = 0; pos < c.scope.size(); ++pos)
                append_forbidding_literals(cnf, c.scope[pos], tuple[pos], clause);
            cnf.clauses.push_back(std::move(clause));
        }
    }
    return cnf;
}

Assignment decode(const Cnf& cnf, const std::vector<bool>& model) {
    if (static_cast<int>(model.size()) != cnf.num_vars)
        throw InvalidModel("model assigns " + std::to_string(model.size()) + " variables, CNF has " +
                           std::to_string(cnf.num_vars));
    Assignment out(static_cast<std::size_t>(cnf.csp_n), 0);
    for (int var = 0; var < cnf.csp_n; ++var) {
        std::int64_t value = 0;
        for (int bit = 0; bit < cnf.bits_per_var; ++bit)
            if (model[static_cast<std::size_t>(bool_var(cnf, var, bit) - 1)])
                value |= std::int64_t{1} << bit;
        if (value >= cnf.csp_d)
            throw InvalidModel("variable " + std::to_string(var) + " decodes to invalid code " +
                               std::to_string(value) + " (d = " + std::to_string(cnf.csp_d) + ")");
        out[static_cast<std::size_t>(var)] = static_cast<Value>(value);
    }
    return out;
}

namespace {

// -1 unassigned, 0 false, 1 true
struct DpllState {
    std::vector<signed char> assign;
    std::vector<int> trail;

    bool value_satisfies(int lit) const {
        const signed char v = assign[static_cast<std::size_t>(std::abs(lit) - 1)];
        return v >= 0 && (v == 1) == (lit > 0);
    }
    bool is_unassigned(int lit) const {
        return assign[static_cast<std::size_t>(std::abs(lit) - 1)] < 0;
    }
    void push(int lit) {
        assign[static_cast<std::size_t>(std::abs(lit) - 1)] = lit > 0 ? 1 : 0;
        trail.push_back(lit);
    }
    void pop_to(std::size_t mark) {
        while (trail.size() > mark) {
            assign[static_cast<std::size_t>(std::abs(trail.back()) - 1)] = -1;
            trail.pop_back();
        }
    }
};

class Dpll {
public:
    Dpll(const Cnf& cnf, std::uint64_t budget) : cnf_(cnf), budget_(budget) {
        state_.assign.assign(static_cast<std::size_t>(cnf.num_vars), -1);
        for (const auto& clause : cnf.clauses) {
            if (clause.empty()) contradiction_ = true;
            for (int lit : clause)
                if (std::abs(lit) < 1 || std::abs(lit) > cnf.num_vars)
                    throw DomainError("literal out of range: " + std::to_string(lit));
        }
    }

    DpllResult run() {
        DpllResult res;
        res.sat = !contradiction_ && search(0);
        res.nodes = nodes_;
        if (res.sat) {
            res.model.resize(static_cast<std::size_t>(cnf_.num_vars));
            for (int v = 0; v < cnf_.num_vars; ++v)
                res.model[static_cast<std::size_t>(v)] =
                    state_.assign[static_cast<std::size_t>(v)] == 1;
        }
        return res;
    }

private:
    // Scan-to-fixpoint unit propagation; fine at the sizes this oracle serves.
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& clause : cnf_.clauses) {
                int unassigned = 0;
                int unit_lit = 0;
                bool satisfied = false;
                for (int lit : clause) {
                    if (state_.value_satisfies(lit)) {
                        satisfied = true;
                        break;
                    }
                    if (state_.is_unassigned(lit)) {
                        ++unassigned;
                        unit_lit = lit;
                        if (unassigned > 1) break;
                    }
                }
                if (satisfied || unassigned > 1) continue;
                if (unassigned == 0) return false;  // conflict
                state_.push(unit_lit);
                changed = true;
            }
        }
        return true;
    }

    bool search(int from_var) {
        if (++nodes_ > budget_)
            throw BudgetExceeded("DPLL node budget exhausted", nodes_ - 1);
        const std::size_t mark = state_.trail.size();
        if (!propagate()) {
            state_.pop_to(mark);
            return false;
        }
        int branch = -1;
        for (int v = from_var; v < cnf_.num_vars; ++v) {
            if (state_.assign[static_cast<std::size_t>(v)] < 0) {
                branch = v;
                break;
            }
        }
        if (branch < 0) return true;  // total assignment, all clauses satisfied
        for (const int phase : {-1, +1}) {  // false branch first
            const std::size_t decision_mark = state_.trail.size();
            state_.push(phase * (branch + 1));
            if (search(branch + 1)) return true;
            state_.pop_to(decision_mark);
        }
        state_.pop_to(mark);
        return false;
    }

    const Cnf& cnf_;
    const std::uint64_t budget_;
    DpllState state_;
    bool contradiction_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace

DpllResult dpll_sat(const Cnf& cnf, std::uint64_t node_budget) {
    return Dpll(cnf, node_budget).run();
}

void write_dimacs(const Cnf& cnf, std::ostream& out) {
    if (cnf.bits_per_var > 0) {
        out << "c log-encoded csp: n=" << cnf.csp_n << " d=" << cnf.csp_d
            << " bits=" << cnf.bits_per_var << "\n";
        for (int var = 0; var < cnf.csp_n; ++var)
            for (int bit = 0; bit < cnf.bits_per_var; ++bit)
                out << "c vmap " << var << " " << bit << " " << bool_var(cnf, var, bit) << "\n";
    }
    out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
    for (const auto& clause : cnf.clauses) {
        for (int lit : clause) out << lit << " ";
        out << "0\n";
    }
}

Cnf read_dimacs(std::istream& in) {
    Cnf cnf;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    std::size_t expected_clauses = 0;
    std::vector<int> pending;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == 'c') {
            std::istringstream ls(line);
            std::string c, tag;
            ls >> c >> tag;
            if (tag == "vmap") {
                int var = 0, bit = 0, bv = 0;
                if (ls >> var >> bit >> bv) {
                    cnf.csp_n = std::max(cnf.csp_n, var + 1);
                    cnf.bits_per_var = std::max(cnf.bits_per_var, bit + 1);
                }
            } else if (tag == "log-encoded") {
                std::string kv;
                while (ls >> kv) {
                    if (kv.rfind("d=", 0) == 0) cnf.csp_d = std::stoll(kv.substr(2));
                }
            }
            continue;
        }
        if (line[0] == 'p') {
            std::istringstream ls(line);
            std::string p, fmt;
            long long vars = -1, clauses = -1;
            ls >> p >> fmt >> vars >> clauses;
            if (fmt != "cnf" || vars < 0 || clauses < 0)
                throw ParseError("malformed problem line: " + line, line_no);
            cnf.num_vars = static_cast<int>(vars);
            expected_clauses = static_cast<std::size_t>(clauses);
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError("clause before problem line", line_no);
        std::istringstream ls(line);
        long long lit;
        while (ls >> lit) {
            if (lit == 0) {
                cnf.clauses.push_back(pending);
                pending.clear();
            } else {
                if (std::llabs(lit) > cnf.num_vars)
                    throw ParseError("literal " + std::to_string(lit) + " exceeds variable count",
                                     line_no);
                pending.push_back(static_cast<int>(lit));
            }
        }
        if (!ls.eof()) throw ParseError("unreadable token in clause", line_no);
    }
    if (!have_header) throw ParseError("missing problem line", line_no);
    if (!pending.empty()) throw ParseError("last clause not 0-terminated", line_no);
    if (cnf.clauses.size() != expected_clauses)
        throw ParseError("header promises " + std::to_string(expected_clauses) + " clauses, found " +
                             std::to_string(cnf.clauses.size()),
                         line_no);
    return cnf;
}

}  // namespace rblab::satenc
