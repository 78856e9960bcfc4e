#include "rblab/solver.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "rblab/errors.hpp"

namespace rblab {

bool satisfies(const Constraint& constraint, const Assignment& assignment) {
    std::uint64_t code = 0;
    const std::uint64_t d = static_cast<std::uint64_t>(constraint.permitted.domain());
    for (int var : constraint.scope)
        code = code * d + static_cast<std::uint64_t>(assignment[static_cast<std::size_t>(var)]);
    return constraint.permitted.contains(code);
}

bool satisfies_all(const Instance& instance, const Assignment& assignment) {
    for (const Constraint& c : instance.constraints)
        if (!satisfies(c, assignment)) return false;
    return true;
}

namespace {

// One solve() call. Domains are 64-bit masks, so d <= 64; that comfortably
// covers the desk-scale sizes this solver is meant for. Constraints are
// grouped by trigger variable: check_at[x] holds constraints whose whole
// scope lies in [0, x] (checked when x is assigned), prune_at[x] those where
// x is the second-largest scope index (assigning x leaves exactly the
// largest unassigned, whose domain gets pruned).
class Search {
public:
    Search(const Instance& inst, SolveMode mode, std::uint64_t budget)
        : inst_(inst),
          n_(inst.params.n),
          d_(static_cast<int>(inst.params.d)),
          mode_(mode),
          budget_(budget) {
        if (d_ > 64)
            throw DomainError("solver supports domains up to 64 values, got d = " + std::to_string(d_));
        full_mask_ = (d_ == 64) ? ~0ULL : ((1ULL << d_) - 1);
        dom_.assign(static_cast<std::size_t>(n_), full_mask_);
        assignment_.assign(static_cast<std::size_t>(n_), 0);
        check_at_.resize(static_cast<std::size_t>(n_));
        prune_at_.resize(static_cast<std::size_t>(n_));

        const int m = static_cast<int>(inst.constraints.size());
        early_var_.assign(static_cast<std::size_t>(m), -1);
        late_var_.assign(static_cast<std::size_t>(m), -1);
        row_mask_.resize(static_cast<std::size_t>(m));
        for (int ci = 0; ci < m; ++ci) {
            const Constraint& c = inst.constraints[static_cast<std::size_t>(ci)];
            std::vector<int> sorted_scope = c.scope;
            std::sort(sorted_scope.begin(), sorted_scope.end());
            const int last = sorted_scope.back();
            const int second = sorted_scope[sorted_scope.size() - 2];
            check_at_[static_cast<std::size_t>(last)].push_back(ci);
            prune_at_[static_cast<std::size_t>(second)].push_back(ci);
            if (c.scope.size() == 2) build_row_masks(ci);
        }
    }

    SolveResult run() {
        descend(0);
        SolveResult res;
        res.nodes_expanded = nodes_;
        res.sat = found_ > 0;
        if (mode_ != SolveMode::Decide) res.count = found_;
        if (res.sat) res.witness = first_witness_;
        return res;
    }

private:
    void build_row_masks(int ci) {
        const Constraint& c = inst_.constraints[static_cast<std::size_t>(ci)];
        const int a = c.scope[0], b = c.scope[1];
        // Mask over the later-assigned variable's values, keyed by the value
        // of the earlier-assigned one.
        const bool a_first = a < b;
        early_var_[static_cast<std::size_t>(ci)] = a_first ? a : b;
        late_var_[static_cast<std::size_t>(ci)] = a_first ? b : a;
        auto& rows = row_mask_[static_cast<std::size_t>(ci)];
        rows.assign(static_cast<std::size_t>(d_), 0);
        for (std::uint64_t code : c.permitted.codes()) {
            const int va = static_cast<int>(code / static_cast<std::uint64_t>(d_));
            const int vb = static_cast<int>(code % static_cast<std::uint64_t>(d_));
            const int early = a_first ? va : vb;
            const int late = a_first ? vb : va;
            rows[static_cast<std::size_t>(early)] |= 1ULL << late;
        }
    }

    bool done() const {
        if (mode_ == SolveMode::Decide) return found_ >= 1;
        if (mode_ == SolveMode::CheckUnique) return found_ >= 2;
        return false;
    }

    // Assign remaining variables depth..n-1; returns early when done().
    void descend(int depth) {
        if (depth == n_) {
            if (found_ == 0) first_witness_ = assignment_;
            ++found_;
            return;
        }
        std::uint64_t candidates = dom_[static_cast<std::size_t>(depth)];
        while (candidates != 0) {
            const int v = std::countr_zero(candidates);
            candidates &= candidates - 1;
            if (++nodes_ > budget_)
                throw BudgetExceeded("node budget exhausted after " + std::to_string(nodes_ - 1) +
                                         " nodes",
                                     nodes_ - 1);
            assignment_[static_cast<std::size_t>(depth)] = static_cast<Value>(v);
            const std::size_t mark = trail_.size();
            if (propagate(depth)) descend(depth + 1);
            undo(mark);
            if (done()) return;
        }
    }

    // Forward checking after assigning variable `depth`. False on wipe-out.
    bool propagate(int depth) {
        for (int ci : check_at_[static_cast<std::size_t>(depth)])
            if (!satisfies(inst_.constraints[static_cast<std::size_t>(ci)], assignment_)) return false;
        for (int ci : prune_at_[static_cast<std::size_t>(depth)]) {
            const int target = late_var_[static_cast<std::size_t>(ci)] >= 0
                                   ? late_var_[static_cast<std::size_t>(ci)]
                                   : max_scope_var(ci);
            if (target <= depth) continue;  // scope fully assigned; handled by check_at
            const std::uint64_t allowed = allowed_mask(ci, target);
            const std::uint64_t old = dom_[static_cast<std::size_t>(target)];
            const std::uint64_t next = old & allowed;
            if (next == old) continue;
            trail_.emplace_back(target, old);
            dom_[static_cast<std::size_t>(target)] = next;
            if (next == 0) return false;
        }
        return true;
    }

    int max_scope_var(int ci) const {
        const auto& scope = inst_.constraints[static_cast<std::size_t>(ci)].scope;
        return *std::max_element(scope.begin(), scope.end());
    }

    std::uint64_t allowed_mask(int ci, int target) {
        const Constraint& c = inst_.constraints[static_cast<std::size_t>(ci)];
        if (late_var_[static_cast<std::size_t>(ci)] >= 0) {
            const int early = early_var_[static_cast<std::size_t>(ci)];
            return row_mask_[static_cast<std::size_t>(ci)]
                            [static_cast<std::size_t>(assignment_[static_cast<std::size_t>(early)])];
        }
        // General arity: try each remaining value of the one unassigned variable.
        std::size_t pos = 0;
        for (std::size_t i = 0; i < c.scope.size(); ++i)
            if (c.scope[i] == target) pos = i;
        std::vector<Value> tuple(c.scope.size());
        for (std::size_t i = 0; i < c.scope.size(); ++i)
            tuple[i] = c.scope[i] == target ? 0 : assignment_[static_cast<std::size_t>(c.scope[i])];
        std::uint64_t mask = 0;
        std::uint64_t candidates = dom_[static_cast<std::size_t>(target)];
        while (candidates != 0) {
            const int v = std::countr_zero(candidates);
            candidates &= candidates - 1;
            tuple[pos] = static_cast<Value>(v);
            if (c.permitted.contains(std::span<const Value>(tuple))) mask |= 1ULL << v;
        }
        return mask;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            const auto& [var, old] = trail_.back();
            dom_[static_cast<std::size_t>(var)] = old;
            trail_.pop_back();
        }
    }

    const Instance& inst_;
    const int n_;
    const int d_;
    const SolveMode mode_;
    const std::uint64_t budget_;

    std::uint64_t full_mask_ = 0;
    std::vector<std::uint64_t> dom_;
    std::vector<std::pair<int, std::uint64_t>> trail_;
    Assignment assignment_;
    Assignment first_witness_;
    std::uint64_t nodes_ = 0;
    std::uint64_t found_ = 0;

    std::vector<std::vector<int>> check_at_;
    std::vector<std::vector<int>> prune_at_;
    std::vector<std::vector<std::uint64_t>> row_mask_;
    std::vector<int> early_var_, late_var_;
};

}  // namespace

SolveResult solve(const Instance& instance, SolveMode mode, std::uint64_t node_budget) {
    return Search(instance, mode, node_budget).run();
}

SolveResult enumerate_oracle(const Instance& instance) {
    const int n = instance.params.n;
    const std::int64_t d = instance.params.d;
    long double total_real = 1.0L;
    for (int i = 0; i < n; ++i) total_real *= static_cast<long double>(d);
    if (total_real > static_cast<long double>(1ULL << 22))
        throw DomainError("enumerate_oracle guard: d^n exceeds 2^22");

    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(d);

    SolveResult res;
    res.count = 0;
    Assignment assignment(static_cast<std::size_t>(n), 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        ++res.nodes_expanded;
        if (satisfies_all(instance, assignment)) {
            if (*res.count == 0) res.witness = assignment;
            ++*res.count;
        }
        // odometer, last variable fastest
        for (int i = n - 1; i >= 0; --i) {
            if (++assignment[static_cast<std::size_t>(i)] < d) break;
            assignment[static_cast<std::size_t>(i)] = 0;
        }
    }
    res.sat = *res.count > 0;
    return res;
}

Instance with_complemented_constraint(const Instance& instance, int u) {
    if (u < 0 || u >= static_cast<int>(instance.constraints.size()))
        throw DomainError("constraint index out of range: " + std::to_string(u));
    Instance out = instance;
    const Constraint& c = instance.constraints[static_cast<std::size_t>(u)];
    TupleSet complement(c.permitted.arity(), c.permitted.domain());
    const std::uint64_t space = instance.params.tuple_space();
    for (std::uint64_t code = 0; code < space; ++code)
        if (!c.permitted.contains(code)) complement.insert(code);
    out.constraints[static_cast<std::size_t>(u)].permitted = std::move(complement);
    return out;
}

std::optional<Assignment> find_near_miss(const Instance& instance, int u,
                                         std::uint64_t node_budget) {
    const Instance flipped = with_complemented_constraint(instance, u);
    if (flipped.constraints[static_cast<std::size_t>(u)].permitted.size() == 0)
        return std::nullopt;  // constraint u is vacuous, nothing can violate it
    const SolveResult res = solve(flipped, SolveMode::Decide, node_budget);
    if (!res.sat) return std::nullopt;
    return res.witness;
}

}  // namespace rblab
