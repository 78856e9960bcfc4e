#include "rblab/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rblab/errors.hpp"
#include "rblab/moments.hpp"

namespace rblab::feasibility {

namespace {

ConditionResult compound(int id, std::string expression, std::vector<SubCondition> parts) {
    ConditionResult cond;
    cond.id = id;
    cond.expression = std::move(expression);
    cond.parts = std::move(parts);
    cond.pass = std::all_of(cond.parts.begin(), cond.parts.end(),
                            [](const SubCondition& s) { return s.pass; });
    cond.slack = std::numeric_limits<double>::infinity();
    for (const SubCondition& s : cond.parts) cond.slack = std::min(cond.slack, s.value);
    cond.value = cond.slack;
    return cond;
}

ConditionResult simple(int id, std::string expression, double value) {
    // value is the left-hand side of "expr < 0"; slack is its negation.
    ConditionResult cond;
    cond.id = id;
    cond.expression = std::move(expression);
    cond.value = value;
    cond.pass = value < 0.0;
    cond.slack = -value;
    return cond;
}

}  // namespace

FeasibilityReport check(int n, double alpha, int k, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("p must lie in (0,1), got " + std::to_string(p));

    FeasibilityReport rep;
    rep.n = n;
    rep.alpha = alpha;
    rep.k = k;
    rep.p = p;
    rep.r_cr = moments::r_critical(p);
    // epsilon needs ln n > 0; smaller n gets NaN, which fails condition 2
    // rather than erroring (the checker's verdict is the contract).
    if (n >= 2) {
        rep.epsilon = std::log(0.5) / (alpha * static_cast<double>(n) *
                                       std::log(static_cast<double>(n)) * std::log1p(-p));
    } else {
        rep.epsilon = std::numeric_limits<double>::quiet_NaN();
    }
    rep.r = rep.r_cr + rep.epsilon;
    const double rk_alpha = rep.r * static_cast<double>(k) * alpha;

    rep.conditions.push_back(compound(
        1, "alpha > 1/k, 0 < p < 1, k >= 1/(1-p)",
        {{"alpha - 1/k", alpha - 1.0 / static_cast<double>(k), alpha > 1.0 / static_cast<double>(k)},
         {"min(p, 1-p)", std::min(p, 1.0 - p), p > 0.0 && p < 1.0},
         {"k - 1/(1-p)", static_cast<double>(k) - 1.0 / (1.0 - p),
          static_cast<double>(k) >= 1.0 / (1.0 - p)}}));

    {
        ConditionResult cond;
        cond.id = 2;
        cond.expression = "epsilon > 0 (r = r_cr + epsilon)";
        cond.value = rep.epsilon;
        cond.pass = rep.epsilon > 0.0;
        cond.slack = rep.epsilon;
        rep.conditions.push_back(cond);
    }

    rep.conditions.push_back(compound(
        3, "1 + alpha (1 - r_cr p k) < 0 and alpha > 1",
        {{"-(1 + alpha (1 - r_cr p k))",
          -(1.0 + alpha * (1.0 - rep.r_cr * p * static_cast<double>(k))),
          1.0 + alpha * (1.0 - rep.r_cr * p * static_cast<double>(k)) < 0.0},
         {"alpha - 1", alpha - 1.0, alpha > 1.0}}));

    rep.conditions.push_back(simple(4, "1 - (1/8) r k alpha < 0", 1.0 - 0.125 * rk_alpha));
    rep.conditions.push_back(
        simple(5, "1 + (1/2) alpha r k ln(1 - p/3) < 0",
               1.0 + 0.5 * rk_alpha * std::log1p(-p / 3.0)));

    rep.overall = std::all_of(rep.conditions.begin(), rep.conditions.end(),
                              [](const ConditionResult& c) { return c.pass; });
    return rep;
}

std::optional<double> find_feasible(int n, int k, double p,
                                    const std::vector<double>& alpha_grid) {
    for (std::size_t i = 1; i < alpha_grid.size(); ++i)
        if (!(alpha_grid[i] > alpha_grid[i - 1]))
            throw DomainError("alpha grid must be strictly ascending");
    for (double alpha : alpha_grid)
        if (check(n, alpha, k, p).overall) return alpha;
    return std::nullopt;
}

}  // namespace rblab::feasibility
