#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rblab::feasibility {

struct SubCondition {
    std::string label;
    double value = 0.0;  // margin; positive means satisfied
    bool pass = false;
};

// One of the five accumulated parameter conditions. Compound conditions
// (1 and 3) carry sub-verdicts; pass requires all parts. slack is the
// smallest margin, so its sign agrees with pass.
struct ConditionResult {
    int id = 0;
    std::string expression;
    double value = 0.0;
    bool pass = false;
    double slack = 0.0;
    std::vector<SubCondition> parts;
};

struct FeasibilityReport {
    int n = 0;
    double alpha = 0.0;
    int k = 0;
    double p = 0.0;
    double r_cr = 0.0;
    double epsilon = 0.0;
    double r = 0.0;  // r_cr + epsilon
    std::vector<ConditionResult> conditions;
    bool overall = false;
};

// Evaluates, with r = r_cr + epsilon from the calibration at (n, alpha, p):
//   1. alpha > 1/k, 0 < p < 1, k >= 1/(1-p)
//   2. epsilon > 0 (hence r > r_cr)
//   3. 1 + alpha (1 - r_cr p k) < 0 and alpha > 1
//   4. 1 - (1/8) r k alpha < 0
//   5. 1 + (1/2) alpha r k ln(1 - p/3) < 0
// Throws DomainError only for p outside (0,1); everything else is the
// checker's to judge and shows up as a failing verdict.
FeasibilityReport check(int n, double alpha, int k, double p);

// Smallest alpha in the ascending grid whose report passes overall.
std::optional<double> find_feasible(int n, int k, double p,
                                    const std::vector<double>& alpha_grid);

}  // namespace rblab::feasibility
