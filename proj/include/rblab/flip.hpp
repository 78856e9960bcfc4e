#pragma once

#include <array>
#include <utility>

#include "rblab/instance.hpp"

namespace rblab {

enum class FlipDirection { SatToUnsat, UnsatToSat };

// Audit record of one tuple-swap mapping: constraint u lost tuples a and b
// and gained the crosses (a1,b2) and (b1,a2). The swap is self-inverse and
// preserves n, d, k, m and every permitted-set size. witness is the former
// unique solution (SatToUnsat) or the near-miss turned solution (UnsatToSat).
struct FlipCertificate {
    int u = 0;
    std::array<Value, 2> a{};
    std::array<Value, 2> b{};
    FlipDirection direction = FlipDirection::SatToUnsat;
    Assignment witness;
};

// permitted' = permitted \ {a, b} u {(a1,b2), (b1,a2)}, scope unchanged.
// Requires k == 2, a and b permitted, both crosses absent. Throws
// FlipPreconditionViolated naming the failed membership check.
Constraint swap_tuples(const Constraint& constraint, std::array<Value, 2> a,
                       std::array<Value, 2> b);

// Kills the unique solution: scans u = 0, 1, ... and b in ascending tuple
// order for a swap with a = the solution's own tuple on C_u's scope, so the
// swap always removes the tuple the solution uses. The caller must have
// verified uniqueness (solve CheckUnique).
std::pair<Instance, FlipCertificate> flip_sat_to_unsat(const Instance& instance,
                                                       const Assignment& unique_solution);

// Makes the near-miss a full solution: with (v1,v2) the near-miss tuple on
// C_u's scope, picks a = (v1, a2) and b = (b1, v2) from the permitted set in
// ascending order with (b1,a2) absent; after the swap (v1,v2) is permitted.
std::pair<Instance, FlipCertificate> flip_unsat_to_sat(const Instance& instance, int u,
                                                       const Assignment& near_miss);

// Re-derives the pre-image of the flipped constraint (the swap is
// self-inverse) and re-checks every certificate obligation: tuple
// memberships, witness validity on both sides, parameter preservation.
bool verify_certificate(const Instance& flipped, const FlipCertificate& cert);

}  // namespace rblab
