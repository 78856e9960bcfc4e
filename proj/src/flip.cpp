#include "rblab/flip.hpp"

#include <string>

#include "rblab/errors.hpp"
#include "rblab/solver.hpp"

namespace rblab {

namespace {

std::uint64_t pair_code(const TupleSet& set, std::array<Value, 2> t) {
    const Value buf[2] = {t[0], t[1]};
    return set.encode(std::span<const Value>(buf, 2));
}

std::string show(std::array<Value, 2> t) {
    return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + ")";
}

void require_binary(const Constraint& c) {
    if (c.permitted.arity() != 2)
        throw UnsupportedArity("tuple swaps are defined for k = 2, got k = " +
                               std::to_string(c.permitted.arity()));
}

std::array<Value, 2> project(const Constraint& c, const Assignment& sigma) {
    return {sigma[static_cast<std::size_t>(c.scope[0])],
            sigma[static_cast<std::size_t>(c.scope[1])]};
}

}  // namespace

Constraint swap_tuples(const Constraint& constraint, std::array<Value, 2> a,
                       std::array<Value, 2> b) {
    require_binary(constraint);
    const TupleSet& r = constraint.permitted;
    const std::array<Value, 2> cross1{a[0], b[1]};
    const std::array<Value, 2> cross2{b[0], a[1]};
    if (!r.contains(pair_code(r, a)))
        throw FlipPreconditionViolated("tuple a = " + show(a) + " is not permitted");
    if (!r.contains(pair_code(r, b)))
        throw FlipPreconditionViolated("tuple b = " + show(b) + " is not permitted");
    if (a == b) throw FlipPreconditionViolated("tuples a and b must differ");
    if (r.contains(pair_code(r, cross1)))
        throw FlipPreconditionViolated("cross tuple (a1,b2) = " + show(cross1) +
                                       " is already permitted");
    if (r.contains(pair_code(r, cross2)))
        throw FlipPreconditionViolated("cross tuple (b1,a2) = " + show(cross2) +
                                       " is already permitted");

    Constraint out = constraint;
    out.permitted.erase(pair_code(r, a));
    out.permitted.erase(pair_code(r, b));
    out.permitted.insert(pair_code(r, cross1));
    out.permitted.insert(pair_code(r, cross2));
    return out;
}

std::pair<Instance, FlipCertificate> flip_sat_to_unsat(const Instance& instance,
                                                       const Assignment& unique_solution) {
    if (instance.params.k != 2) throw UnsupportedArity("flips require k = 2");
    for (std::size_t u = 0; u < instance.constraints.size(); ++u) {
        const Constraint& c = instance.constraints[u];
        const std::array<Value, 2> a = project(c, unique_solution);
        if (!c.permitted.contains(pair_code(c.permitted, a)))
            throw DomainError("claimed solution violates constraint " + std::to_string(u));
        // b in ascending code order; crosses must be absent and distinct from
        // a in both coordinates (equal coordinates would make a cross collide
        // with a permitted tuple, which the membership checks also reject).
        for (std::uint64_t bcode : c.permitted.codes()) {
            const std::vector<Value> bt = c.permitted.decode(bcode);
            const std::array<Value, 2> b{bt[0], bt[1]};
            if (b[0] == a[0] || b[1] == a[1]) continue;
            if (c.permitted.contains(pair_code(c.permitted, {a[0], b[1]}))) continue;
            if (c.permitted.contains(pair_code(c.permitted, {b[0], a[1]}))) continue;

            Instance flipped = instance;
            flipped.constraints[u] = swap_tuples(c, a, b);
            FlipCertificate cert;
            cert.u = static_cast<int>(u);
            cert.a = a;
            cert.b = b;
            cert.direction = FlipDirection::SatToUnsat;
            cert.witness = unique_solution;
            return {std::move(flipped), std::move(cert)};
        }
    }
    throw NoFlipPairFound("no constraint admits a tuple swap anchored at the solution");
}

std::pair<Instance, FlipCertificate> flip_unsat_to_sat(const Instance& instance, int u,
                                                       const Assignment& near_miss) {
    if (instance.params.k != 2) throw UnsupportedArity("flips require k = 2");
    if (u < 0 || u >= static_cast<int>(instance.constraints.size()))
        throw DomainError("constraint index out of range: " + std::to_string(u));
    const Constraint& c = instance.constraints[static_cast<std::size_t>(u)];
    const std::array<Value, 2> v = project(c, near_miss);
    if (c.permitted.contains(pair_code(c.permitted, v)))
        throw DomainError("near-miss assignment already satisfies constraint " + std::to_string(u));
    for (std::size_t i = 0; i < instance.constraints.size(); ++i)
        if (i != static_cast<std::size_t>(u) && !satisfies(instance.constraints[i], near_miss))
            throw DomainError("near-miss assignment violates constraint " + std::to_string(i));

    // a = (v1, a2), b = (b1, v2), both permitted, with the second cross
    // (b1, a2) absent; the first cross (a1, b2) = (v1, v2) is absent by the
    // near-miss definition. Ascending scan keeps the choice deterministic.
    for (std::uint64_t acode : c.permitted.codes()) {
        const std::vector<Value> at = c.permitted.decode(acode);
        if (at[0] != v[0]) continue;
        const std::array<Value, 2> a{at[0], at[1]};
        for (std::uint64_t bcode : c.permitted.codes()) {
            const std::vector<Value> bt = c.permitted.decode(bcode);
            if (bt[1] != v[1]) continue;
            const std::array<Value, 2> b{bt[0], bt[1]};
            if (c.permitted.contains(pair_code(c.permitted, {b[0], a[1]}))) continue;

            Instance flipped = instance;
            flipped.constraints[static_cast<std::size_t>(u)] = swap_tuples(c, a, b);
            FlipCertificate cert;
            cert.u = u;
            cert.a = a;
            cert.b = b;
            cert.direction = FlipDirection::UnsatToSat;
            cert.witness = near_miss;
            return {std::move(flipped), std::move(cert)};
        }
    }
    throw NoFlipPairFound("no tuple pair (a1=v1, b2=v2) admits the swap at constraint " +
                          std::to_string(u));
}

bool verify_certificate(const Instance& flipped, const FlipCertificate& cert) {
    if (cert.u < 0 || cert.u >= static_cast<int>(flipped.constraints.size())) return false;
    if (flipped.params.k != 2) return false;
    if (static_cast<int>(cert.witness.size()) != flipped.params.n) return false;
    const Constraint& c = flipped.constraints[static_cast<std::size_t>(cert.u)];
    const TupleSet& r = c.permitted;

    // After the swap the crosses are present and a, b absent.
    const std::array<Value, 2> cross1{cert.a[0], cert.b[1]};
    const std::array<Value, 2> cross2{cert.b[0], cert.a[1]};
    if (!r.contains(pair_code(r, cross1)) || !r.contains(pair_code(r, cross2))) return false;
    if (r.contains(pair_code(r, cert.a)) || r.contains(pair_code(r, cert.b))) return false;

    // Un-swap (self-inverse) to recover the pre-image constraint.
    Constraint original;
    try {
        original = swap_tuples(c, cross1, cross2);
    } catch (const FlipPreconditionViolated&) {
        return false;
    }
    if (original.permitted.size() != r.size()) return false;

    Instance pre = flipped;
    pre.constraints[static_cast<std::size_t>(cert.u)] = original;
    if (cert.direction == FlipDirection::SatToUnsat) {
        // Witness solved the pre-image and now violates the flipped constraint.
        return satisfies_all(pre, cert.witness) && !satisfies(c, cert.witness);
    }
    // UnsatToSat: witness was a near-miss at u and now solves everything.
    return !satisfies(original, cert.witness) && satisfies_all(flipped, cert.witness);
}

}  // namespace rblab
