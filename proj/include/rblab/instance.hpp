#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "rblab/params.hpp"

namespace rblab {

using Value = std::int32_t;
using Assignment = std::vector<Value>;  // values[i] in [0, d) for variable i

// Set of k-tuples over [0, d)^k. Tuples are stored as positional codes
// (first coordinate most significant, so code order == lexicographic tuple
// order), kept sorted for canonical serialization, with a hash index for
// expected-constant-time membership.
class TupleSet {
public:
    TupleSet() = default;
    TupleSet(int arity, std::int64_t domain) : arity_(arity), domain_(domain) {}

    int arity() const { return arity_; }
    std::int64_t domain() const { return domain_; }
    std::size_t size() const { return codes_.size(); }
    const std::vector<std::uint64_t>& codes() const { return codes_; }

    std::uint64_t encode(std::span<const Value> tuple) const;
    std::vector<Value> decode(std::uint64_t code) const;

    bool contains(std::uint64_t code) const { return index_.count(code) != 0; }
    bool contains(std::span<const Value> tuple) const { return contains(encode(tuple)); }

    // Returns false if the code was already present.
    bool insert(std::uint64_t code);
    bool erase(std::uint64_t code);

    std::vector<std::vector<Value>> tuples() const;

    bool operator==(const TupleSet& other) const {
        return arity_ == other.arity_ && domain_ == other.domain_ && codes_ == other.codes_;
    }

private:
    int arity_ = 0;
    std::int64_t domain_ = 0;
    std::vector<std::uint64_t> codes_;
    std::unordered_set<std::uint64_t> index_;
};

struct Constraint {
    std::vector<int> scope;  // k pairwise-distinct variable indices, order significant
    TupleSet permitted;

    bool operator==(const Constraint& other) const {
        return scope == other.scope && permitted == other.permitted;
    }
};

enum class Variant { Original, Symmetric };

struct Instance {
    RBParams params;
    std::vector<Constraint> constraints;
    Variant variant = Variant::Original;
    // Recorded |R_i| / d^k; equals 1 - p up to rounding for the original
    // variant but may deviate for the symmetric one, whose permutation-closed
    // relation cannot always hit (1-p) * d^k exactly. Analytic comparisons for
    // the symmetric variant must use this value.
    double actual_tightness = 0.0;

    bool operator==(const Instance& other) const;
};

// Master relation closed under coordinate permutation, instantiated
// per-constraint through coordinate bijections.
struct SymmetricRelation {
    int k = 0;
    std::int64_t d = 0;
    std::vector<std::uint64_t> codes;  // sorted
    std::uint64_t target_size = 0;

    std::size_t size() const { return codes.size(); }
};

// m constraints, each with a uniformly drawn ordered scope of k distinct
// variables and a uniformly drawn t-subset of [0,d)^k. Pure function of
// (params, seed): repeated calls produce identical instances, and constraint
// i's randomness is independent of constraint j's.
Instance generate_original(const RBParams& params);

// Orbit-wise sampling: walk a seeded shuffle of the tuple space, adding whole
// permutation orbits until the set reaches target_size, then drop whole
// orbits (most recent first) while that strictly reduces the distance to
// target_size and keeps the set nonempty. The achieved size is |codes|.
SymmetricRelation generate_symmetric_relation(std::int64_t d, int k, std::uint64_t target_size,
                                              std::uint64_t seed);

// True iff every coordinate permutation of every member is also a member.
// Exhaustive, intended for d^k up to ~10^6.
bool closed_under_permutation(const SymmetricRelation& rel);

// Per constraint, samples k-1 independent uniform bijections on [0,d) and
// maps rstar coordinate-wise (last coordinate identity); the image becomes
// the permitted set. Scope sampling matches generate_original.
Instance instantiate_symmetric(const RBParams& params, const SymmetricRelation& rstar);

// Deterministic core of instantiate_symmetric, exposed for tests: applies the
// given bijections (one per coordinate except the last) to every tuple.
TupleSet apply_coordinate_bijections(const SymmetricRelation& rstar,
                                     const std::vector<std::vector<Value>>& bijections);

// Same scope, permitted set {(g(a1), a2, ..., ak) : tuple in permitted}.
// Throws DomainError if g is not a permutation of [0, d).
Constraint remap_first_coordinates(const Constraint& constraint,
                                   const std::vector<Value>& bijection);

// Exactly the m scopes generate_original(params) would draw, without
// materializing permitted sets. Scope randomness is a separate stream, so
// this matches full generation bit for bit.
std::vector<std::vector<int>> sample_scopes(const RBParams& params);

}  // namespace rblab
