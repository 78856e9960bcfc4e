#include "rblab/instance.hpp"

#include <algorithm>
#include <string>

#include "rblab/errors.hpp"
#include "rblab/rng.hpp"

namespace rblab {

namespace {

// Stream labels under each constraint's split, so scope and relation
// randomness stay independent of each other.
constexpr std::uint64_t kScopeStream = 0;
constexpr std::uint64_t kRelationStream = 1;

std::vector<int> sample_scope(Rng& rng, int n, int k) {
    std::vector<int> scope;
    scope.reserve(k);
    while (static_cast<int>(scope.size()) < k) {
        const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (std::find(scope.begin(), scope.end(), v) == scope.end()) scope.push_back(v);
    }
    return scope;
}

// Floyd's algorithm: uniform t-subset of [0, space).
std::unordered_set<std::uint64_t> sample_subset(Rng& rng, std::uint64_t t, std::uint64_t space) {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(t * 2);
    for (std::uint64_t j = space - t; j < space; ++j) {
        const std::uint64_t x = rng.below(j + 1);
        if (!chosen.insert(x).second) chosen.insert(j);
    }
    return chosen;
}

std::vector<Value> identity_map(std::int64_t d) {
    std::vector<Value> f(static_cast<std::size_t>(d));
    for (std::int64_t v = 0; v < d; ++v) f[static_cast<std::size_t>(v)] = static_cast<Value>(v);
    return f;
}

std::vector<Value> sample_bijection(Rng& rng, std::int64_t d) {
    std::vector<Value> f = identity_map(d);
    for (std::uint64_t i = static_cast<std::uint64_t>(d) - 1; i > 0; --i)
        std::swap(f[i], f[rng.below(i + 1)]);
    return f;
}

void require_permutation(const std::vector<Value>& f, std::int64_t d) {
    if (static_cast<std::int64_t>(f.size()) != d)
        throw DomainError("bijection must have exactly d = " + std::to_string(d) + " entries");
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    for (Value v : f) {
        if (v < 0 || v >= d) throw DomainError("bijection value out of range: " + std::to_string(v));
        if (seen[static_cast<std::size_t>(v)]) throw DomainError("bijection repeats value " + std::to_string(v));
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

}  // namespace

std::uint64_t TupleSet::encode(std::span<const Value> tuple) const {
    std::uint64_t code = 0;
    for (Value v : tuple) code = code * static_cast<std::uint64_t>(domain_) + static_cast<std::uint64_t>(v);
    return code;
}

std::vector<Value> TupleSet::decode(std::uint64_t code) const {
    std::vector<Value> tuple(static_cast<std::size_t>(arity_));
    for (int i = arity_ - 1; i >= 0; --i) {
        tuple[static_cast<std::size_t>(i)] = static_cast<Value>(code % static_cast<std::uint64_t>(domain_));
        code /= static_cast<std::uint64_t>(domain_);
    }
    return tuple;
}

bool TupleSet::insert(std::uint64_t code) {
    if (!index_.insert(code).second) return false;
    codes_.insert(std::lower_bound(codes_.begin(), codes_.end(), code), code);
    return true;
}

bool TupleSet::erase(std::uint64_t code) {
    if (index_.erase(code) == 0) return false;
    codes_.erase(std::lower_bound(codes_.begin(), codes_.end(), code));
    return true;
}

std::vector<std::vector<Value>> TupleSet::tuples() const {
    std::vector<std::vector<Value>> out;
    out.reserve(codes_.size());
    for (std::uint64_t code : codes_) out.push_back(decode(code));
    return out;
}

bool Instance::operator==(const Instance& other) const {
    return params.n == other.params.n && params.k == other.params.k &&
           params.d == other.params.d && params.m == other.params.m &&
           params.seed == other.params.seed && variant == other.variant &&
           constraints == other.constraints;
}

Instance generate_original(const RBParams& params) {
    if (params.k > params.n)
        throw DomainError("k must not exceed n when generating (k=" + std::to_string(params.k) +
                          ", n=" + std::to_string(params.n) + ")");
    const std::uint64_t space = params.tuple_space();

    Instance inst;
    inst.params = params;
    inst.variant = Variant::Original;
    inst.actual_tightness = static_cast<double>(params.t) / static_cast<double>(space);
    inst.constraints.reserve(static_cast<std::size_t>(params.m));

    const Rng root(params.seed);
    for (std::int64_t i = 0; i < params.m; ++i) {
        const Rng cstream = root.split(static_cast<std::uint64_t>(i));
        Rng scope_rng = cstream.split(kScopeStream);
        Rng rel_rng = cstream.split(kRelationStream);

        Constraint c;
        c.scope = sample_scope(scope_rng, params.n, params.k);
        c.permitted = TupleSet(params.k, params.d);
        for (std::uint64_t code : sample_subset(rel_rng, params.t, space)) c.permitted.insert(code);
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

namespace {

std::vector<std::uint64_t> orbit_codes(const TupleSet& codec, std::uint64_t code) {
    std::vector<Value> tuple = codec.decode(code);
    std::sort(tuple.begin(), tuple.end());
    std::vector<std::uint64_t> orbit;
    do {
        orbit.push_back(codec.encode(tuple));
    } while (std::next_permutation(tuple.begin(), tuple.end()));
    return orbit;
}

}  // namespace

SymmetricRelation generate_symmetric_relation(std::int64_t d, int k, std::uint64_t target_size,
                                              std::uint64_t seed) {
    if (d < 2) throw DomainError("d must be >= 2, got " + std::to_string(d));
    if (k < 2) throw DomainError("k must be >= 2, got " + std::to_string(k));
    long double space_real = 1.0L;
    for (int i = 0; i < k; ++i) space_real *= static_cast<long double>(d);
    if (space_real > static_cast<long double>(1ULL << 22))
        throw DomainError("d^k too large for symmetric-relation generation (limit 2^22)");
    std::uint64_t space = 1;
    for (int i = 0; i < k; ++i) space *= static_cast<std::uint64_t>(d);
    if (target_size < 1 || target_size > space - 1)
        throw DomainError("target_size must lie in [1, d^k - 1], got " + std::to_string(target_size));

    const TupleSet codec(k, d);

    // Seeded shuffle of the whole tuple space = sampling without replacement.
    std::vector<std::uint64_t> order(space);
    for (std::uint64_t i = 0; i < space; ++i) order[i] = i;
    Rng rng = Rng(seed).split(0);
    for (std::uint64_t i = space - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);

    std::unordered_set<std::uint64_t> members;
    std::vector<std::vector<std::uint64_t>> orbits;
    for (std::uint64_t code : order) {
        if (members.size() >= target_size) break;
        if (members.count(code)) continue;
        std::vector<std::uint64_t> orbit = orbit_codes(codec, code);
        for (std::uint64_t oc : orbit) members.insert(oc);
        orbits.push_back(std::move(orbit));
    }

    // Trim overshoot: drop whole orbits, most recent first, while that gets
    // strictly closer to the target and keeps the set nonempty.
    auto distance = [&](std::uint64_t size) {
        return size > target_size ? size - target_size : target_size - size;
    };
    std::uint64_t size = members.size();
    for (auto it = orbits.rbegin(); it != orbits.rend(); ++it) {
        const std::uint64_t shrunk = size - it->size();
        if (shrunk >= 1 && distance(shrunk) < distance(size)) {
            for (std::uint64_t oc : *it) members.erase(oc);
            size = shrunk;
            it->clear();
        }
    }

    SymmetricRelation rel;
    rel.k = k;
    rel.d = d;
    rel.target_size = target_size;
    rel.codes.assign(members.begin(), members.end());
    std::sort(rel.codes.begin(), rel.codes.end());
    return rel;
}

bool closed_under_permutation(const SymmetricRelation& rel) {
    const TupleSet codec(rel.k, rel.d);
    std::unordered_set<std::uint64_t> members(rel.codes.begin(), rel.codes.end());
    for (std::uint64_t code : rel.codes)
        for (std::uint64_t oc : orbit_codes(codec, code))
            if (!members.count(oc)) return false;
    return true;
}

TupleSet apply_coordinate_bijections(const SymmetricRelation& rstar,
                                     const std::vector<std::vector<Value>>& bijections) {
    if (static_cast<int>(bijections.size()) != rstar.k - 1)
        throw DomainError("expected k-1 = " + std::to_string(rstar.k - 1) + " bijections, got " +
                          std::to_string(bijections.size()));
    for (const auto& f : bijections) require_permutation(f, rstar.d);

    const TupleSet codec(rstar.k, rstar.d);
    TupleSet image(rstar.k, rstar.d);
    for (std::uint64_t code : rstar.codes) {
        std::vector<Value> tuple = codec.decode(code);
        for (int j = 0; j < rstar.k - 1; ++j)
            tuple[static_cast<std::size_t>(j)] =
                bijections[static_cast<std::size_t>(j)][static_cast<std::size_t>(tuple[static_cast<std::size_t>(j)])];
        image.insert(image.encode(tuple));
    }
    return image;
}

Instance instantiate_symmetric(const RBParams& params, const SymmetricRelation& rstar) {
    if (rstar.d != params.d || rstar.k != params.k)
        throw DomainError("symmetric relation (d=" + std::to_string(rstar.d) + ", k=" +
                          std::to_string(rstar.k) + ") does not match params (d=" +
                          std::to_string(params.d) + ", k=" + std::to_string(params.k) + ")");
    if (params.k > params.n) throw DomainError("k must not exceed n when generating");

    Instance inst;
    inst.params = params;
    inst.variant = Variant::Symmetric;
    inst.actual_tightness =
        static_cast<double>(rstar.size()) / static_cast<double>(params.tuple_space());
    inst.constraints.reserve(static_cast<std::size_t>(params.m));

    const Rng root(params.seed);
    for (std::int64_t i = 0; i < params.m; ++i) {
        const Rng cstream = root.split(static_cast<std::uint64_t>(i));
        Rng scope_rng = cstream.split(kScopeStream);
        Rng rel_rng = cstream.split(kRelationStream);

        std::vector<std::vector<Value>> bijections;
        bijections.reserve(static_cast<std::size_t>(params.k - 1));
        for (int j = 0; j < params.k - 1; ++j) bijections.push_back(sample_bijection(rel_rng, params.d));

        Constraint c;
        c.scope = sample_scope(scope_rng, params.n, params.k);
        c.permitted = apply_coordinate_bijections(rstar, bijections);
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

std::vector<std::vector<int>> sample_scopes(const RBParams& params) {
    if (params.k > params.n) throw DomainError("k must not exceed n when generating");
    std::vector<std::vector<int>> scopes;
    scopes.reserve(static_cast<std::size_t>(params.m));
    const Rng root(params.seed);
    for (std::int64_t i = 0; i < params.m; ++i) {
        Rng scope_rng = root.split(static_cast<std::uint64_t>(i)).split(kScopeStream);
        scopes.push_back(sample_scope(scope_rng, params.n, params.k));
    }
    return scopes;
}

Constraint remap_first_coordinates(const Constraint& constraint, const std::vector<Value>& bijection) {
    require_permutation(bijection, constraint.permitted.domain());
    Constraint out;
    out.scope = constraint.scope;
    out.permitted = TupleSet(constraint.permitted.arity(), constraint.permitted.domain());
    for (std::uint64_t code : constraint.permitted.codes()) {
        std::vector<Value> tuple = constraint.permitted.decode(code);
        tuple[0] = bijection[static_cast<std::size_t>(tuple[0])];
        out.permitted.insert(out.permitted.encode(tuple));
    }
    return out;
}

}  // namespace rblab
