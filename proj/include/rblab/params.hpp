#pragma once

#include <cstdint>

namespace rblab {

// Parameter tuple of a random binary-domain CSP family: n variables over a
// common domain of size d = round(n^alpha), m = round(r * n * ln d)
// constraints of arity k, each permitting t = round((1-p) * d^k) value
// tuples. d, m, t are derived once and stored; re-deriving from
// (n, alpha, p, r) is idempotent.
struct RBParams {
    int n = 0;
    double alpha = 0.0;
    int k = 0;
    double p = 0.0;
    double r = 0.0;
    std::uint64_t seed = 0;

    // Derived. Rounding is half-to-even; d >= 2, m >= 1, 1 <= t <= d^k - 1.
    std::int64_t d = 0;
    std::int64_t m = 0;
    std::uint64_t t = 0;

    // d^k as a checked 64-bit value (valid params guarantee it fits).
    std::uint64_t tuple_space() const;
};

// Validates n >= 2, alpha > 0, k >= 2, 0 < p < 1, r > 0 and computes the
// derived quantities. Throws DomainError naming the offending parameter.
// Also rejects parameter points whose d or d^k cannot be represented in
// 64 bits, since no instance of that size could ever be materialized.
RBParams derive_params(int n, double alpha, int k, double p, double r, std::uint64_t seed);

// round-half-to-even of a nonnegative real
double round_half_even(double x);

}  // namespace rblab
