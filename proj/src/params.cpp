#include "rblab/params.hpp"

#include <cfenv>
#include <cmath>
#include <string>

#include "rblab/errors.hpp"

namespace rblab {

double round_half_even(double x) {
    // nearbyint honors the current rounding mode; the default FE_TONEAREST
    // is round-to-nearest, ties-to-even.
    return std::nearbyint(x);
}

std::uint64_t RBParams::tuple_space() const {
    std::uint64_t space = 1;
    for (int i = 0; i < k; ++i) space *= static_cast<std::uint64_t>(d);
    return space;
}

RBParams derive_params(int n, double alpha, int k, double p, double r, std::uint64_t seed) {
    if (n < 2) throw DomainError("n must be >= 2, got " + std::to_string(n));
    if (!(alpha > 0.0)) throw DomainError("alpha must be > 0, got " + std::to_string(alpha));
    if (k < 2) throw DomainError("k must be >= 2, got " + std::to_string(k));
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1), got " + std::to_string(p));
    if (!(r > 0.0)) throw DomainError("r must be > 0, got " + std::to_string(r));

    RBParams params;
    params.n = n;
    params.alpha = alpha;
    params.k = k;
    params.p = p;
    params.r = r;
    params.seed = seed;

    const double d_real = std::pow(static_cast<double>(n), alpha);
    if (!(d_real < 9.0e18)) throw DomainError("alpha: n^alpha exceeds the 64-bit domain limit");
    params.d = static_cast<std::int64_t>(round_half_even(d_real));
    if (params.d < 2) params.d = 2;

    // d^k must stay representable; 2^62 leaves headroom for d^k - 1 arithmetic.
    long double space = 1.0L;
    for (int i = 0; i < k; ++i) space *= static_cast<long double>(params.d);
    if (space > 4.6e18L) throw DomainError("k: d^k exceeds the 64-bit tuple-space limit");
    const std::uint64_t dk = params.tuple_space();

    const double m_real = r * static_cast<double>(n) * std::log(static_cast<double>(params.d));
    params.m = static_cast<std::int64_t>(round_half_even(m_real));
    if (params.m < 1) params.m = 1;

    const double t_real = (1.0 - p) * static_cast<double>(dk);
    std::uint64_t t = static_cast<std::uint64_t>(round_half_even(t_real));
    if (t < 1) t = 1;
    if (t > dk - 1) t = dk - 1;
    params.t = t;

    return params;
}

}  // namespace rblab
