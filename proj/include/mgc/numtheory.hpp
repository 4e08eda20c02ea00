#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mgc {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 mod) {
    if (mod <= (1ULL << 32)) return (a * b) % mod;
    return static_cast<u64>(static_cast<u128>(a) * b % mod);
}

inline u64 addmod(u64 a, u64 b, u64 mod) {
    u64 s = a + b;
    return s >= mod ? s - mod : s;
}

inline u64 submod(u64 a, u64 b, u64 mod) { return a >= b ? a - b : a + mod - b; }

u64 powmod(u64 base, u64 exp, u64 mod);

/// Inverse of a modulo mod, or 0 when gcd(a, mod) != 1 (mod > 1).
u64 invmod(u64 a, u64 mod);

u64 gcd_u64(u64 a, u64 b);

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

/// Prime factorization as (prime, exponent) pairs sorted by prime.
/// Trial division followed by Pollard rho (Brent variant).
std::vector<std::pair<u64, unsigned>> factorize(u64 n);

/// If n = p^k with p prime and k >= 1, returns {p, k}; otherwise {0, 0}.
std::pair<u64, unsigned> prime_power(u64 n);

/// p^e with saturation at UINT64_MAX.
u64 saturating_pow(u64 p, unsigned e);

}  // namespace mgc
