#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgc/numtheory.hpp"

namespace mgc {

using Coeffs = std::vector<u64>;

/// GR(p^m, r) = Z_{p^m}[x] / (modulus), modulus = c_0 + c_1 x + ... + x^r.
struct GaloisRingSpec {
    u64 p = 2;
    unsigned m = 1;
    unsigned r = 1;
    Coeffs modulus;

    auto operator<=>(const GaloisRingSpec&) const = default;
    bool operator==(const GaloisRingSpec&) const = default;
};

class RingSpec;
using Ring = std::shared_ptr<const RingSpec>;

inline constexpr unsigned kMaxRank = 16;

/// A finite commutative ring given as a direct sum of Galois rings.
///
/// Elements are flat coefficient arrays of length width(); summand s owns
/// the slots [offset(s), offset(s) + rank(s)). The raw arithmetic below
/// works on such arrays; RingElement is the checked value type on top.
class RingSpec : public std::enable_shared_from_this<RingSpec> {
public:
    /// Validates every summand and stores them in canonical order.
    static Ring make(std::vector<GaloisRingSpec> summands);

    const std::vector<GaloisRingSpec>& summands() const { return summands_; }
    std::size_t num_summands() const { return summands_.size(); }
    std::size_t width() const { return width_; }
    std::size_t offset(std::size_t s) const { return offsets_[s]; }
    unsigned rank(std::size_t s) const { return summands_[s].r; }
    u64 prime(std::size_t s) const { return summands_[s].p; }
    /// p^m of summand s.
    u64 characteristic(std::size_t s) const { return q_[s]; }

    /// Number of elements, saturating at UINT64_MAX.
    u64 cardinality() const;
    /// Number of units, saturating at UINT64_MAX.
    u64 unit_count() const;
    bool is_field() const { return summands_.size() == 1 && summands_[0].m == 1; }
    /// True when every summand has rank 1 (so the ring is some Z_n).
    bool is_integer_residue() const;
    /// The integer n with R = Z_n, if is_integer_residue().
    u64 integer_modulus() const;

    /// The one-summand ring GR for summand s (this ring when already local).
    Ring summand_ring(std::size_t s) const;

    bool operator==(const RingSpec& o) const { return summands_ == o.summands_; }

    std::string describe() const;

    // Raw arithmetic on width()-long arrays. Output may alias inputs.
    void set_zero(u64* out) const;
    void set_one(u64* out) const;
    void set_int(std::int64_t v, u64* out) const;
    void add(const u64* a, const u64* b, u64* out) const;
    void sub(const u64* a, const u64* b, u64* out) const;
    void neg(const u64* a, u64* out) const;
    void mul(const u64* a, const u64* b, u64* out) const;
    bool is_zero(const u64* a) const;
    bool is_one(const u64* a) const;
    bool equal(const u64* a, const u64* b) const;
    bool is_unit(const u64* a) const;
    /// Returns false (leaving out unspecified) when a is not a unit.
    bool inv(const u64* a, u64* out) const;
    void reduce(u64* a) const;

    // Single-summand helpers; pointers address the summand's own slots.
    void mul_in(std::size_t s, const u64* a, const u64* b, u64* out) const;
    bool is_unit_in(std::size_t s, const u64* a) const;
    bool inv_in(std::size_t s, const u64* a, u64* out) const;
    void pow_in(std::size_t s, const u64* a, u64 e, u64* out) const;
    /// p-adic valuation of a summand element (m when zero).
    unsigned valuation_in(std::size_t s, const u64* a) const;

    /// Per-summand Frobenius power; exps has num_summands() entries.
    void frobenius(const unsigned* exps, const u64* a, u64* out) const;

private:
    explicit RingSpec(std::vector<GaloisRingSpec> summands);

    std::vector<GaloisRingSpec> summands_;
    std::vector<std::size_t> offsets_;
    std::vector<u64> q_;
    std::size_t width_ = 0;
    mutable std::vector<Ring> local_;
};

bool same_ring(const Ring& a, const Ring& b);
void require_same_ring(const Ring& a, const Ring& b, const char* where);

// Factories.
Ring ring_integer_residue(u64 n);
Ring ring_galois(u64 p, unsigned m, unsigned r, std::optional<Coeffs> modulus = std::nullopt);
Ring ring_field(u64 q);
Ring ring_direct_sum(const std::vector<Ring>& parts);

/// Least monic polynomial of degree r irreducible mod p, ordered by the
/// base-p number c_r p^r + ... + c_0 (so top coefficients compare first).
Coeffs default_modulus(u64 p, unsigned r);

/// Rabin irreducibility test over Z_p; f given low degree first.
bool irreducible_mod_p(const Coeffs& f, u64 p);

class RingElement {
public:
    explicit RingElement(Ring ring);
    RingElement(Ring ring, Coeffs flat);

    static RingElement from_int(const Ring& ring, std::int64_t v);
    static RingElement from_summands(const Ring& ring, const std::vector<Coeffs>& parts);
    static RingElement one(const Ring& ring);

    const Ring& ring() const { return ring_; }
    const Coeffs& coeffs() const { return c_; }
    u64* data() { return c_.data(); }
    const u64* data() const { return c_.data(); }
    std::vector<Coeffs> summand_coeffs() const;

    bool is_zero() const { return ring_->is_zero(c_.data()); }
    bool is_one() const { return ring_->is_one(c_.data()); }
    bool is_unit() const { return ring_->is_unit(c_.data()); }

    /// CRT value in [0, n) when the ring is Z_n.
    std::optional<u64> to_integer() const;
    std::string to_string() const;

    bool operator==(const RingElement& o) const;

private:
    Ring ring_;
    Coeffs c_;
};

RingElement ring_add(const RingElement& a, const RingElement& b);
RingElement ring_sub(const RingElement& a, const RingElement& b);
RingElement ring_neg(const RingElement& a);
RingElement ring_mul(const RingElement& a, const RingElement& b);
RingElement ring_inv(const RingElement& a);
RingElement ring_pow(const RingElement& a, u64 e);

inline RingElement operator+(const RingElement& a, const RingElement& b) { return ring_add(a, b); }
inline RingElement operator-(const RingElement& a, const RingElement& b) { return ring_sub(a, b); }
inline RingElement operator-(const RingElement& a) { return ring_neg(a); }
inline RingElement operator*(const RingElement& a, const RingElement& b) { return ring_mul(a, b); }

/// digits[s][i] is the Teichmuller digit t_i of summand s (r_s coefficients).
using TeichmullerDigits = std::vector<std::vector<Coeffs>>;

TeichmullerDigits teichmuller_decompose(const RingElement& a);
RingElement teichmuller_recompose(const Ring& ring, const TeichmullerDigits& digits);

struct RingAutomorphism {
    Ring ring;
    std::vector<unsigned> exponents;
};

/// Checks 0 <= e_s < r_s for every summand; throws InvalidAutomorphism.
RingAutomorphism make_automorphism(const Ring& ring, std::vector<unsigned> exponents);
RingElement frobenius_apply(const RingAutomorphism& aut, const RingElement& a);

/// All elements in lexicographic coefficient order; requires |R| <= cap.
std::vector<RingElement> ring_elements(const Ring& ring, u64 cap = 1u << 20);
std::vector<RingElement> ring_units(const Ring& ring, u64 cap = 1u << 20);

/// Uniform element / unit.
class Rng;
RingElement random_element(const Ring& ring, Rng& rng);
RingElement random_unit(const Ring& ring, Rng& rng);

}  // namespace mgc
