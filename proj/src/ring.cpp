#include "mgc/ring.hpp"

#include <algorithm>
#include <sstream>

#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

namespace {

// Dense polynomials over Z_p, lowest degree first, no trailing zeros.
using Poly = std::vector<u64>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, u64 p) {
    trim(a);
    const std::size_t df = f.size() - 1;
    const u64 lead_inv = invmod(f.back(), p);
    while (a.size() > df) {
        const u64 c = mulmod(a.back(), lead_inv, p);
        const std::size_t shift = a.size() - 1 - df;
        for (std::size_t i = 0; i <= df; ++i) a[shift + i] = submod(a[shift + i], mulmod(c, f[i], p), p);
        trim(a);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = addmod(out[i + j], mulmod(a[i], b[j], p), p);
    return poly_mod(std::move(out), f, p);
}

Poly poly_powmod(Poly base, u64 e, const Poly& f, u64 p) {
    Poly result{1};
    result = poly_mod(result, f, p);
    base = poly_mod(base, f, p);
    while (e) {
        if (e & 1) result = poly_mulmod(result, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1;
    }
    return result;
}

Poly poly_sub(Poly a, const Poly& b, u64 p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = submod(a[i], b[i], p);
    trim(a);
    return a;
}

Poly poly_gcd(Poly a, Poly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Inverse of a modulo f over Z_p (f irreducible); empty when a == 0.
Poly poly_inverse(const Poly& a, const Poly& f, u64 p) {
    Poly r0 = f, r1 = poly_mod(a, f, p);
    Poly s0{}, s1{1};
    if (r1.empty()) return {};
    while (r1.size() > 1) {
        // r0 = qt * r1 + rem
        Poly rem = r0;
        Poly qt(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 1, 0);
        const u64 lead_inv = invmod(r1.back(), p);
        while (rem.size() >= r1.size() && !rem.empty()) {
            const u64 c = mulmod(rem.back(), lead_inv, p);
            const std::size_t shift = rem.size() - r1.size();
            qt[shift] = c;
            for (std::size_t i = 0; i < r1.size(); ++i)
                rem[shift + i] = submod(rem[shift + i], mulmod(c, r1[i], p), p);
            trim(rem);
        }
        trim(qt);
        // s_new = s0 - qt * s1
        Poly prod(qt.size() + s1.size(), 0);
        for (std::size_t i = 0; i < qt.size(); ++i)
            for (std::size_t j = 0; j < s1.size(); ++j) prod[i + j] = addmod(prod[i + j], mulmod(qt[i], s1[j], p), p);
        trim(prod);
        Poly s_new = poly_sub(s0, prod, p);
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s_new);
        if (r1.empty()) return {};
    }
    const u64 c = invmod(r1[0], p);
    for (auto& x : s1) x = mulmod(x, c, p);
    return poly_mod(s1, f, p);
}

}  // namespace

bool irreducible_mod_p(const Coeffs& f_in, u64 p) {
    Poly f(f_in.size());
    for (std::size_t i = 0; i < f_in.size(); ++i) f[i] = f_in[i] % p;
    trim(f);
    if (f.size() < 2) return false;
    const unsigned r = static_cast<unsigned>(f.size() - 1);
    if (r == 1) return true;
    const Poly x{0, 1};
    auto frob_power = [&](unsigned k) {
        Poly h = poly_mod(x, f, p);
        for (unsigned i = 0; i < k; ++i) h = poly_powmod(h, p, f, p);
        return h;
    };
    if (!poly_sub(frob_power(r), poly_mod(x, f, p), p).empty()) return false;
    for (const auto& [d, e] : factorize(r)) {
        (void)e;
        Poly g = poly_gcd(f, poly_sub(frob_power(r / static_cast<unsigned>(d)), x, p), p);
        if (g.size() != 1) return false;
    }
    return true;
}

Coeffs default_modulus(u64 p, unsigned r) {
    if (r == 1) return {0, 1};
    const u64 count = saturating_pow(p, r);
    for (u64 n = 0; n < count; ++n) {
        Coeffs f(r + 1, 0);
        u64 v = n;
        for (unsigned i = 0; i < r; ++i) {
            f[i] = v % p;
            v /= p;
        }
        f[r] = 1;
        if (f[0] == 0) continue;
        if (irreducible_mod_p(f, p)) return f;
    }
    fail(Errc::ReducibleModulus, "no irreducible polynomial found");
}

// ---------------------------------------------------------------------------

RingSpec::RingSpec(std::vector<GaloisRingSpec> summands) : summands_(std::move(summands)) {
    for (const auto& g : summands_) {
        offsets_.push_back(width_);
        width_ += g.r;
        q_.push_back(saturating_pow(g.p, g.m));
    }
}

Ring RingSpec::make(std::vector<GaloisRingSpec> summands) {
    if (summands.empty()) fail(Errc::InvalidArgument, "ring needs at least one summand");
    for (auto& g : summands) {
        if (!is_prime(g.p)) fail(Errc::NonPrimeP, std::to_string(g.p) + " is not prime");
        if (g.m < 1 || g.r < 1) fail(Errc::InvalidArgument, "m and r must be positive");
        if (g.r > kMaxRank) fail(Errc::InvalidArgument, "rank above " + std::to_string(kMaxRank));
        const u64 q = saturating_pow(g.p, g.m);
        if (q >= (1ULL << 62)) fail(Errc::InvalidArgument, "characteristic too large");
        if (g.modulus.size() != g.r + 1) fail(Errc::InvalidArgument, "modulus must have degree r");
        if (g.modulus.back() != 1) fail(Errc::InvalidArgument, "modulus must be monic");
        for (u64 c : g.modulus)
            if (c >= q) fail(Errc::InvalidArgument, "modulus coefficient out of range");
        if (!irreducible_mod_p(g.modulus, g.p))
            fail(Errc::ReducibleModulus, "modulus is reducible mod " + std::to_string(g.p));
    }
    std::sort(summands.begin(), summands.end());
    std::shared_ptr<RingSpec> ring(new RingSpec(summands));
    if (ring->summands_.size() > 1) {
        for (const auto& g : ring->summands_) ring->local_.push_back(Ring(new RingSpec({g})));
    }
    return ring;
}

Ring RingSpec::summand_ring(std::size_t s) const {
    if (summands_.size() == 1) return shared_from_this();
    return local_.at(s);
}

u64 RingSpec::cardinality() const {
    u128 acc = 1;
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        for (unsigned i = 0; i < summands_[s].r; ++i) {
            acc *= q_[s];
            if (acc > UINT64_MAX) return UINT64_MAX;
        }
    }
    return static_cast<u64>(acc);
}

u64 RingSpec::unit_count() const {
    u128 acc = 1;
    for (const auto& g : summands_) {
        const u64 pr = saturating_pow(g.p, g.r);
        if (pr == UINT64_MAX) return UINT64_MAX;
        acc *= (pr - 1);
        for (unsigned i = 0; i < g.r * (g.m - 1); ++i) {
            acc *= g.p;
            if (acc > UINT64_MAX) return UINT64_MAX;
        }
        if (acc > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<u64>(acc);
}

bool RingSpec::is_integer_residue() const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        if (summands_[s].r != 1) return false;
        if (s > 0 && summands_[s].p == summands_[s - 1].p) return false;
    }
    return true;
}

u64 RingSpec::integer_modulus() const {
    u128 acc = 1;
    for (u64 q : q_) {
        acc *= q;
        if (acc > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<u64>(acc);
}

std::string RingSpec::describe() const {
    std::ostringstream os;
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const auto& g = summands_[s];
        if (s) os << "+";
        os << "GR(" << g.p << "," << g.m << "," << g.r << ")";
    }
    return os.str();
}

void RingSpec::set_zero(u64* out) const { std::fill(out, out + width_, 0); }

void RingSpec::set_one(u64* out) const {
    set_zero(out);
    for (std::size_t s = 0; s < summands_.size(); ++s) out[offsets_[s]] = 1 % q_[s];
}

void RingSpec::set_int(std::int64_t v, u64* out) const {
    set_zero(out);
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const u64 q = q_[s];
        u64 x;
        if (v >= 0) {
            x = static_cast<u64>(v) % q;
        } else {
            // -(v+1) avoids overflow at INT64_MIN.
            x = q - 1 - static_cast<u64>(-(v + 1)) % q;
        }
        out[offsets_[s]] = x;
    }
}

void RingSpec::add(const u64* a, const u64* b, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const u64 q = q_[s];
        for (std::size_t i = offsets_[s]; i < offsets_[s] + summands_[s].r; ++i) out[i] = addmod(a[i], b[i], q);
    }
}

void RingSpec::sub(const u64* a, const u64* b, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const u64 q = q_[s];
        for (std::size_t i = offsets_[s]; i < offsets_[s] + summands_[s].r; ++i) out[i] = submod(a[i], b[i], q);
    }
}

void RingSpec::neg(const u64* a, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const u64 q = q_[s];
        for (std::size_t i = offsets_[s]; i < offsets_[s] + summands_[s].r; ++i) out[i] = a[i] ? q - a[i] : 0;
    }
}

void RingSpec::mul_in(std::size_t s, const u64* a, const u64* b, u64* out) const {
    const u64 q = q_[s];
    const unsigned r = summands_[s].r;
    if (r == 1) {
        out[0] = mulmod(a[0], b[0], q);
        return;
    }
    u64 tmp[2 * kMaxRank] = {};
    for (unsigned i = 0; i < r; ++i) {
        if (!a[i]) continue;
        for (unsigned j = 0; j < r; ++j) tmp[i + j] = addmod(tmp[i + j], mulmod(a[i], b[j], q), q);
    }
    const auto& f = summands_[s].modulus;
    for (unsigned d = 2 * r - 2; d >= r; --d) {
        const u64 t = tmp[d];
        if (!t) continue;
        tmp[d] = 0;
        for (unsigned i = 0; i < r; ++i) tmp[d - r + i] = submod(tmp[d - r + i], mulmod(t, f[i], q), q);
    }
    std::copy(tmp, tmp + r, out);
}

void RingSpec::mul(const u64* a, const u64* b, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const std::size_t o = offsets_[s];
        mul_in(s, a + o, b + o, out + o);
    }
}

bool RingSpec::is_zero(const u64* a) const {
    return std::all_of(a, a + width_, [](u64 x) { return x == 0; });
}

bool RingSpec::is_one(const u64* a) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const std::size_t o = offsets_[s];
        if (a[o] != 1 % q_[s]) return false;
        for (unsigned i = 1; i < summands_[s].r; ++i)
            if (a[o + i]) return false;
    }
    return true;
}

bool RingSpec::equal(const u64* a, const u64* b) const { return std::equal(a, a + width_, b); }

bool RingSpec::is_unit_in(std::size_t s, const u64* a) const {
    const u64 p = summands_[s].p;
    for (unsigned i = 0; i < summands_[s].r; ++i)
        if (a[i] % p) return true;
    return false;
}

bool RingSpec::is_unit(const u64* a) const {
    for (std::size_t s = 0; s < summands_.size(); ++s)
        if (!is_unit_in(s, a + offsets_[s])) return false;
    return true;
}

bool RingSpec::inv_in(std::size_t s, const u64* a, u64* out) const {
    const auto& g = summands_[s];
    const u64 q = q_[s];
    if (g.r == 1) {
        const u64 x = invmod(a[0], q);
        if (!x && q > 1) return false;
        out[0] = x;
        return true;
    }
    if (!is_unit_in(s, a)) return false;
    // Invert in the residue field, then Newton-lift: b <- b(2 - ab).
    Poly abar(a, a + g.r), fbar(g.modulus);
    for (auto& c : abar) c %= g.p;
    for (auto& c : fbar) c %= g.p;
    trim(abar);
    Poly binv = poly_inverse(abar, fbar, g.p);
    if (binv.empty()) return false;
    u64 b[kMaxRank] = {}, t[kMaxRank], two_minus[kMaxRank];
    std::copy(binv.begin(), binv.end(), b);
    for (int iter = 0; iter < 80; ++iter) {
        mul_in(s, a, b, t);
        bool done = t[0] == 1 % q;
        for (unsigned i = 1; i < g.r && done; ++i) done = t[i] == 0;
        if (done) {
            std::copy(b, b + g.r, out);
            return true;
        }
        for (unsigned i = 0; i < g.r; ++i) two_minus[i] = submod(0, t[i], q);
        two_minus[0] = addmod(two_minus[0], 2 % q, q);
        mul_in(s, b, two_minus, b);
    }
    return false;
}

bool RingSpec::inv(const u64* a, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const std::size_t o = offsets_[s];
        if (!inv_in(s, a + o, out + o)) return false;
    }
    return true;
}

void RingSpec::reduce(u64* a) const {
    for (std::size_t s = 0; s < summands_.size(); ++s)
        for (std::size_t i = offsets_[s]; i < offsets_[s] + summands_[s].r; ++i) a[i] %= q_[s];
}

void RingSpec::pow_in(std::size_t s, const u64* a, u64 e, u64* out) const {
    const unsigned r = summands_[s].r;
    u64 base[kMaxRank], acc[kMaxRank] = {};
    std::copy(a, a + r, base);
    acc[0] = 1 % q_[s];
    while (e) {
        if (e & 1) mul_in(s, acc, base, acc);
        mul_in(s, base, base, base);
        e >>= 1;
    }
    std::copy(acc, acc + r, out);
}

unsigned RingSpec::valuation_in(std::size_t s, const u64* a) const {
    const auto& g = summands_[s];
    unsigned best = g.m;
    for (unsigned i = 0; i < g.r; ++i) {
        u64 c = a[i];
        if (!c) continue;
        unsigned v = 0;
        while (c % g.p == 0) {
            c /= g.p;
            ++v;
        }
        best = std::min(best, v);
    }
    return best;
}

namespace {

// Teichmuller representative of a summand element: a^{(p^r)^{m-1}}.
void teich_in(const RingSpec& R, std::size_t s, const u64* a, u64* out) {
    const auto& g = R.summands()[s];
    u64 t[kMaxRank];
    std::copy(a, a + g.r, t);
    for (unsigned i = 0; i < g.r * (g.m - 1); ++i) R.pow_in(s, t, g.p, t);
    std::copy(t, t + g.r, out);
}

std::vector<Coeffs> decompose_in(const RingSpec& R, std::size_t s, const u64* a) {
    const auto& g = R.summands()[s];
    const u64 q = R.characteristic(s);
    std::vector<Coeffs> digits;
    u64 cur[kMaxRank], t[kMaxRank];
    std::copy(a, a + g.r, cur);
    for (unsigned i = 0; i < g.m; ++i) {
        if (R.is_unit_in(s, cur)) {
            teich_in(R, s, cur, t);
        } else {
            std::fill(t, t + g.r, 0);
        }
        digits.emplace_back(t, t + g.r);
        for (unsigned j = 0; j < g.r; ++j) cur[j] = submod(cur[j], t[j], q) / g.p;
    }
    return digits;
}

void recompose_in(const RingSpec& R, std::size_t s, const std::vector<Coeffs>& digits, u64* out) {
    const auto& g = R.summands()[s];
    const u64 q = R.characteristic(s);
    if (digits.size() != g.m) fail(Errc::ShapeMismatch, "expected m Teichmuller digits");
    std::fill(out, out + g.r, 0);
    u64 scale = 1 % q;
    for (const auto& d : digits) {
        if (d.size() != g.r) fail(Errc::ShapeMismatch, "digit has wrong rank");
        for (unsigned j = 0; j < g.r; ++j) out[j] = addmod(out[j], mulmod(d[j] % q, scale, q), q);
        scale = mulmod(scale, g.p, q);
    }
}

}  // namespace

void RingSpec::frobenius(const unsigned* exps, const u64* a, u64* out) const {
    for (std::size_t s = 0; s < summands_.size(); ++s) {
        const std::size_t o = offsets_[s];
        const auto& g = summands_[s];
        if (exps[s] % g.r == 0) {
            std::copy(a + o, a + o + g.r, out + o);
            continue;
        }
        auto digits = decompose_in(*this, s, a + o);
        for (auto& d : digits)
            for (unsigned k = 0; k < exps[s]; ++k) pow_in(s, d.data(), g.p, d.data());
        recompose_in(*this, s, digits, out + o);
    }
}

// ---------------------------------------------------------------------------

bool same_ring(const Ring& a, const Ring& b) { return a == b || (a && b && *a == *b); }

void require_same_ring(const Ring& a, const Ring& b, const char* where) {
    if (!same_ring(a, b)) fail(Errc::RingMismatch, std::string(where) + ": operands over different rings");
}

Ring ring_integer_residue(u64 n) {
    if (n < 2) fail(Errc::InvalidArgument, "integer residue ring needs n >= 2");
    if (n >= (1ULL << 48)) fail(Errc::FactorizationTooLarge, "n must be below 2^48");
    std::vector<GaloisRingSpec> parts;
    for (const auto& [p, e] : factorize(n)) parts.push_back({p, e, 1, {0, 1}});
    return RingSpec::make(std::move(parts));
}

Ring ring_galois(u64 p, unsigned m, unsigned r, std::optional<Coeffs> modulus) {
    if (!is_prime(p)) fail(Errc::NonPrimeP, std::to_string(p) + " is not prime");
    if (r < 1 || r > kMaxRank) fail(Errc::InvalidArgument, "rank out of range");
    Coeffs f = modulus ? *modulus : default_modulus(p, r);
    return RingSpec::make({{p, m, r, std::move(f)}});
}

Ring ring_field(u64 q) {
    auto [p, k] = prime_power(q);
    if (!p) fail(Errc::NonPrimeP, std::to_string(q) + " is not a prime power");
    return ring_galois(p, 1, k);
}

Ring ring_direct_sum(const std::vector<Ring>& parts) {
    std::vector<GaloisRingSpec> all;
    for (const auto& r : parts)
        for (const auto& g : r->summands()) all.push_back(g);
    return RingSpec::make(std::move(all));
}

// ---------------------------------------------------------------------------

RingElement::RingElement(Ring ring) : ring_(std::move(ring)), c_(ring_->width(), 0) {}

RingElement::RingElement(Ring ring, Coeffs flat) : ring_(std::move(ring)), c_(std::move(flat)) {
    if (c_.size() != ring_->width()) fail(Errc::ShapeMismatch, "coefficient vector has wrong length");
    ring_->reduce(c_.data());
}

RingElement RingElement::from_int(const Ring& ring, std::int64_t v) {
    RingElement e(ring);
    ring->set_int(v, e.c_.data());
    return e;
}

RingElement RingElement::one(const Ring& ring) {
    RingElement e(ring);
    ring->set_one(e.c_.data());
    return e;
}

RingElement RingElement::from_summands(const Ring& ring, const std::vector<Coeffs>& parts) {
    if (parts.size() != ring->num_summands()) fail(Errc::ShapeMismatch, "wrong number of summands");
    Coeffs flat;
    for (std::size_t s = 0; s < parts.size(); ++s) {
        if (parts[s].size() != ring->rank(s)) fail(Errc::ShapeMismatch, "summand coefficient count");
        for (u64 c : parts[s]) {
            if (c >= ring->characteristic(s)) fail(Errc::ShapeMismatch, "coefficient out of range");
            flat.push_back(c);
        }
    }
    return RingElement(ring, std::move(flat));
}

std::vector<Coeffs> RingElement::summand_coeffs() const {
    std::vector<Coeffs> out;
    for (std::size_t s = 0; s < ring_->num_summands(); ++s) {
        const std::size_t o = ring_->offset(s);
        out.emplace_back(c_.begin() + o, c_.begin() + o + ring_->rank(s));
    }
    return out;
}

std::optional<u64> RingElement::to_integer() const {
    if (!ring_->is_integer_residue()) return std::nullopt;
    u128 value = 0, mod = 1;
    for (std::size_t s = 0; s < ring_->num_summands(); ++s) {
        const u64 q = ring_->characteristic(s);
        const u64 a = c_[ring_->offset(s)];
        // value + mod * t == a (mod q)
        const u64 cur = static_cast<u64>(value % q);
        const u64 mq = static_cast<u64>(mod % q);
        const u64 t = mulmod(submod(a, cur, q), invmod(mq, q), q);
        value += mod * t;
        mod *= q;
    }
    return static_cast<u64>(value);
}

std::string RingElement::to_string() const {
    if (auto v = to_integer()) return std::to_string(*v);
    std::ostringstream os;
    auto parts = summand_coeffs();
    for (std::size_t s = 0; s < parts.size(); ++s) {
        if (s) os << "|";
        os << "[";
        for (std::size_t i = 0; i < parts[s].size(); ++i) os << (i ? "," : "") << parts[s][i];
        os << "]";
    }
    return os.str();
}

bool RingElement::operator==(const RingElement& o) const { return same_ring(ring_, o.ring_) && c_ == o.c_; }

RingElement ring_add(const RingElement& a, const RingElement& b) {
    require_same_ring(a.ring(), b.ring(), "ring_add");
    RingElement out(a.ring());
    a.ring()->add(a.data(), b.data(), out.data());
    return out;
}

RingElement ring_sub(const RingElement& a, const RingElement& b) {
    require_same_ring(a.ring(), b.ring(), "ring_sub");
    RingElement out(a.ring());
    a.ring()->sub(a.data(), b.data(), out.data());
    return out;
}

RingElement ring_neg(const RingElement& a) {
    RingElement out(a.ring());
    a.ring()->neg(a.data(), out.data());
    return out;
}

RingElement ring_mul(const RingElement& a, const RingElement& b) {
    require_same_ring(a.ring(), b.ring(), "ring_mul");
    RingElement out(a.ring());
    a.ring()->mul(a.data(), b.data(), out.data());
    return out;
}

RingElement ring_inv(const RingElement& a) {
    RingElement out(a.ring());
    if (!a.ring()->inv(a.data(), out.data())) fail(Errc::NonUnit, a.to_string() + " is not a unit");
    return out;
}

RingElement ring_pow(const RingElement& a, u64 e) {
    RingElement acc = RingElement::one(a.ring()), base = a;
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

TeichmullerDigits teichmuller_decompose(const RingElement& a) {
    const auto& R = *a.ring();
    TeichmullerDigits out;
    for (std::size_t s = 0; s < R.num_summands(); ++s) out.push_back(decompose_in(R, s, a.data() + R.offset(s)));
    return out;
}

RingElement teichmuller_recompose(const Ring& ring, const TeichmullerDigits& digits) {
    if (digits.size() != ring->num_summands()) fail(Errc::ShapeMismatch, "wrong number of summands");
    RingElement out(ring);
    for (std::size_t s = 0; s < ring->num_summands(); ++s) recompose_in(*ring, s, digits[s], out.data() + ring->offset(s));
    return out;
}

RingAutomorphism make_automorphism(const Ring& ring, std::vector<unsigned> exponents) {
    if (exponents.size() != ring->num_summands())
        fail(Errc::InvalidAutomorphism, "one Frobenius exponent per summand required");
    for (std::size_t s = 0; s < exponents.size(); ++s)
        if (exponents[s] >= ring->rank(s))
            fail(Errc::InvalidAutomorphism, "Frobenius exponent must be below the summand rank");
    return {ring, std::move(exponents)};
}

RingElement frobenius_apply(const RingAutomorphism& aut, const RingElement& a) {
    require_same_ring(aut.ring, a.ring(), "frobenius_apply");
    RingElement out(a.ring());
    a.ring()->frobenius(aut.exponents.data(), a.data(), out.data());
    return out;
}

std::vector<RingElement> ring_elements(const Ring& ring, u64 cap) {
    const u64 total = ring->cardinality();
    if (total > cap) fail(Errc::CapExceeded, "ring has more than " + std::to_string(cap) + " elements");
    std::vector<u64> mods;
    for (std::size_t s = 0; s < ring->num_summands(); ++s)
        for (unsigned i = 0; i < ring->rank(s); ++i) mods.push_back(ring->characteristic(s));
    std::vector<RingElement> out;
    out.reserve(total);
    Coeffs cur(ring->width(), 0);
    for (u64 k = 0; k < total; ++k) {
        out.emplace_back(ring, cur);
        for (std::size_t i = cur.size(); i-- > 0;) {
            if (++cur[i] < mods[i]) break;
            cur[i] = 0;
        }
    }
    return out;
}

std::vector<RingElement> ring_units(const Ring& ring, u64 cap) {
    std::vector<RingElement> out;
    for (auto& e : ring_elements(ring, cap))
        if (e.is_unit()) out.push_back(std::move(e));
    return out;
}

RingElement random_element(const Ring& ring, Rng& rng) {
    Coeffs c(ring->width());
    for (std::size_t s = 0; s < ring->num_summands(); ++s)
        for (unsigned i = 0; i < ring->rank(s); ++i) c[ring->offset(s) + i] = rng.below(ring->characteristic(s));
    return RingElement(ring, std::move(c));
}

RingElement random_unit(const Ring& ring, Rng& rng) {
    Coeffs c(ring->width());
    for (std::size_t s = 0; s < ring->num_summands(); ++s) {
        u64* slot = c.data() + ring->offset(s);
        do {
            for (unsigned i = 0; i < ring->rank(s); ++i) slot[i] = rng.below(ring->characteristic(s));
        } while (!ring->is_unit_in(s, slot));
    }
    return RingElement(ring, std::move(c));
}

}  // namespace mgc
