#pragma once

// Per-summand views used by the elimination routines. Every summand of a
// RingSpec is a Galois ring, hence a chain ring with maximal ideal (p).

#include <algorithm>
#include <vector>

#include "mgc/matrix.hpp"

namespace mgc::detail {

struct Local {
    const RingSpec& R;
    std::size_t s;
    std::size_t o;
    unsigned r;
    u64 q;
    u64 p;
    unsigned m;

    Local(const RingSpec& ring, std::size_t summand)
        : R(ring), s(summand), o(ring.offset(summand)), r(ring.rank(summand)), q(ring.characteristic(summand)),
          p(ring.prime(summand)), m(ring.summands()[summand].m) {}

    void zero(u64* out) const { std::fill(out, out + r, 0); }
    void one(u64* out) const {
        zero(out);
        out[0] = 1 % q;
    }
    bool is_zero(const u64* a) const { return std::all_of(a, a + r, [](u64 x) { return x == 0; }); }
    bool is_one(const u64* a) const {
        if (a[0] != 1 % q) return false;
        for (unsigned i = 1; i < r; ++i)
            if (a[i]) return false;
        return true;
    }
    bool unit(const u64* a) const { return R.is_unit_in(s, a); }
    unsigned val(const u64* a) const { return R.valuation_in(s, a); }
    void add(const u64* a, const u64* b, u64* out) const {
        for (unsigned i = 0; i < r; ++i) out[i] = addmod(a[i], b[i], q);
    }
    void sub(const u64* a, const u64* b, u64* out) const {
        for (unsigned i = 0; i < r; ++i) out[i] = submod(a[i], b[i], q);
    }
    void neg(const u64* a, u64* out) const {
        for (unsigned i = 0; i < r; ++i) out[i] = a[i] ? q - a[i] : 0;
    }
    void mul(const u64* a, const u64* b, u64* out) const { R.mul_in(s, a, b, out); }
    bool inv(const u64* a, u64* out) const { return R.inv_in(s, a, out); }
    // out = a / p^e, valid when val(a) >= e.
    void div_p(const u64* a, unsigned e, u64* out) const {
        const u64 pe = saturating_pow(p, e);
        for (unsigned i = 0; i < r; ++i) out[i] = a[i] / pe;
    }
    void mul_p(const u64* a, unsigned e, u64* out) const {
        const u64 pe = saturating_pow(p, e) % q;
        for (unsigned i = 0; i < r; ++i) out[i] = mulmod(a[i], pe, q);
    }
    // out -= f * a
    void submul(u64* out, const u64* f, const u64* a) const {
        u64 t[kMaxRank];
        mul(f, a, t);
        sub(out, t, out);
    }
};

/// rows x cols matrix of summand elements (r coefficients each).
struct LocalMat {
    std::size_t rows = 0, cols = 0;
    unsigned r = 1;
    std::vector<u64> d;

    LocalMat() = default;
    LocalMat(std::size_t rows_, std::size_t cols_, unsigned r_) : rows(rows_), cols(cols_), r(r_), d(rows_ * cols_ * r_, 0) {}

    u64* at(std::size_t i, std::size_t j) { return d.data() + (i * cols + j) * r; }
    const u64* at(std::size_t i, std::size_t j) const { return d.data() + (i * cols + j) * r; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols; ++j) std::swap_ranges(at(a, j), at(a, j) + r, at(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows; ++i) std::swap_ranges(at(i, a), at(i, a) + r, at(i, b));
    }
};

inline LocalMat extract(const Matrix& a, std::size_t s) {
    const auto& R = *a.ring();
    const std::size_t o = R.offset(s);
    LocalMat out(a.rows(), a.cols(), R.rank(s));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) std::copy(a.at(i, j) + o, a.at(i, j) + o + out.r, out.at(i, j));
    return out;
}

inline void insert(Matrix& a, std::size_t s, const LocalMat& m) {
    const std::size_t o = a.ring()->offset(s);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) std::copy(m.at(i, j), m.at(i, j) + m.r, a.at(i, j) + o);
}

inline LocalMat local_identity(std::size_t n, const Local& L) {
    LocalMat out(n, n, L.r);
    for (std::size_t i = 0; i < n; ++i) L.one(out.at(i, i));
    return out;
}

LocalMat local_mul(const Local& L, const LocalMat& a, const LocalMat& b);
/// Gauss-Jordan with unit pivots; false when singular.
bool local_inverse(const Local& L, const LocalMat& a, LocalMat& out);
void local_det(const Local& L, LocalMat a, u64* out);

}  // namespace mgc::detail
