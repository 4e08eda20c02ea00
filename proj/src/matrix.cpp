#include "mgc/matrix.hpp"

#include <sstream>

#include "local.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

using detail::Local;
using detail::LocalMat;

namespace detail {

LocalMat local_mul(const Local& L, const LocalMat& a, const LocalMat& b) {
    LocalMat out(a.rows, b.cols, L.r);
    u64 t[kMaxRank];
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const u64* x = a.at(i, k);
            if (L.is_zero(x)) continue;
            for (std::size_t j = 0; j < b.cols; ++j) {
                L.mul(x, b.at(k, j), t);
                L.add(out.at(i, j), t, out.at(i, j));
            }
        }
    return out;
}

bool local_inverse(const Local& L, const LocalMat& a_in, LocalMat& out) {
    const std::size_t n = a_in.rows;
    LocalMat a = a_in;
    out = local_identity(n, L);
    u64 pinv[kMaxRank], f[kMaxRank], t[kMaxRank];
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t i = c; i < n; ++i)
            if (L.unit(a.at(i, c))) {
                piv = i;
                break;
            }
        if (piv == n) return false;
        a.swap_rows(piv, c);
        out.swap_rows(piv, c);
        L.inv(a.at(c, c), pinv);
        for (std::size_t j = 0; j < n; ++j) {
            L.mul(a.at(c, j), pinv, t);
            std::copy(t, t + L.r, a.at(c, j));
            L.mul(out.at(c, j), pinv, t);
            std::copy(t, t + L.r, out.at(c, j));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || L.is_zero(a.at(i, c))) continue;
            std::copy(a.at(i, c), a.at(i, c) + L.r, f);
            for (std::size_t j = 0; j < n; ++j) {
                L.submul(a.at(i, j), f, a.at(c, j));
                L.submul(out.at(i, j), f, out.at(c, j));
            }
        }
    }
    return true;
}

void local_det(const Local& L, LocalMat a, u64* out) {
    const std::size_t n = a.rows;
    u64 acc[kMaxRank], t[kMaxRank], u[kMaxRank], uinv[kMaxRank], f[kMaxRank];
    L.one(acc);
    bool negate = false;
    for (std::size_t c = 0; c < n; ++c) {
        // Pivot of least valuation in the remaining square.
        std::size_t bi = n, bj = n;
        unsigned best = L.m;
        for (std::size_t i = c; i < n && best > 0; ++i)
            for (std::size_t j = c; j < n; ++j) {
                unsigned v = L.val(a.at(i, j));
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    if (v == 0) break;
                }
            }
        if (bi == n) {
            L.zero(out);
            return;
        }
        if (bi != c) {
            a.swap_rows(bi, c);
            negate = !negate;
        }
        if (bj != c) {
            a.swap_cols(bj, c);
            negate = !negate;
        }
        L.mul(acc, a.at(c, c), acc);
        L.div_p(a.at(c, c), best, u);
        L.inv(u, uinv);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (L.is_zero(a.at(i, c))) continue;
            L.div_p(a.at(i, c), best, t);
            L.mul(t, uinv, f);
            for (std::size_t j = c; j < n; ++j) L.submul(a.at(i, j), f, a.at(c, j));
        }
    }
    if (negate) L.neg(acc, acc);
    std::copy(acc, acc + L.r, out);
}

}  // namespace detail

// ---------------------------------------------------------------------------

Matrix::Matrix(Ring ring, std::size_t rows, std::size_t cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols), w_(ring_->width()), data_(rows * cols * w_, 0) {}

Matrix Matrix::identity(const Ring& ring, std::size_t n) {
    Matrix m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i) ring->set_one(m.at(i, i));
    return m;
}

Matrix Matrix::from_ints(const Ring& ring, const std::vector<std::vector<std::int64_t>>& rows) {
    if (rows.empty()) fail(Errc::ShapeMismatch, "matrix needs at least one row");
    Matrix m(ring, rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) fail(Errc::ShapeMismatch, "ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m.set_int(i, j, rows[i][j]);
    }
    return m;
}

Matrix Matrix::row_vector(const Ring& ring, const std::vector<std::int64_t>& entries) {
    return from_ints(ring, {entries});
}

Matrix Matrix::from_entries(const Ring& ring, std::size_t rows, std::size_t cols,
                            const std::vector<RingElement>& entries) {
    if (entries.size() != rows * cols) fail(Errc::ShapeMismatch, "entry count");
    Matrix m(ring, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m.set(i, j, entries[i * cols + j]);
    return m;
}

RingElement Matrix::get(std::size_t i, std::size_t j) const {
    return RingElement(ring_, Coeffs(at(i, j), at(i, j) + w_));
}

void Matrix::set(std::size_t i, std::size_t j, const RingElement& x) {
    require_same_ring(ring_, x.ring(), "Matrix::set");
    std::copy(x.coeffs().begin(), x.coeffs().end(), at(i, j));
}

Matrix Matrix::row(std::size_t i) const {
    Matrix out(ring_, 1, cols_);
    std::copy(at(i, 0), at(i, 0) + cols_ * w_, out.at(0, 0));
    return out;
}

bool Matrix::is_identity() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            if (i == j ? !ring_->is_one(at(i, j)) : !ring_->is_zero(at(i, j))) return false;
        }
    return true;
}

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](u64 x) { return x == 0; });
}

bool Matrix::operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && same_ring(ring_, o.ring_) && data_ == o.data_;
}

std::string Matrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << get(i, j).to_string();
        os << "]";
    }
    os << "]";
    return os.str();
}

std::size_t Matrix::hash() const {
    std::size_t h = 1469598103934665603ULL ^ rows_;
    for (u64 x : data_) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    require_same_ring(a.ring(), b.ring(), "mat_mul");
    if (a.cols() != b.rows()) fail(Errc::ShapeMismatch, "mat_mul: inner dimensions differ");
    const auto& R = *a.ring();
    Matrix out(a.ring(), a.rows(), b.cols());
    std::vector<u64> t(R.width());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const u64* x = a.at(i, k);
            if (R.is_zero(x)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                R.mul(x, b.at(k, j), t.data());
                R.add(out.at(i, j), t.data(), out.at(i, j));
            }
        }
    return out;
}

Matrix mat_add(const Matrix& a, const Matrix& b) {
    require_same_ring(a.ring(), b.ring(), "mat_add");
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::ShapeMismatch, "mat_add");
    Matrix out(a.ring(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a.ring()->add(a.at(i, j), b.at(i, j), out.at(i, j));
    return out;
}

Matrix mat_sub(const Matrix& a, const Matrix& b) {
    require_same_ring(a.ring(), b.ring(), "mat_sub");
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::ShapeMismatch, "mat_sub");
    Matrix out(a.ring(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a.ring()->sub(a.at(i, j), b.at(i, j), out.at(i, j));
    return out;
}

Matrix mat_scale(const Matrix& a, const RingElement& c) {
    require_same_ring(a.ring(), c.ring(), "mat_scale");
    Matrix out(a.ring(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a.ring()->mul(a.at(i, j), c.data(), out.at(i, j));
    return out;
}

Matrix mat_transpose(const Matrix& a) {
    Matrix out(a.ring(), a.cols(), a.rows());
    const std::size_t w = a.ring()->width();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) std::copy(a.at(i, j), a.at(i, j) + w, out.at(j, i));
    return out;
}

std::optional<Matrix> try_inv(const Matrix& a) {
    if (!a.square()) fail(Errc::ShapeMismatch, "inverse of a non-square matrix");
    const auto& R = *a.ring();
    Matrix out(a.ring(), a.rows(), a.cols());
    for (std::size_t s = 0; s < R.num_summands(); ++s) {
        Local L(R, s);
        LocalMat inv;
        if (!detail::local_inverse(L, detail::extract(a, s), inv)) return std::nullopt;
        detail::insert(out, s, inv);
    }
    return out;
}

Matrix mat_inv(const Matrix& a) {
    auto inv = try_inv(a);
    if (!inv) fail(Errc::NonInvertible, "determinant is not a unit");
    return *inv;
}

bool is_invertible(const Matrix& a) { return a.square() && mat_det(a).is_unit(); }

RingElement mat_det(const Matrix& a) {
    if (!a.square()) fail(Errc::ShapeMismatch, "determinant of a non-square matrix");
    const auto& R = *a.ring();
    RingElement out(a.ring());
    for (std::size_t s = 0; s < R.num_summands(); ++s) {
        Local L(R, s);
        detail::local_det(L, detail::extract(a, s), out.data() + L.o);
    }
    return out;
}

Matrix mat_pow(const Matrix& a, std::int64_t e) {
    Matrix base = e < 0 ? mat_inv(a) : a;
    u64 k = e < 0 ? static_cast<u64>(-(e + 1)) + 1 : static_cast<u64>(e);
    Matrix acc = Matrix::identity(a.ring(), a.rows());
    while (k) {
        if (k & 1) acc = mat_mul(acc, base);
        k >>= 1;
        if (k) base = mat_mul(base, base);
    }
    return acc;
}

Matrix mat_kron(const Matrix& a, const Matrix& b) {
    require_same_ring(a.ring(), b.ring(), "mat_kron");
    const auto& R = *a.ring();
    Matrix out(a.ring(), a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const u64* x = a.at(i, j);
            if (R.is_zero(x)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    R.mul(x, b.at(k, l), out.at(i * b.rows() + k, j * b.cols() + l));
        }
    return out;
}

Matrix mat_kron_all(const std::vector<Matrix>& factors) {
    if (factors.empty()) fail(Errc::ArityMismatch, "empty Kronecker product");
    Matrix acc = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) acc = mat_kron(acc, factors[i]);
    return acc;
}

Matrix mat_commutator(const Matrix& a, const Matrix& b) {
    return mat_mul(mat_mul(mat_inv(a), mat_inv(b)), mat_mul(a, b));
}

Matrix mat_vstack(const std::vector<Matrix>& parts) {
    if (parts.empty()) fail(Errc::ShapeMismatch, "empty stack");
    std::size_t rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != parts[0].cols()) fail(Errc::ShapeMismatch, "stack column counts differ");
        require_same_ring(p.ring(), parts[0].ring(), "mat_vstack");
        rows += p.rows();
    }
    Matrix out(parts[0].ring(), rows, parts[0].cols());
    std::size_t r0 = 0;
    for (const auto& p : parts) {
        mat_put_block(out, r0, 0, p);
        r0 += p.rows();
    }
    return out;
}

Matrix mat_block(const Matrix& a, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
    if (r0 + rows > a.rows() || c0 + cols > a.cols()) fail(Errc::ShapeMismatch, "block out of range");
    Matrix out(a.ring(), rows, cols);
    const std::size_t w = a.ring()->width();
    for (std::size_t i = 0; i < rows; ++i)
        std::copy(a.at(r0 + i, c0), a.at(r0 + i, c0) + cols * w, out.at(i, 0));
    return out;
}

void mat_put_block(Matrix& dst, std::size_t r0, std::size_t c0, const Matrix& src) {
    if (r0 + src.rows() > dst.rows() || c0 + src.cols() > dst.cols()) fail(Errc::ShapeMismatch, "block out of range");
    const std::size_t w = dst.ring()->width();
    for (std::size_t i = 0; i < src.rows(); ++i)
        std::copy(src.at(i, 0), src.at(i, 0) + src.cols() * w, dst.at(r0 + i, c0));
}

Matrix entrywise_frobenius(const Matrix& a, const RingAutomorphism& aut) {
    require_same_ring(a.ring(), aut.ring, "entrywise_frobenius");
    Matrix out(a.ring(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a.ring()->frobenius(aut.exponents.data(), a.at(i, j), out.at(i, j));
    return out;
}

Matrix vector_act(const Matrix& v, const Matrix& g) {
    if (v.cols() != g.rows() || !g.square()) fail(Errc::ShapeMismatch, "vector length differs from degree");
    return mat_mul(v, g);
}

Matrix word_eval(const std::vector<Matrix>& gens, const GroupWord& w) {
    if (gens.empty()) {
        if (!w.empty()) fail(Errc::IndexOutOfRange, "word over an empty generator list");
        fail(Errc::ShapeMismatch, "cannot evaluate without generators");
    }
    std::vector<std::optional<Matrix>> invs(gens.size());
    Matrix acc = Matrix::identity(gens[0].ring(), gens[0].rows());
    for (int letter : w) {
        const std::size_t idx = static_cast<std::size_t>(letter < 0 ? -letter : letter);
        if (letter == 0 || idx > gens.size()) fail(Errc::IndexOutOfRange, "letter " + std::to_string(letter));
        if (letter > 0) {
            acc = mat_mul(acc, gens[idx - 1]);
        } else {
            if (!invs[idx - 1]) invs[idx - 1] = mat_inv(gens[idx - 1]);
            acc = mat_mul(acc, *invs[idx - 1]);
        }
    }
    return acc;
}

// --- wreath products ---------------------------------------------------------

Perm perm_identity(std::size_t m) {
    Perm k(m);
    for (std::size_t i = 0; i < m; ++i) k[i] = i;
    return k;
}

Perm perm_compose(const Perm& first, const Perm& second) {
    Perm out(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) out[i] = second[first[i]];
    return out;
}

Perm perm_inverse(const Perm& k) {
    Perm out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[k[i]] = i;
    return out;
}

bool perm_valid(const Perm& k) {
    std::vector<bool> seen(k.size(), false);
    for (std::size_t x : k) {
        if (x >= k.size() || seen[x]) return false;
        seen[x] = true;
    }
    return true;
}

namespace {

void check_wreath_args(const std::vector<Matrix>& hs, const Perm& k) {
    if (hs.empty()) fail(Errc::ArityMismatch, "wreath product needs m >= 1 components");
    if (k.size() != hs.size()) fail(Errc::ArityMismatch, "permutation degree differs from component count");
    if (!perm_valid(k)) fail(Errc::ArityMismatch, "not a permutation");
    for (const auto& h : hs) {
        if (!h.square() || h.rows() != hs[0].rows()) fail(Errc::DegreeMismatch, "components have different degrees");
        if (!same_ring(h.ring(), hs[0].ring())) fail(Errc::DegreeMismatch, "components over different rings");
    }
}

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

Matrix wreath_rep(const std::vector<Matrix>& hs, const Perm& k, WreathMode mode) {
    check_wreath_args(hs, k);
    const std::size_t m = hs.size(), n = hs[0].rows();
    const Ring& ring = hs[0].ring();
    if (mode == WreathMode::Imprimitive) {
        Matrix out(ring, n * m, n * m);
        for (std::size_t i = 0; i < m; ++i) mat_put_block(out, i * n, k[i] * n, hs[i]);
        return out;
    }
    const std::size_t N = ipow(n, m);
    if (N > 4096) fail(Errc::DegreeMismatch, "product action degree too large");
    const Perm kinv = perm_inverse(k);
    const auto& R = *ring;
    Matrix out(ring, N, N);
    std::vector<std::size_t> a(m), b(m);
    std::vector<u64> acc(R.width());
    auto digits = [&](std::size_t idx, std::vector<std::size_t>& d) {
        for (std::size_t j = m; j-- > 0;) {
            d[j] = idx % n;
            idx /= n;
        }
    };
    for (std::size_t row = 0; row < N; ++row) {
        digits(row, a);
        for (std::size_t col = 0; col < N; ++col) {
            digits(col, b);
            R.set_one(acc.data());
            for (std::size_t j = 0; j < m && !R.is_zero(acc.data()); ++j) {
                const std::size_t ij = kinv[j];
                R.mul(acc.data(), hs[ij].at(a[ij], b[j]), acc.data());
            }
            std::copy(acc.begin(), acc.end(), out.at(row, col));
        }
    }
    return out;
}

Matrix wreath_perm(const Ring& ring, std::size_t n, const Perm& k, WreathMode mode) {
    std::vector<Matrix> hs(k.size(), Matrix::identity(ring, n));
    return wreath_rep(hs, k, mode);
}

// --- ring change ---------------------------------------------------------------

namespace {

// Inverts an r x r matrix over Z_q (q = p^m) in place; false if singular mod p.
bool invert_mod_q(std::vector<u64>& a, std::size_t r, u64 q, u64 p) {
    std::vector<u64> inv(r * r, 0);
    for (std::size_t i = 0; i < r; ++i) inv[i * r + i] = 1 % q;
    for (std::size_t c = 0; c < r; ++c) {
        std::size_t piv = r;
        for (std::size_t i = c; i < r; ++i)
            if (a[i * r + c] % p) {
                piv = i;
                break;
            }
        if (piv == r) return false;
        for (std::size_t j = 0; j < r; ++j) {
            std::swap(a[piv * r + j], a[c * r + j]);
            std::swap(inv[piv * r + j], inv[c * r + j]);
        }
        const u64 s = invmod(a[c * r + c], q);
        for (std::size_t j = 0; j < r; ++j) {
            a[c * r + j] = mulmod(a[c * r + j], s, q);
            inv[c * r + j] = mulmod(inv[c * r + j], s, q);
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (i == c) continue;
            const u64 f = a[i * r + c];
            if (!f) continue;
            for (std::size_t j = 0; j < r; ++j) {
                a[i * r + j] = submod(a[i * r + j], mulmod(f, a[c * r + j], q), q);
                inv[i * r + j] = submod(inv[i * r + j], mulmod(f, inv[c * r + j], q), q);
            }
        }
    }
    a = std::move(inv);
    return true;
}

// Evaluates the source modulus f at y inside target summand t.
void eval_poly(const RingSpec& T, std::size_t t, const Coeffs& f, const u64* y, u64* out) {
    const unsigned r = T.rank(t);
    const u64 q = T.characteristic(t);
    u64 acc[kMaxRank] = {};
    for (std::size_t i = f.size(); i-- > 0;) {
        T.mul_in(t, acc, y, acc);
        acc[0] = addmod(acc[0], f[i] % q, q);
    }
    std::copy(acc, acc + r, out);
}

Coeffs find_root(const RingSpec& T, std::size_t t, const Coeffs& f) {
    const auto& g = T.summands()[t];
    const unsigned r = g.r;
    const u64 q = T.characteristic(t);
    const u64 field_size = saturating_pow(g.p, r);
    if (field_size > (1ULL << 24)) fail(Errc::NoSuchEmbedding, "residue field too large for root search");
    Coeffs df(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) df[i - 1] = mulmod(f[i] % q, i % q, q);
    Coeffs y(r, 0), v(r), d(r), dinv(r);
    for (u64 n = 0; n < field_size; ++n) {
        u64 x = n;
        for (unsigned i = 0; i < r; ++i) {
            y[i] = x % g.p;
            x /= g.p;
        }
        eval_poly(T, t, f, y.data(), v.data());
        if (T.valuation_in(t, v.data()) == 0) continue;
        // Hensel/Newton lift; f is separable mod p so f'(y) is a unit.
        for (int it = 0; it < 80; ++it) {
            eval_poly(T, t, f, y.data(), v.data());
            if (std::all_of(v.begin(), v.end(), [](u64 c) { return c == 0; })) return y;
            eval_poly(T, t, df, y.data(), d.data());
            if (!T.inv_in(t, d.data(), dinv.data())) break;
            T.mul_in(t, v.data(), dinv.data(), v.data());
            for (unsigned i = 0; i < r; ++i) y[i] = submod(y[i], v[i], q);
        }
    }
    fail(Errc::NoSuchEmbedding, "modulus has no root in the target ring");
}

}  // namespace

void RingEmbedding::apply(const u64* a, u64* out) const {
    const auto& S = *source;
    const auto& T = *target;
    for (std::size_t t = 0; t < T.num_summands(); ++t) {
        const std::size_t s = source_of[t];
        const u64* x = a + S.offset(s);
        const unsigned rs = S.rank(s), rt = T.rank(t);
        const u64 q = T.characteristic(t);
        u64 acc[kMaxRank] = {}, pw[kMaxRank] = {}, tmp[kMaxRank];
        pw[0] = 1 % q;
        for (unsigned k = 0; k < rs; ++k) {
            for (unsigned i = 0; i < rt; ++i) acc[i] = addmod(acc[i], mulmod(x[k], pw[i], q), q);
            T.mul_in(t, pw, root_image[t].data(), tmp);
            std::copy(tmp, tmp + rt, pw);
        }
        std::copy(acc, acc + rt, out + T.offset(t));
    }
}

bool RingEmbedding::preimage(const u64* b, u64* out) const {
    const auto& S = *source;
    const auto& T = *target;
    for (std::size_t s = 0; s < S.num_summands(); ++s) {
        const std::size_t t = decode_from[s];
        const unsigned r = S.rank(s);
        const u64 q = S.characteristic(s);
        const u64* y = b + T.offset(t);
        for (unsigned j = 0; j < r; ++j) {
            u64 acc = 0;
            for (unsigned i = 0; i < r; ++i)
                acc = addmod(acc, mulmod(y[decode_cols[s][i]], decode_inv[s][i * r + j], q), q);
            out[S.offset(s) + j] = acc;
        }
    }
    std::vector<u64> check(T.width());
    apply(out, check.data());
    return std::equal(check.begin(), check.end(), b);
}

RingEmbedding ring_extension(const Ring& source, const Ring& target) {
    RingEmbedding e;
    e.source = source;
    e.target = target;
    const auto& S = *source;
    const auto& T = *target;
    std::vector<bool> used(S.num_summands(), false);
    for (std::size_t t = 0; t < T.num_summands(); ++t) {
        const auto& gt = T.summands()[t];
        std::size_t found = S.num_summands();
        for (std::size_t s = 0; s < S.num_summands(); ++s) {
            const auto& gs = S.summands()[s];
            if (gs.p == gt.p && gs.m == gt.m && gt.r % gs.r == 0) {
                found = s;
                break;
            }
        }
        if (found == S.num_summands())
            fail(Errc::NoSuchEmbedding, "no source summand maps into GR(" + std::to_string(gt.p) + "," +
                                            std::to_string(gt.m) + "," + std::to_string(gt.r) + ")");
        used[found] = true;
        e.source_of.push_back(found);
        e.root_image.push_back(find_root(T, t, S.summands()[found].modulus));
    }
    for (std::size_t s = 0; s < S.num_summands(); ++s)
        if (!used[s]) fail(Errc::NoSuchEmbedding, "a source summand would be lost");

    // Decoding: coordinates of 1, y, ..., y^{r-1} in the first target summand
    // fed by s; their residues are independent, so some r x r minor is a unit.
    e.decode_from.resize(S.num_summands());
    e.decode_cols.resize(S.num_summands());
    e.decode_inv.resize(S.num_summands());
    for (std::size_t s = 0; s < S.num_summands(); ++s) {
        std::size_t t = 0;
        while (e.source_of[t] != s) ++t;
        e.decode_from[s] = t;
        const unsigned rs = S.rank(s), rt = T.rank(t);
        const u64 q = T.characteristic(t), p = T.prime(t);
        std::vector<u64> rows(rs * rt);
        u64 pw[kMaxRank] = {}, tmp[kMaxRank];
        pw[0] = 1 % q;
        for (unsigned k = 0; k < rs; ++k) {
            std::copy(pw, pw + rt, rows.begin() + k * rt);
            T.mul_in(t, pw, e.root_image[t].data(), tmp);
            std::copy(tmp, tmp + rt, pw);
        }
        // Greedy column choice by elimination mod p.
        std::vector<u64> work = rows;
        std::vector<std::size_t> cols;
        std::vector<bool> row_done(rs, false);
        for (unsigned c = 0; c < rt && cols.size() < rs; ++c) {
            unsigned piv = rs;
            for (unsigned i = 0; i < rs; ++i)
                if (!row_done[i] && work[i * rt + c] % p) {
                    piv = i;
                    break;
                }
            if (piv == rs) continue;
            row_done[piv] = true;
            cols.push_back(c);
            const u64 pinv = invmod(work[piv * rt + c] % p, p);
            for (unsigned i = 0; i < rs; ++i) {
                if (i == piv) continue;
                const u64 f = mulmod(work[i * rt + c] % p, pinv, p);
                for (unsigned j = 0; j < rt; ++j)
                    work[i * rt + j] = submod(work[i * rt + j] % p, mulmod(f, work[piv * rt + j] % p, p), p);
            }
        }
        if (cols.size() != rs) fail(Errc::NoSuchEmbedding, "embedding is not injective");
        std::vector<u64> minor(rs * rs);
        for (unsigned i = 0; i < rs; ++i)
            for (unsigned j = 0; j < rs; ++j) minor[i * rs + j] = rows[i * rt + cols[j]];
        // a * minor = y_cols  =>  a = y_cols * minor^{-1}
        if (!invert_mod_q(minor, rs, q, p)) fail(Errc::NoSuchEmbedding, "singular decoding minor");
        // decode_inv is indexed [col i][coefficient j]
        e.decode_cols[s] = cols;
        e.decode_inv[s] = minor;
    }
    return e;
}

Matrix extend_to(const Matrix& a, const RingEmbedding& emb) {
    require_same_ring(a.ring(), emb.source, "extend_to");
    Matrix out(emb.target, a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) emb.apply(a.at(i, j), out.at(i, j));
    return out;
}

std::optional<Matrix> extend_preimage(const Matrix& a, const RingEmbedding& emb) {
    require_same_ring(a.ring(), emb.target, "extend_preimage");
    Matrix out(emb.source, a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!emb.preimage(a.at(i, j), out.at(i, j))) return std::nullopt;
    return out;
}

Ring rep_base_ring(const Ring& source, unsigned d) {
    std::vector<GaloisRingSpec> parts;
    for (const auto& g : source->summands()) {
        if (g.r != d) fail(Errc::IncompatibleDegrees, "regular representation needs every summand of rank d");
        parts.push_back({g.p, g.m, 1, {0, 1}});
    }
    return RingSpec::make(std::move(parts));
}

Matrix rep_to(const Matrix& a, unsigned d) {
    Ring base = rep_base_ring(a.ring(), d);
    const auto& S = *a.ring();
    Matrix out(base, a.rows() * d, a.cols() * d);
    u64 pw[kMaxRank], x[kMaxRank] = {}, tmp[kMaxRank];
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t s = 0; s < S.num_summands(); ++s) {
                const u64* e = a.at(i, j) + S.offset(s);
                std::fill(x, x + d, 0);
                if (d > 1) x[1] = 1;
                std::copy(e, e + d, pw);
                // row t holds x^t * e
                for (unsigned t = 0; t < d; ++t) {
                    for (unsigned c = 0; c < d; ++c) out.at(i * d + t, j * d + c)[s] = pw[c];
                    if (d > 1) {
                        S.mul_in(s, pw, x, tmp);
                        std::copy(tmp, tmp + d, pw);
                    }
                }
            }
    return out;
}

std::optional<Matrix> rep_preimage(const Matrix& big, const Ring& source, unsigned d) {
    Ring base = rep_base_ring(source, d);
    require_same_ring(big.ring(), base, "rep_preimage");
    if (big.rows() % d || big.cols() % d) return std::nullopt;
    const auto& S = *source;
    Matrix out(source, big.rows() / d, big.cols() / d);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            for (std::size_t s = 0; s < S.num_summands(); ++s)
                for (unsigned c = 0; c < d; ++c) out.at(i, j)[S.offset(s) + c] = big.at(i * d, j * d + c)[s];
    if (!(rep_to(out, d) == big)) return std::nullopt;
    return out;
}

Ring sub_ring(const Ring& ring, const std::vector<std::size_t>& indices) {
    std::vector<GaloisRingSpec> parts;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= ring->num_summands() || (k && indices[k] <= indices[k - 1]))
            fail(Errc::IndexOutOfRange, "summand indices must be increasing and in range");
        parts.push_back(ring->summands()[indices[k]]);
    }
    if (parts.size() == ring->num_summands()) return ring;
    if (parts.size() == 1) return ring->summand_ring(indices[0]);
    return RingSpec::make(std::move(parts));
}

Matrix project_summands(const Matrix& a, const std::vector<std::size_t>& indices) {
    Ring sub = sub_ring(a.ring(), indices);
    const auto& R = *a.ring();
    Matrix out(sub, a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < indices.size(); ++k) {
                const std::size_t s = indices[k];
                std::copy(a.at(i, j) + R.offset(s), a.at(i, j) + R.offset(s) + R.rank(s), out.at(i, j) + sub->offset(k));
            }
    return out;
}

Matrix crt_embed(const Matrix& a, const Ring& big, const std::vector<std::size_t>& placement) {
    const auto& S = *a.ring();
    const auto& B = *big;
    if (placement.size() != S.num_summands()) fail(Errc::NoSuchEmbedding, "placement size");
    if (!a.square()) fail(Errc::ShapeMismatch, "crt_embed expects a square matrix");
    Matrix out = Matrix::identity(big, a.rows());
    for (std::size_t s = 0; s < S.num_summands(); ++s) {
        const std::size_t t = placement[s];
        if (t >= B.num_summands() || !(B.summands()[t] == S.summands()[s]))
            fail(Errc::NoSuchEmbedding, "summand does not occur at the given position");
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                std::copy(a.at(i, j) + S.offset(s), a.at(i, j) + S.offset(s) + S.rank(s), out.at(i, j) + B.offset(t));
    }
    return out;
}

std::optional<std::vector<std::size_t>> find_placement(const Ring& part, const Ring& big, const std::vector<bool>& taken) {
    std::vector<bool> used = taken;
    used.resize(big->num_summands(), false);
    std::vector<std::size_t> out;
    for (const auto& g : part->summands()) {
        std::size_t found = big->num_summands();
        for (std::size_t t = 0; t < big->num_summands(); ++t)
            if (!used[t] && big->summands()[t] == g) {
                found = t;
                break;
            }
        if (found == big->num_summands()) return std::nullopt;
        used[found] = true;
        out.push_back(found);
    }
    return out;
}

Matrix random_matrix(const Ring& ring, std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix out(ring, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            auto e = random_element(ring, rng);
            std::copy(e.coeffs().begin(), e.coeffs().end(), out.at(i, j));
        }
    return out;
}

Matrix random_invertible(const Ring& ring, std::size_t n, Rng& rng) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Matrix m = random_matrix(ring, n, n, rng);
        if (is_invertible(m)) return m;
    }
    fail(Errc::Failure, "could not sample an invertible matrix");
}

}  // namespace mgc
