#include "mgc/trapdoor.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "mgc/error.hpp"
#include "mgc/linalg.hpp"
#include "mgc/numtheory.hpp"

namespace mgc {

thread_local std::size_t Trapdoor::enum_work_ = 0;

namespace {

// --- per-summand helpers -------------------------------------------------------------

bool zero_in(const Ring& R, std::size_t s, const u64* a) {
    const u64* p = a + R->offset(s);
    for (unsigned i = 0; i < R->rank(s); ++i)
        if (p[i]) return false;
    return true;
}

bool unit_in(const Ring& R, std::size_t s, const u64* a) { return R->is_unit_in(s, a + R->offset(s)); }

bool equal_in(const Ring& R, std::size_t s, const u64* a, const u64* b) {
    return std::equal(a + R->offset(s), a + R->offset(s) + R->rank(s), b + R->offset(s));
}

void copy_in(const Ring& R, std::size_t s, const u64* from, u64* to) {
    std::copy(from + R->offset(s), from + R->offset(s) + R->rank(s), to + R->offset(s));
}

// Entries from a on summands with mask set, from b elsewhere.
Matrix mix(const Matrix& a, const Matrix& b, const std::vector<bool>& mask) {
    Matrix out = b;
    const Ring& R = a.ring();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t s = 0; s < mask.size(); ++s)
                if (mask[s]) copy_in(R, s, a.at(i, j), out.at(i, j));
    return out;
}

bool equal_on(const Matrix& a, const Matrix& b, const std::vector<bool>& mask) {
    const Ring& R = a.ring();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t s = 0; s < mask.size(); ++s)
                if (mask[s] && !equal_in(R, s, a.at(i, j), b.at(i, j))) return false;
    return true;
}

std::vector<bool> complement(std::vector<bool> v) {
    v.flip();
    return v;
}

std::vector<std::size_t> indices_of(const std::vector<bool>& mask) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < mask.size(); ++s)
        if (mask[s]) out.push_back(s);
    return out;
}

// Multiplies summand s of every entry by the summand-s part of c.
void scale_in(Matrix& m, std::size_t s, const u64* c) {
    const Ring& R = m.ring();
    const std::size_t off = R->offset(s);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) R->mul_in(s, m.at(i, j) + off, c + off, m.at(i, j) + off);
}

Matrix column_block(const Matrix& X, std::size_t c0, std::size_t w) { return mat_block(X, 0, c0, X.rows(), w); }

// --- rank-one splitting ------------------------------------------------------------------

enum class SplitStatus { Ok, NoPivot, Mismatch };

struct Shape {
    std::size_t r, c;
};

// T = kron(F_0, ..., F_{s-1}) with F_i of the given shapes. Per summand the
// pivot is the first unit entry; summands where T vanishes give zero factors
// when zero_ok.
SplitStatus kron_split(const Matrix& T, const std::vector<Shape>& shapes, bool zero_ok, std::vector<Matrix>& out) {
    const Ring& R = T.ring();
    const std::size_t k = shapes.size();
    std::vector<std::size_t> rs(k), cs(k);
    std::size_t rows = 1, cols = 1;
    for (std::size_t i = k; i-- > 0;) {
        rs[i] = rows;
        cs[i] = cols;
        rows *= shapes[i].r;
        cols *= shapes[i].c;
    }
    if (rows != T.rows() || cols != T.cols()) fail(Errc::ShapeMismatch, "degrees do not multiply to the matrix shape");
    out.clear();
    for (const auto& sh : shapes) out.emplace_back(R, sh.r, sh.c);
    const std::size_t w = R->width();
    std::vector<u64> inv(w, 0), tmp(w, 0);
    for (std::size_t s = 0; s < R->num_summands(); ++s) {
        const std::size_t off = R->offset(s);
        std::size_t R0 = rows, C0 = cols;
        bool any_nonzero = false;
        for (std::size_t i = 0; i < rows && R0 == rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                if (!zero_in(R, s, T.at(i, j))) any_nonzero = true;
                if (unit_in(R, s, T.at(i, j))) {
                    R0 = i;
                    C0 = j;
                    break;
                }
            }
        if (R0 == rows) {
            if (any_nonzero || !zero_ok) return SplitStatus::NoPivot;
            continue;
        }
        R->inv_in(s, T.at(R0, C0) + off, inv.data() + off);
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t a0 = (R0 / rs[f]) % shapes[f].r, b0 = (C0 / cs[f]) % shapes[f].c;
            for (std::size_t a = 0; a < shapes[f].r; ++a)
                for (std::size_t b = 0; b < shapes[f].c; ++b) {
                    const std::size_t row = R0 - a0 * rs[f] + a * rs[f];
                    const std::size_t col = C0 - b0 * cs[f] + b * cs[f];
                    u64* dst = out[f].at(a, b) + off;
                    const u64* src = T.at(row, col) + off;
                    if (f == 0) {
                        std::copy(src, src + R->rank(s), dst);
                    } else {
                        R->mul_in(s, src, inv.data() + off, dst);
                    }
                }
        }
        // Move each later factor's leading unit into the first factor.
        for (std::size_t f = 1; f < k; ++f) {
            const u64* lead = nullptr;
            for (std::size_t a = 0; a < shapes[f].r && !lead; ++a)
                for (std::size_t b = 0; b < shapes[f].c; ++b)
                    if (unit_in(R, s, out[f].at(a, b))) {
                        lead = out[f].at(a, b);
                        break;
                    }
            if (!lead) return SplitStatus::NoPivot;
            std::copy(lead + off, lead + off + R->rank(s), tmp.begin() + static_cast<long>(off));
            R->inv_in(s, tmp.data() + off, inv.data() + off);
            scale_in(out[f], s, inv.data());
            scale_in(out[0], s, tmp.data());
        }
    }
    return mat_kron_all(out) == T ? SplitStatus::Ok : SplitStatus::Mismatch;
}

std::vector<Shape> square_shapes(const std::vector<std::size_t>& degrees) {
    std::vector<Shape> out;
    for (auto d : degrees) out.push_back({d, d});
    return out;
}

std::vector<Shape> row_shapes(const std::vector<std::size_t>& degrees) {
    std::vector<Shape> out;
    for (auto d : degrees) out.push_back({1, d});
    return out;
}

WreathMode mode_of(OpKind k) { return k == OpKind::WreathImprimitive ? WreathMode::Imprimitive : WreathMode::Product; }

std::vector<Perm> all_perms(std::size_t m) {
    if (m > 6) fail(Errc::UnsupportedDecomposition, "product action with more than 6 coordinates");
    std::vector<Perm> out;
    Perm k = perm_identity(m);
    do out.push_back(k);
    while (std::next_permutation(k.begin(), k.end()));
    return out;
}

// Units equal to `base` outside `active` and ranging over all units on `active`.
std::vector<RingElement> scalar_candidates(const Ring& R, const std::vector<bool>& active, const RingElement& base,
                                           u64 cap) {
    const auto idx = indices_of(active);
    if (idx.empty()) return {base};
    const Ring sub = sub_ring(R, idx);
    if (sub->unit_count() > cap)
        fail(Errc::UnsupportedDecomposition, "scalar ambiguity over " + std::to_string(sub->unit_count()) + " units");
    std::vector<RingElement> out;
    for (const auto& u : ring_units(sub, cap)) {
        RingElement x = base;
        for (std::size_t j = 0; j < idx.size(); ++j)
            std::copy(u.data() + sub->offset(j), u.data() + sub->offset(j) + sub->rank(j), x.data() + R->offset(idx[j]));
        out.push_back(std::move(x));
    }
    return out;
}

// Search for one scalar per factor with product one. test(i, lambda) runs the
// factor check; the last factor's scalar is determined by the others.
template <class Result, class Test>
std::optional<std::vector<Result>> scalar_search(const Ring& R, const std::vector<std::vector<RingElement>>& cands,
                                                 Test&& test) {
    const std::size_t s = cands.size();
    using State = std::pair<RingElement, std::vector<Result>>;
    std::map<Coeffs, State> states;
    states.emplace(RingElement::one(R).coeffs(), State{RingElement::one(R), {}});
    for (std::size_t i = 0; i + 1 < s; ++i) {
        std::vector<std::pair<RingElement, Result>> ok;
        for (const auto& l : cands[i])
            if (auto r = test(i, l)) ok.emplace_back(l, std::move(*r));
        if (ok.empty()) return std::nullopt;
        std::map<Coeffs, State> next;
        for (const auto& [key, st] : states)
            for (const auto& [l, r] : ok) {
                RingElement prod = st.first * l;
                if (next.count(prod.coeffs())) continue;
                if (next.size() >= (1u << 16)) fail(Errc::UnsupportedDecomposition, "too many scalar products");
                auto parts = st.second;
                parts.push_back(r);
                Coeffs k = prod.coeffs();
                next.emplace(std::move(k), State{std::move(prod), std::move(parts)});
            }
        states = std::move(next);
    }
    for (auto& [key, st] : states) {
        const RingElement last = ring_inv(st.first);
        if (auto r = test(s - 1, last)) {
            st.second.push_back(std::move(*r));
            return st.second;
        }
    }
    return std::nullopt;
}

// Scalar of a summand-s block that must be c*I, or false.
bool scalar_part(const Matrix& A, std::size_t s, u64* c) {
    const Ring& R = A.ring();
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) {
            if (i == j ? !equal_in(R, s, A.at(i, j), A.at(0, 0)) : !zero_in(R, s, A.at(i, j))) return false;
        }
    copy_in(R, s, A.at(0, 0), c);
    return unit_in(R, s, c);
}

// --- ring extension coordinates -----------------------------------------------------

struct ExtendCoords {
    struct Part {
        std::size_t t, s, d, rs, rt;
        u64 mod;
        std::vector<std::vector<u64>> inv;  // rt x rt over Z_{p^m}
    };
    std::vector<Part> parts;
    std::size_t rows_per_row = 0;
};

ExtendCoords extend_coords(const RingEmbedding& emb) {
    const Ring& S = emb.source;
    const Ring& T = emb.target;
    ExtendCoords out;
    for (std::size_t t = 0; t < T->num_summands(); ++t) {
        ExtendCoords::Part p;
        p.t = t;
        p.s = emb.source_of[t];
        p.rs = S->rank(p.s);
        p.rt = T->rank(t);
        p.d = p.rt / p.rs;
        p.mod = T->characteristic(t);
        const Ring zq = ring_integer_residue(p.mod);
        Matrix M(zq, p.rt, p.rt);
        const std::size_t toff = T->offset(t);
        std::vector<u64> src(S->width(), 0), img(T->width(), 0), ypow(T->width(), 0), prod(T->width(), 0),
            x(T->width(), 0);
        if (p.rt > 1) x[toff + 1] = 1;
        for (std::size_t i = 0; i < p.rs; ++i) {
            std::fill(src.begin(), src.end(), 0);
            src[S->offset(p.s) + i] = 1;
            emb.apply(src.data(), img.data());
            std::fill(ypow.begin(), ypow.end(), 0);
            ypow[toff] = 1;
            for (std::size_t j = 0; j < p.d; ++j) {
                T->mul_in(t, img.data() + toff, ypow.data() + toff, prod.data() + toff);
                for (std::size_t l = 0; l < p.rt; ++l)
                    M.set_int(j * p.rs + i, l, static_cast<std::int64_t>(prod[toff + l]));
                T->mul_in(t, ypow.data() + toff, x.data() + toff, ypow.data() + toff);
            }
        }
        const auto Minv = try_inv(M);
        if (!Minv) fail(Errc::UnsupportedDecomposition, "power basis is not a basis over the subring");
        p.inv.assign(p.rt, std::vector<u64>(p.rt, 0));
        for (std::size_t a = 0; a < p.rt; ++a)
            for (std::size_t b = 0; b < p.rt; ++b) p.inv[a][b] = Minv->at(a, b)[0];
        out.rows_per_row += p.d;
        out.parts.push_back(std::move(p));
    }
    return out;
}

// One source-ring row per (row of X, target summand, power of x).
Matrix to_coordinates(const Matrix& X, const ExtendCoords& ec, const Ring& S) {
    const Ring& T = X.ring();
    Matrix out(S, X.rows() * ec.rows_per_row, X.cols());
    std::size_t row = 0;
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (const auto& p : ec.parts)
            for (std::size_t j = 0; j < p.d; ++j, ++row)
                for (std::size_t c = 0; c < X.cols(); ++c) {
                    const u64* a = X.at(r, c) + T->offset(p.t);
                    u64* dst = out.at(row, c) + S->offset(p.s);
                    for (std::size_t i = 0; i < p.rs; ++i) {
                        u64 acc = 0;
                        for (std::size_t l = 0; l < p.rt; ++l) acc = addmod(acc, mulmod(a[l], p.inv[l][j * p.rs + i], p.mod), p.mod);
                        dst[i] = acc;
                    }
                }
    return out;
}

// Regular representation folding: d base coordinates become one source entry.
Matrix rep_fold(const Matrix& X, const Ring& S, unsigned d) {
    const Ring& B = X.ring();
    Matrix out(S, X.rows(), X.cols() / d);
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t i = 0; i < out.cols(); ++i)
            for (std::size_t s = 0; s < S->num_summands(); ++s)
                for (unsigned t = 0; t < d; ++t) out.at(r, i)[S->offset(s) + t] = X.at(r, i * d + t)[B->offset(s)];
    return out;
}

// Each row becomes an n1 x N2 block, left-multiplied by A^T.
Matrix reshape_rows(const Matrix& X, std::size_t n1, const Matrix* At) {
    const std::size_t N2 = X.cols() / n1;
    std::vector<Matrix> blocks;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        Matrix M(X.ring(), n1, N2);
        for (std::size_t a = 0; a < n1; ++a)
            for (std::size_t c = 0; c < N2; ++c) std::copy(X.at(r, a * N2 + c), X.at(r, a * N2 + c) + X.ring()->width(), M.at(a, c));
        blocks.push_back(At ? mat_mul(*At, M) : M);
    }
    return mat_vstack(blocks);
}

}  // namespace

// --- public splitting API -------------------------------------------------------------

std::vector<Matrix> tensor_split(const Matrix& g, const std::vector<std::size_t>& degrees) {
    std::vector<Matrix> out;
    if (kron_split(g, square_shapes(degrees), false, out) != SplitStatus::Ok)
        fail(Errc::NotDecomposable, "matrix is not a Kronecker product with unit pivots");
    return out;
}

std::vector<Matrix> vector_tensor_split(const Matrix& u, const std::vector<std::size_t>& degrees) {
    std::vector<Matrix> out;
    if (kron_split(u, row_shapes(degrees), true, out) != SplitStatus::Ok)
        fail(Errc::NotDecomposable, "vector is not a pure tensor with unit pivots");
    return out;
}

std::pair<std::vector<Matrix>, Perm> wreath_split(const Matrix& g, std::size_t n, std::size_t m, WreathMode mode) {
    if (mode == WreathMode::Imprimitive) {
        if (g.rows() != n * m || g.cols() != n * m) fail(Errc::ShapeMismatch, "degree is not n*m");
        std::vector<Matrix> hs;
        Perm k(m);
        std::vector<bool> used(m, false);
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t found = m;
            for (std::size_t j = 0; j < m; ++j) {
                if (mat_block(g, i * n, j * n, n, n).is_zero()) continue;
                if (found != m) fail(Errc::NotWreathShaped, "two nonzero blocks in block row " + std::to_string(i));
                found = j;
            }
            if (found == m || used[found]) fail(Errc::NotWreathShaped, "block pattern is not a permutation");
            used[found] = true;
            k[i] = found;
            hs.push_back(mat_block(g, i * n, found * n, n, n));
        }
        return {hs, k};
    }
    std::size_t N = 1;
    for (std::size_t j = 0; j < m; ++j) N *= n;
    if (g.rows() != N || g.cols() != N) fail(Errc::ShapeMismatch, "degree is not n^m");
    const std::vector<std::size_t> degrees(m, n);
    std::vector<Matrix> hs;
    for (const Perm& k : all_perms(m)) {
        const Matrix h = mat_mul(g, mat_transpose(wreath_perm(g.ring(), n, k, mode)));
        if (kron_split(h, square_shapes(degrees), false, hs) == SplitStatus::Ok) return {hs, k};
    }
    fail(Errc::NotWreathShaped, "no coordinate permutation leaves a Kronecker product");
}

// --- matching ----------------------------------------------------------------------------

std::vector<int> max_matching(const std::vector<std::vector<int>>& adj, std::size_t right) {
    const std::size_t L = adj.size();
    const int INF = std::numeric_limits<int>::max();
    std::vector<int> ml(L, -1), mr(right, -1), dist(L);
    auto bfs = [&] {
        std::deque<std::size_t> q;
        bool found = false;
        for (std::size_t i = 0; i < L; ++i) {
            dist[i] = ml[i] < 0 ? 0 : INF;
            if (ml[i] < 0) q.push_back(i);
        }
        while (!q.empty()) {
            const std::size_t i = q.front();
            q.pop_front();
            for (int j : adj[i]) {
                const int w = mr[j];
                if (w < 0) {
                    found = true;
                } else if (dist[w] == INF) {
                    dist[w] = dist[i] + 1;
                    q.push_back(static_cast<std::size_t>(w));
                }
            }
        }
        return found;
    };
    auto dfs = [&](auto&& self, std::size_t i) -> bool {
        for (int j : adj[i]) {
            const int w = mr[j];
            if (w < 0 || (dist[w] == dist[i] + 1 && self(self, static_cast<std::size_t>(w)))) {
                ml[i] = j;
                mr[j] = static_cast<int>(i);
                return true;
            }
        }
        dist[i] = INF;
        return false;
    };
    while (bfs())
        for (std::size_t i = 0; i < L; ++i)
            if (ml[i] < 0) dfs(dfs, i);
    return ml;
}

std::optional<std::vector<int>> least_perfect_matching(const std::vector<std::vector<int>>& adj, std::size_t right) {
    const std::size_t L = adj.size();
    if (L != right) return std::nullopt;
    std::vector<int> fixed;
    std::vector<bool> used(right, false);
    auto completes = [&](std::size_t from) {
        std::vector<std::vector<int>> rest;
        for (std::size_t i = from; i < L; ++i) {
            std::vector<int> row;
            for (int j : adj[i])
                if (!used[j]) row.push_back(j);
            rest.push_back(std::move(row));
        }
        const auto m = max_matching(rest, right);
        return std::count_if(m.begin(), m.end(), [](int x) { return x >= 0; }) == static_cast<long>(L - from);
    };
    if (!completes(0)) return std::nullopt;
    for (std::size_t i = 0; i < L; ++i) {
        std::vector<int> cand = adj[i];
        std::sort(cand.begin(), cand.end());
        bool placed = false;
        for (int j : cand) {
            if (used[j]) continue;
            used[j] = true;
            if (completes(i + 1)) {
                fixed.push_back(j);
                placed = true;
                break;
            }
            used[j] = false;
        }
        if (!placed) return std::nullopt;
    }
    return fixed;
}

// --- witnesses ----------------------------------------------------------------------------

Matrix witness_replay(const CompiledTree& ct, const Witness& w) {
    const TreeNode& node = ct.node(w.node);
    if (node.is_leaf) return w.element;
    std::vector<Matrix> parts;
    for (const auto& p : w.parts) parts.push_back(witness_replay(ct, p));
    switch (node.op.kind) {
        case OpKind::Tensor: return mat_kron_all(parts);
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct: return wreath_rep(parts, w.k, mode_of(node.op.kind));
        case OpKind::DirectSameDegree: {
            Matrix g = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) g = mat_mul(g, parts[i]);
            return g;
        }
        default: return ct.lift(w.node, 0, parts[0]);
    }
}

// --- Trapdoor -------------------------------------------------------------------------------

Trapdoor::Trapdoor(const DerivationTree& t) : ct_(std::make_shared<const CompiledTree>(t)) {}
Trapdoor::Trapdoor(std::shared_ptr<const CompiledTree> ct) : ct_(std::move(ct)) {}

const std::vector<Matrix>* Trapdoor::closure(std::size_t node) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = closures_.find(node);
    if (it == closures_.end()) it = closures_.emplace(node, group_closure(ct_->generators(node), kEnumCap)).first;
    return it->second ? &*it->second : nullptr;
}

MembershipVerdict Trapdoor::membership(const Matrix& g) const {
    const NodeType& ty = ct_->type(ct_->root());
    if (!same_ring(g.ring(), ty.ring) || g.rows() != ty.n || g.cols() != ty.n)
        fail(Errc::ShapeMismatch, "query does not match the instance ring and degree");
    MembershipVerdict v;
    v.witness = member(ct_->root(), g);
    v.accepted = v.witness.has_value();
    return v;
}

std::optional<Witness> Trapdoor::member(std::size_t i, const Matrix& g) const {
    const TreeNode& node = ct_->node(i);
    const NodeType& ty = ct_->type(i);
    Witness w;
    w.node = i;
    if (node.is_leaf) {
        if (!leaf_contains(node.leaf, g)) return std::nullopt;
        w.element = g;
        return w;
    }
    const std::size_t c0 = node.children[0];
    auto single = [&](const std::optional<Matrix>& h) -> std::optional<Witness> {
        if (!h) return std::nullopt;
        auto part = member(c0, *h);
        if (!part) return std::nullopt;
        w.parts.push_back(std::move(*part));
        return w;
    };
    switch (node.op.kind) {
        case OpKind::Conjugate:
            return single(mat_mul(mat_mul(ct_->conjugator(i), g), ct_->conjugator_inv(i)));
        case OpKind::RingExtend:
            return single(extend_preimage(g, ct_->embedding(i)));
        case OpKind::RingRep:
            return single(rep_preimage(g, ct_->type(c0).ring, node.op.param));
        case OpKind::CrtAssemble: {
            std::vector<bool> mask(ty.ring->num_summands(), false);
            for (auto s : node.op.placement) mask[s] = true;
            if (!equal_on(g, Matrix::identity(ty.ring, ty.n), complement(mask))) return std::nullopt;
            return single(project_summands(g, node.op.placement));
        }
        case OpKind::DirectSameDegree: {
            const Matrix I = Matrix::identity(ty.ring, ty.n);
            if (!equal_on(g, I, complement(ty.support))) return std::nullopt;
            for (std::size_t c : node.children) {
                auto part = member(c, mix(g, I, ct_->type(c).support));
                if (!part) return std::nullopt;
                w.parts.push_back(std::move(*part));
            }
            return w;
        }
        case OpKind::Tensor: {
            auto parts = member_kron(node.children, g);
            if (!parts) return std::nullopt;
            w.parts = std::move(*parts);
            return w;
        }
        case OpKind::WreathImprimitive: {
            std::pair<std::vector<Matrix>, Perm> split;
            try {
                split = wreath_split(g, ct_->type(c0).n, node.op.param, WreathMode::Imprimitive);
            } catch (const Error& e) {
                if (e.code() == Errc::NotWreathShaped) return std::nullopt;
                throw;
            }
            for (const auto& h : split.first) {
                auto part = member(c0, h);
                if (!part) return std::nullopt;
                w.parts.push_back(std::move(*part));
            }
            w.k = split.second;
            return w;
        }
        case OpKind::WreathProduct: {
            const std::size_t n = ct_->type(c0).n, m = node.op.param;
            std::vector<Matrix> scratch;
            for (const Perm& k : all_perms(m)) {
                const Matrix h = mat_mul(g, mat_transpose(wreath_perm(ty.ring, n, k, WreathMode::Product)));
                if (kron_split(h, square_shapes(std::vector<std::size_t>(m, n)), false, scratch) != SplitStatus::Ok)
                    continue;
                // At most one k leaves a Kronecker product, so the verdict is final.
                auto parts = member_kron(std::vector<std::size_t>(m, c0), h);
                if (!parts) return std::nullopt;
                w.parts = std::move(*parts);
                w.k = k;
                return w;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<Witness>> Trapdoor::member_kron(const std::vector<std::size_t>& kids, const Matrix& g) const {
    const Ring& R = g.ring();
    std::vector<std::size_t> degrees;
    for (auto c : kids) degrees.push_back(ct_->type(c).n);
    std::vector<Matrix> factors;
    if (kron_split(g, square_shapes(degrees), false, factors) != SplitStatus::Ok) return std::nullopt;
    // Outside a factor's support its scalar is forced: the factor must become I.
    std::vector<RingElement> base;
    std::vector<std::vector<bool>> active;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        const auto& sup = ct_->type(kids[i]).support;
        RingElement b = RingElement::one(R);
        std::vector<u64> c(R->width(), 0);
        for (std::size_t s = 0; s < R->num_summands(); ++s) {
            if (sup[s]) continue;
            if (!scalar_part(factors[i], s, c.data())) return std::nullopt;
            R->inv_in(s, c.data() + R->offset(s), b.data() + R->offset(s));
        }
        base.push_back(std::move(b));
        active.push_back(sup);
    }
    auto test = [&](std::size_t i, const RingElement& l) { return member(kids[i], mat_scale(factors[i], l)); };
    // Cheap attempt before the scalar search.
    {
        RingElement prod = RingElement::one(R);
        for (const auto& b : base) prod = prod * b;
        if (prod.is_one()) {
            std::vector<Witness> parts;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                auto p = test(i, base[i]);
                if (!p) break;
                parts.push_back(std::move(*p));
            }
            if (parts.size() == kids.size()) return parts;
        }
    }
    std::vector<std::vector<RingElement>> cands;
    for (std::size_t i = 0; i < kids.size(); ++i) cands.push_back(scalar_candidates(R, active[i], base[i], kScalarCap));
    return scalar_search<Witness>(R, cands, test);
}

LtpResult Trapdoor::ltp(const Matrix& U, const Matrix& V) const {
    const NodeType& ty = ct_->type(ct_->root());
    if (!same_ring(U.ring(), ty.ring) || !same_ring(V.ring(), ty.ring) || U.cols() != ty.n || V.cols() != ty.n ||
        U.rows() != V.rows() || U.rows() == 0)
        fail(Errc::ShapeMismatch, "vectors do not match the instance ring and degree");
    enum_work_ = 0;
    LtpResult r = ltp_at(ct_->root(), U, V);
    if (r.g && !(mat_mul(U, *r.g) == V)) fail(Errc::Failure, "transporter failed verification");
    return r;
}

LtpResult Trapdoor::ltp_leaf(std::size_t i, const Matrix& U, const Matrix& V) const {
    const BaseGroupSpec& b = ct_->node(i).leaf;
    const Ring& F = U.ring();
    switch (b.kind) {
        case LeafKind::Trivial:
            if (U == V) return {Matrix::identity(F, b.n), true};
            return {std::nullopt, true};
        case LeafKind::UnipotentCyclic: {
            const Matrix u0 = column_block(U, 0, 1), v0 = column_block(V, 0, 1);
            if (!(u0 == v0)) return {std::nullopt, true};
            const Matrix rhs = mat_transpose(mat_sub(column_block(V, 1, 1), column_block(U, 1, 1)));
            const LinearSolution sol = solve_left(mat_transpose(u0), rhs);
            if (!sol.solvable) return {std::nullopt, true};
            Matrix g = Matrix::identity(F, 2);
            g.set(0, 1, sol.particular.get(0, 0));
            return {g, true};
        }
        case LeafKind::SpecialLinear:
        case LeafKind::GeneralLinear:
            return {transporter_gl(U, V, b.kind == LeafKind::SpecialLinear), true};
        case LeafKind::DiagonalCyclic: {
            const Matrix& d = ct_->generators(i)[0];
            Matrix cur = Matrix::identity(F, b.n), Uc = U;
            const u64 order = leaf_order(b);
            for (u64 k = 0; k < order; ++k) {
                if (Uc == V) return {cur, true};
                cur = mat_mul(cur, d);
                Uc = mat_mul(Uc, d);
            }
            return {std::nullopt, true};
        }
    }
    return {std::nullopt, true};
}

LtpResult Trapdoor::ltp_at(std::size_t i, const Matrix& U, const Matrix& V) const {
    const TreeNode& node = ct_->node(i);
    if (node.is_leaf) return ltp_leaf(i, U, V);
    const NodeType& ty = ct_->type(i);
    const std::size_t c0 = node.children[0];
    auto lifted = [&](LtpResult r, std::size_t slot = 0) {
        if (r.g) r.g = ct_->lift(i, slot, *r.g);
        return r;
    };
    switch (node.op.kind) {
        case OpKind::Conjugate: {
            const Matrix& ci = ct_->conjugator_inv(i);
            return lifted(ltp_at(c0, mat_mul(U, ci), mat_mul(V, ci)));
        }
        case OpKind::RingExtend: {
            const auto ec = extend_coords(ct_->embedding(i));
            const Ring& S = ct_->type(c0).ring;
            return lifted(ltp_at(c0, to_coordinates(U, ec, S), to_coordinates(V, ec, S)));
        }
        case OpKind::RingRep: {
            const Ring& S = ct_->type(c0).ring;
            return lifted(ltp_at(c0, rep_fold(U, S, node.op.param), rep_fold(V, S, node.op.param)));
        }
        case OpKind::CrtAssemble: {
            std::vector<bool> mask(ty.ring->num_summands(), false);
            for (auto s : node.op.placement) mask[s] = true;
            if (!equal_on(U, V, complement(mask))) return {std::nullopt, true};
            return lifted(ltp_at(c0, project_summands(U, node.op.placement), project_summands(V, node.op.placement)));
        }
        case OpKind::DirectSameDegree: {
            if (!equal_on(U, V, complement(ty.support))) return {std::nullopt, true};
            Matrix g = Matrix::identity(ty.ring, ty.n);
            for (std::size_t c : node.children) {
                LtpResult r = ltp_at(c, U, mix(V, U, ct_->type(c).support));
                if (!r.g) return r;
                g = mat_mul(g, *r.g);
            }
            return {g, true};
        }
        case OpKind::Tensor:
            return ltp_kron(node.children, U, V);
        case OpKind::WreathImprimitive: {
            const std::size_t n = ct_->type(c0).n, m = node.op.param;
            std::vector<std::vector<LtpResult>> edge(m);
            std::vector<std::vector<int>> adj(m);
            bool certified = true;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b) {
                    edge[a].push_back(ltp_at(c0, column_block(U, a * n, n), column_block(V, b * n, n)));
                    if (edge[a][b].g) {
                        adj[a].push_back(static_cast<int>(b));
                    } else {
                        certified = certified && edge[a][b].certified;
                    }
                }
            const auto match = least_perfect_matching(adj, m);
            if (!match) return {std::nullopt, certified};
            Perm k(m);
            std::vector<Matrix> hs;
            for (std::size_t a = 0; a < m; ++a) {
                k[a] = static_cast<std::size_t>((*match)[a]);
                hs.push_back(*edge[a][k[a]].g);
            }
            return {wreath_rep(hs, k, WreathMode::Imprimitive), true};
        }
        case OpKind::WreathProduct: {
            const std::size_t n = ct_->type(c0).n, m = node.op.param;
            bool certified = true;
            for (const Perm& k : all_perms(m)) {
                const Matrix P = wreath_perm(ty.ring, n, k, WreathMode::Product);
                LtpResult r = ltp_kron(std::vector<std::size_t>(m, c0), U, mat_mul(V, mat_transpose(P)));
                if (r.g) return {mat_mul(*r.g, P), true};
                certified = certified && r.certified;
            }
            return {std::nullopt, certified};
        }
    }
    return {std::nullopt, false};
}

LtpResult Trapdoor::ltp_kron(const std::vector<std::size_t>& kids, const Matrix& U, const Matrix& V) const {
    if (kids.size() == 1) return ltp_at(kids[0], U, V);
    if (U.rows() != 1) return ltp_kron_enumerate(kids, U, V);
    const Ring& R = U.ring();
    std::vector<bool> act(R->num_summands(), false);
    for (std::size_t s = 0; s < R->num_summands(); ++s) {
        bool uz = true, vz = true;
        for (std::size_t j = 0; j < U.cols(); ++j) {
            uz = uz && zero_in(R, s, U.at(0, j));
            vz = vz && zero_in(R, s, V.at(0, j));
        }
        if (uz != vz) return {std::nullopt, true};
        act[s] = !uz;
    }
    std::vector<std::size_t> degrees;
    for (auto c : kids) degrees.push_back(ct_->type(c).n);
    std::vector<Matrix> us, vs;
    if (kron_split(U, row_shapes(degrees), true, us) != SplitStatus::Ok) return ltp_kron_enumerate(kids, U, V);
    // u is a pure tensor with unit pivots, hence so is every image u*g.
    if (kron_split(V, row_shapes(degrees), true, vs) != SplitStatus::Ok) return {std::nullopt, true};
    std::vector<RingElement> base;
    std::vector<std::vector<bool>> active;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        const auto& sup = ct_->type(kids[i]).support;
        RingElement b = RingElement::one(R);
        std::vector<bool> a(R->num_summands(), false);
        for (std::size_t s = 0; s < R->num_summands(); ++s) {
            if (!act[s]) continue;
            if (sup[s]) {
                a[s] = true;
                continue;
            }
            // The factor acts trivially here, so u_i = mu * v_i decides mu.
            std::size_t p = 0;
            while (p < vs[i].cols() && !unit_in(R, s, vs[i].at(0, p))) ++p;
            if (p == vs[i].cols()) return {std::nullopt, true};
            std::vector<u64> inv(R->width(), 0);
            R->inv_in(s, vs[i].at(0, p) + R->offset(s), inv.data() + R->offset(s));
            R->mul_in(s, us[i].at(0, p) + R->offset(s), inv.data() + R->offset(s), b.data() + R->offset(s));
        }
        base.push_back(std::move(b));
        active.push_back(std::move(a));
    }
    bool certified = true;
    auto test = [&](std::size_t i, const RingElement& mu) -> std::optional<Matrix> {
        LtpResult r = ltp_at(kids[i], us[i], mat_scale(vs[i], mu));
        if (!r.g) certified = certified && r.certified;
        return r.g;
    };
    {
        RingElement prod = RingElement::one(R);
        for (const auto& b : base) prod = prod * b;
        if (prod.is_one()) {
            std::vector<Matrix> parts;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                auto g = test(i, base[i]);
                if (!g) break;
                parts.push_back(std::move(*g));
            }
            if (parts.size() == kids.size()) return {mat_kron_all(parts), true};
        }
    }
    std::vector<std::vector<RingElement>> cands;
    for (std::size_t i = 0; i < kids.size(); ++i) cands.push_back(scalar_candidates(R, active[i], base[i], kScalarCap));
    // Inactive summands carry zero vectors and any group element works there.
    auto parts = scalar_search<Matrix>(R, cands, test);
    if (!parts) return {std::nullopt, certified};
    return {mat_kron_all(*parts), true};
}

LtpResult Trapdoor::ltp_kron_enumerate(const std::vector<std::size_t>& kids, const Matrix& U, const Matrix& V) const {
    const std::vector<Matrix>* G1 = closure(kids[0]);
    if (!G1) fail(Errc::UnsupportedDecomposition, "tensor factor too large to enumerate for a non-decomposable query");
    enum_work_ += G1->size();
    if (enum_work_ > kEnumWork) fail(Errc::UnsupportedDecomposition, "non-decomposable query exceeds the enumeration budget");
    const std::size_t n1 = ct_->type(kids[0]).n;
    const std::vector<std::size_t> rest(kids.begin() + 1, kids.end());
    const Matrix Vr = reshape_rows(V, n1, nullptr);
    bool certified = true;
    for (const auto& A : *G1) {
        const Matrix At = mat_transpose(A);
        LtpResult r = ltp_kron(rest, reshape_rows(U, n1, &At), Vr);
        if (r.g) return {mat_kron(A, *r.g), true};
        certified = certified && r.certified;
    }
    return {std::nullopt, certified};
}

MembershipVerdict membership(const DerivationTree& t, const Matrix& g) { return Trapdoor(t).membership(g); }

Matrix ltp_solve(const DerivationTree& t, const Matrix& u, const Matrix& v) {
    const LtpResult r = Trapdoor(t).ltp(u, v);
    if (!r.g) fail(Errc::NoSolution, r.certified ? "no transporter exists" : "no transporter found");
    return *r.g;
}

Matrix affine_embed(const Matrix& g) {
    Matrix out = Matrix::identity(g.ring(), g.rows() + 1);
    mat_put_block(out, 0, 0, g);
    return out;
}

std::pair<Matrix, Matrix> affine_bridge(const Matrix& u, const Matrix& v) {
    if (!same_ring(u.ring(), v.ring()) || u.rows() != 1 || v.rows() != 1 || u.cols() != v.cols())
        fail(Errc::ShapeMismatch, "affine bridge needs two row vectors of equal length");
    const std::size_t n = u.cols();
    Matrix Tu = Matrix::identity(u.ring(), n + 1), Tv = Tu;
    mat_put_block(Tu, n, 0, u);
    mat_put_block(Tv, n, 0, v);
    return {Tu, Tv};
}

}  // namespace mgc
