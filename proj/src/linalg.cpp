#include "mgc/linalg.hpp"

#include "local.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

using detail::Local;
using detail::LocalMat;

namespace {

struct Pivot {
    std::size_t i, j;
    unsigned e;
};

// Least-valuation pivot in rows/cols >= t; e == m when the block is zero.
Pivot find_pivot(const Local& L, const LocalMat& M, std::size_t t) {
    Pivot best{M.rows, M.cols, L.m};
    for (std::size_t i = t; i < M.rows; ++i)
        for (std::size_t j = t; j < M.cols; ++j) {
            const unsigned v = L.val(M.at(i, j));
            if (v < best.e) {
                best = {i, j, v};
                if (v == 0) return best;
            }
        }
    return best;
}

void sat_mul(u64& acc, u64 factor) {
    const u128 v = static_cast<u128>(acc) * factor;
    acc = v > UINT64_MAX ? UINT64_MAX : static_cast<u64>(v);
}

}  // namespace

LinearSolution solve_left(const Matrix& A, const Matrix& b) {
    require_same_ring(A.ring(), b.ring(), "solve_left");
    if (b.rows() != 1 || b.cols() != A.cols()) fail(Errc::ShapeMismatch, "solve_left: right-hand side shape");
    const auto& R = *A.ring();
    const std::size_t k = A.rows();
    LinearSolution sol;
    sol.particular = Matrix(A.ring(), 1, k);
    sol.count = 1;
    const Matrix At = mat_transpose(A), bt = mat_transpose(b);
    u64 u[kMaxRank], uinv[kMaxRank], f[kMaxRank];
    for (std::size_t s = 0; s < R.num_summands(); ++s) {
        Local L(R, s);
        LocalMat M = detail::extract(At, s);
        LocalMat c = detail::extract(bt, s);
        LocalMat Q = detail::local_identity(k, L);
        std::vector<unsigned> exps;
        std::vector<std::vector<u64>> unit_inv;
        const std::size_t n = M.rows;
        for (std::size_t t = 0; t < std::min(n, k); ++t) {
            Pivot pv = find_pivot(L, M, t);
            if (pv.e >= L.m) break;
            M.swap_rows(pv.i, t);
            c.swap_rows(pv.i, t);
            M.swap_cols(pv.j, t);
            Q.swap_cols(pv.j, t);
            L.div_p(M.at(t, t), pv.e, u);
            L.inv(u, uinv);
            for (std::size_t i = t + 1; i < n; ++i) {
                if (L.is_zero(M.at(i, t))) continue;
                L.div_p(M.at(i, t), pv.e, f);
                L.mul(f, uinv, f);
                for (std::size_t j = t; j < k; ++j) L.submul(M.at(i, j), f, M.at(t, j));
                L.submul(c.at(i, 0), f, c.at(t, 0));
            }
            for (std::size_t j = t + 1; j < k; ++j) {
                if (L.is_zero(M.at(t, j))) continue;
                L.div_p(M.at(t, j), pv.e, f);
                L.mul(f, uinv, f);
                L.submul(M.at(t, j), f, M.at(t, t));
                for (std::size_t i = 0; i < k; ++i) L.submul(Q.at(i, j), f, Q.at(i, t));
            }
            exps.push_back(pv.e);
            unit_inv.emplace_back(uinv, uinv + L.r);
        }
        const std::size_t rank = exps.size();
        for (std::size_t i = rank; i < n; ++i)
            if (!L.is_zero(c.at(i, 0))) {
                sol.solvable = false;
                sol.count = 0;
                sol.kernel.clear();
                return sol;
            }
        LocalMat z(k, 1, L.r);
        for (std::size_t t = 0; t < rank; ++t) {
            if (L.val(c.at(t, 0)) < exps[t]) {
                sol.solvable = false;
                sol.count = 0;
                sol.kernel.clear();
                return sol;
            }
            L.div_p(c.at(t, 0), exps[t], f);
            L.mul(f, unit_inv[t].data(), z.at(t, 0));
        }
        LocalMat y = detail::local_mul(L, Q, z);
        for (std::size_t i = 0; i < k; ++i) std::copy(y.at(i, 0), y.at(i, 0) + L.r, sol.particular.at(0, i) + L.o);

        auto push_gen = [&](std::size_t col, unsigned shift) {
            Matrix g(A.ring(), 1, k);
            for (std::size_t i = 0; i < k; ++i) L.mul_p(Q.at(i, col), shift, g.at(0, i) + L.o);
            if (!g.is_zero()) sol.kernel.push_back(std::move(g));
        };
        for (std::size_t t = 0; t < rank; ++t) {
            if (exps[t] > 0) {
                push_gen(t, L.m - exps[t]);
                for (unsigned i = 0; i < exps[t] * L.r; ++i) sat_mul(sol.count, L.p);
            }
        }
        for (std::size_t j = rank; j < k; ++j) {
            push_gen(j, 0);
            for (unsigned i = 0; i < L.r; ++i) sat_mul(sol.count, L.q);
        }
    }
    sol.solvable = true;
    return sol;
}

Matrix random_solution(const LinearSolution& sol, Rng& rng) {
    if (!sol.solvable) fail(Errc::NoSolution, "empty solution set");
    Matrix x = sol.particular;
    for (const auto& g : sol.kernel) x = mat_add(x, mat_scale(g, random_element(x.ring(), rng)));
    return x;
}

std::optional<Matrix> transporter_gl(const Matrix& U0, const Matrix& V0, bool special) {
    require_same_ring(U0.ring(), V0.ring(), "transporter_gl");
    if (U0.rows() != V0.rows() || U0.cols() != V0.cols()) fail(Errc::ShapeMismatch, "transporter_gl shapes");
    const auto& R = *U0.ring();
    const std::size_t k = U0.rows(), n = U0.cols();
    Matrix g(U0.ring(), n, n);
    u64 u[kMaxRank], uinv[kMaxRank], f[kMaxRank], tmp[kMaxRank];
    for (std::size_t s = 0; s < R.num_summands(); ++s) {
        Local L(R, s);
        LocalMat U = detail::extract(U0, s), W = detail::extract(V0, s);
        LocalMat C = detail::local_identity(n, L);
        std::vector<unsigned> exps;
        std::vector<std::vector<u64>> unit_inv;
        for (std::size_t t = 0; t < std::min(k, n); ++t) {
            Pivot pv = find_pivot(L, U, t);
            if (pv.e >= L.m) break;
            U.swap_rows(pv.i, t);
            W.swap_rows(pv.i, t);
            U.swap_cols(pv.j, t);
            C.swap_cols(pv.j, t);
            L.div_p(U.at(t, t), pv.e, u);
            L.inv(u, uinv);
            for (std::size_t i = t + 1; i < k; ++i) {
                if (L.is_zero(U.at(i, t))) continue;
                L.div_p(U.at(i, t), pv.e, f);
                L.mul(f, uinv, f);
                for (std::size_t j = t; j < n; ++j) L.submul(U.at(i, j), f, U.at(t, j));
                for (std::size_t j = 0; j < n; ++j) L.submul(W.at(i, j), f, W.at(t, j));
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (L.is_zero(U.at(t, j))) continue;
                L.div_p(U.at(t, j), pv.e, f);
                L.mul(f, uinv, f);
                L.submul(U.at(t, j), f, U.at(t, t));
                for (std::size_t i = 0; i < n; ++i) L.submul(C.at(i, j), f, C.at(i, t));
            }
            exps.push_back(pv.e);
            unit_inv.emplace_back(uinv, uinv + L.r);
        }
        const std::size_t rank = exps.size();
        for (std::size_t i = rank; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!L.is_zero(W.at(i, j))) return std::nullopt;
        LocalMat h(n, n, L.r);
        for (std::size_t t = 0; t < rank; ++t)
            for (std::size_t j = 0; j < n; ++j) {
                if (L.val(W.at(t, j)) < exps[t]) return std::nullopt;
                L.div_p(W.at(t, j), exps[t], tmp);
                L.mul(tmp, unit_inv[t].data(), h.at(t, j));
            }
        // Residues of the fixed rows must be independent; complete with unit vectors.
        LocalMat work = h;
        std::vector<bool> pivot_col(n, false);
        for (std::size_t t = 0; t < rank; ++t) {
            std::size_t c = n;
            for (std::size_t j = 0; j < n; ++j)
                if (!pivot_col[j] && L.unit(work.at(t, j))) {
                    c = j;
                    break;
                }
            if (c == n) return std::nullopt;
            pivot_col[c] = true;
            L.inv(work.at(t, c), uinv);
            for (std::size_t i = t + 1; i < rank; ++i) {
                if (L.is_zero(work.at(i, c))) continue;
                L.mul(work.at(i, c), uinv, f);
                for (std::size_t j = 0; j < n; ++j) L.submul(work.at(i, j), f, work.at(t, j));
            }
        }
        std::size_t next = rank;
        for (std::size_t j = 0; j < n && next < n; ++j)
            if (!pivot_col[j]) L.one(h.at(next++, j));
        LocalMat gl = detail::local_mul(L, C, h);
        if (special) {
            u64 d[kMaxRank], lam[kMaxRank], one[kMaxRank], diff[kMaxRank];
            detail::local_det(L, gl, d);
            if (!L.inv(d, lam)) return std::nullopt;
            std::size_t row;
            unsigned freedom;
            if (rank < n) {
                row = n - 1;
                freedom = L.m;
            } else {
                row = 0;
                freedom = 0;
                for (std::size_t t = 0; t < rank; ++t)
                    if (exps[t] > freedom) {
                        freedom = exps[t];
                        row = t;
                    }
            }
            L.one(one);
            L.sub(lam, one, diff);
            if (L.val(diff) < L.m - freedom) return std::nullopt;
            for (std::size_t j = 0; j < n; ++j) {
                L.mul(h.at(row, j), lam, tmp);
                std::copy(tmp, tmp + L.r, h.at(row, j));
            }
            gl = detail::local_mul(L, C, h);
        }
        detail::insert(g, s, gl);
    }
    return g;
}

}  // namespace mgc
