#include <functional>

#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/linalg.hpp"
#include "mgc/matrix.hpp"
#include "mgc/rng.hpp"

using namespace mgc;

namespace {

using IntMat = std::vector<std::vector<long long>>;

IntMat int_mul(const IntMat& a, const IntMat& b, long long mod) {
    IntMat out(a.size(), std::vector<long long>(b[0].size(), 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k)
            for (size_t j = 0; j < b[0].size(); ++j) out[i][j] = (out[i][j] + a[i][k] * b[k][j]) % mod;
    return out;
}

IntMat to_ints(const Matrix& m) {
    IntMat out(m.rows(), std::vector<long long>(m.cols()));
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) out[i][j] = static_cast<long long>(*m.get(i, j).to_integer());
    return out;
}

// Leibniz expansion oracle.
RingElement leibniz_det(const Matrix& a) {
    const size_t n = a.rows();
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    RingElement total(a.ring());
    do {
        int inversions = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        RingElement term = RingElement::one(a.ring());
        for (size_t i = 0; i < n; ++i) term = term * a.get(i, perm[i]);
        total = inversions % 2 ? total - term : total + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

std::vector<Matrix> all_matrices(const Ring& R, size_t rows, size_t cols) {
    auto elems = ring_elements(R);
    std::vector<Matrix> out;
    const size_t cells = rows * cols;
    std::vector<size_t> idx(cells, 0);
    while (true) {
        Matrix m(R, rows, cols);
        for (size_t c = 0; c < cells; ++c) m.set(c / cols, c % cols, elems[idx[c]]);
        out.push_back(m);
        size_t c = 0;
        while (c < cells && ++idx[c] == elems.size()) idx[c++] = 0;
        if (c == cells) break;
    }
    return out;
}

std::vector<Ring> test_rings() {
    return {ring_integer_residue(5), ring_integer_residue(15), ring_integer_residue(4), ring_integer_residue(9),
            ring_field(4), ring_galois(2, 2, 2), ring_direct_sum({ring_integer_residue(2), ring_field(4)})};
}

}  // namespace

TEST_CASE("mat_mul examples") {
    auto z5 = ring_integer_residue(5);
    auto a = Matrix::from_ints(z5, {{1, 1}, {0, 1}});
    auto b = Matrix::from_ints(z5, {{1, 0}, {1, 1}});
    CHECK(mat_mul(a, b) == Matrix::from_ints(z5, {{2, 1}, {1, 1}}));
    CHECK(mat_mul(Matrix::identity(z5, 2), a) == a);
    CHECK_THROWS_AS(mat_mul(a, Matrix::identity(z5, 3)), Error);
    CHECK_THROWS_AS(mat_mul(a, Matrix::identity(ring_integer_residue(7), 2)), Error);

    auto z15 = ring_integer_residue(15);
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        auto x = random_matrix(z15, 3, 3, rng), y = random_matrix(z15, 3, 3, rng);
        auto got = to_ints(mat_mul(x, y));
        auto mod3 = int_mul(to_ints(x), to_ints(y), 3), mod5 = int_mul(to_ints(x), to_ints(y), 5);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(got[i][j] % 3 == mod3[i][j]);
                CHECK(got[i][j] % 5 == mod5[i][j]);
            }
    }
}

TEST_CASE("mat_inv examples") {
    auto gr = ring_galois(2, 2, 2);
    auto x = RingElement(gr, {0, 1});
    Matrix u = Matrix::identity(gr, 2);
    u.set(0, 1, x);
    Matrix expect = Matrix::identity(gr, 2);
    expect.set(0, 1, -x);
    CHECK(mat_inv(u) == expect);
    auto z5 = ring_integer_residue(5);
    CHECK(mat_inv(Matrix::from_ints(z5, {{2, 0}, {0, 1}})) == Matrix::from_ints(z5, {{3, 0}, {0, 1}}));
    auto z15 = ring_integer_residue(15);
    try {
        mat_inv(Matrix::from_ints(z15, {{1, 0}, {0, 3}}));
        FAIL("inverted a singular matrix");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonInvertible);
    }
}

TEST_CASE("determinant matches Leibniz expansion and invertibility") {
    for (const auto& R : test_rings()) {
        CAPTURE(R->describe());
        Rng rng(11);
        for (int t = 0; t < 60; ++t) {
            const size_t n = 1 + rng.below(4);
            auto a = random_matrix(R, n, n, rng);
            auto d = mat_det(a);
            CHECK(d == leibniz_det(a));
            auto inv = try_inv(a);
            CHECK(inv.has_value() == d.is_unit());
            if (inv) {
                CHECK(mat_mul(a, *inv).is_identity());
                CHECK(mat_mul(*inv, a).is_identity());
            }
        }
    }
}

TEST_CASE("associativity and inverse on sampled triples") {
    for (const auto& R : test_rings()) {
        Rng rng(19);
        for (int t = 0; t < 30; ++t) {
            auto a = random_invertible(R, 3, rng), b = random_matrix(R, 3, 3, rng), c = random_matrix(R, 3, 3, rng);
            CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
            CHECK(mat_mul(a, mat_inv(a)).is_identity());
        }
    }
}

TEST_CASE("kronecker product") {
    auto z3 = ring_integer_residue(3);
    auto a = Matrix::from_ints(z3, {{1, 1}, {0, 1}});
    auto b = Matrix::from_ints(z3, {{1, 2}, {0, 1}});
    CHECK(mat_kron(a, b) ==
          Matrix::from_ints(z3, {{1, 2, 1, 2}, {0, 1, 0, 1}, {0, 0, 1, 2}, {0, 0, 0, 1}}));
    CHECK(mat_kron(a, Matrix::identity(z3, 1)) == a);
    CHECK(mat_kron(Matrix::identity(z3, 2), Matrix::identity(z3, 2)).is_identity());
    for (const auto& R : test_rings()) {
        Rng rng(23);
        for (int t = 0; t < 20; ++t) {
            auto A = random_matrix(R, 2, 2, rng), B = random_matrix(R, 3, 3, rng);
            auto C = random_matrix(R, 2, 2, rng), D = random_matrix(R, 3, 3, rng);
            CHECK(mat_mul(mat_kron(A, B), mat_kron(C, D)) == mat_kron(mat_mul(A, C), mat_mul(B, D)));
        }
    }
}

TEST_CASE("wreath representation examples") {
    auto z7 = ring_integer_residue(7);
    auto two = Matrix::from_ints(z7, {{2}});
    CHECK(wreath_rep({two, two}, {1, 0}, WreathMode::Imprimitive) == Matrix::from_ints(z7, {{0, 2}, {2, 0}}));
    auto z5 = ring_integer_residue(5);
    auto I = Matrix::identity(z5, 2);
    CHECK(wreath_rep({I, I, I}, {0, 1, 2}, WreathMode::Imprimitive).is_identity());
    CHECK(wreath_rep({I, I}, {0, 1}, WreathMode::Product).is_identity());
    // Tensor swap: e_i (x) e_j -> e_j (x) e_i.
    auto swap = wreath_rep({I, I}, {1, 0}, WreathMode::Product);
    CHECK(swap == Matrix::from_ints(z5, {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}}));
    CHECK_THROWS_AS(wreath_rep({I, I}, {0}, WreathMode::Imprimitive), Error);
    CHECK_THROWS_AS(wreath_rep({I, Matrix::identity(z5, 3)}, {0, 1}, WreathMode::Imprimitive), Error);
}

TEST_CASE("wreath representation is a homomorphism in both modes") {
    for (auto mode : {WreathMode::Imprimitive, WreathMode::Product}) {
        for (const auto& R : {ring_integer_residue(5), ring_field(4), ring_integer_residue(6)}) {
            Rng rng(31);
            for (int t = 0; t < 40; ++t) {
                const size_t m = 2 + rng.below(2), n = 2;
                std::vector<Matrix> h1, h2;
                for (size_t i = 0; i < m; ++i) {
                    h1.push_back(random_invertible(R, n, rng));
                    h2.push_back(random_invertible(R, n, rng));
                }
                Perm k1 = perm_identity(m), k2 = perm_identity(m);
                rng.shuffle(k1);
                rng.shuffle(k2);
                std::vector<Matrix> h(m);
                for (size_t i = 0; i < m; ++i) h[i] = mat_mul(h1[i], h2[k1[i]]);
                CHECK(mat_mul(wreath_rep(h1, k1, mode), wreath_rep(h2, k2, mode)) ==
                      wreath_rep(h, perm_compose(k1, k2), mode));
            }
        }
    }
}

TEST_CASE("product action on pure tensors") {
    auto z5 = ring_integer_residue(5);
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        std::vector<Matrix> hs{random_invertible(z5, 2, rng), random_invertible(z5, 2, rng), random_invertible(z5, 2, rng)};
        Perm k{2, 0, 1};
        std::vector<Matrix> us{random_matrix(z5, 1, 2, rng), random_matrix(z5, 1, 2, rng), random_matrix(z5, 1, 2, rng)};
        auto lhs = vector_act(mat_kron_all(us), wreath_rep(hs, k, WreathMode::Product));
        Perm kinv = perm_inverse(k);
        std::vector<Matrix> ws;
        for (size_t j = 0; j < 3; ++j) ws.push_back(vector_act(us[kinv[j]], hs[kinv[j]]));
        CHECK(lhs == mat_kron_all(ws));
    }
}

TEST_CASE("ring change examples") {
    auto gf2 = ring_field(2), gf4 = ring_field(4);
    auto emb = ring_extension(gf2, gf4);
    auto a = Matrix::from_ints(gf2, {{1, 1}, {0, 1}});
    CHECK(extend_to(a, emb) == Matrix::from_ints(gf4, {{1, 1}, {0, 1}}));

    auto z3 = ring_integer_residue(3), z15 = ring_integer_residue(15);
    auto lifted = crt_embed(Matrix::from_ints(z3, {{1, 1}, {0, 1}}), z15, {0});
    CHECK(lifted == Matrix::from_ints(z15, {{1, 10}, {0, 1}}));

    Matrix x(gf4, 1, 1);
    x.set(0, 0, RingElement(gf4, {0, 1}));
    CHECK(rep_to(x, 2) == Matrix::from_ints(gf2, {{0, 1}, {1, 1}}));

    CHECK_THROWS_AS(ring_extension(ring_integer_residue(3), z15), Error);
    CHECK_THROWS_AS(rep_to(x, 3), Error);
}

TEST_CASE("ring change preserves products and inverts") {
    struct Case {
        Ring src, dst;
    };
    std::vector<Case> cases{{ring_field(2), ring_field(4)},
                            {ring_field(4), ring_field(16)},
                            {ring_integer_residue(4), ring_galois(2, 2, 2)},
                            {ring_galois(2, 2, 2), ring_galois(2, 2, 4)},
                            {ring_field(3), ring_field(9)},
                            {ring_integer_residue(6), ring_direct_sum({ring_field(4), ring_field(9)})}};
    for (const auto& c : cases) {
        CAPTURE(c.src->describe());
        CAPTURE(c.dst->describe());
        auto emb = ring_extension(c.src, c.dst);
        Rng rng(41);
        for (int t = 0; t < 30; ++t) {
            auto a = random_matrix(c.src, 2, 2, rng), b = random_matrix(c.src, 2, 2, rng);
            CHECK(extend_to(mat_mul(a, b), emb) == mat_mul(extend_to(a, emb), extend_to(b, emb)));
            CHECK(extend_to(mat_add(a, b), emb) == mat_add(extend_to(a, emb), extend_to(b, emb)));
            auto back = extend_preimage(extend_to(a, emb), emb);
            REQUIRE(back.has_value());
            CHECK(*back == a);
        }
        CHECK(extend_to(Matrix::identity(c.src, 3), emb).is_identity());
        if (c.src->cardinality() < c.dst->cardinality()) {
            bool rejected = false;
            for (int t = 0; t < 30 && !rejected; ++t)
                rejected = !extend_preimage(random_matrix(c.dst, 1, 1, rng), emb).has_value();
            CHECK(rejected);
        }
    }
    for (const auto& R : {ring_field(4), ring_galois(2, 2, 2), ring_field(8), ring_direct_sum({ring_field(4), ring_field(9)})}) {
        const unsigned d = R->rank(0);
        Rng rng(43);
        for (int t = 0; t < 30; ++t) {
            auto a = random_matrix(R, 2, 2, rng), b = random_matrix(R, 2, 2, rng);
            CHECK(rep_to(mat_mul(a, b), d) == mat_mul(rep_to(a, d), rep_to(b, d)));
            auto back = rep_preimage(rep_to(a, d), R, d);
            REQUIRE(back.has_value());
            CHECK(*back == a);
        }
    }
    auto big = ring_direct_sum({ring_integer_residue(15), ring_field(4)});
    Rng rng(47);
    for (int t = 0; t < 30; ++t) {
        auto z5 = ring_integer_residue(5);
        auto a = random_matrix(z5, 2, 2, rng), b = random_matrix(z5, 2, 2, rng);
        auto pl = find_placement(z5, big);
        REQUIRE(pl.has_value());
        CHECK(crt_embed(mat_mul(a, b), big, *pl) == mat_mul(crt_embed(a, big, *pl), crt_embed(b, big, *pl)));
        CHECK(project_summands(crt_embed(a, big, *pl), *pl) == a);
    }
}

TEST_CASE("word evaluation and vector action") {
    auto z5 = ring_integer_residue(5);
    std::vector<Matrix> gens{Matrix::from_ints(z5, {{1, 1}, {0, 1}}), Matrix::from_ints(z5, {{1, 0}, {1, 1}})};
    CHECK(word_eval(gens, {}).is_identity());
    CHECK(word_eval(gens, {1, -1}).is_identity());
    CHECK(word_eval(gens, {1, 2}) == Matrix::from_ints(z5, {{2, 1}, {1, 1}}));
    CHECK_THROWS_AS(word_eval(gens, {3}), Error);

    auto z7 = ring_integer_residue(7);
    CHECK(vector_act(Matrix::row_vector(z7, {1, 0}), Matrix::from_ints(z7, {{0, 2}, {2, 0}})) ==
          Matrix::row_vector(z7, {0, 2}));
    Rng rng(2);
    for (int t = 0; t < 30; ++t) {
        auto g = random_matrix(z7, 3, 3, rng), h = random_matrix(z7, 3, 3, rng);
        auto v = random_matrix(z7, 1, 3, rng);
        CHECK(vector_act(v, Matrix::identity(z7, 3)) == v);
        CHECK(vector_act(Matrix(z7, 1, 3), g).is_zero());
        CHECK(vector_act(vector_act(v, g), h) == vector_act(v, mat_mul(g, h)));
    }
}

TEST_CASE("linear solver agrees with exhaustive search") {
    for (const auto& R : {ring_integer_residue(4), ring_integer_residue(6), ring_integer_residue(9), ring_field(4),
                          ring_galois(2, 2, 2), ring_integer_residue(8)}) {
        CAPTURE(R->describe());
        Rng rng(53);
        auto elems = ring_elements(R);
        for (int t = 0; t < 25; ++t) {
            const size_t k = 1 + rng.below(2), n = 1 + rng.below(3);
            auto A = random_matrix(R, k, n, rng);
            Matrix b = rng.coin(0.5) ? mat_mul(random_matrix(R, 1, k, rng), A) : random_matrix(R, 1, n, rng);
            auto sol = solve_left(A, b);
            u64 count = 0;
            for (const auto& x : all_matrices(R, 1, k))
                if (mat_mul(x, A) == b) ++count;
            CHECK(sol.count == count);
            CHECK(sol.solvable == (count > 0));
            if (sol.solvable) {
                CHECK(mat_mul(sol.particular, A) == b);
                for (const auto& g : sol.kernel) CHECK(mat_mul(g, A).is_zero());
                for (int r = 0; r < 5; ++r) CHECK(mat_mul(random_solution(sol, rng), A) == b);
            }
        }
    }
}

TEST_CASE("GL and SL transporters agree with exhaustive search") {
    for (const auto& R : {ring_integer_residue(4), ring_integer_residue(6), ring_integer_residue(9), ring_field(4),
                          ring_integer_residue(8)}) {
        CAPTURE(R->describe());
        std::vector<Matrix> gl, sl;
        for (auto& m : all_matrices(R, 2, 2)) {
            auto d = mat_det(m);
            if (!d.is_unit()) continue;
            if (d.is_one()) sl.push_back(m);
            gl.push_back(std::move(m));
        }
        Rng rng(59);
        for (int t = 0; t < 60; ++t) {
            const size_t k = 1 + rng.below(2);
            auto U = random_matrix(R, k, 2, rng);
            if (rng.coin(0.3)) U = mat_scale(U, RingElement::from_int(R, static_cast<std::int64_t>(R->prime(0))));
            for (bool special : {false, true}) {
                const auto& group = special ? sl : gl;
                Matrix V = rng.coin(0.6) ? mat_mul(U, group[rng.below(group.size())]) : random_matrix(R, k, 2, rng);
                bool exists = false;
                for (const auto& g : group)
                    if (mat_mul(U, g) == V) {
                        exists = true;
                        break;
                    }
                auto got = transporter_gl(U, V, special);
                CHECK(got.has_value() == exists);
                if (got) {
                    CHECK(mat_mul(U, *got) == V);
                    CHECK(mat_det(*got).is_unit());
                    if (special) CHECK(mat_det(*got).is_one());
                }
            }
        }
    }
}
