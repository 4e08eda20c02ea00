#include <unordered_set>

#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/instance.hpp"
#include "mgc/rng.hpp"

using namespace mgc;

namespace {

// The two-leaf factoring example: unipotent groups mod 3 and mod 5 glued over Z_15.
DerivationTree z15_tree() {
    const Ring z15 = ring_integer_residue(15);
    return tree_op(op_direct(), {tree_op(op_crt(z15, {0}), {tree_leaf(leaf_unipotent(3))}),
                                 tree_op(op_crt(z15, {1}), {tree_leaf(leaf_unipotent(5))})});
}

bool contains(const std::vector<Matrix>& v, const Matrix& m) {
    for (const auto& x : v)
        if (x == m) return true;
    return false;
}

// Order of GL(n,q) by counting invertible matrices.
u64 count_invertible(unsigned n, u64 q, bool special) {
    const Ring f = ring_field(q);
    const auto elems = ring_elements(f);
    u64 count = 0;
    std::vector<std::size_t> idx(n * n, 0);
    while (true) {
        Matrix m(f, n, n);
        for (unsigned i = 0; i < n * n; ++i) m.set(i / n, i % n, elems[idx[i]]);
        const RingElement d = mat_det(m);
        if (special ? d.is_one() : d.is_unit()) ++count;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == elems.size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return count;
}

TreeGenOptions small_options() {
    TreeGenOptions o;
    o.max_degree = 8;
    o.fields = {2, 3, 4, 5};
    o.max_leaf_degree = 2;
    o.max_arity = 2;
    o.max_field = 16;
    o.max_ring_size = 1 << 12;
    return o;
}

}  // namespace

TEST_CASE("leaf groups") {
    SUBCASE("orders agree with closure and counting") {
        for (auto b : {leaf_unipotent(5), leaf_special_linear(2, 3), leaf_general_linear(2, 3),
                       leaf_special_linear(2, 4), leaf_general_linear(2, 2), leaf_diagonal(3, 7),
                       leaf_diagonal(1, 9), leaf_trivial(2, 5), leaf_general_linear(1, 4)}) {
            CAPTURE(leaf_kind_name(b.kind));
            CAPTURE(b.n);
            CAPTURE(b.q);
            const auto closure = group_closure(leaf_generators(b), 100000);
            REQUIRE(closure);
            CHECK(closure->size() == leaf_order(b));
            for (const auto& g : *closure) CHECK(leaf_contains(b, g));
        }
        CHECK(leaf_order(leaf_general_linear(2, 3)) == count_invertible(2, 3, false));
        CHECK(leaf_order(leaf_special_linear(2, 5)) == count_invertible(2, 5, true));
        CHECK(leaf_order(leaf_general_linear(3, 2)) == 168);
    }
    SUBCASE("membership examples") {
        const Ring f5 = ring_field(5);
        CHECK(leaf_contains(leaf_unipotent(5), Matrix::from_ints(f5, {{1, 3}, {0, 1}})));
        CHECK_FALSE(leaf_contains(leaf_unipotent(5), Matrix::from_ints(f5, {{2, 0}, {0, 1}})));
        CHECK(leaf_contains(leaf_special_linear(2, 5), Matrix::from_ints(f5, {{2, 0}, {0, 3}})));
        CHECK_FALSE(leaf_contains(leaf_special_linear(2, 5), Matrix::from_ints(f5, {{2, 0}, {0, 1}})));
        CHECK_FALSE(leaf_contains(leaf_general_linear(2, 5), Matrix::from_ints(f5, {{1, 2}, {2, 4}})));
        const Ring f7 = ring_field(7);
        // Least primitive root mod 7 is 3: generator diag(3, 2).
        CHECK(leaf_contains(leaf_diagonal(2, 7), Matrix::from_ints(f7, {{3, 0}, {0, 2}})));
        CHECK(leaf_contains(leaf_diagonal(2, 7), Matrix::from_ints(f7, {{2, 0}, {0, 4}})));
        CHECK_FALSE(leaf_contains(leaf_diagonal(2, 7), Matrix::from_ints(f7, {{2, 0}, {0, 2}})));
        CHECK_FALSE(leaf_contains(leaf_diagonal(2, 7), Matrix::from_ints(f7, {{3, 1}, {0, 2}})));
        CHECK_FALSE(leaf_contains(leaf_unipotent(5), Matrix::from_ints(f7, {{1, 1}, {0, 1}})));
    }
    SUBCASE("random elements are members") {
        Rng rng(11);
        for (auto b : {leaf_unipotent(7), leaf_special_linear(3, 4), leaf_general_linear(2, 9), leaf_diagonal(2, 8)})
            for (int i = 0; i < 50; ++i) CHECK(leaf_contains(b, leaf_random_element(b, rng)));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(leaf_validate(leaf_unipotent(4)), Error);
        CHECK_THROWS_AS(leaf_validate(leaf_general_linear(2, 6)), Error);
        CHECK_THROWS_AS(leaf_validate({LeafKind::UnipotentCyclic, 3, 5}), Error);
    }
    CHECK(leaf_size(leaf_unipotent(5)) == 4 * 3);
    CHECK(primitive_element(ring_field(7)) == RingElement::from_int(ring_field(7), 3));
}

TEST_CASE("tree evaluation examples") {
    const Ring f5 = ring_field(5);
    auto single = tree_eval(tree_leaf(leaf_unipotent(5)));
    CHECK(single.n == 2);
    CHECK(same_ring(single.ring, f5));
    REQUIRE(single.gens.size() == 1);
    CHECK(single.gens[0] == Matrix::from_ints(f5, {{1, 1}, {0, 1}}));

    const Ring z15 = ring_integer_residue(15);
    auto inst = tree_eval(z15_tree());
    CHECK(inst.n == 2);
    CHECK(same_ring(inst.ring, z15));
    REQUIRE(inst.gens.size() == 2);
    CHECK(inst.gens[0] == Matrix::from_ints(z15, {{1, 10}, {0, 1}}));
    CHECK(inst.gens[1] == Matrix::from_ints(z15, {{1, 6}, {0, 1}}));
    CHECK(inst.provenance.size() == 2);

    auto tensor = tree_eval(tree_op(op_tensor(), {tree_leaf(leaf_special_linear(2, 3)), tree_leaf(leaf_unipotent(3))}));
    CHECK(tensor.n == 4);

    auto wr = tree_eval(tree_op(op_wreath(3, WreathMode::Imprimitive), {tree_leaf(leaf_unipotent(2))}));
    CHECK(wr.n == 6);
    auto pw = tree_eval(tree_op(op_wreath(2, WreathMode::Product), {tree_leaf(leaf_general_linear(2, 2))}));
    CHECK(pw.n == 4);
    auto rep = tree_eval(tree_op(op_ring_rep(2), {tree_leaf(leaf_general_linear(1, 4))}));
    CHECK(rep.n == 2);
    CHECK(same_ring(rep.ring, ring_field(2)));
}

TEST_CASE("type errors") {
    const Ring z15 = ring_integer_residue(15);
    // Both factors on the same summand: not CRT independent.
    auto bad = tree_op(op_direct(), {tree_op(op_crt(z15, {0}), {tree_leaf(leaf_unipotent(3))}),
                                     tree_op(op_crt(z15, {0}), {tree_leaf(leaf_unipotent(3))})});
    CHECK_THROWS_AS(tree_check(bad), Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_tensor(), {tree_leaf(leaf_unipotent(3))})), Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_tensor(), {tree_leaf(leaf_unipotent(3)), tree_leaf(leaf_unipotent(5))})),
                    Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_wreath(1, WreathMode::Imprimitive), {tree_leaf(leaf_unipotent(3))})), Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_crt(z15, {1}), {tree_leaf(leaf_unipotent(3))})), Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_ring_extend(ring_field(9)), {tree_leaf(leaf_unipotent(5))})), Error);
    CHECK_THROWS_AS(tree_check(tree_op(op_ring_rep(2), {tree_leaf(leaf_unipotent(5))})), Error);
    CHECK_NOTHROW(tree_check(z15_tree()));
}

TEST_CASE("leaf embeddings are monomorphisms") {
    const Ring z15 = ring_integer_residue(15);
    const Ring f3 = ring_field(3);
    CompiledTree ct(z15_tree());
    CHECK(ct.leaf_embed(0, Matrix::from_ints(f3, {{1, 1}, {0, 1}})) == Matrix::from_ints(z15, {{1, 10}, {0, 1}}));
    CHECK(ct.leaf_embed(0, Matrix::identity(f3, 2)).is_identity());
    CHECK_THROWS_AS(ct.leaf_embed(0, Matrix::from_ints(f3, {{2, 0}, {0, 1}})), Error);

    // Wreath: element lands in the first diagonal block.
    const Ring f2 = ring_field(2);
    CompiledTree wr(tree_op(op_wreath(2, WreathMode::Imprimitive), {tree_leaf(leaf_general_linear(2, 2))}));
    const Matrix h = Matrix::from_ints(f2, {{0, 1}, {1, 1}});
    Matrix expect = Matrix::identity(f2, 4);
    mat_put_block(expect, 0, 0, h);
    CHECK(wr.leaf_embed(0, h) == expect);

    Rng rng(5);
    const TreeGenOptions opt = small_options();
    for (int t = 0; t < 40; ++t) {
        const DerivationTree tree = tree_random(60, 1000 + t, opt);
        CompiledTree c(tree);
        for (std::size_t leaf : tree.leaves()) {
            const auto& b = tree.nodes[leaf].leaf;
            for (int k = 0; k < 3; ++k) {
                const Matrix x = leaf_random_element(b, rng), y = leaf_random_element(b, rng);
                CHECK(c.leaf_embed(leaf, mat_mul(x, y)) == mat_mul(c.leaf_embed(leaf, x), c.leaf_embed(leaf, y)));
            }
            CHECK(c.leaf_embed(leaf, Matrix::identity(leaf_ring(b), b.n)).is_identity());
        }
    }
}

TEST_CASE("random trees") {
    SUBCASE("deterministic") {
        CHECK(tree_random(150, 42) == tree_random(150, 42));
        CHECK(tree_random(150, 42) != tree_random(150, 43));
    }
    SUBCASE("budget too small") {
        try {
            tree_random(1, 1);
            FAIL("expected BudgetTooSmall");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::BudgetTooSmall);
        }
    }
    SUBCASE("1000 samples at budget 200 are well typed") {
        std::size_t ops = 0;
        std::unordered_set<int> kinds;
        for (u64 s = 0; s < 1000; ++s) {
            const DerivationTree t = tree_random(200, s);
            CHECK(tree_size(t) <= 200);
            const auto types = tree_check(t);
            CHECK(types.back().n <= 64);
            CHECK(types.back().ring->cardinality() <= (u64(1) << 32));
            for (const auto& n : t.nodes)
                if (!n.is_leaf) {
                    ++ops;
                    kinds.insert(static_cast<int>(n.op.kind));
                }
        }
        CHECK(ops > 1000);
        CHECK(kinds.size() == 8);
    }
    SUBCASE("degree arithmetic and invertible generators") {
        for (u64 s = 0; s < 60; ++s) {
            const DerivationTree t = tree_random(80, s, small_options());
            CompiledTree ct(t);
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                const auto& node = t.nodes[i];
                const std::size_t n = ct.type(i).n;
                for (const auto& g : ct.generators(i)) {
                    CHECK(g.rows() == n);
                    CHECK(is_invertible(g));
                }
                if (node.is_leaf) continue;
                const std::size_t c = ct.type(node.children[0]).n;
                switch (node.op.kind) {
                    case OpKind::Tensor: {
                        std::size_t prod = 1;
                        for (auto k : node.children) prod *= ct.type(k).n;
                        CHECK(n == prod);
                        break;
                    }
                    case OpKind::WreathImprimitive: CHECK(n == c * node.op.param); break;
                    case OpKind::WreathProduct: {
                        std::size_t p = 1;
                        for (unsigned k = 0; k < node.op.param; ++k) p *= c;
                        CHECK(n == p);
                        break;
                    }
                    case OpKind::RingRep: CHECK(n == c * node.op.param); break;
                    default: CHECK(n == c);
                }
            }
        }
    }
}

TEST_CASE("leaf images lie in the generated group") {
    Rng rng(9);
    int checked = 0;
    for (u64 s = 0; s < 200 && checked < 25; ++s) {
        const DerivationTree t = tree_random(50, s, small_options());
        const auto inst = tree_eval(t);
        const auto closure = group_closure(inst.gens, 20000);
        if (!closure) continue;
        ++checked;
        std::unordered_set<Matrix, MatrixHash> set(closure->begin(), closure->end());
        CompiledTree ct(t);
        for (std::size_t leaf : t.leaves())
            for (int k = 0; k < 4; ++k)
                CHECK(set.count(ct.leaf_embed(leaf, leaf_random_element(t.nodes[leaf].leaf, rng))));
    }
    CHECK(checked >= 10);
}

TEST_CASE("subgroup sampling") {
    const DerivationTree t = tree_op(op_tensor(), {tree_leaf(leaf_special_linear(2, 5)), tree_leaf(leaf_general_linear(2, 5))});
    const auto a = subgroup_sample(t, 3), b = subgroup_sample(t, 3);
    REQUIRE(a.gens_A.size() == b.gens_A.size());
    for (std::size_t i = 0; i < a.gens_A.size(); ++i) CHECK(a.gens_A[i] == b.gens_A[i]);
    CHECK(a.warnings.empty());
    const auto ab = subgroup_sample(tree_leaf(leaf_unipotent(7)), 1);
    CHECK(ab.warnings.size() == 1);
    CHECK(contains(tree_eval(tree_leaf(leaf_unipotent(7))).gens, Matrix::from_ints(ring_field(7), {{1, 1}, {0, 1}})));
}
