#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/hom.hpp"
#include "mgc/rng.hpp"

using namespace mgc;

namespace {

Matrix gf4_diag(u64 a0, u64 a1) {
    const Ring f = ring_field(4);
    Matrix g = Matrix::identity(f, 2);
    g.set(0, 0, RingElement(f, Coeffs{a0, a1}));
    return g;
}

// Random element as a word of length len in the generators and their inverses.
Matrix random_word(const std::vector<Matrix>& gens, Rng& rng, int len) {
    Matrix g = Matrix::identity(gens[0].ring(), gens[0].rows());
    for (int i = 0; i < len; ++i) {
        const Matrix& x = gens[rng.below(gens.size())];
        g = mat_mul(g, rng.coin(0.5) ? x : mat_inv(x));
    }
    return g;
}

TreeGenOptions small_options() {
    TreeGenOptions o;
    o.max_degree = 8;
    o.fields = {2, 3, 4, 5, 7, 8, 9};
    o.max_leaf_degree = 2;
    o.max_arity = 2;
    o.max_field = 64;
    o.max_ring_size = 1 << 12;
    return o;
}

template <class F>
std::optional<Errc> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

LeafHom random_choice(const DerivationTree& t, std::size_t leaf, Rng& rng) {
    if (rng.below(3) == 0) return std::nullopt;
    const unsigned r = leaf_ring(t.nodes[leaf].leaf)->rank(0);
    return unsigned(rng.below(r));
}

}  // namespace

TEST_CASE("trivial and Frobenius leaves") {
    SUBCASE("all f_0 gives the constant map") {
        const auto t = tree_op(op_wreath(2, WreathMode::Imprimitive), {tree_leaf(leaf_general_linear(2, 3))});
        // the wreath keeps its permutation part, so only the leaf is trivial
        const auto h = hom_build(tree_leaf(leaf_special_linear(2, 5)), {std::nullopt});
        for (const auto& g : h.gen_images) CHECK(g.is_identity());
        Rng rng(3);
        const Matrix g = leaf_random_element(leaf_special_linear(2, 5), rng);
        CHECK(hom_apply(h, g).is_identity());
        const auto hw = hom_build(t, {std::nullopt});
        CHECK(hw.shapes.back() == HomShape::General);
        CHECK(hw.image_tree.nodes[0].leaf.kind == LeafKind::Trivial);
    }
    SUBCASE("Frobenius on GF(4) squares entries") {
        const auto h = hom_build(tree_leaf(leaf_general_linear(2, 4)), {1u});
        CHECK(hom_apply(h, gf4_diag(0, 1)) == gf4_diag(1, 1));
        const auto h1 = hom_build(tree_leaf(leaf_general_linear(1, 4)), {1u});
        const Ring f = ring_field(4);
        for (const auto& a : ring_elements(f)) {
            if (!a.is_unit()) continue;
            Matrix g(f, 1, 1);
            g.set(0, 0, a);
            CHECK(hom_apply(h1, g).get(0, 0) == a * a);
        }
    }
}

TEST_CASE("direct sum acts per summand") {
    const Ring R = ring_direct_sum({ring_field(4), ring_field(9)});
    const auto t = tree_op(op_direct(), {tree_op(op_crt(R, {0}), {tree_leaf(leaf_general_linear(2, 4))}),
                                         tree_op(op_crt(R, {1}), {tree_leaf(leaf_special_linear(2, 9))})});
    const auto h = hom_build(t, {1u, std::nullopt});
    CHECK(h.shapes.back() == HomShape::General);
    CompiledTree ct(t);
    Rng rng(11);
    const auto sigma = make_automorphism(ring_field(4), {1});
    for (int it = 0; it < 20; ++it) {
        const Matrix a = leaf_random_element(leaf_general_linear(2, 4), rng);
        const Matrix b = leaf_random_element(leaf_special_linear(2, 9), rng);
        const Matrix g = mat_mul(ct.leaf_embed(0, a), ct.leaf_embed(2, b));
        const Matrix fg = hom_apply(h, g);
        CHECK(project_summands(fg, {0}) == entrywise_frobenius(a, sigma));
        CHECK(project_summands(fg, {1}).is_identity());
    }
    // both leaves Frobenius: the whole map is entrywise
    const auto he = hom_build(t, {1u, 1u});
    CHECK(he.shapes.back() == HomShape::Entrywise);
    CHECK(he.exponents.back() == std::vector<unsigned>{1, 1});
}

TEST_CASE("errors") {
    const auto leaf = tree_leaf(leaf_general_linear(2, 4));
    CHECK(error_of([&] { hom_build(leaf, {}); }) == Errc::ArityMismatch);
    CHECK(error_of([&] { hom_build(leaf, {2u}); }) == Errc::InvalidAutomorphism);
    // f_0 next to the identity on a tensor factor would send -I (x) -I = I to -I
    const auto t = tree_op(op_tensor(), {tree_leaf(leaf_general_linear(2, 3)), tree_leaf(leaf_general_linear(2, 3))});
    CHECK(error_of([&] { hom_build(t, {std::nullopt, 0u}); }) == Errc::UnsupportedDecomposition);
    CHECK_NOTHROW(hom_build(t, {0u, 0u}));

    const auto w = tree_op(op_conjugate(5), {tree_op(op_wreath(2, WreathMode::Imprimitive), {tree_leaf(leaf_unipotent(5))})});
    const auto h = hom_build(w, {std::nullopt});
    const Matrix outside = Matrix::from_ints(ring_field(5), {{2, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
    CHECK(error_of([&] { hom_apply(h, outside); }) == Errc::NotInGroup);
    CHECK(error_of([&] { hom_apply(h, Matrix::identity(ring_field(5), 2)); }) == Errc::ShapeMismatch);
}

TEST_CASE("conjugated Frobenius is not entrywise but still a homomorphism") {
    const auto t = tree_op(op_conjugate(77), {tree_leaf(leaf_general_linear(2, 4))});
    const auto h = hom_build(t, {1u});
    CHECK(h.shapes.back() == HomShape::General);
    CompiledTree ct(t);
    const auto sigma = make_automorphism(ring_field(4), {1});
    Rng rng(2);
    for (int it = 0; it < 10; ++it) {
        const Matrix a = leaf_random_element(leaf_general_linear(2, 4), rng);
        CHECK(hom_apply(h, ct.leaf_embed(0, a)) == ct.leaf_embed(0, entrywise_frobenius(a, sigma)));
    }
}

TEST_CASE("random homomorphisms respect products and the generator table") {
    const auto opt = small_options();
    int built = 0, general = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto t = tree_random(70, seed, opt);
        Rng rng(seed * 7919);
        std::vector<LeafHom> choices;
        for (std::size_t l : t.leaves()) choices.push_back(random_choice(t, l, rng));
        HomSpec h;
        try {
            h = hom_build(t, choices);
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::UnsupportedDecomposition);
            // fall back to one uniform choice, always well defined
            std::vector<LeafHom> uniform(choices.size(), std::nullopt);
            h = hom_build(t, uniform);
        }
        ++built;
        if (h.shapes.back() == HomShape::General) ++general;
        HomEvaluator f(h);
        CompiledTree src(t);
        const auto& gens = src.generators(src.root());
        REQUIRE(gens.size() == h.gen_images.size());
        try {
            for (std::size_t k = 0; k < gens.size(); ++k) CHECK(f.apply(gens[k]) == h.gen_images[k]);
            Trapdoor image(h.image_tree);
            for (int it = 0; it < 5; ++it) {
                const Matrix a = random_word(gens, rng, 6), b = random_word(gens, rng, 6);
                const Matrix fa = f.apply(a), fb = f.apply(b);
                CHECK(f.apply(mat_mul(a, b)) == mat_mul(fa, fb));
                CHECK(image.membership(fa).accepted);
            }
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::UnsupportedDecomposition);
            // tensor scalar search over large unit groups
        }
    }
    CHECK(built == 60);
    CHECK(general > 10);
}
