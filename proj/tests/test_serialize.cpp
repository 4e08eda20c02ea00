#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"
#include "mgc/serialize.hpp"

using namespace mgc;

namespace {

template <class F>
std::optional<Errc> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

// value -> bytes -> value -> bytes must reproduce the bytes
template <class T, class Load>
void round_trip(const T& v, Load&& load) {
    const std::string a = dump(to_json(v));
    const auto back = load(parse_json(a));
    CHECK(dump(to_json(back)) == a);
}

TreeGenOptions options() {
    TreeGenOptions o;
    o.max_degree = 12;
    o.max_leaf_degree = 3;
    o.max_arity = 2;
    o.max_field = 64;
    return o;
}

}  // namespace

TEST_CASE("rings, elements and matrices") {
    const Ring z15 = ring_integer_residue(15);
    CHECK(dump(to_json(ring_field(4))) == R"({"summands":[{"p":2,"m":1,"r":2,"modulus":[1,1,1]}]})");
    const Matrix m = Matrix::from_ints(z15, {{1, 10}, {0, 1}});
    CHECK(dump(to_json(m)) ==
          R"({"n":2,"ring":{"summands":[{"p":3,"m":1,"r":1,"modulus":[0,1]},{"p":5,"m":1,"r":1,"modulus":[0,1]}]},)"
          R"("rows":[[[[1],[1]],[[1],[0]]],[[[0],[0]],[[1],[1]]]]})");
    CHECK(matrix_from_json(parse_json(dump(to_json(m)))) == m);

    Rng rng(3);
    for (const Ring& r : {ring_galois(2, 2, 2), ring_field(9), z15, ring_direct_sum({ring_field(4), ring_field(9)})}) {
        for (int it = 0; it < 20; ++it) {
            const Matrix a = random_matrix(r, 1 + rng.below(3), 1 + rng.below(3), rng);
            round_trip(a, matrix_from_json);
            CHECK(matrix_from_json(parse_json(dump(to_json(a)))) == a);
        }
    }
    CHECK(error_of([] { parse_json("{not json"); }) == Errc::ParseError);
    CHECK(error_of([] { matrix_from_json(parse_json(R"({"n":2})")); }) == Errc::ParseError);
    // coefficient 7 is out of range mod 5
    CHECK(error_of([] {
              matrix_from_json(
                  parse_json(R"({"n":1,"ring":{"summands":[{"p":5,"m":1,"r":1,"modulus":[0,1]}]},"rows":[[[[7]]]]})"));
          }).has_value());
    // summands out of canonical order
    CHECK(error_of([] {
              ring_from_json(parse_json(
                  R"({"summands":[{"p":5,"m":1,"r":1,"modulus":[0,1]},{"p":3,"m":1,"r":1,"modulus":[0,1]}]})"));
          }) == Errc::ParseError);
}

TEST_CASE("words") {
    const FreeWord w(3, {1, -2, 3});
    CHECK(dump(to_json(w)) == "[1,-2,3]");
    CHECK(word_from_json(3, parse_json("[1,-2,3]")) == w);
    CHECK(error_of([] { word_from_json(2, parse_json("[3]")); }) == Errc::ParseError);
    CHECK(error_of([] { word_from_json(2, parse_json("[1,-1]")); }) == Errc::ParseError);
    for (unsigned n = 1; n <= 4; ++n) round_trip(build_solvable_pair(n), pair_from_json);
    CHECK(group_word_from_json(parse_json(dump(group_word_to_json({2, -1, 1})))) == GroupWord{2, -1, 1});
}

TEST_CASE("trees, instances and homomorphisms") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto t = tree_random(120, seed, options());
        round_trip(t, tree_from_json);
        CHECK(tree_from_json(parse_json(dump(to_json(t)))) == t);
        const auto inst = tree_eval(t);
        const std::string pub = dump(to_json(inst, true));
        const auto back = instance_from_json(parse_json(pub));
        CHECK(dump(to_json(back, true)) == pub);
        CHECK(back.provenance == inst.provenance);
        CHECK(back.gens == inst.gens);

        std::vector<LeafHom> choices;
        for (auto l : t.leaves()) choices.push_back(seed % 3 == 0 ? LeafHom{} : LeafHom{0u});
        try {
            const auto h = hom_build(t, choices);
            round_trip(h, hom_from_json);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::UnsupportedDecomposition);
        }

        Rng rng(seed);
        const Matrix g = word_eval(inst.gens, random_group_word(inst.gens.size(), 5, rng));
        const auto v = membership(t, g);
        REQUIRE(v.witness);
        round_trip(*v.witness, witness_from_json);
        const Witness w = witness_from_json(parse_json(dump(to_json(*v.witness))));
        CHECK(witness_replay(CompiledTree(t), w) == g);
    }
    // tampered derived fields are rejected
    const auto t = tree_leaf(leaf_general_linear(2, 4));
    Json j = to_json(hom_build(t, {1u}));
    j["shapes"][0] = "Trivial";
    CHECK(error_of([&] { hom_from_json(j); }) == Errc::ParseError);
    // ill-typed trees keep their own error code
    Json bad = to_json(tree_op(op_direct(), {tree_leaf(leaf_general_linear(2, 3)), tree_leaf(leaf_general_linear(2, 3))}));
    bad["nodes"][1]["leaf"]["n"] = 3;
    CHECK(error_of([&] { tree_from_json(bad); }) == Errc::TypeError);
}

TEST_CASE("transcripts and keys") {
    const auto gens = leaf_generators(leaf_general_linear(2, 3));
    std::vector<PartyConfig> ps;
    for (int i = 0; i < 4; ++i) ps.push_back({gens, {1, 2, i % 3 + 1}});
    const auto r = multiparty_run(ps);
    round_trip(r.transcript, transcript_from_json);
    CHECK(transcript_from_json(parse_json(dump(to_json(r.transcript)))) == r.transcript);

    for (const auto& p : {klein_four(), symmetric3(), dihedral8()}) {
        const auto [pk, sk] = hc_keygen(p, 5);
        round_trip(pk, public_key_from_json);
        round_trip(sk, secret_key_from_json);
        CHECK(public_key_from_json(to_json(pk)).x_words == pk.x_words);
    }
    CHECK(error_of([] { secret_key_from_json(parse_json(R"({"sigma":[0,0]})")); }) == Errc::ParseError);
}

TEST_CASE("fingerprints") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const Matrix a = Matrix::from_ints(ring_field(5), {{3, 1}, {4, 0}});
    CHECK(fingerprint(a).size() == 64);
    CHECK(fingerprint(a) == fingerprint(Matrix::from_ints(ring_field(5), {{3, 1}, {4, 0}})));
    CHECK(fingerprint(a) != fingerprint(Matrix::identity(ring_field(5), 2)));
}
