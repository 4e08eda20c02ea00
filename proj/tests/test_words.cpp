#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"
#include "mgc/words.hpp"

using namespace mgc;

namespace {

FreeWord w2(std::vector<int> l) { return FreeWord(2, std::move(l)); }

// Independent reduction oracle: repeatedly delete the first cancelling pair.
std::vector<int> naive_reduce(std::vector<int> v) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i] == -v[i + 1]) {
                v.erase(v.begin() + static_cast<long>(i), v.begin() + static_cast<long>(i) + 2);
                changed = true;
                break;
            }
    }
    return v;
}

std::vector<int> random_letters(Rng& rng, unsigned alphabet, size_t max_len) {
    std::vector<int> v(rng.below(max_len + 1));
    for (auto& l : v) {
        l = static_cast<int>(rng.below(alphabet)) + 1;
        if (rng.coin(0.5)) l = -l;
    }
    return v;
}

std::vector<Matrix> upper_triangular_sample(const Ring& R, Rng& rng) {
    Matrix m(R, 2, 2);
    m.set(0, 0, random_unit(R, rng));
    m.set(1, 1, random_unit(R, rng));
    m.set(0, 1, random_element(R, rng));
    return {m};
}

}  // namespace

TEST_CASE("free word arithmetic examples") {
    const int A = kUA, B = kUB;
    CHECK(fw_mul(w2({A}), w2({-A})).empty());
    CHECK(fw_mul(w2({A, B}), w2({-B, A})) == w2({A, A}));
    CHECK(fw_mul(w2({A, B}), w2({B})) == w2({A, B, B}));
    CHECK(fw_inv(w2({A, B})) == w2({-B, -A}));
    CHECK(fw_inv(w2({})).empty());
    CHECK(fw_commutator(w2({B}), w2({A})) == w2({-B, -A, B, A}));
    CHECK(fw_commutator(w2({A, B}), w2({A, B})).empty());
    CHECK(fw_commutator(w2({-A}), w2({-B})) == w2({A, B, -A, -B}));
    CHECK_THROWS_AS(fw_mul(w2({A}), FreeWord(3, {3})), Error);
    CHECK_THROWS_AS(FreeWord(2, {3}), Error);
}

TEST_CASE("free word properties") {
    Rng rng(7);
    for (int t = 0; t < 500; ++t) {
        const unsigned k = 1 + static_cast<unsigned>(rng.below(4));
        auto x = random_letters(rng, k, 64), y = random_letters(rng, k, 64), z = random_letters(rng, k, 64);
        FreeWord a(k, x), b(k, y), c(k, z);
        CHECK(a.letters() == naive_reduce(x));
        CHECK(fw_mul(fw_mul(a, b), c) == fw_mul(a, fw_mul(b, c)));
        CHECK(fw_inv(fw_inv(a)) == a);
        CHECK(fw_mul(a, fw_inv(a)).empty());
        auto cat = x;
        cat.insert(cat.end(), y.begin(), y.end());
        CHECK(fw_mul(a, b).letters() == naive_reduce(cat));
    }
}

TEST_CASE("solvable pair examples") {
    auto p1 = build_solvable_pair(1);
    CHECK(p1.wa == w2({kUB, kUA}));
    CHECK(p1.wb == w2({kUA, kUB}));
    auto p2 = build_solvable_pair(2);
    CHECK(p2.wa == w2({kUA, kUB, -kUA, -kUB, -kUB, -kUA, kUB, kUA}));
    CHECK(p2.wa.length() == 8);
    auto p3 = build_solvable_pair(3);
    CHECK(p3.wa.length() == 32);
    CHECK(p3.wb.length() == 32);
    for (unsigned n = 1; n <= 6; ++n) {
        auto p = build_solvable_pair(n);
        size_t expect = 2;
        for (unsigned i = 1; i < n; ++i) expect *= 4;
        CHECK(p.wa.length() == expect);
        CHECK(p.wb.length() == expect);
        // W_A always ends in u_A; W_B ends in u_A^{-1} when 3 divides n.
        CHECK(p.wa.letters().back() == kUA);
        CHECK(terminal_letters_ok(p.wa, p.wb) == (n % 3 != 0));
        CHECK(p.schedule_a.size() % 2 == 1);
        CHECK(p.schedule_b.size() % 2 == 1);
        CHECK(word_from_schedule(p.schedule_a, kUA) == p.wa);
        CHECK(word_from_schedule(p.schedule_b, kUB) == p.wb);
    }
}

TEST_CASE("inner words are validated") {
    std::array<FreeWord, 4> bad{w2({kUA}), w2({kUA}), w2({kUB}), w2({kUB})};
    try {
        build_solvable_pair(2, bad);
        FAIL("degenerate pair accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegeneratePair);
    }
    // [u_A, u_B] ends in u_B, so W_A would end in u_B.
    std::array<FreeWord, 4> wrong_end{w2({kUA}), w2({kUB}), w2({-kUA}), w2({-kUB})};
    try {
        build_solvable_pair(2, wrong_end);
        FAIL("terminal letter violation accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TerminalLetterViolation);
    }
    std::array<FreeWord, 4> ok{w2({kUB, kUB}), w2({kUA}), w2({-kUA}), w2({kUB, kUA, -kUB})};
    auto p = build_solvable_pair(2, ok);
    CHECK(terminal_letters_ok(p.wa, p.wb));
}

TEST_CASE("exponent pair") {
    auto p1 = build_exponent_pair(1);
    CHECK(p1.wa == w2({kUA}));
    CHECK(p1.wb == w2({-kUB}));
    auto p3 = build_exponent_pair(3);
    CHECK(p3.wa == w2({kUA, kUB, kUA, kUB, kUA}));
    CHECK(p3.wb == w2({-kUB}));
    for (unsigned m = 1; m <= 8; ++m) {
        auto p = build_exponent_pair(m);
        CHECK(fw_mul(p.wa, fw_inv(p.wb)) == fw_pow(w2({kUA, kUB}), m));
    }
    // C_3 inside Z_7^*: 2 has order 3.
    auto z7 = ring_integer_residue(7);
    auto g = Matrix::from_ints(z7, {{2}});
    CHECK(fw_eval(p3.wa, {g, g}) == fw_eval(p3.wb, {g, g}));
    CHECK(fw_eval(p3.wa, {g, g}) == Matrix::from_ints(z7, {{4}}));
}

TEST_CASE("solvable pairs are identities on upper triangular matrices") {
    for (u64 p : {5ULL, 7ULL, 11ULL}) {
        auto R = ring_integer_residue(p);
        Rng rng(p);
        for (unsigned n = 2; n <= 4; ++n) {
            auto pair = build_solvable_pair(n);
            for (int t = 0; t < 40; ++t) {
                auto g = upper_triangular_sample(R, rng)[0], h = upper_triangular_sample(R, rng)[0];
                CHECK(fw_eval(pair.wa, {g, h}) == fw_eval(pair.wb, {g, h}));
            }
        }
    }
}

TEST_CASE("validate_pair reports") {
    auto z5 = ring_integer_residue(5);
    std::vector<Matrix> ga{Matrix::from_ints(z5, {{1, 1}, {0, 1}}), Matrix::from_ints(z5, {{2, 0}, {0, 1}})};
    std::vector<Matrix> gb{Matrix::from_ints(z5, {{1, 2}, {0, 3}})};
    auto rep = validate_pair(build_solvable_pair(2), ga, gb, 50, 1);
    CHECK(rep.w1);
    CHECK(rep.w2);
    CHECK(rep.distinct_values >= 2);

    std::vector<Matrix> na{Matrix::from_ints(z5, {{1, 1}, {0, 1}})}, nb{Matrix::from_ints(z5, {{1, 0}, {1, 1}})};
    auto bad = validate_pair(build_solvable_pair(1), na, nb, 50, 2);
    CHECK_FALSE(bad.w2);
    REQUIRE(bad.counterexample.has_value());
    const auto& [g, h] = *bad.counterexample;
    CHECK_FALSE(mat_mul(g, h) == mat_mul(h, g));

    std::vector<Matrix> id{Matrix::identity(z5, 2)};
    auto triv = validate_pair(build_solvable_pair(2), id, id, 20, 3);
    CHECK(triv.distinct_values == 1);
    REQUIRE_FALSE(triv.warnings.empty());
    CHECK(triv.warnings.back() == "fewer than two key values");
}

TEST_CASE("schedules") {
    auto w = w2({kUB, kUB, kUA, -kUB, kUA, kUA});
    auto s = schedule_of(w, kUA);
    CHECK(s == std::vector<long>{0, 2, 1, -1, 2});
    CHECK(word_from_schedule(s, kUA) == w);
    CHECK(w.to_string({"a", "b"}) == "b^2 a b^-1 a^2");
}
