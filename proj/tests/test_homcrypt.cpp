#include "doctest.h"
#include "mgc/error.hpp"
#include "mgc/homcrypt.hpp"

using namespace mgc;

namespace {

FreeWord w2(std::vector<int> l) { return FreeWord(2, std::move(l)); }

FreeWord random_message(unsigned k, std::size_t max_len, Rng& rng) {
    std::vector<int> l;
    const std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        int x = int(rng.below(k)) + 1;
        l.push_back(rng.coin(0.5) ? x : -x);
    }
    return FreeWord(k, l);
}

std::vector<Presentation> fixtures() { return {klein_four(), symmetric3(), symmetric3_k3(), dihedral8()}; }

}  // namespace

TEST_CASE("fixtures and relator sampling") {
    for (const auto& p : fixtures()) {
        Rng rng(p.k * 31 + p.relations.size());
        for (int it = 0; it < 200; ++it) {
            const std::size_t target = rng.below(10);
            const FreeWord r = sample_relator(p, target, rng);
            CHECK(r.length() <= 4 * target);
            CHECK(model_eval(p, r).is_identity());
        }
        Rng a(9), b(9);
        CHECK(sample_relator(p, 6, a) == sample_relator(p, 6, b));
    }
    Presentation free2;
    free2.k = 2;
    Rng rng(1);
    CHECK(sample_relator(free2, 5, rng).empty());

    Presentation bad = klein_four();
    bad.relations.push_back(w2({1}));
    CHECK_THROWS_AS(presentation_validate(bad), Error);
}

TEST_CASE("hand-built keys") {
    const FreeWord eps = w2({});
    SUBCASE("identity key is transparent") {
        const auto [pk, sk] = hc_keygen_with(klein_four(), {0, 1}, {eps, eps}, {eps, eps});
        CHECK(pk.x_words == std::vector<FreeWord>{w2({1}), w2({2})});
        CHECK(pk.f_table == std::vector<unsigned>{0, 1});
        const FreeWord m = w2({1, 2, -1, 2});
        CHECK(hc_encrypt_with(pk, m, {eps, eps, eps, eps}, {eps, eps, eps, eps}) == m);
        CHECK(hc_decrypt(sk, m) == m);
    }
    SUBCASE("Klein four with a swap") {
        const auto [pk, sk] = hc_keygen_with(klein_four(), {1, 0}, {w2({1, 1}), eps}, {eps, w2({2, 2})});
        CHECK(pk.x_words == std::vector<FreeWord>{w2({2, 2, 2}), w2({1, 1, 1})});
        CHECK(hc_key_consistent(pk, sk));
        // s_1 = y_1 y_2 y_1^-1 y_2^-1 reproduces the documented ciphertext
        const FreeWord c = hc_encrypt_with(pk, w2({1}), {w2({1, 2, -1, -2})}, {eps});
        CHECK(c == w2({2, 2, 2, 1, 1, 1, -2, -2, -2, -1, -1, -1, 2, 2, 2}));
        const FreeWord d = hc_decrypt(sk, c);
        CHECK(d == w2({1, 1, 1, 2, 2, 2, -1, -1, -1, -2, -2, -2, 1, 1, 1}));
        CHECK(model_eval(pk.presentation, d) == model_eval(pk.presentation, w2({1})));
        CHECK(hc_decrypt(sk, w2({1, 2})) == w2({2, 1}));
    }
    SUBCASE("degenerate keys") {
        // r_1 = y_1^-1 wipes out y_1
        CHECK_THROWS_AS(hc_keygen_with(klein_four(), {0, 1}, {w2({-1}), eps}, {eps, eps}), Error);
        try {
            hc_keygen_with(klein_four(), {0, 1}, {w2({-1}), eps}, {eps, eps});
        } catch (const Error& e) {
            CHECK(e.code() == Errc::DegenerateKey);
        }
    }
}

TEST_CASE("round trip and homomorphic property") {
    int failures = 0;
    for (const auto& p : fixtures()) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto [pk, sk] = hc_keygen(p, seed);
            CHECK(hc_key_consistent(pk, sk));
            const auto again = hc_keygen(p, seed);
            CHECK(again.first.x_words == pk.x_words);
            CHECK(again.second.sigma == sk.sigma);
            Rng rng(seed * 1000 + p.k);
            for (int it = 0; it < 100; ++it) {
                const FreeWord m1 = random_message(p.k, 20, rng), m2 = random_message(p.k, 20, rng);
                const FreeWord c1 = hc_encrypt(pk, m1, rng.next()), c2 = hc_encrypt(pk, m2, rng.next());
                if (!(model_eval(p, hc_decrypt(sk, c1)) == model_eval(p, m1))) ++failures;
                if (!(model_eval(p, hc_decrypt(sk, fw_mul(c1, c2))) == model_eval(p, fw_mul(m1, m2)))) ++failures;
            }
            const FreeWord m = random_message(p.k, 20, rng);
            CHECK(hc_encrypt(pk, m, 77) == hc_encrypt(pk, m, 77));
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("ciphertext length grows linearly in the message") {
    for (const auto& p : fixtures()) {
        const auto [pk, sk] = hc_keygen(p, 3);
        std::size_t xmax = 0;
        for (const auto& x : pk.x_words) xmax = std::max(xmax, x.length());
        // each letter becomes s y s' (at most 16k + 1 letters) with every letter an x_word
        const std::size_t per_letter = (16 * p.k + 1) * xmax;
        Rng rng(4);
        double worst = 0;
        for (std::size_t t = 1; t <= 40; ++t) {
            std::vector<int> l(t, 1);
            const FreeWord c = hc_encrypt(pk, FreeWord(p.k, l), rng.next());
            CHECK(c.length() <= per_letter * t);
            worst = std::max(worst, double(c.length()) / double(t));
        }
        MESSAGE("k=" << p.k << " max |x_word|=" << xmax << " worst |C|/t=" << worst);
    }
    CHECK_THROWS_AS(hc_encrypt(hc_keygen(klein_four(), 1).first, FreeWord(3, {3}), 1), Error);
}
