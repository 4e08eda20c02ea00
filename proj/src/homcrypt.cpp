#include "mgc/homcrypt.hpp"

#include <algorithm>
#include <set>

#include "mgc/error.hpp"

namespace mgc {

namespace {

constexpr int kKeyRetries = 64;

FreeWord random_reduced(unsigned k, std::size_t len, Rng& rng) {
    std::vector<int> out;
    while (out.size() < len) {
        int l = int(rng.below(k)) + 1;
        if (rng.coin(0.5)) l = -l;
        if (!out.empty() && out.back() == -l) continue;
        out.push_back(l);
    }
    return FreeWord(k, out);
}

void check_perm(const std::vector<unsigned>& sigma, unsigned k) {
    if (sigma.size() != k) fail(Errc::InvalidArgument, "sigma must permute all k generators");
    std::vector<bool> seen(k, false);
    for (unsigned j : sigma) {
        if (j >= k || seen[j]) fail(Errc::InvalidArgument, "sigma is not a permutation");
        seen[j] = true;
    }
}

void check_letters(const FreeWord& w, unsigned k) {
    for (int l : w.letters())
        if (unsigned(l < 0 ? -l : l) > k)
            fail(Errc::IndexOutOfRange, "letter " + std::to_string(l) + " outside Y");
}

Presentation make(unsigned k, std::vector<std::vector<int>> rels, std::vector<Matrix> model) {
    Presentation p;
    p.k = k;
    for (auto& r : rels) p.relations.emplace_back(k, std::move(r));
    p.model = std::move(model);
    presentation_validate(p);
    return p;
}

}  // namespace

void presentation_validate(const Presentation& p) {
    if (p.k < 2) fail(Errc::InvalidArgument, "presentations need k >= 2");
    for (const auto& r : p.relations)
        if (r.alphabet() != p.k) fail(Errc::InvalidArgument, "relation over a different alphabet");
    if (!p.model) return;
    if (p.model->size() != p.k) fail(Errc::InvalidArgument, "model needs one image per generator");
    for (const auto& r : p.relations)
        if (!fw_eval(r, *p.model).is_identity())
            fail(Errc::InvalidArgument, "model does not satisfy relation " + r.to_string());
}

Matrix model_eval(const Presentation& p, const FreeWord& w) {
    if (!p.model) fail(Errc::InvalidArgument, "presentation has no model");
    check_letters(w, p.k);
    return word_eval(*p.model, w.letters());
}

Presentation klein_four() {
    const Ring f = ring_field(3);
    return make(2, {{1, 1}, {2, 2}, {-1, -2, 1, 2}},
                {Matrix::from_ints(f, {{2, 0}, {0, 1}}), Matrix::from_ints(f, {{1, 0}, {0, 2}})});
}

Presentation symmetric3() {
    const Ring f = ring_field(3);
    return make(2, {{1, 1}, {2, 2}, {1, 2, 1, 2, 1, 2}},
                {Matrix::from_ints(f, {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}),
                 Matrix::from_ints(f, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}})});
}

Presentation symmetric3_k3() {
    const Ring f = ring_field(3);
    return make(3, {{1, 1}, {2, 2}, {3, 3}, {1, 2, 1, 2, 1, 2}, {-3, 1, 2, 1}},
                {Matrix::from_ints(f, {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}),
                 Matrix::from_ints(f, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}),
                 Matrix::from_ints(f, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}})});
}

Presentation dihedral8() {
    const Ring f = ring_field(3);
    return make(2, {{1, 1, 1, 1}, {2, 2}, {1, 2, 1, 2}},
                {Matrix::from_ints(f, {{0, 2}, {1, 0}}), Matrix::from_ints(f, {{1, 0}, {0, 2}})});
}

FreeWord sample_relator(const Presentation& p, std::size_t target_length, Rng& rng) {
    FreeWord word(p.k);
    if (p.relations.empty() || target_length == 0) return word;
    const std::size_t limit = 4 * target_length;
    const std::size_t attempts = 8 * target_length + 16;
    for (std::size_t a = 0; a < attempts && word.length() < target_length; ++a) {
        FreeWord r = p.relations[rng.below(p.relations.size())];
        if (rng.coin(0.5)) r = fw_inv(r);
        const FreeWord w = random_reduced(p.k, rng.below(target_length / 2 + 1), rng);
        FreeWord cand = fw_mul(word, fw_mul(fw_inv(w), fw_mul(r, w)));
        if (cand.length() <= limit) word = std::move(cand);
    }
    return word;
}

std::vector<unsigned> perm_inverse_u(const std::vector<unsigned>& sigma) {
    std::vector<unsigned> inv(sigma.size());
    for (unsigned i = 0; i < sigma.size(); ++i) inv[sigma[i]] = i;
    return inv;
}

FreeWord apply_sigma(const std::vector<unsigned>& sigma, const FreeWord& w) {
    std::vector<int> out;
    out.reserve(w.length());
    for (int l : w.letters()) {
        const unsigned a = unsigned(l < 0 ? -l : l);
        if (a > sigma.size()) fail(Errc::IndexOutOfRange, "letter outside the permuted alphabet");
        const int img = int(sigma[a - 1]) + 1;
        out.push_back(l < 0 ? -img : img);
    }
    return FreeWord(w.alphabet(), out);
}

std::pair<HomPublicKey, HomSecretKey> hc_keygen_with(const Presentation& p, const std::vector<unsigned>& sigma,
                                                      const std::vector<FreeWord>& r, const std::vector<FreeWord>& r2) {
    presentation_validate(p);
    check_perm(sigma, p.k);
    if (r.size() != p.k || r2.size() != p.k) fail(Errc::InvalidArgument, "one padding pair per generator");
    const auto inv = perm_inverse_u(sigma);
    HomPublicKey pk;
    pk.presentation = p;
    std::set<std::vector<int>> seen;
    for (unsigned i = 0; i < p.k; ++i) {
        const FreeWord mid = fw_mul(r[i], fw_mul(FreeWord::letter(p.k, int(i) + 1), r2[i]));
        FreeWord x = apply_sigma(inv, mid);
        if (x.empty()) fail(Errc::DegenerateKey, "x_word " + std::to_string(i + 1) + " reduces to the empty word");
        if (!seen.insert(x.letters()).second) fail(Errc::DegenerateKey, "two x_words coincide");
        pk.x_words.push_back(std::move(x));
        pk.f_table.push_back(i);
    }
    return {std::move(pk), HomSecretKey{sigma}};
}

std::pair<HomPublicKey, HomSecretKey> hc_keygen(const Presentation& p, std::uint64_t seed) {
    presentation_validate(p);
    Rng rng(seed);
    for (int attempt = 0; attempt < kKeyRetries; ++attempt) {
        std::vector<unsigned> sigma(p.k);
        for (unsigned i = 0; i < p.k; ++i) sigma[i] = i;
        rng.shuffle(sigma);
        std::vector<FreeWord> r, r2;
        for (unsigned i = 0; i < p.k; ++i) {
            r.push_back(sample_relator(p, std::size_t(rng.between(p.k, 2 * p.k)), rng));
            r2.push_back(sample_relator(p, std::size_t(rng.between(p.k, 2 * p.k)), rng));
        }
        try {
            return hc_keygen_with(p, sigma, r, r2);
        } catch (const Error& e) {
            if (e.code() != Errc::DegenerateKey) throw;
        }
    }
    fail(Errc::DegenerateKey, "no usable key after " + std::to_string(kKeyRetries) + " attempts");
}

FreeWord hc_substitute(const HomPublicKey& pk, const FreeWord& w) {
    check_letters(w, pk.presentation.k);
    std::vector<FreeWord> images(pk.presentation.k, FreeWord(pk.presentation.k));
    for (std::size_t i = 0; i < pk.x_words.size(); ++i) images[pk.f_table[i]] = pk.x_words[i];
    return fw_substitute(w, images);
}

FreeWord hc_encrypt_with(const HomPublicKey& pk, const FreeWord& m, const std::vector<FreeWord>& s,
                         const std::vector<FreeWord>& s2) {
    const unsigned k = pk.presentation.k;
    check_letters(m, k);
    if (s.size() != m.length() || s2.size() != m.length())
        fail(Errc::InvalidArgument, "one padding pair per message letter");
    FreeWord c(k);
    for (std::size_t j = 0; j < m.length(); ++j) {
        const FreeWord piece = fw_mul(s[j], fw_mul(FreeWord::letter(k, m.letters()[j]), s2[j]));
        c = fw_mul(c, hc_substitute(pk, piece));
    }
    return c;
}

FreeWord hc_encrypt(const HomPublicKey& pk, const FreeWord& m, std::uint64_t seed) {
    const unsigned k = pk.presentation.k;
    check_letters(m, k);
    Rng rng(seed);
    std::vector<FreeWord> s, s2;
    for (std::size_t j = 0; j < m.length(); ++j) {
        s.push_back(sample_relator(pk.presentation, std::size_t(rng.between(k, 2 * k)), rng));
        s2.push_back(sample_relator(pk.presentation, std::size_t(rng.between(k, 2 * k)), rng));
    }
    return hc_encrypt_with(pk, m, s, s2);
}

FreeWord hc_decrypt(const HomSecretKey& sk, const FreeWord& c) { return apply_sigma(sk.sigma, c); }

bool hc_key_consistent(const HomPublicKey& pk, const HomSecretKey& sk) {
    const auto& p = pk.presentation;
    for (std::size_t i = 0; i < pk.x_words.size(); ++i) {
        const FreeWord img = apply_sigma(sk.sigma, pk.x_words[i]);
        if (!(model_eval(p, img) == (*p.model)[pk.f_table[i]])) return false;
    }
    return true;
}

}  // namespace mgc
