#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mgc/rng.hpp"
#include "mgc/words.hpp"

namespace mgc {

/// <y_1..y_k ; relations>, optionally with a finite model: images of the
/// y_i that satisfy every relation.
struct Presentation {
    unsigned k = 2;
    std::vector<FreeWord> relations;
    std::optional<std::vector<Matrix>> model;
};

/// Throws InvalidArgument (k < 2, alphabet mismatch, or a relation that the
/// model does not satisfy).
void presentation_validate(const Presentation& p);
/// Image of w in the model; throws InvalidArgument without one.
Matrix model_eval(const Presentation& p, const FreeWord& w);

Presentation klein_four();
/// <y_1, y_2 ; y_1^2, y_2^2, (y_1 y_2)^3> with permutation matrices.
Presentation symmetric3();
/// S_3 on three transpositions, y_3 = y_1 y_2 y_1.
Presentation symmetric3_k3();
/// <y_1, y_2 ; y_1^4, y_2^2, (y_1 y_2)^2> over GF(3).
Presentation dihedral8();

/// Product of conjugated relators w^-1 r^{+-1} w of reduced length at most
/// 4 * target_length; the empty word when there are no relations.
FreeWord sample_relator(const Presentation& p, std::size_t target_length, Rng& rng);

struct HomPublicKey {
    Presentation presentation;
    /// x_words[i] is the preimage attached to y_{f_table[i] + 1}.
    std::vector<FreeWord> x_words;
    std::vector<unsigned> f_table;
};

struct HomSecretKey {
    /// sigma[i] = j means y_{i+1} -> y_{j+1}.
    std::vector<unsigned> sigma;
};

/// phi_sigma: letterwise y -> y^sigma.
FreeWord apply_sigma(const std::vector<unsigned>& sigma, const FreeWord& w);
std::vector<unsigned> perm_inverse_u(const std::vector<unsigned>& sigma);

/// Key with explicit choices: x_word(y_i) = phi_sigma^-1(r_i y_i r'_i).
/// Throws DegenerateKey when an x_word is empty or two coincide.
std::pair<HomPublicKey, HomSecretKey> hc_keygen_with(const Presentation& p, const std::vector<unsigned>& sigma,
                                                      const std::vector<FreeWord>& r, const std::vector<FreeWord>& r2);

/// Random sigma and paddings of target length in [k, 2k]; retries 64 times
/// before DegenerateKey.
std::pair<HomPublicKey, HomSecretKey> hc_keygen(const Presentation& p, std::uint64_t seed);

/// f^-1 on a word over Y: every letter replaced by its x_word.
FreeWord hc_substitute(const HomPublicKey& pk, const FreeWord& w);

/// E(M) with explicit paddings s_j, s'_j per message letter.
FreeWord hc_encrypt_with(const HomPublicKey& pk, const FreeWord& m, const std::vector<FreeWord>& s,
                         const std::vector<FreeWord>& s2);
/// Throws IndexOutOfRange when M uses letters outside Y.
FreeWord hc_encrypt(const HomPublicKey& pk, const FreeWord& m, std::uint64_t seed);

FreeWord hc_decrypt(const HomSecretKey& sk, const FreeWord& c);

/// phi_sigma(x_word) read back through f_table lands on the right y in the model.
bool hc_key_consistent(const HomPublicKey& pk, const HomSecretKey& sk);

}  // namespace mgc
