#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mgc/matrix.hpp"

namespace mgc {

/// Freely reduced word over letters +-1..+-alphabet.
class FreeWord {
public:
    FreeWord() = default;
    explicit FreeWord(unsigned alphabet, std::vector<int> letters = {});

    static FreeWord letter(unsigned alphabet, int l) { return FreeWord(alphabet, {l}); }

    unsigned alphabet() const { return alphabet_; }
    const std::vector<int>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    bool operator==(const FreeWord& o) const = default;

    /// Space separated power notation with the given letter names, e.g. "a^2 b^-1".
    std::string to_string(const std::vector<std::string>& names = {}) const;

private:
    unsigned alphabet_ = 1;
    std::vector<int> letters_;
};

FreeWord fw_mul(const FreeWord& a, const FreeWord& b);
FreeWord fw_inv(const FreeWord& a);
/// a^{-1} b^{-1} a b
FreeWord fw_commutator(const FreeWord& a, const FreeWord& b);
FreeWord fw_pow(const FreeWord& a, long e);
/// Replaces letter i by images[i-1] (inverse letters by inverse images).
FreeWord fw_substitute(const FreeWord& w, const std::vector<FreeWord>& images);
/// Evaluates w on matrices (letter i -> gens[i-1]).
Matrix fw_eval(const FreeWord& w, const std::vector<Matrix>& gens);

// Two-letter alphabet used by identity word pairs.
inline constexpr int kUA = 1;
inline constexpr int kUB = 2;

/// W_A and W_B with their run-length schedules: W_A = u_A^{a_1} u_B^{b_1} ... u_A^{a_m}
/// and W_B = u_B^{b_1} u_A^{a_1} ... u_B^{b_m}. A leading zero exponent is kept
/// when the word starts with the other letter.
struct IdentityWordPair {
    FreeWord wa, wb;
    std::vector<long> schedule_a, schedule_b;
};

/// Run-length exponents of w, starting with the exponent of `first`.
std::vector<long> schedule_of(const FreeWord& w, int first);
/// Inverse of schedule_of.
FreeWord word_from_schedule(const std::vector<long>& schedule, int first);

/// schedule_of, padded with a trailing 0 so the schedule ends on `first`.
std::vector<long> padded_schedule(const FreeWord& w, int first);

/// True when wa ends in a nonzero power of u_A and wb in one of u_B.
bool terminal_letters_ok(const FreeWord& wa, const FreeWord& wb);

IdentityWordPair make_pair_from_words(const FreeWord& wa, const FreeWord& wb);

/// W_{A,n}, W_{B,n}: start from (u_B u_A, u_A u_B) and substitute
/// u_A -> [W_1, W_2], u_B -> [W_3, W_4] a total of n - 1 times.
/// The default inner words give [u_B, u_A] and [u_A^{-1}, u_B^{-1}]. Explicit
/// inner words are held to the terminal-letter condition; the default words
/// are returned as built (W_B ends in u_A^{-1} when 3 divides n).
IdentityWordPair build_solvable_pair(unsigned n, const std::optional<std::array<FreeWord, 4>>& inner = std::nullopt);

/// (u_A u_B)^{m-1} u_A and u_B^{-1}: prefix and inverted suffix of (u_A u_B)^m.
IdentityWordPair build_exponent_pair(unsigned m);

struct PairReport {
    bool w1 = false;
    bool w2 = true;
    std::size_t trials = 0;
    std::optional<std::pair<Matrix, Matrix>> counterexample;
    std::size_t distinct_values = 0;
    std::vector<std::string> warnings;
};

/// Samples (g_A, g_B) as random words in the given generators.
PairReport validate_pair(const IdentityWordPair& pair, const std::vector<Matrix>& gens_A,
                         const std::vector<Matrix>& gens_B, std::size_t trials, std::uint64_t seed);

/// Random word of the given length in `count` generators (no immediate cancellation).
GroupWord random_group_word(std::size_t count, std::size_t length, Rng& rng);

}  // namespace mgc
