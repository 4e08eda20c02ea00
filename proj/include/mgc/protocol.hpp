#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgc/instance.hpp"
#include "mgc/words.hpp"

namespace mgc {

/// One public message. Payloads are matrices only; secrets never travel.
struct TranscriptRecord {
    unsigned round = 0;
    std::string sender, receiver, kind;
    std::vector<Matrix> payload;
    bool operator==(const TranscriptRecord&) const = default;
};

struct Transcript {
    std::vector<TranscriptRecord> records;
    bool operator==(const Transcript&) const = default;
};

// --- two parties -----------------------------------------------------------------

struct AagConfig {
    GroupInstance instance;
    std::vector<Matrix> gens_A, gens_B;
    GroupWord word_A, word_B;
};

struct AagResult {
    Matrix key_A, key_B;
    Transcript transcript;
    std::vector<std::string> warnings;
};

/// Both sides derive [a, b] = a^-1 b^-1 a b from the exchanged conjugated
/// generator lists. Throws IndexOutOfRange for bad secret words.
AagResult aag_run(const AagConfig& cfg);

// --- s parties ---------------------------------------------------------------------

struct PartyConfig {
    std::vector<Matrix> gens;
    GroupWord word;
};

struct MultiPartyResult {
    std::vector<Matrix> keys;
    Transcript transcript;
    /// Group multiplications and inversions spent on the party's own keys.
    std::vector<std::size_t> op_counts;
    /// Work spent answering conjugation queries of the other half.
    std::vector<std::size_t> service_counts;
    std::vector<std::string> warnings;
};

/// Recursive halving (ceil/floor split); the key of a set is [K_1, K_2] of
/// its halves and a single party's key is its secret. Queries to the other
/// half go to its lowest-index party. Throws BadPartyCount when s < 2.
MultiPartyResult multiparty_run(const std::vector<PartyConfig>& parties);

/// Party i recomputes its key from its secret and the messages addressed to
/// it in the transcript alone.
Matrix multiparty_replay(const Transcript& t, std::size_t party, std::size_t s, const PartyConfig& cfg);

std::string party_name(std::size_t i);

// --- generalized Diffie-Hellman ------------------------------------------------------

/// Right multiplication of k x n matrices by the group, or x -> x^e on Z_p^*
/// with group elements 1 x 1 matrices over Z_{p-1} (units).
struct GdhAction {
    enum class Kind { RightMultiply, Power } kind = Kind::RightMultiply;
    u64 p = 0;

    static GdhAction right_multiply() { return {}; }
    static GdhAction power(u64 p) { return {Kind::Power, p}; }

    Matrix act(const Matrix& x, const Matrix& g) const;
};

struct GdhConfig {
    GdhAction action;
    IdentityWordPair pair;
    Matrix x0;
    std::vector<Matrix> gens_A, gens_B;
    GroupWord word_A, word_B;
};

struct GdhResult {
    Matrix key_A, key_B;
    bool agree = false;
    Transcript transcript;
    std::vector<std::string> warnings;
};

/// Alternating rounds driven by the padded exponent schedules. Throws
/// ScheduleMismatch when the two chains have different round counts.
GdhResult gdh_run(const GdhConfig& cfg);

/// Elements of Z_{p-1}^* and Z_p^* as 1 x 1 matrices for the power action.
Matrix power_exponent(u64 p, u64 e);
Matrix power_point(u64 p, u64 x);

}  // namespace mgc
