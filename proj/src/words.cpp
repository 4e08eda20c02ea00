#include "mgc/words.hpp"

#include <sstream>
#include <unordered_set>

#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

FreeWord::FreeWord(unsigned alphabet, std::vector<int> letters) : alphabet_(alphabet) {
    if (alphabet == 0) fail(Errc::InvalidArgument, "alphabet must be nonempty");
    letters_.reserve(letters.size());
    for (int l : letters) {
        if (l == 0 || static_cast<unsigned>(l < 0 ? -l : l) > alphabet)
            fail(Errc::IndexOutOfRange, "letter " + std::to_string(l) + " outside the alphabet");
        if (!letters_.empty() && letters_.back() == -l) {
            letters_.pop_back();
        } else {
            letters_.push_back(l);
        }
    }
}

std::string FreeWord::to_string(const std::vector<std::string>& names) const {
    if (letters_.empty()) return "e";
    std::ostringstream os;
    std::size_t i = 0;
    bool first = true;
    while (i < letters_.size()) {
        const int gen = letters_[i] < 0 ? -letters_[i] : letters_[i];
        long e = 0;
        std::size_t j = i;
        while (j < letters_.size() && letters_[j] == letters_[i]) {
            e += letters_[j] > 0 ? 1 : -1;
            ++j;
        }
        if (!first) os << ' ';
        first = false;
        if (static_cast<std::size_t>(gen) <= names.size()) {
            os << names[gen - 1];
        } else {
            os << 'x' << gen;
        }
        if (e != 1) os << '^' << e;
        i = j;
    }
    return os.str();
}

FreeWord fw_mul(const FreeWord& a, const FreeWord& b) {
    if (a.alphabet() != b.alphabet()) fail(Errc::AlphabetMismatch, "words over different alphabets");
    std::vector<int> letters = a.letters();
    letters.insert(letters.end(), b.letters().begin(), b.letters().end());
    return FreeWord(a.alphabet(), std::move(letters));
}

FreeWord fw_inv(const FreeWord& a) {
    std::vector<int> letters(a.letters().rbegin(), a.letters().rend());
    for (int& l : letters) l = -l;
    return FreeWord(a.alphabet(), std::move(letters));
}

FreeWord fw_commutator(const FreeWord& a, const FreeWord& b) {
    return fw_mul(fw_mul(fw_inv(a), fw_inv(b)), fw_mul(a, b));
}

FreeWord fw_pow(const FreeWord& a, long e) {
    const FreeWord base = e < 0 ? fw_inv(a) : a;
    FreeWord acc(a.alphabet());
    for (long i = 0; i < (e < 0 ? -e : e); ++i) acc = fw_mul(acc, base);
    return acc;
}

FreeWord fw_substitute(const FreeWord& w, const std::vector<FreeWord>& images) {
    if (images.size() != w.alphabet()) fail(Errc::AlphabetMismatch, "one image per letter required");
    const unsigned target = images.empty() ? 1 : images[0].alphabet();
    std::vector<FreeWord> inverses;
    for (const auto& img : images) {
        if (img.alphabet() != target) fail(Errc::AlphabetMismatch, "images over different alphabets");
        inverses.push_back(fw_inv(img));
    }
    std::vector<int> out;
    for (int l : w.letters()) {
        const auto& img = l > 0 ? images[l - 1] : inverses[-l - 1];
        out.insert(out.end(), img.letters().begin(), img.letters().end());
    }
    return FreeWord(target, std::move(out));
}

Matrix fw_eval(const FreeWord& w, const std::vector<Matrix>& gens) {
    if (gens.size() < w.alphabet()) fail(Errc::IndexOutOfRange, "fewer matrices than letters");
    return word_eval(gens, w.letters());
}

std::vector<long> schedule_of(const FreeWord& w, int first) {
    std::vector<long> out;
    int expect = first;
    std::size_t i = 0;
    const auto& L = w.letters();
    while (i < L.size()) {
        long e = 0;
        while (i < L.size() && (L[i] == expect || L[i] == -expect)) {
            e += L[i] > 0 ? 1 : -1;
            ++i;
        }
        out.push_back(e);
        expect = expect == kUA ? kUB : kUA;
    }
    return out;
}

FreeWord word_from_schedule(const std::vector<long>& schedule, int first) {
    std::vector<int> letters;
    int cur = first;
    for (long e : schedule) {
        for (long k = 0; k < (e < 0 ? -e : e); ++k) letters.push_back(e < 0 ? -cur : cur);
        cur = cur == kUA ? kUB : kUA;
    }
    return FreeWord(2, std::move(letters));
}

std::vector<long> padded_schedule(const FreeWord& w, int first) {
    auto s = schedule_of(w, first);
    if (s.size() % 2 == 0) s.push_back(0);
    return s;
}

bool terminal_letters_ok(const FreeWord& wa, const FreeWord& wb) {
    if (wa.empty() || wb.empty()) return false;
    const int la = wa.letters().back(), lb = wb.letters().back();
    return (la == kUA || la == -kUA) && (lb == kUB || lb == -kUB);
}

IdentityWordPair make_pair_from_words(const FreeWord& wa, const FreeWord& wb) {
    if (wa.alphabet() != 2 || wb.alphabet() != 2) fail(Errc::AlphabetMismatch, "pair words use the letters u_A, u_B");
    if (wa.empty() || wb.empty()) fail(Errc::DegeneratePair, "a word of the pair reduces to the identity");
    if (!terminal_letters_ok(wa, wb))
        fail(Errc::TerminalLetterViolation, "W_A must end in u_A and W_B in u_B");
    IdentityWordPair p{wa, wb, schedule_of(wa, kUA), schedule_of(wb, kUB)};
    return p;
}

IdentityWordPair build_solvable_pair(unsigned n, const std::optional<std::array<FreeWord, 4>>& inner) {
    if (n < 1) fail(Errc::InvalidArgument, "derived length must be at least 1");
    if (n > 10) fail(Errc::InvalidArgument, "derived length above 10 gives words longer than 2^19");
    std::array<FreeWord, 4> w = inner ? *inner
                                      : std::array<FreeWord, 4>{FreeWord(2, {kUB}), FreeWord(2, {kUA}),
                                                                FreeWord(2, {-kUA}), FreeWord(2, {-kUB})};
    for (const auto& x : w)
        if (x.alphabet() != 2) fail(Errc::AlphabetMismatch, "inner words use the letters u_A, u_B");
    const std::vector<FreeWord> images{fw_commutator(w[0], w[1]), fw_commutator(w[2], w[3])};
    FreeWord wa(2, {kUB, kUA}), wb(2, {kUA, kUB});
    for (unsigned i = 1; i < n; ++i) {
        wa = fw_substitute(wa, images);
        wb = fw_substitute(wb, images);
    }
    if (inner) return make_pair_from_words(wa, wb);
    // The default recursion is kept verbatim even though for 3 | n W_B
    // ends in u_A^{-1}; terminal_letters_ok reports that honestly.
    if (wa.empty() || wb.empty()) fail(Errc::DegeneratePair, "a word of the pair reduces to the identity");
    return {wa, wb, padded_schedule(wa, kUA), padded_schedule(wb, kUB)};
}

IdentityWordPair build_exponent_pair(unsigned m) {
    if (m < 1) fail(Errc::InvalidArgument, "exponent must be at least 1");
    std::vector<int> prefix;
    for (unsigned i = 0; i + 1 < m; ++i) {
        prefix.push_back(kUA);
        prefix.push_back(kUB);
    }
    prefix.push_back(kUA);
    return make_pair_from_words(FreeWord(2, prefix), FreeWord(2, {-kUB}));
}

GroupWord random_group_word(std::size_t count, std::size_t length, Rng& rng) {
    GroupWord w;
    if (count == 0) return w;
    while (w.size() < length) {
        int l = static_cast<int>(rng.below(count)) + 1;
        if (rng.coin(0.5)) l = -l;
        if (!w.empty() && w.back() == -l) continue;
        w.push_back(l);
    }
    return w;
}

PairReport validate_pair(const IdentityWordPair& pair, const std::vector<Matrix>& gens_A,
                         const std::vector<Matrix>& gens_B, std::size_t trials, std::uint64_t seed) {
    PairReport rep;
    rep.w1 = terminal_letters_ok(pair.wa, pair.wb) && word_from_schedule(pair.schedule_a, kUA) == pair.wa &&
             word_from_schedule(pair.schedule_b, kUB) == pair.wb;
    if (gens_A.empty() || gens_B.empty()) fail(Errc::InvalidArgument, "generator lists must be nonempty");
    Rng rng(seed);
    std::unordered_set<Matrix, MatrixHash> values;
    for (std::size_t t = 0; t < trials; ++t) {
        Matrix ga = word_eval(gens_A, random_group_word(gens_A.size(), 1 + rng.below(6), rng));
        Matrix gb = word_eval(gens_B, random_group_word(gens_B.size(), 1 + rng.below(6), rng));
        Matrix va = fw_eval(pair.wa, {ga, gb});
        Matrix vb = fw_eval(pair.wb, {ga, gb});
        ++rep.trials;
        values.insert(va);
        if (!(va == vb) && rep.w2) {
            rep.w2 = false;
            rep.counterexample = std::make_pair(ga, gb);
        }
    }
    rep.distinct_values = values.size();
    if (!rep.w1) rep.warnings.push_back("terminal letter condition fails");
    if (rep.distinct_values < 2) rep.warnings.push_back("fewer than two key values");
    return rep;
}

}  // namespace mgc
