#include "mgc/protocol.hpp"

#include <algorithm>
#include <utility>

#include "mgc/error.hpp"

namespace mgc {

namespace {

bool all_commute(const std::vector<Matrix>& xs, const std::vector<Matrix>& ys) {
    for (const auto& x : xs)
        for (const auto& y : ys)
            if (!(mat_mul(x, y) == mat_mul(y, x))) return false;
    return true;
}

void check_word(const GroupWord& w, std::size_t count, const char* who) {
    for (int l : w)
        if (l == 0 || std::size_t(l < 0 ? -l : l) > count)
            fail(Errc::IndexOutOfRange, std::string(who) + ": secret word letter " + std::to_string(l) +
                                            " outside the generator list");
}

// word_eval with a running count of multiplications and inversions.
Matrix eval_counted(const std::vector<Matrix>& gens, const GroupWord& w, std::size_t& ops) {
    std::vector<std::optional<Matrix>> invs(gens.size());
    std::optional<Matrix> acc;
    for (int l : w) {
        const std::size_t k = std::size_t(l < 0 ? -l : l) - 1;
        const Matrix* x = &gens[k];
        if (l < 0) {
            if (!invs[k]) {
                invs[k] = mat_inv(gens[k]);
                ++ops;
            }
            x = &*invs[k];
        }
        if (acc) {
            acc = mat_mul(*acc, *x);
            ++ops;
        } else {
            acc = *x;
        }
    }
    return acc ? *acc : Matrix::identity(gens[0].ring(), gens[0].rows());
}

// K = prod_j (B_j^-1 a^{sign_j} B_j); the party holds each conjugated
// generator list B_j^-1 gens B_j, never B_j itself.
struct Factor {
    int sign = 1;
    std::vector<Matrix> conj;
};

struct Party {
    PartyConfig cfg;
    std::vector<Factor> factors;
    Matrix key;
    std::size_t ops = 0, service = 0;
};

Matrix key_of(const std::vector<Factor>& factors, const GroupWord& w, std::size_t& ops) {
    std::optional<Matrix> k;
    for (const auto& f : factors) {
        Matrix e = eval_counted(f.conj, w, ops);
        if (f.sign < 0) {
            e = mat_inv(e);
            ++ops;
        }
        if (k) {
            k = mat_mul(*k, e);
            ++ops;
        } else {
            k = std::move(e);
        }
    }
    return *k;
}

// New factor list after one merge: [K_1,K_2] = K_1^-1 (K_2^-1 K_1 K_2) for the
// first half, (K_1^-1 K_2 K_1)^-1 K_2 for the second.
std::vector<Factor> merge(const std::vector<Factor>& old, const std::vector<std::vector<Matrix>>& replies, bool first) {
    std::vector<Factor> out;
    for (std::size_t j = old.size(); j-- > 0;) out.push_back({-old[j].sign, first ? old[j].conj : replies[j]});
    for (std::size_t j = 0; j < old.size(); ++j) out.push_back({old[j].sign, first ? replies[j] : old[j].conj});
    return out;
}

struct Engine {
    std::vector<Party> parties;
    Transcript tr;
    unsigned round = 0;

    void run(std::size_t lo, std::size_t hi) {
        if (hi - lo == 1) {
            Party& p = parties[lo];
            p.factors = {{1, p.cfg.gens}};
            p.key = key_of(p.factors, p.cfg.word, p.ops);
            return;
        }
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        run(lo, mid);
        run(mid, hi);
        ++round;
        std::vector<std::vector<std::vector<Matrix>>> replies(hi - lo);
        // first half asks the second half's lowest party, then the reverse
        for (int half = 0; half < 2; ++half) {
            const std::size_t a = half == 0 ? lo : mid, b = half == 0 ? mid : hi;
            const std::size_t answerer = half == 0 ? mid : lo;
            Party& ans = parties[answerer];
            const Matrix k_inv = mat_inv(ans.key);
            ++ans.service;
            for (std::size_t i = a; i < b; ++i)
                for (const auto& f : parties[i].factors) {
                    tr.records.push_back({round, party_name(i), party_name(answerer), "conjugate-request", f.conj});
                    std::vector<Matrix> out;
                    for (const auto& c : f.conj) out.push_back(mat_mul(mat_mul(k_inv, c), ans.key));
                    ans.service += 2 * f.conj.size();
                    tr.records.push_back({round, party_name(answerer), party_name(i), "conjugate-reply", out});
                    replies[i - lo].push_back(std::move(out));
                }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            Party& p = parties[i];
            p.factors = merge(p.factors, replies[i - lo], i < mid);
            p.key = key_of(p.factors, p.cfg.word, p.ops);
        }
    }
};

}  // namespace

std::string party_name(std::size_t i) { return "P" + std::to_string(i); }

AagResult aag_run(const AagConfig& cfg) {
    if (cfg.gens_A.empty() || cfg.gens_B.empty()) fail(Errc::InvalidArgument, "both parties need generators");
    check_word(cfg.word_A, cfg.gens_A.size(), "A");
    check_word(cfg.word_B, cfg.gens_B.size(), "B");
    if (cfg.instance.n) {
        for (const auto* list : {&cfg.gens_A, &cfg.gens_B})
            for (const auto& g : *list)
                if (!same_ring(g.ring(), cfg.instance.ring) || g.rows() != cfg.instance.n || g.cols() != cfg.instance.n)
                    fail(Errc::ShapeMismatch, "generator does not match the instance");
    }
    AagResult out;
    const Matrix a = word_eval(cfg.gens_A, cfg.word_A);
    const Matrix b = word_eval(cfg.gens_B, cfg.word_B);
    const Matrix a_inv = mat_inv(a), b_inv = mat_inv(b);
    std::vector<Matrix> x_b, x_a;
    for (const auto& bj : cfg.gens_B) x_b.push_back(mat_mul(mat_mul(a_inv, bj), a));
    for (const auto& ai : cfg.gens_A) x_a.push_back(mat_mul(mat_mul(b_inv, ai), b));
    out.transcript.records.push_back({1, "A", "B", "conjugated-generators", x_b});
    out.transcript.records.push_back({1, "B", "A", "conjugated-generators", x_a});
    // A rewrites b^-1 a b through X_A, B rewrites a^-1 b a through X_B
    out.key_A = mat_mul(a_inv, word_eval(x_a, cfg.word_A));
    out.key_B = mat_mul(mat_inv(word_eval(x_b, cfg.word_B)), b);
    if (all_commute(cfg.gens_A, cfg.gens_B))
        out.warnings.push_back("G_A centralizes G_B: every commutator key is the identity");
    if (out.key_A.is_identity()) out.warnings.push_back("the shared key is the identity");
    if (!(out.key_A == out.key_B)) out.warnings.push_back("the two keys differ");
    return out;
}

MultiPartyResult multiparty_run(const std::vector<PartyConfig>& parties) {
    if (parties.size() < 2) fail(Errc::BadPartyCount, "at least two parties are needed");
    Engine e;
    for (std::size_t i = 0; i < parties.size(); ++i) {
        if (parties[i].gens.empty()) fail(Errc::InvalidArgument, party_name(i) + " has no generators");
        check_word(parties[i].word, parties[i].gens.size(), party_name(i).c_str());
        e.parties.push_back({parties[i], {}, {}, 0, 0});
    }
    e.run(0, parties.size());
    MultiPartyResult out;
    out.transcript = std::move(e.tr);
    for (auto& p : e.parties) {
        out.keys.push_back(p.key);
        out.op_counts.push_back(p.ops);
        out.service_counts.push_back(p.service);
    }
    for (std::size_t i = 1; i < out.keys.size(); ++i)
        if (!(out.keys[i] == out.keys[0])) {
            out.warnings.push_back("party keys differ");
            break;
        }
    if (out.keys[0].is_identity()) out.warnings.push_back("the shared key is the identity");
    return out;
}

Matrix multiparty_replay(const Transcript& t, std::size_t party, std::size_t s, const PartyConfig& cfg) {
    if (s < 2) fail(Errc::BadPartyCount, "at least two parties are needed");
    if (party >= s) fail(Errc::IndexOutOfRange, "no such party");
    // halves containing the party, from the leaf up
    std::vector<bool> first_half;
    for (std::size_t lo = 0, hi = s; hi - lo > 1;) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        first_half.push_back(party < mid);
        if (party < mid)
            hi = mid;
        else
            lo = mid;
    }
    std::reverse(first_half.begin(), first_half.end());
    const std::string me = party_name(party);
    std::vector<const TranscriptRecord*> inbox;
    for (const auto& r : t.records)
        if (r.receiver == me && r.kind == "conjugate-reply") inbox.push_back(&r);
    std::vector<Factor> factors{{1, cfg.gens}};
    std::size_t next = 0;
    for (bool first : first_half) {
        std::vector<std::vector<Matrix>> replies;
        for (std::size_t j = 0; j < factors.size(); ++j) {
            if (next >= inbox.size()) fail(Errc::ParseError, "transcript is missing replies for " + me);
            replies.push_back(inbox[next++]->payload);
        }
        factors = merge(factors, replies, first);
    }
    std::size_t ops = 0;
    return key_of(factors, cfg.word, ops);
}

// --- generalized Diffie-Hellman --------------------------------------------------------

Matrix power_exponent(u64 p, u64 e) {
    if (p < 3) fail(Errc::InvalidArgument, "power action needs p >= 3");
    const Ring r = ring_integer_residue(p - 1);
    Matrix m(r, 1, 1);
    m.set(0, 0, RingElement::from_int(r, std::int64_t(e % (p - 1))));
    if (!m.get(0, 0).is_unit()) fail(Errc::NonUnit, "exponent is not a unit mod p - 1");
    return m;
}

Matrix power_point(u64 p, u64 x) {
    if (p < 3) fail(Errc::InvalidArgument, "power action needs p >= 3");
    const Ring r = ring_integer_residue(p);
    Matrix m(r, 1, 1);
    m.set(0, 0, RingElement::from_int(r, std::int64_t(x % p)));
    return m;
}

Matrix GdhAction::act(const Matrix& x, const Matrix& g) const {
    if (kind == Kind::RightMultiply) {
        if (x.cols() != g.rows()) fail(Errc::ShapeMismatch, "point and group element do not fit");
        return mat_mul(x, g);
    }
    const auto e = g.get(0, 0).to_integer();
    if (!e || x.rows() != 1 || x.cols() != 1) fail(Errc::ShapeMismatch, "power action expects 1 x 1 operands");
    return mat_pow(x, std::int64_t(*e));
}

GdhResult gdh_run(const GdhConfig& cfg) {
    if (cfg.gens_A.empty() || cfg.gens_B.empty()) fail(Errc::InvalidArgument, "both parties need generators");
    check_word(cfg.word_A, cfg.gens_A.size(), "A");
    check_word(cfg.word_B, cfg.gens_B.size(), "B");
    const auto sa = padded_schedule(cfg.pair.wa, kUA);
    const auto sb = padded_schedule(cfg.pair.wb, kUB);
    if (sa.size() != sb.size())
        fail(Errc::ScheduleMismatch, "W_A runs " + std::to_string((sa.size() + 1) / 2) + " rounds, W_B runs " +
                                         std::to_string((sb.size() + 1) / 2));
    GdhResult out;
    if (!terminal_letters_ok(cfg.pair.wa, cfg.pair.wb))
        out.warnings.push_back("terminal-letter condition fails: a final exponent is zero");
    const Matrix ga = word_eval(cfg.gens_A, cfg.word_A);
    const Matrix gb = word_eval(cfg.gens_B, cfg.word_B);
    const auto& act = cfg.action;
    Matrix ka = cfg.x0, kb = cfg.x0;
    const std::size_t rounds = (sa.size() - 1) / 2;
    for (std::size_t r = 0; r < rounds; ++r) {
        const unsigned rn = unsigned(r + 1);
        Matrix ya = act.act(ka, mat_pow(ga, sa[2 * r]));
        out.transcript.records.push_back({rn, "A", "B", "chain-A", {ya}});
        ka = act.act(ya, mat_pow(gb, sa[2 * r + 1]));
        out.transcript.records.push_back({rn, "B", "A", "chain-A-return", {ka}});

        Matrix yb = act.act(kb, mat_pow(gb, sb[2 * r]));
        out.transcript.records.push_back({rn, "B", "A", "chain-B", {yb}});
        kb = act.act(yb, mat_pow(ga, sb[2 * r + 1]));
        out.transcript.records.push_back({rn, "A", "B", "chain-B-return", {kb}});
    }
    out.key_A = act.act(ka, mat_pow(ga, sa.back()));
    out.key_B = act.act(kb, mat_pow(gb, sb.back()));
    out.agree = out.key_A == out.key_B;
    if (!out.agree) out.warnings.push_back("K_A != K_B: the pair is not an identity on the chosen elements");
    return out;
}

}  // namespace mgc
