// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <unistd.h>

#include "mgc/cli.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"
#include "mgc/serialize.hpp"

using namespace mgc;

namespace {

// Pinned thresholds.
constexpr int kAagRuns = 200;
constexpr int kMultiRuns = 50;
constexpr int kGdhRuns = 100;
constexpr double kCostConstant = 8.0;  // ops <= C * s * |a_i|
constexpr int kDhPairs = 50;
constexpr int kHomMessages = 500;
constexpr int kOracleTrees = 100;
constexpr int kOracleQueries = 100;
constexpr std::size_t kOracleCap = 100000;
constexpr int kWreathSamples = 1000;
constexpr int kScspInstances = 100;
constexpr int kScspFloor = 90;
constexpr int kLinearityQueries = 100;

struct Verdict {
    bool pass;
    std::string detail;
};

Matrix comm(const Matrix& a, const Matrix& b) { return mat_mul(mat_mul(mat_inv(a), mat_inv(b)), mat_mul(a, b)); }

Matrix direct_key(const std::vector<Matrix>& secrets, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return secrets[lo];
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    return comm(direct_key(secrets, lo, mid), direct_key(secrets, mid, hi));
}

bool has_warning(const std::vector<std::string>& ws, const std::string& part) {
    for (const auto& w : ws)
        if (w.find(part) != std::string::npos) return true;
    return false;
}

Matrix random_element(const std::vector<Matrix>& gens, Rng& rng, std::size_t max_len = 12) {
    return word_eval(gens, random_group_word(gens.size(), 1 + rng.below(max_len), rng));
}

TreeGenOptions protocol_options() {
    TreeGenOptions o;
    o.max_degree = 12;
    o.fields = {3, 4, 5, 7};
    o.max_leaf_degree = 3;
    o.max_arity = 2;
    o.max_field = 64;
    return o;
}

std::vector<Matrix> borel_gens(u64 q) {
    const Ring f = ring_field(q);
    const RingElement w = primitive_element(f);
    Matrix d1 = Matrix::identity(f, 2), d2 = Matrix::identity(f, 2);
    d1.set(0, 0, w);
    d2.set(1, 1, w);
    return {d1, d2, Matrix::from_ints(f, {{1, 1}, {0, 1}})};
}

u64 modpow(u64 b, u64 e, u64 m) {
    u64 r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

FreeWord random_message(unsigned k, std::size_t max_len, Rng& rng) {
    std::vector<int> l;
    const std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        const int x = int(rng.below(k)) + 1;
        l.push_back(rng.coin(0.5) ? x : -x);
    }
    return FreeWord(k, l);
}

// --- criteria ----------------------------------------------------------------------------

Verdict word_length_law() {
    std::ostringstream d;
    bool ok = true;
    for (unsigned n = 1; n <= 6; ++n) {
        const auto p = build_solvable_pair(n);
        std::size_t want = 2;
        for (unsigned i = 1; i < n; ++i) want *= 4;
        ok = ok && p.wa.length() == want && p.wb.length() == want;
        d << (n > 1 ? " " : "") << p.wa.length();
    }
    return {ok, "lengths n=1..6: " + d.str()};
}

// Criteria 2 and 3 share the multi-party runs.
struct MultiStats {
    int runs = 0, mismatches = 0;
    double worst_ratio = 0;
};

MultiStats multi_party_runs() {
    MultiStats st;
    for (std::size_t s : {2, 4, 8}) {
        for (int run = 0; run < kMultiRuns; ++run) {
            const std::uint64_t seed = 1000 * s + run;
            const auto t = tree_random(90, seed, protocol_options());
            const auto inst = tree_eval(t);
            Rng rng(seed);
            std::vector<PartyConfig> ps;
            std::vector<Matrix> secrets;
            for (std::size_t i = 0; i < s; ++i) {
                GroupWord w = random_group_word(inst.gens.size(), 1 + rng.below(8), rng);
                secrets.push_back(word_eval(inst.gens, w));
                ps.push_back({inst.gens, w});
            }
            const auto r = multiparty_run(ps);
            const Matrix want = direct_key(secrets, 0, s);
            ++st.runs;
            for (std::size_t i = 0; i < s; ++i) {
                if (!(r.keys[i] == want) || !(multiparty_replay(r.transcript, i, s, ps[i]) == want)) ++st.mismatches;
                st.worst_ratio = std::max(st.worst_ratio, double(r.op_counts[i]) / double(s * ps[i].word.size()));
            }
        }
    }
    return st;
}

const MultiStats& multi_stats() {
    static const MultiStats st = multi_party_runs();
    return st;
}

Verdict protocol_agreement() {
    int aag_bad = 0, centralizing = 0, unwarned = 0;
    for (int seed = 1; seed <= kAagRuns; ++seed) {
        const auto t = tree_random(90, seed, protocol_options());
        const auto smp = subgroup_sample(t, seed);
        Rng rng(seed);
        AagConfig cfg{tree_eval(t), smp.gens_A, smp.gens_B,
                      random_group_word(smp.gens_A.size(), 1 + rng.below(8), rng),
                      random_group_word(smp.gens_B.size(), 1 + rng.below(8), rng)};
        const auto r = aag_run(cfg);
        const Matrix want = comm(word_eval(cfg.gens_A, cfg.word_A), word_eval(cfg.gens_B, cfg.word_B));
        if (!(r.key_A == r.key_B) || !(r.key_A == want)) ++aag_bad;
        if (!smp.warnings.empty()) {
            ++centralizing;
            if (!has_warning(r.warnings, "centralizes")) ++unwarned;
        }
    }
    // an explicitly abelian pair must warn as well
    const Ring z5 = ring_field(5);
    AagConfig ab;
    ab.gens_A = {Matrix::from_ints(z5, {{1, 1}, {0, 1}})};
    ab.gens_B = {Matrix::from_ints(z5, {{1, 2}, {0, 1}})};
    ab.word_A = ab.word_B = {1};
    if (!has_warning(aag_run(ab).warnings, "centralizes")) ++unwarned;

    const auto& ms = multi_stats();

    int gdh_bad = 0;
    std::set<std::string> keys;
    const auto pair = build_solvable_pair(2);
    for (int it = 0; it < kGdhRuns; ++it) {
        const u64 q = std::vector<u64>{5, 7, 11}[it % 3];
        const auto gens = borel_gens(q);
        Rng rng(7000 + it);
        const Matrix x0 = Matrix::row_vector(ring_field(q), {1, std::int64_t(1 + rng.below(q - 1))});
        GdhConfig cfg{GdhAction::right_multiply(), pair, x0, gens, gens,
                      random_group_word(3, 1 + rng.below(6), rng), random_group_word(3, 1 + rng.below(6), rng)};
        const auto r = gdh_run(cfg);
        const Matrix want = mat_mul(x0, fw_eval(pair.wa, {word_eval(gens, cfg.word_A), word_eval(gens, cfg.word_B)}));
        if (!r.agree || !(r.key_A == r.key_B) || !(r.key_A == want)) ++gdh_bad;
        keys.insert(r.key_A.to_string());
    }
    std::ostringstream d;
    d << "aag " << kAagRuns - aag_bad << "/" << kAagRuns << " (" << centralizing << " centralizing, " << unwarned
      << " unwarned); multi-party " << ms.runs - ms.mismatches << "/" << ms.runs << " runs over s=2,4,8; gdh "
      << kGdhRuns - gdh_bad << "/" << kGdhRuns << " (" << keys.size() << " distinct keys)";
    return {aag_bad == 0 && ms.mismatches == 0 && gdh_bad == 0 && unwarned == 0, d.str()};
}

Verdict multi_party_cost() {
    const auto& ms = multi_stats();
    std::ostringstream d;
    d << "max ops/(s*|a_i|) = " << ms.worst_ratio << " over " << ms.runs << " runs, C = " << kCostConstant;
    return {ms.worst_ratio <= kCostConstant, d.str()};
}

Verdict dh_embedding() {
    const auto pair = make_pair_from_words(FreeWord(2, {kUB, kUA}), FreeWord(2, {kUA, kUB}));
    Rng rng(101);
    int good = 0;
    for (int it = 0; it < kDhPairs; ++it) {
        u64 a, b;
        do a = rng.between(1, 99); while (std::gcd(a, u64(100)) != 1);
        do b = rng.between(1, 99); while (std::gcd(b, u64(100)) != 1);
        GdhConfig c{GdhAction::power(101), pair, power_point(101, 2), {power_exponent(101, a)},
                    {power_exponent(101, b)}, {1}, {1}};
        const auto r = gdh_run(c);
        if (r.agree && r.key_A == power_point(101, modpow(2, a * b, 101))) ++good;
    }
    return {good == kDhPairs, std::to_string(good) + "/" + std::to_string(kDhPairs) + " secrets equal 2^(ab) mod 101"};
}

Verdict homomorphic_correctness() {
    const std::vector<Presentation> fixtures{klein_four(), symmetric3(), dihedral8()};
    int failures = 0, messages = 0;
    Rng rng(55);
    for (int it = 0; it < kHomMessages; ++it) {
        const auto& p = fixtures[it % fixtures.size()];
        const auto [pk, sk] = hc_keygen(p, 1 + it % 7);
        const FreeWord m1 = random_message(p.k, 20, rng), m2 = random_message(p.k, 20, rng);
        const FreeWord c1 = hc_encrypt(pk, m1, rng.next()), c2 = hc_encrypt(pk, m2, rng.next());
        if (!(model_eval(p, hc_decrypt(sk, c1)) == model_eval(p, m1))) ++failures;
        if (!(model_eval(p, hc_decrypt(sk, fw_mul(c1, c2))) == model_eval(p, fw_mul(m1, m2)))) ++failures;
        ++messages;
    }
    return {failures == 0, std::to_string(messages) + " messages, " + std::to_string(failures) + " failures"};
}

Verdict trapdoor_vs_oracle() {
    TreeGenOptions o;
    o.max_degree = 6;
    o.fields = {2, 3, 4, 5, 7};
    o.max_leaf_degree = 2;
    o.max_arity = 2;
    o.max_field = 16;
    o.max_ring_size = 1 << 10;
    int trees = 0, skipped = 0;
    std::size_t largest = 0, mem_dis = 0, ltp_dis = 0, uncertified = 0, positives = 0;
    for (std::uint64_t seed = 1; trees < kOracleTrees && seed < 5000; ++seed) {
        const auto t = tree_random(60, seed, o);
        const auto inst = tree_eval(t);
        std::optional<EnumeratedGroup> e;
        try {
            e = enumerate_group(inst.gens, kOracleCap);
        } catch (const Error& err) {
            if (err.code() != Errc::CapExceeded) throw;
            ++skipped;
            continue;
        }
        ++trees;
        largest = std::max(largest, e->size());
        const Trapdoor td(t);
        Rng rng(seed);
        for (int it = 0; it < kOracleQueries; ++it) {
            const Matrix g = rng.coin(0.5) ? random_element(inst.gens, rng) : random_invertible(inst.ring, inst.n, rng);
            const auto oa = oracle_solve(OracleProblem::Membership, *e, {g});
            const auto tv = td.membership(g);
            if (tv.accepted != oa.found) ++mem_dis;
            if (tv.accepted && !(witness_replay(td.compiled(), *tv.witness) == g)) ++mem_dis;

            const Matrix u = random_matrix(inst.ring, 1, inst.n, rng);
            const Matrix v = rng.coin(0.5) ? mat_mul(u, random_element(inst.gens, rng))
                                           : random_matrix(inst.ring, 1, inst.n, rng);
            const auto ol = oracle_solve(OracleProblem::Ltp, *e, {u, v});
            const auto r = td.ltp(u, v);
            positives += ol.found;
            if (r.g) {
                if (!ol.found || !(mat_mul(u, *r.g) == v) || !e->find(*r.g)) ++ltp_dis;
            } else {
                if (!r.certified) ++uncertified;
                if (ol.found) ++ltp_dis;
            }
        }
    }
    std::ostringstream d;
    d << trees << " trees (" << skipped << " skipped above " << kOracleCap << ", largest " << largest << "), "
      << trees * kOracleQueries << " membership + " << trees * kOracleQueries << " ltp queries ("
      << positives << " solvable); disagreements " << mem_dis << "+" << ltp_dis << ", uncertified negatives "
      << uncertified;
    return {trees == kOracleTrees && mem_dis == 0 && ltp_dis == 0, d.str()};
}

Verdict wreath_inversion() {
    Rng rng(77);
    const std::vector<Ring> rings{ring_field(5), ring_galois(2, 2, 2), ring_integer_residue(15), ring_field(7)};
    int imp_ok = 0, prod_ok = 0, prod_total = 0;
    for (int t = 0; t < kWreathSamples; ++t) {
        const Ring R = rings[rng.below(rings.size())];
        const std::size_t n = 1 + rng.below(3), m = 2 + rng.below(2);
        std::vector<Matrix> hs;
        for (std::size_t i = 0; i < m; ++i) hs.push_back(random_invertible(R, n, rng));
        Perm k = perm_identity(m);
        rng.shuffle(k);
        auto [hi, ki] = wreath_split(wreath_rep(hs, k, WreathMode::Imprimitive), n, m, WreathMode::Imprimitive);
        if (ki == k && hi == hs) ++imp_ok;
        if (n < 2) continue;
        // Kronecker factors are defined up to scalars; compare on the canonical representatives.
        const auto canon = tensor_split(mat_kron_all(hs), std::vector<std::size_t>(m, n));
        auto [hp, kp] = wreath_split(wreath_rep(canon, k, WreathMode::Product), n, m, WreathMode::Product);
        ++prod_total;
        if (kp == k && hp == canon) ++prod_ok;
    }
    const Ring z7 = ring_integer_residue(7);
    const auto t = tree_op(op_wreath(2, WreathMode::Imprimitive), {tree_leaf(leaf_diagonal(1, 7, 2))});
    const Matrix u = Matrix::row_vector(z7, {1, 3}), v = Matrix::row_vector(z7, {6, 2});
    const Matrix g = ltp_solve(t, u, v);
    const bool z7_ok = mat_mul(u, g) == v && membership(t, g).accepted;
    std::ostringstream d;
    d << "imprimitive " << imp_ok << "/" << kWreathSamples << ", product " << prod_ok << "/" << prod_total
      << " (n >= 2, canonical factors); Z_7 transporter " << (z7_ok ? "verified" : "FAILED");
    return {imp_ok == kWreathSamples && prod_ok == prod_total && z7_ok, d.str()};
}

Verdict galois_ring_algebra() {
    int checked = 0, bad = 0;
    for (const auto& R : {ring_integer_residue(4), ring_integer_residue(9), ring_galois(2, 2, 2), ring_galois(2, 3, 2),
                          ring_field(8)}) {
        const auto& g = R->summands()[0];
        u64 pr = 1;
        for (unsigned i = 0; i < g.r; ++i) pr *= g.p;
        const auto elems = ring_elements(R);
        const auto aut = make_automorphism(R, {g.r > 1 ? 1u : 0u});
        std::set<Coeffs> images;
        for (const auto& a : elems) {
            ++checked;
            const auto digits = teichmuller_decompose(a);
            if (!(teichmuller_recompose(R, digits) == a)) ++bad;
            // every digit lies in T: t^{p^r} = t
            for (const auto& dg : digits[0]) {
                const auto t = RingElement::from_summands(R, {dg});
                if (!(ring_pow(t, pr) == t)) ++bad;
                // Frobenius acts on T as t -> t^p
                if (!(frobenius_apply(aut, t) == ring_pow(t, g.r > 1 ? g.p : 1))) ++bad;
            }
            const auto fa = frobenius_apply(aut, a);
            images.insert(fa.coeffs());
            auto cur = a;
            for (unsigned i = 0; i < g.r; ++i) cur = frobenius_apply(aut, cur);
            if (!(cur == a)) ++bad;
            for (const auto& b : elems) {
                if (!(frobenius_apply(aut, a + b) == fa + frobenius_apply(aut, b))) ++bad;
                if (!(frobenius_apply(aut, a * b) == fa * frobenius_apply(aut, b))) ++bad;
            }
        }
        if (images.size() != elems.size()) ++bad;
        for (u64 z = 0; z < g.p; ++z) {
            const auto c = RingElement::from_int(R, std::int64_t(z));
            if (!(frobenius_apply(aut, c) == c)) ++bad;
        }
    }
    return {bad == 0, std::to_string(checked) + " elements over Z_4, Z_9, GR(4,2), GR(8,2), GF(8); " +
                          std::to_string(bad) + " violations"};
}

Verdict scsp_attack() {
    std::ostringstream d;
    bool ok = true;
    for (u64 q : {17, 31}) {
        Rng rng(q);
        const Ring f = ring_field(q);
        const auto gens = leaf_generators(leaf_general_linear(2, q));
        int good = 0, warned = 0;
        for (int it = 0; it < kScspInstances; ++it) {
            const Matrix g = random_invertible(f, 2, rng), h = random_invertible(f, 2, rng);
            const Matrix fm = mat_mul(mat_mul(mat_inv(h), g), h);
            try {
                const auto r = scsp_linear_attack(gens, fm, g, rng.next());
                warned += !r.warnings.empty();
                if (mat_mul(mat_mul(mat_inv(r.h), g), r.h) == fm) ++good;
            } catch (const Error&) {
            }
        }
        d << "q=" << q << " " << good << "/" << kScspInstances << " ";
        ok = ok && good >= kScspFloor && warned == 0;
    }
    // gating: q = 3 and q = 4 must warn, q = 5 must not
    int gate_bad = 0;
    for (u64 q : {3, 4, 5}) {
        const auto gens = leaf_generators(leaf_general_linear(2, q));
        const auto r = scsp_linear_attack(gens, gens[0], gens[0], q);
        if (r.warnings.empty() != (q == 5)) ++gate_bad;
    }
    d << "(floor " << kScspFloor << "); warning gate " << (gate_bad ? "WRONG" : "correct") << " on q=3,4,5";
    return {ok && gate_bad == 0, d.str()};
}

Verdict factoring_instance() {
    const Ring z15 = ring_integer_residue(15);
    const auto t = tree_op(op_direct(), {tree_op(op_crt(z15, {0}), {tree_leaf(leaf_unipotent(3))}),
                                         tree_op(op_crt(z15, {1}), {tree_leaf(leaf_unipotent(5))})});
    const auto inst = tree_eval(t);
    const auto e = enumerate_group(inst.gens, 1000);
    bool shape = true;
    for (const auto& g : e.elements)
        shape = shape && g.get(0, 0).is_one() && g.get(1, 1).is_one() && g.get(1, 0).is_zero();
    const bool gens_ok = inst.gens.size() == 2 && inst.gens[0] == Matrix::from_ints(z15, {{1, 10}, {0, 1}}) &&
                         inst.gens[1] == Matrix::from_ints(z15, {{1, 6}, {0, 1}});
    return {e.size() == 15 && shape && gens_ok,
            "order " + std::to_string(e.size()) + ", unipotent shape " + (shape ? "yes" : "no") + ", generators " +
                (gens_ok ? "[[1,10],[0,1]] [[1,6],[0,1]]" : "WRONG")};
}

Verdict linearity_attack_check() {
    const auto gens = leaf_generators(leaf_general_linear(2, 5));
    Rng rng(11);
    const Matrix c = random_invertible(ring_field(5), 2, rng);
    std::vector<Matrix> images;
    for (const auto& g : gens) images.push_back(mat_mul(mat_mul(mat_inv(c), g), c));
    const LinearModel conj(gens, images);
    int exact = 0;
    for (int it = 0; it < kLinearityQueries; ++it) {
        const Matrix q = random_element(gens, rng);
        const auto p = conj.predict(q);
        if (p && *p == mat_mul(mat_mul(mat_inv(c), q), c)) ++exact;
    }
    const auto t = tree_leaf(leaf_general_linear(2, 4));
    const auto h = hom_build(t, {1u});
    const auto g4 = tree_eval(t).gens;
    const LinearModel frob(g4, h.gen_images);
    int counter = 0;
    for (int it = 0; it < kLinearityQueries; ++it) {
        const Matrix q = random_element(g4, rng);
        const auto p = frob.predict(q);
        // verified: the true image comes from hom_apply, and it is a group element image
        if (p && !(*p == hom_apply(h, q))) ++counter;
    }
    return {exact == kLinearityQueries && counter >= 1,
            "conjugation exact " + std::to_string(exact) + "/" + std::to_string(kLinearityQueries) +
                "; Frobenius over GF(4) counterexamples " + std::to_string(counter) + "/" +
                std::to_string(kLinearityQueries)};
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism_and_formats() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("mgc_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto f = [&](const std::string& name, int copy) { return (dir / (name + std::to_string(copy))).string(); };
    int pipelines = 0, differing = 0, failed = 0;
    // each pipeline runs twice into separate files; all written files must match byte for byte
    std::vector<std::pair<std::vector<std::function<std::vector<std::string>(int)>>, std::vector<std::string>>> pipes;
    pipes.push_back({{[&](int c) {
                         return std::vector<std::string>{"gen", "--size", "60", "--seed", "7", "--pub", f("pub", c),
                                                         "--sec", f("sec", c)};
                     },
                      [&](int c) {
                          return std::vector<std::string>{"sample", "--pub", f("pub", c), "--seed", "3", "--out",
                                                          f("elem", c)};
                      },
                      [&](int c) {
                          return std::vector<std::string>{"member", "--sec", f("sec", c), "--elem", f("elem", c),
                                                          "--witness", f("wit", c)};
                      }},
                     {"pub", "sec", "elem", "wit"}});
    pipes.push_back({{[&](int c) {
                         return std::vector<std::string>{"gen", "--size", "90", "--seed", "12", "--pub", f("pub", c),
                                                         "--sec", f("sec", c)};
                     },
                      [&](int c) {
                          return std::vector<std::string>{"aag", "--sec", f("sec", c), "--seed", "4", "--transcript",
                                                          f("aag", c)};
                      },
                      [&](int c) {
                          return std::vector<std::string>{"mparty", "--pub", f("pub", c), "--parties", "6", "--seed",
                                                          "4", "--transcript", f("mp", c)};
                      }},
                     {"pub", "sec", "aag", "mp"}});
    pipes.push_back({{[&](int c) {
                         return std::vector<std::string>{"gdh", "--mode", "borel", "--q", "7", "--seed", "9",
                                                         "--transcript", f("gdh", c)};
                     },
                      [&](int c) {
                          return std::vector<std::string>{"gdh", "--mode", "power", "--p", "101", "--seed", "9",
                                                          "--transcript", f("dh", c)};
                      }},
                     {"gdh", "dh"}});
    pipes.push_back({{[&](int c) {
                         return std::vector<std::string>{"hom", "keygen", "--fixture", "d8", "--seed", "3", "--pub",
                                                         f("hpk", c), "--sec", f("hsk", c)};
                     },
                      [&](int c) {
                          return std::vector<std::string>{"hom", "encrypt", "--pub", f("hpk", c), "--msg", "1,2,-1,2",
                                                          "--seed", "5", "--out", f("ct", c)};
                      },
                      [&](int c) {
                          return std::vector<std::string>{"attack", "scsp", "--q", "31", "--instances", "10", "--seed",
                                                          "2", "--report", f("scsp", c)};
                      }},
                     {"hpk", "hsk", "ct", "scsp"}});
    for (const auto& [steps, files] : pipes) {
        ++pipelines;
        std::string outs[2];
        for (int c = 0; c < 2; ++c) {
            for (const auto& step : steps) {
                std::ostringstream o, e;
                if (cli_execute(step(c), o, e) != 0) ++failed;
                outs[c] += o.str();
            }
        }
        if (outs[0] != outs[1]) ++differing;
        for (const auto& name : files)
            if (slurp(f(name, 0)).empty() || slurp(f(name, 0)) != slurp(f(name, 1))) ++differing;
    }

    // serialization round trips
    int trips = 0, trip_bad = 0;
    const auto check = [&](const std::string& a, const std::string& b) {
        ++trips;
        if (a != b) ++trip_bad;
    };
    TreeGenOptions o;
    o.max_degree = 12;
    o.max_arity = 2;
    o.max_field = 64;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto t = tree_random(120, seed, o);
        const std::string ts = dump(to_json(t));
        check(dump(to_json(tree_from_json(parse_json(ts)))), ts);
        const auto inst = tree_eval(t);
        const std::string is = dump(to_json(inst, true));
        check(dump(to_json(instance_from_json(parse_json(is)), true)), is);
        for (const auto& g : inst.gens) {
            const std::string ms = dump(to_json(g));
            check(dump(to_json(matrix_from_json(parse_json(ms)))), ms);
        }
        std::vector<LeafHom> choices(t.leaves().size(), LeafHom{0u});
        try {
            const std::string hs = dump(to_json(hom_build(t, choices)));
            check(dump(to_json(hom_from_json(parse_json(hs)))), hs);
        } catch (const Error& e) {
            if (e.code() != Errc::UnsupportedDecomposition) throw;
        }
        Rng rng(seed);
        const auto v = membership(t, random_element(inst.gens, rng));
        const std::string ws = dump(to_json(*v.witness));
        check(dump(to_json(witness_from_json(parse_json(ws)))), ws);
        std::vector<PartyConfig> ps(3, PartyConfig{inst.gens, random_group_word(inst.gens.size(), 4, rng)});
        const std::string tr = dump(to_json(multiparty_run(ps).transcript));
        check(dump(to_json(transcript_from_json(parse_json(tr)))), tr);
    }
    for (const auto& p : {klein_four(), symmetric3(), symmetric3_k3(), dihedral8()}) {
        const auto [pk, sk] = hc_keygen(p, 9);
        const std::string a = dump(to_json(pk)), b = dump(to_json(sk));
        check(dump(to_json(public_key_from_json(parse_json(a)))), a);
        check(dump(to_json(secret_key_from_json(parse_json(b)))), b);
    }
    for (unsigned n = 1; n <= 5; ++n) {
        const std::string s = dump(to_json(build_solvable_pair(n)));
        check(dump(to_json(pair_from_json(parse_json(s)))), s);
    }
    fs::remove_all(dir);
    std::ostringstream d;
    d << pipelines << " CLI pipelines run twice: " << differing << " differing artifacts, " << failed
      << " failed steps; " << trips << " round trips, " << trip_bad << " not byte-exact";
    return {differing == 0 && failed == 0 && trip_bad == 0, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"word-length law", word_length_law},
        {"protocol agreement", protocol_agreement},
        {"multi-party cost", multi_party_cost},
        {"DH embedding", dh_embedding},
        {"homomorphic correctness", homomorphic_correctness},
        {"trapdoor vs oracle", trapdoor_vs_oracle},
        {"wreath inversion", wreath_inversion},
        {"Galois-ring algebra", galois_ring_algebra},
        {"SCSP linear attack", scsp_attack},
        {"Z_15 factoring instance", factoring_instance},
        {"linearity attack", linearity_attack_check},
        {"determinism and formats", determinism_and_formats},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
