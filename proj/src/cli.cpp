#include "mgc/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"
#include "mgc/serialize.hpp"

namespace mgc {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const Json& j) {
    std::ofstream o(path, std::ios::binary | std::ios::trunc);
    if (!o) throw IoError("cannot write " + path);
    o << dump(j) << '\n';
}

Json load(const std::string& path) { return parse_json(read_file(path)); }

TreeGenOptions gen_options(std::size_t max_degree) {
    TreeGenOptions o;
    o.max_degree = max_degree;
    o.max_leaf_degree = 3;
    o.max_arity = 2;
    o.max_field = 64;
    return o;
}

Presentation fixture(const std::string& name) {
    if (name == "klein") return klein_four();
    if (name == "s3") return symmetric3();
    if (name == "s3k3") return symmetric3_k3();
    if (name == "d8") return dihedral8();
    throw UsageError("unknown fixture " + name + " (klein, s3, s3k3, d8)");
}

FreeWord parse_letters(unsigned k, const std::string& text) {
    std::vector<int> l;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("bad letter '" + tok + "'");
        }
        l.push_back(v);
    }
    for (int v : l)
        if (v == 0 || unsigned(v < 0 ? -v : v) > k) throw UsageError("letter " + std::to_string(v) + " outside Y");
    return FreeWord(k, l);
}

void print_warnings(std::ostream& out, const std::vector<std::string>& ws) {
    for (const auto& w : ws) out << "warning: " << w << '\n';
}

std::vector<Matrix> borel_gens(u64 q) {
    const Ring f = ring_field(q);
    const RingElement w = primitive_element(f);
    Matrix d1 = Matrix::identity(f, 2), d2 = Matrix::identity(f, 2);
    d1.set(0, 0, w);
    d2.set(1, 1, w);
    return {d1, d2, Matrix::from_ints(f, {{1, 1}, {0, 1}})};
}

}  // namespace

int cli_execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Matrix-group cryptography toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::uint64_t seed = 0;
    std::size_t size = 60, max_degree = 16, cap = 100000, parties = 4, instances = 100, queries = 100,
                bound = 1u << 20;
    u64 p = 101, q = 17;
    unsigned pair_n = 2;
    std::string pub, sec, elem, u_file, v_file, out_file, transcript_file, in_file, witness_file, name = "klein",
                                                                                                   msg, mode, problem;
    std::string a_file, b_file;

    auto* version = app.add_subcommand("version", "print the version");

    auto* gen = app.add_subcommand("gen", "random derivation tree and its public instance");
    gen->add_option("--size", size, "label budget L(T)")->required();
    gen->add_option("--seed", seed);
    gen->add_option("--max-degree", max_degree);
    gen->add_option("--pub", pub)->required();
    gen->add_option("--sec", sec)->required();

    auto* sample = app.add_subcommand("sample", "random element of the instance group");
    sample->add_option("--pub", pub)->required();
    sample->add_option("--seed", seed);
    sample->add_option("--out", out_file)->required();

    auto* member = app.add_subcommand("member", "membership through the trapdoor");
    member->add_option("--sec", sec)->required();
    member->add_option("--elem", elem)->required();
    member->add_option("--witness", witness_file);

    auto* ltp = app.add_subcommand("ltp", "linear transporter through the trapdoor");
    ltp->add_option("--sec", sec)->required();
    ltp->add_option("--u", u_file)->required();
    ltp->add_option("--v", v_file)->required();
    ltp->add_option("--out", out_file);

    auto* aag = app.add_subcommand("aag", "two-party commutator key agreement");
    aag->add_option("--sec", sec, "tree used to sample the public subgroups")->required();
    aag->add_option("--seed", seed);
    aag->add_option("--transcript", transcript_file);

    auto* mparty = app.add_subcommand("mparty", "s-party commutator key agreement");
    mparty->add_option("--pub", pub)->required();
    mparty->add_option("--parties", parties);
    mparty->add_option("--seed", seed);
    mparty->add_option("--transcript", transcript_file);

    auto* gdh = app.add_subcommand("gdh", "generalized Diffie-Hellman");
    gdh->add_option("--mode", mode, "power or borel")->required();
    gdh->add_option("--p", p, "prime for the power action");
    gdh->add_option("--q", q, "field for the Borel action");
    gdh->add_option("--n", pair_n, "identity word pair level");
    gdh->add_option("--seed", seed);
    gdh->add_option("--transcript", transcript_file);

    auto* hom = app.add_subcommand("hom", "free-group homomorphic cryptosystem");
    hom->require_subcommand(1);
    auto* keygen = hom->add_subcommand("keygen");
    keygen->add_option("--fixture", name);
    keygen->add_option("--seed", seed);
    keygen->add_option("--pub", pub)->required();
    keygen->add_option("--sec", sec)->required();
    auto* encrypt = hom->add_subcommand("encrypt");
    encrypt->add_option("--pub", pub)->required();
    encrypt->add_option("--msg", msg, "comma separated signed letters")->required();
    encrypt->add_option("--seed", seed);
    encrypt->add_option("--out", out_file)->required();
    auto* decrypt = hom->add_subcommand("decrypt");
    decrypt->add_option("--sec", sec)->required();
    decrypt->add_option("--in", in_file)->required();
    decrypt->add_option("--pub", pub, "evaluate the plaintext in the model");

    auto* attack = app.add_subcommand("attack", "attacks with verified outputs");
    attack->require_subcommand(1);
    auto* scsp = attack->add_subcommand("scsp");
    scsp->add_option("--q", q);
    scsp->add_option("--instances", instances);
    scsp->add_option("--seed", seed);
    scsp->add_option("--report", out_file);
    auto* linearity = attack->add_subcommand("linearity");
    linearity->add_option("--map", mode, "conjugation, frobenius or trivial")->required();
    linearity->add_option("--q", q);
    linearity->add_option("--queries", queries);
    linearity->add_option("--seed", seed);
    auto* coset = attack->add_subcommand("coset");
    coset->add_option("--pub", pub)->required();
    coset->add_option("--in", in_file)->required();
    coset->add_option("--bound", bound);

    auto* oracle = app.add_subcommand("oracle", "exhaustive oracles");
    oracle->require_subcommand(1);
    auto* oenum = oracle->add_subcommand("enum");
    oenum->add_option("--pub", pub)->required();
    oenum->add_option("--cap", cap);
    auto* osolve = oracle->add_subcommand("solve");
    osolve->add_option("--pub", pub)->required();
    osolve->add_option("--problem", problem, "membership, conjugacy or ltp")->required();
    osolve->add_option("--a", a_file)->required();
    osolve->add_option("--b", b_file);
    osolve->add_option("--cap", cap);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*version) {
            out << "mgc " << kVersion << '\n';
        } else if (*gen) {
            const auto t = tree_random(size, seed, gen_options(max_degree));
            const auto inst = tree_eval(t);
            write_file(pub, to_json(inst));
            write_file(sec, to_json(t));
            out << "degree " << inst.n << " generators " << inst.gens.size() << " L(T) " << tree_size(t) << '\n';
            out << "pub " << sha256_hex(dump(to_json(inst))) << '\n';
        } else if (*sample) {
            const auto inst = instance_from_json(load(pub));
            Rng rng(seed);
            const Matrix g = word_eval(inst.gens, random_group_word(inst.gens.size(), 1 + rng.below(16), rng));
            write_file(out_file, to_json(g));
            out << "element " << fingerprint(g) << '\n';
        } else if (*member) {
            const auto t = tree_from_json(load(sec));
            const auto v = membership(t, matrix_from_json(load(elem)));
            out << (v.accepted ? "yes" : "no") << '\n';
            if (v.accepted && !witness_file.empty()) write_file(witness_file, to_json(*v.witness));
        } else if (*ltp) {
            const auto t = tree_from_json(load(sec));
            const Matrix u = matrix_from_json(load(u_file)), v = matrix_from_json(load(v_file));
            const Matrix g = ltp_solve(t, u, v);
            out << "transporter " << fingerprint(g) << '\n';
            if (!out_file.empty()) write_file(out_file, to_json(g));
        } else if (*aag) {
            const auto t = tree_from_json(load(sec));
            const auto smp = subgroup_sample(t, seed);
            Rng rng(seed);
            AagConfig cfg{tree_eval(t), smp.gens_A, smp.gens_B,
                          random_group_word(smp.gens_A.size(), 1 + rng.below(8), rng),
                          random_group_word(smp.gens_B.size(), 1 + rng.below(8), rng)};
            const auto r = aag_run(cfg);
            out << "key_A " << fingerprint(r.key_A) << "\nkey_B " << fingerprint(r.key_B) << '\n';
            out << (r.key_A == r.key_B ? "agree" : "disagree") << '\n';
            print_warnings(out, smp.warnings);
            print_warnings(out, r.warnings);
            if (!transcript_file.empty()) write_file(transcript_file, to_json(r.transcript));
        } else if (*mparty) {
            const auto inst = instance_from_json(load(pub));
            Rng rng(seed);
            std::vector<PartyConfig> ps;
            for (std::size_t i = 0; i < parties; ++i)
                ps.push_back({inst.gens, random_group_word(inst.gens.size(), 1 + rng.below(8), rng)});
            const auto r = multiparty_run(ps);
            bool agree = true;
            for (std::size_t i = 0; i < r.keys.size(); ++i) {
                out << party_name(i) << ' ' << fingerprint(r.keys[i]) << " ops " << r.op_counts[i] << '\n';
                agree = agree && r.keys[i] == r.keys[0];
            }
            out << (agree ? "agree" : "disagree") << '\n';
            print_warnings(out, r.warnings);
            if (!transcript_file.empty()) write_file(transcript_file, to_json(r.transcript));
        } else if (*gdh) {
            Rng rng(seed);
            GdhConfig cfg;
            cfg.pair = build_solvable_pair(pair_n);
            if (mode == "power") {
                if (!is_prime(p) || p < 5) throw UsageError("--p must be a prime >= 5");
                const auto unit = [&] {
                    u64 e;
                    do e = u64(rng.between(1, std::int64_t(p) - 2)); while (std::gcd(e, p - 1) != 1);
                    return e;
                };
                cfg.action = GdhAction::power(p);
                cfg.x0 = power_point(p, primitive_element(ring_field(p)).to_integer().value());
                cfg.gens_A = {power_exponent(p, unit())};
                cfg.gens_B = {power_exponent(p, unit())};
                cfg.word_A = cfg.word_B = {1};
                cfg.pair = make_pair_from_words(FreeWord(2, {kUB, kUA}), FreeWord(2, {kUA, kUB}));
            } else if (mode == "borel") {
                cfg.action = GdhAction::right_multiply();
                cfg.gens_A = cfg.gens_B = borel_gens(q);
                cfg.x0 = Matrix::row_vector(ring_field(q), {1, 1});
                cfg.word_A = random_group_word(3, 1 + rng.below(8), rng);
                cfg.word_B = random_group_word(3, 1 + rng.below(8), rng);
            } else {
                throw UsageError("--mode must be power or borel");
            }
            const auto r = gdh_run(cfg);
            out << "key_A " << fingerprint(r.key_A) << "\nkey_B " << fingerprint(r.key_B) << '\n';
            out << (r.agree ? "agree" : "disagree") << '\n';
            print_warnings(out, r.warnings);
            if (!transcript_file.empty()) write_file(transcript_file, to_json(r.transcript));
        } else if (*keygen) {
            const auto [pk, sk] = hc_keygen(fixture(name), seed);
            write_file(pub, to_json(pk));
            write_file(sec, to_json(sk));
            out << "pub " << sha256_hex(dump(to_json(pk))) << '\n';
        } else if (*encrypt) {
            const auto pk = public_key_from_json(load(pub));
            const FreeWord c = hc_encrypt(pk, parse_letters(pk.presentation.k, msg), seed);
            write_file(out_file, to_json(c));
            out << "ciphertext length " << c.length() << '\n';
        } else if (*decrypt) {
            const auto sk = secret_key_from_json(load(sec));
            const unsigned k = unsigned(sk.sigma.size());
            const FreeWord m = hc_decrypt(sk, word_from_json(k, load(in_file)));
            out << dump(to_json(m)) << '\n';
            if (!pub.empty()) {
                const auto pk = public_key_from_json(load(pub));
                out << "model " << dump(to_json(model_eval(pk.presentation, m))) << '\n';
            }
        } else if (*scsp) {
            if (q < 2 || prime_power(q).second == 0) throw UsageError("--q must be a prime power");
            const Ring f = ring_field(q);
            const auto gens = leaf_generators(leaf_general_linear(2, q));
            Rng rng(seed);
            Json report = Json::array();
            std::size_t ok = 0;
            for (std::size_t i = 0; i < instances; ++i) {
                const Matrix g = random_invertible(f, 2, rng), h = random_invertible(f, 2, rng);
                const Matrix fm = mat_mul(mat_mul(mat_inv(h), g), h);
                const std::uint64_t s = rng.next();
                Json rec;
                rec["seed"] = s;
                try {
                    const auto r = scsp_linear_attack(gens, fm, g, s);
                    const bool verified = mat_mul(mat_mul(mat_inv(r.h), g), r.h) == fm;
                    ok += verified;
                    rec["verdict"] = "found";
                    rec["witness"] = to_json(r.h);
                    rec["verified"] = verified;
                    rec["warnings"] = r.warnings;
                } catch (const Error& e) {
                    rec["verdict"] = errc_name(e.code());
                    rec["witness"] = nullptr;
                    rec["verified"] = false;
                    rec["warnings"] = Json::array();
                }
                report.push_back(rec);
            }
            out << "q " << q << " verified " << ok << "/" << instances << '\n';
            if (!scsp_condition(2, q)) out << "warning: n = 2 is not below q/2\n";
            if (!out_file.empty()) write_file(out_file, report);
        } else if (*linearity) {
            if (q < 2 || prime_power(q).second == 0) throw UsageError("--q must be a prime power");
            const auto t = tree_leaf(leaf_general_linear(2, q));
            const auto gens = tree_eval(t).gens;
            Rng rng(seed);
            std::vector<Matrix> images;
            std::function<Matrix(const Matrix&)> truth;
            if (mode == "conjugation") {
                const Matrix c = random_invertible(ring_field(q), 2, rng);
                truth = [c](const Matrix& g) { return mat_mul(mat_mul(mat_inv(c), g), c); };
            } else if (mode == "frobenius" || mode == "trivial") {
                if (mode == "frobenius" && ring_field(q)->rank(0) < 2)
                    throw UsageError("frobenius needs a non-prime field");
                const auto h = hom_build(t, {mode == "trivial" ? LeafHom{} : LeafHom{1u}});
                truth = [h](const Matrix& g) { return hom_apply(h, g); };
            } else {
                throw UsageError("--map must be conjugation, frobenius or trivial");
            }
            for (const auto& g : gens) images.push_back(truth(g));
            const LinearModel model(gens, images);
            std::size_t agree = 0, wrong = 0, inconclusive = 0;
            for (std::size_t i = 0; i < queries; ++i) {
                const Matrix x = word_eval(gens, random_group_word(gens.size(), 1 + rng.below(12), rng));
                const auto pr = model.predict(x);
                if (!pr)
                    ++inconclusive;
                else if (*pr == truth(x))
                    ++agree;
                else
                    ++wrong;
            }
            out << "agree " << agree << " counterexamples " << wrong << " inconclusive " << inconclusive << '\n';
            out << "span-consistent " << (model.consistent() ? "yes" : "no") << '\n';
        } else if (*coset) {
            const auto pk = public_key_from_json(load(pub));
            const FreeWord c = word_from_json(pk.presentation.k, load(in_file));
            const auto table = coset_table(pk);
            out << "table " << table.reps.size() << '\n';
            if (auto v = coset_attack(pk, table, c, bound)) {
                out << "plaintext " << dump(to_json(v->plain)) << " certificate-length " << v->certificate.length()
                    << '\n';
            } else {
                out << "inconclusive\n";
            }
        } else if (*oenum) {
            const auto inst = instance_from_json(load(pub));
            const std::size_t order = enumerate_group(inst.gens, cap).size();
            out << "order " << order << '\n';
        } else if (*osolve) {
            const auto inst = instance_from_json(load(pub));
            OracleProblem pr;
            std::vector<Matrix> query{matrix_from_json(load(a_file))};
            if (problem == "membership") {
                pr = OracleProblem::Membership;
            } else if (problem == "conjugacy" || problem == "ltp") {
                pr = problem == "ltp" ? OracleProblem::Ltp : OracleProblem::Conjugacy;
                if (b_file.empty()) throw UsageError(problem + " needs --b");
                query.push_back(matrix_from_json(load(b_file)));
            } else {
                throw UsageError("--problem must be membership, conjugacy or ltp");
            }
            const auto e = enumerate_group(inst.gens, cap);
            const auto a = oracle_solve(pr, e, query);
            if (a.found)
                out << "found " << fingerprint(*a.element) << " word " << dump(group_word_to_json(a.word)) << '\n';
            else
                out << "none (exhaustive over " << e.size() << " elements)\n";
        }
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace mgc
