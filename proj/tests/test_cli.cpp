#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mgc/cli.hpp"
#include "mgc/serialize.hpp"

using namespace mgc;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = cli_execute(args, o, e);
    return {c, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mgc_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("version and usage errors") {
    auto v = run({"version"});
    CHECK(v.code == 0);
    CHECK(v.out == std::string("mgc ") + kVersion + "\n");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"gen", "--seed", "1"}).code == 2);  // missing required flags
    CHECK(run({"gen", "--size", "x", "--pub", "a", "--sec", "b"}).code == 2);
    CHECK(run({"hom"}).code == 2);
    CHECK(run({"gdh", "--mode", "sideways"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("generation, sampling and trapdoor pipeline") {
    TempDir d;
    const auto g1 = run({"gen", "--size", "60", "--seed", "7", "--pub", d / "p1.json", "--sec", d / "s1.json"});
    const auto g2 = run({"gen", "--size", "60", "--seed", "7", "--pub", d / "p2.json", "--sec", d / "s2.json"});
    REQUIRE(g1.code == 0);
    CHECK(g1.out == g2.out);
    CHECK(slurp(d / "p1.json") == slurp(d / "p2.json"));
    CHECK(slurp(d / "s1.json") == slurp(d / "s2.json"));
    // files re-parse to values that serialize to the same bytes
    CHECK(dump(to_json(instance_from_json(parse_json(slurp(d / "p1.json"))))) + "\n" == slurp(d / "p1.json"));
    CHECK(dump(to_json(tree_from_json(parse_json(slurp(d / "s1.json"))))) + "\n" == slurp(d / "s1.json"));

    REQUIRE(run({"sample", "--pub", d / "p1.json", "--seed", "3", "--out", d / "e.json"}).code == 0);
    const auto m = run({"member", "--sec", d / "s1.json", "--elem", d / "e.json", "--witness", d / "w.json"});
    CHECK(m.code == 0);
    CHECK(m.out == "yes\n");
    const Witness w = witness_from_json(parse_json(slurp(d / "w.json")));
    const auto t = tree_from_json(parse_json(slurp(d / "s1.json")));
    CHECK(witness_replay(CompiledTree(t), w) == matrix_from_json(parse_json(slurp(d / "e.json"))));

    // a matrix outside the group
    const auto inst = instance_from_json(parse_json(slurp(d / "p1.json")));
    Matrix z(inst.ring, inst.n, inst.n);
    {
        std::ofstream o(d / "z.json");
        o << dump(to_json(z));
    }
    CHECK(run({"member", "--sec", d / "s1.json", "--elem", d / "z.json"}).out == "no\n");

    // ltp: u and u * g
    Matrix u(inst.ring, 1, inst.n);
    u.set_int(0, 0, 1);
    const Matrix g = matrix_from_json(parse_json(slurp(d / "e.json")));
    {
        std::ofstream o1(d / "u.json"), o2(d / "v.json");
        o1 << dump(to_json(u));
        o2 << dump(to_json(mat_mul(u, g)));
    }
    const auto l = run({"ltp", "--sec", d / "s1.json", "--u", d / "u.json", "--v", d / "v.json", "--out", d / "g.json"});
    CHECK(l.code == 0);
    CHECK(mat_mul(u, matrix_from_json(parse_json(slurp(d / "g.json")))) == mat_mul(u, g));
    // u -> 0 has no invertible transporter: library error, exit 1
    {
        std::ofstream o(d / "zero.json");
        o << dump(to_json(Matrix(inst.ring, 1, inst.n)));
    }
    const auto nl = run({"ltp", "--sec", d / "s1.json", "--u", d / "u.json", "--v", d / "zero.json"});
    CHECK(nl.code == 1);
    CHECK(nl.err.find("NoSolution") != std::string::npos);

    CHECK(run({"member", "--sec", d / "missing.json", "--elem", d / "e.json"}).code == 1);
    {
        std::ofstream o(d / "junk.json");
        o << "{\"nodes\":";
    }
    const auto junk = run({"member", "--sec", d / "junk.json", "--elem", d / "e.json"});
    CHECK(junk.code == 1);
    CHECK(junk.err.find("ParseError") != std::string::npos);
}

TEST_CASE("protocols are deterministic in their seeds") {
    TempDir d;
    REQUIRE(run({"gen", "--size", "60", "--seed", "11", "--pub", d / "p.json", "--sec", d / "s.json"}).code == 0);
    for (const std::string& cmd : {"aag", "mparty", "gdh-power", "gdh-borel"}) {
        std::vector<std::string> base;
        if (cmd == "aag") base = {"aag", "--sec", d / "s.json", "--seed", "5"};
        if (cmd == "mparty") base = {"mparty", "--pub", d / "p.json", "--parties", "5", "--seed", "5"};
        if (cmd == "gdh-power") base = {"gdh", "--mode", "power", "--p", "101", "--seed", "5"};
        if (cmd == "gdh-borel") base = {"gdh", "--mode", "borel", "--q", "7", "--seed", "5"};
        auto a = base, b = base;
        a.insert(a.end(), {"--transcript", d / "t1.json"});
        b.insert(b.end(), {"--transcript", d / "t2.json"});
        const auto ra = run(a), rb = run(b);
        CHECK(ra.code == 0);
        CHECK(ra.out == rb.out);
        CHECK(ra.out.find("\nagree\n") != std::string::npos);
        CHECK(slurp(d / "t1.json") == slurp(d / "t2.json"));
        const auto tr = transcript_from_json(parse_json(slurp(d / "t1.json")));
        CHECK(dump(to_json(tr)) + "\n" == slurp(d / "t1.json"));
    }
    CHECK(run({"mparty", "--pub", d / "p.json", "--parties", "1"}).code == 1);
    CHECK(run({"gdh", "--mode", "power", "--p", "100"}).code == 2);
}

TEST_CASE("cryptosystem and attacks") {
    TempDir d;
    REQUIRE(run({"hom", "keygen", "--fixture", "s3", "--seed", "2", "--pub", d / "pk.json", "--sec", d / "sk.json"})
                .code == 0);
    REQUIRE(run({"hom", "encrypt", "--pub", d / "pk.json", "--msg", "1,-2,1", "--seed", "9", "--out", d / "c.json"})
                .code == 0);
    const std::string c1 = slurp(d / "c.json");
    run({"hom", "encrypt", "--pub", d / "pk.json", "--msg", "1,-2,1", "--seed", "9", "--out", d / "c.json"});
    CHECK(slurp(d / "c.json") == c1);
    const auto dec = run({"hom", "decrypt", "--sec", d / "sk.json", "--in", d / "c.json", "--pub", d / "pk.json"});
    CHECK(dec.code == 0);
    const auto pk = public_key_from_json(parse_json(slurp(d / "pk.json")));
    const std::string want = dump(to_json(model_eval(pk.presentation, FreeWord(2, {1, -2, 1}))));
    CHECK(dec.out.find("model " + want) != std::string::npos);

    const auto co = run({"attack", "coset", "--pub", d / "pk.json", "--in", d / "c.json"});
    CHECK(co.code == 0);
    CHECK(co.out.find("table 6") != std::string::npos);
    CHECK(co.out.find("plaintext") != std::string::npos);
    CHECK(run({"attack", "coset", "--pub", d / "pk.json", "--in", d / "c.json", "--bound", "0"}).out.find(
              "inconclusive") != std::string::npos);
    CHECK(run({"hom", "encrypt", "--pub", d / "pk.json", "--msg", "1,x", "--out", d / "c2.json"}).code == 2);
    CHECK(run({"hom", "keygen", "--fixture", "a5", "--pub", d / "a", "--sec", d / "b"}).code == 2);

    const auto sc = run({"attack", "scsp", "--q", "17", "--instances", "20", "--seed", "1", "--report", d / "r1.json"});
    CHECK(sc.code == 0);
    CHECK(sc.out.find("verified 20/20") != std::string::npos);
    run({"attack", "scsp", "--q", "17", "--instances", "20", "--seed", "1", "--report", d / "r2.json"});
    CHECK(slurp(d / "r1.json") == slurp(d / "r2.json"));
    CHECK(run({"attack", "scsp", "--q", "3", "--instances", "5"}).out.find("warning") != std::string::npos);
    CHECK(run({"attack", "scsp", "--q", "6"}).code == 2);

    CHECK(run({"attack", "linearity", "--map", "conjugation", "--q", "5"}).out.find("counterexamples 0 ") !=
          std::string::npos);
    CHECK(run({"attack", "linearity", "--map", "frobenius", "--q", "4"}).out.find("counterexamples 0 ") ==
          std::string::npos);
    CHECK(run({"attack", "linearity", "--map", "frobenius", "--q", "5"}).code == 2);
}

TEST_CASE("oracle commands") {
    TempDir d;
    REQUIRE(run({"gen", "--size", "30", "--seed", "4", "--max-degree", "4", "--pub", d / "p.json", "--sec",
                 d / "s.json"})
                .code == 0);
    const auto en = run({"oracle", "enum", "--pub", d / "p.json", "--cap", "200000"});
    CHECK(en.code == 0);
    CHECK(en.out.rfind("order ", 0) == 0);
    CHECK(run({"oracle", "enum", "--pub", d / "p.json", "--cap", "1"}).code == 1);
    REQUIRE(run({"sample", "--pub", d / "p.json", "--seed", "1", "--out", d / "e.json"}).code == 0);
    const auto so = run({"oracle", "solve", "--pub", d / "p.json", "--problem", "membership", "--a", d / "e.json"});
    CHECK(so.code == 0);
    CHECK(so.out.rfind("found ", 0) == 0);
    CHECK(run({"oracle", "solve", "--pub", d / "p.json", "--problem", "ltp", "--a", d / "e.json"}).code == 2);
    CHECK(run({"oracle", "solve", "--pub", d / "p.json", "--problem", "nope", "--a", d / "e.json"}).code == 2);
}
