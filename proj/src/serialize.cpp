#include "mgc/serialize.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "mgc/error.hpp"

namespace mgc {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Errc::ParseError, what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

u64 as_u64(const Json& j) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        bad("expected a nonnegative integer");
    return j.get<u64>();
}

std::int64_t as_int(const Json& j) {
    if (!j.is_number_integer()) bad("expected an integer");
    return j.get<std::int64_t>();
}

const Json& as_array(const Json& j) {
    if (!j.is_array()) bad("expected an array");
    return j;
}

std::string as_string(const Json& j) {
    if (!j.is_string()) bad("expected a string");
    return j.get<std::string>();
}

template <class T, class F>
std::vector<T> array_of(const Json& j, F&& f) {
    std::vector<T> out;
    for (const auto& x : as_array(j)) out.push_back(f(x));
    return out;
}

Json size_array(const std::vector<std::size_t>& v) {
    Json a = Json::array();
    for (auto x : v) a.push_back(x);
    return a;
}

std::vector<std::size_t> size_array_from(const Json& j) {
    return array_of<std::size_t>(j, [](const Json& x) { return std::size_t(as_u64(x)); });
}

// Library errors keep their codes; malformed JSON becomes ParseError.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
}

}  // namespace

std::string dump(const Json& j) { return j.dump(); }

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
}

// --- rings and matrices ---------------------------------------------------------------

Json to_json(const Ring& r) {
    Json s = Json::array();
    for (const auto& g : r->summands()) {
        Json o;
        o["p"] = g.p;
        o["m"] = g.m;
        o["r"] = g.r;
        Json mod = Json::array();
        for (u64 c : g.modulus) mod.push_back(c);
        o["modulus"] = mod;
        s.push_back(o);
    }
    Json j;
    j["summands"] = s;
    return j;
}

Ring ring_from_json(const Json& j) {
    return guarded([&] {
        std::vector<GaloisRingSpec> ss;
        for (const auto& x : as_array(field(j, "summands"))) {
            GaloisRingSpec g;
            g.p = as_u64(field(x, "p"));
            g.m = unsigned(as_u64(field(x, "m")));
            g.r = unsigned(as_u64(field(x, "r")));
            g.modulus = array_of<u64>(field(x, "modulus"), as_u64);
            ss.push_back(std::move(g));
        }
        Ring r = RingSpec::make(ss);
        if (r->summands() != ss) bad("ring summands are not in canonical order");
        return r;
    });
}

Json to_json(const RingElement& a) {
    Json j = Json::array();
    for (const auto& part : a.summand_coeffs()) {
        Json p = Json::array();
        for (u64 c : part) p.push_back(c);
        j.push_back(p);
    }
    return j;
}

RingElement element_from_json(const Ring& r, const Json& j) {
    return guarded([&] {
        auto parts = array_of<Coeffs>(j, [](const Json& p) { return array_of<u64>(p, as_u64); });
        return RingElement::from_summands(r, parts);
    });
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m.get(i, c)));
        rows.push_back(row);
    }
    Json j;
    j["n"] = m.cols();
    j["ring"] = to_json(m.ring());
    j["rows"] = rows;
    return j;
}

Matrix matrix_from_json(const Json& j) {
    return guarded([&] {
        const std::size_t n = as_u64(field(j, "n"));
        const Ring r = ring_from_json(field(j, "ring"));
        const Json& rows = as_array(field(j, "rows"));
        Matrix m(r, rows.size(), n);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (as_array(rows[i]).size() != n) bad("row " + std::to_string(i) + " has the wrong length");
            for (std::size_t c = 0; c < n; ++c) m.set(i, c, element_from_json(r, rows[i][c]));
        }
        return m;
    });
}

Json to_json(const std::vector<Matrix>& ms) {
    Json j = Json::array();
    for (const auto& m : ms) j.push_back(to_json(m));
    return j;
}

std::vector<Matrix> matrices_from_json(const Json& j) { return array_of<Matrix>(j, matrix_from_json); }

// --- words ----------------------------------------------------------------------------

Json to_json(const FreeWord& w) {
    Json j = Json::array();
    for (int l : w.letters()) j.push_back(l);
    return j;
}

FreeWord word_from_json(unsigned alphabet, const Json& j) {
    return guarded([&] {
        std::vector<int> l;
        for (const auto& x : as_array(j)) {
            const std::int64_t v = as_int(x);
            if (v == 0 || std::uint64_t(v < 0 ? -v : v) > alphabet)
                bad("letter " + std::to_string(v) + " outside the alphabet");
            l.push_back(int(v));
        }
        FreeWord w(alphabet, l);
        if (w.letters() != l) bad("word is not freely reduced");
        return w;
    });
}

Json group_word_to_json(const GroupWord& w) {
    Json j = Json::array();
    for (int l : w) j.push_back(l);
    return j;
}

GroupWord group_word_from_json(const Json& j) {
    return guarded([&] { return array_of<int>(j, [](const Json& x) { return int(as_int(x)); }); });
}

Json to_json(const IdentityWordPair& p) {
    Json j;
    j["wa"] = to_json(p.wa);
    j["wb"] = to_json(p.wb);
    j["schedule_a"] = p.schedule_a;
    j["schedule_b"] = p.schedule_b;
    return j;
}

IdentityWordPair pair_from_json(const Json& j) {
    return guarded([&] {
        IdentityWordPair p;
        p.wa = word_from_json(2, field(j, "wa"));
        p.wb = word_from_json(2, field(j, "wb"));
        const auto longs = [](const Json& x) { return long(as_int(x)); };
        p.schedule_a = array_of<long>(field(j, "schedule_a"), longs);
        p.schedule_b = array_of<long>(field(j, "schedule_b"), longs);
        return p;
    });
}

// --- trees ----------------------------------------------------------------------------

Json to_json(const BaseGroupSpec& b) {
    Json j;
    j["kind"] = leaf_kind_name(b.kind);
    j["n"] = b.n;
    j["q"] = b.q;
    j["power"] = b.power;
    return j;
}

BaseGroupSpec leaf_from_json(const Json& j) {
    return guarded([&] {
        BaseGroupSpec b;
        const auto k = leaf_kind_from_name(as_string(field(j, "kind")));
        if (!k) bad("unknown leaf kind");
        b.kind = *k;
        b.n = unsigned(as_u64(field(j, "n")));
        b.q = as_u64(field(j, "q"));
        b.power = as_u64(field(j, "power"));
        leaf_validate(b);
        return b;
    });
}

Json to_json(const OperationLabel& op) {
    Json j;
    j["kind"] = op_kind_name(op.kind);
    switch (op.kind) {
        case OpKind::RingExtend:
            j["target"] = to_json(op.target);
            break;
        case OpKind::CrtAssemble:
            j["target"] = to_json(op.target);
            j["placement"] = size_array(op.placement);
            break;
        case OpKind::RingRep:
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct:
            j["param"] = op.param;
            break;
        case OpKind::Conjugate:
            j["seed"] = op.seed;
            break;
        case OpKind::Tensor:
        case OpKind::DirectSameDegree:
            break;
    }
    return j;
}

OperationLabel op_from_json(const Json& j) {
    return guarded([&] {
        const auto k = op_kind_from_name(as_string(field(j, "kind")));
        if (!k) bad("unknown operation kind");
        switch (*k) {
            case OpKind::RingExtend:
                return op_ring_extend(ring_from_json(field(j, "target")));
            case OpKind::CrtAssemble:
                return op_crt(ring_from_json(field(j, "target")), size_array_from(field(j, "placement")));
            case OpKind::RingRep:
                return op_ring_rep(unsigned(as_u64(field(j, "param"))));
            case OpKind::WreathImprimitive:
                return op_wreath(unsigned(as_u64(field(j, "param"))), WreathMode::Imprimitive);
            case OpKind::WreathProduct:
                return op_wreath(unsigned(as_u64(field(j, "param"))), WreathMode::Product);
            case OpKind::Conjugate:
                return op_conjugate(as_u64(field(j, "seed")));
            case OpKind::Tensor:
                return op_tensor();
            case OpKind::DirectSameDegree:
                return op_direct();
        }
        bad("unknown operation kind");
    });
}

Json to_json(const DerivationTree& t) {
    Json nodes = Json::array();
    for (const auto& nd : t.nodes) {
        Json o;
        if (nd.is_leaf) {
            o["leaf"] = to_json(nd.leaf);
        } else {
            o["op"] = to_json(nd.op);
            o["children"] = size_array(nd.children);
        }
        nodes.push_back(o);
    }
    Json j;
    j["nodes"] = nodes;
    return j;
}

DerivationTree tree_from_json(const Json& j) {
    return guarded([&] {
        DerivationTree t;
        for (const auto& o : as_array(field(j, "nodes"))) {
            TreeNode nd;
            if (o.contains("leaf")) {
                nd.leaf = leaf_from_json(o.at("leaf"));
            } else {
                nd.is_leaf = false;
                nd.op = op_from_json(field(o, "op"));
                nd.children = size_array_from(field(o, "children"));
                for (auto c : nd.children)
                    if (c >= t.nodes.size()) bad("children must precede their parent");
            }
            t.nodes.push_back(std::move(nd));
        }
        if (t.nodes.empty()) bad("empty tree");
        tree_check(t);
        return t;
    });
}

Json to_json(const GroupInstance& g, bool with_provenance) {
    Json j;
    j["n"] = g.n;
    j["ring"] = to_json(g.ring);
    j["gens"] = to_json(g.gens);
    if (with_provenance) {
        Json prov = Json::array();
        for (const auto& [leaf, steps] : g.provenance) {
            Json s = Json::array();
            for (const auto& st : steps) s.push_back(Json::array({st.node, st.slot}));
            Json o;
            o["leaf"] = leaf;
            o["steps"] = s;
            prov.push_back(o);
        }
        j["provenance"] = prov;
    }
    return j;
}

GroupInstance instance_from_json(const Json& j) {
    return guarded([&] {
        GroupInstance g;
        g.n = as_u64(field(j, "n"));
        g.ring = ring_from_json(field(j, "ring"));
        g.gens = matrices_from_json(field(j, "gens"));
        for (const auto& m : g.gens)
            if (!m.square() || m.n() != g.n || !same_ring(m.ring(), g.ring))
                bad("generator does not match the instance degree and ring");
        if (j.contains("provenance")) {
            for (const auto& o : as_array(j.at("provenance"))) {
                std::vector<ProvenanceStep> steps;
                for (const auto& s : as_array(field(o, "steps"))) {
                    if (as_array(s).size() != 2) bad("provenance step is a pair");
                    steps.push_back({std::size_t(as_u64(s[0])), std::size_t(as_u64(s[1]))});
                }
                g.provenance[as_u64(field(o, "leaf"))] = std::move(steps);
            }
        }
        return g;
    });
}

// --- homomorphisms and witnesses --------------------------------------------------------

Json to_json(const HomSpec& h) {
    Json choices = Json::array();
    for (const auto& c : h.choices) choices.push_back(c ? Json(*c) : Json(nullptr));
    Json shapes = Json::array();
    for (auto s : h.shapes) shapes.push_back(hom_shape_name(s));
    Json j;
    j["tree"] = to_json(h.tree);
    j["choices"] = choices;
    j["image_tree"] = to_json(h.image_tree);
    j["shapes"] = shapes;
    j["exponents"] = h.exponents;
    j["gen_images"] = to_json(h.gen_images);
    return j;
}

HomSpec hom_from_json(const Json& j) {
    return guarded([&] {
        const DerivationTree t = tree_from_json(field(j, "tree"));
        std::vector<LeafHom> choices;
        for (const auto& c : as_array(field(j, "choices")))
            choices.push_back(c.is_null() ? LeafHom{} : LeafHom{unsigned(as_u64(c))});
        HomSpec h = hom_build(t, choices);
        if (dump(to_json(h)) != dump(j)) bad("homomorphism fields disagree with the tree and choices");
        return h;
    });
}

Json to_json(const Witness& w) {
    Json parts = Json::array();
    for (const auto& p : w.parts) parts.push_back(to_json(p));
    Json j;
    j["node"] = w.node;
    j["element"] = w.element.ring() ? to_json(w.element) : Json(nullptr);
    j["k"] = size_array(w.k);
    j["parts"] = parts;
    return j;
}

Witness witness_from_json(const Json& j) {
    return guarded([&] {
        Witness w;
        w.node = as_u64(field(j, "node"));
        const Json& e = field(j, "element");
        if (!e.is_null()) w.element = matrix_from_json(e);
        w.k = size_array_from(field(j, "k"));
        w.parts = array_of<Witness>(field(j, "parts"), witness_from_json);
        return w;
    });
}

// --- transcripts ----------------------------------------------------------------------

Json to_json(const Transcript& t) {
    Json recs = Json::array();
    for (const auto& r : t.records) {
        Json o;
        o["round"] = r.round;
        o["sender"] = r.sender;
        o["receiver"] = r.receiver;
        o["kind"] = r.kind;
        o["payload"] = to_json(r.payload);
        recs.push_back(o);
    }
    Json j;
    j["records"] = recs;
    return j;
}

Transcript transcript_from_json(const Json& j) {
    return guarded([&] {
        Transcript t;
        for (const auto& o : as_array(field(j, "records"))) {
            TranscriptRecord r;
            r.round = unsigned(as_u64(field(o, "round")));
            r.sender = as_string(field(o, "sender"));
            r.receiver = as_string(field(o, "receiver"));
            r.kind = as_string(field(o, "kind"));
            r.payload = matrices_from_json(field(o, "payload"));
            t.records.push_back(std::move(r));
        }
        return t;
    });
}

// --- cryptosystem keys ----------------------------------------------------------------

Json to_json(const Presentation& p) {
    Json rels = Json::array();
    for (const auto& r : p.relations) rels.push_back(to_json(r));
    Json j;
    j["k"] = p.k;
    j["relations"] = rels;
    j["model"] = p.model ? to_json(*p.model) : Json(nullptr);
    return j;
}

Presentation presentation_from_json(const Json& j) {
    return guarded([&] {
        Presentation p;
        p.k = unsigned(as_u64(field(j, "k")));
        p.relations = array_of<FreeWord>(field(j, "relations"), [&](const Json& x) { return word_from_json(p.k, x); });
        const Json& m = field(j, "model");
        if (!m.is_null()) p.model = matrices_from_json(m);
        presentation_validate(p);
        return p;
    });
}

Json to_json(const HomPublicKey& pk) {
    Json xs = Json::array();
    for (const auto& x : pk.x_words) xs.push_back(to_json(x));
    Json j;
    j["presentation"] = to_json(pk.presentation);
    j["x_words"] = xs;
    j["f_table"] = pk.f_table;
    return j;
}

HomPublicKey public_key_from_json(const Json& j) {
    return guarded([&] {
        HomPublicKey pk;
        pk.presentation = presentation_from_json(field(j, "presentation"));
        const unsigned k = pk.presentation.k;
        pk.x_words = array_of<FreeWord>(field(j, "x_words"), [&](const Json& x) { return word_from_json(k, x); });
        pk.f_table = array_of<unsigned>(field(j, "f_table"), [](const Json& x) { return unsigned(as_u64(x)); });
        if (pk.x_words.size() != k || pk.f_table.size() != k) bad("one x_word and one table entry per generator");
        std::vector<bool> seen(k, false);
        for (unsigned t : pk.f_table) {
            if (t >= k || seen[t]) bad("f_table is not a permutation");
            seen[t] = true;
        }
        return pk;
    });
}

Json to_json(const HomSecretKey& sk) {
    Json j;
    j["sigma"] = sk.sigma;
    return j;
}

HomSecretKey secret_key_from_json(const Json& j) {
    return guarded([&] {
        HomSecretKey sk;
        sk.sigma = array_of<unsigned>(field(j, "sigma"), [](const Json& x) { return unsigned(as_u64(x)); });
        std::vector<bool> seen(sk.sigma.size(), false);
        for (unsigned s : sk.sigma) {
            if (s >= sk.sigma.size() || seen[s]) bad("sigma is not a permutation");
            seen[s] = true;
        }
        return sk;
    });
}

// --- fingerprints ---------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(Errc::Failure, "SHA-256 digest failed");
    std::string out;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

std::string fingerprint(const Matrix& m) { return sha256_hex(dump(to_json(m))); }

}  // namespace mgc
