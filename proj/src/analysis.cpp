#include "mgc/analysis.hpp"

#include <algorithm>

#include "mgc/error.hpp"
#include "mgc/linalg.hpp"

namespace mgc {

namespace {

constexpr std::size_t kScspDraws = 64;
constexpr std::size_t kCosetCap = 4096;

Matrix vec(const Matrix& a) {
    std::vector<RingElement> e;
    e.reserve(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e.push_back(a.get(i, j));
    return Matrix::from_entries(a.ring(), 1, a.rows() * a.cols(), e);
}

// sum c_i * parts[i] with c read from a 1 x k row
Matrix combine(const Matrix& c, const std::vector<Matrix>& parts) {
    Matrix out(parts.front().ring(), parts.front().rows(), parts.front().cols());
    for (std::size_t i = 0; i < parts.size(); ++i) out = mat_add(out, mat_scale(parts[i], c.get(0, i)));
    return out;
}

void check_square_family(const std::vector<Matrix>& gens) {
    if (gens.empty()) fail(Errc::InvalidArgument, "need at least one generator");
    for (const auto& g : gens)
        if (!g.square() || g.n() != gens[0].n() || !same_ring(g.ring(), gens[0].ring()))
            fail(Errc::ShapeMismatch, "generators must be square of one degree over one ring");
}

}  // namespace

// --- oracles ----------------------------------------------------------------------------

std::optional<std::size_t> EnumeratedGroup::find(const Matrix& g) const {
    auto it = index.find(g);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

GroupWord EnumeratedGroup::word(std::size_t i) const {
    GroupWord w;
    while (i != 0) {
        w.push_back(letter[i]);
        i = parent[i];
    }
    std::reverse(w.begin(), w.end());
    return w;
}

EnumeratedGroup enumerate_group(const std::vector<Matrix>& gens, std::size_t cap) {
    check_square_family(gens);
    for (const auto& g : gens)
        if (!is_invertible(g)) fail(Errc::NonInvertible, "generator is not invertible");
    EnumeratedGroup e;
    e.gens = gens;
    e.cap = cap;
    const Matrix id = Matrix::identity(gens[0].ring(), gens[0].n());
    e.elements.push_back(id);
    e.parent.push_back(0);
    e.letter.push_back(0);
    e.index.emplace(id, 0);
    // finite group: closing under the generators alone already gives inverses
    for (std::size_t head = 0; head < e.elements.size(); ++head) {
        for (std::size_t j = 0; j < gens.size(); ++j) {
            Matrix x = mat_mul(e.elements[head], gens[j]);
            if (e.index.count(x)) continue;
            if (e.elements.size() >= cap)
                fail(Errc::CapExceeded, "group has more than " + std::to_string(cap) + " elements");
            e.index.emplace(x, e.elements.size());
            e.elements.push_back(std::move(x));
            e.parent.push_back(head);
            e.letter.push_back(int(j) + 1);
        }
    }
    return e;
}

OracleAnswer oracle_solve(OracleProblem problem, const EnumeratedGroup& e, const std::vector<Matrix>& query) {
    const std::size_t n = e.elements.front().n();
    const auto answer = [&](std::size_t i) {
        return OracleAnswer{true, e.elements[i], e.word(i)};
    };
    switch (problem) {
        case OracleProblem::Membership: {
            if (query.size() != 1 || !query[0].square() || query[0].n() != n)
                fail(Errc::ShapeMismatch, "membership takes one matrix of the group degree");
            if (auto i = e.find(query[0])) return answer(*i);
            return {};
        }
        case OracleProblem::Conjugacy: {
            if (query.size() != 2) fail(Errc::ShapeMismatch, "conjugacy takes {f, g}");
            for (const auto& m : query)
                if (!m.square() || m.n() != n) fail(Errc::ShapeMismatch, "conjugacy query of the wrong degree");
            const Matrix &f = query[0], &g = query[1];
            for (std::size_t i = 0; i < e.size(); ++i)
                if (mat_mul(e.elements[i], f) == mat_mul(g, e.elements[i])) return answer(i);
            return {};
        }
        case OracleProblem::Ltp: {
            if (query.size() != 2 || query[0].cols() != n || query[1].cols() != n ||
                query[0].rows() != query[1].rows())
                fail(Errc::ShapeMismatch, "ltp takes two stacks {U, V} of equal shape");
            for (std::size_t i = 0; i < e.size(); ++i)
                if (mat_mul(query[0], e.elements[i]) == query[1]) return answer(i);
            return {};
        }
    }
    fail(Errc::InvalidArgument, "unknown oracle problem");
}

// --- SCSP --------------------------------------------------------------------------------

std::vector<Matrix> algebra_span(const std::vector<Matrix>& gens) {
    check_square_family(gens);
    const std::size_t n = gens[0].n();
    std::vector<Matrix> basis{Matrix::identity(gens[0].ring(), n)};
    std::vector<Matrix> rows{vec(basis[0])};
    std::vector<Matrix> frontier = basis;
    for (std::size_t round = 0; round < n * n && !frontier.empty(); ++round) {
        std::vector<Matrix> next;
        for (const auto& b : frontier)
            for (const auto& g : gens) {
                Matrix p = mat_mul(b, g);
                Matrix v = vec(p);
                if (solve_left(mat_vstack(rows), v).solvable) continue;
                rows.push_back(std::move(v));
                basis.push_back(p);
                next.push_back(std::move(p));
            }
        frontier = std::move(next);
    }
    return basis;
}

bool scsp_condition(std::size_t n, u64 q) { return 2 * u64(n) < q; }

ScspResult scsp_linear_attack(const std::vector<Matrix>& gens_H2, const Matrix& f, const Matrix& g,
                              std::uint64_t seed) {
    check_square_family(gens_H2);
    if (!f.square() || !g.square() || f.n() != g.n() || f.n() != gens_H2[0].n())
        fail(Errc::ShapeMismatch, "f, g and H_2 need one degree");
    if (!f.ring()->is_field()) fail(Errc::InvalidArgument, "the linear attack works over a field");
    ScspResult r;
    const std::size_t n = f.n();
    const u64 q = f.ring()->cardinality();
    if (!scsp_condition(n, q))
        r.warnings.push_back("n = " + std::to_string(n) + " is not below q/2 = " + std::to_string(q) + "/2");

    const auto span = algebra_span(gens_H2);
    r.algebra_dim = span.size();
    // h = sum c_i A_i with h f - g h = 0 is linear in c
    std::vector<Matrix> rows;
    for (const auto& a : span) rows.push_back(vec(mat_sub(mat_mul(a, f), mat_mul(g, a))));
    const auto sol = solve_left(mat_vstack(rows), Matrix(f.ring(), 1, n * n));
    if (sol.kernel.empty()) fail(Errc::NoSolutionSpace, "only h = 0 solves h f = g h in the algebra");
    r.solution_dim = sol.kernel.size();

    Rng rng(seed);
    for (r.draws = 1; r.draws <= kScspDraws; ++r.draws) {
        Matrix h = combine(random_solution(sol, rng), span);
        if (!is_invertible(h)) continue;
        if (!(mat_mul(mat_mul(mat_inv(h), g), h) == f)) fail(Errc::Failure, "solution failed verification");
        r.h = std::move(h);
        return r;
    }
    fail(Errc::Failure, "no invertible solution in " + std::to_string(kScspDraws) + " draws");
}

// --- linearity ----------------------------------------------------------------------------

LinearModel::LinearModel(const std::vector<Matrix>& gens, const std::vector<Matrix>& images) {
    check_square_family(gens);
    check_square_family(images);
    if (gens.size() != images.size()) fail(Errc::ArityMismatch, "one image per generator");
    const std::size_t n = gens[0].n();
    basis_.push_back(Matrix::identity(gens[0].ring(), n));
    images_.push_back(Matrix::identity(images[0].ring(), images[0].n()));
    std::vector<std::size_t> frontier{0};
    for (std::size_t round = 0; round < n * n && !frontier.empty(); ++round) {
        std::vector<std::size_t> next;
        for (std::size_t b : frontier)
            for (std::size_t j = 0; j < gens.size(); ++j) {
                Matrix p = mat_mul(basis_[b], gens[j]);
                Matrix fp = mat_mul(images_[b], images[j]);
                if (auto c = coords(p)) {
                    if (!(combine(*c, images_) == fp)) consistent_ = false;
                    continue;
                }
                next.push_back(basis_.size());
                basis_.push_back(std::move(p));
                images_.push_back(std::move(fp));
            }
        frontier = std::move(next);
    }
}

std::optional<Matrix> LinearModel::coords(const Matrix& query) const {
    if (!query.square() || query.n() != basis_[0].n() || !same_ring(query.ring(), basis_[0].ring())) return std::nullopt;
    std::vector<Matrix> rows;
    for (const auto& b : basis_) rows.push_back(vec(b));
    auto sol = solve_left(mat_vstack(rows), vec(query));
    if (!sol.solvable) return std::nullopt;
    return sol.particular;
}

std::optional<Matrix> LinearModel::predict(const Matrix& query) const {
    auto c = coords(query);
    if (!c) return std::nullopt;
    return combine(*c, images_);
}

std::optional<Matrix> linearity_attack(const std::vector<Matrix>& gens, const std::vector<Matrix>& images,
                                       const Matrix& query) {
    return LinearModel(gens, images).predict(query);
}

// --- Stallings folding with tags ------------------------------------------------------------

SubgroupGraph::SubgroupGraph(const std::vector<FreeWord>& basis) : basis_(basis) {
    const unsigned m = unsigned(basis.size());
    unsigned alphabet = 0;
    for (const auto& b : basis) {
        if (alphabet && b.alphabet() != alphabet) fail(Errc::AlphabetMismatch, "basis words over different alphabets");
        alphabet = b.alphabet();
    }
    base_label_ = FreeWord(std::max(m, 1u));
    const FreeWord eps(std::max(m, 1u));
    std::vector<bool> alive;
    std::size_t nv = 1;
    const auto add = [&](std::size_t from, std::size_t to, int label, FreeWord tag) {
        edges_.push_back({from, to, label, std::move(tag)});
        alive.push_back(true);
    };
    for (unsigned i = 0; i < m; ++i) {
        const auto& l = basis[i].letters();
        std::size_t cur = 0;
        for (std::size_t j = 0; j < l.size(); ++j) {
            const std::size_t nxt = j + 1 == l.size() ? 0 : nv++;
            const FreeWord tau = j == 0 ? FreeWord::letter(m, int(i) + 1) : eps;
            if (l[j] > 0)
                add(cur, nxt, l[j], tau);
            else
                add(nxt, cur, -l[j], fw_inv(tau));
            cur = nxt;
        }
    }

    // fold until every vertex has at most one edge per signed label
    std::vector<bool> vertex_alive(nv, true);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::unordered_map<int, std::size_t>> seen(nv);
        for (std::size_t e = 0; e < edges_.size() && !changed; ++e) {
            if (!alive[e]) continue;
            for (int side = 0; side < 2 && !changed; ++side) {
                const std::size_t u = side == 0 ? edges_[e].from : edges_[e].to;
                const int key = side == 0 ? edges_[e].label : -edges_[e].label;
                auto [it, fresh] = seen[u].emplace(key, e);
                if (fresh) continue;
                const std::size_t e1 = it->second, e2 = e;
                const auto far = [&](std::size_t x) { return key > 0 ? edges_[x].to : edges_[x].from; };
                const auto tau = [&](std::size_t x) { return key > 0 ? edges_[x].tag : fw_inv(edges_[x].tag); };
                const std::size_t v1 = far(e1), v2 = far(e2);
                alive[e2] = false;
                changed = true;
                if (v1 == v2) break;
                // X-label(v1) = X-label(v2) * o
                const FreeWord o = fw_mul(fw_inv(tau(e2)), tau(e1));
                const FreeWord oi = fw_inv(o);
                for (std::size_t x = 0; x < edges_.size(); ++x) {
                    if (!alive[x]) continue;
                    if (edges_[x].from == v2) {
                        edges_[x].from = v1;
                        edges_[x].tag = fw_mul(oi, edges_[x].tag);
                    }
                    if (edges_[x].to == v2) {
                        edges_[x].to = v1;
                        edges_[x].tag = fw_mul(edges_[x].tag, o);
                    }
                }
                if (base_ == v2) {
                    base_ = v1;
                    base_label_ = fw_mul(base_label_, o);
                }
                vertex_alive[v2] = false;
            }
        }
    }

    std::vector<Edge> kept;
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (alive[e]) kept.push_back(edges_[e]);
    edges_ = std::move(kept);
    out_.assign(nv, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        out_[edges_[e].from][edges_[e].label] = e;
        out_[edges_[e].to][-edges_[e].label] = e;
    }
    live_ = std::size_t(std::count(vertex_alive.begin(), vertex_alive.end(), true));
}

std::optional<FreeWord> SubgroupGraph::rewrite(const FreeWord& w) const {
    std::size_t cur = base_;
    FreeWord acc = base_label_;
    for (int l : w.letters()) {
        auto it = out_[cur].find(l);
        if (it == out_[cur].end()) return std::nullopt;
        const Edge& e = edges_[it->second];
        if (l > 0) {
            acc = fw_mul(acc, e.tag);
            cur = e.to;
        } else {
            acc = fw_mul(acc, fw_inv(e.tag));
            cur = e.from;
        }
    }
    if (cur != base_) return std::nullopt;
    return fw_mul(acc, fw_inv(base_label_));
}

std::optional<FreeWord> subgroup_rewrite(const std::vector<FreeWord>& basis, const FreeWord& w) {
    return SubgroupGraph(basis).rewrite(w);
}

// --- coset attack -------------------------------------------------------------------------

CosetTable coset_table(const HomPublicKey& pk) {
    const auto& p = pk.presentation;
    if (!p.model) fail(Errc::InvalidArgument, "the coset attack needs a finite model");
    const auto h = enumerate_group(*p.model, kCosetCap);
    CosetTable t;
    for (std::size_t i = 0; i < h.size(); ++i) {
        FreeWord w(p.k, h.word(i));
        t.reps.push_back(hc_substitute(pk, w));
        t.plain.push_back(std::move(w));
        t.values.push_back(h.elements[i]);
    }
    t.graph = std::make_shared<SubgroupGraph>(pk.x_words);
    return t;
}

std::optional<CosetVerdict> coset_attack(const HomPublicKey& pk, const CosetTable& table, const FreeWord& c,
                                         std::size_t length_bound) {
    const auto& p = pk.presentation;
    if (!p.model || !table.graph || c.alphabet() != p.k) return std::nullopt;
    for (std::size_t i = 0; i < table.reps.size(); ++i) {
        const FreeWord d = fw_mul(c, fw_inv(table.reps[i]));
        auto u = table.graph->rewrite(d);
        if (!u || u->length() > length_bound) continue;
        // certificate check: u spells d and f(u) dies in the model
        if (!(fw_substitute(*u, pk.x_words) == d)) continue;
        std::vector<int> fu;
        for (int l : u->letters()) {
            const int y = int(pk.f_table[std::size_t(l < 0 ? -l : l) - 1]) + 1;
            fu.push_back(l < 0 ? -y : y);
        }
        if (!model_eval(p, FreeWord(p.k, fu)).is_identity()) continue;
        return CosetVerdict{i, table.plain[i], std::move(*u)};
    }
    return std::nullopt;
}

}  // namespace mgc
