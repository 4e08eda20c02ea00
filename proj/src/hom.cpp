#include "mgc/hom.hpp"

#include <unordered_set>
#include <utility>

#include "mgc/error.hpp"

namespace mgc {

namespace {

// How f treats a scalar matrix lambda*I of the node group, per summand:
// kOne sends it to I, e >= 0 sends it to sigma^e(lambda)*I.
constexpr int kOne = -1;

struct NodeHom {
    HomShape shape = HomShape::Trivial;
    std::vector<unsigned> exps;
    std::vector<int> scalar;
};

WreathMode mode_of(OpKind k) { return k == OpKind::WreathImprimitive ? WreathMode::Imprimitive : WreathMode::Product; }

bool all_zero(const std::vector<unsigned>& e) {
    for (unsigned x : e)
        if (x) return false;
    return true;
}

Matrix frob(const Matrix& g, const std::vector<unsigned>& exps) {
    if (all_zero(exps)) return g;
    return entrywise_frobenius(g, make_automorphism(g.ring(), exps));
}

NodeHom node_hom(const CompiledTree& ct, std::size_t i, const std::vector<NodeHom>& done,
                 const std::vector<LeafHom>& leaf_choice) {
    const TreeNode& node = ct.node(i);
    const NodeType& ty = ct.type(i);
    const std::size_t S = ty.ring->num_summands();
    NodeHom out;
    if (node.is_leaf) {
        const LeafHom& c = leaf_choice[i];
        if (!c) {
            out.shape = HomShape::Trivial;
            out.exps = {0};
            out.scalar = {kOne};
        } else {
            make_automorphism(ty.ring, {*c});
            out.shape = HomShape::Entrywise;
            out.exps = {*c};
            out.scalar = {int(*c)};
        }
        return out;
    }
    const NodeHom& c0 = done[node.children[0]];
    out.exps.assign(S, 0);
    out.scalar.assign(S, kOne);
    switch (node.op.kind) {
        case OpKind::Conjugate:
            out = c0;
            // conjugation by c commutes with sigma only when sigma fixes c
            if (out.shape == HomShape::Entrywise && !all_zero(out.exps)) out.shape = HomShape::General;
            return out;
        case OpKind::RingExtend: {
            const auto& src = ct.embedding(i).source_of;
            for (std::size_t s = 0; s < S; ++s) {
                out.exps[s] = c0.exps[src[s]];
                out.scalar[s] = c0.scalar[src[s]];
            }
            out.shape = c0.shape;
            return out;
        }
        case OpKind::RingRep:
            // the base ring has rank 1, so every Frobenius restricts to the identity
            for (std::size_t s = 0; s < S; ++s) out.scalar[s] = c0.scalar[s] == kOne ? kOne : 0;
            out.shape = c0.shape;
            if (out.shape == HomShape::Entrywise && !all_zero(c0.exps)) out.shape = HomShape::General;
            return out;
        case OpKind::CrtAssemble:
            for (std::size_t s = 0; s < node.op.placement.size(); ++s) {
                out.exps[node.op.placement[s]] = c0.exps[s];
                out.scalar[node.op.placement[s]] = c0.scalar[s];
            }
            out.shape = c0.shape;
            return out;
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct:
            out.exps = c0.exps;
            out.scalar = c0.scalar;
            out.shape = c0.shape == HomShape::Trivial ? HomShape::General : c0.shape;
            return out;
        // direct factors have disjoint supports, so only tensor factors can clash
        case OpKind::DirectSameDegree:
        case OpKind::Tensor: {
            bool all_trivial = true, all_entry = true;
            std::vector<bool> set(S, false);
            for (std::size_t c : node.children) {
                const NodeHom& h = done[c];
                all_trivial = all_trivial && h.shape == HomShape::Trivial;
                all_entry = all_entry && h.shape == HomShape::Entrywise;
                const auto& sup = ct.type(c).support;
                for (std::size_t s = 0; s < S; ++s) {
                    if (!sup[s]) continue;
                    if (set[s] && out.scalar[s] != h.scalar[s])
                        fail(Errc::UnsupportedDecomposition,
                             "tensor factors treat scalars differently on summand " + std::to_string(s) +
                                 "; the map would not be well defined");
                    set[s] = true;
                    out.scalar[s] = h.scalar[s];
                    out.exps[s] = h.exps[s];
                }
            }
            out.shape = all_trivial ? HomShape::Trivial : all_entry ? HomShape::Entrywise : HomShape::General;
            return out;
        }
    }
    fail(Errc::TypeError, "unknown operation");
}

using GenTable = std::vector<std::pair<Matrix, Matrix>>;

// Mirrors the generator construction of CompiledTree, carrying images along.
GenTable node_gens(const CompiledTree& src, const CompiledTree& img, std::size_t i, const std::vector<GenTable>& done,
                   const std::vector<NodeHom>& homs) {
    const TreeNode& node = src.node(i);
    const NodeType& ty = src.type(i);
    GenTable out;
    if (node.is_leaf) {
        for (const auto& g : leaf_generators(node.leaf))
            out.emplace_back(g, homs[i].shape == HomShape::Trivial ? Matrix::identity(ty.ring, ty.n)
                                                                      : frob(g, homs[i].exps));
        return out;
    }
    std::unordered_set<Matrix, MatrixHash> seen;
    auto push = [&](Matrix g, Matrix h) {
        if (g.is_identity()) return;
        if (seen.insert(g).second) out.emplace_back(std::move(g), std::move(h));
    };
    for (std::size_t k = 0; k < node.children.size(); ++k)
        for (const auto& [g, h] : done[node.children[k]]) push(src.lift(i, k, g), img.lift(i, k, h));
    if (node.op.kind == OpKind::WreathImprimitive || node.op.kind == OpKind::WreathProduct) {
        const unsigned m = node.op.param;
        const std::size_t n = src.type(node.children[0]).n;
        Perm swap = perm_identity(m), cycle(m);
        std::swap(swap[0], swap[1]);
        for (unsigned j = 0; j < m; ++j) cycle[j] = (j + 1) % m;
        for (const Perm& k : {swap, cycle}) {
            Matrix p = wreath_perm(ty.ring, n, k, mode_of(node.op.kind));
            push(p, p);
        }
    }
    if (out.empty()) out.emplace_back(Matrix::identity(ty.ring, ty.n), Matrix::identity(ty.ring, ty.n));
    return out;
}

}  // namespace

const char* hom_shape_name(HomShape s) {
    switch (s) {
        case HomShape::Trivial: return "trivial";
        case HomShape::Entrywise: return "entrywise";
        case HomShape::General: return "general";
    }
    return "?";
}

HomSpec hom_build(const DerivationTree& t, const std::vector<LeafHom>& choices) {
    CompiledTree src(t);
    const auto leaves = t.leaves();
    if (choices.size() != leaves.size())
        fail(Errc::ArityMismatch, "expected " + std::to_string(leaves.size()) + " leaf choices, got " +
                                      std::to_string(choices.size()));
    HomSpec h;
    h.tree = t;
    h.choices = choices;
    h.image_tree = t;
    std::vector<LeafHom> per_node(t.nodes.size());
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const std::size_t l = leaves[k];
        if (t.nodes[l].leaf.kind == LeafKind::Trivial && choices[k])
            fail(Errc::InvalidAutomorphism, "trivial leaves only admit f_0");
        per_node[l] = choices[k];
        if (!choices[k]) {
            const auto& b = t.nodes[l].leaf;
            h.image_tree.nodes[l].leaf = leaf_trivial(b.n, b.q);
        }
    }
    CompiledTree img(h.image_tree);

    const std::size_t N = t.nodes.size();
    std::vector<NodeHom> homs;
    homs.reserve(N);
    for (std::size_t i = 0; i < N; ++i) homs.push_back(node_hom(src, i, homs, per_node));

    std::vector<GenTable> tables;
    tables.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        tables.push_back(node_gens(src, img, i, tables, homs));
        const auto& want = src.generators(i);
        bool same = want.size() == tables[i].size();
        for (std::size_t k = 0; same && k < want.size(); ++k) same = want[k] == tables[i][k].first;
        if (!same) fail(Errc::Failure, "generator table out of step with the compiled tree");
    }
    for (std::size_t i = 0; i < N; ++i) {
        h.shapes.push_back(homs[i].shape);
        h.exponents.push_back(homs[i].shape == HomShape::Entrywise ? homs[i].exps : std::vector<unsigned>{});
    }
    for (auto& [g, im] : tables.back()) h.gen_images.push_back(std::move(im));
    return h;
}

HomEvaluator::HomEvaluator(HomSpec h)
    : h_(std::move(h)),
      src_(std::make_shared<const CompiledTree>(h_.tree)),
      img_(std::make_shared<const CompiledTree>(h_.image_tree)),
      trap_(src_) {}

Matrix HomEvaluator::apply(const Matrix& g) const {
    const std::size_t root = src_->root();
    const NodeType& ty = src_->type(root);
    if (!same_ring(g.ring(), ty.ring) || g.rows() != ty.n || g.cols() != ty.n)
        fail(Errc::ShapeMismatch, "argument does not match the group ring and degree");
    switch (h_.shapes[root]) {
        case HomShape::Trivial: return Matrix::identity(ty.ring, ty.n);
        case HomShape::Entrywise: return frob(g, h_.exponents[root]);
        case HomShape::General: break;
    }
    MembershipVerdict v = trap_.membership(g);
    if (!v.accepted) fail(Errc::NotInGroup, "argument is not in the group");
    return replay(*v.witness);
}

Matrix HomEvaluator::replay(const Witness& w) const {
    const std::size_t i = w.node;
    const NodeType& ty = src_->type(i);
    if (h_.shapes[i] == HomShape::Trivial) return Matrix::identity(ty.ring, ty.n);
    if (h_.shapes[i] == HomShape::Entrywise) return frob(witness_replay(*src_, w), h_.exponents[i]);
    const TreeNode& node = src_->node(i);
    std::vector<Matrix> parts;
    for (const auto& p : w.parts) parts.push_back(replay(p));
    switch (node.op.kind) {
        case OpKind::Tensor: return mat_kron_all(parts);
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct: return wreath_rep(parts, w.k, mode_of(node.op.kind));
        case OpKind::DirectSameDegree: {
            Matrix g = parts[0];
            for (std::size_t k = 1; k < parts.size(); ++k) g = mat_mul(g, parts[k]);
            return g;
        }
        default: return img_->lift(i, 0, parts[0]);
    }
}

Matrix hom_apply(const HomSpec& h, const Matrix& g) { return HomEvaluator(h).apply(g); }

}  // namespace mgc
