#include "mgc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

namespace {

std::size_t bit_length(u64 q) {
    std::size_t b = 0;
    while (q) {
        ++b;
        q >>= 1;
    }
    return b;
}

bool is_field_ring(const Ring& r) { return r->num_summands() == 1 && r->summands()[0].m == 1; }

Matrix dedupe_identity_fallback(const Ring& ring, std::size_t n) { return Matrix::identity(ring, n); }

void push_unique(std::vector<Matrix>& out, std::unordered_set<Matrix, MatrixHash>& seen, Matrix g) {
    if (g.is_identity()) return;
    if (seen.insert(g).second) out.push_back(std::move(g));
}

RingElement power_basis(const Ring& f, unsigned j) {
    Coeffs c(f->width(), 0);
    c[j] = 1;
    return RingElement(f, std::move(c));
}

}  // namespace

// --- base groups ---------------------------------------------------------------

BaseGroupSpec leaf_unipotent(u64 p) { return {LeafKind::UnipotentCyclic, 2, p}; }
BaseGroupSpec leaf_special_linear(unsigned n, u64 q) { return {LeafKind::SpecialLinear, n, q}; }
BaseGroupSpec leaf_general_linear(unsigned n, u64 q) { return {LeafKind::GeneralLinear, n, q}; }
BaseGroupSpec leaf_diagonal(unsigned n, u64 q, u64 power) { return {LeafKind::DiagonalCyclic, n, q, power}; }
BaseGroupSpec leaf_trivial(unsigned n, u64 q) { return {LeafKind::Trivial, n, q}; }

const char* leaf_kind_name(LeafKind k) {
    switch (k) {
        case LeafKind::UnipotentCyclic: return "unipotent-cyclic";
        case LeafKind::SpecialLinear: return "special-linear";
        case LeafKind::GeneralLinear: return "general-linear";
        case LeafKind::DiagonalCyclic: return "diagonal-cyclic";
        case LeafKind::Trivial: return "trivial";
    }
    return "?";
}

std::optional<LeafKind> leaf_kind_from_name(const std::string& s) {
    for (auto k : {LeafKind::UnipotentCyclic, LeafKind::SpecialLinear, LeafKind::GeneralLinear,
                   LeafKind::DiagonalCyclic, LeafKind::Trivial})
        if (s == leaf_kind_name(k)) return k;
    return std::nullopt;
}

void leaf_validate(const BaseGroupSpec& b) {
    auto [p, k] = prime_power(b.q);
    if (!p) fail(Errc::TypeError, "leaf field order " + std::to_string(b.q) + " is not a prime power");
    if (b.n < 1 || b.n > 64) fail(Errc::TypeError, "leaf degree out of range");
    if (b.kind == LeafKind::UnipotentCyclic && (b.n != 2 || k != 1))
        fail(Errc::TypeError, "unipotent-cyclic needs degree 2 over a prime field");
    if (b.kind == LeafKind::DiagonalCyclic && b.q - 1 > (u64(1) << 20))
        fail(Errc::TypeError, "diagonal-cyclic generator order above 2^20");
    if (b.kind == LeafKind::DiagonalCyclic && b.power == 0) fail(Errc::TypeError, "diagonal-cyclic power must be positive");
}

Ring leaf_ring(const BaseGroupSpec& b) {
    leaf_validate(b);
    return ring_field(b.q);
}

RingElement primitive_element(const Ring& field) {
    if (!is_field_ring(field)) fail(Errc::InvalidArgument, "primitive_element needs a field");
    const u64 q = field->cardinality();
    const auto fac = factorize(q - 1);
    for (const auto& a : ring_elements(field, q)) {
        if (a.is_zero()) continue;
        bool ok = true;
        for (auto [l, e] : fac)
            if (ring_pow(a, (q - 1) / l).is_one()) {
                ok = false;
                break;
            }
        if (ok) return a;
    }
    fail(Errc::Failure, "no primitive element");
}

namespace {

Matrix diag_generator(const BaseGroupSpec& b, const Ring& f) {
    const RingElement w = ring_pow(primitive_element(f), b.power % (b.q - 1));
    Matrix d(f, b.n, b.n);
    RingElement cur = w;
    for (unsigned i = 0; i < b.n; ++i) {
        d.set(i, i, cur);
        cur = cur * w;
    }
    return d;
}

Matrix transvection(const Ring& f, unsigned n, unsigned i, unsigned j, const RingElement& a) {
    Matrix t = Matrix::identity(f, n);
    t.set(i, j, a);
    return t;
}

}  // namespace

std::vector<Matrix> leaf_generators(const BaseGroupSpec& b) {
    const Ring f = leaf_ring(b);
    const unsigned r = f->rank(0);
    std::vector<Matrix> out;
    switch (b.kind) {
        case LeafKind::UnipotentCyclic:
            out.push_back(Matrix::from_ints(f, {{1, 1}, {0, 1}}));
            break;
        case LeafKind::SpecialLinear:
        case LeafKind::GeneralLinear:
            // Adjacent transvections with an additive basis of GF(q) generate SL.
            for (unsigned i = 0; i + 1 < b.n; ++i)
                for (unsigned j = 0; j < r; ++j) {
                    out.push_back(transvection(f, b.n, i, i + 1, power_basis(f, j)));
                    out.push_back(transvection(f, b.n, i + 1, i, power_basis(f, j)));
                }
            if (b.kind == LeafKind::GeneralLinear && b.q > 2) {
                Matrix d = Matrix::identity(f, b.n);
                d.set(0, 0, primitive_element(f));
                out.push_back(d);
            }
            break;
        case LeafKind::DiagonalCyclic:
            if (b.q > 2) out.push_back(diag_generator(b, f));
            break;
        case LeafKind::Trivial:
            break;
    }
    if (out.empty()) out.push_back(Matrix::identity(f, b.n));
    return out;
}

bool leaf_contains(const BaseGroupSpec& b, const Matrix& g) {
    const Ring f = leaf_ring(b);
    if (!same_ring(g.ring(), f) || g.rows() != b.n || g.cols() != b.n) return false;
    switch (b.kind) {
        case LeafKind::UnipotentCyclic:
            return g.get(0, 0).is_one() && g.get(1, 1).is_one() && g.get(1, 0).is_zero();
        case LeafKind::SpecialLinear:
            return mat_det(g).is_one();
        case LeafKind::GeneralLinear:
            return mat_det(g).is_unit();
        case LeafKind::DiagonalCyclic: {
            for (unsigned i = 0; i < b.n; ++i)
                for (unsigned j = 0; j < b.n; ++j)
                    if (i != j && !g.get(i, j).is_zero()) return false;
            if (b.q == 2) return g.is_identity();
            const Matrix d = diag_generator(b, f);
            const RingElement w = d.get(0, 0), target = g.get(0, 0);
            RingElement cur = RingElement::one(f);
            for (u64 k = 0; k + 1 < b.q; ++k) {
                if (cur == target) {
                    // g must be d^k; check every diagonal entry.
                    for (unsigned i = 1; i < b.n; ++i)
                        if (!(ring_pow(d.get(i, i), k) == g.get(i, i))) return false;
                    return true;
                }
                cur = cur * w;
            }
            return false;
        }
        case LeafKind::Trivial:
            return g.is_identity();
    }
    return false;
}

u64 leaf_order(const BaseGroupSpec& b) {
    leaf_validate(b);
    auto sat = [](u64 a, u64 c) -> u64 {
        const u128 v = static_cast<u128>(a) * c;
        return v > UINT64_MAX ? UINT64_MAX : static_cast<u64>(v);
    };
    switch (b.kind) {
        case LeafKind::UnipotentCyclic: return b.q;
        case LeafKind::DiagonalCyclic: return (b.q - 1) / gcd_u64(b.q - 1, b.power);
        case LeafKind::Trivial: return 1;
        case LeafKind::SpecialLinear:
        case LeafKind::GeneralLinear: {
            u64 order = b.kind == LeafKind::GeneralLinear ? b.q - 1 : 1;
            for (unsigned i = 0; i < b.n * (b.n - 1) / 2; ++i) order = sat(order, b.q);
            for (unsigned i = 2; i <= b.n; ++i) order = sat(order, saturating_pow(b.q, i) - 1);
            return order;
        }
    }
    return 1;
}

Matrix leaf_random_element(const BaseGroupSpec& b, Rng& rng) {
    const Ring f = leaf_ring(b);
    switch (b.kind) {
        case LeafKind::UnipotentCyclic: {
            Matrix g = Matrix::identity(f, 2);
            g.set(0, 1, random_element(f, rng));
            return g;
        }
        case LeafKind::SpecialLinear: {
            Matrix g = random_invertible(f, b.n, rng);
            const RingElement dinv = ring_inv(mat_det(g));
            for (unsigned j = 0; j < b.n; ++j) g.set(0, j, g.get(0, j) * dinv);
            return g;
        }
        case LeafKind::GeneralLinear:
            return random_invertible(f, b.n, rng);
        case LeafKind::DiagonalCyclic:
            if (b.q == 2) return Matrix::identity(f, b.n);
            return mat_pow(diag_generator(b, f), static_cast<std::int64_t>(rng.below(leaf_order(b))));
        case LeafKind::Trivial:
            return Matrix::identity(f, b.n);
    }
    return Matrix::identity(f, b.n);
}

std::size_t leaf_size(const BaseGroupSpec& b) {
    const std::size_t base = std::size_t(b.n) * b.n * bit_length(b.q);
    return b.kind == LeafKind::DiagonalCyclic && b.power != 1 ? base + bit_length(b.power) : base;
}

// --- labels and trees --------------------------------------------------------------

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::RingExtend: return "ring-extend";
        case OpKind::RingRep: return "ring-rep";
        case OpKind::CrtAssemble: return "crt-assemble";
        case OpKind::Tensor: return "tensor";
        case OpKind::DirectSameDegree: return "direct";
        case OpKind::WreathImprimitive: return "wreath-imprimitive";
        case OpKind::WreathProduct: return "wreath-product";
        case OpKind::Conjugate: return "conjugate";
    }
    return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& s) {
    for (auto k : {OpKind::RingExtend, OpKind::RingRep, OpKind::CrtAssemble, OpKind::Tensor, OpKind::DirectSameDegree,
                   OpKind::WreathImprimitive, OpKind::WreathProduct, OpKind::Conjugate})
        if (s == op_kind_name(k)) return k;
    return std::nullopt;
}

bool operator==(const OperationLabel& a, const OperationLabel& b) {
    if (a.kind != b.kind || a.placement != b.placement || a.param != b.param || a.seed != b.seed) return false;
    if (!a.target || !b.target) return !a.target && !b.target;
    return same_ring(a.target, b.target);
}

std::vector<std::size_t> DerivationTree::leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_leaf) out.push_back(i);
    return out;
}

DerivationTree tree_leaf(const BaseGroupSpec& b) {
    DerivationTree t;
    TreeNode n;
    n.is_leaf = true;
    n.leaf = b;
    t.nodes.push_back(n);
    return t;
}

DerivationTree tree_op(const OperationLabel& op, const std::vector<DerivationTree>& children) {
    DerivationTree t;
    TreeNode top;
    top.is_leaf = false;
    top.op = op;
    for (const auto& c : children) {
        const std::size_t base = t.nodes.size();
        for (TreeNode n : c.nodes) {
            for (auto& ch : n.children) ch += base;
            t.nodes.push_back(std::move(n));
        }
        top.children.push_back(t.nodes.size() - 1);
    }
    t.nodes.push_back(std::move(top));
    return t;
}

OperationLabel op_ring_extend(const Ring& target) {
    OperationLabel o;
    o.kind = OpKind::RingExtend;
    o.target = target;
    return o;
}

OperationLabel op_ring_rep(unsigned d) {
    OperationLabel o;
    o.kind = OpKind::RingRep;
    o.param = d;
    return o;
}

OperationLabel op_crt(const Ring& target, std::vector<std::size_t> placement) {
    OperationLabel o;
    o.kind = OpKind::CrtAssemble;
    o.target = target;
    o.placement = std::move(placement);
    return o;
}

OperationLabel op_tensor() {
    OperationLabel o;
    o.kind = OpKind::Tensor;
    return o;
}

OperationLabel op_direct() {
    OperationLabel o;
    o.kind = OpKind::DirectSameDegree;
    return o;
}

OperationLabel op_wreath(unsigned m, WreathMode mode) {
    OperationLabel o;
    o.kind = mode == WreathMode::Imprimitive ? OpKind::WreathImprimitive : OpKind::WreathProduct;
    o.param = m;
    return o;
}

OperationLabel op_conjugate(u64 seed) {
    OperationLabel o;
    o.kind = OpKind::Conjugate;
    o.seed = seed;
    return o;
}

std::size_t label_size(const TreeNode& node) {
    if (node.is_leaf) return leaf_size(node.leaf);
    const auto& op = node.op;
    switch (op.kind) {
        case OpKind::RingExtend: return op.target ? op.target->num_summands() : 1;
        case OpKind::RingRep: return op.param;
        case OpKind::CrtAssemble: return op.target ? op.target->num_summands() : 1;
        case OpKind::Tensor:
        case OpKind::DirectSameDegree: return node.children.size();
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct: return op.param;
        case OpKind::Conjugate: return 1;
    }
    return 1;
}

std::size_t tree_size(const DerivationTree& t) {
    std::size_t s = 0;
    for (const auto& n : t.nodes) s += label_size(n) + n.children.size();
    return s;
}

// --- typing ------------------------------------------------------------------------

namespace {

std::size_t ipow(std::size_t b, unsigned e) {
    std::size_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= b;
        if (r > (std::size_t(1) << 40)) return r;
    }
    return r;
}

[[noreturn]] void type_error(std::size_t node, const std::string& what) {
    fail(Errc::TypeError, "node " + std::to_string(node) + ": " + what);
}

NodeType type_node(const DerivationTree& t, std::size_t i, const std::vector<NodeType>& types, RingEmbedding* emb) {
    const TreeNode& node = t.nodes[i];
    if (node.is_leaf) {
        if (!node.children.empty()) type_error(i, "leaf with children");
        Ring f;
        try {
            f = leaf_ring(node.leaf);
        } catch (const Error& e) {
            type_error(i, e.what());
        }
        return {node.leaf.n, f, std::vector<bool>(1, node.leaf.kind != LeafKind::Trivial)};
    }
    const auto& op = node.op;
    const std::size_t arity = node.children.size();
    const bool unary = op.kind != OpKind::Tensor && op.kind != OpKind::DirectSameDegree;
    if (unary ? arity != 1 : arity < 2) type_error(i, std::string(op_kind_name(op.kind)) + " has the wrong arity");
    const NodeType& c0 = types[node.children[0]];
    switch (op.kind) {
        case OpKind::RingExtend: {
            if (!op.target) type_error(i, "ring-extend without target");
            RingEmbedding e;
            try {
                e = ring_extension(c0.ring, op.target);
            } catch (const Error& err) {
                type_error(i, err.what());
            }
            NodeType out{c0.n, op.target, std::vector<bool>(op.target->num_summands(), false)};
            for (std::size_t s = 0; s < out.support.size(); ++s) out.support[s] = c0.support[e.source_of[s]];
            if (emb) *emb = std::move(e);
            return out;
        }
        case OpKind::RingRep: {
            if (op.param < 1) type_error(i, "ring-rep needs d >= 1");
            Ring base;
            try {
                base = rep_base_ring(c0.ring, op.param);
            } catch (const Error& err) {
                type_error(i, err.what());
            }
            if (base->num_summands() != c0.ring->num_summands()) type_error(i, "ring-rep summand count");
            return {c0.n * op.param, base, c0.support};
        }
        case OpKind::CrtAssemble: {
            if (!op.target) type_error(i, "crt-assemble without target");
            const auto& S = *c0.ring;
            const auto& B = *op.target;
            if (op.placement.size() != S.num_summands()) type_error(i, "placement size");
            std::vector<bool> used(B.num_summands(), false);
            NodeType out{c0.n, op.target, std::vector<bool>(B.num_summands(), false)};
            for (std::size_t s = 0; s < S.num_summands(); ++s) {
                const std::size_t tgt = op.placement[s];
                if (tgt >= B.num_summands() || used[tgt] || !(B.summands()[tgt] == S.summands()[s]))
                    type_error(i, "placement does not match the target summands");
                if (s > 0 && tgt <= op.placement[s - 1]) type_error(i, "placement must be increasing");
                used[tgt] = true;
                out.support[tgt] = c0.support[s];
            }
            return out;
        }
        case OpKind::Tensor: {
            NodeType out{1, c0.ring, std::vector<bool>(c0.ring->num_summands(), false)};
            for (std::size_t c : node.children) {
                const NodeType& ct = types[c];
                if (!same_ring(ct.ring, c0.ring)) type_error(i, "tensor factors over different rings");
                out.n *= ct.n;
                if (out.n > 4096) type_error(i, "tensor degree too large");
                for (std::size_t s = 0; s < out.support.size(); ++s) out.support[s] = out.support[s] || ct.support[s];
            }
            return out;
        }
        case OpKind::DirectSameDegree: {
            NodeType out{c0.n, c0.ring, std::vector<bool>(c0.ring->num_summands(), false)};
            for (std::size_t c : node.children) {
                const NodeType& ct = types[c];
                if (!same_ring(ct.ring, c0.ring) || ct.n != c0.n) type_error(i, "direct factors differ in ring or degree");
                for (std::size_t s = 0; s < out.support.size(); ++s) {
                    if (out.support[s] && ct.support[s]) type_error(i, "direct factors are not CRT independent");
                    out.support[s] = out.support[s] || ct.support[s];
                }
            }
            return out;
        }
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct: {
            const unsigned m = op.param;
            if (m < 2) type_error(i, "wreath needs m >= 2");
            std::size_t n = c0.n * m;
            if (op.kind == OpKind::WreathProduct) {
                if (c0.n < 2) type_error(i, "product action needs degree >= 2");
                n = ipow(c0.n, m);
            }
            if (n > 4096) type_error(i, "wreath degree too large");
            return {n, c0.ring, std::vector<bool>(c0.ring->num_summands(), true)};
        }
        case OpKind::Conjugate:
            return c0;
    }
    type_error(i, "unknown operation");
}

}  // namespace

std::vector<NodeType> tree_check(const DerivationTree& t) {
    if (t.nodes.empty()) fail(Errc::TypeError, "empty tree");
    const std::size_t N = t.nodes.size();
    std::vector<int> parents(N, 0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t c : t.nodes[i].children) {
            if (c >= i) type_error(i, "children must precede their parent");
            ++parents[c];
        }
    for (std::size_t i = 0; i + 1 < N; ++i)
        if (parents[i] != 1) type_error(i, "node is not used exactly once");
    std::vector<NodeType> types;
    types.reserve(N);
    for (std::size_t i = 0; i < N; ++i) types.push_back(type_node(t, i, types, nullptr));
    return types;
}

// --- compiled trees -----------------------------------------------------------------

Matrix conjugator_from_seed(const Ring& ring, std::size_t n, u64 seed) {
    Rng rng(seed);
    return random_invertible(ring, n, rng);
}

CompiledTree::CompiledTree(DerivationTree t) : tree_(std::move(t)) {
    if (tree_.nodes.empty()) fail(Errc::TypeError, "empty tree");
    types_ = tree_check(tree_);
    const std::size_t N = tree_.nodes.size();
    parent_.assign(N, N);
    slot_.assign(N, 0);
    conj_.resize(N);
    conj_inv_.resize(N);
    emb_.resize(N);
    gens_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const TreeNode& node = tree_.nodes[i];
        for (std::size_t k = 0; k < node.children.size(); ++k) {
            parent_[node.children[k]] = i;
            slot_[node.children[k]] = k;
        }
        if (node.is_leaf) {
            gens_[i] = leaf_generators(node.leaf);
            continue;
        }
        const NodeType& ty = types_[i];
        if (node.op.kind == OpKind::Conjugate) {
            conj_[i] = conjugator_from_seed(ty.ring, ty.n, node.op.seed);
            conj_inv_[i] = mat_inv(conj_[i]);
        }
        if (node.op.kind == OpKind::RingExtend) emb_[i] = ring_extension(types_[node.children[0]].ring, ty.ring);
        std::vector<Matrix> out;
        std::unordered_set<Matrix, MatrixHash> seen;
        for (std::size_t k = 0; k < node.children.size(); ++k)
            for (const auto& g : gens_[node.children[k]]) push_unique(out, seen, lift(i, k, g));
        if (node.op.kind == OpKind::WreathImprimitive || node.op.kind == OpKind::WreathProduct) {
            const unsigned m = node.op.param;
            const WreathMode mode =
                node.op.kind == OpKind::WreathImprimitive ? WreathMode::Imprimitive : WreathMode::Product;
            const std::size_t n = types_[node.children[0]].n;
            Perm swap = perm_identity(m), cycle(m);
            std::swap(swap[0], swap[1]);
            for (unsigned j = 0; j < m; ++j) cycle[j] = (j + 1) % m;
            push_unique(out, seen, wreath_perm(ty.ring, n, swap, mode));
            push_unique(out, seen, wreath_perm(ty.ring, n, cycle, mode));
        }
        if (out.empty()) out.push_back(dedupe_identity_fallback(ty.ring, ty.n));
        gens_[i] = std::move(out);
    }
}

Matrix CompiledTree::lift(std::size_t i, std::size_t slot, const Matrix& h) const {
    const TreeNode& node = tree_.nodes[i];
    const NodeType& ty = types_[i];
    switch (node.op.kind) {
        case OpKind::RingExtend: return extend_to(h, emb_[i]);
        case OpKind::RingRep: return rep_to(h, node.op.param);
        case OpKind::CrtAssemble: return crt_embed(h, ty.ring, node.op.placement);
        case OpKind::Tensor: {
            std::vector<Matrix> f;
            for (std::size_t k = 0; k < node.children.size(); ++k)
                f.push_back(k == slot ? h : Matrix::identity(ty.ring, types_[node.children[k]].n));
            return mat_kron_all(f);
        }
        case OpKind::DirectSameDegree: return h;
        case OpKind::WreathImprimitive:
        case OpKind::WreathProduct: {
            std::vector<Matrix> hs(node.op.param, Matrix::identity(ty.ring, h.rows()));
            hs[0] = h;
            return wreath_rep(hs, perm_identity(node.op.param),
                              node.op.kind == OpKind::WreathImprimitive ? WreathMode::Imprimitive : WreathMode::Product);
        }
        case OpKind::Conjugate: return mat_mul(mat_mul(conj_inv_[i], h), conj_[i]);
    }
    fail(Errc::TypeError, "unknown operation");
}

std::vector<ProvenanceStep> CompiledTree::path(std::size_t leaf) const {
    if (leaf >= tree_.nodes.size() || !tree_.nodes[leaf].is_leaf) fail(Errc::IndexOutOfRange, "not a leaf");
    std::vector<ProvenanceStep> out;
    for (std::size_t i = leaf; parent_[i] < tree_.nodes.size(); i = parent_[i]) out.push_back({parent_[i], slot_[i]});
    return out;
}

Matrix CompiledTree::leaf_embed(std::size_t leaf, const Matrix& h) const {
    if (leaf >= tree_.nodes.size() || !tree_.nodes[leaf].is_leaf) fail(Errc::IndexOutOfRange, "not a leaf");
    if (!leaf_contains(tree_.nodes[leaf].leaf, h)) fail(Errc::NotInLeafGroup, "element fails the leaf membership test");
    Matrix g = h;
    for (const auto& st : path(leaf)) g = lift(st.node, st.slot, g);
    return g;
}

GroupInstance tree_eval(const DerivationTree& t) {
    CompiledTree ct(t);
    GroupInstance inst;
    inst.n = ct.type(ct.root()).n;
    inst.ring = ct.type(ct.root()).ring;
    inst.gens = ct.generators(ct.root());
    for (std::size_t leaf : t.leaves()) inst.provenance[leaf] = ct.path(leaf);
    return inst;
}

Matrix leaf_embed(const DerivationTree& t, std::size_t leaf, const Matrix& h) {
    return CompiledTree(t).leaf_embed(leaf, h);
}

SubgroupSample subgroup_sample(const DerivationTree& t, std::uint64_t seed) {
    CompiledTree ct(t);
    Rng rng(seed);
    SubgroupSample out;
    for (std::size_t leaf : t.leaves()) {
        const auto& b = t.nodes[leaf].leaf;
        for (auto* list : {&out.gens_A, &out.gens_B}) {
            const std::size_t count = 1 + rng.below(2);
            for (std::size_t k = 0; k < count; ++k) list->push_back(ct.leaf_embed(leaf, leaf_random_element(b, rng)));
        }
    }
    bool commute = true;
    for (const auto& a : out.gens_A) {
        for (const auto& b : out.gens_B)
            if (!(mat_mul(a, b) == mat_mul(b, a))) {
                commute = false;
                break;
            }
        if (!commute) break;
    }
    if (commute) out.warnings.push_back("G_A centralizes G_B: the commutator key is the identity");
    return out;
}

std::optional<std::vector<Matrix>> group_closure(const std::vector<Matrix>& gens, std::size_t cap) {
    if (gens.empty()) fail(Errc::InvalidArgument, "no generators");
    std::vector<Matrix> elems{Matrix::identity(gens[0].ring(), gens[0].rows())};
    std::unordered_set<Matrix, MatrixHash> seen{elems[0]};
    for (std::size_t head = 0; head < elems.size(); ++head)
        for (const auto& g : gens) {
            Matrix x = mat_mul(elems[head], g);
            if (seen.insert(x).second) {
                if (elems.size() >= cap) return std::nullopt;
                elems.push_back(std::move(x));
            }
        }
    return elems;
}

// --- random trees ---------------------------------------------------------------------

std::size_t min_leaf_size(const TreeGenOptions& opt) {
    std::size_t best = SIZE_MAX;
    for (u64 q : opt.fields) {
        auto [p, k] = prime_power(q);
        if (!p) continue;
        if (q >= 3) best = std::min(best, leaf_size(leaf_diagonal(1, q)));
        if (opt.max_leaf_degree >= 2) best = std::min(best, leaf_size(leaf_general_linear(2, q)));
    }
    return best;
}

namespace {

struct Req {
    Ring ring;
    std::size_t degree = 0;
};

class TreeGen {
public:
    TreeGen(u64 seed, const TreeGenOptions& opt) : rng_(seed), opt_(opt), min_leaf_(min_leaf_size(opt)) {}

    std::optional<DerivationTree> gen(std::size_t budget, const Req& req, unsigned depth) {
        if (budget < min_leaf_) return std::nullopt;
        const double p_leaf = depth >= 6 ? 1.0 : std::min(1.0, 16.0 / static_cast<double>(budget));
        if (rng_.coin(p_leaf)) {
            if (auto t = leaf(budget, req)) return t;
        }
        std::vector<OpKind> ops{OpKind::RingExtend, OpKind::RingRep, OpKind::CrtAssemble, OpKind::Tensor,
                                OpKind::DirectSameDegree, OpKind::WreathImprimitive, OpKind::WreathProduct,
                                OpKind::Conjugate};
        rng_.shuffle(ops);
        for (OpKind k : ops) {
            auto t = build(k, budget, req, depth);
            if (t && fits(*t, budget, req)) return t;
        }
        return leaf(budget, req);
    }

private:
    bool fits(const DerivationTree& t, std::size_t budget, const Req& req) {
        if (tree_size(t) > budget) return false;
        std::vector<NodeType> types;
        try {
            types = tree_check(t);
        } catch (const Error&) {
            return false;
        }
        const NodeType& top = types.back();
        if (top.n > opt_.max_degree || top.ring->cardinality() > opt_.max_ring_size) return false;
        if (req.ring && !same_ring(req.ring, top.ring)) return false;
        if (req.degree && req.degree != top.n) return false;
        return true;
    }

    std::optional<DerivationTree> leaf(std::size_t budget, const Req& req) {
        std::vector<u64> qs;
        if (req.ring) {
            if (!is_field_ring(req.ring)) return std::nullopt;
            qs.push_back(req.ring->cardinality());
        } else {
            qs = opt_.fields;
        }
        std::vector<BaseGroupSpec> cands;
        for (u64 q : qs) {
            auto [p, k] = prime_power(q);
            if (!p) continue;
            std::vector<unsigned> degrees;
            if (req.degree) {
                if (req.degree <= opt_.max_degree) degrees.push_back(static_cast<unsigned>(req.degree));
            } else {
                for (unsigned n = 1; n <= opt_.max_leaf_degree; ++n) degrees.push_back(n);
            }
            for (unsigned n : degrees) {
                if (n == 2 && k == 1) cands.push_back(leaf_unipotent(q));
                if (n >= 2) {
                    cands.push_back(leaf_special_linear(n, q));
                    cands.push_back(leaf_general_linear(n, q));
                }
                if (q >= 3) cands.push_back(leaf_diagonal(n, q));
            }
        }
        std::erase_if(cands, [&](const BaseGroupSpec& b) { return leaf_size(b) > budget; });
        if (cands.empty()) return std::nullopt;
        return tree_leaf(cands[rng_.below(cands.size())]);
    }

    u64 pick_field() { return opt_.fields[rng_.below(opt_.fields.size())]; }

    std::optional<DerivationTree> unary(const OperationLabel& op, std::size_t label, std::size_t budget, const Req& child,
                                        unsigned depth) {
        if (budget < label + 1) return std::nullopt;
        auto c = gen(budget - label - 1, child, depth + 1);
        if (!c) return std::nullopt;
        return tree_op(op, {*c});
    }

    std::optional<DerivationTree> build(OpKind kind, std::size_t budget, const Req& req, unsigned depth) {
        switch (kind) {
            case OpKind::Conjugate:
                return unary(op_conjugate(rng_.next()), 1, budget, req, depth);
            case OpKind::RingExtend: {
                Ring source, target;
                if (req.ring) {
                    if (!is_field_ring(req.ring)) return std::nullopt;
                    const auto& g = req.ring->summands()[0];
                    std::vector<unsigned> divs;
                    for (unsigned r = 1; r < g.r; ++r)
                        if (g.r % r == 0) divs.push_back(r);
                    if (divs.empty()) return std::nullopt;
                    source = ring_field(saturating_pow(g.p, divs[rng_.below(divs.size())]));
                    target = req.ring;
                } else {
                    const u64 q0 = pick_field();
                    const unsigned k = static_cast<unsigned>(rng_.between(2, 3));
                    const u64 q = saturating_pow(q0, k);
                    if (q > opt_.max_field) return std::nullopt;
                    source = ring_field(q0);
                    target = ring_field(q);
                }
                return unary(op_ring_extend(target), 1, budget, {source, req.degree}, depth);
            }
            case OpKind::RingRep: {
                const unsigned d = static_cast<unsigned>(rng_.between(2, 3));
                if (req.degree && req.degree % d) return std::nullopt;
                Ring source;
                if (req.ring) {
                    std::vector<Ring> parts;
                    for (const auto& g : req.ring->summands()) {
                        if (g.r != 1 || g.m != 1 || saturating_pow(g.p, d) > opt_.max_field) return std::nullopt;
                        parts.push_back(ring_field(saturating_pow(g.p, d)));
                    }
                    source = ring_direct_sum(parts);
                } else {
                    std::vector<u64> primes;
                    for (u64 q : opt_.fields)
                        if (prime_power(q).second == 1 && saturating_pow(q, d) <= opt_.max_field) primes.push_back(q);
                    if (primes.empty()) return std::nullopt;
                    source = ring_field(saturating_pow(primes[rng_.below(primes.size())], d));
                }
                return unary(op_ring_rep(d), d, budget, {source, req.degree ? req.degree / d : 0}, depth);
            }
            case OpKind::CrtAssemble: {
                Ring target;
                std::vector<std::size_t> subset;
                if (req.ring) {
                    const std::size_t S = req.ring->num_summands();
                    if (S < 2) return std::nullopt;
                    target = req.ring;
                    for (std::size_t s = 0; s < S; ++s)
                        if (rng_.coin(0.5)) subset.push_back(s);
                    if (subset.empty() || subset.size() == S) subset = {rng_.below(S)};
                } else {
                    const Ring f1 = ring_field(pick_field()), f2 = ring_field(pick_field());
                    target = ring_direct_sum({f1, f2});
                    if (target->cardinality() > opt_.max_ring_size) return std::nullopt;
                    subset = *find_placement(f1, target);
                }
                return unary(op_crt(target, subset), target->num_summands(), budget,
                             {sub_ring(target, subset), req.degree}, depth);
            }
            case OpKind::WreathImprimitive: {
                const unsigned m = static_cast<unsigned>(rng_.between(2, opt_.max_arity));
                if (req.degree && req.degree % m) return std::nullopt;
                return unary(op_wreath(m, WreathMode::Imprimitive), m, budget, {req.ring, req.degree / m}, depth);
            }
            case OpKind::WreathProduct: {
                const unsigned m = static_cast<unsigned>(rng_.between(2, opt_.max_arity));
                std::size_t n = 0;
                if (req.degree) {
                    for (std::size_t c = 2; ipow(c, m) <= req.degree; ++c)
                        if (ipow(c, m) == req.degree) n = c;
                } else {
                    std::vector<std::size_t> opts;
                    for (std::size_t c = 2; c <= opt_.max_leaf_degree && ipow(c, m) <= opt_.max_degree; ++c)
                        opts.push_back(c);
                    if (!opts.empty()) n = opts[rng_.below(opts.size())];
                }
                if (!n) return std::nullopt;
                return unary(op_wreath(m, WreathMode::Product), m, budget, {req.ring, n}, depth);
            }
            case OpKind::Tensor:
                return tensor(budget, req, depth);
            case OpKind::DirectSameDegree:
                return direct(budget, req, depth);
        }
        return std::nullopt;
    }

    std::optional<DerivationTree> tensor(std::size_t budget, const Req& req, unsigned depth) {
        const unsigned s = static_cast<unsigned>(rng_.between(2, opt_.max_arity));
        std::vector<std::size_t> degs(s, 0);
        if (req.degree) {
            // Random ordered factorization into s factors >= 2.
            std::vector<std::vector<std::size_t>> all;
            std::vector<std::size_t> cur;
            auto rec = [&](auto&& self, std::size_t left, unsigned k) -> void {
                if (all.size() > 64) return;
                if (k == 1) {
                    if (left >= 2) {
                        cur.push_back(left);
                        all.push_back(cur);
                        cur.pop_back();
                    }
                    return;
                }
                for (std::size_t d = 2; d * 2 <= left; ++d)
                    if (left % d == 0) {
                        cur.push_back(d);
                        self(self, left / d, k - 1);
                        cur.pop_back();
                    }
            };
            rec(rec, req.degree, s);
            if (all.empty()) return std::nullopt;
            degs = all[rng_.below(all.size())];
        }
        if (budget < 2 * s) return std::nullopt;
        const std::size_t each = (budget - 2 * s) / s;
        std::vector<DerivationTree> kids;
        Ring ring = req.ring;
        for (unsigned k = 0; k < s; ++k) {
            auto c = gen(each, {ring, degs[k]}, depth + 1);
            if (!c) return std::nullopt;
            if (!ring) ring = tree_check(*c).back().ring;
            kids.push_back(std::move(*c));
        }
        return tree_op(op_tensor(), kids);
    }

    std::optional<DerivationTree> direct(std::size_t budget, const Req& req, unsigned depth) {
        const unsigned s = static_cast<unsigned>(rng_.between(2, opt_.max_arity));
        Ring ring = req.ring;
        if (!ring) {
            std::vector<Ring> parts;
            for (unsigned k = 0; k < s; ++k) parts.push_back(ring_field(pick_field()));
            ring = ring_direct_sum(parts);
            if (ring->cardinality() > opt_.max_ring_size) return std::nullopt;
        }
        const std::size_t S = ring->num_summands();
        if (S < s) return std::nullopt;
        std::vector<std::size_t> idx(S);
        for (std::size_t i = 0; i < S; ++i) idx[i] = i;
        rng_.shuffle(idx);
        std::vector<std::vector<std::size_t>> groups(s);
        for (std::size_t i = 0; i < S; ++i) groups[i < s ? i : rng_.below(s)].push_back(idx[i]);
        const std::size_t wrap = S + 1;  // crt label plus its edge
        if (budget < s + s * (wrap + 1)) return std::nullopt;
        const std::size_t each = (budget - 2 * s) / s - wrap;
        std::vector<DerivationTree> kids;
        std::size_t degree = req.degree;
        for (auto& g : groups) {
            std::sort(g.begin(), g.end());
            auto c = gen(each, {sub_ring(ring, g), degree}, depth + 1);
            if (!c) return std::nullopt;
            if (!degree) degree = tree_check(*c).back().n;
            kids.push_back(tree_op(op_crt(ring, g), {*c}));
        }
        return tree_op(op_direct(), kids);
    }

    Rng rng_;
    const TreeGenOptions& opt_;
    std::size_t min_leaf_;
};

}  // namespace

DerivationTree tree_random(std::size_t budget, std::uint64_t seed, const TreeGenOptions& opt) {
    const std::size_t smallest = min_leaf_size(opt);
    if (smallest == SIZE_MAX || budget < smallest)
        fail(Errc::BudgetTooSmall, "budget " + std::to_string(budget) + " is below the smallest leaf size");
    TreeGen gen(seed, opt);
    for (int attempt = 0; attempt < 64; ++attempt)
        if (auto t = gen.gen(budget, {}, 0)) return *t;
    fail(Errc::BudgetTooSmall, "no tree fits the budget");
}

}  // namespace mgc
