#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgc/matrix.hpp"

namespace mgc {

// --- base groups ---------------------------------------------------------------

/// Leaf groups. Trivial only appears in image trees of homomorphisms.
enum class LeafKind { UnipotentCyclic, SpecialLinear, GeneralLinear, DiagonalCyclic, Trivial };

/// A base group over GF(q). UnipotentCyclic uses n = 2 and a prime q.
/// DiagonalCyclic is generated by diag(c, c^2, ..., c^n) with c = w^power for
/// the least primitive element w of GF(q); power is ignored by other kinds.
struct BaseGroupSpec {
    LeafKind kind = LeafKind::UnipotentCyclic;
    unsigned n = 2;
    u64 q = 2;
    u64 power = 1;

    bool operator==(const BaseGroupSpec&) const = default;
};

BaseGroupSpec leaf_unipotent(u64 p);
BaseGroupSpec leaf_special_linear(unsigned n, u64 q);
BaseGroupSpec leaf_general_linear(unsigned n, u64 q);
BaseGroupSpec leaf_diagonal(unsigned n, u64 q, u64 power = 1);
BaseGroupSpec leaf_trivial(unsigned n, u64 q);

const char* leaf_kind_name(LeafKind k);
std::optional<LeafKind> leaf_kind_from_name(const std::string& s);

/// Throws TypeError on impossible parameters.
void leaf_validate(const BaseGroupSpec& b);
Ring leaf_ring(const BaseGroupSpec& b);
std::vector<Matrix> leaf_generators(const BaseGroupSpec& b);
/// Polynomial-time membership procedure of the leaf group.
bool leaf_contains(const BaseGroupSpec& b, const Matrix& g);
/// Group order, saturating.
u64 leaf_order(const BaseGroupSpec& b);
Matrix leaf_random_element(const BaseGroupSpec& b, Rng& rng);
/// Label size: n^2 times the bit length of q (plus that of power for diagonal leaves).
std::size_t leaf_size(const BaseGroupSpec& b);

/// Least element of order q - 1 in a finite field.
RingElement primitive_element(const Ring& field);

// --- operations and trees ---------------------------------------------------------

enum class OpKind {
    RingExtend,
    RingRep,
    CrtAssemble,
    Tensor,
    DirectSameDegree,
    WreathImprimitive,
    WreathProduct,
    Conjugate,
};

const char* op_kind_name(OpKind k);
std::optional<OpKind> op_kind_from_name(const std::string& s);

/// RingExtend(target), RingRep(d = param), CrtAssemble(target, placement),
/// Tensor and DirectSameDegree (arity = number of children),
/// WreathImprimitive / WreathProduct (m = param, one child), Conjugate(seed).
struct OperationLabel {
    OpKind kind = OpKind::Conjugate;
    Ring target;
    std::vector<std::size_t> placement;
    unsigned param = 0;
    u64 seed = 0;
};

bool operator==(const OperationLabel& a, const OperationLabel& b);

struct TreeNode {
    bool is_leaf = true;
    BaseGroupSpec leaf;
    OperationLabel op;
    std::vector<std::size_t> children;

    bool operator==(const TreeNode&) const = default;
};

/// Nodes in post order: children precede their parent, the root is last.
/// Leaves are identified by their node index.
struct DerivationTree {
    std::vector<TreeNode> nodes;

    std::size_t root() const { return nodes.size() - 1; }
    std::vector<std::size_t> leaves() const;
    bool operator==(const DerivationTree&) const = default;
};

DerivationTree tree_leaf(const BaseGroupSpec& b);
DerivationTree tree_op(const OperationLabel& op, const std::vector<DerivationTree>& children);

OperationLabel op_ring_extend(const Ring& target);
OperationLabel op_ring_rep(unsigned d);
OperationLabel op_crt(const Ring& target, std::vector<std::size_t> placement);
OperationLabel op_tensor();
OperationLabel op_direct();
OperationLabel op_wreath(unsigned m, WreathMode mode);
OperationLabel op_conjugate(u64 seed);

std::size_t label_size(const TreeNode& node);
/// L(T): label sizes plus the number of edges.
std::size_t tree_size(const DerivationTree& t);

/// Degree, ring and support of the group at a node. The group is the
/// identity on every summand outside its support.
struct NodeType {
    std::size_t n = 0;
    Ring ring;
    std::vector<bool> support;
};

/// Type checks the whole tree; throws TypeError.
std::vector<NodeType> tree_check(const DerivationTree& t);

struct TreeGenOptions {
    std::size_t max_degree = 64;
    u64 max_ring_size = u64(1) << 32;
    /// Field orders leaves are drawn from.
    std::vector<u64> fields{2, 3, 4, 5, 7, 8, 9};
    unsigned max_leaf_degree = 3;
    /// Largest Tensor / DirectSameDegree arity and wreath m.
    unsigned max_arity = 3;
    /// Largest field reachable through RingExtend / RingRep.
    u64 max_field = 729;
};

/// Smallest leaf size available under the options.
std::size_t min_leaf_size(const TreeGenOptions& opt);

/// Random well-typed tree with L(T) <= budget; throws BudgetTooSmall.
DerivationTree tree_random(std::size_t budget, std::uint64_t seed, const TreeGenOptions& opt = {});

// --- evaluation --------------------------------------------------------------------

struct ProvenanceStep {
    std::size_t node;  // parent node
    std::size_t slot;  // child position
    bool operator==(const ProvenanceStep&) const = default;
};

struct GroupInstance {
    std::size_t n = 0;
    Ring ring;
    std::vector<Matrix> gens;
    /// Leaf node -> steps from the leaf up to the root.
    std::map<std::size_t, std::vector<ProvenanceStep>> provenance;
};

/// A type-checked tree with the derived data every algorithm needs:
/// conjugating matrices, ring embeddings, generators per node.
class CompiledTree {
public:
    explicit CompiledTree(DerivationTree t);

    const DerivationTree& tree() const { return tree_; }
    const TreeNode& node(std::size_t i) const { return tree_.nodes[i]; }
    const NodeType& type(std::size_t i) const { return types_[i]; }
    std::size_t root() const { return tree_.root(); }
    /// Parent and child position; the root has parent == nodes.size().
    std::size_t parent(std::size_t i) const { return parent_[i]; }
    std::size_t slot(std::size_t i) const { return slot_[i]; }

    const Matrix& conjugator(std::size_t i) const { return conj_[i]; }
    const Matrix& conjugator_inv(std::size_t i) const { return conj_inv_[i]; }
    const RingEmbedding& embedding(std::size_t i) const { return emb_[i]; }

    /// Image of a child element under the natural embedding into node i.
    Matrix lift(std::size_t i, std::size_t slot, const Matrix& h) const;
    const std::vector<Matrix>& generators(std::size_t i) const { return gens_[i]; }
    std::vector<ProvenanceStep> path(std::size_t leaf) const;
    /// Requires h in the leaf group (NotInLeafGroup).
    Matrix leaf_embed(std::size_t leaf, const Matrix& h) const;

private:
    DerivationTree tree_;
    std::vector<NodeType> types_;
    std::vector<std::size_t> parent_, slot_;
    std::vector<Matrix> conj_, conj_inv_;
    std::vector<RingEmbedding> emb_;
    std::vector<std::vector<Matrix>> gens_;
};

/// Conjugating matrix derived from the label seed.
Matrix conjugator_from_seed(const Ring& ring, std::size_t n, u64 seed);

GroupInstance tree_eval(const DerivationTree& t);
Matrix leaf_embed(const DerivationTree& t, std::size_t leaf, const Matrix& h);

struct SubgroupSample {
    std::vector<Matrix> gens_A, gens_B;
    std::vector<std::string> warnings;
};

/// One or two random elements of every leaf group per party, embedded into G.
SubgroupSample subgroup_sample(const DerivationTree& t, std::uint64_t seed);

/// BFS closure of a generator set; nullopt when it exceeds cap.
std::optional<std::vector<Matrix>> group_closure(const std::vector<Matrix>& gens, std::size_t cap);

}  // namespace mgc
