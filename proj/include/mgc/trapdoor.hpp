#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "mgc/instance.hpp"

namespace mgc {

/// Decomposition of an accepted element along the tree. Leaves carry the
/// leaf element, wreath nodes the permutation, every other node only parts.
struct Witness {
    std::size_t node = 0;
    Matrix element;
    Perm k;
    std::vector<Witness> parts;
};

struct MembershipVerdict {
    bool accepted = false;
    std::optional<Witness> witness;
};

/// Rebuilds the element a witness describes.
Matrix witness_replay(const CompiledTree& ct, const Witness& w);

/// Kronecker factors of g with the given square degrees. Factors after the
/// first have their first unit entry (row-major, per summand) equal to 1.
/// Throws NotDecomposable.
std::vector<Matrix> tensor_split(const Matrix& g, const std::vector<std::size_t>& degrees);

/// Same for a row vector of length prod(degrees); zero summands give zero factors.
std::vector<Matrix> vector_tensor_split(const Matrix& u, const std::vector<std::size_t>& degrees);

/// Inverse of wreath_rep. Product mode returns tensor_split-normalized factors.
/// Throws NotWreathShaped.
std::pair<std::vector<Matrix>, Perm> wreath_split(const Matrix& g, std::size_t n, std::size_t m, WreathMode mode);

/// Maximum bipartite matching (Hopcroft-Karp). adj[i] lists right vertices of
/// left vertex i; returns match_left (right index or -1).
std::vector<int> max_matching(const std::vector<std::vector<int>>& adj, std::size_t right);

/// Lexicographically least perfect matching, or nullopt.
std::optional<std::vector<int>> least_perfect_matching(const std::vector<std::vector<int>>& adj, std::size_t right);

/// g is a transporter in G when present. certified means a missing g is a
/// proven non-existence rather than "not found".
struct LtpResult {
    std::optional<Matrix> g;
    bool certified = true;
};

/// Tree-directed solvers over one compiled tree.
class Trapdoor {
public:
    explicit Trapdoor(const DerivationTree& t);
    explicit Trapdoor(std::shared_ptr<const CompiledTree> ct);

    const CompiledTree& compiled() const { return *ct_; }

    /// Throws ShapeMismatch when g has the wrong ring or degree.
    MembershipVerdict membership(const Matrix& g) const;
    /// Stacked transporter: U * g = V with U, V of shape k x n.
    LtpResult ltp(const Matrix& U, const Matrix& V) const;

    /// Scalar candidates tried per tensor factor before giving up with
    /// UnsupportedDecomposition.
    static constexpr u64 kScalarCap = 4096;
    /// Largest factor group enumerated by the tensor fallback.
    static constexpr std::size_t kEnumCap = 4096;
    /// Total factor elements the fallback may visit in one ltp call.
    static constexpr std::size_t kEnumWork = std::size_t(1) << 16;

private:
    std::optional<Witness> member(std::size_t node, const Matrix& g) const;
    std::optional<std::vector<Witness>> member_kron(const std::vector<std::size_t>& kids, const Matrix& g) const;
    LtpResult ltp_at(std::size_t node, const Matrix& U, const Matrix& V) const;
    LtpResult ltp_leaf(std::size_t node, const Matrix& U, const Matrix& V) const;
    LtpResult ltp_kron(const std::vector<std::size_t>& kids, const Matrix& U, const Matrix& V) const;
    LtpResult ltp_kron_enumerate(const std::vector<std::size_t>& kids, const Matrix& U, const Matrix& V) const;
    const std::vector<Matrix>* closure(std::size_t node) const;

    std::shared_ptr<const CompiledTree> ct_;
    mutable std::mutex mu_;
    mutable std::map<std::size_t, std::optional<std::vector<Matrix>>> closures_;
    static thread_local std::size_t enum_work_;
};

MembershipVerdict membership(const DerivationTree& t, const Matrix& g);

/// u * g = v for row vectors; throws NoSolution (message says whether the
/// non-existence is certified).
Matrix ltp_solve(const DerivationTree& t, const Matrix& u, const Matrix& v);

/// Translation matrices in degree n + 1 (rows act on (x, 1)): T_u = [[I, 0], [u, 1]].
/// With g embedded as diag(g, 1), g^{-1} T_u g = T_{u g}.
std::pair<Matrix, Matrix> affine_bridge(const Matrix& u, const Matrix& v);
/// diag(g, 1).
Matrix affine_embed(const Matrix& g);

}  // namespace mgc
