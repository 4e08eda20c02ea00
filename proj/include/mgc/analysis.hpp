#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgc/homcrypt.hpp"
#include "mgc/matrix.hpp"

namespace mgc {

// --- exhaustive oracles --------------------------------------------------------------

/// BFS closure with a spanning tree, so every element has a word in the generators.
struct EnumeratedGroup {
    std::vector<Matrix> gens;
    std::vector<Matrix> elements;  // BFS order, identity first
    std::vector<std::size_t> parent;
    std::vector<int> letter;  // generator (1-based) that reached the element
    std::unordered_map<Matrix, std::size_t, MatrixHash> index;
    std::size_t cap = 0;

    std::size_t size() const { return elements.size(); }
    std::optional<std::size_t> find(const Matrix& g) const;
    /// Word w with word_eval(gens, w) == elements[i].
    GroupWord word(std::size_t i) const;
};

/// Throws CapExceeded when the group has more than cap elements.
EnumeratedGroup enumerate_group(const std::vector<Matrix>& gens, std::size_t cap);

enum class OracleProblem { Membership, Conjugacy, Ltp };

/// found == false is a certified negative: the search was exhaustive.
struct OracleAnswer {
    bool found = false;
    std::optional<Matrix> element;
    GroupWord word;
};

/// Membership: query {g}. Conjugacy: query {f, g}, finds h with f = h^-1 g h.
/// Ltp: query {U, V}, finds g with U g = V.
OracleAnswer oracle_solve(OracleProblem problem, const EnumeratedGroup& e, const std::vector<Matrix>& query);

// --- conjugacy via the enveloping algebra --------------------------------------------

/// Basis of the linear span of all products of the generators (identity included).
std::vector<Matrix> algebra_span(const std::vector<Matrix>& gens);

struct ScspResult {
    Matrix h;
    std::vector<std::string> warnings;
    std::size_t algebra_dim = 0;
    std::size_t solution_dim = 0;
    std::size_t draws = 0;
};

/// True when the solution space is small enough for random sampling to hit
/// an invertible element with good probability: n < q / 2.
bool scsp_condition(std::size_t n, u64 q);

/// Solves h f = g h inside the algebra spanned by H_2 and samples up to 64
/// solutions for an invertible one; the result satisfies h^-1 g h = f.
/// Throws NoSolutionSpace (only h = 0) or Failure.
ScspResult scsp_linear_attack(const std::vector<Matrix>& gens_H2, const Matrix& f, const Matrix& g, std::uint64_t seed);

// --- linearity attack on homomorphisms --------------------------------------------

/// Linear extension of a generator-image table to the span of generator products.
class LinearModel {
public:
    LinearModel(const std::vector<Matrix>& gens, const std::vector<Matrix>& images);

    /// Sum c_i F(A_i) for query = sum c_i A_i; nullopt outside the span.
    std::optional<Matrix> predict(const Matrix& query) const;
    /// False once a product fell inside the span with an image that the
    /// linear extension contradicts.
    bool consistent() const { return consistent_; }
    std::size_t dimension() const { return basis_.size(); }

private:
    std::optional<Matrix> coords(const Matrix& query) const;

    std::vector<Matrix> basis_, images_;
    bool consistent_ = true;
};

/// Inconclusive is nullopt.
std::optional<Matrix> linearity_attack(const std::vector<Matrix>& gens, const std::vector<Matrix>& images,
                                       const Matrix& query);

// --- coset attack on the free-group cryptosystem -------------------------------------

/// Folded subgroup graph of <basis>. Every edge carries a tag in the free
/// group on the basis, so reading a loop at the base spells the same element
/// as a word in the basis words.
class SubgroupGraph {
public:
    explicit SubgroupGraph(const std::vector<FreeWord>& basis);

    /// u with fw_substitute(u, basis) == w; nullopt when w is not in the subgroup.
    std::optional<FreeWord> rewrite(const FreeWord& w) const;
    std::size_t vertices() const { return live_; }

private:
    struct Edge {
        std::size_t from, to;
        int label;
        FreeWord tag;
    };
    std::vector<FreeWord> basis_;
    std::vector<Edge> edges_;
    // (vertex, signed label) -> edge index; a negative label reads an edge backwards
    std::vector<std::unordered_map<int, std::size_t>> out_;
    std::size_t base_ = 0, live_ = 0;
    FreeWord base_label_;
};

std::optional<FreeWord> subgroup_rewrite(const std::vector<FreeWord>& basis, const FreeWord& w);

struct CosetTable {
    std::vector<FreeWord> plain;  // word for h_i over Y
    std::vector<Matrix> values;   // h_i in the model
    std::vector<FreeWord> reps;   // g_i = f^-1(h_i)
    std::shared_ptr<const SubgroupGraph> graph;  // folded <X_sigma>, built once
};

/// Lists H through the model. Throws CapExceeded above 4096 elements.
CosetTable coset_table(const HomPublicKey& pk);

struct CosetVerdict {
    std::size_t coset = 0;
    FreeWord plain;
    /// X-word u with f^-1(u) = c g_i^-1 and u in ker f in the model.
    FreeWord certificate;
};

/// Plaintext of c by coset membership; nullopt (inconclusive) when no
/// certificate of length <= length_bound exists.
std::optional<CosetVerdict> coset_attack(const HomPublicKey& pk, const CosetTable& table, const FreeWord& c,
                                         std::size_t length_bound);

}  // namespace mgc
