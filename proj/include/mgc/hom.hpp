#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mgc/trapdoor.hpp"

namespace mgc {

/// Per leaf: nullopt is f_0, otherwise the Frobenius exponent of f_sigma.
using LeafHom = std::optional<unsigned>;

/// How the composite map acts at a node: trivially, as one entrywise ring
/// automorphism, or only through the decomposition.
enum class HomShape { Trivial, Entrywise, General };

const char* hom_shape_name(HomShape s);

struct HomSpec {
    DerivationTree tree;
    std::vector<LeafHom> choices;  // aligned with tree.leaves()
    DerivationTree image_tree;
    std::vector<HomShape> shapes;                  // per node
    std::vector<std::vector<unsigned>> exponents;  // per node, Entrywise only
    std::vector<Matrix> gen_images;                // images of tree_eval(tree).gens
};

/// Throws ArityMismatch, InvalidAutomorphism, UnsupportedDecomposition (a
/// tensor-like node whose scalar ambiguity would make the map ill defined).
HomSpec hom_build(const DerivationTree& t, const std::vector<LeafHom>& choices);

/// Keeps the compiled source and image trees for repeated application.
class HomEvaluator {
public:
    explicit HomEvaluator(HomSpec h);

    const HomSpec& spec() const { return h_; }
    /// f(g). Throws ShapeMismatch, NotInGroup.
    Matrix apply(const Matrix& g) const;

private:
    Matrix replay(const Witness& w) const;

    HomSpec h_;
    std::shared_ptr<const CompiledTree> src_, img_;
    Trapdoor trap_;
};

Matrix hom_apply(const HomSpec& h, const Matrix& g);

}  // namespace mgc
