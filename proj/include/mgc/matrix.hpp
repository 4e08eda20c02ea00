#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mgc/ring.hpp"

namespace mgc {

/// Dense matrix over a RingSpec. Row vectors are 1 x n matrices and act on
/// the right: v -> v * g.
class Matrix {
public:
    Matrix() = default;
    Matrix(Ring ring, std::size_t rows, std::size_t cols);

    static Matrix identity(const Ring& ring, std::size_t n);
    static Matrix from_ints(const Ring& ring, const std::vector<std::vector<std::int64_t>>& rows);
    static Matrix row_vector(const Ring& ring, const std::vector<std::int64_t>& entries);
    static Matrix from_entries(const Ring& ring, std::size_t rows, std::size_t cols,
                               const std::vector<RingElement>& entries);

    const Ring& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t n() const { return rows_; }
    bool square() const { return rows_ == cols_; }

    u64* at(std::size_t i, std::size_t j) { return data_.data() + (i * cols_ + j) * w_; }
    const u64* at(std::size_t i, std::size_t j) const { return data_.data() + (i * cols_ + j) * w_; }
    RingElement get(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, const RingElement& x);
    void set_int(std::size_t i, std::size_t j, std::int64_t v) { ring_->set_int(v, at(i, j)); }

    const Coeffs& data() const { return data_; }
    Coeffs& data() { return data_; }

    Matrix row(std::size_t i) const;
    bool is_identity() const;
    bool is_zero() const;
    bool operator==(const Matrix& o) const;
    std::string to_string() const;
    std::size_t hash() const;

private:
    Ring ring_;
    std::size_t rows_ = 0, cols_ = 0, w_ = 0;
    Coeffs data_;
};

struct MatrixHash {
    std::size_t operator()(const Matrix& m) const { return m.hash(); }
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix mat_add(const Matrix& a, const Matrix& b);
Matrix mat_sub(const Matrix& a, const Matrix& b);
Matrix mat_scale(const Matrix& a, const RingElement& c);
Matrix mat_transpose(const Matrix& a);
/// Throws NonInvertible.
Matrix mat_inv(const Matrix& a);
std::optional<Matrix> try_inv(const Matrix& a);
bool is_invertible(const Matrix& a);
RingElement mat_det(const Matrix& a);
Matrix mat_pow(const Matrix& a, std::int64_t e);
Matrix mat_kron(const Matrix& a, const Matrix& b);
Matrix mat_kron_all(const std::vector<Matrix>& factors);
/// a^{-1} b^{-1} a b.
Matrix mat_commutator(const Matrix& a, const Matrix& b);
/// Stack matrices with equal column counts vertically.
Matrix mat_vstack(const std::vector<Matrix>& parts);
Matrix mat_block(const Matrix& a, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols);
void mat_put_block(Matrix& dst, std::size_t r0, std::size_t c0, const Matrix& src);
Matrix entrywise_frobenius(const Matrix& a, const RingAutomorphism& aut);

/// v * g for a row vector (or a stack of rows) v.
Matrix vector_act(const Matrix& v, const Matrix& g);

/// Signed generator indices, 1-based: +i is gens[i-1], -i its inverse.
using GroupWord = std::vector<int>;
Matrix word_eval(const std::vector<Matrix>& gens, const GroupWord& w);

// --- wreath products ---------------------------------------------------------

enum class WreathMode { Imprimitive, Product };

/// 0-based permutation of positions: perm[i] is the image of i.
using Perm = std::vector<std::size_t>;

Perm perm_identity(std::size_t m);
Perm perm_compose(const Perm& first, const Perm& second);  // i -> second[first[i]]
Perm perm_inverse(const Perm& k);
bool perm_valid(const Perm& k);

/// Matrix of (h_1, ..., h_m; k): coordinate i moves to position k(i) and is
/// acted on by h_i, so position j receives u_{i_j}^{h_{i_j}} with i_j = k^{-1}(j).
/// Product mode uses the basis index sum_j a_j n^{m-j} of the tensor power.
Matrix wreath_rep(const std::vector<Matrix>& hs, const Perm& k, WreathMode mode);

/// Permutation matrix of k in the given mode (all h_i = I).
Matrix wreath_perm(const Ring& ring, std::size_t n, const Perm& k, WreathMode mode);

// --- changing the ring ---------------------------------------------------------

/// Unital embedding of a direct sum of Galois rings into a larger one. Every
/// target summand GR(p, m, r') receives a source summand GR(p, m, r) with
/// r | r' through x -> a fixed root of the source modulus.
struct RingEmbedding {
    Ring source, target;
    std::vector<std::size_t> source_of;   // per target summand
    std::vector<Coeffs> root_image;       // per target summand
    // Decoding data per source summand: the target summand read back, the
    // coordinate columns used and the inverse of their r x r minor.
    std::vector<std::size_t> decode_from;
    std::vector<std::vector<std::size_t>> decode_cols;
    std::vector<std::vector<u64>> decode_inv;

    void apply(const u64* a, u64* out) const;
    bool preimage(const u64* b, u64* out) const;
};

RingEmbedding ring_extension(const Ring& source, const Ring& target);
Matrix extend_to(const Matrix& a, const RingEmbedding& emb);
std::optional<Matrix> extend_preimage(const Matrix& a, const RingEmbedding& emb);

/// Ring of the regular representation: each summand GR(p,m,d) becomes Z_{p^m}.
Ring rep_base_ring(const Ring& source, unsigned d);
/// Replaces each entry by the d x d matrix of multiplication by it in the
/// power basis (row t holds the coordinates of x^t * a).
Matrix rep_to(const Matrix& a, unsigned d);
std::optional<Matrix> rep_preimage(const Matrix& big, const Ring& source, unsigned d);

/// Embeds a into a ring whose summands include a's summands at the given
/// positions; every other summand receives the identity.
Matrix crt_embed(const Matrix& a, const Ring& big, const std::vector<std::size_t>& placement);
/// Restriction to a sorted set of summands.
Matrix project_summands(const Matrix& a, const std::vector<std::size_t>& indices);
Ring sub_ring(const Ring& ring, const std::vector<std::size_t>& indices);
/// Where each summand of `part` sits inside `big` (distinct positions, first fit),
/// or nullopt if it does not fit.
std::optional<std::vector<std::size_t>> find_placement(const Ring& part, const Ring& big,
                                                       const std::vector<bool>& taken = {});

Matrix random_matrix(const Ring& ring, std::size_t rows, std::size_t cols, Rng& rng);
Matrix random_invertible(const Ring& ring, std::size_t n, Rng& rng);

}  // namespace mgc
