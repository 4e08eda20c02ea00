#pragma once

#include <vector>

#include "mgc/matrix.hpp"

namespace mgc {

/// Solution set of x * A = b over a direct sum of Galois rings: empty, or
/// particular + (R-span of kernel). Each Galois summand is a chain ring, so
/// a Smith-style elimination on p-adic valuations is exact.
struct LinearSolution {
    bool solvable = false;
    Matrix particular;            // 1 x k
    std::vector<Matrix> kernel;   // generators, each 1 x k
    u64 count = 0;                // number of solutions, saturating
};

/// A is k x n, b is 1 x n.
LinearSolution solve_left(const Matrix& A, const Matrix& b);

/// particular + sum of random multiples of the kernel generators.
Matrix random_solution(const LinearSolution& sol, Rng& rng);

/// Invertible g with U * g = V over GL (special = false) or SL (special = true),
/// stacks U, V with equal shapes. Exact for every direct sum of Galois rings.
std::optional<Matrix> transporter_gl(const Matrix& U, const Matrix& V, bool special);

}  // namespace mgc
