#pragma once

#include <cstdint>
#include <vector>

#include "stabrec/config.hpp"
#include "stabrec/linalg/dense.hpp"
#include "stabrec/linalg/sparse.hpp"

namespace stabrec::linalg {

// Sparse-dense product A·B.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// Aᵀ·B without materializing the transpose.
DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b);

struct QrResult {
    DenseMatrix q;  // m×n, orthonormal columns
    DenseMatrix r;  // n×n, upper triangular, non-negative diagonal
};

// Thin Householder QR of X (m ≥ n). Rank-deficient input is permitted;
// zero columns simply leave a zero on R's diagonal. Column signs are fixed
// so diag(R) ≥ 0.
QrResult qr_thin(const DenseMatrix& x);

struct SvdResult {
    DenseMatrix u;                       // M×r
    std::vector<double> singular_values; // length r, non-increasing
    DenseMatrix v;                       // N×r
};

// Thin SVD of a dense matrix by one-sided Jacobi. Returns min(m, n) triples,
// sorted by descending singular value. Sign convention: the largest-magnitude
// entry of each right singular vector is positive.
SvdResult dense_svd(const DenseMatrix& a);

// Best rank-r approximation of a sparse matrix. Dense kernel at or below
// kNumeric.svd_dense_cutoff, seeded randomized range finder above it.
SvdResult truncated_svd(const SparseMatrix& a, std::int32_t rank,
                        std::uint64_t seed = kDefaultSeed);

}  // namespace stabrec::linalg
