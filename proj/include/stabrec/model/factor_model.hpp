#pragma once

#include <cstdint>
#include <filesystem>

#include "stabrec/config.hpp"
#include "stabrec/linalg/dense.hpp"
#include "stabrec/linalg/sparse.hpp"

namespace stabrec::model {

// Low-rank state Y = U·S·Vᵀ. U and V keep orthonormal columns across both
// training paths; S is diagonal straight after PureSVD training and lower
// triangular after integrator steps.
struct FactorModel {
    linalg::DenseMatrix user_factors;  // M×r
    linalg::DenseMatrix core;          // r×r
    linalg::DenseMatrix item_factors;  // N×r
    std::int32_t rank = 0;
    std::int64_t step_index = 0;

    std::int32_t n_users() const noexcept { return user_factors.n_rows(); }
    std::int32_t n_items() const noexcept { return item_factors.n_rows(); }
};

// Shape consistency plus orthonormality of both factor blocks within
// kNumeric.model_orthonormality_tol. Throws on violation.
void validate_model(const FactorModel& m);

// Dense U·S·Vᵀ. Desk-scale verification helper; refuses when M·N exceeds
// kNumeric.reconstruct_max_elements.
linalg::DenseMatrix reconstruct(const FactorModel& m);

// Binary checkpoint, little-endian, bit-exact round trip.
void save_checkpoint(const FactorModel& m, const std::filesystem::path& path);
FactorModel load_checkpoint(const std::filesystem::path& path);

// PureSVD: rank-r truncated SVD of the zero-filled interaction matrix,
// repackaged with S = diag(singular values) and step_index = 0.
FactorModel train_puresvd(const linalg::SparseMatrix& interactions, std::int32_t rank,
                          std::uint64_t seed = kDefaultSeed);

// Which decomposition backs the two orthogonalization steps of the
// integrator. Both yield the same Y(t) for full-rank intermediates; factors
// differ elementwise.
enum class PsiDecomposition { qr, svd };

// One projector-splitting step: advances (U, S, V) using only the new-data
// matrix delta. The input model is not modified; step_index increments.
FactorModel psi_step(const FactorModel& m, const linalg::SparseMatrix& delta,
                     PsiDecomposition decomposition = PsiDecomposition::qr);

}  // namespace stabrec::model
