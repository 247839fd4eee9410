#pragma once

#include <cstdint>

namespace stabrec {

// Single source of truth for numeric tolerances and kernel parameters.
// Tests assert against the same constants the implementation uses.
struct NumericConfig {
    // Orthonormality defect ‖QᵀQ − I‖_max accepted from the QR/SVD kernels.
    double factor_orthonormality_tol = 1e-10;
    // Residual bound ‖QR − X‖ ≤ tol · (1 + ‖X‖) for qr_thin.
    double qr_reconstruction_tol = 1e-10;
    // Looser bound asserted on whole models (factors accumulate roundoff
    // across integrator steps).
    double model_orthonormality_tol = 1e-8;

    // One-sided Jacobi SVD: a column pair counts as orthogonal once
    // |gᵖ·gᑫ| ≤ jacobi_tol · ‖gᵖ‖‖gᑫ‖.
    double jacobi_tol = 1e-14;
    int jacobi_max_sweeps = 60;

    // truncated_svd switches to the dense kernel when min(M, N) is at or
    // below this cutoff; above it the randomized range finder is used.
    std::int32_t svd_dense_cutoff = 64;
    std::int32_t svd_oversampling = 10;
    std::int32_t svd_power_iterations = 2;

    // reconstruct() refuses above this element count; it exists for
    // desk-scale verification, not production scoring.
    std::int64_t reconstruct_max_elements = 4'000'000;
};

inline constexpr NumericConfig kNumeric{};

// Seed used by factorizations when the caller does not thread one through.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eed5eed5eedULL;

}  // namespace stabrec
