#pragma once

#include <cstdint>
#include <vector>

namespace stabrec::linalg {

// Row-major dense matrix of doubles. Carrier for factor blocks and the
// intermediates of the integrator step; not a general linear-algebra type.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::int32_t rows, std::int32_t cols);  // zero-filled

    static DenseMatrix identity(std::int32_t n);

    std::int32_t n_rows() const noexcept { return n_rows_; }
    std::int32_t n_cols() const noexcept { return n_cols_; }

    double& operator()(std::int32_t i, std::int32_t j) {
        return values_[static_cast<std::size_t>(i) * n_cols_ + j];
    }
    double operator()(std::int32_t i, std::int32_t j) const {
        return values_[static_cast<std::size_t>(i) * n_cols_ + j];
    }

    double* row(std::int32_t i) {
        return values_.data() + static_cast<std::size_t>(i) * n_cols_;
    }
    const double* row(std::int32_t i) const {
        return values_.data() + static_cast<std::size_t>(i) * n_cols_;
    }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool all_finite() const;

private:
    std::int32_t n_rows_ = 0;
    std::int32_t n_cols_ = 0;
    std::vector<double> values_;
};

// C = A·B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// C = Aᵀ·B
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
// C = A·Bᵀ
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
// ‖QᵀQ − I‖_max
double orthonormality_defect(const DenseMatrix& q);

}  // namespace stabrec::linalg
