#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stabrec::linalg {

struct Triplet {
    std::int32_t row = 0;
    std::int32_t col = 0;
    double value = 0.0;
};

// Compressed sparse row matrix. Immutable after construction.
// row_offsets has n_rows+1 entries, non-decreasing, starting at 0;
// column indices are strictly increasing within each row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::int32_t rows, std::int32_t cols,
                 std::vector<std::int64_t> row_offsets,
                 std::vector<std::int32_t> col_indices,
                 std::vector<double> values);

    static SparseMatrix zero(std::int32_t rows, std::int32_t cols);
    // Duplicate cells are summed. Triplet order does not affect the result.
    static SparseMatrix from_triplets(std::int32_t rows, std::int32_t cols,
                                      std::vector<Triplet> triplets);

    std::int32_t n_rows() const noexcept { return n_rows_; }
    std::int32_t n_cols() const noexcept { return n_cols_; }
    std::int64_t nnz() const noexcept {
        return row_offsets_.empty() ? 0 : row_offsets_.back();
    }

    std::span<const std::int32_t> row_cols(std::int32_t i) const {
        return {col_indices_.data() + row_offsets_[i],
                static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
    }
    std::span<const double> row_values(std::int32_t i) const {
        return {values_.data() + row_offsets_[i],
                static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
    }

    const std::vector<std::int64_t>& row_offsets() const noexcept { return row_offsets_; }
    const std::vector<std::int32_t>& col_indices() const noexcept { return col_indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    SparseMatrix transposed() const;
    double frobenius_norm() const;
    bool has_cell(std::int32_t row, std::int32_t col) const;

private:
    void validate() const;

    std::int32_t n_rows_ = 0;
    std::int32_t n_cols_ = 0;
    std::vector<std::int64_t> row_offsets_{0};
    std::vector<std::int32_t> col_indices_;
    std::vector<double> values_;
};

// Entrywise union of two same-shape binary matrices; result values are 1.0.
SparseMatrix binary_union(const SparseMatrix& a, const SparseMatrix& b);
// Entries of `m` whose cell is absent from `mask`; values kept as-is.
// dropped (optional) receives the removed-entry count.
SparseMatrix subtract_pattern(const SparseMatrix& m, const SparseMatrix& mask,
                              std::int64_t* dropped = nullptr);

}  // namespace stabrec::linalg
