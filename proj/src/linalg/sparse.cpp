#include "stabrec/linalg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stabrec/error.hpp"

namespace stabrec::linalg {

SparseMatrix::SparseMatrix(std::int32_t rows, std::int32_t cols,
                           std::vector<std::int64_t> row_offsets,
                           std::vector<std::int32_t> col_indices,
                           std::vector<double> values)
    : n_rows_(rows),
      n_cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    validate();
}

void SparseMatrix::validate() const {
    if (n_rows_ < 0 || n_cols_ < 0) {
        throw_usage("SparseMatrix: negative dimensions");
    }
    if (row_offsets_.size() != static_cast<std::size_t>(n_rows_) + 1) {
        throw_usage("SparseMatrix: row_offsets length " +
                    std::to_string(row_offsets_.size()) + ", expected " +
                    std::to_string(n_rows_ + 1));
    }
    if (row_offsets_.front() != 0) {
        throw_usage("SparseMatrix: row_offsets must start at 0");
    }
    for (std::int32_t i = 0; i < n_rows_; ++i) {
        if (row_offsets_[i + 1] < row_offsets_[i]) {
            throw_usage("SparseMatrix: row_offsets decrease at row " + std::to_string(i));
        }
        for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const std::int32_t c = col_indices_[k];
            if (c < 0 || c >= n_cols_) {
                throw_usage("SparseMatrix: column index " + std::to_string(c) +
                            " out of range in row " + std::to_string(i));
            }
            if (k > row_offsets_[i] && col_indices_[k - 1] >= c) {
                throw_usage("SparseMatrix: column indices not strictly increasing in row " +
                            std::to_string(i));
            }
        }
    }
    const auto total = row_offsets_.back();
    if (col_indices_.size() != static_cast<std::size_t>(total) ||
        values_.size() != static_cast<std::size_t>(total)) {
        throw_usage("SparseMatrix: index/value array length does not match row_offsets");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw_usage("SparseMatrix: non-finite stored value");
    }
}

SparseMatrix SparseMatrix::zero(std::int32_t rows, std::int32_t cols) {
    SparseMatrix m;
    m.n_rows_ = rows;
    m.n_cols_ = cols;
    m.row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
    return m;
}

SparseMatrix SparseMatrix::from_triplets(std::int32_t rows, std::int32_t cols,
                                         std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw_usage("from_triplets: cell (" + std::to_string(t.row) + "," +
                        std::to_string(t.col) + ") outside " + std::to_string(rows) +
                        "x" + std::to_string(cols));
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.n_rows_ = rows;
    m.n_cols_ = cols;
    m.row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.col_indices_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::size_t i = 0;
    while (i < triplets.size()) {
        double sum = triplets[i].value;
        std::size_t j = i + 1;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        m.col_indices_.push_back(triplets[i].col);
        m.values_.push_back(sum);
        m.row_offsets_[triplets[i].row + 1]++;
        i = j;
    }
    for (std::int32_t r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
    m.validate();
    return m;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<std::int64_t> offsets(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (std::int32_t c : col_indices_) offsets[c + 1]++;
    for (std::int32_t c = 0; c < n_cols_; ++c) offsets[c + 1] += offsets[c];

    std::vector<std::int32_t> cols(col_indices_.size());
    std::vector<double> vals(values_.size());
    std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::int32_t i = 0; i < n_rows_; ++i) {
        for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const std::int64_t dst = cursor[col_indices_[k]]++;
            cols[dst] = i;
            vals[dst] = values_[k];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(offsets), std::move(cols),
                        std::move(vals));
}

double SparseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

bool SparseMatrix::has_cell(std::int32_t row, std::int32_t col) const {
    if (row < 0 || row >= n_rows_) return false;
    const auto cols = row_cols(row);
    return std::binary_search(cols.begin(), cols.end(), col);
}

SparseMatrix binary_union(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
        throw_usage("binary_union: shape mismatch, " + std::to_string(a.n_rows()) + "x" +
                    std::to_string(a.n_cols()) + " vs " + std::to_string(b.n_rows()) +
                    "x" + std::to_string(b.n_cols()));
    }
    std::vector<std::int64_t> offsets(static_cast<std::size_t>(a.n_rows()) + 1, 0);
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
    cols.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const auto ca = a.row_cols(i);
        const auto cb = b.row_cols(i);
        std::size_t p = 0, q = 0;
        while (p < ca.size() || q < cb.size()) {
            std::int32_t c;
            if (q >= cb.size() || (p < ca.size() && ca[p] <= cb[q])) {
                c = ca[p];
                if (q < cb.size() && cb[q] == c) ++q;
                ++p;
            } else {
                c = cb[q];
                ++q;
            }
            cols.push_back(c);
        }
        offsets[i + 1] = static_cast<std::int64_t>(cols.size());
    }
    vals.assign(cols.size(), 1.0);
    return SparseMatrix(a.n_rows(), a.n_cols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

SparseMatrix subtract_pattern(const SparseMatrix& m, const SparseMatrix& mask,
                              std::int64_t* dropped) {
    if (m.n_rows() != mask.n_rows() || m.n_cols() != mask.n_cols()) {
        throw_usage("subtract_pattern: shape mismatch");
    }
    std::vector<std::int64_t> offsets(static_cast<std::size_t>(m.n_rows()) + 1, 0);
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
    std::int64_t removed = 0;
    for (std::int32_t i = 0; i < m.n_rows(); ++i) {
        const auto cm = m.row_cols(i);
        const auto vm = m.row_values(i);
        const auto ck = mask.row_cols(i);
        std::size_t q = 0;
        for (std::size_t p = 0; p < cm.size(); ++p) {
            while (q < ck.size() && ck[q] < cm[p]) ++q;
            if (q < ck.size() && ck[q] == cm[p]) {
                ++removed;
                continue;
            }
            cols.push_back(cm[p]);
            vals.push_back(vm[p]);
        }
        offsets[i + 1] = static_cast<std::int64_t>(cols.size());
    }
    if (dropped != nullptr) *dropped = removed;
    return SparseMatrix(m.n_rows(), m.n_cols(), std::move(offsets), std::move(cols),
                        std::move(vals));
}

}  // namespace stabrec::linalg
