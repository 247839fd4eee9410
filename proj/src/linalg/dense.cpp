#include "stabrec/linalg/dense.hpp"

#include <cmath>
#include <string>

#include "stabrec/error.hpp"

namespace stabrec::linalg {

namespace {

std::string shape_str(const DenseMatrix& m) {
    return std::to_string(m.n_rows()) + "x" + std::to_string(m.n_cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
        throw_usage(std::string(op) + ": shape mismatch, " + shape_str(a) +
                    " vs " + shape_str(b));
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::int32_t rows, std::int32_t cols)
    : n_rows_(rows), n_cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw_usage("DenseMatrix: negative dimensions " + std::to_string(rows) +
                    "x" + std::to_string(cols));
    }
    values_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

DenseMatrix DenseMatrix::identity(std::int32_t n) {
    DenseMatrix m(n, n);
    for (std::int32_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols() != b.n_rows()) {
        throw_usage("matmul: inner dimension mismatch, " + shape_str(a) + " * " +
                    shape_str(b));
    }
    DenseMatrix c(a.n_rows(), b.n_cols());
    const std::int32_t n = b.n_cols();
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::int32_t k = 0; k < a.n_cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::int32_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_rows() != b.n_rows()) {
        throw_usage("matmul_at_b: row count mismatch, " + shape_str(a) + " vs " +
                    shape_str(b));
    }
    DenseMatrix c(a.n_cols(), b.n_cols());
    const std::int32_t n = b.n_cols();
    for (std::int32_t k = 0; k < a.n_rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::int32_t i = 0; i < a.n_cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row(i);
            for (std::int32_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols() != b.n_cols()) {
        throw_usage("matmul_a_bt: column count mismatch, " + shape_str(a) +
                    " vs " + shape_str(b));
    }
    DenseMatrix c(a.n_rows(), b.n_rows());
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::int32_t j = 0; j < b.n_rows(); ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::int32_t k = 0; k < a.n_cols(); ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.n_cols(), a.n_rows());
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        for (std::int32_t j = 0; j < a.n_cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "add");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.values().size(); ++i) c.values()[i] += b.values()[i];
    return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "subtract");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.values().size(); ++i) c.values()[i] -= b.values()[i];
    return c;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
    }
    return m;
}

double orthonormality_defect(const DenseMatrix& q) {
    const DenseMatrix g = matmul_at_b(q, q);
    double m = 0.0;
    for (std::int32_t i = 0; i < g.n_rows(); ++i) {
        for (std::int32_t j = 0; j < g.n_cols(); ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            m = std::max(m, std::fabs(g(i, j) - target));
        }
    }
    return m;
}

}  // namespace stabrec::linalg
