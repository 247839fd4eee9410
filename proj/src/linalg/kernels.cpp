#include "stabrec/linalg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "stabrec/error.hpp"
#include "stabrec/linalg/rng.hpp"

namespace stabrec::linalg {

namespace {

std::string sparse_shape(const SparseMatrix& m) {
    return std::to_string(m.n_rows()) + "x" + std::to_string(m.n_cols());
}

std::string dense_shape(const DenseMatrix& m) {
    return std::to_string(m.n_rows()) + "x" + std::to_string(m.n_cols());
}

}  // namespace

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols() != b.n_rows()) {
        throw_usage("spmm: inner dimension mismatch, A is " + sparse_shape(a) +
                    ", B is " + dense_shape(b));
    }
    DenseMatrix c(a.n_rows(), b.n_cols());
    const std::int32_t n = b.n_cols();
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double v = vals[k];
            const double* bk = b.row(cols[k]);
            for (std::int32_t j = 0; j < n; ++j) ci[j] += v * bk[j];
        }
    }
    return c;
}

DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b) {
    if (a.n_rows() != b.n_rows()) {
        throw_usage("spmm_transposed: row count mismatch, A is " + sparse_shape(a) +
                    ", B is " + dense_shape(b));
    }
    DenseMatrix c(a.n_cols(), b.n_cols());
    const std::int32_t n = b.n_cols();
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        const double* bi = b.row(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double v = vals[k];
            double* crow = c.row(cols[k]);
            for (std::int32_t j = 0; j < n; ++j) crow[j] += v * bi[j];
        }
    }
    return c;
}

QrResult qr_thin(const DenseMatrix& x) {
    const std::int32_t m = x.n_rows();
    const std::int32_t n = x.n_cols();
    if (m < n) {
        throw_usage("qr_thin: need n_rows >= n_cols, got " + dense_shape(x));
    }

    DenseMatrix a = x;
    // Householder vectors, one per eliminated column; empty when the column
    // below the diagonal was already zero.
    std::vector<std::vector<double>> reflectors(n);

    for (std::int32_t k = 0; k < n; ++k) {
        double norm_sq = 0.0;
        for (std::int32_t i = k; i < m; ++i) norm_sq += a(i, k) * a(i, k);
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) continue;  // rank-deficient column, R(k,k) stays 0

        const double alpha = a(k, k) > 0.0 ? -norm : norm;
        std::vector<double> v(static_cast<std::size_t>(m - k));
        v[0] = a(k, k) - alpha;
        for (std::int32_t i = k + 1; i < m; ++i) v[i - k] = a(i, k);
        double vnorm_sq = 0.0;
        for (double vi : v) vnorm_sq += vi * vi;
        const double vnorm = std::sqrt(vnorm_sq);
        for (double& vi : v) vi /= vnorm;

        for (std::int32_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::int32_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
            dot *= 2.0;
            for (std::int32_t i = k; i < m; ++i) a(i, j) -= dot * v[i - k];
        }
        a(k, k) = alpha;
        for (std::int32_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
        reflectors[k] = std::move(v);
    }

    DenseMatrix r(n, n);
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = i; j < n; ++j) r(i, j) = a(i, j);
    }

    // Accumulate Q = H_0 · … · H_{n−1} applied to the first n identity columns.
    DenseMatrix q(m, n);
    for (std::int32_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::int32_t k = n - 1; k >= 0; --k) {
        const auto& v = reflectors[k];
        if (v.empty()) continue;
        for (std::int32_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (std::int32_t i = k; i < m; ++i) dot += v[i - k] * q(i, j);
            dot *= 2.0;
            for (std::int32_t i = k; i < m; ++i) q(i, j) -= dot * v[i - k];
        }
    }

    // Fix signs so diag(R) >= 0.
    for (std::int32_t j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) {
            for (std::int32_t c = j; c < n; ++c) r(j, c) = -r(j, c);
            for (std::int32_t i = 0; i < m; ++i) q(i, j) = -q(i, j);
        }
    }
    return {std::move(q), std::move(r)};
}

namespace {

// One-sided Jacobi on a tall matrix (m >= n). No sign normalization here;
// callers apply the convention after any transpose handling.
SvdResult svd_tall(const DenseMatrix& a) {
    const std::int32_t m = a.n_rows();
    const std::int32_t n = a.n_cols();
    DenseMatrix g = a;
    DenseMatrix v = DenseMatrix::identity(n);

    // Columns at rounding level carry no direction; rotating them against
    // each other never converges under a relative criterion. Anything below
    // this norm counts as a zero column.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double negligible_norm = 1e3 * eps * frobenius_norm(a);
    const double negligible_sq = negligible_norm * negligible_norm;
    // Inner-product rounding grows with the column length; keep the pair
    // tolerance above it.
    const double pair_tol =
        std::max(kNumeric.jacobi_tol, 4.0 * static_cast<double>(m) * eps);

    bool converged = false;
    for (int sweep = 0; sweep < kNumeric.jacobi_max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::int32_t p = 0; p < n - 1; ++p) {
            for (std::int32_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::int32_t i = 0; i < m; ++i) {
                    const double gp = g(i, p), gq = g(i, q);
                    app += gp * gp;
                    aqq += gq * gq;
                    apq += gp * gq;
                }
                if (app <= negligible_sq || aqq <= negligible_sq) continue;
                if (std::fabs(apq) <= pair_tol * std::sqrt(app * aqq)) continue;
                converged = false;

                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::int32_t i = 0; i < m; ++i) {
                    const double gp = g(i, p), gq = g(i, q);
                    g(i, p) = cs * gp - sn * gq;
                    g(i, q) = sn * gp + cs * gq;
                }
                for (std::int32_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
            }
        }
    }
    if (!converged) {
        throw_numeric("dense_svd: Jacobi sweep limit reached without convergence");
    }

    std::vector<double> sigma(n);
    for (std::int32_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::int32_t i = 0; i < m; ++i) s += g(i, j) * g(i, j);
        sigma[j] = std::sqrt(s);
        if (sigma[j] <= negligible_norm) sigma[j] = 0.0;
    }

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t x, std::int32_t y) {
        return sigma[x] > sigma[y];
    });

    SvdResult out;
    out.u = DenseMatrix(m, n);
    out.v = DenseMatrix(n, n);
    out.singular_values.resize(n);
    for (std::int32_t j = 0; j < n; ++j) {
        const std::int32_t src = order[j];
        out.singular_values[j] = sigma[src];
        for (std::int32_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (sigma[src] > 0.0) {
            for (std::int32_t i = 0; i < m; ++i) out.u(i, j) = g(i, src) / sigma[src];
        }
    }

    // Columns with zero singular value got no direction from the data;
    // complete them with orthogonalized canonical vectors so U stays
    // orthonormal.
    for (std::int32_t j = 0; j < n; ++j) {
        if (out.singular_values[j] > 0.0) continue;
        for (std::int32_t cand = 0; cand < m; ++cand) {
            std::vector<double> e(static_cast<std::size_t>(m), 0.0);
            e[cand] = 1.0;
            for (std::int32_t c = 0; c < n; ++c) {
                if (c == j || (out.singular_values[c] == 0.0 && c > j)) continue;
                double dot = 0.0;
                for (std::int32_t i = 0; i < m; ++i) dot += e[i] * out.u(i, c);
                for (std::int32_t i = 0; i < m; ++i) e[i] -= dot * out.u(i, c);
            }
            double norm = 0.0;
            for (double ei : e) norm += ei * ei;
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::int32_t i = 0; i < m; ++i) out.u(i, j) = e[i] / norm;
                break;
            }
        }
    }
    return out;
}

void apply_sign_convention(DenseMatrix& u, DenseMatrix& v) {
    for (std::int32_t j = 0; j < v.n_cols(); ++j) {
        std::int32_t arg = 0;
        double best = -1.0;
        for (std::int32_t i = 0; i < v.n_rows(); ++i) {
            const double mag = std::fabs(v(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (v(arg, j) < 0.0) {
            for (std::int32_t i = 0; i < v.n_rows(); ++i) v(i, j) = -v(i, j);
            for (std::int32_t i = 0; i < u.n_rows(); ++i) u(i, j) = -u(i, j);
        }
    }
}

DenseMatrix dense_from_sparse(const SparseMatrix& a) {
    DenseMatrix d(a.n_rows(), a.n_cols());
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
}

DenseMatrix gaussian_matrix(std::int32_t rows, std::int32_t cols, std::uint64_t seed) {
    DenseMatrix m(rows, cols);
    Rng rng(seed);
    for (double& v : m.values()) v = rng.next_gaussian();
    return m;
}

SvdResult truncate_to_rank(SvdResult full, std::int32_t rank) {
    SvdResult out;
    out.u = DenseMatrix(full.u.n_rows(), rank);
    out.v = DenseMatrix(full.v.n_rows(), rank);
    out.singular_values.assign(full.singular_values.begin(),
                               full.singular_values.begin() + rank);
    for (std::int32_t i = 0; i < full.u.n_rows(); ++i) {
        for (std::int32_t j = 0; j < rank; ++j) out.u(i, j) = full.u(i, j);
    }
    for (std::int32_t i = 0; i < full.v.n_rows(); ++i) {
        for (std::int32_t j = 0; j < rank; ++j) out.v(i, j) = full.v(i, j);
    }
    return out;
}

}  // namespace

SvdResult dense_svd(const DenseMatrix& a) {
    SvdResult res;
    if (a.n_rows() >= a.n_cols()) {
        res = svd_tall(a);
    } else {
        SvdResult t = svd_tall(transpose(a));
        res.u = std::move(t.v);
        res.v = std::move(t.u);
        res.singular_values = std::move(t.singular_values);
    }
    apply_sign_convention(res.u, res.v);
    return res;
}

SvdResult truncated_svd(const SparseMatrix& a, std::int32_t rank, std::uint64_t seed) {
    const std::int32_t min_dim = std::min(a.n_rows(), a.n_cols());
    if (rank < 1 || rank > min_dim) {
        throw_usage("truncated_svd: rank " + std::to_string(rank) +
                    " out of range [1, " + std::to_string(min_dim) + "] for " +
                    sparse_shape(a));
    }
    if (a.nnz() == 0) {
        throw_data("empty interaction matrix");
    }

    if (min_dim <= kNumeric.svd_dense_cutoff) {
        SvdResult full = dense_svd(dense_from_sparse(a));
        return truncate_to_rank(std::move(full), rank);
    }

    // Randomized range finder with power iterations (Halko et al. style),
    // then an exact SVD of the small projected factor.
    const std::int32_t k =
        std::min<std::int32_t>(rank + kNumeric.svd_oversampling, min_dim);
    DenseMatrix omega = gaussian_matrix(a.n_cols(), k, seed);
    DenseMatrix q = qr_thin(spmm(a, omega)).q;
    for (std::int32_t it = 0; it < kNumeric.svd_power_iterations; ++it) {
        const DenseMatrix z = qr_thin(spmm_transposed(a, q)).q;
        q = qr_thin(spmm(a, z)).q;
    }

    // bt = Aᵀ·Q has the small dimension on the right; its SVD gives the
    // factors of A restricted to range(Q): A ≈ Q·Z·Σ·Wᵀ with bt = W·Σ·Zᵀ.
    const DenseMatrix bt = spmm_transposed(a, q);
    SvdResult small = dense_svd(bt);
    SvdResult out;
    out.u = matmul(q, small.v);
    out.v = std::move(small.u);
    out.singular_values = std::move(small.singular_values);
    out = truncate_to_rank(std::move(out), rank);
    apply_sign_convention(out.u, out.v);
    return out;
}

}  // namespace stabrec::linalg
