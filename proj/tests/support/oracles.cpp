#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace oracle {

DenseMatrix dense_from_sparse(const SparseMatrix& a) {
    DenseMatrix d(a.n_rows(), a.n_cols());
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols() != b.n_rows()) throw std::logic_error("oracle matmul shape");
    DenseMatrix c(a.n_rows(), b.n_cols());
    for (std::int32_t i = 0; i < a.n_rows(); ++i) {
        for (std::int32_t j = 0; j < b.n_cols(); ++j) {
            double s = 0.0;
            for (std::int32_t k = 0; k < a.n_cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
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
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.values().size(); ++i) c.values()[i] += b.values()[i];
    return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.values().size(); ++i) c.values()[i] -= b.values()[i];
    return c;
}

double frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

QrPair mgs_qr(const DenseMatrix& x) {
    const std::int32_t m = x.n_rows();
    const std::int32_t n = x.n_cols();
    DenseMatrix q = x;
    DenseMatrix r(n, n);

    // Two orthogonalization passes keep Q orthonormal well below test
    // tolerances even for moderately ill-conditioned inputs.
    for (std::int32_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::int32_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (std::int32_t i = 0; i < m; ++i) dot += q(i, k) * q(i, j);
                r(k, j) += dot;
                for (std::int32_t i = 0; i < m; ++i) q(i, j) -= dot * q(i, k);
            }
        }
        double norm = 0.0;
        for (std::int32_t i = 0; i < m; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        r(j, j) = norm;
        if (norm > 0.0) {
            for (std::int32_t i = 0; i < m; ++i) q(i, j) /= norm;
        }
    }
    return {std::move(q), std::move(r)};
}

EigResult jacobi_eig(const DenseMatrix& symmetric) {
    const std::int32_t n = symmetric.n_rows();
    DenseMatrix a = symmetric;
    DenseMatrix v = DenseMatrix::identity(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::int32_t p = 0; p < n; ++p) {
            for (std::int32_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off < 1e-30) break;

        for (std::int32_t p = 0; p < n - 1; ++p) {
            for (std::int32_t q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::int32_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::int32_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::int32_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int32_t x, std::int32_t y) { return a(x, x) > a(y, y); });

    EigResult res;
    res.values.resize(n);
    res.vectors = DenseMatrix(n, n);
    for (std::int32_t j = 0; j < n; ++j) {
        res.values[j] = a(order[j], order[j]);
        for (std::int32_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
    }
    return res;
}

SvdTriple svd_via_gram(const DenseMatrix& a) {
    if (a.n_rows() < a.n_cols()) {
        SvdTriple t = svd_via_gram(oracle::transpose(a));
        return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }
    const DenseMatrix gram = oracle::matmul(oracle::transpose(a), a);
    EigResult eig = jacobi_eig(gram);

    SvdTriple res;
    res.v = std::move(eig.vectors);
    res.sigma.resize(eig.values.size());
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        res.sigma[i] = std::sqrt(std::max(0.0, eig.values[i]));
    }
    res.u = DenseMatrix(a.n_rows(), a.n_cols());
    const DenseMatrix av = oracle::matmul(a, res.v);
    for (std::int32_t j = 0; j < a.n_cols(); ++j) {
        if (res.sigma[j] <= 0.0) continue;
        for (std::int32_t i = 0; i < a.n_rows(); ++i) {
            res.u(i, j) = av(i, j) / res.sigma[j];
        }
    }
    return res;
}

DenseMatrix psi_dense_reconstruction(const DenseMatrix& u0, const DenseMatrix& s0,
                                     const DenseMatrix& v0, const DenseMatrix& delta) {
    const DenseMatrix k1 =
        oracle::add(oracle::matmul(u0, s0), oracle::matmul(delta, v0));
    const QrPair qr1 = mgs_qr(k1);
    const DenseMatrix& u1 = qr1.q;
    const DenseMatrix& s1_hat = qr1.r;
    const DenseMatrix s0_tilde = oracle::subtract(
        s1_hat, oracle::matmul(oracle::transpose(u1), oracle::matmul(delta, v0)));
    const DenseMatrix l1 =
        oracle::add(oracle::matmul(v0, oracle::transpose(s0_tilde)),
                    oracle::matmul(oracle::transpose(delta), u1));
    const QrPair qr2 = mgs_qr(l1);
    const DenseMatrix& v1 = qr2.q;
    const DenseMatrix s1 = oracle::transpose(qr2.r);
    return oracle::matmul(u1, oracle::matmul(s1, oracle::transpose(v1)));
}

double brute_wji(const std::vector<std::int32_t>& list_a,
                 const std::vector<std::int32_t>& list_b, std::int32_t n,
                 std::int32_t catalog) {
    std::vector<double> wa(catalog, 0.0), wb(catalog, 0.0);
    for (std::size_t pos = 0; pos < list_a.size() && pos < static_cast<std::size_t>(n); ++pos) {
        wa[list_a[pos]] = 1.0 / static_cast<double>(pos + 1);
    }
    for (std::size_t pos = 0; pos < list_b.size() && pos < static_cast<std::size_t>(n); ++pos) {
        wb[list_b[pos]] = 1.0 / static_cast<double>(pos + 1);
    }
    double num = 0.0, den = 0.0;
    for (std::int32_t i = 0; i < catalog; ++i) {
        num += std::min(wa[i], wb[i]);
        den += std::max(wa[i], wb[i]);
    }
    if (den == 0.0) return 1.0;
    return num / den;
}

SparseMatrix random_sparse(Rng& rng, std::int32_t rows, std::int32_t cols,
                           double density) {
    std::set<std::pair<std::int32_t, std::int32_t>> cells;
    const auto target = static_cast<std::int64_t>(
        std::max(1.0, density * static_cast<double>(rows) * static_cast<double>(cols)));
    while (static_cast<std::int64_t>(cells.size()) < target) {
        cells.emplace(static_cast<std::int32_t>(rng.next_below(rows)),
                      static_cast<std::int32_t>(rng.next_below(cols)));
    }
    std::vector<stabrec::linalg::Triplet> triplets;
    triplets.reserve(cells.size());
    for (const auto& [r, c] : cells) triplets.push_back({r, c, rng.next_gaussian()});
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

DenseMatrix random_dense(Rng& rng, std::int32_t rows, std::int32_t cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.values()) v = rng.next_gaussian();
    return m;
}

DenseMatrix random_orthonormal(Rng& rng, std::int32_t rows, std::int32_t cols) {
    return mgs_qr(random_dense(rng, rows, cols)).q;
}

stabrec::model::FactorModel random_model(Rng& rng, std::int32_t n_users,
                                         std::int32_t n_items, std::int32_t rank) {
    stabrec::model::FactorModel m;
    m.rank = rank;
    m.step_index = 0;
    m.user_factors = random_orthonormal(rng, n_users, rank);
    m.item_factors = random_orthonormal(rng, n_items, rank);
    m.core = random_dense(rng, rank, rank);
    return m;
}

}  // namespace oracle
