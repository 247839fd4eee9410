#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "stabrec/config.hpp"
#include "stabrec/error.hpp"
#include "stabrec/linalg/kernels.hpp"
#include "stabrec/linalg/rng.hpp"
#include "stabrec/model/factor_model.hpp"
#include "support/oracles.hpp"

using namespace stabrec;
using namespace stabrec::linalg;
using namespace stabrec::model;

namespace {

SparseMatrix sparse_diag(const std::vector<double>& d) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), d[i]});
    }
    const auto n = static_cast<std::int32_t>(d.size());
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix sparse_from_dense(const DenseMatrix& d) {
    std::vector<Triplet> t;
    for (std::int32_t i = 0; i < d.n_rows(); ++i) {
        for (std::int32_t j = 0; j < d.n_cols(); ++j) {
            if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
        }
    }
    return SparseMatrix::from_triplets(d.n_rows(), d.n_cols(), std::move(t));
}

// Exact rank-r model built directly from orthonormal factors.
FactorModel exact_model(Rng& rng, std::int32_t m, std::int32_t n, std::int32_t r) {
    FactorModel model = oracle::random_model(rng, m, n, r);
    // Spread the core's diagonal so the instance is comfortably full-rank.
    for (std::int32_t i = 0; i < r; ++i) model.core(i, i) += 3.0 + i;
    return model;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("train_puresvd: exact rank-1 input") {
    Rng rng(21);
    std::vector<double> u(8), v(5);
    for (double& x : u) x = rng.next_gaussian();
    for (double& x : v) x = rng.next_gaussian();
    std::vector<Triplet> cells;
    for (std::int32_t i = 0; i < 8; ++i) {
        for (std::int32_t j = 0; j < 5; ++j) cells.push_back({i, j, u[i] * v[j]});
    }
    const SparseMatrix a = SparseMatrix::from_triplets(8, 5, std::move(cells));

    const FactorModel model = train_puresvd(a, 1);
    CHECK(model.step_index == 0);
    CHECK(frobenius_norm(subtract(reconstruct(model), oracle::dense_from_sparse(a))) <=
          1e-10 * a.frobenius_norm());
}

TEST_CASE("train_puresvd: diagonal case keeps the top singular values") {
    const FactorModel model = train_puresvd(sparse_diag({3.0, 2.0, 1.0}), 2);
    CHECK(model.core(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(model.core(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.core(0, 1) == 0.0);
    CHECK(model.core(1, 0) == 0.0);
    validate_model(model);
}

TEST_CASE("train_puresvd: ML-1M-shaped synthetic input completes") {
    Rng rng(22);
    std::vector<Triplet> cells;
    std::set<std::pair<std::int32_t, std::int32_t>> used;
    while (used.size() < 60000) {
        const auto r = static_cast<std::int32_t>(rng.next_below(6038));
        const auto c = static_cast<std::int32_t>(rng.next_below(3533));
        if (used.emplace(r, c).second) cells.push_back({r, c, 1.0});
    }
    const SparseMatrix a = SparseMatrix::from_triplets(6038, 3533, std::move(cells));
    const FactorModel model = train_puresvd(a, 10, 7);
    CHECK(model.rank == 10);
    CHECK(model.n_users() == 6038);
    CHECK(model.n_items() == 3533);
    validate_model(model);
    for (std::int32_t i = 0; i + 1 < 10; ++i) {
        CHECK(model.core(i, i) >= model.core(i + 1, i + 1));
    }
}

TEST_CASE("train_puresvd propagates factorization errors") {
    CHECK_THROWS_AS(train_puresvd(SparseMatrix::zero(4, 4), 2), Error);
    CHECK_THROWS_AS(train_puresvd(sparse_diag({1.0, 2.0}), 3), Error);
}

TEST_CASE("psi_step: zero delta leaves Y unchanged") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(mix_seed(500, seed));
        const FactorModel m0 = exact_model(rng, 12, 9, 3);
        const FactorModel m1 = psi_step(m0, SparseMatrix::zero(12, 9));
        CAPTURE(seed);
        CHECK(m1.step_index == m0.step_index + 1);
        CHECK(frobenius_norm(subtract(reconstruct(m1), reconstruct(m0))) <= 1e-10);
    }
}

TEST_CASE("psi_step: updates inside the current subspaces are exact") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(mix_seed(510, seed));
        const FactorModel m0 = exact_model(rng, 20, 15, 3);
        const DenseMatrix a0 = reconstruct(m0);

        // delta = U0·C·V0ᵀ stays inside span(U0) x span(V0).
        const DenseMatrix c = oracle::random_dense(rng, 3, 3);
        const DenseMatrix delta_dense = linalg::matmul(
            m0.user_factors, linalg::matmul_a_bt(c, m0.item_factors));
        const SparseMatrix delta = sparse_from_dense(delta_dense);

        const FactorModel m1 = psi_step(m0, delta);
        const DenseMatrix expected = add(a0, delta_dense);
        CAPTURE(seed);
        CHECK(frobenius_norm(subtract(reconstruct(m1), expected)) <=
              1e-8 * (1.0 + frobenius_norm(expected)));
    }
}

TEST_CASE("psi_step: generic small instance stays bounded and valid") {
    Rng rng(520);
    const FactorModel m0 = exact_model(rng, 10, 8, 3);
    const SparseMatrix delta = SparseMatrix::from_triplets(10, 8, {{4, 6, 1.0}});

    const FactorModel m1 = psi_step(m0, delta);
    validate_model(m1);

    const DenseMatrix y0 = reconstruct(m0);
    const DenseMatrix y1 = reconstruct(m1);
    const double change = frobenius_norm(subtract(y1, y0));

    // Oracle route: the same five lines evaluated densely give the response
    // constant of this instance.
    const DenseMatrix y1_oracle = oracle::psi_dense_reconstruction(
        m0.user_factors, m0.core, m0.item_factors, oracle::dense_from_sparse(delta));
    const double oracle_change = oracle::frobenius(oracle::subtract(y1_oracle, y0));
    const double delta_norm = delta.frobenius_norm();
    CHECK(change <= oracle_change + 1e-9);
    // Response constant measured from the oracle run on this fixed instance.
    CHECK(oracle_change / delta_norm == doctest::Approx(0.445984216416).epsilon(1e-9));
    CHECK(change <= 0.45 * delta_norm);
}

TEST_CASE("psi_step reconstructs identically to the dense transcription") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(mix_seed(530, seed));
        const auto m = static_cast<std::int32_t>(8 + rng.next_below(23));
        const auto n = static_cast<std::int32_t>(8 + rng.next_below(23));
        const auto r = static_cast<std::int32_t>(1 + rng.next_below(5));
        const FactorModel m0 = exact_model(rng, m, n, r);
        const SparseMatrix delta = oracle::random_sparse(rng, m, n, 0.1);

        const FactorModel m1 = psi_step(m0, delta);
        const DenseMatrix y1 = reconstruct(m1);
        const DenseMatrix y1_oracle = oracle::psi_dense_reconstruction(
            m0.user_factors, m0.core, m0.item_factors, oracle::dense_from_sparse(delta));
        CAPTURE(seed);
        CHECK(frobenius_norm(subtract(y1, y1_oracle)) <=
              1e-8 * (1.0 + oracle::frobenius(y1_oracle)));
    }
}

TEST_CASE("psi_step preserves orthonormality for arbitrary deltas") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(mix_seed(540, seed));
        const FactorModel m0 = exact_model(rng, 15, 12, 4);
        const SparseMatrix delta = oracle::random_sparse(rng, 15, 12, 0.15);
        const FactorModel m1 = psi_step(m0, delta);
        CAPTURE(seed);
        CHECK(orthonormality_defect(m1.user_factors) <= kNumeric.model_orthonormality_tol);
        CHECK(orthonormality_defect(m1.item_factors) <= kNumeric.model_orthonormality_tol);
    }
}

TEST_CASE("psi_step: response grows monotonically with the delta scale") {
    Rng rng(550);
    const FactorModel m0 = exact_model(rng, 14, 11, 3);
    const SparseMatrix direction = oracle::random_sparse(rng, 14, 11, 0.1);
    const DenseMatrix y0 = reconstruct(m0);

    double previous = -1.0;
    for (const double scale : {0.0, 0.25, 0.5, 1.0}) {
        std::vector<Triplet> cells;
        for (std::int32_t i = 0; i < direction.n_rows(); ++i) {
            const auto cols = direction.row_cols(i);
            const auto vals = direction.row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (scale != 0.0) cells.push_back({i, cols[k], scale * vals[k]});
            }
        }
        const SparseMatrix delta =
            SparseMatrix::from_triplets(14, 11, std::move(cells));
        const FactorModel m1 = psi_step(m0, delta);
        const double change = frobenius_norm(subtract(reconstruct(m1), y0));
        CAPTURE(scale);
        CHECK(change >= previous - 1e-12);
        previous = change;
    }
}

TEST_CASE("psi_step never mutates its input") {
    Rng rng(560);
    const FactorModel m0 = exact_model(rng, 9, 7, 2);
    const std::vector<double> u_before = m0.user_factors.values();
    const std::vector<double> s_before = m0.core.values();
    const std::vector<double> v_before = m0.item_factors.values();

    const SparseMatrix delta = oracle::random_sparse(rng, 9, 7, 0.2);
    const FactorModel m1 = psi_step(m0, delta);
    (void)m1;
    CHECK(m0.user_factors.values() == u_before);
    CHECK(m0.core.values() == s_before);
    CHECK(m0.item_factors.values() == v_before);
    CHECK(m0.step_index == 0);
}

TEST_CASE("psi_step: QR and SVD orthogonalization agree at the Y level") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(mix_seed(570, seed));
        const FactorModel m0 = exact_model(rng, 13, 10, 3);
        const SparseMatrix delta = oracle::random_sparse(rng, 13, 10, 0.15);
        const FactorModel via_qr = psi_step(m0, delta, PsiDecomposition::qr);
        const FactorModel via_svd = psi_step(m0, delta, PsiDecomposition::svd);
        CAPTURE(seed);
        CHECK(frobenius_norm(subtract(reconstruct(via_qr), reconstruct(via_svd))) <=
              1e-8 * (1.0 + frobenius_norm(reconstruct(via_qr))));
        // Factors themselves are not expected to match elementwise.
    }
}

TEST_CASE("psi_step: shape mismatch is an error") {
    Rng rng(580);
    const FactorModel m0 = exact_model(rng, 9, 7, 2);
    CHECK_THROWS_AS(psi_step(m0, SparseMatrix::zero(9, 8)), Error);
    CHECK_THROWS_AS(psi_step(m0, SparseMatrix::zero(8, 7)), Error);
}

TEST_CASE("reconstruct: identity-like factors embed the core") {
    FactorModel m;
    m.rank = 2;
    m.user_factors = DenseMatrix(4, 2);
    m.item_factors = DenseMatrix(3, 2);
    for (std::int32_t i = 0; i < 2; ++i) {
        m.user_factors(i, i) = 1.0;
        m.item_factors(i, i) = 1.0;
    }
    m.core = DenseMatrix(2, 2);
    m.core(0, 0) = 5.0;
    m.core(1, 1) = 7.0;

    const DenseMatrix y = reconstruct(m);
    for (std::int32_t i = 0; i < 4; ++i) {
        for (std::int32_t j = 0; j < 3; ++j) {
            const double expect = (i == j && i < 2) ? m.core(i, i) : 0.0;
            CHECK(y(i, j) == expect);
        }
    }
}

TEST_CASE("reconstruct: recovers the diagonal training matrix") {
    const FactorModel m = train_puresvd(sparse_diag({3.0, 2.0, 1.0}), 3);
    const DenseMatrix y = reconstruct(m);
    for (std::int32_t i = 0; i < 3; ++i) {
        for (std::int32_t j = 0; j < 3; ++j) {
            const double expect = (i == j) ? 3.0 - i : 0.0;
            CHECK(y(i, j) == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("reconstruct matches the triple-loop oracle") {
    Rng rng(590);
    const FactorModel m = oracle::random_model(rng, 7, 6, 3);
    const DenseMatrix expected = oracle::matmul(
        m.user_factors, oracle::matmul(m.core, oracle::transpose(m.item_factors)));
    CHECK(max_abs_diff(reconstruct(m), expected) <= 1e-12);
}

TEST_CASE("reconstruct refuses beyond the test-size cap") {
    FactorModel m;
    m.rank = 1;
    m.user_factors = DenseMatrix(40000, 1);
    m.item_factors = DenseMatrix(40000, 1);
    m.core = DenseMatrix(1, 1);
    CHECK_THROWS_AS(reconstruct(m), Error);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    Rng rng(600);
    FactorModel m = oracle::random_model(rng, 11, 9, 4);
    m.step_index = 17;
    const auto path = temp_file("stabrec_test_checkpoint.bin");
    save_checkpoint(m, path);
    const FactorModel loaded = load_checkpoint(path);

    CHECK(loaded.rank == m.rank);
    CHECK(loaded.step_index == 17);
    CHECK(loaded.user_factors.values() == m.user_factors.values());
    CHECK(loaded.core.values() == m.core.values());
    CHECK(loaded.item_factors.values() == m.item_factors.values());
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint: corrupt files are data errors") {
    const auto path = temp_file("stabrec_test_checkpoint_bad.bin");
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("not a checkpoint", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_checkpoint(path), Error);
    CHECK_THROWS_AS(load_checkpoint(temp_file("stabrec_does_not_exist.bin")), Error);
    std::filesystem::remove(path);
}

TEST_CASE("validate_model rejects broken states") {
    Rng rng(610);
    FactorModel m = oracle::random_model(rng, 8, 6, 2);
    validate_model(m);
    m.user_factors(0, 0) += 0.5;  // destroys orthonormality
    CHECK_THROWS_AS(validate_model(m), Error);
    m = oracle::random_model(rng, 8, 6, 2);
    m.rank = 3;
    CHECK_THROWS_AS(validate_model(m), Error);
}
