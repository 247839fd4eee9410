#include "stabrec/model/factor_model.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "stabrec/config.hpp"
#include "stabrec/error.hpp"
#include "stabrec/linalg/kernels.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint and matrix files are little-endian; big-endian hosts "
              "are not supported");

namespace stabrec::model {

void validate_model(const FactorModel& m) {
    if (m.rank < 1) throw_usage("FactorModel: rank must be >= 1");
    if (m.user_factors.n_cols() != m.rank || m.item_factors.n_cols() != m.rank ||
        m.core.n_rows() != m.rank || m.core.n_cols() != m.rank) {
        throw_usage("FactorModel: factor shapes inconsistent with rank " +
                    std::to_string(m.rank));
    }
    const double du = linalg::orthonormality_defect(m.user_factors);
    const double dv = linalg::orthonormality_defect(m.item_factors);
    if (du > kNumeric.model_orthonormality_tol || dv > kNumeric.model_orthonormality_tol) {
        throw_numeric("FactorModel: factors lost orthonormality (defect " +
                      std::to_string(std::max(du, dv)) + ")");
    }
}

linalg::DenseMatrix reconstruct(const FactorModel& m) {
    const std::int64_t elements =
        static_cast<std::int64_t>(m.n_users()) * static_cast<std::int64_t>(m.n_items());
    if (elements > kNumeric.reconstruct_max_elements) {
        throw_usage("reconstruct: " + std::to_string(m.n_users()) + "x" +
                    std::to_string(m.n_items()) +
                    " exceeds the test-size cap of " +
                    std::to_string(kNumeric.reconstruct_max_elements) + " elements");
    }
    return linalg::matmul_a_bt(linalg::matmul(m.user_factors, m.core), m.item_factors);
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x444d5253;  // "SRMD"
constexpr std::uint32_t kCheckpointVersion = 1;

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in) throw_data("checkpoint: truncated file");
}

void write_dense(std::ofstream& out, const linalg::DenseMatrix& m) {
    write_raw(out, m.values().data(), m.values().size() * sizeof(double));
}

void read_dense(std::ifstream& in, linalg::DenseMatrix& m) {
    read_raw(in, m.values().data(), m.values().size() * sizeof(double));
}

}  // namespace

void save_checkpoint(const FactorModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("checkpoint: cannot open " + path.string() + " for writing");

    write_raw(out, &kCheckpointMagic, sizeof(kCheckpointMagic));
    write_raw(out, &kCheckpointVersion, sizeof(kCheckpointVersion));
    const std::int32_t rank = m.rank;
    const std::int64_t step = m.step_index;
    const std::int32_t n_users = m.n_users();
    const std::int32_t n_items = m.n_items();
    write_raw(out, &rank, sizeof(rank));
    write_raw(out, &step, sizeof(step));
    write_raw(out, &n_users, sizeof(n_users));
    write_raw(out, &n_items, sizeof(n_items));
    write_dense(out, m.user_factors);
    write_dense(out, m.core);
    write_dense(out, m.item_factors);
    if (!out) throw_data("checkpoint: write failed for " + path.string());
}

FactorModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("checkpoint: cannot open " + path.string());

    std::uint32_t magic = 0, version = 0;
    read_raw(in, &magic, sizeof(magic));
    read_raw(in, &version, sizeof(version));
    if (magic != kCheckpointMagic) throw_data("checkpoint: bad magic in " + path.string());
    if (version != kCheckpointVersion) {
        throw_data("checkpoint: unsupported version " + std::to_string(version));
    }

    FactorModel m;
    std::int32_t n_users = 0, n_items = 0;
    read_raw(in, &m.rank, sizeof(m.rank));
    read_raw(in, &m.step_index, sizeof(m.step_index));
    read_raw(in, &n_users, sizeof(n_users));
    read_raw(in, &n_items, sizeof(n_items));
    if (m.rank < 1 || n_users < 0 || n_items < 0) {
        throw_data("checkpoint: inconsistent header in " + path.string());
    }
    m.user_factors = linalg::DenseMatrix(n_users, m.rank);
    m.core = linalg::DenseMatrix(m.rank, m.rank);
    m.item_factors = linalg::DenseMatrix(n_items, m.rank);
    read_dense(in, m.user_factors);
    read_dense(in, m.core);
    read_dense(in, m.item_factors);
    return m;
}

FactorModel train_puresvd(const linalg::SparseMatrix& interactions, std::int32_t rank,
                          std::uint64_t seed) {
    linalg::SvdResult svd = linalg::truncated_svd(interactions, rank, seed);
    FactorModel m;
    m.rank = rank;
    m.step_index = 0;
    m.user_factors = std::move(svd.u);
    m.item_factors = std::move(svd.v);
    m.core = linalg::DenseMatrix(rank, rank);
    for (std::int32_t i = 0; i < rank; ++i) m.core(i, i) = svd.singular_values[i];
    return m;
}

namespace {

// Orthonormal-column factorization X = Q·B used at the two integrator
// orthogonalization points. QR takes B = R; the SVD variant takes
// B = Σ·Wᵀ from X = Q·Σ·Wᵀ.
void orthogonal_factor(const linalg::DenseMatrix& x, PsiDecomposition kind,
                       linalg::DenseMatrix& q, linalg::DenseMatrix& b) {
    if (kind == PsiDecomposition::qr) {
        linalg::QrResult qr = linalg::qr_thin(x);
        q = std::move(qr.q);
        b = std::move(qr.r);
        return;
    }
    linalg::SvdResult svd = linalg::dense_svd(x);
    q = std::move(svd.u);
    b = linalg::DenseMatrix(x.n_cols(), x.n_cols());
    for (std::int32_t i = 0; i < x.n_cols(); ++i) {
        for (std::int32_t j = 0; j < x.n_cols(); ++j) {
            b(i, j) = svd.singular_values[i] * svd.v(j, i);
        }
    }
}

}  // namespace

FactorModel psi_step(const FactorModel& m, const linalg::SparseMatrix& delta,
                     PsiDecomposition decomposition) {
    if (delta.n_rows() != m.n_users() || delta.n_cols() != m.n_items()) {
        throw_usage("psi_step: delta is " + std::to_string(delta.n_rows()) + "x" +
                    std::to_string(delta.n_cols()) + ", model expects " +
                    std::to_string(m.n_users()) + "x" + std::to_string(m.n_items()));
    }

    // K1 = U0·S0 + ΔA·V0
    const linalg::DenseMatrix delta_v = linalg::spmm(delta, m.item_factors);
    const linalg::DenseMatrix k1 =
        linalg::add(linalg::matmul(m.user_factors, m.core), delta_v);

    // U1, Ŝ1 from the decomposition of K1
    linalg::DenseMatrix u1, s1_hat;
    orthogonal_factor(k1, decomposition, u1, s1_hat);

    // S̃0 = Ŝ1 − U1ᵀ·ΔA·V0
    const linalg::DenseMatrix s0_tilde =
        linalg::subtract(s1_hat, linalg::matmul_at_b(u1, delta_v));

    // L1 = V0·S̃0ᵀ + ΔAᵀ·U1
    const linalg::DenseMatrix l1 =
        linalg::add(linalg::matmul_a_bt(m.item_factors, s0_tilde),
                    linalg::spmm_transposed(delta, u1));

    // V1, S1ᵀ from the decomposition of L1
    linalg::DenseMatrix v1, s1_t;
    orthogonal_factor(l1, decomposition, v1, s1_t);

    FactorModel next;
    next.rank = m.rank;
    next.step_index = m.step_index + 1;
    next.user_factors = std::move(u1);
    next.core = linalg::transpose(s1_t);
    next.item_factors = std::move(v1);
    return next;
}

}  // namespace stabrec::model
