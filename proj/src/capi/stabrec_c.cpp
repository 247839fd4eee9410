#include "stabrec.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <exception>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stabrec/data/split_io.hpp"
#include "stabrec/error.hpp"
#include "stabrec/harness/experiment.hpp"
#include "stabrec/linalg/sparse.hpp"
#include "stabrec/metrics/metrics.hpp"
#include "stabrec/model/factor_model.hpp"
#include "stabrec/recommend/scorer.hpp"

struct stabrec_matrix {
    stabrec::linalg::SparseMatrix m;
};

struct stabrec_model {
    stabrec::model::FactorModel m;
};

namespace {

thread_local std::string g_last_error;

stabrec_status to_status(const stabrec::Error& e) {
    switch (e.code()) {
        case stabrec::ErrorCode::usage:
            return STABREC_ERR_USAGE;
        case stabrec::ErrorCode::data:
            return STABREC_ERR_DATA;
        case stabrec::ErrorCode::numeric:
            return STABREC_ERR_NUMERIC;
    }
    return STABREC_ERR_USAGE;
}

template <typename Fn>
stabrec_status guarded(Fn&& fn) {
    try {
        fn();
        return STABREC_OK;
    } catch (const stabrec::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return STABREC_ERR_DATA;
    } catch (...) {
        g_last_error = "unknown error";
        return STABREC_ERR_DATA;
    }
}

stabrec_status usage_error(const char* msg) {
    g_last_error = msg;
    return STABREC_ERR_USAGE;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> parts;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

extern "C" {

const char* stabrec_version(void) { return "0.1.0"; }

const char* stabrec_last_error(void) { return g_last_error.c_str(); }

stabrec_status stabrec_matrix_create(int32_t n_rows, int32_t n_cols,
                                     const int32_t* rows, const int32_t* cols,
                                     int64_t nnz, stabrec_matrix** out) {
    if (out == nullptr) return usage_error("matrix_create: out is NULL");
    if (nnz > 0 && (rows == nullptr || cols == nullptr)) {
        return usage_error("matrix_create: NULL coordinate arrays");
    }
    return guarded([&] {
        std::vector<stabrec::linalg::Triplet> cells;
        cells.reserve(static_cast<std::size_t>(nnz));
        for (int64_t i = 0; i < nnz; ++i) cells.push_back({rows[i], cols[i], 1.0});
        std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        cells.erase(std::unique(cells.begin(), cells.end(),
                                [](const auto& a, const auto& b) {
                                    return a.row == b.row && a.col == b.col;
                                }),
                    cells.end());
        *out = new stabrec_matrix{stabrec::linalg::SparseMatrix::from_triplets(
            n_rows, n_cols, std::move(cells))};
    });
}

stabrec_status stabrec_matrix_read(const char* path, stabrec_matrix** out) {
    if (path == nullptr || out == nullptr) return usage_error("matrix_read: NULL argument");
    return guarded([&] { *out = new stabrec_matrix{stabrec::data::read_csr(path)}; });
}

stabrec_status stabrec_matrix_write(const stabrec_matrix* m, const char* path) {
    if (m == nullptr || path == nullptr) return usage_error("matrix_write: NULL argument");
    return guarded([&] { stabrec::data::write_csr(path, m->m); });
}

void stabrec_matrix_free(stabrec_matrix* m) { delete m; }

int32_t stabrec_matrix_rows(const stabrec_matrix* m) { return m ? m->m.n_rows() : 0; }
int32_t stabrec_matrix_cols(const stabrec_matrix* m) { return m ? m->m.n_cols() : 0; }
int64_t stabrec_matrix_nnz(const stabrec_matrix* m) { return m ? m->m.nnz() : 0; }

stabrec_status stabrec_train_puresvd(const stabrec_matrix* interactions, int32_t rank,
                                     uint64_t seed, stabrec_model** out) {
    if (interactions == nullptr || out == nullptr) {
        return usage_error("train_puresvd: NULL argument");
    }
    return guarded([&] {
        *out = new stabrec_model{
            stabrec::model::train_puresvd(interactions->m, rank, seed)};
    });
}

stabrec_status stabrec_psi_step(const stabrec_model* m, const stabrec_matrix* delta,
                                stabrec_model** out) {
    if (m == nullptr || delta == nullptr || out == nullptr) {
        return usage_error("psi_step: NULL argument");
    }
    return guarded([&] {
        *out = new stabrec_model{stabrec::model::psi_step(m->m, delta->m)};
    });
}

stabrec_status stabrec_model_save(const stabrec_model* m, const char* path) {
    if (m == nullptr || path == nullptr) return usage_error("model_save: NULL argument");
    return guarded([&] { stabrec::model::save_checkpoint(m->m, path); });
}

stabrec_status stabrec_model_load(const char* path, stabrec_model** out) {
    if (path == nullptr || out == nullptr) return usage_error("model_load: NULL argument");
    return guarded(
        [&] { *out = new stabrec_model{stabrec::model::load_checkpoint(path)}; });
}

void stabrec_model_free(stabrec_model* m) { delete m; }

int32_t stabrec_model_rank(const stabrec_model* m) { return m ? m->m.rank : 0; }
int64_t stabrec_model_step(const stabrec_model* m) { return m ? m->m.step_index : 0; }
int32_t stabrec_model_users(const stabrec_model* m) { return m ? m->m.n_users() : 0; }
int32_t stabrec_model_items(const stabrec_model* m) { return m ? m->m.n_items() : 0; }

stabrec_status stabrec_recommend(const stabrec_model* m, const int32_t* history_items,
                                 int64_t history_len, int32_t top_n,
                                 int32_t* out_items, int32_t* out_len) {
    if (m == nullptr || out_items == nullptr || out_len == nullptr) {
        return usage_error("recommend: NULL argument");
    }
    if (history_len > 0 && history_items == nullptr) {
        return usage_error("recommend: NULL history with positive length");
    }
    return guarded([&] {
        const std::span<const int32_t> history(history_items,
                                               static_cast<std::size_t>(history_len));
        const std::vector<double> scores = stabrec::recommend::score_user(m->m, history);
        const stabrec::recommend::RecommendationList list =
            stabrec::recommend::top_n(scores, history, top_n);
        *out_len = static_cast<int32_t>(list.items.size());
        std::memcpy(out_items, list.items.data(), list.items.size() * sizeof(int32_t));
    });
}

stabrec_status stabrec_wji(const int32_t* items_a, int32_t len_a, const int32_t* items_b,
                           int32_t len_b, int32_t n, double* out) {
    if (out == nullptr) return usage_error("wji: out is NULL");
    if ((len_a > 0 && items_a == nullptr) || (len_b > 0 && items_b == nullptr)) {
        return usage_error("wji: NULL list with positive length");
    }
    if (n < 1) return usage_error("wji: cutoff must be >= 1");
    return guarded([&] {
        stabrec::recommend::RecommendationList a, b;
        a.n = n;
        b.n = n;
        a.items.assign(items_a, items_a + len_a);
        b.items.assign(items_b, items_b + len_b);
        *out = stabrec::metrics::wji(stabrec::metrics::BagOfItems::from_list(a),
                                     stabrec::metrics::BagOfItems::from_list(b));
    });
}

stabrec_status stabrec_prepare(const stabrec_prepare_opts* opts) {
    if (opts == nullptr) return usage_error("prepare: opts is NULL");
    if (opts->input_path == nullptr || opts->out_dir == nullptr) {
        return usage_error("prepare: input_path and out_dir are required");
    }
    return guarded([&] {
        stabrec::harness::ExperimentConfig config;
        config.input_path = opts->input_path;
        if (opts->schema != nullptr) config.schema = opts->schema;
        config.min_rating = opts->min_rating;
        config.min_user_items = opts->min_user_items;
        config.holdback_seconds = opts->holdback_seconds;
        config.n_steps = opts->n_steps;
        config.split_dir = opts->out_dir;
        const stabrec::harness::PrepareSummary summary = stabrec::harness::prepare(config);
        std::fprintf(stderr,
                     "[stabrec] prepared split: %lld users, %lld items, %lld "
                     "interactions, density %.4f%%, %lld malformed rows skipped, "
                     "%lld unindexed records dropped\n",
                     static_cast<long long>(summary.n_users),
                     static_cast<long long>(summary.n_items),
                     static_cast<long long>(summary.n_interactions),
                     summary.density * 100.0,
                     static_cast<long long>(summary.n_malformed),
                     static_cast<long long>(summary.n_dropped_unindexed));
    });
}

stabrec_status stabrec_run(const stabrec_run_opts* opts) {
    if (opts == nullptr) return usage_error("run: opts is NULL");
    if (opts->split_dir == nullptr || opts->out_dir == nullptr) {
        return usage_error("run: split_dir and out_dir are required");
    }
    return guarded([&] {
        stabrec::harness::ExperimentConfig config;
        config.split_dir = opts->split_dir;
        config.out_dir = opts->out_dir;
        config.top_n = opts->top_n;
        config.seed = opts->seed;
        if (opts->models != nullptr) config.models = split_list(opts->models);
        if (opts->ranks != nullptr) {
            config.ranks.clear();
            for (const std::string& r : split_list(opts->ranks)) {
                config.ranks.push_back(static_cast<int32_t>(std::stol(r)));
            }
        }
        stabrec::harness::run_experiment(config);
    });
}

stabrec_status stabrec_report(const char* runs_dir, const char* format,
                              const char* out_path) {
    if (runs_dir == nullptr || format == nullptr) {
        return usage_error("report: runs_dir and format are required");
    }
    return guarded([&] {
        const std::string rendered = stabrec::harness::render_report(runs_dir, format);
        if (out_path == nullptr) {
            std::fputs(rendered.c_str(), stdout);
        } else {
            std::FILE* f = std::fopen(out_path, "wb");
            if (f == nullptr) {
                stabrec::throw_data("report: cannot open " + std::string(out_path));
            }
            std::fputs(rendered.c_str(), f);
            std::fclose(f);
        }
    });
}

}  // extern "C"
