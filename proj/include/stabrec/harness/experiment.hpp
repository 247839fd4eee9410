#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stabrec/metrics/step_report.hpp"

namespace stabrec::harness {

// Everything one experiment needs, across both pipeline stages. `prepare`
// consumes the dataset fields and writes split_dir; `run` consumes split_dir
// and the model/rank grid and writes out_dir.
struct ExperimentConfig {
    std::string input_path;
    std::string schema = "delim=,;header=0;cols=0,1,2,3";
    double min_rating = 4.0;
    std::int64_t min_user_items = 1;
    std::int64_t holdback_seconds = 0;
    std::int32_t n_steps = 8;
    std::string split_dir;

    std::vector<std::string> models{"puresvd", "psi"};
    std::vector<std::int32_t> ranks{10, 25, 50, 100};
    std::int32_t top_n = 10;
    std::uint64_t seed = 0;
    std::string out_dir;

    void validate_prepare() const;
    void validate_run() const;
};

struct PrepareSummary {
    std::int64_t n_users = 0;
    std::int64_t n_items = 0;
    std::int64_t n_interactions = 0;
    double density = 0.0;
    std::int64_t n_malformed = 0;
    std::int64_t n_dropped_unindexed = 0;
};

// load -> preprocess -> stepwise split -> split directory. Refuses to write
// into a directory that already holds a split.
PrepareSummary prepare(const ExperimentConfig& config);

// Full step loop for every (model, rank): incremental PSI against
// cumulative-retrain PureSVD, per-step metrics, reports written
// incrementally to out_dir. Refuses to overwrite an existing run.
std::vector<metrics::StepReport> run_experiment(const ExperimentConfig& config);

struct SummaryRow {
    std::string model_name;
    std::int32_t rank = 0;
    std::int32_t n = 0;
    std::optional<double> hr;
    std::optional<double> mrr;
    std::optional<double> coverage;
    std::optional<double> stability;
    std::int64_t n_steps = 0;
};

// Per-(model, rank) means across steps; stability averages the steps where
// it exists (every step but the first).
std::vector<SummaryRow> aggregate(const std::vector<metrics::StepReport>& reports);

// One long-format CSV per metric, columns (rank, model, step, value), with
// absent values emitted as empty fields.
void emit_plot_data(const std::vector<metrics::StepReport>& reports,
                    const std::filesystem::path& dir);

std::vector<metrics::StepReport> read_reports_csv(const std::filesystem::path& path);

// Renders the aggregate of a finished run directory as "csv" or "json".
std::string render_report(const std::filesystem::path& runs_dir,
                          const std::string& format);

}  // namespace stabrec::harness
