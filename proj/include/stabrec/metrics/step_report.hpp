#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stabrec::metrics {

// One evaluation record per (time step, model, rank). Metric fields are
// absent when a step had nothing to evaluate; stability is additionally
// absent at step 0, which has no predecessor lists.
struct StepReport {
    std::int64_t step_index = 0;
    std::string model_name;
    std::int32_t rank = 0;
    std::int32_t n = 0;
    std::optional<double> hr;
    std::optional<double> mrr;
    std::optional<double> coverage;
    std::optional<double> stability;
    std::int64_t n_eval_users = 0;

    static std::string csv_header();
    std::string to_csv_row() const;
    std::string to_json() const;  // single object, fixed field order
    static StepReport from_csv_row(const std::string& row);
};

// Shortest round-trip decimal form, identical across runs.
std::string format_double(double value);

}  // namespace stabrec::metrics
