#include "stabrec/harness/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "stabrec/data/interaction_log.hpp"
#include "stabrec/data/split.hpp"
#include "stabrec/data/split_io.hpp"
#include "stabrec/error.hpp"
#include "stabrec/linalg/rng.hpp"
#include "stabrec/metrics/metrics.hpp"
#include "stabrec/model/factor_model.hpp"
#include "stabrec/recommend/scorer.hpp"

namespace stabrec::harness {

namespace {

constexpr const char* kReportsCsv = "reports.csv";
constexpr const char* kReportsJsonl = "reports.jsonl";
constexpr const char* kSummaryCsv = "summary.csv";
constexpr const char* kRunManifest = "run_manifest.json";

bool is_known_model(const std::string& name) {
    return name == "puresvd" || name == "psi";
}

}  // namespace

void ExperimentConfig::validate_prepare() const {
    if (input_path.empty()) throw_usage("config: input path is required");
    if (split_dir.empty()) throw_usage("config: split output directory is required");
    if (n_steps < 1) throw_usage("config: n_steps must be >= 1");
    if (holdback_seconds <= 0) throw_usage("config: holdback must be positive");
    if (min_rating < 0.0 || min_user_items < 0) {
        throw_usage("config: thresholds must be non-negative");
    }
}

void ExperimentConfig::validate_run() const {
    if (split_dir.empty()) throw_usage("config: split directory is required");
    if (out_dir.empty()) throw_usage("config: run output directory is required");
    if (ranks.empty()) throw_usage("config: at least one rank is required");
    for (std::int32_t r : ranks) {
        if (r < 1) throw_usage("config: ranks must be >= 1");
    }
    if (top_n < 1) throw_usage("config: top-n cutoff must be >= 1");
    if (models.empty()) throw_usage("config: at least one model is required");
    for (const std::string& m : models) {
        if (!is_known_model(m)) {
            throw_usage("config: unknown model '" + m + "' (expected puresvd or psi)");
        }
    }
}

PrepareSummary prepare(const ExperimentConfig& config) {
    config.validate_prepare();
    const std::filesystem::path out(config.split_dir);
    if (std::filesystem::exists(out / "manifest.json")) {
        throw_usage("prepare: " + out.string() +
                    " already holds a split; choose a fresh directory");
    }

    const data::CsvSchema schema = data::CsvSchema::parse(config.schema);
    data::LoadResult loaded = data::load_csv(config.input_path, schema);
    data::PreprocessResult pre =
        data::preprocess(loaded.log, config.min_rating, config.min_user_items);
    data::StepSplit split =
        data::stepwise_split(pre.log, config.holdback_seconds, config.n_steps);

    nlohmann::ordered_json echo;
    echo["input_path"] = config.input_path;
    echo["schema"] = config.schema;
    echo["min_rating"] = config.min_rating;
    echo["min_user_items"] = config.min_user_items;
    echo["holdback_seconds"] = config.holdback_seconds;
    echo["n_steps"] = config.n_steps;
    echo["n_malformed_rows"] = loaded.n_malformed;
    echo["n_below_rating"] = pre.n_below_rating;
    echo["n_user_filtered"] = pre.n_user_filtered;
    echo["n_duplicates"] = pre.n_duplicates;
    data::write_split(out, split, echo.dump());

    PrepareSummary summary;
    summary.n_users = pre.n_users;
    summary.n_items = pre.n_items;
    summary.n_interactions = static_cast<std::int64_t>(pre.log.records.size());
    summary.density = pre.density;
    summary.n_malformed = loaded.n_malformed;
    summary.n_dropped_unindexed = split.n_dropped_total;
    return summary;
}

namespace {

struct StepState {
    metrics::ListSet lists;
};

// Scores every holdout user of the step against the current model state and
// the user's accumulated history row.
metrics::ListSet score_holdout_users(const model::FactorModel& state,
                                     const linalg::SparseMatrix& histories,
                                     const std::vector<std::pair<std::int32_t, std::int32_t>>& holdout,
                                     std::int32_t top_n, std::int64_t* skipped_cold) {
    metrics::ListSet lists;
    for (const auto& [user, item] : holdout) {
        const auto history = histories.row_cols(user);
        if (history.empty()) {
            if (skipped_cold != nullptr) ++(*skipped_cold);
            continue;
        }
        const std::vector<double> scores = recommend::score_user(state, history);
        lists.emplace(user, recommend::top_n(scores, history, top_n, user));
    }
    return lists;
}

void append_line(std::ofstream& out, const std::string& line) {
    out << line << '\n';
    out.flush();
}

}  // namespace

std::vector<metrics::StepReport> run_experiment(const ExperimentConfig& config) {
    config.validate_run();
    const std::filesystem::path out(config.out_dir);
    if (std::filesystem::exists(out / kReportsCsv)) {
        throw_usage("run: " + out.string() +
                    " already holds run output; choose a fresh directory");
    }
    std::filesystem::create_directories(out);

    const data::StepSplit split = data::read_split(config.split_dir);
    const std::int32_t n_steps = static_cast<std::int32_t>(split.steps.size());
    const std::int32_t catalog_size = split.initial.matrix.n_cols();
    const std::int32_t min_dim =
        std::min(split.initial.matrix.n_rows(), split.initial.matrix.n_cols());
    for (std::int32_t r : config.ranks) {
        if (r > min_dim) {
            throw_usage("run: rank " + std::to_string(r) + " exceeds min(M, N) = " +
                        std::to_string(min_dim));
        }
    }

    // Accumulated training matrices are shared by every (model, rank) pair:
    // accumulated[w] = initial ∪ deltas 0..w−1 merged with holdouts removed
    // by construction of the split.
    std::vector<linalg::SparseMatrix> accumulated;
    accumulated.reserve(static_cast<std::size_t>(n_steps) + 1);
    accumulated.push_back(split.initial.matrix);
    for (std::int32_t w = 0; w < n_steps; ++w) {
        accumulated.push_back(linalg::binary_union(accumulated.back(), split.steps[w].delta));
    }

    std::ofstream csv(out / kReportsCsv, std::ios::trunc);
    std::ofstream jsonl(out / kReportsJsonl, std::ios::trunc);
    if (!csv || !jsonl) throw_data("run: cannot write report files in " + out.string());
    append_line(csv, metrics::StepReport::csv_header());

    std::vector<metrics::StepReport> reports;
    for (const std::string& model_name : config.models) {
        const bool incremental = (model_name == "psi");
        for (std::int32_t rank : config.ranks) {
            // Both models share the same step-0 state: PureSVD on the
            // initial slice with the same derived seed.
            model::FactorModel state = model::train_puresvd(
                split.initial.matrix, rank, linalg::mix_seed(config.seed, rank, 0));

            metrics::ListSet prev_lists;
            for (std::int32_t w = 0; w < n_steps; ++w) {
                try {
                const data::SplitStep& step = split.steps[w];
                if (incremental) {
                    // Pairs already inside the accumulated history carry no
                    // new information for a binary model; drop them from ΔA.
                    std::int64_t repeated = 0;
                    const linalg::SparseMatrix delta =
                        linalg::subtract_pattern(step.delta, accumulated[w], &repeated);
                    if (repeated > 0) {
                        std::cerr << "[stabrec] step " << w << ": dropped " << repeated
                                  << " repeat pairs from delta\n";
                    }
                    state = model::psi_step(state, delta);
                } else {
                    state = model::train_puresvd(
                        accumulated[w + 1], rank,
                        linalg::mix_seed(config.seed, rank, static_cast<std::uint64_t>(w) + 1));
                }

                std::int64_t skipped_cold = 0;
                const metrics::ListSet lists = score_holdout_users(
                    state, accumulated[w + 1], step.holdout, config.top_n, &skipped_cold);

                metrics::StepReport report;
                report.step_index = w;
                report.model_name = model_name;
                report.rank = rank;
                report.n = config.top_n;
                report.n_eval_users = static_cast<std::int64_t>(lists.size());

                if (!lists.empty()) {
                    metrics::Holdout holdout;
                    for (const auto& [user, item] : step.holdout) {
                        if (lists.count(user) != 0) holdout.emplace(user, item);
                    }
                    report.hr = metrics::hit_rate(lists, holdout);
                    report.mrr = metrics::mrr(lists, holdout);
                    report.coverage = metrics::coverage(lists, catalog_size);
                    if (w > 0) {
                        const bool overlap =
                            std::any_of(lists.begin(), lists.end(), [&](const auto& kv) {
                                return prev_lists.count(kv.first) != 0;
                            });
                        if (overlap) {
                            report.stability =
                                metrics::stability(prev_lists, lists, config.top_n);
                        } else {
                            std::cerr << "[stabrec] step " << w << " (" << model_name
                                      << ", r=" << rank
                                      << "): no users shared with previous step, "
                                         "stability not reported\n";
                        }
                    }
                } else {
                    std::cerr << "[stabrec] step " << w << " (" << model_name
                              << ", r=" << rank << "): no evaluable holdout users\n";
                }

                append_line(csv, report.to_csv_row());
                append_line(jsonl, report.to_json());
                reports.push_back(report);
                prev_lists = lists;
                } catch (const Error& e) {
                    // Partial reports stay on disk; name the failing step.
                    throw Error(e.code(), "step " + std::to_string(w) + " (" +
                                              model_name + ", rank " +
                                              std::to_string(rank) + "): " + e.what());
                }
            }
        }
    }

    emit_plot_data(reports, out);

    const std::vector<SummaryRow> summary = aggregate(reports);
    std::ofstream sf(out / kSummaryCsv, std::ios::trunc);
    sf << "model_name,rank,n,hr,mrr,coverage,stability,n_steps\n";
    for (const SummaryRow& row : summary) {
        sf << row.model_name << ',' << row.rank << ',' << row.n << ','
           << (row.hr ? metrics::format_double(*row.hr) : "") << ','
           << (row.mrr ? metrics::format_double(*row.mrr) : "") << ','
           << (row.coverage ? metrics::format_double(*row.coverage) : "") << ','
           << (row.stability ? metrics::format_double(*row.stability) : "") << ','
           << row.n_steps << '\n';
    }

    nlohmann::ordered_json manifest;
    manifest["split_dir"] = config.split_dir;
    manifest["models"] = config.models;
    manifest["ranks"] = config.ranks;
    manifest["top_n"] = config.top_n;
    manifest["seed"] = config.seed;
    manifest["n_steps"] = n_steps;
    std::ofstream mf(out / kRunManifest, std::ios::trunc);
    mf << manifest.dump(2) << '\n';

    return reports;
}

std::vector<SummaryRow> aggregate(const std::vector<metrics::StepReport>& reports) {
    if (reports.empty()) throw_usage("aggregate: no reports");

    struct Accumulator {
        std::int32_t n = 0;
        double hr = 0, mrr = 0, coverage = 0, stability = 0;
        std::int64_t n_hr = 0, n_mrr = 0, n_coverage = 0, n_stability = 0;
        std::int64_t n_steps = 0;
    };
    std::map<std::pair<std::string, std::int32_t>, Accumulator> groups;
    for (const metrics::StepReport& r : reports) {
        Accumulator& acc = groups[{r.model_name, r.rank}];
        acc.n = r.n;
        acc.n_steps++;
        if (r.hr) {
            acc.hr += *r.hr;
            acc.n_hr++;
        }
        if (r.mrr) {
            acc.mrr += *r.mrr;
            acc.n_mrr++;
        }
        if (r.coverage) {
            acc.coverage += *r.coverage;
            acc.n_coverage++;
        }
        if (r.stability) {
            acc.stability += *r.stability;
            acc.n_stability++;
        }
    }

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        SummaryRow row;
        row.model_name = key.first;
        row.rank = key.second;
        row.n = acc.n;
        row.n_steps = acc.n_steps;
        if (acc.n_hr > 0) row.hr = acc.hr / static_cast<double>(acc.n_hr);
        if (acc.n_mrr > 0) row.mrr = acc.mrr / static_cast<double>(acc.n_mrr);
        if (acc.n_coverage > 0) {
            row.coverage = acc.coverage / static_cast<double>(acc.n_coverage);
        }
        if (acc.n_stability > 0) {
            row.stability = acc.stability / static_cast<double>(acc.n_stability);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_plot_data(const std::vector<metrics::StepReport>& reports,
                    const std::filesystem::path& dir) {
    if (reports.empty()) throw_usage("emit_plot_data: no reports");
    std::filesystem::create_directories(dir);

    const struct {
        const char* name;
        std::optional<double> metrics::StepReport::* field;
    } kMetrics[] = {
        {"hr", &metrics::StepReport::hr},
        {"mrr", &metrics::StepReport::mrr},
        {"coverage", &metrics::StepReport::coverage},
        {"stability", &metrics::StepReport::stability},
    };

    for (const auto& metric : kMetrics) {
        std::ofstream out(dir / ("plot_" + std::string(metric.name) + ".csv"),
                          std::ios::trunc);
        if (!out) throw_data("emit_plot_data: cannot write plot file for " +
                             std::string(metric.name));
        out << "rank,model,step,value\n";
        for (const metrics::StepReport& r : reports) {
            const std::optional<double>& v = r.*(metric.field);
            out << r.rank << ',' << r.model_name << ',' << r.step_index << ','
                << (v ? metrics::format_double(*v) : "") << '\n';
        }
    }
}

std::vector<metrics::StepReport> read_reports_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw_data("read_reports: cannot open " + path.string());
    std::vector<metrics::StepReport> reports;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == metrics::StepReport::csv_header()) continue;
        }
        reports.push_back(metrics::StepReport::from_csv_row(line));
    }
    if (reports.empty()) throw_data("read_reports: no rows in " + path.string());
    return reports;
}

std::string render_report(const std::filesystem::path& runs_dir,
                          const std::string& format) {
    if (format != "csv" && format != "json") {
        throw_usage("report: format must be csv or json, got '" + format + "'");
    }
    const std::vector<metrics::StepReport> reports =
        read_reports_csv(runs_dir / kReportsCsv);
    const std::vector<SummaryRow> summary = aggregate(reports);

    std::ostringstream out;
    if (format == "csv") {
        out << "model_name,rank,n,hr,mrr,coverage,stability,n_steps\n";
        for (const SummaryRow& row : summary) {
            out << row.model_name << ',' << row.rank << ',' << row.n << ','
                << (row.hr ? metrics::format_double(*row.hr) : "") << ','
                << (row.mrr ? metrics::format_double(*row.mrr) : "") << ','
                << (row.coverage ? metrics::format_double(*row.coverage) : "") << ','
                << (row.stability ? metrics::format_double(*row.stability) : "") << ','
                << row.n_steps << '\n';
        }
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const SummaryRow& row : summary) {
            nlohmann::ordered_json obj;
            obj["model_name"] = row.model_name;
            obj["rank"] = row.rank;
            obj["n"] = row.n;
            if (row.hr) obj["hr"] = *row.hr; else obj["hr"] = nullptr;
            if (row.mrr) obj["mrr"] = *row.mrr; else obj["mrr"] = nullptr;
            if (row.coverage) obj["coverage"] = *row.coverage; else obj["coverage"] = nullptr;
            if (row.stability) obj["stability"] = *row.stability; else obj["stability"] = nullptr;
            obj["n_steps"] = row.n_steps;
            arr.push_back(obj);
        }
        out << arr.dump(2) << '\n';
    }
    return out.str();
}

}  // namespace stabrec::harness
