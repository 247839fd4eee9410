// stabrec command-line front end. Talks to the shared library exclusively
// through the C API in stabrec.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "stabrec.h"

namespace {

// Durations accept a plain number of seconds or the suffixes s/h/d/w.
int64_t parse_duration(const std::string& text) {
    if (text.empty()) throw CLI::ValidationError("duration", "empty duration");
    char suffix = text.back();
    std::string number = text;
    int64_t scale = 1;
    if (suffix == 's' || suffix == 'h' || suffix == 'd' || suffix == 'w') {
        number = text.substr(0, text.size() - 1);
        switch (suffix) {
            case 's': scale = 1; break;
            case 'h': scale = 3600; break;
            case 'd': scale = 86400; break;
            case 'w': scale = 7 * 86400; break;
        }
    }
    char* end = nullptr;
    const long long value = std::strtoll(number.c_str(), &end, 10);
    if (end != number.c_str() + number.size() || value <= 0) {
        throw CLI::ValidationError("duration",
                                   "expected <positive integer>[s|h|d|w], got '" + text + "'");
    }
    return value * scale;
}

int fail(stabrec_status status) {
    std::fprintf(stderr, "error: %s\n", stabrec_last_error());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental low-rank recommendation models with stability evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", stabrec_version());

    // prepare
    std::string input, schema = "delim=,;header=0;cols=0,1,2,3", prep_out;
    double min_rating = 4.0;
    int64_t min_user_items = 1;
    std::string holdback;
    int32_t steps = 8;
    CLI::App* prepare = app.add_subcommand(
        "prepare", "Load, filter and split a ratings file into a step directory");
    prepare->add_option("--input", input, "Ratings file (delimited text)")->required();
    prepare->add_option("--schema", schema,
                        "Column layout, e.g. delim=::;header=0;cols=0,1,2,3");
    prepare->add_option("--min-rating", min_rating, "Keep interactions rated at least this");
    prepare->add_option("--min-user-items", min_user_items,
                        "Drop users with fewer interactions");
    prepare->add_option("--holdback", holdback,
                        "Evaluation span at the end of the data, e.g. 240d")
        ->required();
    prepare->add_option("--steps", steps, "Number of evaluation windows");
    prepare->add_option("--out", prep_out, "Split output directory")->required();

    // run
    std::string split_dir, models = "puresvd,psi", ranks = "10,25,50,100", run_out;
    int32_t top_n = 10;
    uint64_t seed = 0;
    CLI::App* run = app.add_subcommand("run", "Run the step loop and record metrics");
    run->add_option("--split", split_dir, "Split directory from `prepare`")->required();
    run->add_option("--models", models, "Comma list: puresvd,psi");
    run->add_option("--ranks", ranks, "Comma list of ranks, e.g. 10,25,50,100");
    run->add_option("--top-n", top_n, "Recommendation list cutoff");
    run->add_option("--seed", seed, "Seed for all randomized factorizations");
    run->add_option("--out", run_out, "Run output directory")->required();

    // report
    std::string runs_dir, format = "csv";
    CLI::App* report = app.add_subcommand("report", "Aggregate a finished run");
    report->add_option("--runs", runs_dir, "Run directory from `run`")->required();
    report->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; anything else is a usage error.
        return code == 0 ? 0 : static_cast<int>(STABREC_ERR_USAGE);
    }

    if (prepare->parsed()) {
        int64_t holdback_seconds = 0;
        try {
            holdback_seconds = parse_duration(holdback);
        } catch (const CLI::ValidationError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return static_cast<int>(STABREC_ERR_USAGE);
        }
        stabrec_prepare_opts opts{};
        opts.input_path = input.c_str();
        opts.schema = schema.c_str();
        opts.min_rating = min_rating;
        opts.min_user_items = min_user_items;
        opts.holdback_seconds = holdback_seconds;
        opts.n_steps = steps;
        opts.out_dir = prep_out.c_str();
        const stabrec_status status = stabrec_prepare(&opts);
        return status == STABREC_OK ? 0 : fail(status);
    }

    if (run->parsed()) {
        stabrec_run_opts opts{};
        opts.split_dir = split_dir.c_str();
        opts.models = models.c_str();
        opts.ranks = ranks.c_str();
        opts.top_n = top_n;
        opts.seed = seed;
        opts.out_dir = run_out.c_str();
        const stabrec_status status = stabrec_run(&opts);
        return status == STABREC_OK ? 0 : fail(status);
    }

    const stabrec_status status = stabrec_report(runs_dir.c_str(), format.c_str(), nullptr);
    return status == STABREC_OK ? 0 : fail(status);
}
