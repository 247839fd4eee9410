#include "stabrec/data/split_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stabrec/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "CSR files are little-endian; big-endian hosts are not supported");

namespace stabrec::data {

namespace {

constexpr std::uint32_t kCsrMagic = 0x42525343;  // "CSRB"
constexpr std::uint32_t kCsrVersion = 1;

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes, const std::string& path) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in) throw_data("read_csr: truncated file " + path);
}

}  // namespace

void write_csr(const std::filesystem::path& path, const linalg::SparseMatrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("write_csr: cannot open " + path.string());

    const std::uint32_t n_rows = static_cast<std::uint32_t>(m.n_rows());
    const std::uint32_t n_cols = static_cast<std::uint32_t>(m.n_cols());
    write_raw(out, &kCsrMagic, sizeof(kCsrMagic));
    write_raw(out, &kCsrVersion, sizeof(kCsrVersion));
    write_raw(out, &n_rows, sizeof(n_rows));
    write_raw(out, &n_cols, sizeof(n_cols));

    std::vector<std::uint64_t> offsets(m.row_offsets().begin(), m.row_offsets().end());
    write_raw(out, offsets.data(), offsets.size() * sizeof(std::uint64_t));
    std::vector<std::uint32_t> cols(m.col_indices().begin(), m.col_indices().end());
    write_raw(out, cols.data(), cols.size() * sizeof(std::uint32_t));
    write_raw(out, m.values().data(), m.values().size() * sizeof(double));
    if (!out) throw_data("write_csr: write failed for " + path.string());
}

linalg::SparseMatrix read_csr(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("read_csr: cannot open " + path.string());

    std::uint32_t magic = 0, version = 0, n_rows = 0, n_cols = 0;
    read_raw(in, &magic, sizeof(magic), path.string());
    read_raw(in, &version, sizeof(version), path.string());
    if (magic != kCsrMagic) throw_data("read_csr: bad magic in " + path.string());
    if (version != kCsrVersion) {
        throw_data("read_csr: unsupported version " + std::to_string(version));
    }
    read_raw(in, &n_rows, sizeof(n_rows), path.string());
    read_raw(in, &n_cols, sizeof(n_cols), path.string());

    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n_rows) + 1);
    read_raw(in, offsets.data(), offsets.size() * sizeof(std::uint64_t), path.string());
    const std::uint64_t nnz = offsets.back();
    std::vector<std::uint32_t> cols(nnz);
    std::vector<double> values(nnz);
    read_raw(in, cols.data(), cols.size() * sizeof(std::uint32_t), path.string());
    read_raw(in, values.data(), values.size() * sizeof(double), path.string());

    return linalg::SparseMatrix(
        static_cast<std::int32_t>(n_rows), static_cast<std::int32_t>(n_cols),
        std::vector<std::int64_t>(offsets.begin(), offsets.end()),
        std::vector<std::int32_t>(cols.begin(), cols.end()), std::move(values));
}

void write_split(const std::filesystem::path& dir, const StepSplit& split,
                 const std::string& config_echo) {
    std::filesystem::create_directories(dir);
    write_csr(dir / "initial.csr", split.initial.matrix);

    nlohmann::ordered_json manifest;
    manifest["version"] = 1;
    manifest["n_steps"] = split.steps.size();
    manifest["initial"] = {{"n_rows", split.initial.matrix.n_rows()},
                           {"n_cols", split.initial.matrix.n_cols()},
                           {"nnz", split.initial.matrix.nnz()}};

    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    nlohmann::ordered_json drops = nlohmann::ordered_json::array();
    nlohmann::ordered_json record_counts = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < split.steps.size(); ++k) {
        const SplitStep& step = split.steps[k];
        write_csr(dir / ("step_" + std::to_string(k) + "_delta.csr"), step.delta);

        std::ofstream holdout(dir / ("step_" + std::to_string(k) + "_holdout.tsv"),
                              std::ios::trunc);
        if (!holdout) throw_data("write_split: cannot write holdout for step " +
                                 std::to_string(k));
        for (const auto& [user, item] : step.holdout) {
            holdout << user << '\t' << item << '\n';
        }
        windows.push_back({{"start", step.window.start}, {"end", step.window.end}});
        drops.push_back(step.n_dropped_unindexed);
        record_counts.push_back(step.n_window_records);
    }
    manifest["windows"] = windows;
    manifest["dropped_unindexed_per_step"] = drops;
    manifest["dropped_unindexed_total"] = split.n_dropped_total;
    manifest["window_records"] = record_counts;
    manifest["config"] = nlohmann::ordered_json::parse(config_echo);

    std::ofstream indexes(dir / "indexes.tsv", std::ios::trunc);
    if (!indexes) throw_data("write_split: cannot write indexes.tsv");
    for (std::int32_t i = 0; i < split.initial.users.size(); ++i) {
        indexes << "user\t" << i << '\t' << split.initial.users.raw_of(i) << '\n';
    }
    for (std::int32_t i = 0; i < split.initial.items.size(); ++i) {
        indexes << "item\t" << i << '\t' << split.initial.items.raw_of(i) << '\n';
    }

    std::ofstream mf(dir / "manifest.json", std::ios::trunc);
    if (!mf) throw_data("write_split: cannot write manifest.json");
    mf << manifest.dump(2) << '\n';
}

StepSplit read_split(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw_data("read_split: missing manifest.json in " + dir.string());
    nlohmann::json manifest;
    try {
        mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw_data("read_split: bad manifest.json: " + std::string(e.what()));
    }

    StepSplit split;
    split.initial.matrix = read_csr(dir / "initial.csr");

    std::ifstream indexes(dir / "indexes.tsv");
    if (!indexes) throw_data("read_split: missing indexes.tsv in " + dir.string());
    std::string line;
    while (std::getline(indexes, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string kind, idx, raw;
        if (!std::getline(row, kind, '\t') || !std::getline(row, idx, '\t') ||
            !std::getline(row, raw)) {
            throw_data("read_split: malformed indexes.tsv line: " + line);
        }
        if (kind == "user") {
            split.initial.users.add(raw);
        } else if (kind == "item") {
            split.initial.items.add(raw);
        } else {
            throw_data("read_split: unknown index kind '" + kind + "'");
        }
    }
    if (split.initial.users.size() != split.initial.matrix.n_rows() ||
        split.initial.items.size() != split.initial.matrix.n_cols()) {
        throw_data("read_split: indexes.tsv does not match initial.csr shape");
    }

    const std::size_t n_steps = manifest.at("n_steps").get<std::size_t>();
    split.steps.resize(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        SplitStep& step = split.steps[k];
        step.delta = read_csr(dir / ("step_" + std::to_string(k) + "_delta.csr"));
        step.window.start = manifest.at("windows").at(k).at("start").get<std::int64_t>();
        step.window.end = manifest.at("windows").at(k).at("end").get<std::int64_t>();
        step.n_dropped_unindexed =
            manifest.at("dropped_unindexed_per_step").at(k).get<std::int64_t>();
        step.n_window_records = manifest.at("window_records").at(k).get<std::int64_t>();

        std::ifstream holdout(dir / ("step_" + std::to_string(k) + "_holdout.tsv"));
        if (!holdout) {
            throw_data("read_split: missing holdout file for step " + std::to_string(k));
        }
        while (std::getline(holdout, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string user, item;
            if (!std::getline(row, user, '\t') || !std::getline(row, item)) {
                throw_data("read_split: malformed holdout line: " + line);
            }
            step.holdout.emplace_back(std::stoi(user), std::stoi(item));
        }
        split.n_dropped_total += step.n_dropped_unindexed;
    }
    return split;
}

}  // namespace stabrec::data
