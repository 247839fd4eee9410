#pragma once

#include <filesystem>
#include <string>

#include "stabrec/data/split.hpp"

namespace stabrec::data {

// Binary CSR file: 16-byte header (magic, version, n_rows, n_cols as u32,
// little-endian) followed by row_offsets (u64), column indices (u32) and
// values (f64).
void write_csr(const std::filesystem::path& path, const linalg::SparseMatrix& m);
linalg::SparseMatrix read_csr(const std::filesystem::path& path);

// A split directory holds initial.csr, step_{k}_delta.csr,
// step_{k}_holdout.tsv, indexes.tsv and manifest.json. config_echo is stored
// verbatim in the manifest (JSON object text, may be "{}").
void write_split(const std::filesystem::path& dir, const StepSplit& split,
                 const std::string& config_echo);
StepSplit read_split(const std::filesystem::path& dir);

}  // namespace stabrec::data
