#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stabrec::data {

struct Interaction {
    std::string user;
    std::string item;
    double rating = 0.0;
    std::int64_t timestamp = 0;  // epoch seconds
};

struct InteractionLog {
    std::vector<Interaction> records;
};

// Column layout of a delimited ratings file. Parsed from a compact spec
// string, e.g. "delim=::;header=0;cols=0,1,2,3" for MovieLens ratings.dat
// (multi-character delimiters are matched literally).
struct CsvSchema {
    std::string delimiter = ",";
    bool has_header = false;
    int user_col = 0;
    int item_col = 1;
    int rating_col = 2;
    int timestamp_col = 3;

    static CsvSchema parse(const std::string& spec);
};

struct LoadResult {
    InteractionLog log;
    std::int64_t n_malformed = 0;  // skipped rows
};

// Reads a delimited interaction file. Malformed rows (missing columns,
// non-numeric rating/timestamp, empty ids) are counted and skipped; an
// unreadable file or a file with zero valid rows is an error.
LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema);

struct PreprocessResult {
    InteractionLog log;
    std::int64_t n_below_rating = 0;
    std::int64_t n_user_filtered = 0;
    std::int64_t n_duplicates = 0;
    std::int64_t n_users = 0;
    std::int64_t n_items = 0;
    double density = 0.0;
};

// Rating threshold, then minimum-activity user filter, then duplicate
// (user, item) collapse onto the earliest timestamp. Items are never
// filtered. Empty output is an error.
PreprocessResult preprocess(const InteractionLog& log, double min_rating,
                            std::int64_t min_user_items);

}  // namespace stabrec::data
