#include "stabrec/data/interaction_log.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "stabrec/error.hpp"

namespace stabrec::data {

namespace {

std::vector<std::string> split_on(const std::string& line, const std::string& delim) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(delim, pos);
        if (next == std::string::npos) {
            parts.push_back(line.substr(pos));
            break;
        }
        parts.push_back(line.substr(pos, next - pos));
        pos = next + delim.size();
    }
    return parts;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_timestamp(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() + s.size()) return out >= 0;
    // Some exports carry fractional-second timestamps; accept and truncate.
    double d = 0.0;
    if (!parse_double(s, d) || d < 0.0) return false;
    out = static_cast<std::int64_t>(d);
    return true;
}

}  // namespace

CsvSchema CsvSchema::parse(const std::string& spec) {
    CsvSchema schema;
    for (const std::string& part : split_on(spec, ";")) {
        if (part.empty()) continue;
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos) {
            throw_usage("schema: expected key=value, got '" + part + "'");
        }
        const std::string key = trimmed(part.substr(0, eq));
        const std::string value = part.substr(eq + 1);
        if (key == "delim") {
            if (value.empty()) throw_usage("schema: empty delimiter");
            schema.delimiter = value;
        } else if (key == "header") {
            schema.has_header = (value == "1" || value == "true" || value == "yes");
        } else if (key == "cols") {
            const std::vector<std::string> cols = split_on(value, ",");
            if (cols.size() != 4) {
                throw_usage("schema: cols needs 4 entries (user,item,rating,ts), got " +
                            std::to_string(cols.size()));
            }
            schema.user_col = std::atoi(cols[0].c_str());
            schema.item_col = std::atoi(cols[1].c_str());
            schema.rating_col = std::atoi(cols[2].c_str());
            schema.timestamp_col = std::atoi(cols[3].c_str());
        } else {
            throw_usage("schema: unknown key '" + key + "'");
        }
    }
    const int cols[4] = {schema.user_col, schema.item_col, schema.rating_col,
                         schema.timestamp_col};
    for (int c : cols) {
        if (c < 0) throw_usage("schema: negative column index");
    }
    return schema;
}

LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw_data("load_csv: cannot open " + path.string());

    const int max_col = std::max({schema.user_col, schema.item_col, schema.rating_col,
                                  schema.timestamp_col});
    LoadResult result;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && schema.has_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;

        const std::vector<std::string> fields = split_on(line, schema.delimiter);
        if (static_cast<int>(fields.size()) <= max_col) {
            ++result.n_malformed;
            continue;
        }
        Interaction rec;
        rec.user = trimmed(fields[schema.user_col]);
        rec.item = trimmed(fields[schema.item_col]);
        if (rec.user.empty() || rec.item.empty() ||
            !parse_double(trimmed(fields[schema.rating_col]), rec.rating) ||
            !parse_timestamp(trimmed(fields[schema.timestamp_col]), rec.timestamp)) {
            ++result.n_malformed;
            continue;
        }
        result.log.records.push_back(std::move(rec));
    }
    if (result.log.records.empty()) {
        throw_data("load_csv: no valid rows in " + path.string());
    }
    return result;
}

PreprocessResult preprocess(const InteractionLog& log, double min_rating,
                            std::int64_t min_user_items) {
    if (min_rating < 0.0 || min_user_items < 0) {
        throw_usage("preprocess: thresholds must be non-negative");
    }

    PreprocessResult result;

    // Rating threshold.
    std::vector<const Interaction*> kept;
    kept.reserve(log.records.size());
    for (const Interaction& rec : log.records) {
        if (rec.rating >= min_rating) {
            kept.push_back(&rec);
        } else {
            ++result.n_below_rating;
        }
    }

    // Users with too few remaining records.
    std::unordered_map<std::string, std::int64_t> per_user;
    for (const Interaction* rec : kept) per_user[rec->user]++;
    std::vector<const Interaction*> active;
    active.reserve(kept.size());
    for (const Interaction* rec : kept) {
        if (per_user[rec->user] >= min_user_items) {
            active.push_back(rec);
        } else {
            ++result.n_user_filtered;
        }
    }

    // Collapse duplicate (user, item) pairs onto the earliest timestamp;
    // ties keep the first occurrence in file order.
    std::unordered_map<std::string, std::size_t> best;  // key -> index into `active`
    best.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        const std::string key = active[i]->user + '\x1f' + active[i]->item;
        const auto [it, inserted] = best.try_emplace(key, i);
        if (!inserted) {
            ++result.n_duplicates;
            if (active[i]->timestamp < active[it->second]->timestamp) it->second = i;
        }
    }
    std::vector<bool> keep_flag(active.size(), false);
    for (const auto& [key, idx] : best) keep_flag[idx] = true;

    std::unordered_set<std::string> users, items;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (!keep_flag[i]) continue;
        result.log.records.push_back(*active[i]);
        users.insert(active[i]->user);
        items.insert(active[i]->item);
    }
    if (result.log.records.empty()) {
        throw_data("preprocess: no interactions left after filtering");
    }
    result.n_users = static_cast<std::int64_t>(users.size());
    result.n_items = static_cast<std::int64_t>(items.size());
    result.density = static_cast<double>(result.log.records.size()) /
                     (static_cast<double>(result.n_users) *
                      static_cast<double>(result.n_items));
    return result;
}

}  // namespace stabrec::data
