#include "stabrec/metrics/step_report.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "stabrec/error.hpp"

namespace stabrec::metrics {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string{};
}

std::string opt_json(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string{"null"};
}

std::vector<std::string> split_csv(const std::string& row) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : row) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string StepReport::csv_header() {
    return "step_index,model_name,rank,n,hr,mrr,coverage,stability,n_eval_users";
}

std::string StepReport::to_csv_row() const {
    std::ostringstream out;
    out << step_index << ',' << model_name << ',' << rank << ',' << n << ','
        << opt_field(hr) << ',' << opt_field(mrr) << ',' << opt_field(coverage) << ','
        << opt_field(stability) << ',' << n_eval_users;
    return out.str();
}

std::string StepReport::to_json() const {
    std::ostringstream out;
    out << "{\"step_index\":" << step_index << ",\"model_name\":\"" << model_name
        << "\",\"rank\":" << rank << ",\"n\":" << n << ",\"hr\":" << opt_json(hr)
        << ",\"mrr\":" << opt_json(mrr) << ",\"coverage\":" << opt_json(coverage)
        << ",\"stability\":" << opt_json(stability)
        << ",\"n_eval_users\":" << n_eval_users << "}";
    return out.str();
}

StepReport StepReport::from_csv_row(const std::string& row) {
    const std::vector<std::string> f = split_csv(row);
    if (f.size() != 9) {
        throw_data("StepReport: expected 9 CSV fields, got " + std::to_string(f.size()) +
                   " in: " + row);
    }
    StepReport r;
    r.step_index = std::strtoll(f[0].c_str(), nullptr, 10);
    r.model_name = f[1];
    r.rank = static_cast<std::int32_t>(std::strtol(f[2].c_str(), nullptr, 10));
    r.n = static_cast<std::int32_t>(std::strtol(f[3].c_str(), nullptr, 10));
    r.hr = parse_opt(f[4]);
    r.mrr = parse_opt(f[5]);
    r.coverage = parse_opt(f[6]);
    r.stability = parse_opt(f[7]);
    r.n_eval_users = std::strtoll(f[8].c_str(), nullptr, 10);
    return r;
}

}  // namespace stabrec::metrics
