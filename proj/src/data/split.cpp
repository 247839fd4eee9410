#include "stabrec/data/split.hpp"

#include <algorithm>
#include <string>

#include "stabrec/error.hpp"

namespace stabrec::data {

std::int32_t IndexMap::add(const std::string& raw) {
    const auto [it, inserted] =
        index_.try_emplace(raw, static_cast<std::int32_t>(ids_.size()));
    if (inserted) ids_.push_back(raw);
    return it->second;
}

std::int32_t IndexMap::lookup(const std::string& raw) const {
    const auto it = index_.find(raw);
    return it == index_.end() ? -1 : it->second;
}

InteractionMatrix to_matrix(const InteractionLog& log, const IndexMap& users,
                            const IndexMap& items, std::int64_t* n_dropped) {
    std::vector<linalg::Triplet> cells;
    cells.reserve(log.records.size());
    std::int64_t dropped = 0;
    for (const Interaction& rec : log.records) {
        const std::int32_t u = users.lookup(rec.user);
        const std::int32_t i = items.lookup(rec.item);
        if (u < 0 || i < 0) {
            ++dropped;
            continue;
        }
        cells.push_back({u, i, 1.0});
    }
    // Collapse duplicate cells so stored values stay exactly 1.0.
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    cells.erase(std::unique(cells.begin(), cells.end(),
                            [](const auto& a, const auto& b) {
                                return a.row == b.row && a.col == b.col;
                            }),
                cells.end());

    InteractionMatrix out;
    out.users = users;
    out.items = items;
    out.matrix = linalg::SparseMatrix::from_triplets(users.size(), items.size(),
                                                     std::move(cells));
    if (n_dropped != nullptr) *n_dropped = dropped;
    return out;
}

StepSplit stepwise_split(const InteractionLog& log, std::int64_t holdback_seconds,
                         std::int32_t n_steps) {
    if (n_steps < 1) throw_usage("stepwise_split: n_steps must be >= 1");
    if (holdback_seconds <= 0) throw_usage("stepwise_split: holdback must be positive");
    if (log.records.empty()) throw_data("stepwise_split: empty log");

    std::int64_t t_min = log.records.front().timestamp;
    std::int64_t t_max = t_min;
    for (const Interaction& rec : log.records) {
        t_min = std::min(t_min, rec.timestamp);
        t_max = std::max(t_max, rec.timestamp);
    }
    const std::int64_t cutoff = t_max - holdback_seconds;
    if (t_min >= cutoff) {
        throw_data("stepwise_split: log spans " + std::to_string(t_max - t_min) +
                   "s, shorter than the holdback of " + std::to_string(holdback_seconds) +
                   "s");
    }

    // Initial slice defines the frozen user/item indexes, in file order.
    InteractionLog initial_log;
    std::vector<const Interaction*> remainder;
    for (const Interaction& rec : log.records) {
        if (rec.timestamp < cutoff) {
            initial_log.records.push_back(rec);
        } else {
            remainder.push_back(&rec);
        }
    }

    StepSplit split;
    for (const Interaction& rec : initial_log.records) {
        split.initial.users.add(rec.user);
        split.initial.items.add(rec.item);
    }
    split.initial = to_matrix(initial_log, split.initial.users, split.initial.items);

    // Equal-length half-open windows over [cutoff, t_max]; the closing
    // instant (always populated by the max-timestamp record) joins the last
    // window.
    std::vector<std::int64_t> bounds(static_cast<std::size_t>(n_steps) + 1);
    for (std::int32_t k = 0; k <= n_steps; ++k) {
        bounds[k] = cutoff + (static_cast<std::int64_t>(k) * holdback_seconds) /
                                 n_steps;
    }

    // Bucket the remainder per window, preserving input order.
    std::vector<std::vector<const Interaction*>> window_records(n_steps);
    for (const Interaction* rec : remainder) {
        const auto it = std::upper_bound(bounds.begin(), bounds.end(), rec->timestamp);
        std::int32_t w = static_cast<std::int32_t>(it - bounds.begin()) - 1;
        w = std::min(w, n_steps - 1);
        window_records[w].push_back(rec);
    }

    const IndexMap& users = split.initial.users;
    const IndexMap& items = split.initial.items;
    split.steps.resize(n_steps);
    for (std::int32_t w = 0; w < n_steps; ++w) {
        SplitStep& step = split.steps[w];
        step.window.start = bounds[w];
        step.window.end = (w == n_steps - 1) ? t_max + 1 : bounds[w + 1];
        const auto& recs = window_records[w];
        step.n_window_records = static_cast<std::int64_t>(recs.size());

        // Latest interaction per user; on equal timestamps the later row wins.
        struct Latest {
            std::int64_t count = 0;
            std::int64_t ts = -1;
            std::size_t pos = 0;
        };
        std::unordered_map<std::string, Latest> per_user;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            Latest& entry = per_user[recs[i]->user];
            entry.count++;
            if (recs[i]->timestamp >= entry.ts) {
                entry.ts = recs[i]->timestamp;
                entry.pos = i;
            }
        }

        std::vector<linalg::Triplet> delta_cells;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const Latest& entry = per_user[recs[i]->user];
            const bool is_holdout = entry.count >= 2 && entry.pos == i;
            const std::int32_t u = users.lookup(recs[i]->user);
            const std::int32_t c = items.lookup(recs[i]->item);
            if (u < 0 || c < 0) {
                step.n_dropped_unindexed++;
                continue;
            }
            if (is_holdout) {
                step.holdout.emplace_back(u, c);
            } else {
                delta_cells.push_back({u, c, 1.0});
            }
        }
        std::sort(delta_cells.begin(), delta_cells.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        delta_cells.erase(std::unique(delta_cells.begin(), delta_cells.end(),
                                      [](const auto& a, const auto& b) {
                                          return a.row == b.row && a.col == b.col;
                                      }),
                          delta_cells.end());
        step.delta = linalg::SparseMatrix::from_triplets(users.size(), items.size(),
                                                         std::move(delta_cells));
        std::sort(step.holdout.begin(), step.holdout.end());
        split.n_dropped_total += step.n_dropped_unindexed;
    }
    return split;
}

}  // namespace stabrec::data
