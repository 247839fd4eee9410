#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stabrec/data/interaction_log.hpp"
#include "stabrec/linalg/sparse.hpp"

namespace stabrec::data {

// Bijective raw-id <-> dense-index map, frozen once built.
class IndexMap {
public:
    std::int32_t add(const std::string& raw);          // existing id returns its index
    std::int32_t lookup(const std::string& raw) const; // -1 when absent
    const std::string& raw_of(std::int32_t index) const { return ids_[index]; }
    std::int32_t size() const { return static_cast<std::int32_t>(ids_.size()); }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::int32_t> index_;
};

// Binary CSR matrix together with the id maps that define its axes.
struct InteractionMatrix {
    linalg::SparseMatrix matrix;
    IndexMap users;
    IndexMap items;
};

struct StepWindow {
    std::int64_t start = 0;  // inclusive
    std::int64_t end = 0;    // exclusive
};

struct SplitStep {
    linalg::SparseMatrix delta;
    std::vector<std::pair<std::int32_t, std::int32_t>> holdout;  // (user, item), sorted
    StepWindow window;
    std::int64_t n_dropped_unindexed = 0;
    std::int64_t n_window_records = 0;
};

struct StepSplit {
    InteractionMatrix initial;
    std::vector<SplitStep> steps;
    std::int64_t n_dropped_total = 0;
};

// Binary matrix over the given (frozen) indexes; out-of-index records are
// dropped and counted, duplicate cells collapse to a single 1.
InteractionMatrix to_matrix(const InteractionLog& log, const IndexMap& users,
                            const IndexMap& items, std::int64_t* n_dropped = nullptr);

// Time-based split: everything before (max_timestamp − holdback) trains the
// initial model; the rest is cut into n_steps equal windows. Within each
// window the most recent interaction of every user with >= 2 interactions
// becomes that user's holdout, the remainder the step's delta. Users/items
// unseen in the initial slice are dropped with a count.
StepSplit stepwise_split(const InteractionLog& log, std::int64_t holdback_seconds,
                         std::int32_t n_steps);

}  // namespace stabrec::data
