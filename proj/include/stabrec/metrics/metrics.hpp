#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "stabrec/recommend/scorer.hpp"

namespace stabrec::metrics {

// Bag-of-items encoding of a ranked list: weight 1/rank for the items inside
// the top-n cutoff, nothing stored otherwise. Entries sorted by item id.
struct BagOfItems {
    std::vector<std::pair<std::int32_t, double>> weights;

    static BagOfItems from_list(const recommend::RecommendationList& list);
    bool empty() const noexcept { return weights.empty(); }
};

// Weighted Jaccard index: Σ min / Σ max over the item union. Two empty bags
// compare as 1.0 (identical outputs); callers track that degenerate case.
double wji(const BagOfItems& u, const BagOfItems& v);

using ListSet = std::map<std::int32_t, recommend::RecommendationList>;
using Holdout = std::map<std::int32_t, std::int32_t>;

struct StabilityStats {
    std::int64_t n_users = 0;       // size of the user intersection
    std::int64_t n_degenerate = 0;  // empty-vs-empty comparisons
};

// Mean WJI over users present in both consecutive list sets.
double stability(const ListSet& prev, const ListSet& curr, std::int32_t n,
                 StabilityStats* stats = nullptr);

// Fraction of holdout users whose holdout item appears in their list.
double hit_rate(const ListSet& lists, const Holdout& holdout);

// Mean reciprocal 1-based rank of the holdout item, zero on miss.
double mrr(const ListSet& lists, const Holdout& holdout);

// Unique recommended items over the full training catalog.
double coverage(const ListSet& lists, std::int64_t catalog_size);

}  // namespace stabrec::metrics
