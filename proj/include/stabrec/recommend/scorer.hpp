#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stabrec/model/factor_model.hpp"

namespace stabrec::recommend {

// Ordered top-n items for one user. Items never overlap the user's known
// training history.
struct RecommendationList {
    std::int32_t user = -1;
    std::vector<std::int32_t> items;
    std::int32_t n = 0;
};

// Projection scoring: scores = h·V·Vᵀ where h is the user's binary history
// row given as sorted item indices. Empty history yields all-zero scores.
std::vector<double> score_user(const model::FactorModel& m,
                               std::span<const std::int32_t> history);

// The n highest-scoring items with history masked out. Ties break toward
// the smaller item id.
RecommendationList top_n(std::span<const double> scores,
                         std::span<const std::int32_t> history, std::int32_t n,
                         std::int32_t user = -1);

}  // namespace stabrec::recommend
