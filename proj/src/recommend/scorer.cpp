#include "stabrec/recommend/scorer.hpp"

#include <algorithm>
#include <string>

#include "stabrec/error.hpp"

namespace stabrec::recommend {

std::vector<double> score_user(const model::FactorModel& m,
                               std::span<const std::int32_t> history) {
    const std::int32_t n_items = m.n_items();
    const std::int32_t r = m.rank;
    const linalg::DenseMatrix& v = m.item_factors;

    // w = Vᵀ·h, summing only the history rows of V.
    std::vector<double> w(static_cast<std::size_t>(r), 0.0);
    for (std::int32_t item : history) {
        if (item < 0 || item >= n_items) {
            throw_usage("score_user: history item " + std::to_string(item) +
                        " outside catalog of " + std::to_string(n_items));
        }
        const double* vrow = v.row(item);
        for (std::int32_t k = 0; k < r; ++k) w[k] += vrow[k];
    }

    // scores = V·w
    std::vector<double> scores(static_cast<std::size_t>(n_items), 0.0);
    for (std::int32_t i = 0; i < n_items; ++i) {
        const double* vrow = v.row(i);
        double s = 0.0;
        for (std::int32_t k = 0; k < r; ++k) s += vrow[k] * w[k];
        scores[i] = s;
    }
    return scores;
}

RecommendationList top_n(std::span<const double> scores,
                         std::span<const std::int32_t> history, std::int32_t n,
                         std::int32_t user) {
    if (n < 1) throw_usage("top_n: cutoff must be >= 1");

    std::vector<bool> seen(scores.size(), false);
    for (std::int32_t item : history) {
        if (item >= 0 && static_cast<std::size_t>(item) < scores.size()) seen[item] = true;
    }

    std::vector<std::int32_t> candidates;
    candidates.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!seen[i]) candidates.push_back(static_cast<std::int32_t>(i));
    }

    const auto better = [&scores](std::int32_t a, std::int32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    const std::size_t take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(n));
    std::partial_sort(candidates.begin(), candidates.begin() + take, candidates.end(), better);
    candidates.resize(take);

    RecommendationList list;
    list.user = user;
    list.n = n;
    list.items = std::move(candidates);
    return list;
}

}  // namespace stabrec::recommend
