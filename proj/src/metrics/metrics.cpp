#include "stabrec/metrics/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "stabrec/error.hpp"

namespace stabrec::metrics {

BagOfItems BagOfItems::from_list(const recommend::RecommendationList& list) {
    BagOfItems bag;
    const std::size_t limit =
        std::min<std::size_t>(list.items.size(), static_cast<std::size_t>(list.n));
    bag.weights.reserve(limit);
    for (std::size_t pos = 0; pos < limit; ++pos) {
        bag.weights.emplace_back(list.items[pos], 1.0 / static_cast<double>(pos + 1));
    }
    std::sort(bag.weights.begin(), bag.weights.end());
    return bag;
}

double wji(const BagOfItems& u, const BagOfItems& v) {
    if (u.empty() && v.empty()) return 1.0;

    double num = 0.0;
    double den = 0.0;
    std::size_t i = 0, j = 0;
    while (i < u.weights.size() || j < v.weights.size()) {
        if (j >= v.weights.size() ||
            (i < u.weights.size() && u.weights[i].first < v.weights[j].first)) {
            den += u.weights[i].second;  // min against absent weight 0
            ++i;
        } else if (i >= u.weights.size() || v.weights[j].first < u.weights[i].first) {
            den += v.weights[j].second;
            ++j;
        } else {
            num += std::min(u.weights[i].second, v.weights[j].second);
            den += std::max(u.weights[i].second, v.weights[j].second);
            ++i;
            ++j;
        }
    }
    return den == 0.0 ? 1.0 : num / den;
}

double stability(const ListSet& prev, const ListSet& curr, std::int32_t n,
                 StabilityStats* stats) {
    double sum = 0.0;
    std::int64_t count = 0;
    std::int64_t degenerate = 0;
    for (const auto& [user, curr_list] : curr) {
        const auto it = prev.find(user);
        if (it == prev.end()) continue;
        const BagOfItems a = BagOfItems::from_list(it->second);
        const BagOfItems b = BagOfItems::from_list(curr_list);
        if (a.empty() && b.empty()) ++degenerate;
        sum += wji(a, b);
        ++count;
    }
    (void)n;
    if (count == 0) throw_data("stability: no common users between steps");
    if (stats != nullptr) {
        stats->n_users = count;
        stats->n_degenerate = degenerate;
    }
    return sum / static_cast<double>(count);
}

double hit_rate(const ListSet& lists, const Holdout& holdout) {
    if (holdout.empty()) throw_data("hit_rate: empty holdout");
    std::int64_t hits = 0;
    for (const auto& [user, item] : holdout) {
        const auto it = lists.find(user);
        if (it == lists.end()) {
            throw_usage("hit_rate: holdout user " + std::to_string(user) +
                        " has no recommendation list");
        }
        const auto& items = it->second.items;
        if (std::find(items.begin(), items.end(), item) != items.end()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(holdout.size());
}

double mrr(const ListSet& lists, const Holdout& holdout) {
    if (holdout.empty()) throw_data("mrr: empty holdout");
    double sum = 0.0;
    for (const auto& [user, item] : holdout) {
        const auto it = lists.find(user);
        if (it == lists.end()) {
            throw_usage("mrr: holdout user " + std::to_string(user) +
                        " has no recommendation list");
        }
        const auto& items = it->second.items;
        const auto pos = std::find(items.begin(), items.end(), item);
        if (pos != items.end()) {
            sum += 1.0 / static_cast<double>(std::distance(items.begin(), pos) + 1);
        }
    }
    return sum / static_cast<double>(holdout.size());
}

double coverage(const ListSet& lists, std::int64_t catalog_size) {
    if (catalog_size <= 0) throw_usage("coverage: catalog_size must be positive");
    std::set<std::int32_t> unique;
    for (const auto& [user, list] : lists) {
        unique.insert(list.items.begin(), list.items.end());
    }
    return static_cast<double>(unique.size()) / static_cast<double>(catalog_size);
}

}  // namespace stabrec::metrics
