#include "fairsim/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace fairsim {

double ndcg_at_n(const ScoredList& delivered, const std::unordered_set<std::string>& relevant,
                 std::size_t n) {
    if (n == 0) throw ValidationError("ndcg truncation depth must be >= 1");
    if (relevant.empty()) return 0.0;
    double dcg = 0.0;
    const std::size_t depth = std::min(n, delivered.size());
    for (std::size_t r = 1; r <= depth; ++r) {
        if (relevant.count(delivered.entries()[r - 1].item_id)) {
            dcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
        }
    }
    double idcg = 0.0;
    const std::size_t ideal = std::min(n, relevant.size());
    for (std::size_t r = 1; r <= ideal; ++r) {
        idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

double summative_fairness(std::span<const ScoredList> delivered, const FeatureCatalog& catalog,
                          const AgentSpec& agent) {
    return agent_fairness(delivered, catalog, agent);
}

double l_half_norm(std::span<const double> scores) {
    if (scores.empty()) throw ValidationError("l_half norm needs at least one score");
    double sum = 0.0;
    for (double s : scores) {
        if (s < 0.0 || s > 1.0) {
            throw ValidationError("l_half norm inputs must lie in [0,1]");
        }
        sum += std::sqrt(s);
    }
    const double mean_root = sum / static_cast<double>(scores.size());
    return mean_root * mean_root;
}

}  // namespace fairsim
