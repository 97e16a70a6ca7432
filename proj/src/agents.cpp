#include "fairsim/agents.hpp"

#include <algorithm>
#include <cmath>

namespace fairsim {

namespace {

double truncate01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double rank_discount(std::size_t rank_from_1) {
    return 1.0 / std::log2(static_cast<double>(rank_from_1) + 1.0);
}

}  // namespace

const char* metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::GPF: return "gpf";
        case MetricKind::GUF: return "guf";
        case MetricKind::MRR: return "mrr";
    }
    return "?";
}

MetricKind metric_kind_from_name(const std::string& name) {
    if (name == "gpf") return MetricKind::GPF;
    if (name == "guf") return MetricKind::GUF;
    if (name == "mrr") return MetricKind::MRR;
    throw ConfigError("unknown fairness metric '" + name + "' (expected gpf, guf or mrr)");
}

double fairness_gpf(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target) {
    if (target <= 0.0) throw ValidationError("gpf target must be positive");
    if (lists.empty()) return 0.0;
    const int tag = catalog.feature_index(feature);
    std::size_t total = 0;
    std::size_t hits = 0;
    for (const ScoredList& list : lists) {
        for (const ScoredEntry& e : list.entries()) {
            ++total;
            if (catalog.item_has(catalog.item_index(e.item_id), tag)) ++hits;
        }
    }
    if (total == 0) return 0.0;
    const double share = static_cast<double>(hits) / static_cast<double>(total);
    return truncate01(share / target);
}

double fairness_guf(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target_ratio) {
    if (target_ratio <= 0.0) throw ValidationError("guf target ratio must be positive");
    const std::size_t protected_size = catalog.protected_count(feature);
    const std::size_t unprotected_size = catalog.unprotected_count(feature);
    if (protected_size == 0 || unprotected_size == 0) {
        throw ValidationError("guf needs both protected and unprotected items for feature '" +
                              feature + "'");
    }
    if (lists.empty()) return 0.0;
    const int tag = catalog.feature_index(feature);
    double protected_utility = 0.0;
    double unprotected_utility = 0.0;
    for (const ScoredList& list : lists) {
        std::size_t rank = 0;
        for (const ScoredEntry& e : list.entries()) {
            ++rank;
            const double u = rank_discount(rank);
            if (catalog.item_has(catalog.item_index(e.item_id), tag)) {
                protected_utility += u;
            } else {
                unprotected_utility += u;
            }
        }
    }
    const double per_protected = protected_utility / static_cast<double>(protected_size);
    const double per_unprotected = unprotected_utility / static_cast<double>(unprotected_size);
    if (per_unprotected == 0.0) return per_protected > 0.0 ? 1.0 : 0.0;
    return truncate01((per_protected / per_unprotected) / target_ratio);
}

double fairness_mrr(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target_mrr) {
    if (target_mrr <= 0.0 || target_mrr > 1.0) {
        throw ValidationError("mrr target must be in (0,1]");
    }
    if (lists.empty()) return 0.0;
    const int tag = catalog.feature_index(feature);
    double sum = 0.0;
    for (const ScoredList& list : lists) {
        std::size_t rank = 0;
        for (const ScoredEntry& e : list.entries()) {
            ++rank;
            if (catalog.item_has(catalog.item_index(e.item_id), tag)) {
                sum += 1.0 / static_cast<double>(rank);
                break;
            }
        }
    }
    const double mean = sum / static_cast<double>(lists.size());
    return truncate01(mean / target_mrr);
}

double agent_fairness(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                      const AgentSpec& spec) {
    switch (spec.metric) {
        case MetricKind::GPF: return fairness_gpf(lists, catalog, spec.feature, spec.target);
        case MetricKind::GUF: return fairness_guf(lists, catalog, spec.feature, spec.target);
        case MetricKind::MRR: return fairness_mrr(lists, catalog, spec.feature, spec.target);
    }
    return 0.0;
}

CompatibilityTable::CompatibilityTable(
    std::size_t agent_count, std::unordered_map<std::string, std::vector<double>> per_user)
    : per_user_(std::move(per_user)) {
    uniform_.assign(agent_count, agent_count == 0 ? 0.0 : 1.0 / static_cast<double>(agent_count));
}

const std::vector<double>& CompatibilityTable::for_user(const std::string& user_id) const {
    auto it = per_user_.find(user_id);
    return it == per_user_.end() ? uniform_ : it->second;
}

double raw_compatibility(double p_user, double pbar) {
    if (pbar <= 0.0) throw DataError("feature liked by no training user (pbar = 0)");
    return p_user / pbar;
}

CompatibilityTable compute_compatibility(std::span<const Rating> train,
                                         const FeatureCatalog& catalog,
                                         std::span<const AgentSpec> agents,
                                         const LikeRule& like_rule, PbarMode pbar_mode) {
    const std::size_t n_agents = agents.size();
    std::vector<int> tags(n_agents);
    for (std::size_t a = 0; a < n_agents; ++a) tags[a] = catalog.feature_index(agents[a].feature);

    // Per-user rated count and liked-with-feature counts, in first-seen order
    // so every accumulation below is deterministic.
    struct UserCounts {
        std::size_t rated = 0;
        std::vector<std::size_t> liked_with;
    };
    std::vector<std::string> user_order;
    std::unordered_map<std::string, UserCounts> counts;
    for (const Rating& r : train) {
        auto [it, inserted] = counts.try_emplace(r.user_id);
        if (inserted) {
            it->second.liked_with.assign(n_agents, 0);
            user_order.push_back(r.user_id);
        }
        it->second.rated++;
        if (like_rule.liked(r.value)) {
            const int item = catalog.item_index(r.item_id);
            for (std::size_t a = 0; a < n_agents; ++a) {
                if (catalog.item_has(item, tags[a])) it->second.liked_with[a]++;
            }
        }
    }

    std::vector<double> pbar(n_agents, 0.0);
    if (pbar_mode == PbarMode::CatalogShare) {
        for (std::size_t a = 0; a < n_agents; ++a) {
            pbar[a] = catalog.item_count() == 0
                          ? 0.0
                          : static_cast<double>(catalog.protected_count(agents[a].feature)) /
                                static_cast<double>(catalog.item_count());
        }
    } else {
        for (const std::string& user : user_order) {
            const UserCounts& c = counts.at(user);
            for (std::size_t a = 0; a < n_agents; ++a) {
                pbar[a] += static_cast<double>(c.liked_with[a]) / static_cast<double>(c.rated);
            }
        }
        for (std::size_t a = 0; a < n_agents; ++a) {
            if (!user_order.empty()) pbar[a] /= static_cast<double>(user_order.size());
        }
    }
    for (std::size_t a = 0; a < n_agents; ++a) {
        if (n_agents > 0 && pbar[a] <= 0.0) {
            throw DataError("agent '" + agents[a].name + "': feature '" + agents[a].feature +
                            "' is never liked in the training data");
        }
    }

    std::unordered_map<std::string, std::vector<double>> table;
    table.reserve(user_order.size());
    for (const std::string& user : user_order) {
        const UserCounts& c = counts.at(user);
        std::vector<double> vec(n_agents, 0.0);
        double sum = 0.0;
        for (std::size_t a = 0; a < n_agents; ++a) {
            const double p = static_cast<double>(c.liked_with[a]) / static_cast<double>(c.rated);
            vec[a] = raw_compatibility(p, pbar[a]);
            sum += vec[a];
        }
        if (sum > 0.0) {
            for (double& v : vec) v /= sum;
            table.emplace(user, std::move(vec));
        }
        // Users with no affinity signal fall back to the uniform vector.
    }
    return CompatibilityTable(n_agents, std::move(table));
}

BinaryPreference rank_binary(const ScoredList& candidates, const FeatureCatalog& catalog,
                             const std::string& feature) {
    const int tag = catalog.feature_index(feature);
    BinaryPreference pref;
    for (const ScoredEntry& e : candidates.entries()) {
        if (catalog.item_has(catalog.item_index(e.item_id), tag)) {
            pref.preferred.push_back(e.item_id);
        } else {
            pref.other.push_back(e.item_id);
        }
    }
    return pref;
}

std::vector<std::string> rank_cascaded(const ScoredList& candidates, const FeatureCatalog& catalog,
                                       const std::string& feature) {
    BinaryPreference pref = rank_binary(candidates, catalog, feature);
    std::vector<std::string> order = std::move(pref.preferred);
    order.insert(order.end(), pref.other.begin(), pref.other.end());
    return order;
}

}  // namespace fairsim
