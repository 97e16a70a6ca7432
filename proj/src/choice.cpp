#include "fairsim/choice.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace fairsim {

namespace {

// Candidate index per item for one ballot, top first.
std::vector<std::size_t> positions_of(const Ballot& ballot,
                                      const std::unordered_map<std::string, std::size_t>& index,
                                      std::size_t m) {
    if (ballot.ranking.size() != m) {
        throw ValidationError("ballot does not rank the full candidate set");
    }
    std::vector<std::size_t> pos(m, m);
    for (std::size_t p = 0; p < ballot.ranking.size(); ++p) {
        auto it = index.find(ballot.ranking[p]);
        if (it == index.end()) {
            throw ValidationError("ballot ranks unknown candidate " + ballot.ranking[p]);
        }
        if (pos[it->second] != m) {
            throw ValidationError("ballot ranks candidate twice: " + ballot.ranking[p]);
        }
        pos[it->second] = p;
    }
    return pos;
}

std::unordered_map<std::string, std::size_t> candidate_index(
    const std::vector<std::string>& candidates) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) index.emplace(candidates[i], i);
    return index;
}

// Stable sort by score descending over candidates listed in recommender
// order, so exact score ties keep the recommender's ordering.
std::vector<ScoredEntry> order_by_score(const std::vector<std::string>& candidates,
                                        const std::vector<double>& scores) {
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<ScoredEntry> out;
    out.reserve(order.size());
    for (std::size_t i : order) out.push_back({candidates[i], scores[i]});
    return out;
}

}  // namespace

const char* choice_rule_name(ChoiceRule rule) {
    switch (rule) {
        case ChoiceRule::Borda: return "borda";
        case ChoiceRule::Copeland: return "copeland";
        case ChoiceRule::Rescore: return "rescore";
    }
    return "?";
}

ChoiceRule choice_rule_from_name(const std::string& name) {
    if (name == "borda") return ChoiceRule::Borda;
    if (name == "copeland") return ChoiceRule::Copeland;
    if (name == "rescore") return ChoiceRule::Rescore;
    throw ConfigError("unknown choice rule '" + name + "' (expected borda, copeland or rescore)");
}

BallotProfile build_ballots(const ScoredList& rec_list, const Allocation& allocation,
                            std::span<const std::vector<std::string>> agent_rankings,
                            const ChoiceConfig& config) {
    BallotProfile profile;
    profile.candidates.reserve(rec_list.size());
    for (const ScoredEntry& e : rec_list.entries()) profile.candidates.push_back(e.item_id);
    profile.recommender = {profile.candidates, config.recommender_weight};
    if (allocation.kind == AllocationKind::None) return profile;

    if (agent_rankings.size() != allocation.entries.size()) {
        throw ValidationError("one ranking per allocated agent required");
    }
    const double agent_share = 1.0 - config.recommender_weight;
    for (std::size_t i = 0; i < allocation.entries.size(); ++i) {
        const double w = config.agent_weight_mode == AgentWeightMode::Shared
                             ? agent_share * allocation.entries[i].second
                             : agent_share;
        profile.agent_ballots.push_back({agent_rankings[i], w});
    }
    return profile;
}

std::vector<ScoredEntry> borda_aggregate(const BallotProfile& profile) {
    const std::size_t m = profile.candidates.size();
    const auto index = candidate_index(profile.candidates);
    std::vector<double> scores(m, 0.0);

    auto tally = [&](const Ballot& ballot) {
        const auto pos = positions_of(ballot, index, m);
        for (std::size_t c = 0; c < m; ++c) {
            scores[c] += ballot.weight * static_cast<double>(m - 1 - pos[c]);
        }
    };
    tally(profile.recommender);
    for (const Ballot& b : profile.agent_ballots) tally(b);
    return order_by_score(profile.candidates, scores);
}

std::vector<ScoredEntry> copeland_aggregate(const BallotProfile& profile) {
    const std::size_t m = profile.candidates.size();
    const auto index = candidate_index(profile.candidates);

    std::vector<std::vector<std::size_t>> positions;
    std::vector<double> weights;
    positions.push_back(positions_of(profile.recommender, index, m));
    weights.push_back(profile.recommender.weight);
    for (const Ballot& b : profile.agent_ballots) {
        positions.push_back(positions_of(b, index, m));
        weights.push_back(b.weight);
    }

    std::vector<double> scores(m, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = x + 1; y < m; ++y) {
            double for_x = 0.0;
            double for_y = 0.0;
            for (std::size_t b = 0; b < positions.size(); ++b) {
                if (positions[b][x] < positions[b][y]) {
                    for_x += weights[b];
                } else {
                    for_y += weights[b];
                }
            }
            if (for_x > for_y) {
                scores[x] += 1.0;
            } else if (for_y > for_x) {
                scores[y] += 1.0;
            } else {
                scores[x] += 0.5;
                scores[y] += 0.5;
            }
        }
    }
    return order_by_score(profile.candidates, scores);
}

std::vector<ScoredEntry> rescore(const ScoredList& rec_list, const Allocation& allocation,
                                 std::span<const BinaryPreference> preferences,
                                 const ChoiceConfig& config) {
    if (config.recommender_weight <= 0.0) {
        throw ValidationError("rescoring requires a positive recommender weight");
    }
    std::vector<std::string> candidates;
    std::vector<double> scores;
    candidates.reserve(rec_list.size());
    scores.reserve(rec_list.size());
    for (const ScoredEntry& e : rec_list.entries()) {
        candidates.push_back(e.item_id);
        scores.push_back(e.score);
    }
    if (config.normalize_scores && !scores.empty()) {
        const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
        const double span = *hi - *lo;
        for (double& s : scores) s = span > 0.0 ? (s - *lo) / span : 0.0;
    }
    if (allocation.kind != AllocationKind::None) {
        if (preferences.size() != allocation.entries.size()) {
            throw ValidationError("one binary preference per allocated agent required");
        }
        const auto index = candidate_index(candidates);
        for (std::size_t a = 0; a < allocation.entries.size(); ++a) {
            const double bonus =
                allocation.entries[a].second * config.delta / config.recommender_weight;
            for (const std::string& item : preferences[a].preferred) {
                auto it = index.find(item);
                if (it == index.end()) {
                    throw ValidationError("preference names unknown candidate " + item);
                }
                scores[it->second] += bonus;
            }
        }
    }
    return order_by_score(candidates, scores);
}

}  // namespace fairsim
