#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairsim/agents.hpp"
#include "fairsim/allocation.hpp"
#include "fairsim/core.hpp"

namespace fairsim {

enum class ChoiceRule { Borda, Copeland, Rescore };

const char* choice_rule_name(ChoiceRule rule);
ChoiceRule choice_rule_from_name(const std::string& name);

// Whether allocated agents split (1 - recommender_weight) according to their
// allocation weights, or each carry it in full.
enum class AgentWeightMode { Shared, PerAgent };

struct ChoiceConfig {
    ChoiceRule rule = ChoiceRule::Rescore;
    double recommender_weight = 0.6;
    double delta = 0.5;
    AgentWeightMode agent_weight_mode = AgentWeightMode::Shared;
    bool normalize_scores = false;  // min-max rescale recommender scores before rescoring
};

/// The recommender's ballot plus one ballot per allocated agent, all ranking
/// the same candidate set.
struct BallotProfile {
    std::vector<std::string> candidates;  // recommender order
    Ballot recommender;
    std::vector<Ballot> agent_ballots;
};

// Assembles the profile for Borda/Copeland. `agent_rankings` are the cascaded
// rankings aligned with `allocation.entries`.
BallotProfile build_ballots(const ScoredList& rec_list, const Allocation& allocation,
                            std::span<const std::vector<std::string>> agent_rankings,
                            const ChoiceConfig& config);

// Positional rule: an item at position p (0-based) on a ballot of m candidates
// earns weight * (m - 1 - p). Ties break by recommender order.
std::vector<ScoredEntry> borda_aggregate(const BallotProfile& profile);

// Pairwise rule: one point per majority win, half per exact pairwise tie.
// Ties break by recommender order.
std::vector<ScoredEntry> copeland_aggregate(const BallotProfile& profile);

// Score perturbation: each allocated agent adds weight * delta / recommender_weight
// to its protected items' recommender scores. `preferences` align with
// `allocation.entries`. Ties break by recommender order.
std::vector<ScoredEntry> rescore(const ScoredList& rec_list, const Allocation& allocation,
                                 std::span<const BinaryPreference> preferences,
                                 const ChoiceConfig& config);

}  // namespace fairsim
