#pragma once

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fairsim/agents.hpp"
#include "fairsim/core.hpp"

namespace fairsim {

/// One summary row: accuracy plus the fairness picture for a (mechanism,
/// fold) combination. `fold_label` is the fold index or "mean".
struct EvaluationSummary {
    std::string allocation_label;
    std::string choice_label;
    std::string fold_label;
    double ndcg = 0.0;
    std::vector<double> agent_fairness;  // declaration order
    double l_half = 0.0;
    bool has_agents = false;  // false for zero-agent runs; l_half undefined then
};

// Binary-relevance nDCG truncated at n. Returns 0 when the relevant set is
// empty.
double ndcg_at_n(const ScoredList& delivered, const std::unordered_set<std::string>& relevant,
                 std::size_t n);

// The agent's own metric applied to the whole run's delivered lists as one
// window.
double summative_fairness(std::span<const ScoredList> delivered, const FeatureCatalog& catalog,
                          const AgentSpec& agent);

// Squared mean of square roots. Equals the arithmetic mean exactly when all
// scores are equal, strictly below it otherwise.
double l_half_norm(std::span<const double> scores);

}  // namespace fairsim
