#include "fairsim/allocation.hpp"

#include <cmath>

#include "fairsim/core.hpp"

namespace fairsim {

const char* allocation_mechanism_name(AllocationMechanism m) {
    switch (m) {
        case AllocationMechanism::LeastFair: return "least_fair";
        case AllocationMechanism::Lottery: return "lottery";
        case AllocationMechanism::Weighted: return "weighted";
    }
    return "?";
}

AllocationMechanism allocation_mechanism_from_name(const std::string& name) {
    if (name == "least_fair") return AllocationMechanism::LeastFair;
    if (name == "lottery") return AllocationMechanism::Lottery;
    if (name == "weighted") return AllocationMechanism::Weighted;
    throw ConfigError("unknown allocation mechanism '" + name +
                      "' (expected least_fair, lottery or weighted)");
}

Allocation allocate_least_fair(std::span<const AgentSnapshot> agents) {
    if (agents.empty()) return Allocation::none();
    std::size_t best = 0;
    for (std::size_t i = 1; i < agents.size(); ++i) {
        if (agents[i].fairness < agents[best].fairness) best = i;
    }
    if (agents[best].fairness >= 1.0) return Allocation::none();
    Allocation alloc;
    alloc.kind = AllocationKind::Single;
    alloc.entries.emplace_back(agents[best].name, 1.0);
    return alloc;
}

std::vector<double> lottery_distribution(std::span<const AgentSnapshot> agents, int alpha,
                                         int beta) {
    if (alpha < 1 || beta < 1) throw ValidationError("lottery powers must be >= 1");
    std::vector<double> scores(agents.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double unfairness = 1.0 - agents[i].fairness;
        scores[i] = std::pow(unfairness, alpha) * std::pow(agents[i].compatibility, beta);
        total += scores[i];
    }
    if (total <= 0.0) return {};
    for (double& s : scores) s /= total;
    return scores;
}

Allocation allocate_lottery(std::span<const AgentSnapshot> agents,
                            std::span<const double> distribution, RandomStream& rng) {
    if (distribution.empty()) return Allocation::none();
    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t picked = distribution.size();
    for (std::size_t i = 0; i < distribution.size(); ++i) {
        cum += distribution[i];
        if (u < cum) {
            picked = i;
            break;
        }
    }
    if (picked == distribution.size()) {
        // Rounding left u at or past the accumulated mass; take the last
        // agent with positive probability.
        for (std::size_t i = distribution.size(); i > 0; --i) {
            if (distribution[i - 1] > 0.0) {
                picked = i - 1;
                break;
            }
        }
        if (picked == distribution.size()) return Allocation::none();
    }
    Allocation alloc;
    alloc.kind = AllocationKind::Single;
    alloc.entries.emplace_back(agents[picked].name, 1.0);
    return alloc;
}

Allocation allocate_weighted(std::span<const AgentSnapshot> agents,
                             std::span<const double> distribution) {
    if (distribution.empty()) return Allocation::none();
    Allocation alloc;
    double mass = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].fairness < 1.0) {
            alloc.entries.emplace_back(agents[i].name, distribution[i]);
            mass += distribution[i];
        }
    }
    if (alloc.entries.empty() || mass <= 0.0) return Allocation::none();
    for (auto& [name, w] : alloc.entries) w /= mass;
    alloc.kind = AllocationKind::Weighted;
    return alloc;
}

Allocation allocate(const AllocationConfig& config, std::span<const AgentSnapshot> agents,
                    RandomStream& rng) {
    switch (config.mechanism) {
        case AllocationMechanism::LeastFair:
            return allocate_least_fair(agents);
        case AllocationMechanism::Lottery:
            return allocate_lottery(
                agents,
                lottery_distribution(agents, config.unfairness_power, config.compatibility_power),
                rng);
        case AllocationMechanism::Weighted:
            return allocate_weighted(
                agents,
                lottery_distribution(agents, config.unfairness_power, config.compatibility_power));
    }
    return Allocation::none();
}

}  // namespace fairsim
