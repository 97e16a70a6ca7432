#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairsim/rng.hpp"

namespace fairsim {

enum class AllocationKind { None, Single, Weighted };

/// Which fairness agents participate in one recommendation opportunity, and
/// with what weight. Entries follow agent declaration order; weights of a
/// non-empty allocation sum to 1.
struct Allocation {
    AllocationKind kind = AllocationKind::None;
    std::vector<std::pair<std::string, double>> entries;

    static Allocation none() { return {}; }
};

enum class AllocationMechanism { LeastFair, Lottery, Weighted };

const char* allocation_mechanism_name(AllocationMechanism m);
AllocationMechanism allocation_mechanism_from_name(const std::string& name);

struct AllocationConfig {
    AllocationMechanism mechanism = AllocationMechanism::Lottery;
    int unfairness_power = 1;     // alpha
    int compatibility_power = 2;  // beta
};

/// Per-agent view at one opportunity: rolling fairness plus the arriving
/// user's compatibility with the agent.
struct AgentSnapshot {
    std::string name;
    double fairness = 0.0;
    double compatibility = 0.0;
};

// Single agent with the lowest fairness; first declared wins ties.
// No allocation when every agent already sits at fairness 1.
// Compatibility is ignored.
Allocation allocate_least_fair(std::span<const AgentSnapshot> agents);

// score_i = (1 - fairness_i)^alpha * compatibility_i^beta, normalized to sum 1.
// Empty when every score is zero.
std::vector<double> lottery_distribution(std::span<const AgentSnapshot> agents, int alpha,
                                         int beta);

// Single agent sampled from the distribution on the experiment's seeded stream.
Allocation allocate_lottery(std::span<const AgentSnapshot> agents,
                            std::span<const double> distribution, RandomStream& rng);

// Every agent below fairness 1, weighted by its distribution value
// (renormalized over that set).
Allocation allocate_weighted(std::span<const AgentSnapshot> agents,
                             std::span<const double> distribution);

// Dispatch on the configured mechanism.
Allocation allocate(const AllocationConfig& config, std::span<const AgentSnapshot> agents,
                    RandomStream& rng);

}  // namespace fairsim
