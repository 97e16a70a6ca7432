#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairsim/core.hpp"

namespace fairsim {

enum class MetricKind { GPF, GUF, MRR };

const char* metric_kind_name(MetricKind kind);
MetricKind metric_kind_from_name(const std::string& name);

/// One provider-side fairness concern: which feature it advocates for, how it
/// measures fairness over the history window, and what value counts as fair.
struct AgentSpec {
    std::string name;
    std::string feature;
    MetricKind metric = MetricKind::GPF;
    double target = 1.0;  // in (0,1]
};

struct AgentState {
    AgentSpec spec;
    double fairness = 0.0;
};

/// Total order over a candidate set plus the ballot's weight in aggregation.
struct Ballot {
    std::vector<std::string> ranking;
    double weight = 0.0;
};

/// Two-level preference: protected candidates over everything else.
/// Both blocks keep recommender order.
struct BinaryPreference {
    std::vector<std::string> preferred;
    std::vector<std::string> other;
};

// --- Fairness metrics -------------------------------------------------------
//
// All three run over a set of delivered lists (the history window during a
// run, or the whole run for summative evaluation), return values in [0,1],
// truncate at 1 once the target is met, and return 0 for an empty window.

// Share of list slots filled by protected items, relative to the target share.
double fairness_gpf(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target);

// Rank-discounted utility (1/log2(rank+1)) of the protected group over the
// unprotected group, each normalized by its catalog size, relative to the
// target ratio. Returns 1 when only protected utility exists.
double fairness_guf(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target_ratio);

// Mean reciprocal rank of the first protected item per list (0 when absent),
// relative to the target MRR.
double fairness_mrr(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                    const std::string& feature, double target_mrr);

// Dispatch on the agent's metric kind.
double agent_fairness(std::span<const ScoredList> lists, const FeatureCatalog& catalog,
                      const AgentSpec& spec);

// --- Compatibility ----------------------------------------------------------

struct LikeRule {
    enum class Kind { Threshold, AllLiked };
    Kind kind = Kind::Threshold;
    double threshold = 3.0;  // liked iff value > threshold

    bool liked(double value) const {
        return kind == Kind::AllLiked || value > threshold;
    }
};

// Denominator of c_{u,f}: mean of the per-user liked-share (default), or the
// feature's share of the catalog.
enum class PbarMode { UserMean, CatalogShare };

/// Per-user affinity vector over the configured agents, normalized to sum 1.
/// Users absent from training (or with no signal at all) get the uniform
/// vector.
class CompatibilityTable {
public:
    CompatibilityTable() = default;
    CompatibilityTable(std::size_t agent_count,
                       std::unordered_map<std::string, std::vector<double>> per_user);

    const std::vector<double>& for_user(const std::string& user_id) const;
    std::size_t agent_count() const { return uniform_.size(); }
    std::size_t known_users() const { return per_user_.size(); }

private:
    std::unordered_map<std::string, std::vector<double>> per_user_;
    std::vector<double> uniform_;
};

// Raw c_{u,f} = p_{u,f} / pbar_f for one user and one feature; exposed for
// tests and for the table builder.
double raw_compatibility(double p_user, double pbar);

CompatibilityTable compute_compatibility(std::span<const Rating> train,
                                         const FeatureCatalog& catalog,
                                         std::span<const AgentSpec> agents,
                                         const LikeRule& like_rule,
                                         PbarMode pbar_mode = PbarMode::UserMean);

// --- Agent ranking functions -------------------------------------------------

BinaryPreference rank_binary(const ScoredList& candidates, const FeatureCatalog& catalog,
                             const std::string& feature);

// Protected items first, then the rest; recommender order within each block.
std::vector<std::string> rank_cascaded(const ScoredList& candidates, const FeatureCatalog& catalog,
                                       const std::string& feature);

}  // namespace fairsim
