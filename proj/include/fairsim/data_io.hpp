#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairsim/config.hpp"
#include "fairsim/core.hpp"
#include "fairsim/evaluation.hpp"

namespace fairsim {

/// Everything one experiment consumes: the item catalog, the full rating set,
/// and each user's precomputed scored candidates (sorted best-first).
struct DatasetBundle {
    FeatureCatalog catalog;
    std::vector<Rating> ratings;
    std::vector<std::string> rating_users;  // sorted, unique
    std::unordered_map<std::string, std::vector<ScoredEntry>> candidates;
};

/// One train/test split. For folds >= 2 each user's ratings are stratified
/// across folds and the fold's portion is held out; folds == 1 means no
/// holdout (train and test both cover everything).
struct FoldSplit {
    std::vector<Rating> train;              // deterministic order
    std::vector<std::string> test_users;    // sorted
    std::unordered_map<std::string, std::unordered_set<std::string>> test_liked;
};

DatasetBundle load_bundle(const DataConfig& data);
DatasetBundle generate_synthetic(const SyntheticSpec& spec);

// Fails fast when an agent's feature is missing from the catalog or lacks a
// protected/unprotected side, or when agents are configured without ratings.
void validate_bundle_for_agents(const DatasetBundle& bundle, std::span<const AgentSpec> agents);

FoldSplit make_fold(const DatasetBundle& bundle, int folds, int fold_index, std::uint64_t seed,
                    const LikeRule& like_rule);

// Writes ratings.csv, features.csv and candidates.csv for a bundle.
void write_dataset_files(const DatasetBundle& bundle, const std::string& dir);

// Shortest round-trip decimal form, the one float format used in every
// emitted file.
std::string format_double(double value);

void write_delivered_lists(const std::string& path, std::span<const ScoredList> lists);
std::vector<ScoredList> read_delivered_lists(const std::string& path);

std::string summary_csv(std::span<const EvaluationSummary> rows,
                        std::span<const std::string> agent_names);

}  // namespace fairsim
