#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairsim/agents.hpp"
#include "fairsim/allocation.hpp"
#include "fairsim/choice.hpp"

namespace fairsim {

/// Desk-scale dataset generator parameters. Generation is a pure function of
/// this spec, so a seed pins the whole bundle.
struct SyntheticSpec {
    std::size_t users = 500;
    std::size_t items = 200;
    std::vector<std::pair<std::string, double>> feature_prevalence;  // declaration order
    double bias_factor = 1.0;  // multiplicative candidate-score penalty per carried feature
    double density = 0.2;      // probability a user rates an item
    std::uint64_t seed = 0;    // 0 -> follow run.seed
};

enum class DataSource { Files, Synthetic };

struct DataConfig {
    DataSource source = DataSource::Files;
    std::string ratings_path;
    std::string features_path;
    std::string candidates_path;
    LikeRule like_rule;
    PbarMode pbar_mode = PbarMode::UserMean;
};

struct RunParams {
    std::size_t candidate_pool = 50;  // k
    std::size_t list_length = 10;     // n
    std::size_t window = 100;         // W
    int folds = 5;
    std::uint64_t seed = 42;
    int threads = 1;
};

struct ExperimentConfig {
    DataConfig data;
    SyntheticSpec synthetic;
    bool has_synthetic = false;
    std::vector<AgentSpec> agents;  // declaration order
    AllocationConfig allocation;
    ChoiceConfig choice;
    RunParams run;
};

// Parses the sectioned key=value format. Unknown sections or keys are hard
// errors; every key has a documented default except the data paths and the
// agent definitions.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Applies a "section.key" override (e.g. "run.seed"). Agent sections cannot
// be overridden this way.
void apply_override(ExperimentConfig& config, const std::string& dotted_key,
                    const std::string& value);

// Cross-field checks (n <= k, value ranges, agent targets, ...). Throws
// ConfigError naming the offending key.
void validate_config(const ExperimentConfig& config);

}  // namespace fairsim
