#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairsim/allocation.hpp"
#include "fairsim/config.hpp"
#include "fairsim/data_io.hpp"
#include "fairsim/evaluation.hpp"

namespace fairsim {

/// One grid cell: an allocation mechanism paired with a choice rule.
/// An empty allocation marks the no-agent baseline.
struct MechanismCell {
    std::optional<AllocationMechanism> allocation;
    ChoiceRule choice = ChoiceRule::Rescore;

    std::string allocation_label() const {
        return allocation ? allocation_mechanism_name(*allocation) : "none";
    }
    std::string choice_label() const {
        return allocation ? choice_rule_name(choice) : "none";
    }
    std::string file_label() const {
        return allocation ? allocation_label() + "_" + choice_label() : "baseline";
    }
};

/// Audit record for one opportunity: what was allocated, what each agent's
/// fairness looked like at decision time, and what was delivered.
struct RunRecord {
    std::uint64_t tick = 0;
    std::string user_id;
    AllocationKind allocation_kind = AllocationKind::None;
    std::vector<std::pair<std::string, double>> allocation_weights;
    std::vector<double> fairness_at_decision;  // agent declaration order
    ScoredList delivered;
};

struct FoldRun {
    int fold = 0;
    std::vector<RunRecord> records;
    EvaluationSummary summary;
};

struct CellResult {
    MechanismCell cell;
    std::vector<FoldRun> folds;
    std::optional<EvaluationSummary> mean;  // present when folds > 1
};

struct ExperimentResult {
    std::vector<std::string> agent_names;
    std::vector<CellResult> cells;  // baseline first for run/sweep
    std::vector<std::string> warnings;

    std::vector<EvaluationSummary> summary_rows() const;
};

// Loads or synthesizes the dataset named by the config and validates it
// against the configured agents.
DatasetBundle prepare_bundle(const ExperimentConfig& config);

// Configured cell plus the no-agent baseline.
ExperimentResult run_experiment(const ExperimentConfig& config, const DatasetBundle& bundle);

// Full allocation x choice grid plus the baseline.
ExperimentResult run_sweep(const ExperimentConfig& config, const DatasetBundle& bundle);

// Scores a delivered-lists file offline. Reproduces the producing run's
// summary rows for that cell byte-exactly.
ExperimentResult evaluate_lists(const ExperimentConfig& config, const DatasetBundle& bundle,
                                const std::string& lists_path, bool as_baseline);

std::string result_summary_csv(const ExperimentResult& result);

// summary.csv plus per-cell delivered_<label>.csv and records_<label>.csv.
void write_result(const ExperimentResult& result, const std::string& out_dir);

}  // namespace fairsim
