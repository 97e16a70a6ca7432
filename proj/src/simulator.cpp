#include "fairsim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "fairsim/choice.hpp"

namespace fairsim {

namespace {

const char* allocation_kind_name(AllocationKind kind) {
    switch (kind) {
        case AllocationKind::None: return "none";
        case AllocationKind::Single: return "single";
        case AllocationKind::Weighted: return "weighted";
    }
    return "?";
}

// Test users that actually generate an opportunity: those with at least k
// candidates. Everyone else is skipped with a warning.
std::vector<std::string> eligible_users(const DatasetBundle& bundle, const FoldSplit& fold,
                                        std::size_t k, int fold_index,
                                        std::vector<std::string>* warnings) {
    std::vector<std::string> users;
    users.reserve(fold.test_users.size());
    for (const std::string& user : fold.test_users) {
        auto it = bundle.candidates.find(user);
        if (it == bundle.candidates.end() || it->second.size() < k) {
            if (warnings != nullptr) {
                warnings->push_back("fold " + std::to_string(fold_index) + ": user '" + user +
                                    "' skipped (fewer than " + std::to_string(k) +
                                    " candidates)");
            }
            continue;
        }
        users.push_back(user);
    }
    return users;
}

EvaluationSummary evaluate_delivered(std::span<const ScoredList> delivered, const FoldSplit& fold,
                                     const FeatureCatalog& catalog,
                                     std::span<const AgentSpec> agents, std::size_t n,
                                     const MechanismCell& cell, const std::string& fold_label) {
    EvaluationSummary summary;
    summary.allocation_label = cell.allocation_label();
    summary.choice_label = cell.choice_label();
    summary.fold_label = fold_label;
    summary.has_agents = !agents.empty();

    double ndcg_sum = 0.0;
    std::size_t ndcg_count = 0;
    static const std::unordered_set<std::string> kNoRelevant;
    for (const ScoredList& list : delivered) {
        auto it = fold.test_liked.find(list.user_id());
        const auto& relevant = it == fold.test_liked.end() ? kNoRelevant : it->second;
        if (relevant.empty()) continue;  // no held-out positives, excluded from the mean
        ndcg_sum += ndcg_at_n(list, relevant, n);
        ++ndcg_count;
    }
    summary.ndcg = ndcg_count == 0 ? 0.0 : ndcg_sum / static_cast<double>(ndcg_count);

    for (const AgentSpec& agent : agents) {
        summary.agent_fairness.push_back(summative_fairness(delivered, catalog, agent));
    }
    if (summary.has_agents) summary.l_half = l_half_norm(summary.agent_fairness);
    return summary;
}

EvaluationSummary mean_summary(std::span<const FoldRun> folds, const MechanismCell& cell,
                               std::size_t agent_count) {
    EvaluationSummary mean;
    mean.allocation_label = cell.allocation_label();
    mean.choice_label = cell.choice_label();
    mean.fold_label = "mean";
    mean.has_agents = agent_count > 0;
    mean.agent_fairness.assign(agent_count, 0.0);
    const double denom = static_cast<double>(folds.size());
    for (const FoldRun& fr : folds) {
        mean.ndcg += fr.summary.ndcg / denom;
        mean.l_half += fr.summary.l_half / denom;
        for (std::size_t a = 0; a < agent_count; ++a) {
            mean.agent_fairness[a] += fr.summary.agent_fairness[a] / denom;
        }
    }
    return mean;
}

struct CellFoldTask {
    std::size_t cell_index = 0;  // seed derivation slot
    const MechanismCell* cell = nullptr;
    int fold_index = 0;
    const FoldSplit* fold = nullptr;
    const CompatibilityTable* compat = nullptr;
    std::uint64_t tick_base = 0;
};

FoldRun run_cell_fold(const ExperimentConfig& config, const DatasetBundle& bundle,
                      const CellFoldTask& task) {
    const std::size_t k = config.run.candidate_pool;
    const std::size_t n = config.run.list_length;
    const std::vector<AgentSpec>& agents = config.agents;

    RandomStream rng(derive_seed(config.run.seed, static_cast<std::uint64_t>(task.fold_index),
                                 task.cell_index));
    std::vector<std::string> arrivals = eligible_users(bundle, *task.fold, k, task.fold_index, nullptr);
    rng.shuffle(arrivals);

    HistoryWindow window(config.run.window);
    FoldRun out;
    out.fold = task.fold_index;
    out.records.reserve(arrivals.size());

    std::uint64_t tick = task.tick_base;
    std::vector<AgentSnapshot> snapshots(agents.size());
    for (const std::string& user : arrivals) {
        const std::vector<ScoredEntry>& pool = bundle.candidates.at(user);
        std::vector<ScoredEntry> top(pool.begin(), pool.begin() + static_cast<long>(k));
        ScoredList rec_list = ScoredList::from_ordered(user, tick, std::move(top));

        const std::vector<double>& compat = task.compat->for_user(user);
        std::vector<double> fairness(agents.size(), 0.0);
        for (std::size_t a = 0; a < agents.size(); ++a) {
            fairness[a] = agent_fairness(window.view(), bundle.catalog, agents[a]);
            snapshots[a] = AgentSnapshot{agents[a].name, fairness[a], compat[a]};
        }

        Allocation alloc = Allocation::none();
        if (task.cell->allocation) {
            AllocationConfig alloc_cfg = config.allocation;
            alloc_cfg.mechanism = *task.cell->allocation;
            alloc = allocate(alloc_cfg, snapshots, rng);
        }

        ScoredList delivered;
        if (alloc.kind == AllocationKind::None) {
            delivered = rec_list.top(n);
        } else {
            std::vector<const AgentSpec*> allocated;
            allocated.reserve(alloc.entries.size());
            for (const auto& [name, _] : alloc.entries) {
                for (const AgentSpec& a : agents) {
                    if (a.name == name) {
                        allocated.push_back(&a);
                        break;
                    }
                }
            }
            std::vector<ScoredEntry> aggregated;
            if (task.cell->choice == ChoiceRule::Rescore) {
                std::vector<BinaryPreference> prefs;
                prefs.reserve(allocated.size());
                for (const AgentSpec* a : allocated) {
                    prefs.push_back(rank_binary(rec_list, bundle.catalog, a->feature));
                }
                aggregated = rescore(rec_list, alloc, prefs, config.choice);
            } else {
                std::vector<std::vector<std::string>> rankings;
                rankings.reserve(allocated.size());
                for (const AgentSpec* a : allocated) {
                    rankings.push_back(rank_cascaded(rec_list, bundle.catalog, a->feature));
                }
                BallotProfile profile = build_ballots(rec_list, alloc, rankings, config.choice);
                aggregated = task.cell->choice == ChoiceRule::Borda
                                 ? borda_aggregate(profile)
                                 : copeland_aggregate(profile);
            }
            delivered = ScoredList::from_ordered(user, tick, std::move(aggregated)).top(n);
        }

        window.append(delivered);
        RunRecord record;
        record.tick = tick;
        record.user_id = user;
        record.allocation_kind = alloc.kind;
        record.allocation_weights = alloc.entries;
        record.fairness_at_decision = std::move(fairness);
        record.delivered = delivered;
        out.records.push_back(std::move(record));
        ++tick;
    }

    std::vector<ScoredList> delivered_lists;
    delivered_lists.reserve(out.records.size());
    for (const RunRecord& r : out.records) delivered_lists.push_back(r.delivered);
    out.summary = evaluate_delivered(delivered_lists, *task.fold, bundle.catalog, agents, n,
                                     *task.cell, std::to_string(task.fold_index));
    return out;
}

ExperimentResult run_cells(const ExperimentConfig& config, const DatasetBundle& bundle,
                           const std::vector<MechanismCell>& cells) {
    ExperimentResult result;
    for (const AgentSpec& a : config.agents) result.agent_names.push_back(a.name);

    // Folds and compatibility are shared across cells; the per-cell seed only
    // drives arrival shuffling and lottery draws.
    const int folds = config.run.folds;
    std::vector<FoldSplit> splits;
    std::vector<CompatibilityTable> compat;
    splits.reserve(static_cast<std::size_t>(folds));
    compat.reserve(static_cast<std::size_t>(folds));
    for (int f = 0; f < folds; ++f) {
        splits.push_back(make_fold(bundle, folds, f, config.run.seed, config.data.like_rule));
        compat.push_back(compute_compatibility(splits.back().train, bundle.catalog, config.agents,
                                               config.data.like_rule, config.data.pbar_mode));
    }

    // Global ticks: fold f of every cell starts after the opportunities of
    // folds 0..f-1, so one concatenated lists file replays unambiguously.
    std::vector<std::uint64_t> tick_base(static_cast<std::size_t>(folds), 0);
    for (int f = 0; f < folds; ++f) {
        std::vector<std::string> fold_warnings;
        const std::size_t count =
            eligible_users(bundle, splits[static_cast<std::size_t>(f)], config.run.candidate_pool,
                           f, &fold_warnings)
                .size();
        for (std::string& w : fold_warnings) result.warnings.push_back(std::move(w));
        if (f + 1 < folds) {
            tick_base[static_cast<std::size_t>(f) + 1] = tick_base[static_cast<std::size_t>(f)] + count;
        }
    }

    std::vector<CellFoldTask> tasks;
    result.cells.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        result.cells[c].cell = cells[c];
        result.cells[c].folds.resize(static_cast<std::size_t>(folds));
        for (int f = 0; f < folds; ++f) {
            tasks.push_back(CellFoldTask{c, &cells[c], f, &splits[static_cast<std::size_t>(f)],
                                         &compat[static_cast<std::size_t>(f)],
                                         tick_base[static_cast<std::size_t>(f)]});
        }
    }

    const int threads = std::min<int>(config.run.threads, static_cast<int>(tasks.size()));
    if (threads <= 1) {
        for (const CellFoldTask& task : tasks) {
            result.cells[task.cell_index].folds[static_cast<std::size_t>(task.fold_index)] =
                run_cell_fold(config, bundle, task);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                const CellFoldTask& task = tasks[i];
                result.cells[task.cell_index].folds[static_cast<std::size_t>(task.fold_index)] =
                    run_cell_fold(config, bundle, task);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (CellResult& cell : result.cells) {
        if (folds > 1) cell.mean = mean_summary(cell.folds, cell.cell, config.agents.size());
    }
    return result;
}

}  // namespace

std::vector<EvaluationSummary> ExperimentResult::summary_rows() const {
    std::vector<EvaluationSummary> rows;
    for (const CellResult& cell : cells) {
        for (const FoldRun& fr : cell.folds) rows.push_back(fr.summary);
        if (cell.mean) rows.push_back(*cell.mean);
    }
    return rows;
}

DatasetBundle prepare_bundle(const ExperimentConfig& config) {
    validate_config(config);
    DatasetBundle bundle;
    if (config.data.source == DataSource::Synthetic) {
        SyntheticSpec spec = config.synthetic;
        if (spec.seed == 0) spec.seed = config.run.seed;
        bundle = generate_synthetic(spec);
    } else {
        bundle = load_bundle(config.data);
    }
    validate_bundle_for_agents(bundle, config.agents);
    return bundle;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const DatasetBundle& bundle) {
    std::vector<MechanismCell> cells;
    cells.push_back(MechanismCell{std::nullopt, config.choice.rule});
    cells.push_back(MechanismCell{config.allocation.mechanism, config.choice.rule});
    return run_cells(config, bundle, cells);
}

ExperimentResult run_sweep(const ExperimentConfig& config, const DatasetBundle& bundle) {
    std::vector<MechanismCell> cells;
    cells.push_back(MechanismCell{std::nullopt, config.choice.rule});
    for (AllocationMechanism alloc : {AllocationMechanism::LeastFair, AllocationMechanism::Lottery,
                                      AllocationMechanism::Weighted}) {
        for (ChoiceRule rule : {ChoiceRule::Borda, ChoiceRule::Copeland, ChoiceRule::Rescore}) {
            cells.push_back(MechanismCell{alloc, rule});
        }
    }
    return run_cells(config, bundle, cells);
}

ExperimentResult evaluate_lists(const ExperimentConfig& config, const DatasetBundle& bundle,
                                const std::string& lists_path, bool as_baseline) {
    validate_config(config);
    const std::vector<ScoredList> lists = read_delivered_lists(lists_path);

    MechanismCell cell;
    if (!as_baseline) cell = MechanismCell{config.allocation.mechanism, config.choice.rule};

    ExperimentResult result;
    for (const AgentSpec& a : config.agents) result.agent_names.push_back(a.name);
    result.cells.resize(1);
    result.cells[0].cell = cell;

    const int folds = config.run.folds;
    std::size_t consumed = 0;
    for (int f = 0; f < folds; ++f) {
        const FoldSplit split = make_fold(bundle, folds, f, config.run.seed, config.data.like_rule);
        const std::size_t expected =
            eligible_users(bundle, split, config.run.candidate_pool, f, nullptr).size();
        if (consumed + expected > lists.size()) {
            throw DataError(lists_path + ": fewer lists than the config's folds produce (fold " +
                            std::to_string(f) + " needs " + std::to_string(expected) + ")");
        }
        FoldRun fr;
        fr.fold = f;
        std::span<const ScoredList> fold_lists(lists.data() + consumed, expected);
        fr.summary = evaluate_delivered(fold_lists, split, bundle.catalog, config.agents,
                                        config.run.list_length, cell, std::to_string(f));
        consumed += expected;
        result.cells[0].folds.push_back(std::move(fr));
    }
    if (consumed != lists.size()) {
        throw DataError(lists_path + ": " + std::to_string(lists.size() - consumed) +
                        " trailing lists beyond the config's folds");
    }
    if (folds > 1) {
        result.cells[0].mean = mean_summary(result.cells[0].folds, cell, config.agents.size());
    }
    return result;
}

std::string result_summary_csv(const ExperimentResult& result) {
    const std::vector<EvaluationSummary> rows = result.summary_rows();
    return summary_csv(rows, result.agent_names);
}

void write_result(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());

    {
        std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write summary.csv in '" + out_dir + "'");
        out << result_summary_csv(result);
    }

    for (const CellResult& cell : result.cells) {
        const std::string label = cell.cell.file_label();
        std::vector<ScoredList> lists;
        for (const FoldRun& fr : cell.folds) {
            for (const RunRecord& r : fr.records) lists.push_back(r.delivered);
        }
        write_delivered_lists((fs::path(out_dir) / ("delivered_" + label + ".csv")).string(),
                              lists);

        std::ofstream rec(fs::path(out_dir) / ("records_" + label + ".csv"),
                          std::ios::binary | std::ios::trunc);
        if (!rec) throw DataError("cannot write records for '" + label + "'");
        rec << "tick,user_id,allocation_kind,agent,alloc_weight,fairness\n";
        for (const FoldRun& fr : cell.folds) {
            for (const RunRecord& r : fr.records) {
                for (std::size_t a = 0; a < result.agent_names.size(); ++a) {
                    double weight = 0.0;
                    for (const auto& [name, w] : r.allocation_weights) {
                        if (name == result.agent_names[a]) {
                            weight = w;
                            break;
                        }
                    }
                    rec << r.tick << ',' << r.user_id << ',' << allocation_kind_name(r.allocation_kind)
                        << ',' << result.agent_names[a] << ',' << format_double(weight) << ','
                        << format_double(r.fairness_at_decision[a]) << '\n';
                }
            }
        }
    }

    if (!result.warnings.empty()) {
        std::ofstream warn(fs::path(out_dir) / "warnings.txt", std::ios::binary | std::ios::trunc);
        for (const std::string& w : result.warnings) warn << w << '\n';
    }
}

}  // namespace fairsim
