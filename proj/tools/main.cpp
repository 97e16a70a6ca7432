// fairsim command line: run / sweep / synth / eval over a config file.
// Talks to the engine exclusively through the C API in fairsim.h.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fairsim.h"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int folds = 0;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory (default: out)");
    cmd->add_option("--seed", opts.seed, "override run.seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--folds", opts.folds, "override run.folds");
    cmd->add_option("--threads", opts.threads, "override run.threads");
}

int die(const std::string& context) {
    std::fprintf(stderr, "error: %s: %s\n", context.c_str(), fairsim_last_error());
    return 1;
}

fairsim_config* open_config(const CommonOptions& opts) {
    fairsim_config* cfg = nullptr;
    if (fairsim_config_open(opts.config_path.c_str(), &cfg) != FAIRSIM_OK) return nullptr;
    auto set = [&](const char* key, const std::string& value) {
        if (fairsim_config_set(cfg, key, value.c_str()) != FAIRSIM_OK) {
            fairsim_config_free(cfg);
            cfg = nullptr;
            return false;
        }
        return true;
    };
    if (opts.seed_set && !set("run.seed", std::to_string(opts.seed))) return nullptr;
    if (opts.folds > 0 && !set("run.folds", std::to_string(opts.folds))) return nullptr;
    if (opts.threads > 0 && !set("run.threads", std::to_string(opts.threads))) return nullptr;
    return cfg;
}

int finish(fairsim_result* result, const CommonOptions& opts) {
    if (fairsim_result_write(result, opts.out_dir.c_str()) != FAIRSIM_OK) {
        fairsim_result_free(result);
        return die("writing results");
    }
    std::fputs(fairsim_result_summary(result), stdout);
    if (size_t warnings = fairsim_result_warning_count(result); warnings > 0) {
        std::fprintf(stderr, "%zu warning(s); see %s/warnings.txt\n", warnings,
                     opts.out_dir.c_str());
    }
    fairsim_result_free(result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness-aware re-ranking simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "stream the configured mechanism + baseline");
    add_common(run_cmd, run_opts);

    CommonOptions sweep_opts;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "stream every allocation x choice combination + baseline");
    add_common(sweep_cmd, sweep_opts);

    CommonOptions synth_opts;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "write the config's synthetic dataset as CSV files");
    add_common(synth_cmd, synth_opts);

    CommonOptions eval_opts;
    std::string lists_path;
    bool as_baseline = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a delivered-lists file offline");
    add_common(eval_cmd, eval_opts);
    eval_cmd->add_option("--lists", lists_path, "delivered-lists CSV to score")->required();
    eval_cmd->add_flag("--baseline", as_baseline, "label the rows as the no-agent baseline");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        fairsim_config* cfg = open_config(run_opts);
        if (cfg == nullptr) return die("loading config");
        fairsim_result* result = nullptr;
        if (fairsim_run(cfg, &result) != FAIRSIM_OK) {
            fairsim_config_free(cfg);
            return die("run");
        }
        fairsim_config_free(cfg);
        return finish(result, run_opts);
    }
    if (sweep_cmd->parsed()) {
        fairsim_config* cfg = open_config(sweep_opts);
        if (cfg == nullptr) return die("loading config");
        fairsim_result* result = nullptr;
        if (fairsim_sweep(cfg, &result) != FAIRSIM_OK) {
            fairsim_config_free(cfg);
            return die("sweep");
        }
        fairsim_config_free(cfg);
        return finish(result, sweep_opts);
    }
    if (synth_cmd->parsed()) {
        fairsim_config* cfg = open_config(synth_opts);
        if (cfg == nullptr) return die("loading config");
        const fairsim_status status = fairsim_synthesize(cfg, synth_opts.out_dir.c_str());
        fairsim_config_free(cfg);
        if (status != FAIRSIM_OK) return die("synth");
        std::printf("wrote ratings.csv, features.csv, candidates.csv to %s\n",
                    synth_opts.out_dir.c_str());
        return 0;
    }
    // eval
    fairsim_config* cfg = open_config(eval_opts);
    if (cfg == nullptr) return die("loading config");
    fairsim_result* result = nullptr;
    if (fairsim_evaluate(cfg, lists_path.c_str(), as_baseline ? 1 : 0, &result) != FAIRSIM_OK) {
        fairsim_config_free(cfg);
        return die("eval");
    }
    fairsim_config_free(cfg);
    return finish(result, eval_opts);
}
