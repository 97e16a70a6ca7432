#include "fairsim.h"

#include <filesystem>
#include <string>

#include "fairsim/config.hpp"
#include "fairsim/data_io.hpp"
#include "fairsim/simulator.hpp"

struct fairsim_config {
    fairsim::ExperimentConfig cfg;
};

struct fairsim_result {
    fairsim::ExperimentResult result;
    std::string summary;
};

namespace {

thread_local std::string tl_last_error;

fairsim_status fail(fairsim_status status, const std::string& message) {
    tl_last_error = message;
    return status;
}

template <class Fn>
fairsim_status guarded(Fn&& fn) {
    try {
        fn();
        tl_last_error.clear();
        return FAIRSIM_OK;
    } catch (const fairsim::ConfigError& e) {
        return fail(FAIRSIM_ERR_CONFIG, e.what());
    } catch (const fairsim::DataError& e) {
        return fail(FAIRSIM_ERR_DATA, e.what());
    } catch (const fairsim::ValidationError& e) {
        return fail(FAIRSIM_ERR_DATA, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(FAIRSIM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(FAIRSIM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(FAIRSIM_ERR_INTERNAL, "unknown error");
    }
}

fairsim_result* make_result(fairsim::ExperimentResult&& res) {
    auto* handle = new fairsim_result{std::move(res), {}};
    handle->summary = fairsim::result_summary_csv(handle->result);
    return handle;
}

}  // namespace

extern "C" {

const char* fairsim_version(void) { return "1.0.0"; }

const char* fairsim_last_error(void) { return tl_last_error.c_str(); }

fairsim_status fairsim_config_open(const char* path, fairsim_config** out_config) {
    if (path == nullptr || out_config == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_config_open");
    }
    *out_config = nullptr;
    return guarded([&]() {
        auto cfg = fairsim::load_config(path);
        fairsim::validate_config(cfg);
        *out_config = new fairsim_config{std::move(cfg)};
    });
}

fairsim_status fairsim_config_set(fairsim_config* config, const char* key, const char* value) {
    if (config == nullptr || key == nullptr || value == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_config_set");
    }
    return guarded([&]() {
        fairsim::apply_override(config->cfg, key, value);
        fairsim::validate_config(config->cfg);
    });
}

void fairsim_config_free(fairsim_config* config) { delete config; }

fairsim_status fairsim_run(const fairsim_config* config, fairsim_result** out_result) {
    if (config == nullptr || out_result == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_run");
    }
    *out_result = nullptr;
    return guarded([&]() {
        auto bundle = fairsim::prepare_bundle(config->cfg);
        *out_result = make_result(fairsim::run_experiment(config->cfg, bundle));
    });
}

fairsim_status fairsim_sweep(const fairsim_config* config, fairsim_result** out_result) {
    if (config == nullptr || out_result == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_sweep");
    }
    *out_result = nullptr;
    return guarded([&]() {
        auto bundle = fairsim::prepare_bundle(config->cfg);
        *out_result = make_result(fairsim::run_sweep(config->cfg, bundle));
    });
}

fairsim_status fairsim_evaluate(const fairsim_config* config, const char* lists_path,
                                int as_baseline, fairsim_result** out_result) {
    if (config == nullptr || lists_path == nullptr || out_result == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_evaluate");
    }
    *out_result = nullptr;
    return guarded([&]() {
        auto bundle = fairsim::prepare_bundle(config->cfg);
        *out_result = make_result(
            fairsim::evaluate_lists(config->cfg, bundle, lists_path, as_baseline != 0));
    });
}

fairsim_status fairsim_synthesize(const fairsim_config* config, const char* out_dir) {
    if (config == nullptr || out_dir == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_synthesize");
    }
    return guarded([&]() {
        if (!config->cfg.has_synthetic) {
            throw fairsim::ConfigError("fairsim_synthesize needs a [synthetic] section");
        }
        fairsim::SyntheticSpec spec = config->cfg.synthetic;
        if (spec.seed == 0) spec.seed = config->cfg.run.seed;
        auto bundle = fairsim::generate_synthetic(spec);
        fairsim::write_dataset_files(bundle, out_dir);
    });
}

const char* fairsim_result_summary(const fairsim_result* result) {
    return result == nullptr ? "" : result->summary.c_str();
}

size_t fairsim_result_cell_count(const fairsim_result* result) {
    return result == nullptr ? 0 : result->result.cells.size();
}

size_t fairsim_result_warning_count(const fairsim_result* result) {
    return result == nullptr ? 0 : result->result.warnings.size();
}

fairsim_status fairsim_result_write(const fairsim_result* result, const char* out_dir) {
    if (result == nullptr || out_dir == nullptr) {
        return fail(FAIRSIM_ERR_INVALID_ARGUMENT, "null argument to fairsim_result_write");
    }
    return guarded([&]() { fairsim::write_result(result->result, out_dir); });
}

void fairsim_result_free(fairsim_result* result) { delete result; }

}  // extern "C"
