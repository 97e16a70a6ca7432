#include "fairsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fairsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value +
                          "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

void set_data_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "source") {
        if (value == "files") {
            cfg.data.source = DataSource::Files;
        } else if (value == "synthetic") {
            cfg.data.source = DataSource::Synthetic;
        } else {
            throw ConfigError("key 'data.source': expected files or synthetic, got '" + value +
                              "'");
        }
    } else if (key == "ratings") {
        cfg.data.ratings_path = value;
    } else if (key == "features") {
        cfg.data.features_path = value;
    } else if (key == "candidates") {
        cfg.data.candidates_path = value;
    } else if (key == "like_rule") {
        if (value == "threshold") {
            cfg.data.like_rule.kind = LikeRule::Kind::Threshold;
        } else if (value == "all") {
            cfg.data.like_rule.kind = LikeRule::Kind::AllLiked;
        } else {
            throw ConfigError("key 'data.like_rule': expected threshold or all, got '" + value +
                              "'");
        }
    } else if (key == "like_threshold") {
        cfg.data.like_rule.threshold = parse_double("data.like_threshold", value);
    } else if (key == "pbar_mode") {
        if (value == "user_mean") {
            cfg.data.pbar_mode = PbarMode::UserMean;
        } else if (value == "catalog_share") {
            cfg.data.pbar_mode = PbarMode::CatalogShare;
        } else {
            throw ConfigError("key 'data.pbar_mode': expected user_mean or catalog_share, got '" +
                              value + "'");
        }
    } else {
        throw ConfigError("unknown key 'data." + key + "'");
    }
}

void set_synthetic_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    cfg.has_synthetic = true;
    if (key == "users") {
        cfg.synthetic.users = parse_u64("synthetic.users", value);
    } else if (key == "items") {
        cfg.synthetic.items = parse_u64("synthetic.items", value);
    } else if (key == "density") {
        cfg.synthetic.density = parse_double("synthetic.density", value);
    } else if (key == "bias_factor") {
        cfg.synthetic.bias_factor = parse_double("synthetic.bias_factor", value);
    } else if (key == "seed") {
        cfg.synthetic.seed = parse_u64("synthetic.seed", value);
    } else if (key.rfind("feature.", 0) == 0) {
        const std::string tag = key.substr(8);
        if (tag.empty()) throw ConfigError("key 'synthetic.feature.': empty feature tag");
        for (auto& [existing, _] : cfg.synthetic.feature_prevalence) {
            if (existing == tag) {
                throw ConfigError("key 'synthetic." + key + "' given twice");
            }
        }
        cfg.synthetic.feature_prevalence.emplace_back(tag,
                                                      parse_double("synthetic." + key, value));
    } else {
        throw ConfigError("unknown key 'synthetic." + key + "'");
    }
}

void set_allocation_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "mechanism") {
        cfg.allocation.mechanism = allocation_mechanism_from_name(value);
    } else if (key == "alpha") {
        cfg.allocation.unfairness_power = parse_int("allocation.alpha", value);
    } else if (key == "beta") {
        cfg.allocation.compatibility_power = parse_int("allocation.beta", value);
    } else {
        throw ConfigError("unknown key 'allocation." + key + "'");
    }
}

void set_choice_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "rule") {
        cfg.choice.rule = choice_rule_from_name(value);
    } else if (key == "recommender_weight") {
        cfg.choice.recommender_weight = parse_double("choice.recommender_weight", value);
    } else if (key == "delta") {
        cfg.choice.delta = parse_double("choice.delta", value);
    } else if (key == "agent_weight_mode") {
        if (value == "shared") {
            cfg.choice.agent_weight_mode = AgentWeightMode::Shared;
        } else if (value == "per_agent") {
            cfg.choice.agent_weight_mode = AgentWeightMode::PerAgent;
        } else {
            throw ConfigError(
                "key 'choice.agent_weight_mode': expected shared or per_agent, got '" + value +
                "'");
        }
    } else if (key == "normalize_scores") {
        cfg.choice.normalize_scores = parse_bool("choice.normalize_scores", value);
    } else {
        throw ConfigError("unknown key 'choice." + key + "'");
    }
}

void set_run_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "k") {
        cfg.run.candidate_pool = parse_u64("run.k", value);
    } else if (key == "n") {
        cfg.run.list_length = parse_u64("run.n", value);
    } else if (key == "window") {
        cfg.run.window = parse_u64("run.window", value);
    } else if (key == "folds") {
        cfg.run.folds = parse_int("run.folds", value);
    } else if (key == "seed") {
        cfg.run.seed = parse_u64("run.seed", value);
    } else if (key == "threads") {
        cfg.run.threads = parse_int("run.threads", value);
    } else {
        throw ConfigError("unknown key 'run." + key + "'");
    }
}

void set_agent_key(ExperimentConfig& cfg, const std::string& agent_name, const std::string& key,
                   const std::string& value) {
    AgentSpec* spec = nullptr;
    for (AgentSpec& a : cfg.agents) {
        if (a.name == agent_name) {
            spec = &a;
            break;
        }
    }
    if (spec == nullptr) {
        cfg.agents.push_back(AgentSpec{agent_name, "", MetricKind::GPF, 0.0});
        spec = &cfg.agents.back();
    }
    if (key == "feature") {
        spec->feature = value;
    } else if (key == "metric") {
        spec->metric = metric_kind_from_name(value);
    } else if (key == "target") {
        spec->target = parse_double("agents." + agent_name + ".target", value);
    } else {
        throw ConfigError("unknown key 'agents." + agent_name + "." + key + "'");
    }
}

void set_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
    if (section == "data") {
        set_data_key(cfg, key, value);
    } else if (section == "synthetic") {
        set_synthetic_key(cfg, key, value);
    } else if (section == "allocation") {
        set_allocation_key(cfg, key, value);
    } else if (section == "choice") {
        set_choice_key(cfg, key, value);
    } else if (section == "run") {
        set_run_key(cfg, key, value);
    } else if (section.rfind("agents.", 0) == 0) {
        const std::string agent_name = section.substr(7);
        if (agent_name.empty()) throw ConfigError("agent section needs a name: [agents.<name>]");
        set_agent_key(cfg, agent_name, key, value);
    } else {
        throw ConfigError("unknown config section '[" + section + "]'");
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            }
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                              "' outside any section");
        }
        try {
            set_key(cfg, section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_override(ExperimentConfig& config, const std::string& dotted_key,
                    const std::string& value) {
    const std::size_t dot = dotted_key.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size()) {
        throw ConfigError("override key must look like section.key, got '" + dotted_key + "'");
    }
    const std::string section = dotted_key.substr(0, dot);
    const std::string key = dotted_key.substr(dot + 1);
    if (section.rfind("agents", 0) == 0) {
        throw ConfigError("agent definitions cannot be overridden from the command line");
    }
    // synthetic.feature.<tag> carries a dot inside the key.
    if (section == "synthetic.feature") {
        set_key(config, "synthetic", "feature." + key, value);
        return;
    }
    set_key(config, section, key, value);
}

void validate_config(const ExperimentConfig& config) {
    const RunParams& run = config.run;
    if (run.list_length == 0) throw ConfigError("run.n must be >= 1");
    if (run.candidate_pool < run.list_length) throw ConfigError("run.k must be >= run.n");
    if (run.window == 0) throw ConfigError("run.window must be >= 1");
    if (run.folds < 1) throw ConfigError("run.folds must be >= 1");
    if (run.threads < 1) throw ConfigError("run.threads must be >= 1");

    if (config.allocation.unfairness_power < 1) throw ConfigError("allocation.alpha must be >= 1");
    if (config.allocation.compatibility_power < 1) {
        throw ConfigError("allocation.beta must be >= 1");
    }

    const ChoiceConfig& choice = config.choice;
    if (choice.recommender_weight <= 0.0 || choice.recommender_weight >= 1.0) {
        throw ConfigError("choice.recommender_weight must lie in (0,1)");
    }
    if (choice.delta < 0.0) throw ConfigError("choice.delta must be >= 0");

    for (const AgentSpec& agent : config.agents) {
        const std::string prefix = "agents." + agent.name;
        if (agent.feature.empty()) throw ConfigError(prefix + ".feature is required");
        if (agent.target <= 0.0 || agent.target > 1.0) {
            throw ConfigError(prefix + ".target must lie in (0,1]");
        }
    }

    if (config.data.source == DataSource::Files) {
        if (config.data.ratings_path.empty()) throw ConfigError("data.ratings is required");
        if (config.data.features_path.empty()) throw ConfigError("data.features is required");
        if (config.data.candidates_path.empty()) throw ConfigError("data.candidates is required");
    } else {
        if (!config.has_synthetic) {
            throw ConfigError("data.source = synthetic needs a [synthetic] section");
        }
        const SyntheticSpec& synth = config.synthetic;
        if (synth.users == 0) throw ConfigError("synthetic.users must be >= 1");
        if (synth.items == 0) throw ConfigError("synthetic.items must be >= 1");
        if (synth.density <= 0.0 || synth.density > 1.0) {
            throw ConfigError("synthetic.density must lie in (0,1]");
        }
        if (synth.bias_factor <= 0.0 || synth.bias_factor > 1.0) {
            throw ConfigError("synthetic.bias_factor must lie in (0,1]");
        }
        for (const auto& [tag, prevalence] : synth.feature_prevalence) {
            if (prevalence <= 0.0 || prevalence >= 1.0) {
                throw ConfigError("synthetic.feature." + tag + " must lie in (0,1)");
            }
        }
    }
}

}  // namespace fairsim
