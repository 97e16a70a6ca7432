#include "fairsim/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairsim/rng.hpp"

namespace fairsim {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& what) {
    throw DataError(path + ": row " + std::to_string(row) + ": " + what);
}

double parse_double_field(const std::string& path, std::size_t row, const std::string& field) {
    double out = 0.0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    if (ec != std::errc{} || ptr != end) row_error(path, row, "bad number '" + field + "'");
    return out;
}

std::uint64_t parse_u64_field(const std::string& path, std::size_t row, const std::string& field) {
    std::uint64_t out = 0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    if (ec != std::errc{} || ptr != end) row_error(path, row, "bad integer '" + field + "'");
    return out;
}

class CsvReader {
public:
    CsvReader(const std::string& path, const std::string& expected_header) : path_(path) {
        in_.open(path, std::ios::binary);
        if (!in_) throw DataError("cannot open '" + path + "'");
        std::string header;
        if (!std::getline(in_, header)) throw DataError(path + ": empty file");
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected_header) {
            throw DataError(path + ": expected header '" + expected_header + "', got '" + header +
                            "'");
        }
        row_ = 1;
    }

    bool next(std::vector<std::string>& fields, std::size_t expected_fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++row_;
            if (line.empty() || line == "\r") continue;
            fields = split_csv_row(line);
            if (fields.size() != expected_fields) {
                row_error(path_, row_,
                          "expected " + std::to_string(expected_fields) + " fields, got " +
                              std::to_string(fields.size()));
            }
            return true;
        }
        return false;
    }

    std::size_t row() const { return row_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t row_ = 0;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void sort_candidates(std::vector<ScoredEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    });
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

std::string padded_id(const char* prefix, std::size_t index, std::size_t count) {
    std::size_t width = 1;
    for (std::size_t c = count; c >= 10; c /= 10) ++width;
    std::string digits = std::to_string(index);
    std::string out(prefix);
    out.append(width > digits.size() ? width - digits.size() : 0, '0');
    out += digits;
    return out;
}

}  // namespace

DatasetBundle load_bundle(const DataConfig& data) {
    DatasetBundle bundle;

    // Feature file defines the item inventory. An empty feature_tag declares
    // an item without tags.
    {
        CsvReader reader(data.features_path, "item_id,feature_tag");
        std::vector<std::string> fields;
        std::vector<Item> items;
        std::unordered_map<std::string, std::size_t> index;
        while (reader.next(fields, 2)) {
            const std::string& item_id = fields[0];
            const std::string& tag = fields[1];
            if (item_id.empty()) row_error(reader.path(), reader.row(), "empty item_id");
            auto [it, inserted] = index.try_emplace(item_id, items.size());
            if (inserted) items.push_back(Item{item_id, {}});
            if (!tag.empty()) items[it->second].features.push_back(tag);
        }
        bundle.catalog = FeatureCatalog::from_items(std::move(items));
    }

    {
        CsvReader reader(data.ratings_path, "user_id,item_id,rating");
        std::vector<std::string> fields;
        std::unordered_set<std::string> seen;
        while (reader.next(fields, 3)) {
            if (fields[0].empty()) row_error(reader.path(), reader.row(), "empty user_id");
            if (!bundle.catalog.has_item(fields[1])) {
                row_error(reader.path(), reader.row(),
                          "unknown item '" + fields[1] + "' (not in the features file)");
            }
            if (!seen.insert(fields[0] + "\x1f" + fields[1]).second) {
                row_error(reader.path(), reader.row(),
                          "duplicate rating for (" + fields[0] + ", " + fields[1] + ")");
            }
            bundle.ratings.push_back(
                Rating{fields[0], fields[1], parse_double_field(reader.path(), reader.row(), fields[2])});
        }
    }

    {
        CsvReader reader(data.candidates_path, "user_id,item_id,score");
        std::vector<std::string> fields;
        std::unordered_set<std::string> seen;
        while (reader.next(fields, 3)) {
            if (fields[0].empty()) row_error(reader.path(), reader.row(), "empty user_id");
            if (!bundle.catalog.has_item(fields[1])) {
                row_error(reader.path(), reader.row(),
                          "unknown item '" + fields[1] + "' (not in the features file)");
            }
            if (!seen.insert(fields[0] + "\x1f" + fields[1]).second) {
                row_error(reader.path(), reader.row(),
                          "duplicate candidate (" + fields[0] + ", " + fields[1] + ")");
            }
            bundle.candidates[fields[0]].push_back(
                ScoredEntry{fields[1], parse_double_field(reader.path(), reader.row(), fields[2])});
        }
        for (auto& [user, entries] : bundle.candidates) sort_candidates(entries);
    }

    std::unordered_set<std::string> users;
    for (const Rating& r : bundle.ratings) users.insert(r.user_id);
    bundle.rating_users.assign(users.begin(), users.end());
    std::sort(bundle.rating_users.begin(), bundle.rating_users.end());
    return bundle;
}

void validate_bundle_for_agents(const DatasetBundle& bundle, std::span<const AgentSpec> agents) {
    for (const AgentSpec& agent : agents) {
        if (!bundle.catalog.has_feature(agent.feature)) {
            throw DataError("agent '" + agent.name + "': feature '" + agent.feature +
                            "' does not appear in the catalog");
        }
        if (bundle.catalog.protected_count(agent.feature) == 0 ||
            bundle.catalog.unprotected_count(agent.feature) == 0) {
            throw DataError("agent '" + agent.name + "': feature '" + agent.feature +
                            "' needs at least one protected and one unprotected item");
        }
    }
    if (!agents.empty() && bundle.ratings.empty()) {
        throw DataError("agents are configured but the rating set is empty");
    }
}

FoldSplit make_fold(const DatasetBundle& bundle, int folds, int fold_index, std::uint64_t seed,
                    const LikeRule& like_rule) {
    if (folds < 1) throw ValidationError("folds must be >= 1");
    if (fold_index < 0 || fold_index >= folds) throw ValidationError("fold index out of range");

    // Group ratings per user, ordered by item so the split is independent of
    // file row order.
    std::unordered_map<std::string, std::vector<const Rating*>> by_user;
    for (const Rating& r : bundle.ratings) by_user[r.user_id].push_back(&r);

    FoldSplit split;
    for (const std::string& user : bundle.rating_users) {
        auto& rated = by_user[user];
        std::sort(rated.begin(), rated.end(),
                  [](const Rating* a, const Rating* b) { return a->item_id < b->item_id; });
        if (folds == 1) {
            split.test_users.push_back(user);
            auto& liked = split.test_liked[user];
            for (const Rating* r : rated) {
                split.train.push_back(*r);
                if (like_rule.liked(r->value)) liked.insert(r->item_id);
            }
            continue;
        }
        const std::uint64_t offset = splitmix64(fnv1a(user) ^ seed) % static_cast<std::uint64_t>(folds);
        bool has_test = false;
        for (std::size_t j = 0; j < rated.size(); ++j) {
            const int assigned =
                static_cast<int>((offset + j) % static_cast<std::uint64_t>(folds));
            if (assigned == fold_index) {
                has_test = true;
                if (like_rule.liked(rated[j]->value)) split.test_liked[user].insert(rated[j]->item_id);
            } else {
                split.train.push_back(*rated[j]);
            }
        }
        if (has_test) split.test_users.push_back(user);
    }
    return split;
}

DatasetBundle generate_synthetic(const SyntheticSpec& spec) {
    RandomStream rng(spec.seed);
    const std::size_t n_tags = spec.feature_prevalence.size();

    std::vector<Item> items;
    std::vector<double> quality(spec.items);
    std::vector<std::vector<std::size_t>> item_tags(spec.items);
    items.reserve(spec.items);
    for (std::size_t i = 0; i < spec.items; ++i) {
        Item item;
        item.id = padded_id("i", i, spec.items);
        for (std::size_t t = 0; t < n_tags; ++t) {
            if (rng.next_double() < spec.feature_prevalence[t].second) {
                item.features.push_back(spec.feature_prevalence[t].first);
                item_tags[i].push_back(t);
            }
        }
        quality[i] = rng.next_double();
        items.push_back(std::move(item));
    }

    std::vector<std::vector<double>> affinity(spec.users, std::vector<double>(n_tags, 0.0));
    std::vector<std::string> user_ids(spec.users);
    for (std::size_t u = 0; u < spec.users; ++u) {
        user_ids[u] = padded_id("u", u, spec.users);
        for (std::size_t t = 0; t < n_tags; ++t) affinity[u][t] = rng.next_double();
    }

    // Like propensity blends the user's affinity for the item's tags with the
    // item's quality; untagged items sit at a neutral affinity.
    auto preference = [&](std::size_t u, std::size_t i) {
        double aff = 0.5;
        if (!item_tags[i].empty()) {
            aff = 0.0;
            for (std::size_t t : item_tags[i]) aff += affinity[u][t];
            aff /= static_cast<double>(item_tags[i].size());
        }
        return 0.75 * aff + 0.25 * quality[i];
    };

    DatasetBundle bundle;
    for (std::size_t u = 0; u < spec.users; ++u) {
        for (std::size_t i = 0; i < spec.items; ++i) {
            if (rng.next_double() >= spec.density) continue;
            const double like_prob = 0.1 + 0.8 * preference(u, i);
            double value;
            if (rng.next_double() < like_prob) {
                value = rng.next_double() < 0.5 ? 4.0 : 5.0;
            } else {
                value = 1.0 + std::floor(rng.next_double() * 3.0);
            }
            bundle.ratings.push_back(Rating{user_ids[u], items[i].id, value});
        }
    }

    // The recommender's view: the true preference plus model noise, with a
    // multiplicative penalty per carried feature so protected items start
    // under-exposed when bias_factor < 1.
    for (std::size_t u = 0; u < spec.users; ++u) {
        std::vector<ScoredEntry>& entries = bundle.candidates[user_ids[u]];
        entries.reserve(spec.items);
        for (std::size_t i = 0; i < spec.items; ++i) {
            double score = preference(u, i) + (rng.next_double() - 0.5) * 0.1;
            score = std::min(1.0, std::max(0.0, score));
            score *= std::pow(spec.bias_factor, static_cast<double>(item_tags[i].size()));
            entries.push_back(ScoredEntry{items[i].id, score});
        }
        sort_candidates(entries);
    }

    bundle.catalog = FeatureCatalog::from_items(std::move(items));
    bundle.rating_users = user_ids;
    // Drop users that ended up with no ratings at all (possible at very low
    // density); they never arrive.
    std::unordered_set<std::string> rated;
    for (const Rating& r : bundle.ratings) rated.insert(r.user_id);
    std::erase_if(bundle.rating_users, [&](const std::string& u) { return !rated.count(u); });
    return bundle;
}

void write_dataset_files(const DatasetBundle& bundle, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out((std::filesystem::path(dir) / "features.csv").string());
        out << "item_id,feature_tag\n";
        for (const Item& item : bundle.catalog.items()) {
            if (item.features.empty()) {
                out << item.id << ",\n";
            } else {
                for (const std::string& tag : item.features) out << item.id << ',' << tag << '\n';
            }
        }
    }
    {
        auto out = open_out((std::filesystem::path(dir) / "ratings.csv").string());
        out << "user_id,item_id,rating\n";
        for (const Rating& r : bundle.ratings) {
            out << r.user_id << ',' << r.item_id << ',' << format_double(r.value) << '\n';
        }
    }
    {
        auto out = open_out((std::filesystem::path(dir) / "candidates.csv").string());
        out << "user_id,item_id,score\n";
        std::vector<std::string> users;
        users.reserve(bundle.candidates.size());
        for (const auto& [user, _] : bundle.candidates) users.push_back(user);
        std::sort(users.begin(), users.end());
        for (const std::string& user : users) {
            for (const ScoredEntry& e : bundle.candidates.at(user)) {
                out << user << ',' << e.item_id << ',' << format_double(e.score) << '\n';
            }
        }
    }
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw ValidationError("cannot format double");
    return std::string(buf, ptr);
}

void write_delivered_lists(const std::string& path, std::span<const ScoredList> lists) {
    auto out = open_out(path);
    out << "tick,user_id,rank,item_id,score\n";
    for (const ScoredList& list : lists) {
        std::size_t rank = 0;
        for (const ScoredEntry& e : list.entries()) {
            out << list.produced_at() << ',' << list.user_id() << ',' << ++rank << ',' << e.item_id
                << ',' << format_double(e.score) << '\n';
        }
    }
}

std::vector<ScoredList> read_delivered_lists(const std::string& path) {
    CsvReader reader(path, "tick,user_id,rank,item_id,score");
    std::vector<ScoredList> lists;
    std::vector<std::string> fields;
    bool have_current = false;
    std::uint64_t current_tick = 0;
    std::string current_user;
    std::vector<ScoredEntry> entries;

    auto flush = [&]() {
        if (!have_current) return;
        lists.push_back(ScoredList::from_ordered(current_user, current_tick, std::move(entries)));
        entries = {};
    };

    while (reader.next(fields, 5)) {
        const std::uint64_t tick = parse_u64_field(reader.path(), reader.row(), fields[0]);
        const std::uint64_t rank = parse_u64_field(reader.path(), reader.row(), fields[2]);
        if (!have_current || tick != current_tick) {
            if (have_current && tick < current_tick) {
                row_error(reader.path(), reader.row(), "ticks must be non-decreasing");
            }
            flush();
            have_current = true;
            current_tick = tick;
            current_user = fields[1];
        } else if (fields[1] != current_user) {
            row_error(reader.path(), reader.row(), "tick " + fields[0] + " has two users");
        }
        if (rank != entries.size() + 1) {
            row_error(reader.path(), reader.row(), "rank out of sequence within tick " + fields[0]);
        }
        entries.push_back(
            ScoredEntry{fields[3], parse_double_field(reader.path(), reader.row(), fields[4])});
    }
    flush();
    return lists;
}

std::string summary_csv(std::span<const EvaluationSummary> rows,
                        std::span<const std::string> agent_names) {
    std::ostringstream out;
    out << "mechanism_allocation,mechanism_choice,fold,ndcg";
    for (const std::string& name : agent_names) out << ",agent_fairness_" << name;
    out << ",l_half\n";
    for (const EvaluationSummary& row : rows) {
        out << row.allocation_label << ',' << row.choice_label << ',' << row.fold_label << ','
            << format_double(row.ndcg);
        for (double f : row.agent_fairness) out << ',' << format_double(f);
        out << ',';
        if (row.has_agents) out << format_double(row.l_half);
        out << '\n';
    }
    return out.str();
}

}  // namespace fairsim
