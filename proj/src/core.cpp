#include "fairsim/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace fairsim {

namespace {

int lookup(const std::vector<std::pair<std::string, int>>& table, const std::string& key) {
    auto it = std::lower_bound(table.begin(), table.end(), key,
                               [](const auto& p, const std::string& k) { return p.first < k; });
    if (it == table.end() || it->first != key) return -1;
    return it->second;
}

}  // namespace

FeatureCatalog FeatureCatalog::from_items(std::vector<Item> items) {
    FeatureCatalog cat;
    cat.items_ = std::move(items);
    cat.item_lookup_.reserve(cat.items_.size());
    for (std::size_t i = 0; i < cat.items_.size(); ++i) {
        cat.item_lookup_.emplace_back(cat.items_[i].id, static_cast<int>(i));
    }
    std::sort(cat.item_lookup_.begin(), cat.item_lookup_.end());
    for (std::size_t i = 1; i < cat.item_lookup_.size(); ++i) {
        if (cat.item_lookup_[i].first == cat.item_lookup_[i - 1].first) {
            throw ValidationError("duplicate item_id in catalog: " + cat.item_lookup_[i].first);
        }
    }

    // Intern tags in first-seen order.
    for (const Item& item : cat.items_) {
        for (const std::string& tag : item.features) {
            if (lookup(cat.tag_lookup_, tag) < 0) {
                cat.tag_lookup_.emplace_back(tag, static_cast<int>(cat.tags_.size()));
                std::sort(cat.tag_lookup_.begin(), cat.tag_lookup_.end());
                cat.tags_.push_back(tag);
            }
        }
    }
    cat.tag_counts_.assign(cat.tags_.size(), 0);
    cat.item_tags_.resize(cat.items_.size());
    for (std::size_t i = 0; i < cat.items_.size(); ++i) {
        std::vector<std::uint32_t>& tags = cat.item_tags_[i];
        for (const std::string& tag : cat.items_[i].features) {
            tags.push_back(static_cast<std::uint32_t>(lookup(cat.tag_lookup_, tag)));
        }
        std::sort(tags.begin(), tags.end());
        tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
        for (std::uint32_t t : tags) cat.tag_counts_[t]++;
    }
    return cat;
}

bool FeatureCatalog::has_item(const std::string& item_id) const {
    return lookup(item_lookup_, item_id) >= 0;
}

bool FeatureCatalog::has_feature(const std::string& tag) const {
    return lookup(tag_lookup_, tag) >= 0;
}

std::size_t FeatureCatalog::protected_count(const std::string& tag) const {
    int idx = lookup(tag_lookup_, tag);
    return idx < 0 ? 0 : tag_counts_[static_cast<std::size_t>(idx)];
}

std::size_t FeatureCatalog::unprotected_count(const std::string& tag) const {
    int idx = lookup(tag_lookup_, tag);
    if (idx < 0) return items_.size();
    return items_.size() - tag_counts_[static_cast<std::size_t>(idx)];
}

bool FeatureCatalog::item_has_feature(const std::string& item_id, const std::string& tag) const {
    return item_has(item_index(item_id), feature_index(tag));
}

int FeatureCatalog::feature_index(const std::string& tag) const {
    return lookup(tag_lookup_, tag);
}

int FeatureCatalog::item_index(const std::string& item_id) const {
    return lookup(item_lookup_, item_id);
}

bool FeatureCatalog::item_has(int item_idx, int tag_idx) const {
    if (item_idx < 0 || tag_idx < 0) return false;
    const auto& tags = item_tags_[static_cast<std::size_t>(item_idx)];
    return std::binary_search(tags.begin(), tags.end(), static_cast<std::uint32_t>(tag_idx));
}

void ScoredList::check_no_duplicates(const std::vector<ScoredEntry>& entries) {
    std::unordered_set<std::string> seen;
    seen.reserve(entries.size());
    for (const ScoredEntry& e : entries) {
        if (!seen.insert(e.item_id).second) {
            throw ValidationError("duplicate item in scored list: " + e.item_id);
        }
    }
}

ScoredList ScoredList::from_scores(std::string user_id, std::uint64_t produced_at,
                                   std::vector<ScoredEntry> entries) {
    check_no_duplicates(entries);
    std::sort(entries.begin(), entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    });
    return ScoredList(std::move(user_id), produced_at, std::move(entries));
}

ScoredList ScoredList::from_ordered(std::string user_id, std::uint64_t produced_at,
                                    std::vector<ScoredEntry> entries) {
    check_no_duplicates(entries);
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].score > entries[i - 1].score) {
            throw ValidationError("scored list entries not in descending score order at item " +
                                  entries[i].item_id);
        }
    }
    return ScoredList(std::move(user_id), produced_at, std::move(entries));
}

ScoredList ScoredList::top(std::size_t n) const {
    if (n >= entries_.size()) return *this;
    std::vector<ScoredEntry> head(entries_.begin(), entries_.begin() + static_cast<long>(n));
    return ScoredList(user_id_, produced_at_, std::move(head));
}

HistoryWindow::HistoryWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ValidationError("history window capacity must be positive");
}

void HistoryWindow::append(ScoredList list) {
    if (!buffer_.empty() && list.produced_at() <= buffer_.back().produced_at()) {
        throw ValidationError("history window appends must carry increasing ticks");
    }
    buffer_.push_back(std::move(list));
    if (buffer_.size() > capacity_) buffer_.erase(buffer_.begin());
}

}  // namespace fairsim
