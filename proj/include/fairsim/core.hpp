#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairsim {

// Error categories surfaced through the C API as status codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Item {
    std::string id;
    std::vector<std::string> features;
};

struct Rating {
    std::string user_id;
    std::string item_id;
    double value = 0.0;
};

struct ScoredEntry {
    std::string item_id;
    double score = 0.0;
};

/// Immutable catalog of items and their feature tags. Tags and items are
/// interned so membership checks in the metric loops are index lookups.
class FeatureCatalog {
public:
    FeatureCatalog() = default;
    static FeatureCatalog from_items(std::vector<Item> items);

    std::size_t item_count() const { return items_.size(); }
    std::size_t feature_count() const { return tags_.size(); }
    const std::vector<Item>& items() const { return items_; }
    const std::vector<std::string>& feature_tags() const { return tags_; }

    bool has_item(const std::string& item_id) const;
    bool has_feature(const std::string& tag) const;

    // Counts of items carrying / not carrying the tag. Unknown tag counts as 0.
    std::size_t protected_count(const std::string& tag) const;
    std::size_t unprotected_count(const std::string& tag) const;

    bool item_has_feature(const std::string& item_id, const std::string& tag) const;

    // Index-based fast path; -1 when unknown.
    int feature_index(const std::string& tag) const;
    int item_index(const std::string& item_id) const;
    bool item_has(int item_idx, int tag_idx) const;

private:
    std::vector<Item> items_;
    std::vector<std::string> tags_;
    std::vector<std::vector<std::uint32_t>> item_tags_;  // sorted tag indices per item
    std::vector<std::size_t> tag_counts_;
    std::vector<std::pair<std::string, int>> item_lookup_;  // sorted by id
    std::vector<std::pair<std::string, int>> tag_lookup_;   // sorted by tag
};

/// A recommendation list for one user, ordered best-first.
/// Scores are non-increasing; construction rejects duplicate items.
class ScoredList {
public:
    ScoredList() = default;

    // Sorts by score descending, ties by ascending item_id.
    static ScoredList from_scores(std::string user_id, std::uint64_t produced_at,
                                  std::vector<ScoredEntry> entries);
    // Accepts caller-resolved order (choice mechanisms break ties by
    // recommender order); verifies scores are non-increasing.
    static ScoredList from_ordered(std::string user_id, std::uint64_t produced_at,
                                   std::vector<ScoredEntry> entries);

    const std::string& user_id() const { return user_id_; }
    std::uint64_t produced_at() const { return produced_at_; }
    const std::vector<ScoredEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    ScoredList top(std::size_t n) const;

private:
    ScoredList(std::string user_id, std::uint64_t produced_at, std::vector<ScoredEntry> entries)
        : user_id_(std::move(user_id)), produced_at_(produced_at), entries_(std::move(entries)) {}
    static void check_no_duplicates(const std::vector<ScoredEntry>& entries);

    std::string user_id_;
    std::uint64_t produced_at_ = 0;
    std::vector<ScoredEntry> entries_;
};

/// FIFO of the last W delivered lists. Single writer; appends must carry a
/// strictly increasing tick.
class HistoryWindow {
public:
    explicit HistoryWindow(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return buffer_.size(); }
    bool empty() const { return buffer_.empty(); }

    // Oldest list evicted when the window is full.
    void append(ScoredList list);

    // Buffer contents, oldest first.
    std::span<const ScoredList> view() const { return buffer_; }

private:
    std::size_t capacity_;
    std::vector<ScoredList> buffer_;
};

}  // namespace fairsim
