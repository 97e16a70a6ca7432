// Small builders shared by the test suites.
#pragma once

#include <string>
#include <vector>

#include "fairsim/core.hpp"

namespace testutil {

// Catalog from "A*" style specs: a trailing '*' marks the item as carrying
// the single feature "f".
inline fairsim::FeatureCatalog starred_catalog(const std::vector<std::string>& specs) {
    std::vector<fairsim::Item> items;
    for (const std::string& spec : specs) {
        if (!spec.empty() && spec.back() == '*') {
            items.push_back({spec.substr(0, spec.size() - 1), {"f"}});
        } else {
            items.push_back({spec, {}});
        }
    }
    return fairsim::FeatureCatalog::from_items(std::move(items));
}

// List whose entries follow the given order with strictly decreasing scores.
inline fairsim::ScoredList ordered_list(const std::vector<std::string>& item_ids,
                                        std::uint64_t tick = 0,
                                        const std::string& user = "u") {
    std::vector<fairsim::ScoredEntry> entries;
    double score = static_cast<double>(item_ids.size());
    for (const std::string& id : item_ids) entries.push_back({id, score--});
    return fairsim::ScoredList::from_ordered(user, tick, std::move(entries));
}

inline std::vector<std::string> item_ids(const fairsim::ScoredList& list) {
    std::vector<std::string> ids;
    for (const auto& e : list.entries()) ids.push_back(e.item_id);
    return ids;
}

inline std::vector<std::string> item_ids(const std::vector<fairsim::ScoredEntry>& entries) {
    std::vector<std::string> ids;
    for (const auto& e : entries) ids.push_back(e.item_id);
    return ids;
}

}  // namespace testutil
