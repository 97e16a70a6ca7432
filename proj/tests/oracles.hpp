// Brute-force voting oracles, independent of the library's aggregation code.
// Both work directly on (ranking, weight) ballots with naive loops and rank
// lookups; they exist to cross-check borda_aggregate and copeland_aggregate.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace oracle {

struct Ballot {
    std::vector<std::string> ranking;  // best first
    double weight = 0.0;
};

inline std::size_t rank_of(const Ballot& ballot, const std::string& item) {
    for (std::size_t i = 0; i < ballot.ranking.size(); ++i) {
        if (ballot.ranking[i] == item) return i;
    }
    return ballot.ranking.size();
}

// Positional tally: an item in position p earns (m-1-p) per ballot, scaled by
// the ballot weight. Output is ordered best-first, ties broken by the order
// of `candidates` (the recommender order).
inline std::vector<std::string> borda(const std::vector<std::string>& candidates,
                                      const std::vector<Ballot>& ballots) {
    const std::size_t m = candidates.size();
    std::vector<double> score(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        for (const Ballot& b : ballots) {
            score[c] += b.weight * static_cast<double>(m - 1 - rank_of(b, candidates[c]));
        }
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    std::vector<std::string> out;
    for (std::size_t i : order) out.push_back(candidates[i]);
    return out;
}

// Explicit pairwise majority table: x scores a point for each y it beats by
// total ballot weight, half a point per exact tie.
inline std::vector<std::string> copeland(const std::vector<std::string>& candidates,
                                         const std::vector<Ballot>& ballots) {
    const std::size_t m = candidates.size();
    std::vector<double> score(m, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
            if (x == y) continue;
            double wx = 0.0;
            double wy = 0.0;
            for (const Ballot& b : ballots) {
                if (rank_of(b, candidates[x]) < rank_of(b, candidates[y])) {
                    wx += b.weight;
                } else {
                    wy += b.weight;
                }
            }
            if (wx > wy) {
                score[x] += 1.0;
            } else if (wx == wy) {
                score[x] += 0.5;
            }
        }
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    std::vector<std::string> out;
    for (std::size_t i : order) out.push_back(candidates[i]);
    return out;
}

}  // namespace oracle
