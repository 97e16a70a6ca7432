#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairsim/allocation.hpp"
#include "fairsim/core.hpp"

using namespace fairsim;

namespace {

std::vector<AgentSnapshot> agents(std::initializer_list<double> fairness,
                                  std::initializer_list<double> compat = {}) {
    std::vector<AgentSnapshot> out;
    std::size_t i = 0;
    std::vector<double> comp(compat);
    for (double f : fairness) {
        out.push_back({"a" + std::to_string(i + 1), f, i < comp.size() ? comp[i] : 0.0});
        ++i;
    }
    return out;
}

}  // namespace

TEST_CASE("least fair picks the minimum-fairness agent") {
    SUBCASE("argmin wins with weight 1") {
        auto alloc = allocate_least_fair(agents({0.4, 0.9, 0.7}));
        REQUIRE(alloc.kind == AllocationKind::Single);
        REQUIRE(alloc.entries.size() == 1);
        CHECK(alloc.entries[0].first == "a1");
        CHECK(alloc.entries[0].second == 1.0);
    }
    SUBCASE("all targets met allocates nothing") {
        auto alloc = allocate_least_fair(agents({1.0, 1.0, 1.0}));
        CHECK(alloc.kind == AllocationKind::None);
        CHECK(alloc.entries.empty());
    }
    SUBCASE("ties break to the first declared agent") {
        auto alloc = allocate_least_fair(agents({0.5, 0.5}));
        REQUIRE(alloc.kind == AllocationKind::Single);
        CHECK(alloc.entries[0].first == "a1");
    }
    SUBCASE("compatibility is never read") {
        auto low = allocate_least_fair(agents({0.4, 0.9}, {0.01, 0.99}));
        auto high = allocate_least_fair(agents({0.4, 0.9}, {0.99, 0.01}));
        CHECK(low.entries == high.entries);
    }
}

TEST_CASE("lottery distribution is the normalized unfairness-compatibility product") {
    SUBCASE("hand example") {
        // scores = (0.5 * 0.25, 0.25 * 1.0) = (0.125, 0.25) -> (1/3, 2/3)
        auto dist = lottery_distribution(agents({0.5, 0.75}, {0.5, 1.0}), 1, 2);
        REQUIRE(dist.size() == 2);
        CHECK(dist[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(dist[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("all fair yields the empty distribution") {
        CHECK(lottery_distribution(agents({1.0, 1.0}, {0.5, 0.5}), 1, 2).empty());
    }
    SUBCASE("single unfair compatible agent takes probability 1") {
        auto dist = lottery_distribution(agents({0.5}, {0.8}), 1, 2);
        REQUIRE(dist.size() == 1);
        CHECK(dist[0] == doctest::Approx(1.0));
    }
    SUBCASE("scaling all scores leaves the distribution unchanged") {
        auto base = lottery_distribution(agents({0.5, 0.75, 0.2}, {0.5, 1.0, 0.25}), 1, 2);
        // Raising alpha scales nothing uniformly, but multiplying every
        // compatibility by the same constant does: c^2 scales all scores by
        // the same factor.
        auto scaled = lottery_distribution(agents({0.5, 0.75, 0.2}, {0.25, 0.5, 0.125}), 1, 2);
        REQUIRE(base.size() == scaled.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(base[i] == doctest::Approx(scaled[i]).epsilon(1e-12));
        }
    }
    SUBCASE("powers below 1 are rejected") {
        CHECK_THROWS_AS(lottery_distribution(agents({0.5}, {0.5}), 0, 2), ValidationError);
    }
}

TEST_CASE("lottery sampling follows the distribution") {
    SUBCASE("degenerate distribution always picks the same agent") {
        RandomStream rng(1);
        auto snapshot = agents({0.5, 0.5}, {1.0, 0.0});
        std::vector<double> dist{1.0, 0.0};
        for (int i = 0; i < 100; ++i) {
            auto alloc = allocate_lottery(snapshot, dist, rng);
            REQUIRE(alloc.kind == AllocationKind::Single);
            CHECK(alloc.entries[0].first == "a1");
        }
    }
    SUBCASE("empty distribution allocates nothing and consumes no draws") {
        RandomStream a(42);
        RandomStream b(42);
        auto snapshot = agents({1.0}, {1.0});
        CHECK(allocate_lottery(snapshot, {}, a).kind == AllocationKind::None);
        CHECK(a.next_u64() == b.next_u64());
    }
    SUBCASE("30k seeded draws land within 0.02 of (1/3, 2/3)") {
        RandomStream rng(20240501);
        auto snapshot = agents({0.5, 0.75}, {0.5, 1.0});
        auto dist = lottery_distribution(snapshot, 1, 2);
        int first = 0;
        const int draws = 30000;
        for (int i = 0; i < draws; ++i) {
            auto alloc = allocate_lottery(snapshot, dist, rng);
            REQUIRE(alloc.kind == AllocationKind::Single);
            if (alloc.entries[0].first == "a1") ++first;
        }
        const double freq = static_cast<double>(first) / draws;
        CHECK(std::abs(freq - 1.0 / 3.0) < 0.02);
    }
    SUBCASE("identical seeds give identical draw sequences") {
        auto snapshot = agents({0.5, 0.75}, {0.5, 1.0});
        auto dist = lottery_distribution(snapshot, 1, 2);
        RandomStream a(7);
        RandomStream b(7);
        for (int i = 0; i < 1000; ++i) {
            CHECK(allocate_lottery(snapshot, dist, a).entries ==
                  allocate_lottery(snapshot, dist, b).entries);
        }
    }
}

TEST_CASE("weighted allocation spans the unfair agents") {
    SUBCASE("both unfair keeps the distribution weights") {
        auto snapshot = agents({0.5, 0.75}, {0.5, 1.0});
        auto alloc = allocate_weighted(snapshot, lottery_distribution(snapshot, 1, 2));
        REQUIRE(alloc.kind == AllocationKind::Weighted);
        REQUIRE(alloc.entries.size() == 2);
        CHECK(alloc.entries[0].first == "a1");
        CHECK(alloc.entries[0].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(alloc.entries[1].second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("agents at the target are excluded") {
        auto snapshot = agents({0.5, 1.0}, {0.5, 0.9});
        auto alloc = allocate_weighted(snapshot, lottery_distribution(snapshot, 1, 2));
        REQUIRE(alloc.kind == AllocationKind::Weighted);
        REQUIRE(alloc.entries.size() == 1);
        CHECK(alloc.entries[0] == std::pair<std::string, double>{"a1", 1.0});
    }
    SUBCASE("all at target allocates nothing") {
        auto snapshot = agents({1.0, 1.0}, {0.5, 0.9});
        CHECK(allocate_weighted(snapshot, lottery_distribution(snapshot, 1, 2)).kind ==
              AllocationKind::None);
    }
}

TEST_CASE("fair or incompatible agents never receive positive weight") {
    RandomStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<AgentSnapshot> snapshot;
        const std::size_t n = 1 + rng.next_below(5);
        for (std::size_t i = 0; i < n; ++i) {
            const double fairness = rng.next_below(4) == 0 ? 1.0 : rng.next_double();
            const double compat = rng.next_below(4) == 0 ? 0.0 : rng.next_double();
            snapshot.push_back({"a" + std::to_string(i), fairness, compat});
        }
        auto dist = lottery_distribution(snapshot, 1, 2);
        for (const Allocation& alloc :
             {allocate_weighted(snapshot, dist), allocate_lottery(snapshot, dist, rng)}) {
            double sum = 0.0;
            for (const auto& [name, w] : alloc.entries) {
                sum += w;
                for (const auto& s : snapshot) {
                    if (s.name == name && w > 0.0) {
                        CHECK(s.fairness < 1.0);
                        CHECK(s.compatibility > 0.0);
                    }
                }
            }
            if (alloc.kind != AllocationKind::None) {
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            } else {
                CHECK(alloc.entries.empty());
            }
        }
    }
}
