#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairsim/agents.hpp"
#include "fairsim/rng.hpp"
#include "helpers.hpp"

using namespace fairsim;
using testutil::ordered_list;
using testutil::starred_catalog;

namespace {

// Window of lists built from protected/unprotected masks over a shared
// catalog; feature tag is always "f".
struct MaskWindow {
    FeatureCatalog catalog;
    std::vector<ScoredList> lists;

    explicit MaskWindow(const std::vector<std::vector<int>>& masks) {
        std::vector<Item> items;
        std::vector<std::vector<std::string>> per_list_ids(masks.size());
        int next = 0;
        for (std::size_t l = 0; l < masks.size(); ++l) {
            for (int flag : masks[l]) {
                std::string id = "i" + std::to_string(next++);
                items.push_back({id, flag ? std::vector<std::string>{"f"}
                                          : std::vector<std::string>{}});
                per_list_ids[l].push_back(id);
            }
        }
        catalog = FeatureCatalog::from_items(std::move(items));
        for (std::size_t l = 0; l < per_list_ids.size(); ++l) {
            lists.push_back(ordered_list(per_list_ids[l], l));
        }
    }
};

}  // namespace

TEST_CASE("gpf matches hand counts") {
    SUBCASE("3 of 30 slots protected, target 0.2") {
        // Oracle: (3/30)/0.2 = 0.5.
        MaskWindow w({{1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                      {0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
                      {0, 0, 0, 0, 0, 1, 0, 0, 0, 0}});
        CHECK(fairness_gpf(w.lists, w.catalog, "f", 0.2) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("no protected occurrences") {
        MaskWindow w({{0, 0, 0, 0}});
        CHECK(fairness_gpf(w.lists, w.catalog, "f", 0.2) == 0.0);
    }
    SUBCASE("target met exactly truncates to 1") {
        MaskWindow w({{1, 1, 0, 0, 0, 0, 0, 0, 0, 0}});
        CHECK(fairness_gpf(w.lists, w.catalog, "f", 0.2) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("empty window is 0") {
        auto catalog = starred_catalog({"a*", "b"});
        CHECK(fairness_gpf({}, catalog, "f", 0.2) == 0.0);
    }
    SUBCASE("non-positive target rejected") {
        MaskWindow w({{1}});
        CHECK_THROWS_AS(fairness_gpf(w.lists, w.catalog, "f", 0.0), ValidationError);
    }
}

TEST_CASE("gpf nondecreasing when a protected occurrence replaces an unprotected one") {
    RandomStream rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<int>> masks(1 + rng.next_below(3));
        for (auto& mask : masks) {
            mask.resize(2 + rng.next_below(6));
            for (auto& m : mask) m = rng.next_below(2) == 0 ? 0 : 1;
        }
        MaskWindow before(masks);
        // Flip the first unprotected slot, totals held fixed.
        bool flipped = false;
        for (auto& mask : masks) {
            for (auto& m : mask) {
                if (m == 0) {
                    m = 1;
                    flipped = true;
                    break;
                }
            }
            if (flipped) break;
        }
        if (!flipped) continue;
        MaskWindow after(masks);
        const double target = 0.3;
        const double a = fairness_gpf(before.lists, before.catalog, "f", target);
        const double b = fairness_gpf(after.lists, after.catalog, "f", target);
        CHECK(b >= a);
        CHECK(b <= 1.0);
    }
}

TEST_CASE("guf matches the rank-discounted oracle") {
    // Catalog: 2 protected, 8 unprotected. One list of 4 with the only
    // protected item at rank 4.
    auto catalog = starred_catalog({"p1*", "p2*", "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8"});
    std::vector<ScoredList> lists{ordered_list({"n1", "n2", "n3", "p1"})};

    // Independent oracle: per-position utility 1/log2(rank+1).
    const double u_p = (1.0 / std::log2(5.0)) / 2.0;
    const double u_n = (1.0 + 1.0 / std::log2(3.0) + 1.0 / std::log2(4.0)) / 8.0;
    const double expected = u_p / u_n;

    const double got = fairness_guf(lists, catalog, "f", 1.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.8084).epsilon(2e-4));
}

TEST_CASE("guf edge behavior") {
    auto catalog = starred_catalog({"p1*", "n1"});
    SUBCASE("parity truncates to 1") {
        // One protected and one unprotected item at the same ranks across two
        // lists; group sizes are 1 and 1, so utilities match exactly.
        std::vector<ScoredList> lists{ordered_list({"p1", "n1"}, 0), ordered_list({"n1", "p1"}, 1)};
        CHECK(fairness_guf(lists, catalog, "f", 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("protected utility above parity truncates to 1") {
        std::vector<ScoredList> lists{ordered_list({"p1", "n1"})};
        CHECK(fairness_guf(lists, catalog, "f", 1.0) == 1.0);
    }
    SUBCASE("only protected exposure is fully fair") {
        std::vector<ScoredList> lists{ordered_list({"p1"})};
        CHECK(fairness_guf(lists, catalog, "f", 1.0) == 1.0);
    }
    SUBCASE("empty window is 0") { CHECK(fairness_guf({}, catalog, "f", 1.0) == 0.0); }
    SUBCASE("single-sided catalog rejected") {
        auto all_protected = starred_catalog({"a*", "b*"});
        std::vector<ScoredList> lists{ordered_list({"a"})};
        CHECK_THROWS_AS(fairness_guf(lists, all_protected, "f", 1.0), ValidationError);
    }
}

TEST_CASE("mrr matches hand counts") {
    auto catalog = starred_catalog({"p*", "a", "b", "c"});
    SUBCASE("first protected at rank 4 in both lists, target 0.5") {
        std::vector<ScoredList> lists{ordered_list({"a", "b", "c", "p"}, 0),
                                      ordered_list({"b", "a", "c", "p"}, 1)};
        CHECK(fairness_mrr(lists, catalog, "f", 0.5) == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("protected at rank 1, target 1.0") {
        std::vector<ScoredList> lists{ordered_list({"p", "a"})};
        CHECK(fairness_mrr(lists, catalog, "f", 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("protected at rank 2 meets target 0.5 exactly") {
        std::vector<ScoredList> lists{ordered_list({"a", "p", "b"}, 0),
                                      ordered_list({"c", "p", "a"}, 1)};
        CHECK(fairness_mrr(lists, catalog, "f", 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("no protected item anywhere is 0") {
        std::vector<ScoredList> lists{ordered_list({"a", "b"}), };
        CHECK(fairness_mrr(lists, catalog, "f", 0.5) == 0.0);
    }
    SUBCASE("empty window is 0") { CHECK(fairness_mrr({}, catalog, "f", 0.5) == 0.0); }
    SUBCASE("target outside (0,1] rejected") {
        CHECK_THROWS_AS(fairness_mrr({}, catalog, "f", 0.0), ValidationError);
        CHECK_THROWS_AS(fairness_mrr({}, catalog, "f", 1.5), ValidationError);
    }
}

TEST_CASE("all metrics stay in [0,1] on random windows") {
    RandomStream rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<std::vector<int>> masks(1 + rng.next_below(4));
        for (auto& mask : masks) {
            mask.resize(1 + rng.next_below(8));
            for (auto& m : mask) m = rng.next_below(3) == 0 ? 1 : 0;
        }
        // Keep both catalog groups non-empty for the guf precondition.
        masks[0].push_back(0);
        masks[0].push_back(1);
        MaskWindow w(masks);
        const double target = 0.05 + 0.9 * rng.next_double();
        for (double v : {fairness_gpf(w.lists, w.catalog, "f", target),
                         fairness_guf(w.lists, w.catalog, "f", target),
                         fairness_mrr(w.lists, w.catalog, "f", target)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("agent_fairness dispatches on metric kind") {
    MaskWindow w({{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}});
    AgentSpec gpf{"g", "f", MetricKind::GPF, 0.2};
    CHECK(agent_fairness(w.lists, w.catalog, gpf) ==
          doctest::Approx(fairness_gpf(w.lists, w.catalog, "f", 0.2)));
    AgentSpec mrr{"m", "f", MetricKind::MRR, 0.5};
    CHECK(agent_fairness(w.lists, w.catalog, mrr) ==
          doctest::Approx(fairness_mrr(w.lists, w.catalog, "f", 0.5)));
}

TEST_CASE("cascaded ranking is the stable protected-first partition") {
    auto catalog = starred_catalog({"A", "B*", "C", "D*"});
    SUBCASE("protected move to the front, order kept inside blocks") {
        auto order = rank_cascaded(ordered_list({"A", "B", "C", "D"}), catalog, "f");
        CHECK(order == std::vector<std::string>{"B", "D", "A", "C"});
    }
    SUBCASE("no protected items leaves the order unchanged") {
        auto order = rank_cascaded(ordered_list({"A", "C"}), catalog, "f");
        CHECK(order == std::vector<std::string>{"A", "C"});
    }
    SUBCASE("all protected leaves the order unchanged") {
        auto order = rank_cascaded(ordered_list({"D", "B"}), catalog, "f");
        CHECK(order == std::vector<std::string>{"D", "B"});
    }
}

TEST_CASE("cascaded ranking is a permutation preserving block order") {
    RandomStream rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.next_below(12);
        std::vector<std::string> specs;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = "x" + std::to_string(i);
            ids.push_back(id);
            specs.push_back(rng.next_below(2) ? id + "*" : id);
        }
        auto catalog = starred_catalog(specs);
        auto list = ordered_list(ids);
        auto order = rank_cascaded(list, catalog, "f");

        auto sorted_in = ids;
        auto sorted_out = order;
        std::sort(sorted_in.begin(), sorted_in.end());
        std::sort(sorted_out.begin(), sorted_out.end());
        REQUIRE(sorted_in == sorted_out);

        // Subsequence order within each block must match the input.
        auto block_order = [&](bool protected_block) {
            std::vector<std::string> in_block;
            for (const auto& id : ids) {
                if (catalog.item_has_feature(id, "f") == protected_block) in_block.push_back(id);
            }
            std::vector<std::string> out_block;
            for (const auto& id : order) {
                if (catalog.item_has_feature(id, "f") == protected_block) out_block.push_back(id);
            }
            CHECK(in_block == out_block);
        };
        block_order(true);
        block_order(false);

        // Binary partition agrees with the cascade.
        auto pref = rank_binary(list, catalog, "f");
        std::vector<std::string> recombined = pref.preferred;
        recombined.insert(recombined.end(), pref.other.begin(), pref.other.end());
        CHECK(recombined == order);
    }
}

TEST_CASE("rank_binary partitions candidates") {
    auto catalog = starred_catalog({"A*", "B", "C*"});
    auto pref = rank_binary(ordered_list({"A", "B", "C"}), catalog, "f");
    CHECK(pref.preferred == std::vector<std::string>{"A", "C"});
    CHECK(pref.other == std::vector<std::string>{"B"});

    auto none = rank_binary(ordered_list({"B"}), catalog, "f");
    CHECK(none.preferred.empty());
    CHECK(none.other == std::vector<std::string>{"B"});

    auto all = rank_binary(ordered_list({"A", "C"}), catalog, "f");
    CHECK(all.preferred == std::vector<std::string>{"A", "C"});
    CHECK(all.other.empty());
}

namespace {

FeatureCatalog two_feature_catalog() {
    return FeatureCatalog::from_items({
        {"fx", {"f"}},
        {"fx2", {"f"}},
        {"gx", {"g"}},
        {"gx2", {"g"}},
        {"nn", {}},
        {"nn2", {}},
    });
}

const std::vector<AgentSpec> kTwoAgents{
    {"af", "f", MetricKind::GPF, 0.5},
    {"ag", "g", MetricKind::GPF, 0.5},
};

}  // namespace

TEST_CASE("raw compatibility is the ratio to the population share") {
    CHECK(raw_compatibility(0.5, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(raw_compatibility(0.5, 0.0), DataError);
}

TEST_CASE("compatibility vectors normalize per user") {
    auto catalog = two_feature_catalog();
    // u1 likes one f item out of two rated; u2 likes one g item out of two.
    std::vector<Rating> train{
        {"u1", "fx", 5.0}, {"u1", "nn", 1.0},
        {"u2", "gx", 5.0}, {"u2", "nn", 1.0},
    };
    LikeRule like;  // threshold > 3

    auto table = compute_compatibility(train, catalog, kTwoAgents, like);
    // Raw vector for u1 is (0.5/0.25, 0/0.25) = (2, 0) -> normalized (1, 0).
    CHECK(table.for_user("u1")[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(table.for_user("u1")[1] == doctest::Approx(0.0));
    CHECK(table.for_user("u2")[0] == doctest::Approx(0.0));
    CHECK(table.for_user("u2")[1] == doctest::Approx(1.0).epsilon(1e-9));

    SUBCASE("unknown users get the uniform vector") {
        CHECK(table.for_user("stranger") == std::vector<double>{0.5, 0.5});
    }
    SUBCASE("single-agent tables are identically 1") {
        std::vector<AgentSpec> one{kTwoAgents[0]};
        auto single = compute_compatibility(train, catalog, one, like);
        CHECK(single.for_user("u1") == std::vector<double>{1.0});
        CHECK(single.for_user("u2") == std::vector<double>{1.0});  // no signal -> uniform
    }
}

TEST_CASE("compatibility is invariant to doubling rating counts at fixed proportions") {
    auto catalog = two_feature_catalog();
    std::vector<Rating> train{
        {"u1", "fx", 5.0}, {"u1", "nn", 1.0},
        {"u2", "gx", 4.0}, {"u2", "nn", 2.0},
    };
    std::vector<Rating> doubled = train;
    doubled.insert(doubled.end(), {{"u1", "fx2", 5.0},
                                   {"u1", "nn2", 1.0},
                                   {"u2", "gx2", 4.0},
                                   {"u2", "nn2", 2.0}});
    LikeRule like;
    auto a = compute_compatibility(train, catalog, kTwoAgents, like);
    auto b = compute_compatibility(doubled, catalog, kTwoAgents, like);
    for (const char* user : {"u1", "u2"}) {
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(a.for_user(user)[i] == doctest::Approx(b.for_user(user)[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("compatibility vectors are nonnegative and sum to 1") {
    auto catalog = two_feature_catalog();
    RandomStream rng(31);
    std::vector<std::string> item_pool{"fx", "fx2", "gx", "gx2", "nn", "nn2"};
    std::vector<Rating> train;
    for (int u = 0; u < 20; ++u) {
        std::string user = "u" + std::to_string(u);
        for (std::size_t i = 0; i < item_pool.size(); ++i) {
            if (rng.next_below(2)) {
                train.push_back({user, item_pool[i], rng.next_below(2) ? 5.0 : 1.0});
            }
        }
    }
    // Guarantee both features are liked by someone.
    train.push_back({"anchor", "fx", 5.0});
    train.push_back({"anchor", "gx", 5.0});

    auto table = compute_compatibility(train, catalog, kTwoAgents, LikeRule{});
    for (int u = 0; u < 20; ++u) {
        const auto& vec = table.for_user("u" + std::to_string(u));
        double sum = 0.0;
        for (double v : vec) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("never-liked agent feature is a setup error") {
    auto catalog = two_feature_catalog();
    std::vector<Rating> train{{"u1", "fx", 5.0}, {"u1", "gx", 1.0}};
    CHECK_THROWS_AS(compute_compatibility(train, catalog, kTwoAgents, LikeRule{}), DataError);

    SUBCASE("the all-liked rule counts every rating") {
        LikeRule all{LikeRule::Kind::AllLiked, 0.0};
        CHECK_NOTHROW(compute_compatibility(train, catalog, kTwoAgents, all));
    }
}

TEST_CASE("catalog-share pbar mode divides by the feature's catalog share") {
    auto catalog = two_feature_catalog();  // f on 2 of 6 items
    std::vector<Rating> train{{"u1", "fx", 5.0}, {"u1", "nn", 1.0}, {"u2", "gx", 5.0}};
    std::vector<AgentSpec> one{kTwoAgents[0]};
    auto table = compute_compatibility(train, catalog, one, LikeRule{}, PbarMode::CatalogShare);
    // p_u1 = 0.5, pbar = 2/6; raw = 1.5 -> normalized single agent = 1.
    CHECK(table.for_user("u1") == std::vector<double>{1.0});
}
