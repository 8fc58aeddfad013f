#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tsnkit/synthesis.hpp"

using namespace tsnkit;

namespace {

// Independent oracle: enumerate all (m+1)^p sequences and keep the
// non-decreasing surjective ones.
std::vector<std::vector<int>> brute_force_configs(int p, int m) {
    std::vector<std::vector<int>> result;
    std::vector<int> seq(p, 0);
    while (true) {
        bool monotone = std::is_sorted(seq.begin(), seq.end());
        if (monotone) {
            std::set<int> used(seq.begin(), seq.end());
            bool surjective = (int)used.size() == m + 1 && *used.begin() == 0 &&
                              *used.rbegin() == m;
            if (surjective) result.push_back(seq);
        }
        int i = p - 1;
        while (i >= 0 && seq[i] == m) seq[i--] = 0;
        if (i < 0) break;
        seq[i] += 1;
    }
    std::sort(result.begin(), result.end());
    return result;
}

Network line_network() {
    std::vector<Node> nodes = {{"EP1", NodeKind::EndPoint},
                               {"EP2", NodeKind::EndPoint},
                               {"SW1", NodeKind::Switch}};
    std::vector<Link> links = {{"EP1", "SW1", Rational(100)}, {"SW1", "EP1", Rational(100)},
                               {"EP2", "SW1", Rational(100)}, {"SW1", "EP2", Rational(100)}};
    return Network(nodes, links);
}

Flow make_flow(const std::string& id, int prio, std::int64_t payload, std::int64_t period,
               std::int64_t deadline) {
    Flow f;
    f.id = id;
    f.src = "EP1";
    f.dst = "EP2";
    f.period_us = period;
    f.deadline_us = deadline;
    f.size_bytes = payload;
    f.priority = prio;
    return f;
}

}  // namespace

TEST_CASE("valid_configs equals the brute-force filter for p <= 8") {
    for (int p = 1; p <= 8; ++p) {
        for (int m = 0; m <= p - 1; ++m) {
            auto got = valid_configs(p, m);
            auto want = brute_force_configs(p, m);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].entries == want[i]);
                CHECK(got[i].level == m);
            }
            CHECK((std::uint64_t)got.size() == config_count(p, m));
        }
    }
}

TEST_CASE("worked enumeration examples") {
    auto two = valid_configs(3, 1);
    REQUIRE(two.size() == 2);
    CHECK(two[0].entries == std::vector<int>{0, 0, 1});
    CHECK(two[1].entries == std::vector<int>{0, 1, 1});

    auto single = valid_configs(5, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].entries == std::vector<int>{0, 0, 0, 0, 0});

    CHECK(valid_configs(8, 3).size() == 35);
    CHECK(config_count(8, 1) == 7);
    CHECK(config_count(8, 2) == 21);
    CHECK(config_count(8, 7) == 1);
}

TEST_CASE("published count formula is off by one in m") {
    // the printed closed form reproduces the true count only after shifting m
    CHECK(config_count_published_form(8, 3) == 21);
    CHECK(config_count(8, 2) == 21);
    CHECK(config_count_published_form(8, 2) == 7);
}

TEST_CASE("total search size") {
    CHECK(total_search_size(8) == 127);
    CHECK(total_search_size(2) == 1);
    CHECK(total_search_size(4) == 7);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(valid_configs(3, 3), std::domain_error);
    CHECK_THROWS_AS(valid_configs(0, 0), std::domain_error);
    CHECK_THROWS_AS(config_count(4, -1), std::domain_error);
}

TEST_CASE("enumeration is canonical and deterministic") {
    auto a = valid_configs(7, 3);
    auto b = valid_configs(7, 3);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));
}

TEST_CASE("synthesis returns all-zeros when the flowset is easy") {
    Network net = line_network();
    std::vector<Flow> flows = {make_flow("a", 0, 100, 10000, 100000),
                               make_flow("b", 1, 200, 10000, 100000)};
    auto routes = route_all(net, flows);
    SynthesisResult r = assign_preemption_class(net, flows, routes);
    REQUIRE(r.found());
    CHECK(r.level == 0);
    CHECK(r.config->entries == std::vector<int>{0, 0});
    CHECK(r.configs_tested == 1);
}

TEST_CASE("synthesis finds the minimal level that works") {
    // f2's deadline tolerates the 143-byte fragment but not a whole
    // 1500-byte frame, so no level-0/1 split around it can work while the
    // level-2 chain [0,1,2] can.
    Network net = line_network();
    std::vector<Flow> flows = {make_flow("f1", 0, 100, 2000, 50),
                               make_flow("f2", 1, 200, 2000, 100),
                               make_flow("f3", 2, 1500, 2000, 100000)};
    auto routes = route_all(net, flows);
    SynthesisResult r = assign_preemption_class(net, flows, routes);
    REQUIRE(r.found());
    CHECK(r.level == 2);
    CHECK(r.config->entries == std::vector<int>{0, 1, 2});
    // every config at levels 0 and 1 was tested first
    CHECK(r.configs_tested == 1 + 2 + 1);
    // soundness: re-run the analysis under the returned configuration
    CHECK(is_schedulable(analyze(net, flows, routes, *r.config)));
    CHECK(validate_config(flows, *r.config).ok);
}

TEST_CASE("impossible deadlines exhaust the whole search") {
    Network net = line_network();
    std::vector<Flow> flows = {make_flow("a", 0, 1500, 10000, 1),
                               make_flow("b", 1, 100, 10000, 100000),
                               make_flow("c", 2, 100, 10000, 100000)};
    auto routes = route_all(net, flows);
    SynthesisResult r = assign_preemption_class(net, flows, routes);
    CHECK(!r.found());
    CHECK(r.configs_tested == 4);  // 2^(p-1) with p = 3
    CHECK(r.per_level.size() == 3);
}
