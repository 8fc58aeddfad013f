#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tsnkit/priority.hpp"
#include "tsnkit/workload.hpp"

using namespace tsnkit;

namespace {

Network star_network(int endpoints) {
    std::vector<Node> nodes = {{"SW1", NodeKind::Switch}};
    std::vector<Link> links;
    for (int i = 1; i <= endpoints; ++i) {
        std::string id = "EP" + std::to_string(i);
        nodes.push_back({id, NodeKind::EndPoint});
        links.push_back({id, "SW1", Rational(100)});
        links.push_back({"SW1", id, Rational(100)});
    }
    return Network(nodes, links);
}

Network two_switch_network() {
    std::vector<Node> nodes = {{"EP1", NodeKind::EndPoint}, {"EP2", NodeKind::EndPoint},
                               {"EP3", NodeKind::EndPoint}, {"SW1", NodeKind::Switch},
                               {"SW2", NodeKind::Switch}};
    std::vector<Link> links;
    auto duplex = [&](const std::string& a, const std::string& b) {
        links.push_back({a, b, Rational(100)});
        links.push_back({b, a, Rational(100)});
    };
    duplex("EP1", "SW1");
    duplex("SW1", "SW2");
    duplex("SW2", "EP2");
    duplex("EP3", "SW2");
    return Network(nodes, links);
}

Flow make_flow(const std::string& id, const std::string& src, const std::string& dst,
               std::int64_t period, std::int64_t deadline, std::int64_t payload) {
    Flow f;
    f.id = id;
    f.src = src;
    f.dst = dst;
    f.period_us = period;
    f.deadline_us = deadline;
    f.size_bytes = payload;
    return f;
}

double dist2(const FeatureVector& a, const FeatureVector& b) {
    double total = 0;
    auto ca = a.coords(), cb = b.coords();
    for (int i = 0; i < 4; ++i) total += (ca[i] - cb[i]) * (ca[i] - cb[i]);
    return total;
}

}  // namespace

TEST_CASE("feature normalization ranges and anchors") {
    Network net = two_switch_network();
    // EP1->EP2 has 3 links, EP3->EP2 has... EP3-SW2-EP2 = 2 links
    std::vector<Flow> flows = {make_flow("long", "EP1", "EP2", 1000, 1000, 750),
                               make_flow("short", "EP3", "EP2", 2000, 500, 1500)};
    auto routes = route_all(net, flows);
    auto features = normalize_features(flows, routes);
    REQUIRE(features.size() == 2);
    CHECK(features[0].pl == doctest::Approx(-1.0));
    CHECK(features[1].pl == doctest::Approx(-2.0 / 3.0));
    CHECK(features[0].t == doctest::Approx(0.5));
    CHECK(features[1].t == doctest::Approx(1.0));
    CHECK(features[0].d == doctest::Approx(1.0));
    CHECK(features[1].d == doctest::Approx(0.5));
    CHECK(features[0].s == doctest::Approx(0.5));
    CHECK(features[1].s == doctest::Approx(1.0));
}

TEST_CASE("single flow normalizes to the extremes") {
    Network net = star_network(2);
    std::vector<Flow> flows = {make_flow("only", "EP1", "EP2", 700, 900, 321)};
    auto routes = route_all(net, flows);
    auto features = normalize_features(flows, routes);
    CHECK(features[0].pl == doctest::Approx(-1.0));
    CHECK(features[0].t == doctest::Approx(1.0));
    CHECK(features[0].d == doctest::Approx(1.0));
    CHECK(features[0].s == doctest::Approx(1.0));
}

TEST_CASE("empty flowset is an error") {
    Network net = star_network(2);
    std::vector<Flow> none;
    std::map<std::string, Path> routes;
    CHECK_THROWS_AS(normalize_features(none, routes), std::invalid_argument);
}

TEST_CASE("kmeans recovers well-separated groups and is deterministic") {
    std::vector<FeatureVector> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({-0.1, 0.05 + 0.001 * i, 0.05, 0.05});
    for (int i = 0; i < 6; ++i) pts.push_back({-0.9, 0.95 - 0.001 * i, 0.95, 0.95});
    Clustering c = kmeans(pts, 2, 7);
    REQUIRE(c.k == 2);
    for (int i = 1; i < 6; ++i) CHECK(c.assignment[i] == c.assignment[0]);
    for (int i = 7; i < 12; ++i) CHECK(c.assignment[i] == c.assignment[6]);
    CHECK(c.assignment[0] != c.assignment[6]);

    Clustering again = kmeans(pts, 2, 7);
    CHECK(again.assignment == c.assignment);

    CHECK_THROWS_AS(kmeans(pts, 13, 7), std::domain_error);
}

TEST_CASE("kmeans k = 1 yields the coordinate-wise mean") {
    std::vector<FeatureVector> pts = {{-1.0, 0.2, 0.4, 0.6}, {-0.5, 0.4, 0.6, 0.8}};
    Clustering c = kmeans(pts, 1, 3);
    REQUIRE(c.k == 1);
    CHECK(c.centroids[0].pl == doctest::Approx(-0.75));
    CHECK(c.centroids[0].t == doctest::Approx(0.3));
    CHECK(c.centroids[0].d == doctest::Approx(0.5));
    CHECK(c.centroids[0].s == doctest::Approx(0.7));
}

TEST_CASE("lloyd iterations never increase the within-cluster scatter") {
    // property check on a seeded cloud: run kmeans for increasing iteration
    // budgets by reusing the public entry (fixed point implies the final
    // WCSS is minimal along the run); here we simply verify the fixed point
    // is stable under one more assignment pass
    Rng rng(99);
    std::vector<FeatureVector> pts;
    for (int i = 0; i < 40; ++i)
        pts.push_back({-(double)rng.uniform_int(1, 100) / 100.0,
                       (double)rng.uniform_int(1, 100) / 100.0,
                       (double)rng.uniform_int(1, 100) / 100.0,
                       (double)rng.uniform_int(1, 100) / 100.0});
    Clustering c = kmeans(pts, 4, 5);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double own = dist2(pts[i], c.centroids[c.assignment[i]]);
        for (int j = 0; j < c.k; ++j) CHECK(own <= dist2(pts[i], c.centroids[j]) + 1e-12);
    }
}

TEST_CASE("order_clusters ranks by centroid mean with index ties") {
    Clustering c;
    c.k = 3;
    c.centroid_means = {0.7, 0.2, 0.7};
    std::vector<int> prio = order_clusters(c);
    CHECK(prio == std::vector<int>{1, 0, 2});  // cluster 1 wins, tie broken to cluster 0

    Clustering one;
    one.k = 1;
    one.centroid_means = {0.5};
    CHECK(order_clusters(one) == std::vector<int>{0});
}

TEST_CASE("order_clusters output is a bijection") {
    Clustering c;
    c.k = 5;
    c.centroid_means = {0.3, 0.3, 0.1, 0.9, 0.2};
    std::vector<int> prio = order_clusters(c);
    std::vector<bool> seen(5, false);
    for (int p : prio) {
        REQUIRE(p >= 0);
        REQUIRE(p < 5);
        CHECK(!seen[p]);
        seen[p] = true;
    }
}

TEST_CASE("dmpo bins are deadline-monotone with remainder-first sizes") {
    std::vector<Flow> flows = {make_flow("a", "EP1", "EP2", 1000, 400, 100),
                               make_flow("b", "EP1", "EP2", 1000, 100, 100),
                               make_flow("c", "EP1", "EP2", 1000, 300, 100),
                               make_flow("d", "EP1", "EP2", 1000, 200, 100),
                               make_flow("e", "EP1", "EP2", 1000, 500, 100)};
    PriorityAssignment pa = assign_priorities_dmpo(flows, 2);
    // 5 flows, 2 bins: sizes 3 and 2
    CHECK(pa.priorities.at("b") == 0);
    CHECK(pa.priorities.at("d") == 0);
    CHECK(pa.priorities.at("c") == 0);
    CHECK(pa.priorities.at("a") == 1);
    CHECK(pa.priorities.at("e") == 1);

    // deadline-monotone: a lower priority value never has a later deadline
    for (const Flow& x : flows)
        for (const Flow& y : flows)
            if (pa.priorities.at(x.id) < pa.priorities.at(y.id))
                CHECK(x.deadline_us <= y.deadline_us);

    PriorityAssignment all_one = assign_priorities_dmpo(flows, 1);
    for (const Flow& f : flows) CHECK(all_one.priorities.at(f.id) == 0);

    // 4 flows into 2 bins of 2
    std::vector<Flow> four(flows.begin(), flows.begin() + 4);
    PriorityAssignment even = assign_priorities_dmpo(four, 2);
    CHECK(even.priorities.at("b") == 0);
    CHECK(even.priorities.at("d") == 0);
    CHECK(even.priorities.at("c") == 1);
    CHECK(even.priorities.at("a") == 1);
}

TEST_CASE("kmeans sweep dominates every fixed k and separates when needed") {
    Network net = star_network(4);
    // one tight express-ish flow and three heavy bulk flows: one priority
    // class cannot hold them all
    std::vector<Flow> flows = {make_flow("urgent", "EP1", "EP2", 2000, 60, 100),
                               make_flow("bulk1", "EP3", "EP2", 2000, 100000, 1500),
                               make_flow("bulk2", "EP4", "EP2", 2000, 100000, 1500),
                               make_flow("bulk3", "EP3", "EP2", 2500, 100000, 1400)};
    auto routes = route_all(net, flows);
    PriorityAssignment pa = assign_priorities_kmeans(net, flows, routes, 11);

    REQUIRE(pa.per_k_scores.size() >= 2);
    std::int64_t best = *std::max_element(pa.per_k_scores.begin(), pa.per_k_scores.end());
    // the returned assignment scores at least as well as every fixed k
    std::vector<Flow> chosen = flows;
    for (Flow& f : chosen) f.priority = pa.priorities.at(f.id);
    CHECK(fully_preemptive_score(net, chosen, routes) == best);
    CHECK(pa.per_k_scores[pa.chosen_k - 1] == best);
    // ties break toward the smaller k
    for (int k = 1; k < pa.chosen_k; ++k) CHECK(pa.per_k_scores[k - 1] < best);

    // k = 1 cannot schedule the urgent flow here, some k > 1 can
    CHECK(pa.chosen_k > 1);
    CHECK(pa.per_k_scores[0] < (std::int64_t)flows.size());
    CHECK(best == (std::int64_t)flows.size());
}

TEST_CASE("single flow gets k = 1 and priority 0") {
    Network net = star_network(2);
    std::vector<Flow> flows = {make_flow("only", "EP1", "EP2", 1000, 100000, 100)};
    auto routes = route_all(net, flows);
    PriorityAssignment pa = assign_priorities_kmeans(net, flows, routes, 1);
    CHECK(pa.chosen_k == 1);
    CHECK(pa.priorities.at("only") == 0);
}
