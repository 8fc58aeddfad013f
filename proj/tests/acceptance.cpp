// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Run as: acceptance <data-dir>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "tsnkit/analysis.hpp"
#include "tsnkit/io.hpp"
#include "tsnkit/priority.hpp"
#include "tsnkit/simulator.hpp"
#include "tsnkit/synthesis.hpp"
#include "tsnkit/workload.hpp"

using namespace tsnkit;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void report(bool ok, const std::string& detail = "") {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++g_failures;
    }
};

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

Network line_network(int switches) {
    std::vector<Node> nodes = {{"EP1", NodeKind::EndPoint}, {"EP2", NodeKind::EndPoint}};
    std::vector<Link> links;
    auto duplex = [&](const std::string& a, const std::string& b) {
        links.push_back({a, b, Rational(100)});
        links.push_back({b, a, Rational(100)});
    };
    std::string prev = "EP1";
    for (int i = 1; i <= switches; ++i) {
        std::string sw = "SW" + std::to_string(i);
        nodes.push_back({sw, NodeKind::Switch});
        duplex(prev, sw);
        prev = sw;
    }
    duplex(prev, "EP2");
    return Network(nodes, links);
}

Network two_switch_y() {
    // 3 EPs over 2 switches, 5 nodes
    std::vector<Node> nodes = {{"EP1", NodeKind::EndPoint}, {"EP2", NodeKind::EndPoint},
                               {"EP3", NodeKind::EndPoint}, {"SW1", NodeKind::Switch},
                               {"SW2", NodeKind::Switch}};
    std::vector<Link> links;
    auto duplex = [&](const std::string& a, const std::string& b) {
        links.push_back({a, b, Rational(100)});
        links.push_back({b, a, Rational(100)});
    };
    duplex("EP1", "SW1");
    duplex("EP3", "SW1");
    duplex("SW1", "SW2");
    duplex("EP2", "SW2");
    return Network(nodes, links);
}

// ---- 1. preemption constants ----
void criterion_constants() {
    Criterion c("1 preemption constants");
    Rational r100(100), r1000(1000);
    bool ok = frame_time(143, r100) == Rational(1144, 100) &&
              frame_time(143, r1000) == Rational(1144, 1000) &&
              frame_time(24, r100) == Rational(192, 100) &&
              frame_time(24, r1000) == Rational(192, 1000);
    c.report(ok, "143B: " + frame_time(143, r100).to_decimal_string() + " / " +
                     frame_time(143, r1000).to_decimal_string() + " us; 24B: " +
                     frame_time(24, r100).to_decimal_string() + " / " +
                     frame_time(24, r1000).to_decimal_string() + " us");
}

// ---- 2. blocking reduction ----
void criterion_blocking_reduction() {
    Criterion c("2 blocking reduction");
    Rational r100(100);
    Duration non_preemptive = transmission_time(1500, r100);  // 123.36
    Duration preemptive = frame_time(143, r100);              // 11.44
    Rational reduction_full = (non_preemptive - preemptive) / non_preemptive;
    Rational payload_only = frame_time(1500, r100);           // the 120 us figure
    Rational reduction_payload = (payload_only - preemptive) / payload_only;
    bool ok = non_preemptive == Rational(12336, 100) &&
              reduction_full >= Rational(90, 100) && reduction_full <= Rational(91, 100) &&
              reduction_payload >= Rational(90, 100) && reduction_payload <= Rational(91, 100);
    c.report(ok, "123.36 -> 11.44 us; reduction " +
                     (reduction_full * Rational(100)).to_decimal_string(2) + "% (frame) / " +
                     (reduction_payload * Rational(100)).to_decimal_string(2) + "% (payload)");
}

// ---- 3. enumeration oracle ----
std::vector<std::vector<int>> brute_force_configs(int p, int m) {
    std::vector<std::vector<int>> result;
    std::vector<int> seq(p, 0);
    while (true) {
        if (std::is_sorted(seq.begin(), seq.end())) {
            std::set<int> used(seq.begin(), seq.end());
            if ((int)used.size() == m + 1 && *used.begin() == 0 && *used.rbegin() == m)
                result.push_back(seq);
        }
        int i = p - 1;
        while (i >= 0 && seq[i] == m) seq[i--] = 0;
        if (i < 0) break;
        seq[i] += 1;
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (std::uint64_t)(n - k + i) / (std::uint64_t)i;
    return r;
}

void criterion_enumeration() {
    Criterion c("3 enumeration oracle");
    bool ok = true;
    for (int p = 1; p <= 8 && ok; ++p) {
        for (int m = 0; m <= p - 1 && ok; ++m) {
            auto got = valid_configs(p, m);
            auto want = brute_force_configs(p, m);
            if (got.size() != want.size() || config_count(p, m) != want.size() ||
                config_count(p, m) != binom(p - 1, m)) {
                ok = false;
                break;
            }
            for (std::size_t i = 0; i < got.size(); ++i)
                if (got[i].entries != want[i]) ok = false;
        }
    }
    ok = ok && total_search_size(8) == 127;
    c.report(ok, "all p <= 8 match brute force; total_search_size(8) = " +
                     std::to_string(total_search_size(8)));
}

// ---- 4. safety sweep ----
void criterion_safety_sweep() {
    Criterion c("4 safety sweep");
    int scenarios = 0, comparisons = 0, violations = 0, excluded = 0;
    std::string first_violation;
    for (std::uint64_t seed = 1; scenarios < 100; ++seed) {
        Network net = seed % 3 == 0   ? star_network(3)
                      : seed % 3 == 1 ? line_network(2)
                                      : two_switch_y();
        Rng rng(seed * 7919);
        GenParams gp;
        gp.count = (int)rng.uniform_int(3, 15);
        gp.period_min_us = 500;
        gp.period_max_us = 3000;
        gp.deadline_min_us = 20000;
        gp.deadline_max_us = 100000;
        gp.seed = seed;
        std::vector<Flow> flows = generate(net, gp);
        int k = (int)rng.uniform_int(2, 4);
        PriorityAssignment pa = assign_priorities_dmpo(flows, k);
        for (Flow& f : flows) f.priority = pa.priorities.at(f.id);
        auto routes = route_all(net, flows);
        int p = (int)distinct_priorities(flows).size();

        std::set<int> levels = {0};
        if (p >= 2) levels.insert(1);
        if (p >= 3) levels.insert(2);
        levels.insert(p - 1);  // fully preemptive
        ++scenarios;
        for (int m : levels) {
            PreemptionConfig config = valid_configs(p, m).front();
            std::int64_t max_period = 0;
            for (const Flow& f : flows) max_period = std::max(max_period, f.period_us);
            SimConfig sc;
            sc.seed = seed * 31 + (std::uint64_t)m;
            sc.horizon_us = 100 * max_period;
            CrossValidation random_phases = cross_validate(net, flows, routes, config, sc, 2);
            SimConfig crit = sc;
            crit.policy = ReleasePolicy::CriticalInstant;
            CrossValidation critical = cross_validate(net, flows, routes, config, crit, 1);
            for (const CrossValidation* cv : {&random_phases, &critical}) {
                for (const FlowMargin& fm : cv->flows) {
                    if (!fm.bound) {
                        ++excluded;
                        continue;
                    }
                    if (!fm.measured) continue;
                    ++comparisons;
                    if (fm.violation) {
                        ++violations;
                        if (first_violation.empty())
                            first_violation = "seed " + std::to_string(seed) + " m " +
                                              std::to_string(m) + " flow " + fm.flow_id;
                    }
                }
            }
        }
    }
    c.report(violations == 0 && comparisons > 1000,
             std::to_string(scenarios) + " scenarios, " + std::to_string(comparisons) +
                 " flow comparisons, " + std::to_string(excluded) + " excluded (no bound), " +
                 std::to_string(violations) + " violations" +
                 (first_violation.empty() ? "" : " (first: " + first_violation + ")"));
}

// ---- 5. synthesis soundness and minimality ----
void criterion_synthesis() {
    Criterion c("5 synthesis soundness/minimality");
    int found = 0, unschedulable = 0, errors = 0;
    std::vector<int> found_at_level(8, 0);
    for (std::uint64_t seed = 1; (int)seed <= 50; ++seed) {
        Network net = seed % 2 == 0 ? star_network(4) : two_switch_y();
        Rng rng(seed * 104729);
        GenParams gp;
        gp.count = (int)rng.uniform_int(3, 12);
        gp.period_min_us = 2000;
        gp.period_max_us = 10000;
        gp.deadline_min_us = 60;
        gp.deadline_max_us = 4000;
        gp.seed = seed * 13;
        std::vector<Flow> flows = generate(net, gp);
        int k = (int)rng.uniform_int(2, 4);
        PriorityAssignment pa = assign_priorities_dmpo(flows, k);
        for (Flow& f : flows) f.priority = pa.priorities.at(f.id);
        auto routes = route_all(net, flows);
        int p = (int)distinct_priorities(flows).size();

        SynthesisResult r = assign_preemption_class(net, flows, routes);
        if (!r.found()) {
            ++unschedulable;
            // the search must have exhausted every level
            std::uint64_t expected = 0;
            for (int m = 0; m <= p - 1; ++m) expected += config_count(p, m);
            if (r.configs_tested != expected) ++errors;
            continue;
        }
        ++found;
        ++found_at_level[r.level];
        // soundness: the returned configuration validates and schedules
        if (!validate_config(flows, *r.config).ok) ++errors;
        if (!is_schedulable(analyze(net, flows, routes, *r.config))) ++errors;
        // minimality: no configuration at any lower level is schedulable
        for (int m = 0; m < r.level; ++m)
            for (const PreemptionConfig& candidate : valid_configs(p, m))
                if (is_schedulable(analyze(net, flows, routes, candidate))) ++errors;
    }
    std::string dist = "found at m=0/1/2/3: " + std::to_string(found_at_level[0]) + "/" +
                       std::to_string(found_at_level[1]) + "/" + std::to_string(found_at_level[2]) +
                       "/" + std::to_string(found_at_level[3]) + ", unschedulable " +
                       std::to_string(unschedulable);
    bool mixed = found > 0 && (found_at_level[1] + found_at_level[2] + found_at_level[3]) > 0;
    c.report(errors == 0 && mixed, "50 flowsets, " + dist + ", " + std::to_string(errors) +
                                        " soundness/minimality errors");
}

// ---- 6. single-hop worked fixture ----
void criterion_worked_fixture() {
    Criterion c("6 single-hop worked fixture");
    Network net = star_network(3);
    auto make_flows = [](std::int64_t express_period) {
        Flow express;
        express.id = "express";
        express.src = "EP1";
        express.dst = "EP2";
        express.period_us = express_period;
        express.deadline_us = 100000;
        express.size_bytes = 200;
        express.priority = 0;
        Flow bulk = express;
        bulk.id = "bulk";
        bulk.src = "EP3";
        bulk.period_us = 50000;
        bulk.size_bytes = 1500;
        bulk.priority = 1;
        return std::vector<Flow>{express, bulk};
    };
    PreemptionConfig config{1, {0, 1}};
    Duration target(308, 10);
    Duration express_hop1(1936, 100);

    // quiet variant: one instance per busy window
    std::vector<Flow> quiet = make_flows(5000);
    auto quiet_routes = route_all(net, quiet);
    WcttReport quiet_report = analyze(net, quiet, quiet_routes, config);
    bool analytic_ok = quiet_report.flows[0].status == FlowAnalysisStatus::Bounded &&
                       quiet_report.flows[0].hops.size() == 2 &&
                       quiet_report.flows[0].hops[1].bound == target;

    // adversarial variant: a 20 us express stream carves the bulk frame
    // fragment by fragment until one arrival lands exactly on the resume of
    // its final 143-byte tail; the bound must match it exactly
    std::vector<Flow> dense = make_flows(20);
    auto dense_routes = route_all(net, dense);
    WcttReport dense_report = analyze(net, dense, dense_routes, config);
    bool dense_analytic_ok = dense_report.flows[0].status == FlowAnalysisStatus::Bounded &&
                             dense_report.flows[0].hops[1].bound == target;

    SimConfig sc;
    sc.policy = ReleasePolicy::Explicit;
    sc.horizon_us = 500000;
    sc.explicit_phases["bulk"] = Duration(0);
    // first express arrival hits the shared port 103 bytes into the bulk frame
    sc.explicit_phases["express"] =
        Rational(12336, 100) + Rational(103 * 8, 100) - express_hop1;
    SimReport rep = simulate(net, dense, dense_routes, config, sc);
    Duration sim_hop(0);
    for (const FlowSimStats& st : rep.flows)
        if (st.flow_id == "express" && st.max_delay) sim_hop = *st.max_delay - express_hop1;

    bool sim_matches = sim_hop == target;
    bool sim_safe = sim_hop <= target;
    c.report(analytic_ok && dense_analytic_ok && sim_matches && sim_safe,
             "analytic hop bound " + quiet_report.flows[0].hops[1].bound.to_decimal_string() +
                 " us; adversarial sim hop max " + sim_hop.to_decimal_string() +
                 " us (exact rational match: " + (sim_matches ? "yes" : "NO") + ")");
}

// ---- 7. priority assignment properties ----
void criterion_priority_properties() {
    Criterion c("7 priority assignment properties");
    int dominance_errors = 0, monotone_errors = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Network net = star_network(4);
        Rng rng(seed * 65537);
        GenParams gp;
        gp.count = (int)rng.uniform_int(4, 10);
        gp.period_min_us = 1000;
        gp.period_max_us = 10000;
        gp.deadline_min_us = 100;
        gp.deadline_max_us = 50000;
        gp.seed = seed * 3;
        std::vector<Flow> flows = generate(net, gp);
        auto routes = route_all(net, flows);

        PriorityAssignment swept = assign_priorities_kmeans(net, flows, routes, seed);
        std::vector<Flow> chosen = flows;
        for (Flow& f : chosen) f.priority = swept.priorities.at(f.id);
        std::int64_t swept_score = fully_preemptive_score(net, chosen, routes);
        // independent fixed-k re-runs
        auto features = normalize_features(flows, routes);
        for (int k = 1; k <= (int)std::min<std::size_t>(8, flows.size()); ++k) {
            Clustering cl = kmeans(features, k, seed);
            std::vector<int> prio = order_clusters(cl);
            std::vector<Flow> fixed = flows;
            for (std::size_t i = 0; i < fixed.size(); ++i)
                fixed[i].priority = prio[cl.assignment[i]];
            if (fully_preemptive_score(net, fixed, routes) > swept_score) ++dominance_errors;
        }

        for (int k = 1; k <= 8; ++k) {
            PriorityAssignment dm = assign_priorities_dmpo(flows, k);
            for (const Flow& a : flows)
                for (const Flow& b : flows)
                    if (dm.priorities.at(a.id) < dm.priorities.at(b.id) &&
                        a.deadline_us > b.deadline_us)
                        ++monotone_errors;
        }
    }
    c.report(dominance_errors == 0 && monotone_errors == 0,
             "100 workloads; k-sweep dominance errors " + std::to_string(dominance_errors) +
                 ", DMPO monotonicity errors " + std::to_string(monotone_errors));
}

// ---- 8. non-reproducible results: qualitative trend substitute ----
void criterion_trend(const std::string& data_dir) {
    Criterion c("8 tpflow trend on reconstructed topologies");
    bool ok = true;
    std::string detail;
    for (const char* file : {"line.json", "star.json"}) {
        Network net = io::load_network(data_dir + "/" + file);
        std::vector<std::string> eps = net.endpoint_ids();
        // one express flow, two tp candidates, two bulk (>143-byte) flows
        std::vector<Flow> flows;
        auto add = [&](const std::string& id, int prio, std::int64_t payload,
                       const std::string& src, const std::string& dst) {
            Flow f;
            f.id = id;
            f.src = src;
            f.dst = dst;
            f.period_us = 4000;
            f.deadline_us = 1000000;
            f.size_bytes = payload;
            f.priority = prio;
            flows.push_back(f);
        };
        std::string a = eps[0], b = eps[1 % eps.size()];
        std::string csrc = eps.size() > 2 ? eps[2] : a;
        std::string dsrc = eps.size() > 3 ? eps[3] : a;
        add("ctl", 0, 100, a, b);
        add("tp1", 1, 400, a, b);
        add("tp2", 1, 600, csrc, b);
        add("bulk1", 2, 1500, dsrc, b);
        add("bulk2", 2, 1500, a, b);
        auto routes = route_all(net, flows);

        WcttReport at1 = analyze(net, flows, routes, PreemptionConfig{1, {0, 1, 1}});
        WcttReport at2 = analyze(net, flows, routes, PreemptionConfig{2, {0, 1, 2}});
        Duration mean1(0), mean2(0);
        int n = 0;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            if (*flows[i].priority != 1) continue;  // the tp class under m = 2
            if (at1.flows[i].status != FlowAnalysisStatus::Bounded ||
                at2.flows[i].status != FlowAnalysisStatus::Bounded) {
                ok = false;
                continue;
            }
            mean1 += *at1.flows[i].end_to_end;
            mean2 += *at2.flows[i].end_to_end;
            ++n;
        }
        if (n == 0 || !(mean2 < mean1)) ok = false;
        Rational improvement =
            n ? (mean1 - mean2) / mean1 * Rational(100) : Rational(0);
        detail += std::string(file) + ": tp mean " + (mean1 / Rational(n)).to_decimal_string() +
                  " -> " + (mean2 / Rational(n)).to_decimal_string() + " us (-" +
                  improvement.to_decimal_string(1) + "%); ";
    }
    c.report(ok, detail + "m=2 strictly improves the tp class over m=1");
}

}  // namespace

int main(int argc, char** argv) {
    std::string data_dir = argc > 1 ? argv[1] : "data";
    criterion_constants();
    criterion_blocking_reduction();
    criterion_enumeration();
    criterion_safety_sweep();
    criterion_synthesis();
    criterion_worked_fixture();
    criterion_priority_properties();
    criterion_trend(data_dir);
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
