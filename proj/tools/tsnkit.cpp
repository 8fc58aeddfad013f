#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsnkit/analysis.hpp"
#include "tsnkit/io.hpp"
#include "tsnkit/network.hpp"
#include "tsnkit/priority.hpp"
#include "tsnkit/simulator.hpp"
#include "tsnkit/synthesis.hpp"
#include "tsnkit/workload.hpp"

namespace {

using namespace tsnkit;

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitUnschedulable = 2;
constexpr int kExitSafetyViolation = 3;
constexpr int kExitUsage = 64;

int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    int threads = hw == 0 ? 1 : (int)hw;
    if (const char* env = std::getenv("TSNKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < threads) threads = cap;
        if (cap >= 1 && threads < 1) threads = cap;
    }
    return threads < 1 ? 1 : threads;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text << "\n";
    else
        io::write_text(out_path, text + "\n");
}

void emit_json(const nlohmann::ordered_json& j, const std::string& out_path) {
    emit(j.dump(2), out_path);
}

/// Configuration for a run: an explicit file wins, then per-flow class
/// fields, then the lexicographically first valid configuration at the
/// requested level (level p-1 is exactly the fully preemptive identity).
PreemptionConfig resolve_config(const std::vector<Flow>& flows, const std::string& config_file,
                                std::optional<int> levels) {
    if (!config_file.empty()) return io::load_config(config_file);
    bool all_classes = !flows.empty();
    for (const Flow& f : flows)
        if (!f.preemption_class) all_classes = false;
    if (all_classes) {
        std::map<int, int> ranks = priority_ranks(flows);
        PreemptionConfig c;
        c.entries.assign(ranks.size(), 0);
        int level = 0;
        for (const Flow& f : flows) {
            c.entries[ranks.at(*f.priority)] = *f.preemption_class;
            level = std::max(level, *f.preemption_class);
        }
        c.level = level;
        return c;
    }
    int p = (int)distinct_priorities(flows).size();
    int m = levels.value_or(0);
    if (m < 0 || m > p - 1)
        throw std::invalid_argument("--levels must be between 0 and " + std::to_string(p - 1) +
                                    " for this flowset");
    return valid_configs(p, m).front();
}

struct CommonInputs {
    std::string network_path;
    std::string flows_path;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WCTT analysis, configuration synthesis and simulation for "
                 "multi-level-preemption TSN networks"};
    app.require_subcommand(1);
    app.fallthrough();  // --out may follow the subcommand

    std::string out_path;
    app.add_option("--out", out_path, "Write the report here instead of stdout");

    // ---- analyze ----
    auto* analyze_cmd = app.add_subcommand("analyze", "Compute per-flow WCTT bounds");
    CommonInputs an_in;
    std::string an_config_file, an_format = "json";
    std::optional<int> an_levels;
    bool an_strict = false;
    analyze_cmd->add_option("network", an_in.network_path, "Network JSON")->required();
    analyze_cmd->add_option("flows", an_in.flows_path, "Flow JSON")->required();
    analyze_cmd->add_option("--levels", an_levels, "Preemption level m (canonical first config)");
    analyze_cmd->add_option("--config-file", an_config_file, "Preemption configuration JSON");
    analyze_cmd->add_option("--format", an_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    analyze_cmd->add_flag("--strict", an_strict, "Exit 2 when any flow is unschedulable");

    // ---- synthesize ----
    auto* synth_cmd = app.add_subcommand("synthesize",
                                         "Find the minimal preemption level and configuration");
    CommonInputs sy_in;
    synth_cmd->add_option("network", sy_in.network_path, "Network JSON")->required();
    synth_cmd->add_option("flows", sy_in.flows_path, "Flow JSON")->required();

    // ---- prioritize ----
    auto* prio_cmd = app.add_subcommand("prioritize", "Assign priorities to flows");
    CommonInputs pr_in;
    std::string pr_method = "kmeans";
    std::uint64_t pr_seed = 0;
    std::optional<int> pr_k;
    std::string pr_emit_flows;
    prio_cmd->add_option("network", pr_in.network_path, "Network JSON")->required();
    prio_cmd->add_option("flows", pr_in.flows_path, "Flow JSON")->required();
    prio_cmd->add_option("--method", pr_method, "kmeans or dmpo")
        ->check(CLI::IsMember({"kmeans", "dmpo"}));
    prio_cmd->add_option("--seed", pr_seed, "Clustering seed");
    prio_cmd->add_option("--k", pr_k, "Fix the priority-level count (dmpo only)");
    prio_cmd->add_option("--emit-flows", pr_emit_flows, "Also write the prioritized flowset here");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Run the discrete-event simulator");
    CommonInputs si_in;
    std::string si_config_file, si_phases = "random", si_trace;
    std::optional<int> si_levels;
    std::uint64_t si_seed = 0;
    std::int64_t si_horizon = 0;
    sim_cmd->add_option("network", si_in.network_path, "Network JSON")->required();
    sim_cmd->add_option("flows", si_in.flows_path, "Flow JSON")->required();
    sim_cmd->add_option("--levels", si_levels, "Preemption level m (canonical first config)");
    sim_cmd->add_option("--config-file", si_config_file, "Preemption configuration JSON");
    sim_cmd->add_option("--seed", si_seed, "Phase seed");
    sim_cmd->add_option("--horizon-us", si_horizon, "Simulation horizon")->required();
    sim_cmd->add_option("--phases", si_phases, "random or critical")
        ->check(CLI::IsMember({"random", "critical"}));
    sim_cmd->add_option("--trace", si_trace, "Write an NDJSON event trace here");

    // ---- validate ----
    auto* val_cmd = app.add_subcommand("validate",
                                       "Cross-validate analytic bounds against simulation");
    CommonInputs va_in;
    std::string va_config_file;
    std::optional<int> va_levels;
    std::uint64_t va_seed = 0;
    std::int64_t va_horizon = 0;
    int va_runs = 10;
    val_cmd->add_option("network", va_in.network_path, "Network JSON")->required();
    val_cmd->add_option("flows", va_in.flows_path, "Flow JSON")->required();
    val_cmd->add_option("--levels", va_levels, "Preemption level m (canonical first config)");
    val_cmd->add_option("--config-file", va_config_file, "Preemption configuration JSON");
    val_cmd->add_option("--seed", va_seed, "First phase seed");
    val_cmd->add_option("--horizon-us", va_horizon, "Simulation horizon (default 100x max period)");
    val_cmd->add_option("--runs", va_runs, "Number of seeded runs");

    // ---- generate ----
    auto* gen_cmd = app.add_subcommand("generate", "Generate a random flowset");
    std::string ge_network_path;
    GenParams ge;
    gen_cmd->add_option("network", ge_network_path, "Network JSON")->required();
    gen_cmd->add_option("--count", ge.count, "Number of flows")->required();
    gen_cmd->add_option("--seed", ge.seed, "Generator seed");
    gen_cmd->add_option("--period-min-us", ge.period_min_us, "Minimum period");
    gen_cmd->add_option("--period-max-us", ge.period_max_us, "Maximum period");
    gen_cmd->add_option("--deadline-min-us", ge.deadline_min_us, "Minimum deadline");
    gen_cmd->add_option("--deadline-max-us", ge.deadline_max_us, "Maximum deadline");
    gen_cmd->add_option("--size-min-bytes", ge.size_min_bytes, "Minimum payload");
    gen_cmd->add_option("--size-max-bytes", ge.size_max_bytes, "Maximum payload");
    gen_cmd->add_flag("--constrained", ge.constrained_deadlines, "Force deadline <= period");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return kExitUsage;
    }

    try {
        if (*analyze_cmd) {
            Network net = io::load_network(an_in.network_path);
            std::vector<Flow> flows = io::load_flows(an_in.flows_path);
            auto routes = route_all(net, flows);
            PreemptionConfig config = resolve_config(flows, an_config_file, an_levels);
            WcttReport report = analyze(net, flows, routes, config);
            if (an_format == "csv")
                emit(io::wctt_report_to_csv(report), out_path);
            else
                emit_json(io::wctt_report_to_json(report), out_path);
            if (an_strict && !report.all_schedulable) return kExitUnschedulable;
            return kExitOk;
        }
        if (*synth_cmd) {
            Network net = io::load_network(sy_in.network_path);
            std::vector<Flow> flows = io::load_flows(sy_in.flows_path);
            auto routes = route_all(net, flows);
            SynthesisResult result = assign_preemption_class(net, flows, routes);
            emit_json(io::synthesis_to_json(result, flows), out_path);
            return kExitOk;
        }
        if (*prio_cmd) {
            Network net = io::load_network(pr_in.network_path);
            std::vector<Flow> flows = io::load_flows(pr_in.flows_path);
            auto routes = route_all(net, flows);
            PriorityAssignment assignment;
            if (pr_method == "kmeans") {
                assignment = assign_priorities_kmeans(net, flows, routes, pr_seed);
            } else if (pr_k) {
                assignment = assign_priorities_dmpo(flows, *pr_k);
            } else {
                // sweep k like the k-means path and keep the best score
                std::int64_t best_score = -1;
                for (int k = 1; k <= (int)std::min<std::size_t>(8, flows.size()); ++k) {
                    PriorityAssignment cand = assign_priorities_dmpo(flows, k);
                    std::vector<Flow> scored = flows;
                    for (Flow& f : scored) f.priority = cand.priorities.at(f.id);
                    std::int64_t score = fully_preemptive_score(net, scored, routes);
                    assignment.per_k_scores.push_back(score);
                    if (score > best_score) {
                        best_score = score;
                        cand.per_k_scores = assignment.per_k_scores;
                        std::swap(assignment.priorities, cand.priorities);
                        assignment.chosen_k = k;
                    }
                }
            }
            emit_json(io::priority_assignment_to_json(assignment, pr_method), out_path);
            if (!pr_emit_flows.empty()) {
                for (Flow& f : flows) f.priority = assignment.priorities.at(f.id);
                io::write_text(pr_emit_flows, io::flows_to_json(flows).dump(2) + "\n");
            }
            return kExitOk;
        }
        if (*sim_cmd) {
            Network net = io::load_network(si_in.network_path);
            std::vector<Flow> flows = io::load_flows(si_in.flows_path);
            auto routes = route_all(net, flows);
            PreemptionConfig config = resolve_config(flows, si_config_file, si_levels);
            SimConfig sc;
            sc.seed = si_seed;
            sc.horizon_us = si_horizon;
            sc.policy = si_phases == "critical" ? ReleasePolicy::CriticalInstant
                                                : ReleasePolicy::SeededRandom;
            std::ofstream trace_out;
            if (!si_trace.empty()) {
                trace_out.open(si_trace);
                if (!trace_out) throw std::runtime_error("cannot write '" + si_trace + "'");
                sc.trace = [&trace_out](const TraceRecord& r) {
                    nlohmann::ordered_json j;
                    j["time_ns"] = (r.time * Rational(1000)).to_decimal_string(3);
                    j["port"] = r.port;
                    j["event"] = r.event;
                    j["flow"] = r.flow;
                    j["q"] = r.q;
                    j["detail"] = r.detail;
                    trace_out << j.dump() << "\n";
                };
            }
            SimReport report = simulate(net, flows, routes, config, sc);
            emit_json(io::sim_report_to_json(report), out_path);
            return kExitOk;
        }
        if (*val_cmd) {
            Network net = io::load_network(va_in.network_path);
            std::vector<Flow> flows = io::load_flows(va_in.flows_path);
            auto routes = route_all(net, flows);
            PreemptionConfig config = resolve_config(flows, va_config_file, va_levels);
            SimConfig sc;
            sc.seed = va_seed;
            if (va_horizon > 0) {
                sc.horizon_us = va_horizon;
            } else {
                std::int64_t max_period = 1;
                for (const Flow& f : flows) max_period = std::max(max_period, f.period_us);
                sc.horizon_us = 100 * max_period;
            }
            CrossValidation cv =
                cross_validate(net, flows, routes, config, sc, va_runs, {}, thread_budget());
            emit_json(io::cross_validation_to_json(cv), out_path);
            return cv.safe ? kExitOk : kExitSafetyViolation;
        }
        if (*gen_cmd) {
            Network net = io::load_network(ge_network_path);
            std::vector<Flow> flows = generate(net, ge);
            emit_json(io::flows_to_json(flows), out_path);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelError;
    }
    return kExitUsage;
}
