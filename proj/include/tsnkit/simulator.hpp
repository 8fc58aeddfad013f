#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsnkit/analysis.hpp"
#include "tsnkit/config.hpp"
#include "tsnkit/network.hpp"

namespace tsnkit {

enum class ReleasePolicy {
    SeededRandom,     // per-flow phase uniform in [0, T), integer microseconds
    CriticalInstant,  // every flow releases at t = 0
    Explicit,         // phases taken from SimConfig::explicit_phases
};

struct TraceRecord {
    Duration time;
    std::string port;
    std::string event;
    std::string flow;
    std::int64_t q = 0;
    std::string detail;
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::int64_t horizon_us = 0;
    ReleasePolicy policy = ReleasePolicy::SeededRandom;
    std::map<std::string, Duration> explicit_phases;
    /// Store-and-forward processing spent inside each switch; the same knob
    /// as AnalysisOptions::switch_processing.
    Duration switch_processing;
    std::int64_t event_cap = 200000000;
    std::function<void(const TraceRecord&)> trace;  // optional
};

struct FlowSimStats {
    std::string flow_id;
    std::int64_t released = 0;
    std::int64_t delivered = 0;
    std::int64_t deadline_misses = 0;
    std::optional<Duration> max_delay;   // mWCTT, unset when nothing delivered
    std::optional<Duration> mean_delay;
    std::int64_t preemptions_suffered = 0;
    std::int64_t preemptions_caused = 0;
    Duration phase;
};

struct SimReport {
    std::vector<FlowSimStats> flows;  // in flowset order
    std::int64_t events_processed = 0;
    std::int64_t frames_in_flight = 0;  // still in the network at the horizon
    std::vector<std::string> warnings;
};

/// Deterministic store-and-forward simulation of the flowset under `config`.
/// Strict priority per port, FIFO within a priority, preemption only across
/// classes at byte positions where both the transmitted and the remaining
/// fragment stay legal; each preemption charges 24 wire bytes to the victim.
SimReport simulate(const Network& net, std::vector<Flow> flows,
                   const std::map<std::string, Path>& routes, const PreemptionConfig& config,
                   const SimConfig& sim_config);

struct FlowMargin {
    std::string flow_id;
    std::optional<Duration> measured;  // max observed end-to-end delay
    std::optional<Duration> bound;     // analytic WCTT, unset when not bounded
    std::optional<Duration> margin;    // bound - measured when both exist
    bool violation = false;            // measured > bound
    std::string note;
};

struct CrossValidation {
    std::vector<FlowMargin> flows;
    bool safe = true;  // no flow above its bound
    WcttReport analysis;
    std::vector<SimReport> runs;
    std::vector<std::uint64_t> seeds;  // replay handles for the runs
};

/// Runs the analysis once and `runs` seeded simulations (seed, seed+1, ...),
/// comparing each flow's worst observed delay against its analytic bound.
/// Flows without a finite bound are excluded from the comparison with a note.
/// Independent runs may execute on up to `threads` threads; the merged
/// output is identical regardless of thread count.
CrossValidation cross_validate(const Network& net, const std::vector<Flow>& flows,
                               const std::map<std::string, Path>& routes,
                               const PreemptionConfig& config, const SimConfig& sim_config,
                               int runs, const AnalysisOptions& options = {}, int threads = 1);

}  // namespace tsnkit
