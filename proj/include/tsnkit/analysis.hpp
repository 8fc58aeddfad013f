#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsnkit/config.hpp"
#include "tsnkit/cpa.hpp"
#include "tsnkit/network.hpp"

namespace tsnkit {

/// One flow's standing at an egress port: its event model at this hop plus
/// the precomputed per-port timing quantities.
struct PortFlow {
    std::size_t flow_index = 0;
    std::string flow_id;
    int priority = 0;
    int preemption_class = 0;
    FlowClassKind kind = FlowClassKind::ExpressLike;
    EventModel model;
    Duration c_plus;            // longest transmission time at this port
    std::int64_t frag_plus = 0; // max preemptions of one frame
};

struct PortAnalysisContext {
    Rational rate;
    int level = 0;
    std::vector<PortFlow> flows;
};

/// Builds the PortFlow entry for `flow` on a link of the given rate.
PortFlow make_port_flow(std::size_t index, const Flow& flow, const Rational& rate, int level,
                        const EventModel& model);

/// Largest blocking by a frame that is already on the wire when the analyzed
/// frame arrives. Empty maxima contribute zero.
Duration lower_priority_blocking(const PortAnalysisContext& ctx, std::size_t self);

/// Backlog of equal-priority frames arrived by `arrival`, the q-1 own
/// predecessors, and (for preemptable classes) all non-final own fragments.
Duration same_priority_blocking(const PortAnalysisContext& ctx, std::size_t self, std::int64_t q,
                                const Duration& arrival);

/// Service given to strictly higher priorities within a window of length dt.
Duration higher_priority_interference(const PortAnalysisContext& ctx, std::size_t self,
                                      const Duration& dt);

/// Cost of preemption events within the busy window. Zero for express
/// frames; otherwise 24 wire bytes per event, with the event count capped by
/// both the higher-class arrivals and the fragmentation limits.
Duration preemption_overhead(const PortAnalysisContext& ctx, std::size_t self, const Duration& dt,
                             std::int64_t q, const Duration& arrival);

enum class FixedPointStatus { Converged, Diverged };

struct QueuingDelay {
    FixedPointStatus status = FixedPointStatus::Diverged;
    Duration value;             // meaningful when Converged
    std::int64_t iterations = 0;
};

inline constexpr std::int64_t kFixedPointIterationCap = 1000000;
inline constexpr std::int64_t kBusyWindowInstanceCap = 10000;

/// Least solution of the self-referential queuing-delay equation for the
/// q-th instance arriving at `arrival`, iterated from seed C+.
QueuingDelay queuing_delay(const PortAnalysisContext& ctx, std::size_t self, std::int64_t q,
                           const Duration& arrival);

struct LocalWctt {
    FixedPointStatus status = FixedPointStatus::Diverged;
    Duration bound;             // max over the busy window, when Converged
    std::int64_t deepest_q = 0;
};

/// Per-hop worst-case traversal time: sweeps instances q = 1, 2, ... until
/// the busy window closes and maximizes the per-instance bound.
LocalWctt wctt_local(const PortAnalysisContext& ctx, std::size_t self);

/// Spec-facing wrapper: Unschedulable when the bound cannot be computed or
/// exceeds the remaining deadline budget at this hop.
struct BudgetedWctt {
    enum class Outcome { Bounded, DeadlineExceeded, Diverged } outcome;
    std::optional<Duration> bound;
    std::int64_t deepest_q = 0;
};
BudgetedWctt wctt_local_with_budget(const PortAnalysisContext& ctx, std::size_t self,
                                    const Duration& budget);

enum class FlowAnalysisStatus {
    Bounded,     // finite end-to-end bound computed
    Diverged,    // a hop's busy window or fixed point does not close
    Dependent,   // shares a port downstream of a diverged flow; no sound bound
    Unstable,    // global propagation did not settle within the round cap
};

struct HopBound {
    PortId port;
    Duration bound;
    std::int64_t deepest_q = 0;
};

struct FlowVerdict {
    std::string flow_id;
    FlowAnalysisStatus status = FlowAnalysisStatus::Bounded;
    std::vector<HopBound> hops;           // bounded prefix of the path
    std::optional<Duration> end_to_end;   // set iff status == Bounded
    Duration deadline;
    bool schedulable = false;             // Bounded && end_to_end <= deadline
    std::optional<Duration> slack;        // deadline - end_to_end when Bounded
    std::string detail;                   // divergence/dependency note
};

struct WcttReport {
    std::vector<FlowVerdict> flows;       // in flowset order
    bool all_schedulable = false;
    std::int64_t propagation_rounds = 0;
};

struct AnalysisOptions {
    /// Constant per-switch processing delay added once per hop (default 0).
    Duration switch_processing;
    std::int64_t round_cap = 64;
};

/// End-to-end analysis of the whole flowset under `config`: round-based
/// event-model propagation along every path until the models settle, then a
/// verdict per flow.
WcttReport analyze(const Network& net, std::vector<Flow> flows,
                   const std::map<std::string, Path>& routes, const PreemptionConfig& config,
                   const AnalysisOptions& options = {});

/// Aggregate schedulability: true iff every flow is bounded and meets its
/// deadline.
bool is_schedulable(const WcttReport& report);

const char* to_string(FlowAnalysisStatus status);

}  // namespace tsnkit
