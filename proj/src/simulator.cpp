#include "tsnkit/simulator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <deque>
#include <future>
#include <queue>
#include <stdexcept>

#include "tsnkit/cpa.hpp"
#include "tsnkit/workload.hpp"

namespace tsnkit {

namespace {

struct FrameInstance {
    std::size_t flow = 0;
    std::int64_t seq = 0;  // 1-based release index
    Duration release_time;
    std::size_t hop = 0;
};

enum class EventKind : int { Completion = 0, Cut = 1, Arrival = 2 };

struct Event {
    Duration time;
    EventKind kind;
    int priority;
    int pclass;
    std::size_t flow;
    std::int64_t seq;
    std::size_t port_index;
    std::size_t frame_index;
    std::uint64_t generation;  // validity token for Completion/Cut
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (!(a.time == b.time)) return b.time < a.time;
        if (a.kind != b.kind) return (int)a.kind > (int)b.kind;
        if (a.priority != b.priority) return a.priority > b.priority;
        if (a.pclass != b.pclass) return a.pclass > b.pclass;
        if (a.flow != b.flow) return a.flow > b.flow;
        return a.seq > b.seq;
    }
};

struct QueuedFrame {
    std::size_t frame_index;
};

struct ActiveTransmission {
    std::size_t frame_index = 0;
    Rational remaining_bytes;            // at fragment start
    Duration fragment_start;
    bool cut_scheduled = false;
};

struct SuspendedFrame {
    std::size_t frame_index;
    Rational remaining_bytes;
    int pclass;
};

struct PortState {
    PortId id;
    Rational rate;                        // bits per microsecond
    std::array<std::deque<QueuedFrame>, 8> queues;
    std::optional<ActiveTransmission> active;
    std::vector<SuspendedFrame> stack;    // class strictly decreasing toward the back
    std::uint64_t generation = 0;
};

struct Simulation {
    const Network& net;
    const std::vector<Flow>& flows;
    const SimConfig& cfg;
    int level;

    std::vector<std::vector<std::size_t>> flow_ports;  // per flow: port indices along path
    std::vector<PortState> ports;
    std::map<PortId, std::size_t> port_index;
    std::vector<FrameInstance> frames;
    std::priority_queue<Event, std::vector<Event>, EventLater> events;
    std::vector<FlowSimStats> stats;
    std::vector<Duration> delay_sums;
    std::int64_t events_processed = 0;

    Simulation(const Network& n, const std::vector<Flow>& f, const SimConfig& c, int lvl)
        : net(n), flows(f), cfg(c), level(lvl) {}

    Rational bytes_per_us(const PortState& p) const { return p.rate / Rational(8); }

    int flow_priority(std::size_t i) const { return *flows[i].priority; }
    int flow_class(std::size_t i) const { return *flows[i].preemption_class; }
    std::int64_t flow_wire_bytes(std::size_t i) const { return wire_bytes(flows[i].size_bytes); }

    void trace(const Duration& time, const PortState& port, const std::string& event,
               std::size_t frame_index, const std::string& detail) {
        if (!cfg.trace) return;
        const FrameInstance& fr = frames[frame_index];
        cfg.trace(TraceRecord{time, port.id.from + "->" + port.id.to, event,
                              flows[fr.flow].id, fr.seq, detail});
    }

    void push_event(const Duration& time, EventKind kind, std::size_t frame_index,
                    std::size_t port_idx, std::uint64_t generation) {
        const FrameInstance& fr = frames[frame_index];
        events.push(Event{time, kind, flow_priority(fr.flow), flow_class(fr.flow), fr.flow,
                          fr.seq, port_idx, frame_index, generation});
    }

    void enqueue(PortState& port, std::size_t frame_index) {
        const FrameInstance& fr = frames[frame_index];
        port.queues[(std::size_t)flow_priority(fr.flow)].push_back(QueuedFrame{frame_index});
    }

    /// Smallest class number pending in any queue, or INT_MAX.
    int best_pending_class(const PortState& port) const {
        for (const auto& q : port.queues)
            if (!q.empty()) {
                // queues are scanned by priority; the first non-empty queue
                // has the highest priority and therefore the smallest class
                return flow_class(frames[q.front().frame_index].flow);
            }
        return INT32_MAX;
    }

    void schedule_completion(const Duration& now, std::size_t port_idx) {
        PortState& port = ports[port_idx];
        ActiveTransmission& act = *port.active;
        Duration completion = now + act.remaining_bytes / bytes_per_us(port);
        push_event(completion, EventKind::Completion, act.frame_index, port_idx,
                   port.generation);
    }

    /// If a pending frame outranks the active one by class, schedule the cut
    /// at the earliest instant where the transmitted fragment has reached 84
    /// bytes and at least 60 raw bytes remain.
    void maybe_schedule_cut(const Duration& now, std::size_t port_idx) {
        PortState& port = ports[port_idx];
        if (!port.active || port.active->cut_scheduled) return;
        ActiveTransmission& act = *port.active;
        int active_class = flow_class(frames[act.frame_index].flow);
        if (best_pending_class(port) >= active_class) return;

        Rational bpu = bytes_per_us(port);
        Duration earliest_sent = act.fragment_start + Rational(kMinFrameBytes) / bpu;
        Rational cuttable = act.remaining_bytes - Rational(kFragmentPayloadQuantumBytes);
        if (cuttable < Rational(kMinFrameBytes)) return;  // whole fragment is non-preemptable
        Duration latest = act.fragment_start + cuttable / bpu;
        Duration cut_at = Rational::max(now, earliest_sent);
        if (cut_at > latest) return;
        act.cut_scheduled = true;
        push_event(cut_at, EventKind::Cut, act.frame_index, port_idx, port.generation);
    }

    void start_transmission(const Duration& now, std::size_t port_idx, std::size_t frame_index,
                            const Rational& remaining_bytes, const char* label) {
        PortState& port = ports[port_idx];
        port.active = ActiveTransmission{frame_index, remaining_bytes, now, false};
        schedule_completion(now, port_idx);
        trace(now, port, label, frame_index, remaining_bytes.to_decimal_string(2) + " bytes");
    }

    void run_scheduler(const Duration& now, std::size_t port_idx) {
        PortState& port = ports[port_idx];
        if (port.active) {
            maybe_schedule_cut(now, port_idx);
            return;
        }
        int limit_class = port.stack.empty() ? INT32_MAX : port.stack.back().pclass;
        // Highest-priority queue head whose class outranks the suspended top.
        for (std::size_t prio = 0; prio < port.queues.size(); ++prio) {
            auto& queue = port.queues[prio];
            if (queue.empty()) continue;
            std::size_t frame_index = queue.front().frame_index;
            if (flow_class(frames[frame_index].flow) < limit_class) {
                queue.pop_front();
                start_transmission(now, port_idx, frame_index,
                                   Rational(flow_wire_bytes(frames[frame_index].flow)), "start");
                maybe_schedule_cut(now, port_idx);
                return;
            }
            break;  // heads below this priority only carry equal or larger classes
        }
        if (!port.stack.empty()) {
            SuspendedFrame victim = port.stack.back();
            port.stack.pop_back();
            start_transmission(now, port_idx, victim.frame_index, victim.remaining_bytes,
                               "resume");
            maybe_schedule_cut(now, port_idx);
        }
    }

    void handle_arrival(const Event& ev) {
        PortState& port = ports[ev.port_index];
        enqueue(port, ev.frame_index);
        trace(ev.time, port, "enqueue", ev.frame_index, "");
        run_scheduler(ev.time, ev.port_index);
    }

    void handle_completion(const Event& ev) {
        PortState& port = ports[ev.port_index];
        if (ev.generation != port.generation || !port.active ||
            port.active->frame_index != ev.frame_index)
            return;  // superseded by a cut
        trace(ev.time, port, "complete", ev.frame_index, "");
        port.active.reset();
        ++port.generation;
        FrameInstance& fr = frames[ev.frame_index];
        const auto& path = flow_ports[fr.flow];
        if (fr.hop + 1 < path.size()) {
            fr.hop += 1;  // forwarding is always into a switch
            push_event(ev.time + cfg.switch_processing, EventKind::Arrival, ev.frame_index,
                       path[fr.hop], 0);
        } else {
            Duration delay = ev.time - fr.release_time;
            FlowSimStats& st = stats[fr.flow];
            st.delivered += 1;
            if (!st.max_delay || delay > *st.max_delay) st.max_delay = delay;
            delay_sums[fr.flow] += delay;
            if (delay > Rational(flows[fr.flow].deadline_us)) st.deadline_misses += 1;
        }
        run_scheduler(ev.time, ev.port_index);
    }

    void handle_cut(const Event& ev) {
        PortState& port = ports[ev.port_index];
        if (ev.generation != port.generation || !port.active ||
            port.active->frame_index != ev.frame_index)
            return;  // stale
        ActiveTransmission act = *port.active;
        int active_class = flow_class(frames[act.frame_index].flow);
        if (best_pending_class(port) >= active_class) {
            // the preemptor was served meanwhile; nothing to do
            port.active->cut_scheduled = false;
            return;
        }
        Rational sent = (ev.time - act.fragment_start) * bytes_per_us(port);
        Rational remaining = act.remaining_bytes - sent;
        remaining += Rational(kPreemptionOverheadBytes);
        port.active.reset();
        ++port.generation;
        port.stack.push_back(SuspendedFrame{act.frame_index, remaining, active_class});
        stats[frames[act.frame_index].flow].preemptions_suffered += 1;
        // the highest-priority pending strictly-higher-class frame is the preemptor
        for (const auto& q : port.queues) {
            if (q.empty()) continue;
            std::size_t idx = q.front().frame_index;
            if (flow_class(frames[idx].flow) < active_class) {
                stats[frames[idx].flow].preemptions_caused += 1;
                break;
            }
        }
        trace(ev.time, port, "preempt", act.frame_index,
              "residual " + remaining.to_decimal_string(2) + " bytes");
        run_scheduler(ev.time, ev.port_index);
    }
};

}  // namespace

SimReport simulate(const Network& net, std::vector<Flow> flows,
                   const std::map<std::string, Path>& routes, const PreemptionConfig& config,
                   const SimConfig& sim_config) {
    if (sim_config.horizon_us <= 0) throw std::invalid_argument("simulate: horizon must be > 0");
    ValidationResult valid = validate_config(flows, config);
    if (valid.structural_error)
        throw std::invalid_argument("simulate: " + *valid.structural_error);
    if (!valid.ok) throw std::invalid_argument("simulate: invalid preemption configuration");
    apply_config(flows, config);

    std::int64_t max_period = 0;
    for (const Flow& f : flows) max_period = std::max(max_period, f.period_us);
    SimReport report;
    if (sim_config.horizon_us < 10 * max_period)
        throw std::invalid_argument("simulate: horizon below 10x the largest period");
    if (sim_config.horizon_us < 100 * max_period)
        report.warnings.push_back("horizon below 100x the largest period; maxima may be weak");

    Simulation sim(net, flows, sim_config, config.level);
    sim.stats.resize(flows.size());
    sim.delay_sums.assign(flows.size(), Duration(0));
    sim.flow_ports.resize(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        sim.stats[i].flow_id = flows[i].id;
        auto it = routes.find(flows[i].id);
        if (it == routes.end())
            throw std::invalid_argument("simulate: flow '" + flows[i].id + "' has no route");
        for (const PortId& port : it->second.links) {
            auto [pit, inserted] = sim.port_index.try_emplace(port, sim.ports.size());
            if (inserted) sim.ports.push_back(PortState{port, net.link_rate(port), {}, {}, {}, 0});
            sim.flow_ports[i].push_back(pit->second);
        }
    }

    // Release phases.
    Rng rng(sim_config.seed);
    std::vector<Duration> phases(flows.size(), Duration(0));
    for (std::size_t i = 0; i < flows.size(); ++i) {
        switch (sim_config.policy) {
            case ReleasePolicy::SeededRandom:
                phases[i] = Rational(rng.uniform_int(0, flows[i].period_us - 1));
                break;
            case ReleasePolicy::CriticalInstant:
                phases[i] = Duration(0);
                break;
            case ReleasePolicy::Explicit: {
                auto it = sim_config.explicit_phases.find(flows[i].id);
                if (it != sim_config.explicit_phases.end()) phases[i] = it->second;
                break;
            }
        }
        sim.stats[i].phase = phases[i];
    }

    Duration horizon = Rational(sim_config.horizon_us);
    auto release = [&](std::size_t flow, std::int64_t seq) {
        Duration at = phases[flow] + Rational(seq - 1) * Rational(flows[flow].period_us);
        if (at >= horizon) return;
        sim.frames.push_back(FrameInstance{flow, seq, at, 0});
        sim.stats[flow].released += 1;
        sim.push_event(at, EventKind::Arrival, sim.frames.size() - 1, sim.flow_ports[flow][0], 0);
    };
    for (std::size_t i = 0; i < flows.size(); ++i) release(i, 1);

    std::vector<std::int64_t> last_seq(flows.size(), 1);
    while (!sim.events.empty()) {
        Event ev = sim.events.top();
        if (ev.time > horizon) break;
        sim.events.pop();
        ++sim.events_processed;
        if (sim.events_processed > sim_config.event_cap)
            throw std::runtime_error("simulate: event cap exceeded");
        switch (ev.kind) {
            case EventKind::Arrival:
                // releases chain lazily so the queue stays small
                if (sim.frames[ev.frame_index].hop == 0 && ev.seq == last_seq[ev.flow]) {
                    last_seq[ev.flow] += 1;
                    release(ev.flow, last_seq[ev.flow]);
                }
                sim.handle_arrival(ev);
                break;
            case EventKind::Completion: sim.handle_completion(ev); break;
            case EventKind::Cut: sim.handle_cut(ev); break;
        }
    }

    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (sim.stats[i].delivered > 0)
            sim.stats[i].mean_delay = sim.delay_sums[i] / Rational(sim.stats[i].delivered);
        report.frames_in_flight += sim.stats[i].released - sim.stats[i].delivered;
    }
    report.flows = std::move(sim.stats);
    report.events_processed = sim.events_processed;
    return report;
}

CrossValidation cross_validate(const Network& net, const std::vector<Flow>& flows,
                               const std::map<std::string, Path>& routes,
                               const PreemptionConfig& config, const SimConfig& sim_config,
                               int runs, const AnalysisOptions& options, int threads) {
    if (runs < 1) throw std::invalid_argument("cross_validate: need at least one run");
    CrossValidation cv;
    cv.analysis = analyze(net, flows, routes, config, options);
    std::map<std::string, std::optional<Duration>> bounds;
    for (const FlowVerdict& v : cv.analysis.flows) bounds[v.flow_id] = v.end_to_end;

    cv.runs.resize(runs);
    auto run_one = [&](int r) {
        SimConfig run_cfg = sim_config;
        run_cfg.seed = sim_config.seed + (std::uint64_t)r;
        run_cfg.trace = nullptr;  // traces are per-run artifacts, not batch ones
        cv.runs[r] = simulate(net, flows, routes, config, run_cfg);
    };
    if (threads <= 1) {
        for (int r = 0; r < runs; ++r) run_one(r);
    } else {
        std::vector<std::future<void>> tasks;
        std::atomic<int> next{0};
        int workers = std::min(threads, runs);
        for (int w = 0; w < workers; ++w)
            tasks.push_back(std::async(std::launch::async, [&] {
                for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) run_one(r);
            }));
        for (auto& t : tasks) t.get();
    }

    std::map<std::string, std::optional<Duration>> measured;
    for (int r = 0; r < runs; ++r) {
        cv.seeds.push_back(sim_config.seed + (std::uint64_t)r);
        for (const FlowSimStats& st : cv.runs[r].flows) {
            if (!st.max_delay) continue;
            auto& m = measured[st.flow_id];
            if (!m || *st.max_delay > *m) m = st.max_delay;
        }
    }

    for (const Flow& f : flows) {
        FlowMargin fm;
        fm.flow_id = f.id;
        fm.measured = measured.count(f.id) ? measured[f.id] : std::nullopt;
        fm.bound = bounds.at(f.id);
        if (!fm.bound) {
            fm.note = "no analytic bound (flow not schedulable analyzable); excluded";
        } else if (!fm.measured) {
            fm.note = "no frame delivered within the horizon";
        } else {
            fm.margin = *fm.bound - *fm.measured;
            fm.violation = *fm.measured > *fm.bound;
            if (fm.violation) {
                cv.safe = false;
                fm.note = "SAFETY VIOLATION: measured exceeds bound";
            }
        }
        cv.flows.push_back(std::move(fm));
    }
    return cv;
}

}  // namespace tsnkit
