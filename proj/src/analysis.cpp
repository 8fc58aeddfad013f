#include "tsnkit/analysis.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsnkit {

namespace {

const PortFlow& self_flow(const PortAnalysisContext& ctx, std::size_t self) {
    if (self >= ctx.flows.size())
        throw std::invalid_argument("analysis: flow index out of range");
    return ctx.flows[self];
}

bool preemptable(const PortFlow& f) { return f.kind != FlowClassKind::ExpressLike; }

/// Completion term of the analyzed frame: the whole frame for express, the
/// final minimum-size fragment for preemptable classes.
Duration completion_term(const PortAnalysisContext& ctx, const PortFlow& f) {
    if (f.kind == FlowClassKind::ExpressLike) return f.c_plus;
    return frame_time(kMinFrameBytes, ctx.rate);
}

/// Asymptotic growth rate (per microsecond) of the preemption-overhead term.
/// Slopes are divergence guards, not bound values, so double precision is
/// enough; the iteration and instance caps remain the exact backstop.
double po_slope(const PortAnalysisContext& ctx, const PortFlow& me, bool include_busy_terms) {
    if (!preemptable(me)) return 0.0;
    double higher_class_arrivals = 0.0;  // term (b): arrivals from higher classes
    double fragment_budget = 0.0;        // term (c): fragmentation limits
    for (const PortFlow& j : ctx.flows) {
        double period = j.model.period.to_double();
        if (j.preemption_class < me.preemption_class) higher_class_arrivals += 1.0 / period;
        bool hp = j.priority < me.priority;
        bool sp = &j != &me && j.priority == me.priority;
        if (hp && preemptable(j)) fragment_budget += (double)j.frag_plus / period;
        if (include_busy_terms && sp) fragment_budget += (double)j.frag_plus / period;
    }
    if (include_busy_terms) fragment_budget += (double)me.frag_plus / me.model.period.to_double();
    return frame_time(kPreemptionOverheadBytes, ctx.rate).to_double() *
           std::min(higher_class_arrivals, fragment_budget);
}

/// Growth rate of the fixed-point right-hand side in its own value. The
/// iteration converges exactly when this is below one.
double fixed_point_slope(const PortAnalysisContext& ctx, const PortFlow& me) {
    double slope = 0.0;
    for (const PortFlow& j : ctx.flows)
        if (j.priority < me.priority) slope += j.c_plus.to_double() / j.model.period.to_double();
    return slope + po_slope(ctx, me, false);
}

/// Growth rate of the q-instance busy time relative to the instance spacing.
double busy_window_slope(const PortAnalysisContext& ctx, const PortFlow& me) {
    double slope = me.c_plus.to_double() / me.model.period.to_double();
    for (const PortFlow& j : ctx.flows) {
        if (&j == &me) continue;
        if (j.priority <= me.priority) slope += j.c_plus.to_double() / j.model.period.to_double();
    }
    return slope + po_slope(ctx, me, true);
}

}  // namespace

PortFlow make_port_flow(std::size_t index, const Flow& flow, const Rational& rate, int level,
                        const EventModel& model) {
    if (!flow.priority) throw std::invalid_argument("flow '" + flow.id + "' has no priority");
    if (!flow.preemption_class)
        throw std::invalid_argument("flow '" + flow.id + "' has no preemption class");
    PortFlow pf;
    pf.flow_index = index;
    pf.flow_id = flow.id;
    pf.priority = *flow.priority;
    pf.preemption_class = *flow.preemption_class;
    pf.kind = class_kind(pf.preemption_class, level);
    pf.model = model;
    pf.c_plus = transmission_time(flow.size_bytes, rate);
    pf.frag_plus = max_fragments(flow.size_bytes < kMinPayloadBytes ? kMinPayloadBytes
                                                                    : flow.size_bytes);
    return pf;
}

Duration lower_priority_blocking(const PortAnalysisContext& ctx, std::size_t self) {
    const PortFlow& me = self_flow(ctx, self);
    Duration same_class_lower(0);
    Duration lower_class(0);
    bool any_lower_class = false;
    for (const PortFlow& j : ctx.flows) {
        if (&j == &me) continue;
        if (j.priority > me.priority && j.preemption_class == me.preemption_class)
            same_class_lower = Rational::max(same_class_lower, j.c_plus);
        if (j.preemption_class > me.preemption_class) {
            lower_class = Rational::max(lower_class, j.c_plus);
            any_lower_class = true;
        }
    }
    Duration preempted_blocking(0);
    if (any_lower_class)
        preempted_blocking =
            Rational::min(lower_class, frame_time(kMaxNonPreemptableFragmentBytes, ctx.rate));
    return Rational::max(same_class_lower, preempted_blocking);
}

Duration same_priority_blocking(const PortAnalysisContext& ctx, std::size_t self, std::int64_t q,
                                const Duration& arrival) {
    if (q < 1) throw std::domain_error("same_priority_blocking: q must be >= 1");
    const PortFlow& me = self_flow(ctx, self);
    Duration total(0);
    for (const PortFlow& j : ctx.flows) {
        if (&j == &me || j.priority != me.priority) continue;
        total += Rational(eta_plus(j.model, arrival)) * j.c_plus;
    }
    total += Rational(q - 1) * me.c_plus;
    if (preemptable(me)) {
        Duration last_fragment = frame_time(kMinFrameBytes, ctx.rate);
        Duration preceding = me.c_plus - last_fragment;
        if (preceding > Duration(0)) total += preceding;
    }
    return total;
}

Duration higher_priority_interference(const PortAnalysisContext& ctx, std::size_t self,
                                      const Duration& dt) {
    const PortFlow& me = self_flow(ctx, self);
    Duration total(0);
    for (const PortFlow& j : ctx.flows) {
        if (j.priority >= me.priority) continue;
        total += Rational(eta_plus(j.model, dt)) * j.c_plus;
    }
    return total;
}

Duration preemption_overhead(const PortAnalysisContext& ctx, std::size_t self, const Duration& dt,
                             std::int64_t q, const Duration& arrival) {
    const PortFlow& me = self_flow(ctx, self);
    if (!preemptable(me)) return Duration(0);

    std::int64_t higher_class_arrivals = 0;
    std::int64_t lp_same_class_max = 0;
    // Own instances can each be cut frag_plus times. Every cut, including
    // the one that creates the final minimum fragment, puts its 24 bytes on
    // the wire before that final fragment starts, so all q*F events count.
    std::int64_t sp_count = q * me.frag_plus;
    std::int64_t hp_count = 0;
    for (const PortFlow& j : ctx.flows) {
        if (&j == &me) continue;
        if (j.preemption_class < me.preemption_class)
            higher_class_arrivals += eta_plus(j.model, dt);
        if (j.priority > me.priority && j.preemption_class == me.preemption_class)
            lp_same_class_max = std::max(lp_same_class_max, j.frag_plus);
        if (j.priority == me.priority) sp_count += eta_plus(j.model, arrival) * j.frag_plus;
        if (j.priority < me.priority && preemptable(j))
            hp_count += eta_plus(j.model, dt) * j.frag_plus;
    }
    std::int64_t events =
        std::min(higher_class_arrivals, lp_same_class_max + sp_count + hp_count);
    return frame_time(kPreemptionOverheadBytes, ctx.rate) * Rational(events);
}

QueuingDelay queuing_delay(const PortAnalysisContext& ctx, std::size_t self, std::int64_t q,
                           const Duration& arrival) {
    const PortFlow& me = self_flow(ctx, self);
    QueuingDelay result;
    if (fixed_point_slope(ctx, me) >= 1.0) return result;  // Diverged

    Duration base = lower_priority_blocking(ctx, self) +
                    same_priority_blocking(ctx, self, q, arrival);
    Duration current = me.c_plus;  // seed
    for (std::int64_t it = 0; it < kFixedPointIterationCap; ++it) {
        Duration next = base + higher_priority_interference(ctx, self, current) +
                        preemption_overhead(ctx, self, current, q, arrival);
        ++result.iterations;
        if (next == current) {
            result.status = FixedPointStatus::Converged;
            result.value = current;
            return result;
        }
        current = next;
    }
    return result;  // iteration cap: Diverged
}

LocalWctt wctt_local(const PortAnalysisContext& ctx, std::size_t self) {
    const PortFlow& me = self_flow(ctx, self);
    LocalWctt result;
    if (busy_window_slope(ctx, me) >= 1.0) return result;  // Diverged

    Duration completion = completion_term(ctx, me);
    Duration best(0);
    for (std::int64_t q = 1; q <= kBusyWindowInstanceCap; ++q) {
        Duration arrival = delta_minus(me.model, q);
        QueuingDelay qd = queuing_delay(ctx, self, q, arrival);
        if (qd.status != FixedPointStatus::Converged) return result;
        Duration busy = qd.value + completion;
        best = Rational::max(best, busy - arrival);
        result.deepest_q = q;
        if (busy < delta_minus(me.model, q + 1)) {
            result.status = FixedPointStatus::Converged;
            result.bound = best;
            return result;
        }
    }
    return LocalWctt{};  // instance cap: Diverged
}

BudgetedWctt wctt_local_with_budget(const PortAnalysisContext& ctx, std::size_t self,
                                    const Duration& budget) {
    LocalWctt local = wctt_local(ctx, self);
    BudgetedWctt out;
    out.deepest_q = local.deepest_q;
    if (local.status != FixedPointStatus::Converged) {
        out.outcome = BudgetedWctt::Outcome::Diverged;
        return out;
    }
    out.bound = local.bound;
    out.outcome = local.bound > budget ? BudgetedWctt::Outcome::DeadlineExceeded
                                       : BudgetedWctt::Outcome::Bounded;
    return out;
}

namespace {

struct FlowState {
    std::vector<PortId> path;
    std::vector<EventModel> models;       // one per hop
    std::vector<Duration> hop_bounds;
    std::vector<std::int64_t> deepest_q;
    std::size_t valid_hops = 0;           // hops with a converged bound
    bool diverged = false;
    std::size_t diverged_hop = 0;
};

}  // namespace

WcttReport analyze(const Network& net, std::vector<Flow> flows,
                   const std::map<std::string, Path>& routes, const PreemptionConfig& config,
                   const AnalysisOptions& options) {
    ValidationResult valid = validate_config(flows, config);
    if (valid.structural_error) throw std::invalid_argument("analyze: " + *valid.structural_error);
    if (!valid.ok) throw std::invalid_argument("analyze: invalid preemption configuration");
    apply_config(flows, config);

    const std::size_t n = flows.size();
    std::vector<FlowState> state(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = routes.find(flows[i].id);
        if (it == routes.end())
            throw std::invalid_argument("analyze: flow '" + flows[i].id + "' has no route");
        state[i].path = it->second.links;
        EventModel source{Rational(flows[i].period_us), Rational(0)};
        state[i].models.assign(state[i].path.size(), source);
        state[i].hop_bounds.assign(state[i].path.size(), Duration(0));
        state[i].deepest_q.assign(state[i].path.size(), 0);
    }

    // hop index of each flow at each port it traverses
    std::map<PortId, std::vector<std::pair<std::size_t, std::size_t>>> port_users;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < state[i].path.size(); ++h)
            port_users[state[i].path[h]].push_back({i, h});

    std::int64_t rounds = 0;
    bool stable = false;
    for (; rounds < options.round_cap && !stable; ++rounds) {
        stable = true;
        for (std::size_t i = 0; i < n; ++i) {
            FlowState& fs = state[i];
            fs.diverged = false;
            fs.valid_hops = 0;
            for (std::size_t h = 0; h < fs.path.size(); ++h) {
                const PortId& port = fs.path[h];
                Rational rate = net.link_rate(port);
                PortAnalysisContext ctx;
                ctx.rate = rate;
                ctx.level = config.level;
                std::size_t self_pos = 0;
                for (auto [j, hj] : port_users.at(port)) {
                    if (j == i) self_pos = ctx.flows.size();
                    ctx.flows.push_back(
                        make_port_flow(j, flows[j], rate, config.level, state[j].models[hj]));
                }
                LocalWctt local = wctt_local(ctx, self_pos);
                if (local.status != FixedPointStatus::Converged) {
                    fs.diverged = true;
                    fs.diverged_hop = h;
                    break;
                }
                Duration bound = local.bound;
                if (net.find_node(port.from)->kind == NodeKind::Switch)
                    bound += options.switch_processing;
                fs.hop_bounds[h] = bound;
                fs.deepest_q[h] = local.deepest_q;
                fs.valid_hops = h + 1;
                if (h + 1 < fs.path.size()) {
                    Duration best_case = transmission_time(flows[i].size_bytes, rate);
                    EventModel next = propagate_event_model(fs.models[h], bound, best_case);
                    if (!(next == fs.models[h + 1])) {
                        fs.models[h + 1] = next;
                        stable = false;
                    }
                }
            }
        }
    }

    // A flow with no sound model beyond some hop makes every bound that
    // depends on it downstream of that hop unsound; propagate that to a
    // fixpoint, tracking the earliest affected hop per flow.
    const std::size_t kUnaffected = SIZE_MAX;
    std::vector<std::size_t> bad_from(n, kUnaffected);  // first hop with unsound inputs
    std::vector<std::string> bad_source(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i].diverged) {
            bad_from[i] = state[i].diverged_hop;
            bad_source[i] = "";
        } else if (!stable) {
            bad_from[i] = 0;
            bad_source[i] = "propagation did not settle";
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (bad_from[i] == kUnaffected) continue;
            // models of flow i are unknown strictly after hop bad_from[i]
            for (std::size_t h = bad_from[i] + 1; h < state[i].path.size(); ++h) {
                for (auto [j, hj] : port_users.at(state[i].path[h])) {
                    if (j == i) continue;
                    if (hj < bad_from[j]) {
                        bad_from[j] = hj;
                        bad_source[j] = flows[i].id;
                        changed = true;
                    }
                }
            }
        }
    }

    WcttReport report;
    report.propagation_rounds = rounds;
    report.all_schedulable = true;
    for (std::size_t i = 0; i < n; ++i) {
        const FlowState& fs = state[i];
        FlowVerdict v;
        v.flow_id = flows[i].id;
        v.deadline = Rational(flows[i].deadline_us);
        std::size_t usable = fs.valid_hops;
        if (bad_from[i] != kUnaffected) usable = std::min(usable, bad_from[i]);
        for (std::size_t h = 0; h < usable; ++h)
            v.hops.push_back({fs.path[h], fs.hop_bounds[h], fs.deepest_q[h]});
        if (fs.diverged && bad_from[i] == fs.diverged_hop && bad_source[i].empty()) {
            v.status = FlowAnalysisStatus::Diverged;
            v.detail = "busy window or fixed point does not close at hop " +
                       std::to_string(fs.diverged_hop) + " (" + fs.path[fs.diverged_hop].from +
                       "->" + fs.path[fs.diverged_hop].to + ")";
        } else if (bad_from[i] != kUnaffected) {
            v.status = bad_source[i] == "propagation did not settle"
                           ? FlowAnalysisStatus::Unstable
                           : FlowAnalysisStatus::Dependent;
            v.detail = bad_source[i] == "propagation did not settle"
                           ? bad_source[i]
                           : "no sound bound: shares a port with flow '" + bad_source[i] +
                                 "' past its last analyzable hop";
        } else {
            v.status = FlowAnalysisStatus::Bounded;
            Duration total(0);
            for (const HopBound& hb : v.hops) total += hb.bound;
            v.end_to_end = total;
            v.schedulable = total <= v.deadline;
            v.slack = v.deadline - total;
        }
        if (!v.schedulable) report.all_schedulable = false;
        report.flows.push_back(std::move(v));
    }
    return report;
}

bool is_schedulable(const WcttReport& report) { return report.all_schedulable; }

const char* to_string(FlowAnalysisStatus status) {
    switch (status) {
        case FlowAnalysisStatus::Bounded: return "bounded";
        case FlowAnalysisStatus::Diverged: return "diverged";
        case FlowAnalysisStatus::Dependent: return "dependent";
        case FlowAnalysisStatus::Unstable: return "unstable";
    }
    return "?";
}

}  // namespace tsnkit
