#include "tsnkit/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tsnkit::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

/// Exact Mbit/s -> bits/us conversion. JSON numbers are finite decimals, and
/// a double is a dyadic rational, so the conversion loses nothing.
Rational rate_from_mbps(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    double d = v.get<double>();
    if (!(d > 0)) throw std::runtime_error("link rate must be > 0");
    Rational r(0);
    Rational scale(1);
    // peel the double into integer + fractional binary digits
    std::int64_t whole = (std::int64_t)d;
    r = Rational(whole);
    d -= (double)whole;
    for (int bit = 0; bit < 60 && d != 0.0; ++bit) {
        d *= 2;
        scale /= Rational(2);
        if (d >= 1.0) {
            r += scale;
            d -= 1.0;
        }
    }
    return r;
}

ordered_json rational_json(const Duration& d) {
    ordered_json j;
    j["us"] = d.to_decimal_string(3);
    j["num"] = d.num();
    j["den"] = d.den();
    return j;
}

}  // namespace

Network network_from_json(const json& j) {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
        std::string kind = n.at("kind").get<std::string>();
        NodeKind k;
        if (kind == "EndPoint")
            k = NodeKind::EndPoint;
        else if (kind == "Switch")
            k = NodeKind::Switch;
        else
            throw std::runtime_error("unknown node kind '" + kind + "'");
        nodes.push_back(Node{n.at("id").get<std::string>(), k});
    }
    // Each file entry describes a full-duplex cable; materialize both
    // directions, tolerating files that already list both.
    std::vector<Link> links;
    auto have = [&](const std::string& a, const std::string& b) {
        for (const Link& l : links)
            if (l.from == a && l.to == b) return true;
        return false;
    };
    for (const auto& l : j.at("links")) {
        std::string from = l.at("from").get<std::string>();
        std::string to = l.at("to").get<std::string>();
        Rational rate = rate_from_mbps(l.at("rate_mbps"));
        if (!have(from, to)) links.push_back(Link{from, to, rate});
        if (!have(to, from)) links.push_back(Link{to, from, rate});
    }
    return Network(std::move(nodes), std::move(links));
}

Network load_network(const std::string& path) { return network_from_json(read_json_file(path)); }

std::vector<Flow> flows_from_json(const json& j) {
    std::vector<Flow> flows;
    for (const auto& f : j) {
        Flow flow;
        flow.id = f.at("id").get<std::string>();
        flow.src = f.at("src").get<std::string>();
        flow.dst = f.at("dst").get<std::string>();
        flow.period_us = f.at("period_us").get<std::int64_t>();
        flow.deadline_us = f.at("deadline_us").get<std::int64_t>();
        flow.size_bytes = f.at("size_bytes").get<std::int64_t>();
        if (flow.size_bytes < 42) flow.size_bytes = 42;
        if (flow.size_bytes > 1500) flow.size_bytes = 1500;
        if (f.contains("priority")) flow.priority = f.at("priority").get<int>();
        if (f.contains("class")) flow.preemption_class = f.at("class").get<int>();
        if (flow.period_us <= 0)
            throw std::runtime_error("flow '" + flow.id + "': period must be > 0");
        if (flow.deadline_us <= 0)
            throw std::runtime_error("flow '" + flow.id + "': deadline must be > 0");
        if (flow.src == flow.dst)
            throw std::runtime_error("flow '" + flow.id + "': src == dst");
        if (flow.priority && (*flow.priority < 0 || *flow.priority > 7))
            throw std::runtime_error("flow '" + flow.id + "': priority out of 0..7");
        flows.push_back(std::move(flow));
    }
    return flows;
}

std::vector<Flow> load_flows(const std::string& path) {
    return flows_from_json(read_json_file(path));
}

ordered_json flows_to_json(const std::vector<Flow>& flows) {
    ordered_json out = ordered_json::array();
    for (const Flow& f : flows) {
        ordered_json j;
        j["id"] = f.id;
        j["src"] = f.src;
        j["dst"] = f.dst;
        j["period_us"] = f.period_us;
        j["deadline_us"] = f.deadline_us;
        j["size_bytes"] = f.size_bytes;
        if (f.priority) j["priority"] = *f.priority;
        if (f.preemption_class) j["class"] = *f.preemption_class;
        out.push_back(std::move(j));
    }
    return out;
}

PreemptionConfig load_config(const std::string& path) {
    json j = read_json_file(path);
    PreemptionConfig c;
    c.level = j.at("level").get<int>();
    c.entries = j.at("entries").get<std::vector<int>>();
    return c;
}

ordered_json config_to_json(const PreemptionConfig& config) {
    ordered_json j;
    j["level"] = config.level;
    j["entries"] = config.entries;
    return j;
}

ordered_json wctt_report_to_json(const WcttReport& report) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "wctt_report";
    out["all_schedulable"] = report.all_schedulable;
    out["propagation_rounds"] = report.propagation_rounds;
    ordered_json flows = ordered_json::array();
    for (const FlowVerdict& v : report.flows) {
        ordered_json f;
        f["flow"] = v.flow_id;
        f["status"] = to_string(v.status);
        ordered_json hops = ordered_json::array();
        for (const HopBound& hb : v.hops) {
            ordered_json h;
            h["port"] = hb.port.from + "->" + hb.port.to;
            h["bound"] = rational_json(hb.bound);
            h["deepest_q"] = hb.deepest_q;
            hops.push_back(std::move(h));
        }
        f["hops"] = std::move(hops);
        if (v.end_to_end) f["end_to_end"] = rational_json(*v.end_to_end);
        f["deadline_us"] = v.deadline.to_decimal_string(3);
        f["schedulable"] = v.schedulable;
        if (v.slack) f["slack"] = rational_json(*v.slack);
        if (!v.detail.empty()) f["detail"] = v.detail;
        flows.push_back(std::move(f));
    }
    out["flows"] = std::move(flows);
    return out;
}

std::string wctt_report_to_csv(const WcttReport& report) {
    std::ostringstream out;
    out << "flow,per_hop_us,total_us,deadline_us,slack_us,verdict\n";
    for (const FlowVerdict& v : report.flows) {
        out << v.flow_id << ",";
        for (std::size_t h = 0; h < v.hops.size(); ++h) {
            if (h) out << ";";
            out << v.hops[h].bound.to_decimal_string(3);
        }
        out << ",";
        out << (v.end_to_end ? v.end_to_end->to_decimal_string(3) : "") << ",";
        out << v.deadline.to_decimal_string(3) << ",";
        out << (v.slack ? v.slack->to_decimal_string(3) : "") << ",";
        out << (v.status == FlowAnalysisStatus::Bounded
                    ? (v.schedulable ? "schedulable" : "deadline-miss")
                    : to_string(v.status));
        out << "\n";
    }
    return out.str();
}

ordered_json sim_report_to_json(const SimReport& report) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "sim_report";
    out["events_processed"] = report.events_processed;
    out["frames_in_flight"] = report.frames_in_flight;
    if (!report.warnings.empty()) out["warnings"] = report.warnings;
    ordered_json flows = ordered_json::array();
    for (const FlowSimStats& st : report.flows) {
        ordered_json f;
        f["flow"] = st.flow_id;
        f["phase_us"] = st.phase.to_decimal_string(3);
        f["released"] = st.released;
        f["delivered"] = st.delivered;
        f["deadline_misses"] = st.deadline_misses;
        if (st.max_delay) f["max_delay"] = rational_json(*st.max_delay);
        if (st.mean_delay) f["mean_delay"] = rational_json(*st.mean_delay);
        f["preemptions_suffered"] = st.preemptions_suffered;
        f["preemptions_caused"] = st.preemptions_caused;
        flows.push_back(std::move(f));
    }
    out["flows"] = std::move(flows);
    return out;
}

ordered_json cross_validation_to_json(const CrossValidation& cv) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "cross_validation";
    out["safe"] = cv.safe;
    out["runs"] = cv.runs.size();
    out["seeds"] = cv.seeds;
    ordered_json flows = ordered_json::array();
    for (const FlowMargin& fm : cv.flows) {
        ordered_json f;
        f["flow"] = fm.flow_id;
        if (fm.measured) f["measured"] = rational_json(*fm.measured);
        if (fm.bound) f["bound"] = rational_json(*fm.bound);
        if (fm.margin) f["margin"] = rational_json(*fm.margin);
        f["violation"] = fm.violation;
        if (!fm.note.empty()) f["note"] = fm.note;
        flows.push_back(std::move(f));
    }
    out["flows"] = std::move(flows);
    return out;
}

ordered_json synthesis_to_json(const SynthesisResult& result, const std::vector<Flow>& flows) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "synthesis";
    out["found"] = result.found();
    out["configs_tested"] = result.configs_tested;
    if (result.found()) {
        out["level"] = result.level;
        out["config"] = config_to_json(*result.config);
        std::vector<Flow> assigned = flows;
        apply_config(assigned, *result.config);
        ordered_json classes = ordered_json::object();
        for (const Flow& f : assigned) classes[f.id] = *f.preemption_class;
        out["flow_classes"] = std::move(classes);
    }
    ordered_json levels = ordered_json::array();
    for (const LevelDiagnostics& d : result.per_level) {
        ordered_json l;
        l["level"] = d.level;
        l["tested"] = d.tested;
        l["passed"] = d.found ? 1 : 0;
        levels.push_back(std::move(l));
    }
    out["per_level"] = std::move(levels);
    return out;
}

ordered_json priority_assignment_to_json(const PriorityAssignment& assignment,
                                         const std::string& method) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = "priority_assignment";
    out["method"] = method;
    out["chosen_k"] = assignment.chosen_k;
    if (!assignment.per_k_scores.empty()) {
        ordered_json scores = ordered_json::array();
        for (std::size_t i = 0; i < assignment.per_k_scores.size(); ++i) {
            ordered_json s;
            s["k"] = i + 1;
            s["schedulable_flows"] = assignment.per_k_scores[i];
            scores.push_back(std::move(s));
        }
        out["per_k_scores"] = std::move(scores);
    }
    ordered_json prios = ordered_json::object();
    for (const auto& [id, p] : assignment.priorities) prios[id] = p;
    out["priorities"] = std::move(prios);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

}  // namespace tsnkit::io
