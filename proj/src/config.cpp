#include "tsnkit/config.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tsnkit {

std::vector<int> distinct_priorities(const std::vector<Flow>& flows) {
    std::set<int> values;
    for (const Flow& f : flows) {
        if (!f.priority)
            throw std::invalid_argument("flow '" + f.id + "' has no priority assigned");
        if (*f.priority < 0 || *f.priority > 7)
            throw std::invalid_argument("flow '" + f.id + "' priority out of 0..7");
        values.insert(*f.priority);
    }
    return std::vector<int>(values.begin(), values.end());
}

std::map<int, int> priority_ranks(const std::vector<Flow>& flows) {
    std::map<int, int> ranks;
    int rank = 0;
    for (int p : distinct_priorities(flows)) ranks[p] = rank++;
    return ranks;
}

ValidationResult validate_config(const std::vector<Flow>& flows, const PreemptionConfig& config) {
    ValidationResult result;
    std::vector<int> prios = distinct_priorities(flows);
    if (config.entries.size() != prios.size()) {
        result.structural_error = "entries length " + std::to_string(config.entries.size()) +
                                  " does not match distinct-priority count " +
                                  std::to_string(prios.size());
        return result;
    }
    if (prios.empty()) {  // nothing to assign; every rule holds vacuously
        result.ok = true;
        return result;
    }
    // R1: each priority rank maps to exactly one class in range. The list
    // representation gives uniqueness; range errors are R1 violations.
    for (std::size_t i = 0; i < config.entries.size(); ++i) {
        int c = config.entries[i];
        if (c < 0 || c > config.level)
            result.violations.push_back(
                {ConfigRule::R1, "entry " + std::to_string(i) + " = " + std::to_string(c) +
                                     " outside classes 0.." + std::to_string(config.level)});
    }
    // R2: a lower priority may not sit in a higher (smaller-numbered) class.
    for (std::size_t i = 0; i + 1 < config.entries.size(); ++i) {
        if (config.entries[i] > config.entries[i + 1])
            result.violations.push_back(
                {ConfigRule::R2, "entries not non-decreasing at ranks " + std::to_string(i) +
                                     "," + std::to_string(i + 1)});
    }
    // R3: every class 0..m occurs at least once.
    std::set<int> used(config.entries.begin(), config.entries.end());
    for (int c = 0; c <= config.level; ++c) {
        if (!used.count(c))
            result.violations.push_back(
                {ConfigRule::R3, "class " + std::to_string(c) + " has no priority assigned"});
    }
    result.ok = result.violations.empty();
    return result;
}

void apply_config(std::vector<Flow>& flows, const PreemptionConfig& config) {
    ValidationResult v = validate_config(flows, config);
    if (v.structural_error) throw std::invalid_argument("apply_config: " + *v.structural_error);
    if (!v.ok) throw std::invalid_argument("apply_config: configuration violates rules");
    std::map<int, int> ranks = priority_ranks(flows);
    for (Flow& f : flows) f.preemption_class = config.entries[ranks.at(*f.priority)];
}

PreemptionConfig non_preemptive_config(const std::vector<Flow>& flows) {
    PreemptionConfig c;
    c.level = 0;
    c.entries.assign(distinct_priorities(flows).size(), 0);
    return c;
}

PreemptionConfig fully_preemptive_config(const std::vector<Flow>& flows) {
    PreemptionConfig c;
    std::size_t p = distinct_priorities(flows).size();
    c.level = (int)p - 1;
    c.entries.resize(p);
    for (std::size_t i = 0; i < p; ++i) c.entries[i] = (int)i;
    return c;
}

const char* to_string(FlowClassKind kind) {
    switch (kind) {
        case FlowClassKind::ExpressLike: return "express";
        case FlowClassKind::TpLike: return "tpflow";
        case FlowClassKind::BpLike: return "bpflow";
    }
    return "?";
}

}  // namespace tsnkit
