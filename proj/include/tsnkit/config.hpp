#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsnkit/network.hpp"

namespace tsnkit {

/// Priority-to-preemption-class mapping for an m-level scheme. entries[r] is
/// the class of every flow whose priority has rank r among the distinct
/// priorities present, rank 0 being the highest priority (smallest value).
/// An m-level scheme has classes 0..m; class 0 preempts all larger classes.
struct PreemptionConfig {
    int level = 0;
    std::vector<int> entries;

    bool operator==(const PreemptionConfig&) const = default;
    auto operator<=>(const PreemptionConfig&) const = default;
};

enum class ConfigRule { R1, R2, R3 };

struct RuleViolation {
    ConfigRule rule;
    std::string detail;
};

struct ValidationResult {
    bool ok = false;
    std::vector<RuleViolation> violations;
    /// Set when the entries list does not structurally match the flowset
    /// (wrong length); distinct from a rule violation.
    std::optional<std::string> structural_error;
};

/// Sorted distinct priorities of the flowset. Throws if any flow lacks one.
std::vector<int> distinct_priorities(const std::vector<Flow>& flows);

/// priority value -> rank (index into PreemptionConfig::entries).
std::map<int, int> priority_ranks(const std::vector<Flow>& flows);

ValidationResult validate_config(const std::vector<Flow>& flows, const PreemptionConfig& config);

/// Writes preemption_class on every flow from the configuration.
void apply_config(std::vector<Flow>& flows, const PreemptionConfig& config);

/// All-zero entries: the non-preemptive baseline.
PreemptionConfig non_preemptive_config(const std::vector<Flow>& flows);

/// One class per priority rank: the preemption class of each flow is also
/// its priority.
PreemptionConfig fully_preemptive_config(const std::vector<Flow>& flows);

enum class FlowClassKind { ExpressLike, TpLike, BpLike };

/// Class kind under an m-level scheme: class 0 is express, class m (m >= 1)
/// is the bottom class, anything between preempts and is preemptable. With
/// m = 0 every flow is express-like and the analysis degrades to the plain
/// non-preemptive bound.
inline FlowClassKind class_kind(int preemption_class, int level) {
    if (preemption_class == 0) return FlowClassKind::ExpressLike;
    if (preemption_class == level && level >= 1) return FlowClassKind::BpLike;
    return FlowClassKind::TpLike;
}

const char* to_string(FlowClassKind kind);

}  // namespace tsnkit
