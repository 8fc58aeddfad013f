#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "tsnkit/analysis.hpp"
#include "tsnkit/config.hpp"

namespace tsnkit {

/// All valid configurations for `p` distinct priorities at preemption level
/// `m`, in lexicographic order: exactly the non-decreasing surjective
/// length-p sequences over {0..m}.
std::vector<PreemptionConfig> valid_configs(int p, int m);

/// |valid_configs(p, m)| in closed form: binomial(p-1, m).
std::uint64_t config_count(int p, int m);

/// The closed form as printed in the source material, binomial(p-1, m-1).
/// Disagrees with the enumeration by one in m; reported for transparency.
std::uint64_t config_count_published_form(int p, int m);

/// Number of configurations a full search tests across levels 1..p-1:
/// 2^(p-1) - 1.
std::uint64_t total_search_size(int p);

struct LevelDiagnostics {
    int level = 0;
    std::uint64_t tested = 0;
    bool found = false;
};

struct SynthesisResult {
    std::optional<PreemptionConfig> config;  // set iff a solution was found
    int level = -1;                          // minimal schedulable level
    std::uint64_t configs_tested = 0;
    std::vector<LevelDiagnostics> per_level;

    bool found() const { return config.has_value(); }
};

/// Minimal-level preemption-class synthesis: walks m = 0..p-1, enumerating
/// valid configurations in canonical order, and returns the first one under
/// which every flow meets its deadline. Results are memoized per
/// configuration since the analysis is pure.
SynthesisResult assign_preemption_class(const Network& net, const std::vector<Flow>& flows,
                                        const std::map<std::string, Path>& routes,
                                        const AnalysisOptions& options = {});

}  // namespace tsnkit
