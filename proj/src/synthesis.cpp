#include "tsnkit/synthesis.hpp"

#include <stdexcept>

namespace tsnkit {

namespace {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) result = result * (std::uint64_t)(n - k + i) / (std::uint64_t)i;
    return result;
}

void emit_configs(int p, int m, int position, int current_class, std::vector<int>& prefix,
                  std::vector<PreemptionConfig>& out) {
    if (position == p) {
        if (current_class == m) out.push_back(PreemptionConfig{m, prefix});
        return;
    }
    // Surjective and non-decreasing means each step raises the class by 0 or
    // 1, and the remaining positions must still be able to reach class m.
    int top = current_class + 1 < m ? current_class + 1 : m;
    for (int c = current_class; c <= top; ++c) {
        if (m - c > p - position - 1) continue;  // cannot reach class m anymore
        prefix.push_back(c);
        emit_configs(p, m, position + 1, c, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<PreemptionConfig> valid_configs(int p, int m) {
    if (p < 1) throw std::domain_error("valid_configs: p must be >= 1");
    if (m < 0 || m > p - 1)
        throw std::domain_error("valid_configs: level must satisfy 0 <= m <= p-1");
    std::vector<PreemptionConfig> out;
    std::vector<int> prefix;
    prefix.reserve(p);
    prefix.push_back(0);  // rank 0 is always class 0
    emit_configs(p, m, 1, 0, prefix, out);
    return out;
}

std::uint64_t config_count(int p, int m) {
    if (p < 1) throw std::domain_error("config_count: p must be >= 1");
    if (m < 0 || m > p - 1)
        throw std::domain_error("config_count: level must satisfy 0 <= m <= p-1");
    return binomial(p - 1, m);
}

std::uint64_t config_count_published_form(int p, int m) {
    return binomial(p - 1, m - 1);
}

std::uint64_t total_search_size(int p) {
    if (p < 1) throw std::domain_error("total_search_size: p must be >= 1");
    std::uint64_t total = 0;
    for (int m = 1; m <= p - 1; ++m) total += config_count(p, m);
    return total;
}

SynthesisResult assign_preemption_class(const Network& net, const std::vector<Flow>& flows,
                                        const std::map<std::string, Path>& routes,
                                        const AnalysisOptions& options) {
    int p = (int)distinct_priorities(flows).size();
    SynthesisResult result;
    std::map<std::vector<int>, bool> memo;
    for (int m = 0; m <= p - 1; ++m) {
        LevelDiagnostics diag;
        diag.level = m;
        for (const PreemptionConfig& candidate : valid_configs(p, m)) {
            ++result.configs_tested;
            ++diag.tested;
            auto it = memo.find(candidate.entries);
            bool ok;
            if (it != memo.end()) {
                ok = it->second;
            } else {
                ok = is_schedulable(analyze(net, flows, routes, candidate, options));
                memo.emplace(candidate.entries, ok);
            }
            if (ok) {
                diag.found = true;
                result.per_level.push_back(diag);
                result.config = candidate;
                result.level = m;
                return result;
            }
        }
        result.per_level.push_back(diag);
    }
    return result;
}

}  // namespace tsnkit
