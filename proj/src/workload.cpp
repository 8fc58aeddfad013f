#include "tsnkit/workload.hpp"

#include <stdexcept>
#include <string>

namespace tsnkit {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    std::uint64_t span = (std::uint64_t)(hi - lo) + 1;
    if (span == 0) return (std::int64_t)engine_();  // full 64-bit range
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return lo + (std::int64_t)(draw % span);
}

double Rng::uniform01() {
    return (double)(engine_() >> 11) * 0x1.0p-53;
}

std::vector<Flow> generate(const Network& net, const GenParams& params) {
    if (params.count < 1) throw std::invalid_argument("generate: count must be >= 1");
    if (params.period_min_us > params.period_max_us || params.period_min_us <= 0)
        throw std::invalid_argument("generate: bad period range");
    if (params.deadline_min_us > params.deadline_max_us || params.deadline_min_us <= 0)
        throw std::invalid_argument("generate: bad deadline range");
    if (params.size_min_bytes > params.size_max_bytes)
        throw std::invalid_argument("generate: bad size range");
    std::vector<std::string> eps = net.endpoint_ids();
    if (eps.size() < 2) throw std::invalid_argument("generate: need at least 2 end-points");

    std::int64_t size_lo = params.size_min_bytes < 42 ? 42 : params.size_min_bytes;
    std::int64_t size_hi = params.size_max_bytes > 1500 ? 1500 : params.size_max_bytes;
    if (size_lo > size_hi) throw std::invalid_argument("generate: size range empty after clip");

    Rng rng(params.seed);
    std::vector<Flow> flows;
    flows.reserve(params.count);
    for (int i = 0; i < params.count; ++i) {
        Flow f;
        f.id = "f" + std::to_string(i + 1);
        std::size_t a = (std::size_t)rng.uniform_int(0, (std::int64_t)eps.size() - 1);
        std::size_t b = (std::size_t)rng.uniform_int(0, (std::int64_t)eps.size() - 2);
        if (b >= a) ++b;  // uniform over pairs with src != dst
        f.src = eps[a];
        f.dst = eps[b];
        f.period_us = rng.uniform_int(params.period_min_us, params.period_max_us);
        if (params.constrained_deadlines) {
            f.deadline_us = rng.uniform_int(params.deadline_min_us,
                                            std::min(params.deadline_max_us, f.period_us));
        } else {
            f.deadline_us = rng.uniform_int(params.deadline_min_us, params.deadline_max_us);
        }
        f.size_bytes = rng.uniform_int(size_lo, size_hi);
        flows.push_back(std::move(f));
    }
    return flows;
}

}  // namespace tsnkit
