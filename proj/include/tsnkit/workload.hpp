#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tsnkit/network.hpp"

namespace tsnkit {

/// Seeded helpers with a fixed sampling algorithm. std::uniform_*
/// distributions are implementation-defined, and report files must be
/// byte-identical across toolchains for the same seed, so sampling is done
/// by hand on top of mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [lo, hi], inclusive, via rejection sampling.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct GenParams {
    int count = 1;
    std::int64_t period_min_us = 500;
    std::int64_t period_max_us = 100000;
    std::int64_t deadline_min_us = 500;
    std::int64_t deadline_max_us = 100000;
    std::int64_t size_min_bytes = 64;
    std::int64_t size_max_bytes = 1500;
    bool constrained_deadlines = false;  // force D <= T
    std::uint64_t seed = 0;
};

/// Random flowset over the network's end-points. Sizes are payload bytes
/// clipped to [42, 1500]; deadlines are sampled independently of periods
/// unless constrained. Deterministic per seed.
std::vector<Flow> generate(const Network& net, const GenParams& params);

}  // namespace tsnkit
