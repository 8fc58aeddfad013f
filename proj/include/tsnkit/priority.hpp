#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsnkit/analysis.hpp"
#include "tsnkit/network.hpp"

namespace tsnkit {

/// Normalized clustering features of one flow: path length scaled to
/// [-1, 0] (longest path = -1), period/deadline/size scaled to (0, 1] by the
/// flowset maxima. All four weighted equally.
struct FeatureVector {
    double pl = 0.0;
    double t = 0.0;
    double d = 0.0;
    double s = 0.0;

    std::array<double, 4> coords() const { return {pl, t, d, s}; }
};

std::vector<FeatureVector> normalize_features(const std::vector<Flow>& flows,
                                              const std::map<std::string, Path>& routes);

struct Clustering {
    int k = 0;
    std::vector<int> assignment;            // per feature index
    std::vector<FeatureVector> centroids;   // k entries
    std::vector<double> centroid_means;     // mean of the 4 coordinates
    double wcss = 0.0;                      // within-cluster sum of squares
};

/// Lloyd's iteration with deterministic farthest-point initialization from a
/// seeded PRNG, run to an assignment fixed point (cap 100 iterations, which
/// no small flowset reaches). Empty clusters are re-seeded at the point
/// farthest from its own centroid. Five seeded restarts, best WCSS wins.
Clustering kmeans(const std::vector<FeatureVector>& features, int k, std::uint64_t seed);

/// Cluster index -> priority: ascending centroid mean gets ascending
/// priority value, ties broken by cluster index.
std::vector<int> order_clusters(const Clustering& clustering);

struct PriorityAssignment {
    std::map<std::string, int> priorities;       // flow id -> priority
    int chosen_k = 0;
    std::vector<std::int64_t> per_k_scores;      // schedulable-flow count, index k-1
};

/// k-means sweep over k = 1..min(8, n): cluster, order, assign, and score by
/// the number of flows that meet their deadlines under the fully preemptive
/// scheme. Returns the best-scoring assignment, smaller k on ties.
PriorityAssignment assign_priorities_kmeans(const Network& net, const std::vector<Flow>& flows,
                                            const std::map<std::string, Path>& routes,
                                            std::uint64_t seed,
                                            const AnalysisOptions& options = {});

/// Deadline Monotonic ordering split into k near-equal contiguous bins,
/// earlier bins taking the remainder; bin index = priority.
PriorityAssignment assign_priorities_dmpo(const std::vector<Flow>& flows, int k);

/// Schedulable-flow count of a prioritized flowset under the fully
/// preemptive scheme; the score used by the k sweep.
std::int64_t fully_preemptive_score(const Network& net, std::vector<Flow> flows,
                                    const std::map<std::string, Path>& routes,
                                    const AnalysisOptions& options = {});

}  // namespace tsnkit
