#include "tsnkit/priority.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsnkit/workload.hpp"

namespace tsnkit {

namespace {

double sq_dist(const FeatureVector& a, const FeatureVector& b) {
    double total = 0.0;
    auto ca = a.coords(), cb = b.coords();
    for (int i = 0; i < 4; ++i) {
        double diff = ca[i] - cb[i];
        total += diff * diff;
    }
    return total;
}

FeatureVector mean_of(const std::vector<FeatureVector>& features,
                      const std::vector<int>& assignment, int cluster, std::size_t count) {
    FeatureVector m;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (assignment[i] != cluster) continue;
        m.pl += features[i].pl;
        m.t += features[i].t;
        m.d += features[i].d;
        m.s += features[i].s;
    }
    m.pl /= (double)count;
    m.t /= (double)count;
    m.d /= (double)count;
    m.s /= (double)count;
    return m;
}

Clustering lloyd_once(const std::vector<FeatureVector>& features, int k, Rng& rng) {
    const std::size_t n = features.size();
    Clustering c;
    c.k = k;

    // Farthest-point initialization: seeded first pick, then argmax of the
    // distance to the nearest chosen centroid, ties to the smaller index.
    std::vector<std::size_t> centers;
    centers.push_back((std::size_t)rng.uniform_int(0, (std::int64_t)n - 1));
    while ((int)centers.size() < k) {
        std::size_t best = 0;
        double best_dist = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t cidx : centers) nearest = std::min(nearest, sq_dist(features[i], features[cidx]));
            if (nearest > best_dist) {
                best_dist = nearest;
                best = i;
            }
        }
        centers.push_back(best);
    }
    c.centroids.resize(k);
    for (int j = 0; j < k; ++j) c.centroids[j] = features[centers[j]];

    c.assignment.assign(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                double dist = sq_dist(features[i], c.centroids[j]);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = j;
                }
            }
            if (c.assignment[i] != best) {
                c.assignment[i] = best;
                changed = true;
            }
        }
        // Re-seed empty clusters at the point farthest from its centroid.
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) counts[c.assignment[i]]++;
        for (int j = 0; j < k; ++j) {
            if (counts[j] != 0) continue;
            std::size_t worst = 0;
            double worst_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[c.assignment[i]] <= 1) continue;  // keep donors non-empty
                double dist = sq_dist(features[i], c.centroids[c.assignment[i]]);
                if (dist > worst_dist) {
                    worst_dist = dist;
                    worst = i;
                }
            }
            if (worst_dist < 0.0) continue;  // nothing to donate (duplicate points)
            counts[c.assignment[worst]]--;
            c.assignment[worst] = j;
            counts[j] = 1;
            changed = true;
        }
        for (int j = 0; j < k; ++j)
            if (counts[j] > 0) c.centroids[j] = mean_of(features, c.assignment, j, counts[j]);
        if (!changed) break;
    }

    // Drop clusters that stayed empty (only possible with duplicate points)
    // and re-index.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) counts[c.assignment[i]]++;
    std::vector<int> remap(k, -1);
    int live = 0;
    for (int j = 0; j < k; ++j)
        if (counts[j] > 0) remap[j] = live++;
    if (live != k) {
        std::vector<FeatureVector> kept;
        for (int j = 0; j < k; ++j)
            if (remap[j] >= 0) kept.push_back(c.centroids[j]);
        c.centroids = std::move(kept);
        for (std::size_t i = 0; i < n; ++i) c.assignment[i] = remap[c.assignment[i]];
        c.k = live;
    }

    c.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) c.wcss += sq_dist(features[i], c.centroids[c.assignment[i]]);
    c.centroid_means.resize(c.k);
    for (int j = 0; j < c.k; ++j) {
        auto coords = c.centroids[j].coords();
        c.centroid_means[j] = (coords[0] + coords[1] + coords[2] + coords[3]) / 4.0;
    }
    return c;
}

}  // namespace

std::vector<FeatureVector> normalize_features(const std::vector<Flow>& flows,
                                              const std::map<std::string, Path>& routes) {
    if (flows.empty()) throw std::invalid_argument("normalize_features: empty flowset");
    double max_pl = 0, max_t = 0, max_d = 0, max_s = 0;
    for (const Flow& f : flows) {
        auto it = routes.find(f.id);
        if (it == routes.end())
            throw std::invalid_argument("normalize_features: flow '" + f.id + "' has no route");
        max_pl = std::max(max_pl, (double)it->second.length());
        max_t = std::max(max_t, (double)f.period_us);
        max_d = std::max(max_d, (double)f.deadline_us);
        max_s = std::max(max_s, (double)f.size_bytes);
    }
    if (max_pl <= 0 || max_t <= 0 || max_d <= 0 || max_s <= 0)
        throw std::invalid_argument("normalize_features: maxima must be positive");
    std::vector<FeatureVector> out;
    out.reserve(flows.size());
    for (const Flow& f : flows) {
        FeatureVector v;
        v.pl = (double)routes.at(f.id).length() / -max_pl;
        v.t = (double)f.period_us / max_t;
        v.d = (double)f.deadline_us / max_d;
        v.s = (double)f.size_bytes / max_s;
        out.push_back(v);
    }
    return out;
}

Clustering kmeans(const std::vector<FeatureVector>& features, int k, std::uint64_t seed) {
    if (k < 1) throw std::domain_error("kmeans: k must be >= 1");
    if ((std::size_t)k > features.size())
        throw std::domain_error("kmeans: k exceeds the number of points");
    Clustering best;
    bool have_best = false;
    for (int restart = 0; restart < 5; ++restart) {
        Rng rng(seed * 1000003 + (std::uint64_t)restart);
        Clustering c = lloyd_once(features, k, rng);
        if (!have_best || c.wcss < best.wcss) {
            best = std::move(c);
            have_best = true;
        }
    }
    return best;
}

std::vector<int> order_clusters(const Clustering& clustering) {
    std::vector<int> order(clustering.k);
    for (int j = 0; j < clustering.k; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return clustering.centroid_means[a] < clustering.centroid_means[b];
    });
    std::vector<int> priority_of(clustering.k);
    for (int pos = 0; pos < clustering.k; ++pos) priority_of[order[pos]] = pos;
    return priority_of;
}

std::int64_t fully_preemptive_score(const Network& net, std::vector<Flow> flows,
                                    const std::map<std::string, Path>& routes,
                                    const AnalysisOptions& options) {
    PreemptionConfig config = fully_preemptive_config(flows);
    WcttReport report = analyze(net, flows, routes, config, options);
    std::int64_t count = 0;
    for (const FlowVerdict& v : report.flows)
        if (v.schedulable) ++count;
    return count;
}

PriorityAssignment assign_priorities_kmeans(const Network& net, const std::vector<Flow>& flows,
                                            const std::map<std::string, Path>& routes,
                                            std::uint64_t seed, const AnalysisOptions& options) {
    std::vector<FeatureVector> features = normalize_features(flows, routes);
    int max_k = (int)std::min<std::size_t>(8, flows.size());
    PriorityAssignment best;
    std::int64_t best_score = -1;
    for (int k = 1; k <= max_k; ++k) {
        Clustering c = kmeans(features, k, seed);
        std::vector<int> priority_of = order_clusters(c);
        std::vector<Flow> prioritized = flows;
        for (std::size_t i = 0; i < prioritized.size(); ++i)
            prioritized[i].priority = priority_of[c.assignment[i]];
        std::int64_t score = fully_preemptive_score(net, prioritized, routes, options);
        best.per_k_scores.push_back(score);
        if (score > best_score) {
            best_score = score;
            best.chosen_k = k;
            best.priorities.clear();
            for (std::size_t i = 0; i < prioritized.size(); ++i)
                best.priorities[prioritized[i].id] = *prioritized[i].priority;
        }
    }
    return best;
}

PriorityAssignment assign_priorities_dmpo(const std::vector<Flow>& flows, int k) {
    if (k < 1 || k > 8) throw std::domain_error("dmpo: k must be in 1..8");
    if (flows.empty()) throw std::invalid_argument("dmpo: empty flowset");
    std::vector<std::size_t> order(flows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (flows[a].deadline_us != flows[b].deadline_us)
            return flows[a].deadline_us < flows[b].deadline_us;
        return flows[a].id < flows[b].id;
    });
    int bins = std::min<int>(k, (int)flows.size());
    std::size_t base = flows.size() / (std::size_t)bins;
    std::size_t remainder = flows.size() % (std::size_t)bins;
    PriorityAssignment out;
    out.chosen_k = bins;
    std::size_t pos = 0;
    for (int b = 0; b < bins; ++b) {
        std::size_t take = base + ((std::size_t)b < remainder ? 1 : 0);
        for (std::size_t i = 0; i < take; ++i) out.priorities[flows[order[pos++]].id] = b;
    }
    return out;
}

}  // namespace tsnkit
