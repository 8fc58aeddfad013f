#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsnkit/rational.hpp"

namespace tsnkit {

enum class NodeKind { EndPoint, Switch };

struct Node {
    std::string id;
    NodeKind kind;
};

/// Directed link. Every physical cable appears as two directed links with
/// equal rate (full duplex). `rate` is in bits per microsecond, which equals
/// the Mbit/s figure numerically.
struct Link {
    std::string from;
    std::string to;
    Rational rate;
};

/// A directed link identifies an egress port of its `from` node.
struct PortId {
    std::string from;
    std::string to;

    bool operator==(const PortId&) const = default;
    auto operator<=>(const PortId&) const = default;
};

struct Flow {
    std::string id;
    std::string src;
    std::string dst;
    std::int64_t period_us = 0;
    std::int64_t deadline_us = 0;
    std::int64_t size_bytes = 0;           // payload bytes, clipped to [42, 1500] on load
    std::optional<int> priority;           // 0 (highest) .. 7
    std::optional<int> preemption_class;   // assigned by a configuration
};

/// Ordered list of directed links from the source end-point's link to the
/// link entering the destination end-point.
struct Path {
    std::vector<PortId> links;

    std::size_t length() const { return links.size(); }
};

class Network {
public:
    Network(std::vector<Node> nodes, std::vector<Link> links);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }

    const Node* find_node(const std::string& id) const;
    bool has_link(const std::string& from, const std::string& to) const;
    Rational link_rate(const PortId& port) const;

    std::vector<std::string> neighbors(const std::string& id) const;
    std::vector<std::string> endpoint_ids() const;

private:
    void validate() const;

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::map<std::string, std::size_t> node_index_;
    std::map<std::pair<std::string, std::string>, std::size_t> link_index_;
    std::map<std::string, std::vector<std::string>> adjacency_;  // neighbors sorted by id
};

struct NoRouteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimum-hop path between two end-points. Ties are broken toward the
/// lexicographically smallest node-id sequence so reports are reproducible.
Path shortest_path(const Network& net, const std::string& src, const std::string& dst);

/// Routes for every flow, keyed by flow id.
std::map<std::string, Path> route_all(const Network& net, const std::vector<Flow>& flows);

/// Contention sets: for each directed link, the indices (into `flows`) of the
/// flows whose route traverses it.
std::map<PortId, std::vector<std::size_t>> egress_port_flowsets(
    const Network& net, const std::vector<Flow>& flows,
    const std::map<std::string, Path>& routes);

}  // namespace tsnkit
