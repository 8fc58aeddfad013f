#include "tsnkit/network.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace tsnkit {

Network::Network(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!node_index_.emplace(nodes_[i].id, i).second)
            throw std::invalid_argument("network: duplicate node id '" + nodes_[i].id + "'");
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
        auto key = std::make_pair(links_[i].from, links_[i].to);
        if (!link_index_.emplace(key, i).second)
            throw std::invalid_argument("network: duplicate link " + links_[i].from + "->" +
                                        links_[i].to);
    }
    for (const Link& l : links_) adjacency_[l.from].push_back(l.to);
    for (auto& [id, nbrs] : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    validate();
}

void Network::validate() const {
    for (const Link& l : links_) {
        if (!(l.rate > Rational(0)))
            throw std::invalid_argument("network: link " + l.from + "->" + l.to +
                                        " has non-positive rate");
        if (!find_node(l.from) || !find_node(l.to))
            throw std::invalid_argument("network: link " + l.from + "->" + l.to +
                                        " references unknown node");
        auto rev = link_index_.find(std::make_pair(l.to, l.from));
        if (rev == link_index_.end())
            throw std::invalid_argument("network: missing reverse link " + l.to + "->" + l.from);
        if (!(links_[rev->second].rate == l.rate))
            throw std::invalid_argument("network: asymmetric rate on " + l.from + "<->" + l.to);
    }
    for (const Node& n : nodes_) {
        if (n.kind != NodeKind::EndPoint) continue;
        auto it = adjacency_.find(n.id);
        std::size_t degree = it == adjacency_.end() ? 0 : it->second.size();
        if (degree != 1)
            throw std::invalid_argument("network: end-point '" + n.id +
                                        "' must have exactly one incident link, has " +
                                        std::to_string(degree));
    }
}

const Node* Network::find_node(const std::string& id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

bool Network::has_link(const std::string& from, const std::string& to) const {
    return link_index_.count(std::make_pair(from, to)) != 0;
}

Rational Network::link_rate(const PortId& port) const {
    auto it = link_index_.find(std::make_pair(port.from, port.to));
    if (it == link_index_.end())
        throw std::invalid_argument("network: no link " + port.from + "->" + port.to);
    return links_[it->second].rate;
}

std::vector<std::string> Network::neighbors(const std::string& id) const {
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Network::endpoint_ids() const {
    std::vector<std::string> out;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::EndPoint) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
}

Path shortest_path(const Network& net, const std::string& src, const std::string& dst) {
    const Node* s = net.find_node(src);
    const Node* d = net.find_node(dst);
    if (!s || s->kind != NodeKind::EndPoint)
        throw std::invalid_argument("shortest_path: src '" + src + "' is not an end-point");
    if (!d || d->kind != NodeKind::EndPoint)
        throw std::invalid_argument("shortest_path: dst '" + dst + "' is not an end-point");
    if (src == dst) throw std::invalid_argument("shortest_path: src == dst");

    // BFS distances to dst, then walk from src taking the smallest-id neighbor
    // one step closer each time. That yields the lexicographically smallest
    // minimum-hop node sequence.
    std::map<std::string, std::int64_t> dist;
    std::deque<std::string> queue;
    dist[dst] = 0;
    queue.push_back(dst);
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        for (const std::string& nb : net.neighbors(cur)) {
            if (dist.count(nb)) continue;
            dist[nb] = dist[cur] + 1;
            queue.push_back(nb);
        }
    }
    auto it = dist.find(src);
    if (it == dist.end()) throw NoRouteError("no route from " + src + " to " + dst);

    Path path;
    std::string cur = src;
    std::int64_t remaining = it->second;
    while (remaining > 0) {
        for (const std::string& nb : net.neighbors(cur)) {  // sorted by id
            auto dn = dist.find(nb);
            if (dn != dist.end() && dn->second == remaining - 1) {
                path.links.push_back(PortId{cur, nb});
                cur = nb;
                break;
            }
        }
        --remaining;
    }
    return path;
}

std::map<std::string, Path> route_all(const Network& net, const std::vector<Flow>& flows) {
    std::map<std::string, Path> routes;
    for (const Flow& f : flows) routes.emplace(f.id, shortest_path(net, f.src, f.dst));
    return routes;
}

std::map<PortId, std::vector<std::size_t>> egress_port_flowsets(
    const Network& net, const std::vector<Flow>& flows,
    const std::map<std::string, Path>& routes) {
    std::map<PortId, std::vector<std::size_t>> sets;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        auto it = routes.find(flows[i].id);
        if (it == routes.end())
            throw std::invalid_argument("egress_port_flowsets: flow '" + flows[i].id +
                                        "' has no route");
        for (const PortId& port : it->second.links) {
            (void)net.link_rate(port);  // reject routes over unknown links
            sets[port].push_back(i);
        }
    }
    return sets;
}

}  // namespace tsnkit
