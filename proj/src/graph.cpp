#include "netkin/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace netkin {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("network: " + msg); }

}  // namespace

Network::Network(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    const int nn = static_cast<int>(nodes_.size());
    const int ne = static_cast<int>(edges_.size());
    if (nn == 0) fail("no nodes");

    std::vector<bool> seen_node(nn, false);
    for (int i = 0; i < nn; ++i) {
        const auto& n = nodes_[i];
        if (n.id != i) fail("node ids must be dense 0..N-1 in order (got id " + std::to_string(n.id) + " at position " + std::to_string(i) + ")");
        if (seen_node[i]) fail("duplicate node id " + std::to_string(n.id));
        seen_node[i] = true;
        nodes_[i].incident.clear();
    }
    std::vector<bool> seen_edge(ne, false);
    for (int i = 0; i < ne; ++i) {
        const auto& e = edges_[i];
        if (e.id != i) fail("edge ids must be dense 0..M-1 in order (got id " + std::to_string(e.id) + " at position " + std::to_string(i) + ")");
        if (seen_edge[i]) fail("duplicate edge id " + std::to_string(e.id));
        seen_edge[i] = true;
        if (e.from < 0 || e.from >= nn) fail("edge " + std::to_string(e.id) + " references unknown node " + std::to_string(e.from));
        if (e.to < 0 || e.to >= nn) fail("edge " + std::to_string(e.id) + " references unknown node " + std::to_string(e.to));
        if (e.from == e.to) fail("edge " + std::to_string(e.id) + " is a self-loop");
        if (!(e.length > 0.0)) fail("edge " + std::to_string(e.id) + " has non-positive length");
        if (e.cells < 2) fail("edge " + std::to_string(e.id) + " needs at least 2 cells");
        nodes_[e.from].incident.push_back({e.id, +1});
        nodes_[e.to].incident.push_back({e.id, -1});
    }
    for (auto& n : nodes_)
        std::sort(n.incident.begin(), n.incident.end(),
                  [](const Incidence& a, const Incidence& b) { return a.edge < b.edge; });
}

const NodeRecord& Network::node(int id) const {
    if (id < 0 || id >= node_count()) fail("unknown node " + std::to_string(id));
    return nodes_[id];
}

const EdgeRecord& Network::edge(int id) const {
    if (id < 0 || id >= edge_count()) fail("unknown edge " + std::to_string(id));
    return edges_[id];
}

Network parse_network(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("syntax error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
        fail("document must be an object with 'nodes' and 'edges' arrays");

    std::vector<NodeRecord> nodes;
    for (const auto& n : j.at("nodes")) {
        NodeRecord rec;
        rec.id = n.at("id").get<int>();
        nodes.push_back(rec);
    }
    std::vector<EdgeRecord> edges;
    for (const auto& e : j.at("edges")) {
        EdgeRecord rec;
        rec.id = e.at("id").get<int>();
        rec.from = e.at("from").get<int>();
        rec.to = e.at("to").get<int>();
        rec.length = e.at("length").get<double>();
        rec.cells = e.at("cells").get<int>();
        edges.push_back(rec);
    }
    return Network(std::move(nodes), std::move(edges));
}

std::string serialize_network(const Network& net) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : net.nodes()) j["nodes"].push_back({{"id", n.id}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : net.edges()) {
        j["edges"].push_back({{"id", e.id},
                              {"from", e.from},
                              {"to", e.to},
                              {"length", e.length},
                              {"cells", e.cells}});
    }
    return j.dump(2);
}

NodeLocalFrame node_local_frame(const Network& net, int node) {
    const auto& n = net.node(node);
    NodeLocalFrame frame;
    frame.node = node;
    for (const auto& inc : n.incident) {
        frame.edges.push_back(inc.edge);
        frame.signs.push_back(inc.sign);
    }
    return frame;
}

}  // namespace netkin
