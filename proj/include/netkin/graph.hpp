#pragma once

#include <string>
#include <vector>

namespace netkin {

/// Incidence of one edge at a node: +1 if the edge leaves the node
/// (node is the edge's start), -1 if it enters (node is the edge's end).
struct Incidence {
    int edge = -1;
    int sign = 0;
};

struct NodeRecord {
    int id = -1;
    std::vector<Incidence> incident;  // ordered by ascending edge id

    int degree() const { return static_cast<int>(incident.size()); }
};

struct EdgeRecord {
    int id = -1;
    int from = -1;
    int to = -1;
    double length = 0.0;  // L > 0
    int cells = 0;        // N_x >= 2
};

/// Immutable directed network of 1-D edges. Construction validates the
/// topology; afterwards the object is safe to share between workers.
class Network {
public:
    Network(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const NodeRecord& node(int id) const;
    const EdgeRecord& edge(int id) const;
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    const std::vector<EdgeRecord>& edges() const { return edges_; }

private:
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
};

/// View of a node with every incident edge presented as outgoing.
/// Boundary traces of in-pointing edges are mapped into this frame by
/// v -> -v, i.e. each state component picks up the parity sign of its
/// velocity moment; applying the map twice is the identity.
struct NodeLocalFrame {
    int node = -1;
    std::vector<int> edges;  // ascending edge id
    std::vector<int> signs;  // +1 already outgoing, -1 flipped

    int degree() const { return static_cast<int>(edges.size()); }
};

/// Build a Network from the JSON description document; see README for the
/// format. Throws std::runtime_error on syntax errors, dangling references,
/// duplicate or non-dense ids, non-positive lengths or cell counts < 2.
Network parse_network(const std::string& text);

/// Inverse of parse_network on valid networks (round-trips exactly).
std::string serialize_network(const Network& net);

NodeLocalFrame node_local_frame(const Network& net, int node);

}  // namespace netkin
