#pragma once

// Geometric network graph: nodes with roles and positions, edges with an
// equivalence class (edges in the same class share one survival probability
// in the inhomogeneous analyses) and a physical length in km.
//
// The text serialization is line-oriented and round-trips bit-exactly:
//
//   entnet-graph 1
//   name <token>
//   boundary open|periodic-horizontal
//   nodes <count>
//   <id> <role> <row> <col> <site> <x> <y>
//   ...
//   edges <count>
//   <u> <v> <class> <length>
//   ...
//   end

#include "entnet/io.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace entnet {

enum class NodeRole { Terminal, Source, UserLeft, UserRight, Site };

inline const char* role_name(NodeRole r) {
    switch (r) {
        case NodeRole::Terminal: return "terminal";
        case NodeRole::Source: return "source";
        case NodeRole::UserLeft: return "user-left";
        case NodeRole::UserRight: return "user-right";
        case NodeRole::Site: return "site";
    }
    return "site";
}

inline NodeRole role_from_name(const std::string& s) {
    if (s == "terminal") return NodeRole::Terminal;
    if (s == "source") return NodeRole::Source;
    if (s == "user-left") return NodeRole::UserLeft;
    if (s == "user-right") return NodeRole::UserRight;
    if (s == "site") return NodeRole::Site;
    throw std::runtime_error("unknown node role: '" + s + "'");
}

enum class Boundary { Open, PeriodicHorizontal };

inline const char* boundary_name(Boundary b) {
    return b == Boundary::Open ? "open" : "periodic-horizontal";
}

inline Boundary boundary_from_name(const std::string& s) {
    if (s == "open") return Boundary::Open;
    if (s == "periodic-horizontal") return Boundary::PeriodicHorizontal;
    throw std::runtime_error("unknown boundary: '" + s + "'");
}

struct GraphNode {
    int id = 0;
    NodeRole role = NodeRole::Site;
    int row = 0;  // cell row (vertical index)
    int col = 0;  // cell column (horizontal index)
    int site = 0; // sublattice index within the cell
    double x = 0, y = 0;
};

struct GraphEdge {
    int u = 0, v = 0;
    int cls = 0;       // equivalence class for per-class probabilities
    double length = 0; // km
};

struct NetworkGraph {
    std::string name = "graph";
    Boundary boundary = Boundary::Open;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    int add_node(NodeRole role, int row, int col, int site, double x, double y) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(GraphNode{id, role, row, col, site, x, y});
        return id;
    }

    void add_edge(int u, int v, int cls, double length) {
        edges.push_back(GraphEdge{u, v, cls, length});
    }

    std::vector<int> degrees() const {
        std::vector<int> deg(nodes.size(), 0);
        for (const GraphEdge& e : edges) {
            ++deg[static_cast<std::size_t>(e.u)];
            ++deg[static_cast<std::size_t>(e.v)];
        }
        return deg;
    }

    int num_edge_classes() const {
        int m = 0;
        for (const GraphEdge& e : edges)
            if (e.cls + 1 > m) m = e.cls + 1;
        return m;
    }
};

inline std::string serialize_graph(const NetworkGraph& g) {
    std::string out;
    out += "entnet-graph 1\n";
    out += "name " + g.name + "\n";
    out += std::string("boundary ") + boundary_name(g.boundary) + "\n";
    out += "nodes " + std::to_string(g.nodes.size()) + "\n";
    for (const GraphNode& n : g.nodes) {
        out += std::to_string(n.id);
        out += ' ';
        out += role_name(n.role);
        out += ' ';
        out += std::to_string(n.row);
        out += ' ';
        out += std::to_string(n.col);
        out += ' ';
        out += std::to_string(n.site);
        out += ' ';
        out += format_double(n.x);
        out += ' ';
        out += format_double(n.y);
        out += '\n';
    }
    out += "edges " + std::to_string(g.edges.size()) + "\n";
    for (const GraphEdge& e : g.edges) {
        out += std::to_string(e.u);
        out += ' ';
        out += std::to_string(e.v);
        out += ' ';
        out += std::to_string(e.cls);
        out += ' ';
        out += format_double(e.length);
        out += '\n';
    }
    out += "end\n";
    return out;
}

inline NetworkGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw std::runtime_error("graph text truncated");
        return line;
    };

    NetworkGraph g;
    if (next_line() != "entnet-graph 1")
        throw std::runtime_error("bad graph header");

    std::vector<std::string> f = split_fields(next_line());
    if (f.size() != 2 || f[0] != "name") throw std::runtime_error("expected name line");
    g.name = f[1];

    f = split_fields(next_line());
    if (f.size() != 2 || f[0] != "boundary") throw std::runtime_error("expected boundary line");
    g.boundary = boundary_from_name(f[1]);

    f = split_fields(next_line());
    if (f.size() != 2 || f[0] != "nodes") throw std::runtime_error("expected nodes line");
    const long long nn = parse_int(f[1]);
    g.nodes.reserve(static_cast<std::size_t>(nn));
    for (long long i = 0; i < nn; ++i) {
        f = split_fields(next_line());
        if (f.size() != 7) throw std::runtime_error("bad node line");
        GraphNode n;
        n.id = static_cast<int>(parse_int(f[0]));
        n.role = role_from_name(f[1]);
        n.row = static_cast<int>(parse_int(f[2]));
        n.col = static_cast<int>(parse_int(f[3]));
        n.site = static_cast<int>(parse_int(f[4]));
        n.x = parse_double(f[5]);
        n.y = parse_double(f[6]);
        if (n.id != static_cast<int>(i)) throw std::runtime_error("node ids must be dense");
        g.nodes.push_back(n);
    }

    f = split_fields(next_line());
    if (f.size() != 2 || f[0] != "edges") throw std::runtime_error("expected edges line");
    const long long ne = parse_int(f[1]);
    g.edges.reserve(static_cast<std::size_t>(ne));
    for (long long i = 0; i < ne; ++i) {
        f = split_fields(next_line());
        if (f.size() != 4) throw std::runtime_error("bad edge line");
        GraphEdge e;
        e.u = static_cast<int>(parse_int(f[0]));
        e.v = static_cast<int>(parse_int(f[1]));
        e.cls = static_cast<int>(parse_int(f[2]));
        e.length = parse_double(f[3]);
        if (e.u < 0 || e.v < 0 || e.u >= static_cast<int>(g.nodes.size()) ||
            e.v >= static_cast<int>(g.nodes.size()))
            throw std::runtime_error("edge endpoint out of range");
        g.edges.push_back(e);
    }

    if (next_line() != "end") throw std::runtime_error("missing end marker");
    return g;
}

inline void save_graph(const NetworkGraph& g, const std::string& path) {
    atomic_write_text(path, serialize_graph(g));
}

inline NetworkGraph load_graph(const std::string& path) {
    return parse_graph(read_text_file(path));
}

} // namespace entnet
