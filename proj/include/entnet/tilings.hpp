#pragma once

// Unit cells for the eleven uniform (Archimedean) tilings and the bow-tie
// (hourglass) lattice, plus a patch builder that tiles a cell into a finite
// network graph.
//
// Conventions:
//  * Every cell is scaled so all edges have unit length; the builder
//    multiplies by the requested physical edge length.
//  * Cell edges are {site1, site2, dcol, drow, class}: site2 lives in the
//    cell displaced by (dcol, drow).  Classes group edges that share one
//    survival probability in the inhomogeneous analyses; class ids are the
//    edge's index within the cell table.
//  * Vertical boundaries are always open.  Horizontal boundaries either
//    stay open or wrap (periodic-horizontal), which is the default for
//    threshold estimation since it removes the left/right surface.
//  * Tilings are named by their vertex configuration ("4.4.4.4", "3.6.3.6",
//    ...) with common aliases (square, triangular, honeycomb, kagome);
//    bow-tie variants are "bowtie-1" .. "bowtie-4", with Roman-numeral
//    spellings ("bowtie-I" .. "bowtie-IV") accepted as aliases.

#include "entnet/graph.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace entnet {

struct CellSite {
    double x = 0, y = 0;
};

struct CellEdge {
    int s1 = 0, s2 = 0;
    int dcol = 0, drow = 0;
    int cls = 0;
};

struct UnitCell {
    std::string name;
    double a1x = 1, a1y = 0; // lattice vector along columns
    double a2x = 0, a2y = 1; // lattice vector along rows
    std::vector<CellSite> sites;
    std::vector<CellEdge> edges;
};

namespace detail {

inline void push_edge(UnitCell& c, int s1, int s2, int dcol, int drow) {
    const int cls = static_cast<int>(c.edges.size());
    c.edges.push_back(CellEdge{s1, s2, dcol, drow, cls});
}

inline UnitCell cell_square() {
    UnitCell c;
    c.name = "4.4.4.4";
    c.a1x = 1; c.a1y = 0; c.a2x = 0; c.a2y = 1;
    c.sites = {{0, 0}};
    push_edge(c, 0, 0, 1, 0); // class 0: horizontal
    push_edge(c, 0, 0, 0, 1); // class 1: vertical
    return c;
}

inline UnitCell cell_triangular() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "3.3.3.3.3.3";
    c.a1x = 1; c.a1y = 0; c.a2x = 0.5; c.a2y = s3 / 2;
    c.sites = {{0, 0}};
    push_edge(c, 0, 0, 1, 0);
    push_edge(c, 0, 0, 0, 1);
    push_edge(c, 0, 0, -1, 1);
    return c;
}

inline UnitCell cell_honeycomb() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "6.6.6";
    c.a1x = s3; c.a1y = 0; c.a2x = s3 / 2; c.a2y = 1.5;
    c.sites = {{0, 0}, {0, 1}};
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 1, 0, 0, 1);
    push_edge(c, 1, 0, -1, 1);
    return c;
}

inline UnitCell cell_kagome() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "3.6.3.6";
    c.a1x = 2; c.a1y = 0; c.a2x = 1; c.a2y = s3;
    c.sites = {{0, 0}, {1, 0}, {0.5, s3 / 2}};
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 0, 2, 0, 0);
    push_edge(c, 1, 2, 0, 0);
    push_edge(c, 1, 0, 1, 0);
    push_edge(c, 2, 0, 0, 1);
    push_edge(c, 1, 2, 1, -1);
    return c;
}

// Hexagon ring of six sites plus bridging edges: every vertex meets
// triangle, square, hexagon, square.
inline UnitCell cell_3_4_6_4() {
    const double s3 = std::numbers::sqrt3;
    const double a = 1 + s3;
    UnitCell c;
    c.name = "3.4.6.4";
    c.a1x = a; c.a1y = 0; c.a2x = a / 2; c.a2y = a * s3 / 2;
    const double pi = std::numbers::pi;
    for (int k = 0; k < 6; ++k) {
        const double ang = pi / 6 + k * pi / 3;
        c.sites.push_back({std::cos(ang), std::sin(ang)});
    }
    for (int k = 0; k < 6; ++k) push_edge(c, k, (k + 1) % 6, 0, 0);
    push_edge(c, 0, 2, 1, 0);
    push_edge(c, 5, 3, 1, 0);
    push_edge(c, 1, 3, 0, 1);
    push_edge(c, 0, 4, 0, 1);
    push_edge(c, 2, 4, -1, 1);
    push_edge(c, 1, 5, -1, 1);
    return c;
}

// Honeycomb with each vertex blown up into a triangle.
inline UnitCell cell_3_12_12() {
    const double s3 = std::numbers::sqrt3;
    const double a = 2 + s3;
    const double h = a / s3;    // parent honeycomb edge
    const double d = 1 / s3;    // triangle circumradius
    UnitCell c;
    c.name = "3.12.12";
    c.a1x = a; c.a1y = 0; c.a2x = a / 2; c.a2y = a * s3 / 2;
    // Sites 0-2 around (0,0), sites 3-5 around (0,h); each triangle vertex
    // points along one parent edge direction.
    c.sites = {
        {0, d},                      // 0: up
        {-d * s3 / 2, -d / 2},       // 1: lower-left
        {d * s3 / 2, -d / 2},        // 2: lower-right
        {0, h - d},                  // 3: down (toward site 0)
        {d * s3 / 2, h + d / 2},     // 4: upper-right
        {-d * s3 / 2, h + d / 2},    // 5: upper-left
    };
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 1, 2, 0, 0);
    push_edge(c, 2, 0, 0, 0);
    push_edge(c, 3, 4, 0, 0);
    push_edge(c, 4, 5, 0, 0);
    push_edge(c, 5, 3, 0, 0);
    push_edge(c, 0, 3, 0, 0);
    push_edge(c, 4, 1, 0, 1);
    push_edge(c, 5, 2, -1, 1);
    return c;
}

// Dodecagon ring with bridges: squares between dodecagons, hexagons in the
// gaps.
inline UnitCell cell_4_6_12() {
    const double s3 = std::numbers::sqrt3;
    const double a = 3 + s3;
    const double pi = std::numbers::pi;
    const double R = 0.5 / std::sin(pi / 12);
    UnitCell c;
    c.name = "4.6.12";
    c.a1x = a; c.a1y = 0; c.a2x = a / 2; c.a2y = a * s3 / 2;
    for (int k = 0; k < 12; ++k) {
        const double ang = pi / 12 + k * pi / 6;
        c.sites.push_back({R * std::cos(ang), R * std::sin(ang)});
    }
    for (int k = 0; k < 12; ++k) push_edge(c, k, (k + 1) % 12, 0, 0);
    push_edge(c, 0, 5, 1, 0);
    push_edge(c, 11, 6, 1, 0);
    push_edge(c, 2, 7, 0, 1);
    push_edge(c, 1, 8, 0, 1);
    push_edge(c, 4, 9, -1, 1);
    push_edge(c, 3, 10, -1, 1);
    return c;
}

// Small tilted squares joined corner to corner through octagons.
inline UnitCell cell_4_8_8() {
    const double d = 1 / std::numbers::sqrt2;
    const double a = 1 + std::numbers::sqrt2;
    UnitCell c;
    c.name = "4.8.8";
    c.a1x = a; c.a1y = 0; c.a2x = 0; c.a2y = a;
    c.sites = {{d, 0}, {0, d}, {-d, 0}, {0, -d}};
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 1, 2, 0, 0);
    push_edge(c, 2, 3, 0, 0);
    push_edge(c, 3, 0, 0, 0);
    push_edge(c, 0, 2, 1, 0);
    push_edge(c, 1, 3, 0, 1);
    return c;
}

// Triangular lattice with one site in seven removed (those with
// 3n + m = 0 mod 7 in lattice coordinates): each survivor touches four
// triangles and one hexagon.
inline UnitCell cell_3_3_3_3_6() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "3.3.3.3.6";
    // e1 = (1,0), e2 = (1/2, s3/2); a1 = 2 e1 + e2, a2 = -e1 + 3 e2.
    c.a1x = 2.5; c.a1y = s3 / 2;
    c.a2x = 0.5; c.a2y = 3 * s3 / 2;
    for (int k = 1; k <= 6; ++k)
        c.sites.push_back({k * 0.5, k * s3 / 2});
    auto coset = [](long long u, long long v) {
        long long m = (3 * u + v) % 7;
        return static_cast<int>((m + 7) % 7);
    };
    const int deltas[3][2] = {{1, 0}, {0, 1}, {-1, 1}};
    for (int k = 1; k <= 6; ++k)
        for (const auto& d : deltas) {
            const long long tu = d[0];
            const long long tv = k + d[1];
            const int kp = coset(tu, tv);
            if (kp == 0) continue; // neighbour was removed
            const long long wu = tu;
            const long long wv = tv - kp;
            const long long col = (3 * wu + wv) / 7;
            const long long row = (-wu + 2 * wv) / 7;
            push_edge(c, k - 1, kp - 1, static_cast<int>(col), static_cast<int>(row));
        }
    return c;
}

// Rows of squares separated by strips of triangles.
inline UnitCell cell_3_3_3_4_4() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "3.3.3.4.4";
    c.a1x = 1; c.a1y = 0; c.a2x = 0.5; c.a2y = 1 + s3 / 2;
    c.sites = {{0, 0}, {0, 1}};
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 0, 0, 1, 0);
    push_edge(c, 1, 1, 1, 0);
    push_edge(c, 1, 0, 0, 1);
    push_edge(c, 1, 0, -1, 1);
    return c;
}

// Tilted central square per cell; neighbouring cells contribute the second
// square orientation and the triangle pairs.
inline UnitCell cell_3_3_4_3_4() {
    const double pi = std::numbers::pi;
    const double D = std::cos(pi / 12); // half the cell pitch
    UnitCell c;
    c.name = "3.3.4.3.4";
    c.a1x = 2 * D; c.a1y = 0; c.a2x = 0; c.a2y = 2 * D;
    const double r = 1 / std::numbers::sqrt2;
    for (int k = 0; k < 4; ++k) {
        const double ang = pi / 3 + k * pi / 2;
        c.sites.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    push_edge(c, 0, 1, 0, 0);
    push_edge(c, 1, 2, 0, 0);
    push_edge(c, 2, 3, 0, 0);
    push_edge(c, 3, 0, 0, 0);
    push_edge(c, 0, 1, 1, 0);
    push_edge(c, 1, 2, 0, 1);
    push_edge(c, 3, 2, 1, 0);
    push_edge(c, 0, 3, 0, 1);
    push_edge(c, 0, 2, 0, 1);
    push_edge(c, 3, 1, 1, 0);
    return c;
}

// Two triangles sharing a vertical edge, repeated: sites S (degree 6, the
// shared verticals) and O (degree 4, the crossing centres).  Classes:
// 0..3 the four diagonals, 4 the vertical.
inline UnitCell cell_bowtie1() {
    const double s3 = std::numbers::sqrt3;
    UnitCell c;
    c.name = "bowtie-1";
    c.a1x = s3; c.a1y = 0; c.a2x = 0; c.a2y = 1;
    c.sites = {{0, 0}, {s3 / 2, 0.5}};
    push_edge(c, 0, 1, 0, 0);  // class 0: lower-left diagonal of the right triangle pair
    push_edge(c, 1, 0, 0, 1);  // class 1: upper-left diagonal
    push_edge(c, 1, 0, 1, 0);  // class 2: lower-right diagonal
    push_edge(c, 1, 0, 1, 1);  // class 3: upper-right diagonal
    push_edge(c, 0, 0, 0, 1);  // class 4: vertical
    return c;
}

} // namespace detail

inline std::string canonical_tiling_name(const std::string& name) {
    if (name == "square") return "4.4.4.4";
    if (name == "triangular") return "3.3.3.3.3.3";
    if (name == "honeycomb" || name == "hexagonal") return "6.6.6";
    if (name == "kagome") return "3.6.3.6";
    if (name == "bowtie" || name == "bowtie-I") return "bowtie-1";
    if (name == "bowtie-II") return "bowtie-2";
    if (name == "bowtie-III") return "bowtie-3";
    if (name == "bowtie-IV") return "bowtie-4";
    return name;
}

inline const std::vector<std::string>& tiling_names() {
    static const std::vector<std::string> names = {
        "3.12.12", "4.6.12", "4.8.8", "6.6.6", "3.6.3.6", "3.4.6.4",
        "4.4.4.4", "3.3.3.3.6", "3.3.3.4.4", "3.3.4.3.4", "3.3.3.3.3.3",
        "bowtie-1",
    };
    return names;
}

inline UnitCell unit_cell(const std::string& requested) {
    const std::string name = canonical_tiling_name(requested);
    if (name == "4.4.4.4") return detail::cell_square();
    if (name == "3.3.3.3.3.3") return detail::cell_triangular();
    if (name == "6.6.6") return detail::cell_honeycomb();
    if (name == "3.6.3.6") return detail::cell_kagome();
    if (name == "3.4.6.4") return detail::cell_3_4_6_4();
    if (name == "3.12.12") return detail::cell_3_12_12();
    if (name == "4.6.12") return detail::cell_4_6_12();
    if (name == "4.8.8") return detail::cell_4_8_8();
    if (name == "3.3.3.3.6") return detail::cell_3_3_3_3_6();
    if (name == "3.3.3.4.4") return detail::cell_3_3_3_4_4();
    if (name == "3.3.4.3.4") return detail::cell_3_3_4_3_4();
    if (name == "bowtie-1") return detail::cell_bowtie1();
    throw std::invalid_argument("no generator for lattice '" + requested + "'");
}

inline bool has_tiling(const std::string& requested) {
    const std::string name = canonical_tiling_name(requested);
    for (const std::string& n : tiling_names())
        if (n == name) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Finite patches.

struct LatticePatch {
    NetworkGraph graph;
    std::vector<int> bottom; // nodes in the lowest cell row
    std::vector<int> top;    // nodes in the highest cell row
    int cols = 0, rows = 0;
    int sites_per_cell = 0;
    int num_classes = 0;
};

// Tile `cell` into cols x rows cells.  Vertical boundaries are open;
// horizontal boundaries wrap when `boundary` is PeriodicHorizontal.
inline LatticePatch build_patch(const UnitCell& cell, int cols, int rows,
                                Boundary boundary, double edge_length = 1.0) {
    if (cols < 1 || rows < 1) throw std::invalid_argument("patch needs at least one cell");
    if (boundary == Boundary::PeriodicHorizontal && cols < 3)
        throw std::invalid_argument("periodic wrap needs at least 3 columns");

    LatticePatch patch;
    patch.cols = cols;
    patch.rows = rows;
    patch.sites_per_cell = static_cast<int>(cell.sites.size());
    patch.graph.name = cell.name;
    patch.graph.boundary = boundary;

    const int S = patch.sites_per_cell;
    patch.graph.nodes.reserve(static_cast<std::size_t>(cols) * rows * S);
    for (int r = 0; r < rows; ++r)
        for (int cc = 0; cc < cols; ++cc)
            for (int s = 0; s < S; ++s) {
                const double x = edge_length * (cell.sites[static_cast<std::size_t>(s)].x +
                                                cc * cell.a1x + r * cell.a2x);
                const double y = edge_length * (cell.sites[static_cast<std::size_t>(s)].y +
                                                cc * cell.a1y + r * cell.a2y);
                patch.graph.add_node(NodeRole::Site, r, cc, s, x, y);
            }

    auto node_id = [&](int cc, int r, int s) { return (r * cols + cc) * S + s; };

    int max_cls = 0;
    for (const CellEdge& e : cell.edges)
        if (e.cls + 1 > max_cls) max_cls = e.cls + 1;
    patch.num_classes = max_cls;

    for (int r = 0; r < rows; ++r)
        for (int cc = 0; cc < cols; ++cc)
            for (const CellEdge& e : cell.edges) {
                const int tr = r + e.drow;
                if (tr < 0 || tr >= rows) continue;
                int tc = cc + e.dcol;
                if (boundary == Boundary::PeriodicHorizontal) {
                    tc = ((tc % cols) + cols) % cols;
                } else if (tc < 0 || tc >= cols) {
                    continue;
                }
                const double dx = e.dcol * cell.a1x + e.drow * cell.a2x +
                                  cell.sites[static_cast<std::size_t>(e.s2)].x -
                                  cell.sites[static_cast<std::size_t>(e.s1)].x;
                const double dy = e.dcol * cell.a1y + e.drow * cell.a2y +
                                  cell.sites[static_cast<std::size_t>(e.s2)].y -
                                  cell.sites[static_cast<std::size_t>(e.s1)].y;
                patch.graph.add_edge(node_id(cc, r, e.s1), node_id(tc, tr, e.s2), e.cls,
                                     edge_length * std::hypot(dx, dy));
            }

    for (int cc = 0; cc < cols; ++cc)
        for (int s = 0; s < S; ++s) {
            patch.bottom.push_back(node_id(cc, 0, s));
            patch.top.push_back(node_id(cc, rows - 1, s));
        }
    return patch;
}

// ---------------------------------------------------------------------------
// Literature thresholds used as references and regression anchors.

struct ThresholdRow {
    std::string name;
    double bond = 0;
    double site = 0;       // NaN when no cited value exists
    bool has_site = false;
    bool has_generator = true;
};

inline const std::vector<ThresholdRow>& reference_thresholds() {
    static const double nan = std::nan("");
    static const std::vector<ThresholdRow> rows = {
        {"bowtie-1", 0.404518, 0.5475, true, true},
        {"bowtie-2", 0.672929, nan, false, false},
        {"bowtie-3", 0.625457, nan, false, false},
        {"bowtie-4", 0.595482, nan, false, false},
        {"3.12.12", 0.740421, 0.807904, true, true},
        {"4.6.12", 0.693733, 0.747806, true, true},
        {"4.8.8", 0.676802, 0.729724, true, true},
        {"6.6.6", 0.652703, 0.697043, true, true},
        {"3.6.3.6", 0.524404, 0.652703, true, true},
        {"3.4.6.4", 0.524832, 0.621819, true, true},
        {"4.4.4.4", 0.5, 0.592746, true, true},
        {"3.3.3.3.6", 0.434306, 0.579498, true, true},
        {"3.3.3.4.4", 0.419641, 0.550213, true, true},
        {"3.3.4.3.4", 0.414137, 0.550806, true, true},
        {"3.3.3.3.3.3", 0.347296, 0.5, true, true},
    };
    return rows;
}

inline const ThresholdRow* find_reference(const std::string& requested) {
    const std::string name = canonical_tiling_name(requested);
    for (const ThresholdRow& r : reference_thresholds())
        if (r.name == name) return &r;
    return nullptr;
}

// Critical single-photon transmissivity on a lattice whose links succeed
// with probability eta^2: the network percolates when eta^2 exceeds the
// bond threshold.
inline double critical_transmissivity(double bond_threshold) {
    return std::sqrt(bond_threshold);
}

} // namespace entnet
