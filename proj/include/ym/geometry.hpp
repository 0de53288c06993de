#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ym {

// Edge with a traversal direction; sign -1 means the positive edge walked
// head-to-tail.
struct OrientedEdge {
    int edge = -1;
    int sign = +1;
};

inline bool operator==(const OrientedEdge& a, const OrientedEdge& b) {
    return a.edge == b.edge && a.sign == b.sign;
}

// Closed 4-edge traversal of a plaquette (possibly rotated / reversed).
using PlaqLoop = std::array<OrientedEdge, 4>;

// A rotation of an incident plaquette re-oriented to start with the positive
// edge it was built from. `sign` records how the canonical plaquette
// traversed that edge (+1 forward, -1 backward).
struct StapleLoop {
    PlaqLoop loop;
    int plaq = -1;
    int sign = +1;
};

// Finite hypercubic lattice with free boundary (no wraparound). Vertices
// carry integer coordinates; edges point along +axis; plaquettes span an
// ordered axis pair (a < b) from a base vertex. Deterministic enumeration:
// edges and plaquettes are ordered by (base vertex index, axis [pair]), with
// vertex indices lexicographic in coordinates (axis 0 fastest).
class Lattice {
public:
    static constexpr int kMaxDim = 4;

    // Vertices [-L, L]^d. Requires 2 <= d <= 4, L >= 1.
    static Lattice cube(int d, int L);
    // General box: extent[a] >= 2 vertices along axis a (fixture lattices:
    // single plaquette, plaquette strips).
    static Lattice box(const std::vector<int>& extent);

    int dim() const { return d_; }
    // Cube half-side, or -1 for a general box.
    int side_L() const { return L_; }
    const std::vector<int>& extent() const { return extent_; }

    int n_vertices() const { return n_vertices_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    int n_plaquettes() const { return static_cast<int>(plaqs_.size()); }

    struct Edge {
        int v = -1;      // base (tail) vertex
        int axis = -1;   // head = v + e_axis
        int head = -1;
    };
    struct Plaq {
        int v = -1;  // base vertex
        int a = -1;  // first axis (a < b)
        int b = -1;
        PlaqLoop loop;                  // canonical traversal +a, +b, -a, -b
        std::array<int, 4> vertices{};  // corners visited by the traversal
    };

    const Edge& edge(int e) const { return edges_[e]; }
    const Plaq& plaquette(int p) const { return plaqs_[p]; }

    std::vector<int> vertex_coords(int v) const;           // user coordinates
    int vertex_index(const std::vector<int>& coords) const;  // -1 if outside
    int edge_at(int v, int axis) const;                      // -1 if absent
    int plaq_at(int v, int a, int b) const;                  // -1 if absent

    // +1 / -1 if the positive edge e appears forward / backward in the
    // canonical traversal of p, 0 if e is not an edge of p.
    int sgn(int e, int p) const;

    struct Incidence {
        int plaq;
        int sign;
        int pos;  // slot of e in the canonical traversal
    };
    const std::vector<Incidence>& plaquettes_containing(int e) const {
        return edge_plaqs_[e];
    }

    // Rotations of the canonical traversal so that e (sign +1) or e^{-1}
    // (sign -1) is the first oriented edge; sign equals sgn(e, p).
    std::vector<StapleLoop> plaquettes_first_edge(int e) const;

    // Incident plaquettes re-oriented (reversing where needed) so every loop
    // starts with e traversed positively. Reversal negates the loop's angle
    // sum and inverts its holonomy.
    std::vector<StapleLoop> staple_loops(int e) const;

    // True if consecutive oriented edges chain head-to-tail and the walk
    // closes.
    bool loop_closed(const std::vector<OrientedEdge>& loop) const;

    // BFS distance between the endpoint vertex sets of two edge supports;
    // 0 when the supports share a vertex.
    int graph_distance(const std::vector<int>& edges_a, const std::vector<int>& edges_b) const;

    // Plaquettes sharing at least one edge with p.
    const std::vector<int>& plaq_neighbors(int p) const { return plaq_adj_[p]; }

    // All plaquette sets K with |K| <= m_max such that every connected
    // component of K (adjacency: shared edge) contains at least one plaquette
    // with an edge in lambda_f. Includes the empty set. Sorted ids, no
    // duplicates, deterministic order.
    std::vector<std::vector<int>> enumerate_clusters(const std::vector<int>& lambda_f,
                                                     int m_max) const;

    // Plaquettes outside K that share no edge with K and contain no lambda_f
    // edge; the complement region whose partition function weights K's term.
    std::vector<int> exterior_plaquettes(const std::vector<int>& k,
                                         const std::vector<int>& lambda_f) const;

    // Plaquettes with at least one edge in lambda_f.
    std::vector<int> plaquettes_touching(const std::vector<int>& lambda_f) const;

    // Positive edges whose support lies within graph distance r of the given
    // edge set (distance of each edge measured support-to-support).
    std::vector<int> edges_within(const std::vector<int>& edges, int r) const;

    std::string describe() const;

private:
    Lattice() = default;
    void build();

    int d_ = 0;
    int L_ = -1;
    std::vector<int> extent_;   // vertices per axis
    std::vector<int> stride_;
    std::vector<int> origin_;   // user coords = internal + origin
    int n_vertices_ = 0;

    std::vector<Edge> edges_;
    std::vector<Plaq> plaqs_;
    std::vector<int> edge_of_;  // [v * d + axis] -> edge id or -1
    std::vector<int> plaq_of_;  // [(v * d + a) * d + b] -> plaq id or -1
    std::vector<std::vector<Incidence>> edge_plaqs_;
    std::vector<std::vector<int>> plaq_adj_;
    std::vector<std::vector<int>> vertex_nbrs_;
};

}  // namespace ym
