#include "ym/geometry.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ym {

Lattice Lattice::cube(int d, int L) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("Lattice::cube: d must be in [2,4]");
    if (L < 1) throw std::invalid_argument("Lattice::cube: L >= 1 required");
    Lattice lat;
    lat.d_ = d;
    lat.L_ = L;
    lat.extent_.assign(d, 2 * L + 1);
    lat.origin_.assign(d, -L);
    lat.build();
    return lat;
}

Lattice Lattice::box(const std::vector<int>& extent) {
    int d = static_cast<int>(extent.size());
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("Lattice::box: d must be in [2,4]");
    for (int e : extent)
        if (e < 2) throw std::invalid_argument("Lattice::box: extent >= 2 per axis required");
    Lattice lat;
    lat.d_ = d;
    lat.L_ = -1;
    lat.extent_ = extent;
    lat.origin_.assign(d, 0);
    lat.build();
    return lat;
}

void Lattice::build() {
    stride_.assign(d_, 1);
    for (int a = 1; a < d_; ++a) stride_[a] = stride_[a - 1] * extent_[a - 1];
    n_vertices_ = stride_[d_ - 1] * extent_[d_ - 1];

    edge_of_.assign(static_cast<size_t>(n_vertices_) * d_, -1);
    plaq_of_.assign(static_cast<size_t>(n_vertices_) * d_ * d_, -1);

    auto coords_of = [&](int v) {
        std::array<int, kMaxDim> c{};
        for (int a = 0; a < d_; ++a) {
            c[a] = v % extent_[a];
            v /= extent_[a];
        }
        return c;
    };

    for (int v = 0; v < n_vertices_; ++v) {
        auto c = coords_of(v);
        for (int a = 0; a < d_; ++a) {
            if (c[a] + 1 >= extent_[a]) continue;
            Edge e;
            e.v = v;
            e.axis = a;
            e.head = v + stride_[a];
            edge_of_[static_cast<size_t>(v) * d_ + a] = static_cast<int>(edges_.size());
            edges_.push_back(e);
        }
    }

    for (int v = 0; v < n_vertices_; ++v) {
        auto c = coords_of(v);
        for (int a = 0; a < d_; ++a) {
            if (c[a] + 1 >= extent_[a]) continue;
            for (int b = a + 1; b < d_; ++b) {
                if (c[b] + 1 >= extent_[b]) continue;
                Plaq p;
                p.v = v;
                p.a = a;
                p.b = b;
                int va = v + stride_[a];
                int vb = v + stride_[b];
                p.vertices = {v, va, va + stride_[b], vb};
                // traversal +a, +b, -a, -b
                p.loop[0] = {edge_of_[static_cast<size_t>(v) * d_ + a], +1};
                p.loop[1] = {edge_of_[static_cast<size_t>(va) * d_ + b], +1};
                p.loop[2] = {edge_of_[static_cast<size_t>(vb) * d_ + a], -1};
                p.loop[3] = {edge_of_[static_cast<size_t>(v) * d_ + b], -1};
                plaq_of_[(static_cast<size_t>(v) * d_ + a) * d_ + b] =
                    static_cast<int>(plaqs_.size());
                plaqs_.push_back(p);
            }
        }
    }

    edge_plaqs_.assign(edges_.size(), {});
    for (int p = 0; p < n_plaquettes(); ++p)
        for (int pos = 0; pos < 4; ++pos) {
            const auto& oe = plaqs_[p].loop[pos];
            edge_plaqs_[oe.edge].push_back({p, oe.sign, pos});
        }

    plaq_adj_.assign(plaqs_.size(), {});
    for (int e = 0; e < n_edges(); ++e) {
        const auto& inc = edge_plaqs_[e];
        for (size_t i = 0; i < inc.size(); ++i)
            for (size_t j = 0; j < inc.size(); ++j)
                if (i != j) plaq_adj_[inc[i].plaq].push_back(inc[j].plaq);
    }
    for (auto& nb : plaq_adj_) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    vertex_nbrs_.assign(n_vertices_, {});
    for (const auto& e : edges_) {
        vertex_nbrs_[e.v].push_back(e.head);
        vertex_nbrs_[e.head].push_back(e.v);
    }
}

std::vector<int> Lattice::vertex_coords(int v) const {
    std::vector<int> c(d_);
    for (int a = 0; a < d_; ++a) {
        c[a] = v % extent_[a] + origin_[a];
        v /= extent_[a];
    }
    return c;
}

int Lattice::vertex_index(const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != d_) return -1;
    int v = 0;
    for (int a = 0; a < d_; ++a) {
        int c = coords[a] - origin_[a];
        if (c < 0 || c >= extent_[a]) return -1;
        v += c * stride_[a];
    }
    return v;
}

int Lattice::edge_at(int v, int axis) const {
    if (v < 0 || v >= n_vertices_ || axis < 0 || axis >= d_) return -1;
    return edge_of_[static_cast<size_t>(v) * d_ + axis];
}

int Lattice::plaq_at(int v, int a, int b) const {
    if (v < 0 || v >= n_vertices_ || a < 0 || b <= a || b >= d_) return -1;
    return plaq_of_[(static_cast<size_t>(v) * d_ + a) * d_ + b];
}

int Lattice::sgn(int e, int p) const {
    for (const auto& oe : plaqs_[p].loop)
        if (oe.edge == e) return oe.sign;
    return 0;
}

std::vector<StapleLoop> Lattice::plaquettes_first_edge(int e) const {
    std::vector<StapleLoop> out;
    out.reserve(edge_plaqs_[e].size());
    for (const auto& inc : edge_plaqs_[e]) {
        StapleLoop s;
        s.plaq = inc.plaq;
        s.sign = inc.sign;
        const auto& l = plaqs_[inc.plaq].loop;
        for (int i = 0; i < 4; ++i) s.loop[i] = l[(inc.pos + i) % 4];
        out.push_back(s);
    }
    return out;
}

std::vector<StapleLoop> Lattice::staple_loops(int e) const {
    std::vector<StapleLoop> out = plaquettes_first_edge(e);
    for (auto& s : out) {
        if (s.sign == +1) continue;
        // reverse the rotated loop and rotate once more: starts with +e
        PlaqLoop rev;
        for (int i = 0; i < 4; ++i) {
            const auto& oe = s.loop[(4 - i) % 4];
            rev[i] = {oe.edge, -oe.sign};
        }
        s.loop = rev;
    }
    return out;
}

bool Lattice::loop_closed(const std::vector<OrientedEdge>& loop) const {
    if (loop.empty()) return false;
    auto tail = [&](const OrientedEdge& oe) {
        return oe.sign > 0 ? edges_[oe.edge].v : edges_[oe.edge].head;
    };
    auto head = [&](const OrientedEdge& oe) {
        return oe.sign > 0 ? edges_[oe.edge].head : edges_[oe.edge].v;
    };
    for (size_t i = 0; i < loop.size(); ++i)
        if (head(loop[i]) != tail(loop[(i + 1) % loop.size()])) return false;
    return true;
}

int Lattice::graph_distance(const std::vector<int>& edges_a,
                            const std::vector<int>& edges_b) const {
    if (edges_a.empty() || edges_b.empty())
        throw std::invalid_argument("graph_distance: empty edge support");
    std::vector<int> dist(n_vertices_, -1);
    std::vector<char> target(n_vertices_, 0);
    for (int e : edges_b) {
        target[edges_[e].v] = 1;
        target[edges_[e].head] = 1;
    }
    std::queue<int> q;
    for (int e : edges_a) {
        for (int v : {edges_[e].v, edges_[e].head}) {
            if (dist[v] < 0) {
                dist[v] = 0;
                q.push(v);
            }
        }
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (target[v]) return dist[v];
        for (int w : vertex_nbrs_[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
    }
    return -1;  // unreachable (cannot happen on a connected box)
}

std::vector<int> Lattice::plaquettes_touching(const std::vector<int>& lambda_f) const {
    std::set<int> acc;
    for (int e : lambda_f)
        for (const auto& inc : edge_plaqs_[e]) acc.insert(inc.plaq);
    return {acc.begin(), acc.end()};
}

std::vector<std::vector<int>> Lattice::enumerate_clusters(const std::vector<int>& lambda_f,
                                                          int m_max) const {
    if (m_max < 0) throw std::invalid_argument("enumerate_clusters: m_max >= 0");
    std::vector<int> seeds = plaquettes_touching(lambda_f);
    std::vector<char> is_seed(plaqs_.size(), 0);
    for (int p : seeds) is_seed[p] = 1;

    // connected pieces: subsets with at least one seed, grown over shared
    // edges; set-dedup keeps each piece once
    std::set<std::vector<int>> pieces;
    std::vector<std::vector<int>> frontier;
    for (int p : seeds) frontier.push_back({p});
    for (const auto& f : frontier) pieces.insert(f);
    for (int size = 1; size < m_max; ++size) {
        std::vector<std::vector<int>> next;
        for (const auto& s : frontier) {
            std::set<int> cand;
            for (int p : s)
                for (int q : plaq_adj_[p]) cand.insert(q);
            for (int p : s) cand.erase(p);
            for (int q : cand) {
                std::vector<int> grown = s;
                grown.insert(std::lower_bound(grown.begin(), grown.end(), q), q);
                if (pieces.insert(grown).second) next.push_back(grown);
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }

    std::vector<std::vector<int>> piece_list(pieces.begin(), pieces.end());
    // order pieces by (min plaquette, contents) for a stable combination pass
    std::sort(piece_list.begin(), piece_list.end());

    // adjacency closure per piece: piece ids plus everything sharing an edge
    std::vector<std::set<int>> blocked(piece_list.size());
    for (size_t i = 0; i < piece_list.size(); ++i) {
        for (int p : piece_list[i]) {
            blocked[i].insert(p);
            for (int q : plaq_adj_[p]) blocked[i].insert(q);
        }
    }

    std::vector<std::vector<int>> out;
    out.push_back({});  // empty cluster
    std::vector<int> current;
    std::set<int> used;  // plaquettes blocked by chosen pieces

    // combine pairwise non-adjacent pieces; enforce increasing min-id order
    auto rec = [&](auto&& self, size_t start, int remaining) -> void {
        for (size_t i = start; i < piece_list.size(); ++i) {
            const auto& piece = piece_list[i];
            if (static_cast<int>(piece.size()) > remaining) continue;
            bool clash = false;
            for (int p : piece)
                if (used.count(p)) {
                    clash = true;
                    break;
                }
            if (!clash)
                for (int p : piece) {
                    bool any = false;
                    for (int q : plaq_adj_[p])
                        if (used.count(q)) {
                            any = true;
                            break;
                        }
                    if (any) {
                        clash = true;
                        break;
                    }
                }
            if (clash) continue;
            std::vector<int> saved_current = current;
            current.insert(current.end(), piece.begin(), piece.end());
            std::sort(current.begin(), current.end());
            out.push_back(current);
            std::vector<int> added(piece.begin(), piece.end());
            for (int p : piece) used.insert(p);
            self(self, i + 1, remaining - static_cast<int>(piece.size()));
            for (int p : added) used.erase(p);
            current = std::move(saved_current);
        }
    };
    rec(rec, 0, m_max);

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

std::vector<int> Lattice::exterior_plaquettes(const std::vector<int>& k,
                                              const std::vector<int>& lambda_f) const {
    std::vector<char> excluded(plaqs_.size(), 0);
    for (int p : k) {
        excluded[p] = 1;
        for (int q : plaq_adj_[p]) excluded[q] = 1;
    }
    for (int p : plaquettes_touching(lambda_f)) excluded[p] = 1;
    std::vector<int> out;
    for (int p = 0; p < n_plaquettes(); ++p)
        if (!excluded[p]) out.push_back(p);
    return out;
}

std::vector<int> Lattice::edges_within(const std::vector<int>& edges, int r) const {
    std::vector<int> out;
    for (int e = 0; e < n_edges(); ++e)
        if (graph_distance({e}, edges) <= r) out.push_back(e);
    return out;
}

std::string Lattice::describe() const {
    std::ostringstream os;
    os << "lattice d=" << d_;
    if (L_ >= 0) os << " L=" << L_;
    os << " extent=[";
    for (int a = 0; a < d_; ++a) os << (a ? "," : "") << extent_[a];
    os << "] vertices=" << n_vertices_ << " edges=" << n_edges()
       << " plaquettes=" << n_plaquettes();
    return os.str();
}

}  // namespace ym
