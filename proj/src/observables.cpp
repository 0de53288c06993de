#include "ym/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace ym {

const char* loop_kind_name(LoopKind k) {
    switch (k) {
        case LoopKind::u_trace: return "u_trace";
        case LoopKind::su_trace: return "su_trace";
        case LoopKind::u1_phase: return "u1_phase";
    }
    return "?";
}

LoopKind loop_kind_from_name(const std::string& s) {
    if (s == "u_trace") return LoopKind::u_trace;
    if (s == "su_trace") return LoopKind::su_trace;
    if (s == "u1_phase") return LoopKind::u1_phase;
    throw std::invalid_argument("unknown observable kind: " + s);
}

double loop_value(const DecomposedField& f, const std::vector<OrientedEdge>& path,
                  LoopKind kind) {
    const int n = f.q.n;
    if (kind == LoopKind::u1_phase) return std::cos(theta_loop(f.theta, path) / n);
    cplx tr = loop_product(f.q, path).trace();
    if (kind == LoopKind::su_trace) return tr.real() / n;
    // u_trace: phases of the angle part multiply into e^{i theta_loop / n}
    double tl = theta_loop(f.theta, path);
    return (std::polar(1.0, tl / n) * tr).real() / n;
}

DecomposedField decompose_field(const GaugeField& u) {
    DecomposedField out;
    out.q.n = u.n;
    out.q.q.resize(u.q.size());
    out.theta.resize(u.q.size());
    for (std::size_t e = 0; e < u.q.size(); ++e) {
        double th = std::arg(u.q[e].determinant());
        if (th < 0.0) th += 2.0 * M_PI;
        out.theta[e] = th;
        out.q.q[e] = std::polar(1.0, -th / u.n) * u.q[e];
    }
    return out;
}

std::vector<OrientedEdge> plaquette_loop(const Lattice& lat, int p) {
    const auto& loop = lat.plaquette(p).loop;
    return std::vector<OrientedEdge>(loop.begin(), loop.end());
}

std::vector<OrientedEdge> rectangle_loop(const Lattice& lat, const std::vector<int>& base,
                                         int axis_a, int axis_b, int len_a, int len_b) {
    if (len_a < 1 || len_b < 1 || axis_a == axis_b)
        throw std::invalid_argument("rectangle_loop: bad shape");
    std::vector<OrientedEdge> out;
    std::vector<int> pos = base;
    auto step = [&](int axis, int dir) {
        std::vector<int> next = pos;
        next[axis] += dir;
        int tail = (dir > 0) ? lat.vertex_index(pos) : lat.vertex_index(next);
        if (tail < 0) throw std::invalid_argument("rectangle_loop: leaves the lattice");
        int e = lat.edge_at(tail, axis);
        if (e < 0) throw std::invalid_argument("rectangle_loop: leaves the lattice");
        out.push_back({e, dir});
        pos = next;
    };
    for (int i = 0; i < len_a; ++i) step(axis_a, +1);
    for (int i = 0; i < len_b; ++i) step(axis_b, +1);
    for (int i = 0; i < len_a; ++i) step(axis_a, -1);
    for (int i = 0; i < len_b; ++i) step(axis_b, -1);
    return out;
}

std::vector<LoopPair> plaquette_pairs_at_distance(const Lattice& lat, int r) {
    if (r < 0) throw std::invalid_argument("plaquette_pairs_at_distance: r < 0");
    std::vector<LoopPair> out;
    const int shift = r + 1;
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        const auto& pl = lat.plaquette(p);
        std::vector<int> base = lat.vertex_coords(pl.v);
        for (int axis : {pl.a, pl.b}) {
            std::vector<int> moved = base;
            moved[axis] += shift;
            int v2 = lat.vertex_index(moved);
            if (v2 < 0) continue;
            int q = lat.plaq_at(v2, pl.a, pl.b);
            if (q >= 0) out.push_back({p, q});
        }
    }
    return out;
}

}  // namespace ym
