#pragma once

#include <string>
#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"

namespace ym {

// What a closed loop evaluates to on a decomposed configuration:
//   u_trace:  Re Tr prod(e^{i theta/n} q) / n   (full unitary holonomy)
//   su_trace: Re Tr prod(q) / n                 (SU component only)
//   u1_phase: cos(theta_loop / n)               (angle component only)
enum class LoopKind { u_trace, su_trace, u1_phase };

const char* loop_kind_name(LoopKind k);
LoopKind loop_kind_from_name(const std::string& s);  // throws on unknown

double loop_value(const DecomposedField& f, const std::vector<OrientedEdge>& path,
                  LoopKind kind);

// Splits U(n) matrices into angle and SU parts: theta = arg det in [0, 2 pi),
// q = e^{-i theta / n} U. Inverse of embed_field.
DecomposedField decompose_field(const GaugeField& u);

std::vector<OrientedEdge> plaquette_loop(const Lattice& lat, int p);

// Axis-aligned rectangle from a base vertex (user coordinates): len_a steps
// along axis a, len_b along b, then back. Throws if it leaves the lattice.
std::vector<OrientedEdge> rectangle_loop(const Lattice& lat, const std::vector<int>& base,
                                         int axis_a, int axis_b, int len_a, int len_b);

// Pairs of plaquettes separated by the given support distance, both
// orientations of the separation axis, used for covariance decay scans.
struct LoopPair {
    int pa = -1;
    int pb = -1;
};
std::vector<LoopPair> plaquette_pairs_at_distance(const Lattice& lat, int r);

}  // namespace ym
