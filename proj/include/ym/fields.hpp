#pragma once

#include <iosfwd>
#include <vector>

#include "ym/geometry.hpp"
#include "ym/rng.hpp"
#include "ym/su.hpp"

namespace ym {

// One matrix per positive edge.
struct GaugeField {
    int n = 0;  // matrix dimension
    std::vector<CMat> q;

    static GaugeField identity(const Lattice& lat, int n);
    static GaugeField haar_un(const Lattice& lat, int n, RngStream& rng);
    static GaugeField haar_sun(const Lattice& lat, int n, RngStream& rng);
};

// One angle in [0, 2*pi) per positive edge.
using AngleField = std::vector<double>;

AngleField uniform_angles(const Lattice& lat, RngStream& rng);
AngleField zero_angles(const Lattice& lat);

struct DecomposedField {
    AngleField theta;
    GaugeField q;
};

// Angle sum of a closed traversal, with signs; for a plaquette it lies in
// (-8*pi, 8*pi).
double theta_loop(const AngleField& theta, const PlaqLoop& loop);
double theta_loop(const AngleField& theta, const std::vector<OrientedEdge>& loop);
double theta_p(const Lattice& lat, const AngleField& theta, int p);

// Ordered product of edge matrices along a traversal (inverse = adjoint for
// unitary fields).
CMat loop_product(const GaugeField& f, const PlaqLoop& loop);
CMat loop_product(const GaugeField& f, const std::vector<OrientedEdge>& loop);
CMat plaquette_product(const Lattice& lat, const GaugeField& f, int p);

// e^{i theta_e / N} q_e on every edge.
GaugeField embed_field(const DecomposedField& f);

void write_gauge_field(std::ostream& os, const GaugeField& f);
GaugeField read_gauge_field(std::istream& is);
void write_angle_field(std::ostream& os, const AngleField& f);
AngleField read_angle_field(std::istream& is);

}  // namespace ym
