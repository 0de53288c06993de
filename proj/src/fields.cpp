#include "ym/fields.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace ym {

GaugeField GaugeField::identity(const Lattice& lat, int n) {
    GaugeField f;
    f.n = n;
    f.q.assign(lat.n_edges(), CMat::Identity(n, n));
    return f;
}

GaugeField GaugeField::haar_un(const Lattice& lat, int n, RngStream& rng) {
    GaugeField f;
    f.n = n;
    f.q.reserve(lat.n_edges());
    for (int e = 0; e < lat.n_edges(); ++e) f.q.push_back(ym::haar_un(n, rng));
    return f;
}

GaugeField GaugeField::haar_sun(const Lattice& lat, int n, RngStream& rng) {
    GaugeField f;
    f.n = n;
    f.q.reserve(lat.n_edges());
    for (int e = 0; e < lat.n_edges(); ++e) f.q.push_back(ym::haar_sun(n, rng));
    return f;
}

AngleField uniform_angles(const Lattice& lat, RngStream& rng) {
    AngleField t(lat.n_edges());
    for (auto& x : t) x = rng.uniform(0.0, 6.283185307179586476925286766559);
    return t;
}

AngleField zero_angles(const Lattice& lat) { return AngleField(lat.n_edges(), 0.0); }

double theta_loop(const AngleField& theta, const PlaqLoop& loop) {
    double s = 0.0;
    for (const auto& oe : loop) s += oe.sign * theta[oe.edge];
    return s;
}

double theta_loop(const AngleField& theta, const std::vector<OrientedEdge>& loop) {
    double s = 0.0;
    for (const auto& oe : loop) s += oe.sign * theta[oe.edge];
    return s;
}

double theta_p(const Lattice& lat, const AngleField& theta, int p) {
    return theta_loop(theta, lat.plaquette(p).loop);
}

namespace {
template <typename Seq>
CMat loop_product_impl(const GaugeField& f, const Seq& loop) {
    CMat m = CMat::Identity(f.n, f.n);
    for (const auto& oe : loop) {
        if (oe.sign > 0)
            m *= f.q[oe.edge];
        else
            m *= f.q[oe.edge].adjoint();
    }
    return m;
}
}  // namespace

CMat loop_product(const GaugeField& f, const PlaqLoop& loop) {
    return loop_product_impl(f, loop);
}

CMat loop_product(const GaugeField& f, const std::vector<OrientedEdge>& loop) {
    return loop_product_impl(f, loop);
}

CMat plaquette_product(const Lattice& lat, const GaugeField& f, int p) {
    return loop_product(f, lat.plaquette(p).loop);
}

GaugeField embed_field(const DecomposedField& f) {
    GaugeField u;
    u.n = f.q.n;
    u.q.reserve(f.q.q.size());
    for (size_t e = 0; e < f.q.q.size(); ++e)
        u.q.push_back(u1_su_embed(f.theta[e], f.q.q[e]));
    return u;
}

void write_gauge_field(std::ostream& os, const GaugeField& f) {
    write_u64(os, static_cast<std::uint64_t>(f.n));
    write_u64(os, static_cast<std::uint64_t>(f.q.size()));
    for (const auto& m : f.q) write_matrix(os, m);
}

GaugeField read_gauge_field(std::istream& is) {
    GaugeField f;
    f.n = static_cast<int>(read_u64(is));
    auto ne = read_u64(is);
    f.q.reserve(ne);
    for (std::uint64_t e = 0; e < ne; ++e) f.q.push_back(read_matrix(is));
    return f;
}

void write_angle_field(std::ostream& os, const AngleField& f) {
    write_u64(os, static_cast<std::uint64_t>(f.size()));
    for (double x : f) write_f64(os, x);
}

AngleField read_angle_field(std::istream& is) {
    auto ne = read_u64(is);
    AngleField f(ne);
    for (auto& x : f) x = read_f64(is);
    return f;
}

}  // namespace ym
