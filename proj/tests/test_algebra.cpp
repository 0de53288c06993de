#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "ym/rng.hpp"
#include "ym/su.hpp"

using namespace ym;

namespace {

CMat random_complex(int n, RngStream& rng) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
    return m;
}

}  // namespace

TEST_CASE("su basis orthonormality and casimir") {
    for (int n = 2; n <= 6; ++n) {
        auto basis = su_basis(n);
        REQUIRE(int(basis.size()) == n * n - 1);
        for (size_t a = 0; a < basis.size(); ++a) {
            CHECK(std::abs(basis[a].trace()) < 1e-13);
            CHECK((basis[a] + basis[a].adjoint()).norm() < 1e-13);  // anti-Hermitian
            for (size_t b = 0; b < basis.size(); ++b) {
                double want = a == b ? 1.0 : 0.0;
                CHECK(std::abs(hs_inner(basis[a], basis[b]) - want) < 1e-12);
            }
        }
        CMat sum = CMat::Zero(n, n);
        for (const auto& v : basis) sum += v * v;
        CMat want = casimir_su(n) * CMat::Identity(n, n);
        CHECK((sum - want).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(casimir_su(n) == doctest::Approx(-double(n * n - 1) / n).epsilon(1e-14));
    }
}

TEST_CASE("projection residual is orthogonal to su") {
    RngStream rng(11, 0);
    for (int n : {2, 3, 5}) {
        auto basis = su_basis(n);
        for (int rep = 0; rep < 300; ++rep) {
            CMat m = random_complex(n, rng);
            CMat p = project_su(m);
            CHECK(std::abs(p.trace()) < 1e-12);
            CHECK((p + p.adjoint()).norm() < 1e-12);
            CMat resid = m - p;
            for (const auto& v : basis) CHECK(std::abs(hs_inner(resid, v)) < 1e-10);
            // idempotent
            CHECK((project_su(p) - p).norm() < 1e-12);
        }
    }
}

TEST_CASE("projection reproduces basis expansion") {
    RngStream rng(12, 0);
    for (int n : {2, 4}) {
        auto basis = su_basis(n);
        for (int rep = 0; rep < 20; ++rep) {
            CMat m = random_complex(n, rng);
            CMat expand = CMat::Zero(n, n);
            for (const auto& v : basis) expand += hs_inner(m, v) * v;
            CHECK((project_su(m) - expand).norm() < 1e-10);
        }
    }
}

TEST_CASE("matrix exponential vs series and group membership") {
    RngStream rng(13, 0);
    for (int n : {2, 3, 5}) {
        for (int rep = 0; rep < 20; ++rep) {
            CMat x = 0.3 * project_su(random_complex(n, rng));
            CMat e = exp_mat(x);
            CMat series = CMat::Identity(n, n);
            CMat term = CMat::Identity(n, n);
            for (int k = 1; k <= 30; ++k) {
                term = term * x / double(k);
                series += term;
            }
            CHECK((e - series).norm() < 1e-12);
            CHECK(unitarity_defect(e) < 1e-12);
            CHECK(std::abs(e.determinant() - cplx(1.0, 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("haar samples live on the right group") {
    RngStream rng(14, 0);
    for (int n : {2, 3}) {
        for (int rep = 0; rep < 50; ++rep) {
            CMat u = haar_un(n, rng);
            CHECK(unitarity_defect(u) < 1e-12);
            CMat q = haar_sun(n, rng);
            CHECK(unitarity_defect(q) < 1e-12);
            CHECK(std::abs(q.determinant() - cplx(1.0, 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("haar moments") {
    RngStream rng(15, 0);
    const int n_samp = 30000;
    for (int variant = 0; variant < 2; ++variant) {
        int n = variant == 0 ? 2 : 3;
        double sr = 0, si = 0, s2 = 0, s2sq = 0, srsq = 0, sisq = 0;
        for (int i = 0; i < n_samp; ++i) {
            CMat u = variant == 0 ? haar_un(n, rng) : haar_sun(n, rng);
            cplx tr = u.trace();
            sr += tr.real();
            si += tr.imag();
            srsq += tr.real() * tr.real();
            sisq += tr.imag() * tr.imag();
            double a2 = std::norm(tr);
            s2 += a2;
            s2sq += a2 * a2;
        }
        double mr = sr / n_samp, mi = si / n_samp;
        double sder = std::sqrt((srsq / n_samp - mr * mr) / n_samp);
        double sdei = std::sqrt((sisq / n_samp - mi * mi) / n_samp);
        CHECK(std::abs(mr) < 3.5 * sder);
        CHECK(std::abs(mi) < 3.5 * sdei);
        double m2 = s2 / n_samp;
        double sde2 = std::sqrt((s2sq / n_samp - m2 * m2) / n_samp);
        CHECK(std::abs(m2 - 1.0) < 3.5 * sde2);  // E|Tr|^2 = 1 on U(n) and SU(n), n >= 2
    }
}

TEST_CASE("su(2) squared character moment") {
    // (Tr)^2 decomposes into trivial + adjoint: E[(Tr Q)^2] = 1 on SU(2)
    RngStream rng(16, 0);
    const int n_samp = 30000;
    double s = 0, ssq = 0;
    for (int i = 0; i < n_samp; ++i) {
        CMat q = haar_sun(2, rng);
        double t = q.trace().real();  // SU(2) trace is real
        CHECK(std::abs(q.trace().imag()) < 1e-12);
        s += t * t;
        ssq += t * t * t * t;
    }
    double m = s / n_samp;
    double sde = std::sqrt((ssq / n_samp - m * m) / n_samp);
    CHECK(std::abs(m - 1.0) < 3.5 * sde);
}

TEST_CASE("u1 embed pushes to haar u(n)") {
    RngStream rng(17, 0);
    const int n = 3;
    const int n_samp = 20000;
    double sr = 0, srsq = 0, s2 = 0, s2sq = 0;
    for (int i = 0; i < n_samp; ++i) {
        double theta = rng.uniform(0.0, 2.0 * M_PI);
        CMat q = haar_sun(n, rng);
        CMat u = u1_su_embed(theta, q);
        CHECK(std::abs(u.determinant() - std::polar(1.0, theta)) < 1e-12);
        cplx tr = u.trace();
        sr += tr.real();
        srsq += tr.real() * tr.real();
        double a2 = std::norm(tr);
        s2 += a2;
        s2sq += a2 * a2;
    }
    double mr = sr / n_samp;
    double sder = std::sqrt((srsq / n_samp - mr * mr) / n_samp);
    CHECK(std::abs(mr) < 3.5 * sder);
    double m2 = s2 / n_samp;
    double sde2 = std::sqrt((s2sq / n_samp - m2 * m2) / n_samp);
    CHECK(std::abs(m2 - 1.0) < 3.5 * sde2);
}

TEST_CASE("reunitarize recovers the group") {
    RngStream rng(18, 0);
    for (int n : {2, 4}) {
        for (int rep = 0; rep < 50; ++rep) {
            CMat q = haar_sun(n, rng);
            CMat noisy = q + 1e-3 * random_complex(n, rng);
            CMat r = reunitarize(noisy, true);
            CHECK(unitarity_defect(r) < 1e-12);
            CHECK(std::abs(r.determinant() - cplx(1.0, 0.0)) < 1e-12);
            CHECK((r - q).norm() < 1e-2);  // stays near the input
            CHECK((reunitarize(r, true) - r).norm() < 1e-13);
            CMat ru = reunitarize(noisy, false);
            CHECK(unitarity_defect(ru) < 1e-12);
        }
    }
}

TEST_CASE("gaussian tangent draws") {
    RngStream rng(19, 0);
    for (int n : {2, 3}) {
        double s = 0, ssq = 0;
        const int n_samp = 20000;
        for (int i = 0; i < n_samp; ++i) {
            CMat x = gaussian_su(n, rng);
            if (i < 100) CHECK((project_su(x) - x).norm() < 1e-12);
            double nn = hs_norm(x) * hs_norm(x);
            s += nn;
            ssq += nn * nn;
        }
        double m = s / n_samp;
        double sde = std::sqrt((ssq / n_samp - m * m) / n_samp);
        CHECK(std::abs(m - double(n * n - 1)) < 4 * sde);  // dim(su(n)) components

        CMat y = gaussian_un(n, rng);
        // u(n) draw need not be traceless, but must be anti-Hermitian
        CHECK((y + y.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("rng determinism and serialization") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_eq = true, any_ne = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a.bits(), y = b.bits(), z = c.bits();
        all_eq = all_eq && (x == y);
        any_ne = any_ne || (x != z);
    }
    CHECK(all_eq);
    CHECK(any_ne);

    std::string st = a.state();
    std::vector<std::uint64_t> ahead;
    for (int i = 0; i < 10; ++i) ahead.push_back(a.bits());
    b.restore(st);
    for (int i = 0; i < 10; ++i) CHECK(b.bits() == ahead[i]);
    CHECK_THROWS(b.restore("not a state"));
}

TEST_CASE("rng variates") {
    RngStream rng(20, 0);
    const int n_samp = 100000;
    double s = 0, ssq = 0;
    for (int i = 0; i < n_samp; ++i) {
        double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double g = rng.normal();
        s += g;
        ssq += g * g;
    }
    double m = s / n_samp;
    CHECK(std::abs(m) < 3.5 / std::sqrt(double(n_samp)));
    double v = ssq / n_samp - m * m;
    CHECK(std::abs(v - 1.0) < 3.5 * std::sqrt(2.0 / n_samp));
}

TEST_CASE("matrix serialization round trip") {
    RngStream rng(21, 0);
    CMat m = random_complex(4, rng);
    std::stringstream ss;
    write_matrix(ss, m);
    write_f64(ss, 0.1234567890123456789);
    write_u64(ss, 0xdeadbeefcafef00dULL);
    CMat back = read_matrix(ss);
    CHECK(back.rows() == 4);
    CHECK((back - m).norm() == 0.0);  // bit-exact
    CHECK(read_f64(ss) == 0.1234567890123456789);
    CHECK(read_u64(ss) == 0xdeadbeefcafef00dULL);
}
