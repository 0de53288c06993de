#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ym/fields.hpp"
#include "ym/model.hpp"
#include "ym/samplers.hpp"
#include "ym/stats.hpp"
#include "ym/thetacond.hpp"

using namespace ym;

// On a single free-boundary plaquette the holonomy of a Haar product is Haar,
// so plaquette averages reduce to one-matrix integrals with known Bessel
// forms (gamma = n * beta):
//   U(2):  Z = I_0(g)^2 - I_1(g)^2,  E[Re Tr U] = I_1(g)(I_0(g) - I_2(g)) / Z
//   SU(2): Z = I_1(2g)/g,            E[Re Tr Q] = (I_0(2g) + I_2(2g))/I_1(2g) - 1/g
namespace {

double bi(int k, double x) { return std::cyl_bessel_i(double(k), x); }

double u2_mean_trace(double g) {
    double z = bi(0, g) * bi(0, g) - bi(1, g) * bi(1, g);
    return bi(1, g) * (bi(0, g) - bi(2, g)) / z;
}

double su2_mean_trace(double g) {
    return (bi(0, 2 * g) + bi(2, 2 * g)) / bi(1, 2 * g) - 1.0 / g;
}

}  // namespace

TEST_CASE("step tuner moves toward the window and freezes") {
    StepTuner t(1.0, 0.4, 0.6);
    SweepStats high{100, 90};
    t.observe(high);
    CHECK(t.eps() > 1.0);
    StepTuner t2(1.0, 0.4, 0.6);
    SweepStats low{100, 10};
    t2.observe(low);
    CHECK(t2.eps() < 1.0);
    SweepStats mid{100, 50};
    double e = t2.eps();
    t2.observe(mid);
    CHECK(t2.eps() == e);
    t2.freeze();
    t2.observe(high);
    CHECK(t2.eps() == e);
}

TEST_CASE("plaquette trace override") {
    RngStream rng(51, 0);
    Lattice lat = Lattice::cube(2, 1);
    GaugeField u = GaugeField::haar_un(lat, 2, rng);
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        int e = lat.plaquette(p).loop[2].edge;
        CMat qe = haar_un(2, rng);
        GaugeField mod = u;
        mod.q[e] = qe;
        cplx want = plaquette_product(lat, mod, p).trace();
        CHECK(std::abs(plaq_trace_override(lat, u, p, e, qe) - want) < 1e-12);
    }
}

TEST_CASE("direct metropolis reproduces the one-plaquette u(2) integral") {
    Lattice lat = Lattice::box({2, 2});
    const int n = 2;
    const double beta = 0.25;
    Couplings cpl = Couplings::uniform(lat, n, beta);
    RngStream rng(52, 3);
    GaugeField u = GaugeField::haar_un(lat, n, rng);
    StepTuner tuner(0.7);
    for (int s = 0; s < 500; ++s) tuner.observe(metropolis_sweep_un(lat, cpl, u, tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> tr;
    for (int s = 0; s < 20000; ++s) {
        metropolis_sweep_un(lat, cpl, u, tuner.eps(), rng);
        tr.push_back(plaquette_product(lat, u, 0).trace().real());
    }
    auto est = batch_mean(tr, 25);
    double want = u2_mean_trace(n * beta);
    CHECK(std::abs(est.value - want) < 4.0 * est.sigma);
    CHECK(est.sigma < 0.03);
}

TEST_CASE("joint metropolis reproduces the one-plaquette u(2) integral") {
    Lattice lat = Lattice::box({2, 2});
    const int n = 2;
    const double beta = 0.25;
    Couplings cpl = Couplings::uniform(lat, n, beta);
    RngStream rng(53, 3);
    DecomposedField f{zero_angles(lat), GaugeField::haar_sun(lat, n, rng)};
    StepTuner tuner(0.7);
    for (int s = 0; s < 500; ++s)
        tuner.observe(metropolis_sweep_joint(lat, cpl, f, tuner.eps(), tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> tr, su;
    for (int s = 0; s < 30000; ++s) {
        metropolis_sweep_joint(lat, cpl, f, tuner.eps(), tuner.eps(), rng);
        cplx qtr = plaquette_product(lat, f.q, 0).trace();
        double tp = theta_p(lat, f.theta, 0);
        tr.push_back((std::polar(1.0, tp / n) * qtr).real());
        su.push_back(qtr.real());
    }
    auto est = batch_mean(tr, 25);
    double want = u2_mean_trace(n * beta);
    CHECK(std::abs(est.value - want) < 4.0 * est.sigma);

    // theta_p stays inside the plaquette angle range
    CHECK(std::abs(theta_p(lat, f.theta, 0)) < 8.0 * M_PI);
}

TEST_CASE("su metropolis reproduces the one-plaquette su(2) integral") {
    Lattice lat = Lattice::box({2, 2});
    const int n = 2;
    const double beta = 0.35;
    Couplings cpl = Couplings::uniform(lat, n, beta);
    RngStream rng(54, 3);
    GaugeField q = GaugeField::haar_sun(lat, n, rng);
    StepTuner tuner(0.7);
    for (int s = 0; s < 500; ++s)
        tuner.observe(metropolis_sweep_sun(lat, cpl, q, tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> tr;
    for (int s = 0; s < 20000; ++s) {
        metropolis_sweep_sun(lat, cpl, q, tuner.eps(), rng);
        tr.push_back(plaquette_product(lat, q, 0).trace().real());
        if (s % 500 == 0)
            for (const auto& m : q.q) CHECK(unitarity_defect(m) < 1e-10);
    }
    auto est = batch_mean(tr, 25);
    double want = su2_mean_trace(n * beta);
    CHECK(std::abs(est.value - want) < 4.0 * est.sigma);
}

TEST_CASE("conditional angle sweep matches quadrature") {
    Lattice lat = Lattice::box({2, 2});
    const int n = 2;
    Couplings cpl = Couplings::uniform(lat, n, 0.5);
    RngStream rng(55, 0);
    GaugeField q = GaugeField::haar_sun(lat, n, rng);
    AngleField theta = zero_angles(lat);
    StepTuner tuner(0.8);
    for (int s = 0; s < 500; ++s)
        tuner.observe(conditional_theta_sweep(lat, cpl, theta, q, tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> xs;
    for (int s = 0; s < 20000; ++s) {
        conditional_theta_sweep(lat, cpl, theta, q, tuner.eps(), rng);
        xs.push_back(std::cos(theta_p(lat, theta, 0) / n));
    }
    auto est = batch_mean(xs, 25);
    ThetaQuadrature tq(lat, cpl, q, 24);
    double want = tq.expect([&](const AngleField& th) {
        return std::cos(theta_p(lat, th, 0) / n);
    });
    CHECK(std::abs(est.value - want) < 4.0 * est.sigma);
}

TEST_CASE("conditional sweep honors the frozen mask") {
    Lattice lat = Lattice::box({2, 2});
    Couplings cpl = Couplings::uniform(lat, 2, 0.3);
    RngStream rng(56, 0);
    GaugeField q = GaugeField::haar_sun(lat, 2, rng);
    AngleField theta = uniform_angles(lat, rng);
    std::vector<char> mask(lat.n_edges(), 0);
    mask[1] = 1;
    mask[3] = 1;
    double t1 = theta[1], t3 = theta[3];
    for (int s = 0; s < 50; ++s) conditional_theta_sweep(lat, cpl, theta, q, 0.8, rng, mask);
    CHECK(theta[1] == t1);
    CHECK(theta[3] == t3);
}

TEST_CASE("nu product sampling matches per-edge means") {
    Lattice lat = Lattice::cube(2, 1);
    Couplings cpl = Couplings::uniform(lat, 3, 0.3);
    RngStream rng(57, 0);
    GaugeField q = GaugeField::haar_sun(lat, 3, rng);
    const int n_samp = 20000;
    std::vector<double> sum(lat.n_edges(), 0.0), sumsq(lat.n_edges(), 0.0);
    for (int i = 0; i < n_samp; ++i) {
        AngleField t = nu_product_sample(lat, cpl, q, rng);
        for (int e = 0; e < lat.n_edges(); ++e) {
            sum[e] += t[e];
            sumsq[e] += t[e] * t[e];
        }
    }
    for (int e = 0; e < lat.n_edges(); ++e) {
        double m = sum[e] / n_samp;
        double sde = std::sqrt((sumsq[e] / n_samp - m * m) / n_samp);
        CHECK(std::abs(m - nu_mean(nu_rate(lat, cpl, q, e))) < 4.5 * sde);
    }
}

TEST_CASE("langevin group drift") {
    Lattice lat = Lattice::cube(2, 1);
    const int n = 2;
    Couplings cpl = Couplings::uniform(lat, n, 0.3);
    RngStream rng(58, 0);
    GaugeField q = GaugeField::identity(lat, n);
    for (int s = 0; s < 1000; ++s) langevin_step_wilson(lat, cpl, q, 1e-3, rng);
    double worst = 0.0;
    for (const auto& m : q.q)
        worst = std::max(worst, unitarity_defect(m) + std::abs(m.determinant() - cplx(1, 0)));
    CHECK(worst < 1e-10);
}

TEST_CASE("free langevin is stationary at haar") {
    Lattice lat = Lattice::cube(2, 1);
    const int n = 2;
    Couplings cpl = Couplings::uniform(lat, n, 0.0);
    RngStream rng(59, 0);
    GaugeField q = GaugeField::identity(lat, n);
    const double h = 0.02;
    for (int s = 0; s < 1000; ++s) langevin_step_wilson(lat, cpl, q, h, rng);
    std::vector<double> re, a2;
    for (int s = 0; s < 20000; ++s) {
        langevin_step_wilson(lat, cpl, q, h, rng);
        double sr = 0, s2 = 0;
        for (const auto& m : q.q) {
            cplx tr = m.trace();
            sr += tr.real();
            s2 += std::norm(tr);
        }
        re.push_back(sr / lat.n_edges());
        a2.push_back(s2 / lat.n_edges());
    }
    auto mre = batch_mean(re, 20);
    auto ma2 = batch_mean(a2, 20);
    // Haar: E Tr = 0, E |Tr|^2 = 1, up to O(h) discretization bias
    CHECK(std::abs(mre.value) < 4.0 * mre.sigma + 4.0 * h);
    CHECK(std::abs(ma2.value - 1.0) < 4.0 * ma2.sigma + 4.0 * h);
}

TEST_CASE("nested phase estimator tracks the quadrature phases") {
    Lattice lat = Lattice::box({2, 2});
    const int n = 2;
    Couplings cpl = Couplings::uniform(lat, n, 0.4);
    RngStream rng(60, 0);
    GaugeField q = GaugeField::haar_sun(lat, n, rng);
    auto want = ThetaQuadrature(lat, cpl, q, 24).plaquette_phases();
    NestedMcPhaseEstimator est(lat, cpl, 800, 0.8, 61, 5);
    cplx acc = 0.0;
    const int reps = 5;
    for (int r = 0; r < reps; ++r) acc += est.phases(q)[0];
    acc /= double(reps);
    CHECK(std::abs(acc - want[0]) < 0.1);  // MC accuracy, 4000 inner sweeps total
}

TEST_CASE("unit phase estimator turns the drift into the wilson drift") {
    Lattice lat = Lattice::cube(2, 1);
    const int n = 2;
    Couplings cpl = Couplings::uniform(lat, n, 0.3);
    RngStream r1(62, 0), r2(62, 0);
    GaugeField qa = GaugeField::haar_sun(lat, n, r1);
    GaugeField qb = qa;
    RngStream s1(63, 1), s2(63, 1);
    UnitPhaseEstimator unit(lat);
    langevin_step(lat, cpl, qa, unit, 0.01, s1);
    langevin_step_wilson(lat, cpl, qb, 0.01, s2);
    for (int e = 0; e < lat.n_edges(); ++e) CHECK((qa.q[e] - qb.q[e]).norm() < 1e-13);
}

TEST_CASE("integrated autocorrelation near one for independent draws") {
    RngStream rng(64, 0);
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.normal();
    double tau = integrated_autocorr(x);
    CHECK(tau > 0.8);
    CHECK(tau < 1.2);
}

TEST_CASE("autocovariance decay rate of an ar(1) chain") {
    RngStream rng(65, 0);
    const double rho = 0.9;
    std::vector<double> x(200000);
    x[0] = rng.normal();
    for (size_t i = 1; i < x.size(); ++i)
        x[i] = rho * x[i - 1] + std::sqrt(1 - rho * rho) * rng.normal();
    double rate = autocorr_decay_rate(x, 1, 20);
    CHECK(rate == doctest::Approx(-std::log(rho)).epsilon(0.2));
}
