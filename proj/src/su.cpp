#include "ym/su.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace ym {

double hs_inner(const CMat& a, const CMat& b) {
    return (a.array() * b.array().conjugate()).sum().real();
}

double hs_norm(const CMat& a) { return a.norm(); }

std::vector<CMat> su_basis(int n) {
    if (n < 2) throw std::invalid_argument("su_basis: n >= 2 required");
    const cplx i1(0.0, 1.0);
    std::vector<CMat> basis;
    basis.reserve(static_cast<size_t>(n) * n - 1);
    for (int k = 1; k < n; ++k) {
        CMat d = CMat::Zero(n, n);
        for (int j = 0; j < k; ++j) d(j, j) = i1;
        d(k, k) = -static_cast<double>(k) * i1;
        d /= std::sqrt(static_cast<double>(k) + static_cast<double>(k) * k);
        basis.push_back(d);
    }
    const double r2 = std::sqrt(2.0);
    for (int k = 0; k < n; ++k) {
        for (int m = k + 1; m < n; ++m) {
            CMat e = CMat::Zero(n, n);
            e(k, m) = 1.0 / r2;
            e(m, k) = -1.0 / r2;
            basis.push_back(e);
            CMat f = CMat::Zero(n, n);
            f(k, m) = i1 / r2;
            f(m, k) = i1 / r2;
            basis.push_back(f);
        }
    }
    return basis;
}

double casimir_su(int n) {
    return -(static_cast<double>(n) * n - 1.0) / n;
}

CMat project_su(const CMat& m) {
    CMat a = 0.5 * (m - m.adjoint());
    a -= (a.trace() / static_cast<double>(m.rows())) * CMat::Identity(m.rows(), m.cols());
    return a;
}

CMat exp_mat(const CMat& x) { return x.exp(); }

CMat haar_un(int n, RngStream& rng) {
    const double s = 1.0 / std::sqrt(2.0);
    CMat g(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) g(r, c) = cplx(rng.normal() * s, rng.normal() * s);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c) {
        cplx d = r(c, c);
        double ad = std::abs(d);
        q.col(c) *= (ad > 0.0) ? d / ad : cplx(1.0, 0.0);
    }
    return q;
}

CMat haar_sun(int n, RngStream& rng) {
    CMat u = haar_un(n, rng);
    double alpha = std::arg(u.determinant());  // principal branch
    return std::polar(1.0, -alpha / n) * u;
}

CMat u1_su_embed(double theta, const CMat& q) {
    return std::polar(1.0, theta / static_cast<double>(q.rows())) * q;
}

double unitarity_defect(const CMat& q) {
    return (q * q.adjoint() - CMat::Identity(q.rows(), q.cols())).norm();
}

CMat reunitarize(const CMat& q, bool special) {
    Eigen::JacobiSVD<CMat> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    CMat u = svd.matrixU() * svd.matrixV().adjoint();
    if (special) {
        double alpha = std::arg(u.determinant());
        u *= std::polar(1.0, -alpha / static_cast<double>(q.rows()));
    }
    return u;
}

namespace {
const std::vector<CMat>& cached_su_basis(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<CMat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, su_basis(n)).first;
    return it->second;
}
}  // namespace

CMat gaussian_su(int n, RngStream& rng) {
    const auto& basis = cached_su_basis(n);
    CMat x = CMat::Zero(n, n);
    for (const auto& v : basis) x += rng.normal() * v;
    return x;
}

CMat gaussian_un(int n, RngStream& rng) {
    CMat x = gaussian_su(n, rng);
    // extra u(N) direction i I / sqrt(N), unit hs-norm
    x += cplx(0.0, rng.normal() / std::sqrt(static_cast<double>(n))) * CMat::Identity(n, n);
    return x;
}

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("read_u64: truncated stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    write_u64(os, u);
}

double read_f64(std::istream& is) {
    std::uint64_t u = read_u64(is);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

void write_matrix(std::ostream& os, const CMat& m) {
    write_u64(os, static_cast<std::uint64_t>(m.rows()));
    write_u64(os, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            write_f64(os, m(r, c).real());
            write_f64(os, m(r, c).imag());
        }
}

CMat read_matrix(std::istream& is) {
    auto rows = static_cast<Eigen::Index>(read_u64(is));
    auto cols = static_cast<Eigen::Index>(read_u64(is));
    if (rows < 0 || cols < 0 || rows > 4096 || cols > 4096)
        throw std::runtime_error("read_matrix: implausible dimensions");
    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            double re = read_f64(is);
            double im = read_f64(is);
            m(r, c) = cplx(re, im);
        }
    return m;
}

}  // namespace ym
