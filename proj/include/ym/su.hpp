#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ym/rng.hpp"

namespace ym {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;  // dense column-major complex, N <= 64 expected

// Hilbert-Schmidt inner product Re Tr(a b*); real-valued, makes u(N) Euclidean.
double hs_inner(const CMat& a, const CMat& b);
double hs_norm(const CMat& a);

// Orthonormal basis of su(N) (anti-Hermitian traceless) under hs_inner.
// Order: diagonal directions D_1..D_{N-1}, then for each k < n the
// antisymmetric and symmetric off-diagonal pair. Size N^2 - 1.
std::vector<CMat> su_basis(int n);

// sum_a v_a^2 = casimir_su(n) * I over the su(N) basis.
double casimir_su(int n);

// Orthogonal projection of C^{NxN} onto su(N): anti-Hermitian part minus its
// trace/N. Residual m - project_su(m) is hs-orthogonal to every basis element.
CMat project_su(const CMat& m);

// Matrix exponential (Pade scaling-and-squaring). exp of an anti-Hermitian
// traceless argument lands in SU(N).
CMat exp_mat(const CMat& x);

// Haar samples: U(N) via QR of a complex Ginibre matrix with the R-diagonal
// phase fix; SU(N) by removing the principal det root.
CMat haar_un(int n, RngStream& rng);
CMat haar_sun(int n, RngStream& rng);

// e^{i theta / N} q; pushes uniform[0,2pi) x Haar(SU(N)) to Haar(U(N)).
CMat u1_su_embed(double theta, const CMat& q);

// Frobenius distance of q q* from the identity.
double unitarity_defect(const CMat& q);

// Nearest (special) unitary via polar decomposition; idempotent to ~1e-13.
CMat reunitarize(const CMat& q, bool special);

// Standard Gaussian on su(N) resp. u(N): sum_a g_a v_a, g_a iid N(0,1).
CMat gaussian_su(int n, RngStream& rng);
CMat gaussian_un(int n, RngStream& rng);

// Binary-stable serialization: little-endian u64 row/col header then row-major
// (re, im) f64 pairs.
void write_matrix(std::ostream& os, const CMat& m);
CMat read_matrix(std::istream& is);
void write_f64(std::ostream& os, double v);
double read_f64(std::istream& is);
void write_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_u64(std::istream& is);

}  // namespace ym
