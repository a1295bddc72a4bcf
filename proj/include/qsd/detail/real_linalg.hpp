#pragma once

#include <span>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd::detail {

// Dense real matrix, row major. Workhorse for the Newton systems.
struct RMat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    RMat() = default;
    RMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static RMat identity(int n);
};

RMat matmul(const RMat& x, const RMat& y);

// In-place lower Cholesky of a symmetric positive definite matrix. The upper
// triangle is left untouched. Returns false on a non-positive pivot.
bool cholesky_inplace(RMat& m);
void chol_solve(const RMat& l, std::span<double> x);
RMat chol_inverse_spd(const RMat& l);

// Solves H x = g for symmetric positive definite H, with Jacobi scaling and
// an escalating diagonal shift if rounding spoils definiteness. Throws
// NumericalError when no shift up to 1e-2 rescues the factorization.
std::vector<double> solve_spd(RMat h, std::span<const double> g);

// Coordinates of Hermitian matrices on C^dim in the orthonormal real basis
//   { e_a e_a^T } + { (e_p e_q^+ + e_q e_p^+)/sqrt(2), i(e_p e_q^+ - e_q e_p^+)/sqrt(2) : p < q }.
// Layout: dim diagonal coordinates first, then the (re, im) pair for each
// p < q in row-major pair order.
int coord_count(int dim);
std::vector<double> herm_to_coords(const CMat& h);
CMat coords_to_herm(int dim, std::span<const double> v);

// Matrix of the map D -> X D X in the basis above, for Hermitian X.
// Symmetric; positive definite when X is.
RMat sandwich_matrix(const CMat& x);

// The partial transpose acts on the basis as a signed involution:
//   PT(B[c]) = sign[c] * B[perm[c]].
struct PtCoordMap {
    std::vector<int> perm;
    std::vector<double> sign;
};
PtCoordMap pt_coord_map(int d1, int d2);

// Matrix of D -> PT(Y * PT(D) * Y) given S = sandwich_matrix(Y).
RMat pt_conjugated_sandwich(const RMat& s, const PtCoordMap& map);

}  // namespace qsd::detail
