#pragma once

#include <complex>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

using Complex = std::complex<double>;

// Largest total dimension d1*d2 the dense kernels accept.
inline constexpr int kMaxTotalDim = 256;

// Dense complex matrix, row major.
class CMat {
public:
    CMat() = default;
    CMat(int rows, int cols);

    static CMat identity(int n);
    // Rank-one matrix u * v^dagger.
    static CMat outer(const std::vector<Complex>& u, const std::vector<Complex>& v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(Complex s);

    CMat adjoint() const;
    CMat transpose() const;
    Complex trace() const;

    // (A + A^dagger) / 2. Requires a square matrix.
    CMat hermitian_part() const;

    double max_abs() const;
    double frobenius_norm() const;
    // Largest |A[j][k] - conj(A[k][j])|.
    double hermiticity_defect() const;
    bool is_finite() const;

    std::vector<Complex> apply(const std::vector<Complex>& v) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> a_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator*(const CMat& a, const CMat& b);
CMat operator*(Complex s, CMat a);
double max_abs_diff(const CMat& a, const CMat& b);

// Kronecker product. Throws CapacityError if the result side exceeds
// kMaxTotalDim.
CMat kron(const CMat& a, const CMat& b);

// A Hermitian matrix on C^{d1} (x) C^{d2}, validated on construction.
// Stored entries are kept exactly as supplied; the constructor only checks
// that the defect from Hermiticity stays below herm_tol.
class HermitianOperator {
public:
    // Empty placeholder, dim() == 0. Only create() yields a usable operator.
    HermitianOperator() = default;

    static HermitianOperator create(int d1, int d2, CMat m, double herm_tol = 1e-10);

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    int dim() const { return d1_ * d2_; }
    double herm_tol() const { return herm_tol_; }
    const CMat& mat() const { return m_; }

private:
    HermitianOperator(int d1, int d2, CMat m, double herm_tol)
        : d1_(d1), d2_(d2), herm_tol_(herm_tol), m_(std::move(m)) {}

    int d1_ = 0;
    int d2_ = 0;
    double herm_tol_ = 0.0;
    CMat m_;
};

// Transpose on the second tensor factor:
//   out[(a1,a2),(b1,b2)] = in[(a1,b2),(b1,a2)]
// with basis index (x, y) -> x*d2 + y. A pure entry permutation, so applying
// it twice restores the input exactly.
CMat partial_transpose(const CMat& m, int d1, int d2);
HermitianOperator partial_transpose(const HermitianOperator& a);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    CMat eigenvectors;                // column k pairs with eigenvalues[k]
};

// Cyclic Jacobi diagonalization. Sweeps until the off-diagonal Frobenius
// mass falls below 1e-13 * dim, relative to the input scale; throws
// NumericalError if 100 sweeps do not get there.
Spectrum eig_hermitian(const CMat& m);
Spectrum eig_hermitian(const HermitianOperator& a);

double min_eigenvalue(const HermitianOperator& a);
bool is_psd(const HermitianOperator& a, double tol);

// Tr(a * b), real for Hermitian inputs. Throws NumericalError if the
// imaginary residue exceeds 1e-10.
double trace_inner(const HermitianOperator& a, const HermitianOperator& b);

// Sum of absolute eigenvalues.
double trace_norm(const HermitianOperator& a);

// Cholesky factor L with m = L * L^dagger, L lower triangular with positive
// diagonal. Returns false if a pivot is not strictly positive.
bool cholesky(const CMat& m, CMat& l);
// log det(m) from its Cholesky factor.
double chol_log_det(const CMat& l);
// Inverse of m from its Cholesky factor.
CMat chol_inverse(const CMat& l);

}  // namespace qsd
