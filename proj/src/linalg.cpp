#include "qsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsd {

const char* to_string(ValidationKind kind) {
    switch (kind) {
        case ValidationKind::PriorSum: return "prior sum violation";
        case ValidationKind::PriorRange: return "prior out of range";
        case ValidationKind::NonPsd: return "matrix not positive semidefinite";
        case ValidationKind::TraceViolation: return "trace violation";
        case ValidationKind::DimensionMismatch: return "dimension mismatch";
        case ValidationKind::NotHermitian: return "matrix not Hermitian";
        case ValidationKind::Completeness: return "POVM completeness violation";
        case ValidationKind::CountMismatch: return "count mismatch";
        case ValidationKind::NonFinite: return "non-finite entry";
        case ValidationKind::BadArgument: return "bad argument";
    }
    return "unknown validation failure";
}

CMat::CMat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw ValidationError(ValidationKind::BadArgument, "negative matrix dimension");
    a_.assign(static_cast<size_t>(rows) * cols, Complex(0.0, 0.0));
}

CMat CMat::identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::outer(const std::vector<Complex>& u, const std::vector<Complex>& v) {
    CMat m(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for (size_t r = 0; r < u.size(); ++r)
        for (size_t c = 0; c < v.size(); ++c)
            m(static_cast<int>(r), static_cast<int>(c)) = u[r] * std::conj(v[c]);
    return m;
}

CMat& CMat::operator+=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "matrix addition shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "matrix subtraction shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

CMat& CMat::operator*=(Complex s) {
    for (auto& x : a_) x *= s;
    return *this;
}

CMat CMat::adjoint() const {
    CMat m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            m(c, r) = std::conj((*this)(r, c));
    return m;
}

CMat CMat::transpose() const {
    CMat m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            m(c, r) = (*this)(r, c);
    return m;
}

Complex CMat::trace() const {
    if (rows_ != cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "trace of non-square matrix");
    Complex t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

CMat CMat::hermitian_part() const {
    if (rows_ != cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "hermitian_part of non-square matrix");
    CMat m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            m(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
    return m;
}

double CMat::max_abs() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, std::abs(x));
    return m;
}

double CMat::frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : a_) s += std::norm(x);
    return std::sqrt(s);
}

double CMat::hermiticity_defect() const {
    if (rows_ != cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "hermiticity_defect of non-square matrix");
    double m = 0.0;
    for (int r = 0; r < rows_; ++r)
        for (int c = r; c < cols_; ++c)
            m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return m;
}

bool CMat::is_finite() const {
    for (const auto& x : a_)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

std::vector<Complex> CMat::apply(const std::vector<Complex>& v) const {
    if (static_cast<int>(v.size()) != cols_)
        throw ValidationError(ValidationKind::DimensionMismatch, "matrix-vector shape mismatch");
    std::vector<Complex> out(rows_, Complex(0.0, 0.0));
    for (int r = 0; r < rows_; ++r) {
        Complex s = 0.0;
        for (int c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows())
        throw ValidationError(ValidationKind::DimensionMismatch, "matrix product shape mismatch");
    CMat out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

CMat operator*(Complex s, CMat a) { return a *= s; }

double max_abs_diff(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError(ValidationKind::DimensionMismatch, "matrix comparison shape mismatch");
    double m = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    const long rows = static_cast<long>(a.rows()) * b.rows();
    const long cols = static_cast<long>(a.cols()) * b.cols();
    if (rows > kMaxTotalDim || cols > kMaxTotalDim)
        throw CapacityError("kron result side " + std::to_string(std::max(rows, cols)) +
                            " exceeds maximum " + std::to_string(kMaxTotalDim));
    CMat out(static_cast<int>(rows), static_cast<int>(cols));
    for (int r1 = 0; r1 < a.rows(); ++r1)
        for (int c1 = 0; c1 < a.cols(); ++c1) {
            const Complex f = a(r1, c1);
            if (f == Complex(0.0, 0.0)) continue;
            for (int r2 = 0; r2 < b.rows(); ++r2)
                for (int c2 = 0; c2 < b.cols(); ++c2)
                    out(r1 * b.rows() + r2, c1 * b.cols() + c2) = f * b(r2, c2);
        }
    return out;
}

HermitianOperator HermitianOperator::create(int d1, int d2, CMat m, double herm_tol) {
    if (d1 < 1 || d2 < 1)
        throw ValidationError(ValidationKind::BadArgument, "subsystem dimensions must be positive");
    if (static_cast<long>(d1) * d2 > kMaxTotalDim)
        throw CapacityError("total dimension " + std::to_string(static_cast<long>(d1) * d2) +
                            " exceeds maximum " + std::to_string(kMaxTotalDim));
    const int dim = d1 * d2;
    if (m.rows() != dim || m.cols() != dim)
        throw ValidationError(ValidationKind::DimensionMismatch,
                              "matrix side " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                  " does not match d1*d2 = " + std::to_string(dim));
    if (!m.is_finite())
        throw ValidationError(ValidationKind::NonFinite, "matrix contains NaN or Inf");
    const double defect = m.hermiticity_defect();
    if (defect > herm_tol)
        throw ValidationError(ValidationKind::NotHermitian,
                              "hermiticity defect " + std::to_string(defect) + " exceeds tolerance");
    return HermitianOperator(d1, d2, std::move(m), herm_tol);
}

CMat partial_transpose(const CMat& m, int d1, int d2) {
    const int dim = d1 * d2;
    if (m.rows() != dim || m.cols() != dim)
        throw ValidationError(ValidationKind::DimensionMismatch, "partial transpose shape mismatch");
    CMat out(dim, dim);
    for (int a1 = 0; a1 < d1; ++a1)
        for (int a2 = 0; a2 < d2; ++a2)
            for (int b1 = 0; b1 < d1; ++b1)
                for (int b2 = 0; b2 < d2; ++b2)
                    out(a1 * d2 + a2, b1 * d2 + b2) = m(a1 * d2 + b2, b1 * d2 + a2);
    return out;
}

HermitianOperator partial_transpose(const HermitianOperator& a) {
    return HermitianOperator::create(a.d1(), a.d2(), partial_transpose(a.mat(), a.d1(), a.d2()),
                                     a.herm_tol());
}

namespace {

double off_diagonal_norm(const CMat& m) {
    double s = 0.0;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (r != c) s += std::norm(m(r, c));
    return std::sqrt(s);
}

}  // namespace

Spectrum eig_hermitian(const CMat& m) {
    if (m.rows() != m.cols())
        throw ValidationError(ValidationKind::DimensionMismatch, "eigendecomposition of non-square matrix");
    if (!m.is_finite())
        throw ValidationError(ValidationKind::NonFinite, "eigendecomposition input contains NaN or Inf");
    const int n = m.rows();
    if (n > kMaxTotalDim)
        throw CapacityError("matrix side " + std::to_string(n) + " exceeds maximum " +
                            std::to_string(kMaxTotalDim));

    // Work on the Hermitian average so a defect within tolerance cannot leave
    // complex residue on the diagonal.
    CMat a = m.hermitian_part();
    CMat v = CMat::identity(n);

    const double scale = std::max(1.0, a.frobenius_norm());
    const double threshold = 1e-13 * n * scale;
    const double skip = 0.01 * threshold / std::max(1, n);
    constexpr int kMaxSweeps = 100;

    double off = off_diagonal_norm(a);
    int sweep = 0;
    while (off > threshold) {
        if (sweep++ >= kMaxSweeps)
            throw NumericalError("Jacobi eigensolver did not converge in 100 sweeps", off);
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= skip) continue;

                // Absorb the phase of a(p,q), then apply the real rotation
                // that zeroes the symmetrized 2x2 pivot.
                const Complex w = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const Complex up = Complex(c, 0.0);
                const Complex uq = std::conj(w) * c;
                const Complex sp = Complex(s, 0.0);
                const Complex sq = std::conj(w) * s;

                for (int r = 0; r < n; ++r) {
                    const Complex arp = a(r, p);
                    const Complex arq = a(r, q);
                    a(r, p) = up * arp - sq * arq;
                    a(r, q) = sp * arp + uq * arq;
                }
                for (int col = 0; col < n; ++col) {
                    const Complex apc = a(p, col);
                    const Complex aqc = a(q, col);
                    a(p, col) = up * apc - std::conj(sq) * aqc;
                    a(q, col) = sp * apc + std::conj(uq) * aqc;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex(a(p, p).real(), 0.0);
                a(q, q) = Complex(a(q, q).real(), 0.0);

                for (int r = 0; r < n; ++r) {
                    const Complex vrp = v(r, p);
                    const Complex vrq = v(r, q);
                    v(r, p) = up * vrp - sq * vrq;
                    v(r, q) = sp * vrp + uq * vrq;
                }
            }
        }
        off = off_diagonal_norm(a);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n, n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (int r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

Spectrum eig_hermitian(const HermitianOperator& a) { return eig_hermitian(a.mat()); }

double min_eigenvalue(const HermitianOperator& a) {
    return eig_hermitian(a.mat()).eigenvalues.front();
}

bool is_psd(const HermitianOperator& a, double tol) { return min_eigenvalue(a) >= -tol; }

double trace_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.d1() != b.d1() || a.d2() != b.d2())
        throw ValidationError(ValidationKind::DimensionMismatch, "trace_inner dimension mismatch");
    const int n = a.dim();
    Complex t = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            t += a.mat()(r, c) * b.mat()(c, r);
    if (std::abs(t.imag()) > 1e-10)
        throw NumericalError("trace_inner imaginary residue exceeds 1e-10", std::abs(t.imag()));
    return t.real();
}

double trace_norm(const HermitianOperator& a) {
    double s = 0.0;
    for (double ev : eig_hermitian(a.mat()).eigenvalues) s += std::abs(ev);
    return s;
}

bool cholesky(const CMat& m, CMat& l) {
    const int n = m.rows();
    l = CMat(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            Complex s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            if (i == j) {
                const double diag = s.real();
                if (!(diag > 0.0) || !std::isfinite(diag)) return false;
                l(i, i) = std::sqrt(diag);
            } else {
                l(i, j) = s / l(j, j).real();
            }
        }
    }
    return true;
}

double chol_log_det(const CMat& l) {
    double s = 0.0;
    for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
    return 2.0 * s;
}

CMat chol_inverse(const CMat& l) {
    const int n = l.rows();
    // T = L^{-1} by forward substitution, then inv = T^dagger * T.
    CMat t(n, n);
    for (int j = 0; j < n; ++j) {
        t(j, j) = 1.0 / l(j, j).real();
        for (int i = j + 1; i < n; ++i) {
            Complex s = 0.0;
            for (int k = j; k < i; ++k) s += l(i, k) * t(k, j);
            t(i, j) = -s / l(i, i).real();
        }
    }
    CMat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Complex s = 0.0;
            for (int k = j; k < n; ++k) s += std::conj(t(k, i)) * t(k, j);
            out(i, j) = s;
            out(j, i) = std::conj(s);
        }
    return out;
}

}  // namespace qsd
