#include "qsd/detail/real_linalg.hpp"

#include <cmath>

namespace qsd::detail {

RMat RMat::identity(int n) {
    RMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RMat matmul(const RMat& x, const RMat& y) {
    RMat out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        double* orow = &out.a[static_cast<size_t>(i) * out.cols];
        const double* xrow = &x.a[static_cast<size_t>(i) * x.cols];
        for (int k = 0; k < x.cols; ++k) {
            const double xik = xrow[k];
            if (xik == 0.0) continue;
            const double* yrow = &y.a[static_cast<size_t>(k) * y.cols];
            for (int j = 0; j < y.cols; ++j) orow[j] += xik * yrow[j];
        }
    }
    return out;
}

bool cholesky_inplace(RMat& m) {
    const int n = m.rows;
    for (int i = 0; i < n; ++i) {
        double* ri = &m.a[static_cast<size_t>(i) * n];
        for (int j = 0; j <= i; ++j) {
            const double* rj = &m.a[static_cast<size_t>(j) * n];
            double s = ri[j];
            for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                ri[i] = std::sqrt(s);
            } else {
                ri[j] = s / rj[j];
            }
        }
    }
    return true;
}

void chol_solve(const RMat& l, std::span<double> x) {
    const int n = l.rows;
    for (int i = 0; i < n; ++i) {
        const double* ri = &l.a[static_cast<size_t>(i) * n];
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= ri[k] * x[k];
        x[i] = s / ri[i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
}

RMat chol_inverse_spd(const RMat& l) {
    const int n = l.rows;
    RMat t(n, n);
    for (int j = 0; j < n; ++j) {
        t(j, j) = 1.0 / l(j, j);
        for (int i = j + 1; i < n; ++i) {
            double s = 0.0;
            const double* ri = &l.a[static_cast<size_t>(i) * n];
            for (int k = j; k < i; ++k) s += ri[k] * t(k, j);
            t(i, j) = -s / ri[i];
        }
    }
    RMat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = j; k < n; ++k) s += t(k, i) * t(k, j);
            out(i, j) = s;
            out(j, i) = s;
        }
    return out;
}

std::vector<double> solve_spd(RMat h, std::span<const double> g) {
    const int n = h.rows;
    std::vector<double> scale(n);
    for (int i = 0; i < n; ++i) {
        const double d = h(i, i);
        scale[i] = (d > 0.0 && std::isfinite(d)) ? 1.0 / std::sqrt(d) : 1.0;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) *= scale[i] * scale[j];

    RMat l = h;
    double shift = 0.0;
    if (!cholesky_inplace(l)) {
        shift = 1e-14;
        while (shift <= 1e-2) {
            l = h;
            for (int i = 0; i < n; ++i) l(i, i) += shift;
            if (cholesky_inplace(l)) break;
            shift *= 100.0;
        }
        if (shift > 1e-2)
            throw NumericalError("Newton system factorization failed", shift);
    }

    std::vector<double> x(g.begin(), g.end());
    for (int i = 0; i < n; ++i) x[i] *= scale[i];
    chol_solve(l, x);
    for (int i = 0; i < n; ++i) x[i] *= scale[i];
    return x;
}

int coord_count(int dim) { return dim * dim; }

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

}  // namespace

std::vector<double> herm_to_coords(const CMat& h) {
    const int n = h.rows();
    std::vector<double> v(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) v[i] = h(i, i).real();
    size_t c = n;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            // sqrt(2) * Re and sqrt(2) * Im of the upper entry.
            v[c++] = (h(p, q).real() + h(q, p).real()) * kSqrtHalf;
            v[c++] = (h(p, q).imag() - h(q, p).imag()) * kSqrtHalf;
        }
    return v;
}

CMat coords_to_herm(int dim, std::span<const double> v) {
    CMat h(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = v[i];
    size_t c = dim;
    for (int p = 0; p < dim; ++p)
        for (int q = p + 1; q < dim; ++q) {
            const double re = v[c++] * kSqrtHalf;
            const double im = v[c++] * kSqrtHalf;
            h(p, q) = Complex(re, im);
            h(q, p) = Complex(re, -im);
        }
    return h;
}

RMat sandwich_matrix(const CMat& x) {
    const int n = x.rows();
    const int nc = coord_count(n);
    RMat s(nc, nc);

    std::vector<Complex> colp(n), colq(n);
    CMat w(n, n);
    auto emit = [&](int c) {
        const std::vector<double> wc = herm_to_coords(w);
        for (int r = 0; r < nc; ++r) s(r, c) = wc[r];
    };

    // Column for basis element B: W = X * B * X built from columns of X.
    for (int u = 0; u < n; ++u) {
        for (int r = 0; r < n; ++r) colp[r] = x(r, u);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) w(r, c) = colp[r] * std::conj(colp[c]);
        emit(u);
    }
    int coord = n;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            for (int r = 0; r < n; ++r) {
                colp[r] = x(r, p);
                colq[r] = x(r, q);
            }
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const Complex pq = colp[r] * std::conj(colq[c]);
                    const Complex qp = colq[r] * std::conj(colp[c]);
                    w(r, c) = (pq + qp) * kSqrtHalf;
                }
            emit(coord++);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    const Complex pq = colp[r] * std::conj(colq[c]);
                    const Complex qp = colq[r] * std::conj(colp[c]);
                    w(r, c) = Complex(0.0, 1.0) * (pq - qp) * kSqrtHalf;
                }
            emit(coord++);
        }
    return s;
}

PtCoordMap pt_coord_map(int d1, int d2) {
    const int dim = d1 * d2;
    const int nc = coord_count(dim);

    // Pair (p, q), p < q, to coordinate index of its re component.
    std::vector<int> pair_base(static_cast<size_t>(dim) * dim, -1);
    int coord = dim;
    for (int p = 0; p < dim; ++p)
        for (int q = p + 1; q < dim; ++q) {
            pair_base[static_cast<size_t>(p) * dim + q] = coord;
            coord += 2;
        }

    // PT sends the matrix unit e_u e_v^+ to e_u' e_v'^+ with
    // u' = (u1, v2), v' = (v1, u2).
    auto pt_pos = [&](int u, int v, int& up, int& vp) {
        const int u1 = u / d2, u2 = u % d2;
        const int v1 = v / d2, v2 = v % d2;
        up = u1 * d2 + v2;
        vp = v1 * d2 + u2;
    };

    PtCoordMap map;
    map.perm.resize(nc);
    map.sign.assign(nc, 1.0);
    for (int u = 0; u < dim; ++u) {
        int up, vp;
        pt_pos(u, u, up, vp);
        map.perm[u] = up;  // up == vp == u here
    }
    for (int p = 0; p < dim; ++p)
        for (int q = p + 1; q < dim; ++q) {
            const int base = pair_base[static_cast<size_t>(p) * dim + q];
            int pp, qq;
            pt_pos(p, q, pp, qq);
            if (pp < qq) {
                const int tbase = pair_base[static_cast<size_t>(pp) * dim + qq];
                map.perm[base] = tbase;
                map.perm[base + 1] = tbase + 1;
            } else {
                const int tbase = pair_base[static_cast<size_t>(qq) * dim + pp];
                map.perm[base] = tbase;
                map.perm[base + 1] = tbase + 1;
                map.sign[base + 1] = -1.0;
            }
        }
    return map;
}

RMat pt_conjugated_sandwich(const RMat& s, const PtCoordMap& map) {
    const int n = s.rows;
    RMat out(n, n);
    for (int i = 0; i < n; ++i) {
        const int pi = map.perm[i];
        const double si = map.sign[i];
        for (int j = 0; j < n; ++j)
            out(i, j) = si * map.sign[j] * s(pi, map.perm[j]);
    }
    return out;
}

}  // namespace qsd::detail
