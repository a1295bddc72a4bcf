#include "qsd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "qsd/detail/real_linalg.hpp"

namespace qsd {

using detail::PtCoordMap;
using detail::RMat;

const char* to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::PG: return "pg";
        case ProblemKind::QG: return "qg";
        case ProblemKind::PPT: return "ppt";
    }
    return "pg";
}

void SolverConfig::validate() const {
    const bool ok = std::isfinite(target_gap) && target_gap > 0.0 && max_outer_iters >= 1;
    if (!ok)
        throw ValidationError(ValidationKind::BadArgument, "solver configuration out of range");
}

namespace {

constexpr double kMinStep = 1e-12;
constexpr int kMaxPolish = 8;
constexpr int kMaxRecenter = 24;

double re_trace_prod(const CMat& a, const CMat& b) {
    double s = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            s += a(r, c).real() * b(c, r).real() - a(r, c).imag() * b(c, r).imag();
    return s;
}

struct Costs {
    int d1 = 0;
    int d2 = 0;
    int dim = 0;
    int n = 0;
    std::vector<double> etas;
    std::vector<CMat> g;  // eta_i * C_i
};

Costs weighted_costs(const HermitianEnsemble& e) {
    Costs c;
    c.d1 = e.d1();
    c.d2 = e.d2();
    c.dim = e.dim();
    c.n = e.size();
    for (int i = 0; i < e.size(); ++i) {
        c.etas.push_back(e.prior(i));
        CMat m = e.op(i).mat();
        m *= e.prior(i);
        c.g.push_back(std::move(m));
    }
    return c;
}

double max_eig(const CMat& m) { return eig_hermitian(m).eigenvalues.back(); }

SolveResult single_outcome_result(const Costs& pr, ProblemKind kind) {
    SolveResult r;
    r.value = pr.g[0].trace().real();
    r.povm = Povm::create(pr.d1, pr.d2, {CMat::identity(pr.dim)});
    r.dual_K = HermitianOperator::create(pr.d1, pr.d2, pr.g[0]);
    r.certified_gap = 0.0;
    r.problem_kind = kind;
    r.iterations = 0;
    if (kind == ProblemKind::PPT)
        r.ppt_dual_slacks.push_back(HermitianOperator::create(pr.d1, pr.d2, CMat(pr.dim, pr.dim)));
    return r;
}

[[noreturn]] void fail(const std::string& what, double mu, const std::vector<TracePoint>& log) {
    throw SolverError(what + " at mu = " + std::to_string(mu), log);
}

// ---- Nesterov-Todd scaling and extended-precision step algebra -------------

// The per-outcome elimination behind the step equation has a condition
// number growing like the inverse square of the barrier parameter, which
// exhausts double precision just above the requested gaps. That stage runs
// in extended precision; everything entering and leaving it is double.
struct LMat {
    int rows = 0;
    int cols = 0;
    std::vector<long double> a;
    LMat() = default;
    LMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0L) {}
    long double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    long double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

using LVec = std::vector<long double>;

LMat to_lmat(const RMat& m) {
    LMat out(m.rows, m.cols);
    for (size_t q = 0; q < m.a.size(); ++q) out.a[q] = m.a[q];
    return out;
}

LVec to_lvec(const std::vector<double>& v) { return LVec(v.begin(), v.end()); }

std::vector<double> to_dvec(const LVec& v) {
    std::vector<double> out(v.size());
    for (size_t q = 0; q < v.size(); ++q) out[q] = static_cast<double>(v[q]);
    return out;
}

LMat lmat_mul(const LMat& a, const LMat& b) {
    LMat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const long double s = a(i, k);
            if (s == 0.0L) continue;
            for (int j = 0; j < b.cols; ++j) out(i, j) += s * b(k, j);
        }
    return out;
}

LMat to_real_rep(const CMat& x) {
    const int d = x.rows();
    LMat r(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const long double re = x(i, j).real();
            const long double im = x(i, j).imag();
            r(i, j) = re;
            r(d + i, d + j) = re;
            r(i, d + j) = -im;
            r(d + i, j) = im;
        }
    return r;
}

CMat from_real_rep(const LMat& r) {
    const int d = r.rows / 2;
    CMat x(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const long double re = 0.5L * (r(i, j) + r(d + i, d + j));
            const long double im = 0.5L * (r(d + i, j) - r(i, d + j));
            x(i, j) = Complex(static_cast<double>(re), static_cast<double>(im));
        }
    return x;
}

// Newton-Schulz passes in extended precision push an inverse computed in
// double down to extended-precision accuracy; near convergence the barrier
// blocks are too ill conditioned for double to deliver usable step targets.
LMat refine_inverse_rep(const CMat& x, const CMat& z0) {
    const int n = 2 * x.rows();
    LMat xr = to_real_rep(x);
    LMat z = to_real_rep(z0);
    long double prev = std::numeric_limits<long double>::max();
    for (int pass = 0; pass < 12; ++pass) {
        LMat e = lmat_mul(xr, z);
        long double res = 0.0L;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                e(i, j) = -e(i, j);
                if (i == j) e(i, j) += 2.0L;
                res = std::max(res, std::abs(e(i, j) - (i == j ? 1.0L : 0.0L)));
            }
        if (res >= prev || res <= 1e-17L) {
            if (res < prev) z = lmat_mul(z, e);
            break;
        }
        prev = res;
        z = lmat_mul(z, e);
    }
    return z;
}

CMat refine_inverse(const CMat& x, const CMat& z0) {
    return from_real_rep(refine_inverse_rep(x, z0)).hermitian_part();
}

struct LSpectrum {
    LVec evals;
    LMat vecs;
};

// Cyclic Jacobi on a symmetric matrix in extended precision.
LSpectrum ljacobi(LMat s) {
    const int n = s.rows;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const long double avg = 0.5L * (s(i, j) + s(j, i));
            s(i, j) = avg;
            s(j, i) = avg;
        }
    LMat v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0L;
    long double scale = 0.0L;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(s(i, j)));
    if (scale == 0.0L) scale = 1.0L;

    for (int sweep = 0;; ++sweep) {
        long double off = 0.0L;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (std::sqrt(2.0L * off) <= 1e-17L * n * scale) break;
        if (sweep >= 100) throw NumericalError("scaling eigensolver stalled", static_cast<double>(off));
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const long double apq = s(p, q);
                if (std::abs(apq) <= 1e-22L * scale) continue;
                const long double tau = (s(q, q) - s(p, p)) / (2.0L * apq);
                long double t = 1.0L / (std::abs(tau) + std::sqrt(1.0L + tau * tau));
                if (tau < 0.0L) t = -t;
                const long double c = 1.0L / std::sqrt(1.0L + t * t);
                const long double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    if (k != p && k != q) {
                        const long double skp = s(k, p);
                        const long double skq = s(k, q);
                        s(k, p) = c * skp - sn * skq;
                        s(p, k) = s(k, p);
                        s(k, q) = sn * skp + c * skq;
                        s(q, k) = s(k, q);
                    }
                    const long double vkp = v(k, p);
                    const long double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
                s(p, p) -= t * apq;
                s(q, q) += t * apq;
                s(p, q) = 0.0L;
                s(q, p) = 0.0L;
            }
    }

    std::vector<int> ord(n);
    for (int i = 0; i < n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return s(a, a) < s(b, b); });
    LSpectrum out;
    out.evals.resize(n);
    out.vecs = LMat(n, n);
    for (int j = 0; j < n; ++j) {
        out.evals[j] = s(ord[j], ord[j]);
        for (int i = 0; i < n; ++i) out.vecs(i, j) = v(i, ord[j]);
    }
    return out;
}

template <typename F>
LMat lspectral(const LSpectrum& es, F f) {
    const int n = static_cast<int>(es.evals.size());
    LMat out(n, n);
    for (int a = 0; a < n; ++a) {
        const long double fa = f(es.evals[a]);
        for (int r = 0; r < n; ++r) {
            const long double vra = es.vecs(r, a) * fa;
            if (vra == 0.0L) continue;
            for (int c = 0; c < n; ++c) out(r, c) += vra * es.vecs(c, a);
        }
    }
    return out;
}

struct NtPair {
    LMat wr;
    LMat winvr;
};

// Scaling point of the pair (z, u): the unique w > 0 with w z w = u, kept in
// the real representation. The scaling mixes eigenvalue scales spanning the
// square of the barrier condition number; computed in double its
// small-eigenvalue content is resolution noise, so the whole chain runs in
// extended precision.
NtPair nt_scaling(const CMat& z, const CMat& u) {
    const LSpectrum zs = ljacobi(to_real_rep(z));
    if (zs.evals.front() <= 0.0L)
        throw NumericalError("scaling pair lost positivity",
                             static_cast<double>(zs.evals.front()));
    const LMat zr = lspectral(zs, [](long double x) { return std::sqrt(x); });
    const LMat zri = lspectral(zs, [](long double x) { return 1.0L / std::sqrt(x); });
    const LSpectrum ts = ljacobi(lmat_mul(zr, lmat_mul(to_real_rep(u), zr)));
    if (ts.evals.front() <= 0.0L)
        throw NumericalError("scaling pair lost positivity",
                             static_cast<double>(ts.evals.front()));
    const LMat tr = lspectral(ts, [](long double x) { return std::sqrt(x); });
    const LMat tri = lspectral(ts, [](long double x) { return 1.0L / std::sqrt(x); });
    NtPair p;
    p.wr = lmat_mul(zri, lmat_mul(tr, zri));
    p.winvr = lmat_mul(zr, lmat_mul(tri, zr));
    return p;
}

// Coordinates of the Hermitian matrix held in a real representation:
// diagonal first, then sqrt(2) times the real and imaginary parts of each
// upper entry, matching herm_to_coords.
LVec lherm_coords(const LMat& xr) {
    const int d = xr.rows / 2;
    const long double rt = std::sqrt(0.5L);
    LVec v(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i) v[i] = 0.5L * (xr(i, i) + xr(d + i, d + i));
    size_t c = d;
    for (int p = 0; p < d; ++p)
        for (int q = p + 1; q < d; ++q) {
            const long double re_pq = 0.5L * (xr(p, q) + xr(d + p, d + q));
            const long double re_qp = 0.5L * (xr(q, p) + xr(d + q, d + p));
            const long double im_pq = 0.5L * (xr(d + p, q) - xr(p, d + q));
            const long double im_qp = 0.5L * (xr(d + q, p) - xr(q, d + p));
            v[c++] = (re_pq + re_qp) * rt;
            v[c++] = (im_pq - im_qp) * rt;
        }
    return v;
}

// Matrix of m -> x m x on Hermitian coordinates, assembled in extended
// precision from the real representation of x; the entrywise double rounding
// of that matrix is what erases the small-eigenvalue block near convergence.
LMat lsandwich(const LMat& xr) {
    using LComplex = std::complex<long double>;
    const int d = xr.rows / 2;
    const int nc = d * d;
    const long double rt = std::sqrt(0.5L);
    LMat s(nc, nc);
    std::vector<LComplex> colp(d), colq(d), w(static_cast<size_t>(d) * d);
    const auto col = [&](int u, std::vector<LComplex>& out) {
        for (int r = 0; r < d; ++r) out[r] = LComplex(xr(r, u), xr(d + r, u));
    };
    const auto emit = [&](int c) {
        for (int i = 0; i < d; ++i) s(i, c) = w[static_cast<size_t>(i) * d + i].real();
        int k = d;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                const LComplex upq = w[static_cast<size_t>(p) * d + q];
                const LComplex uqp = w[static_cast<size_t>(q) * d + p];
                s(k++, c) = (upq.real() + uqp.real()) * rt;
                s(k++, c) = (upq.imag() - uqp.imag()) * rt;
            }
    };
    for (int u = 0; u < d; ++u) {
        col(u, colp);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                w[static_cast<size_t>(r) * d + c] = colp[r] * std::conj(colp[c]);
        emit(u);
    }
    int coord = d;
    for (int p = 0; p < d; ++p)
        for (int q = p + 1; q < d; ++q) {
            col(p, colp);
            col(q, colq);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    const LComplex pq = colp[r] * std::conj(colq[c]);
                    const LComplex qp = colq[r] * std::conj(colp[c]);
                    w[static_cast<size_t>(r) * d + c] = (pq + qp) * rt;
                }
            emit(coord++);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    const LComplex pq = colp[r] * std::conj(colq[c]);
                    const LComplex qp = colq[r] * std::conj(colp[c]);
                    w[static_cast<size_t>(r) * d + c] = LComplex(0.0L, 1.0L) * (pq - qp) * rt;
                }
            emit(coord++);
        }
    return s;
}

LVec lmat_vec(const LMat& m, const LVec& v) {
    LVec out(m.rows, 0.0L);
    for (int i = 0; i < m.rows; ++i) {
        const long double* row = &m.a[static_cast<size_t>(i) * m.cols];
        long double s = 0.0L;
        for (int j = 0; j < m.cols; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

void lvec_axpy(LVec& y, long double alpha, const LVec& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

LVec lpt_apply(const PtCoordMap& map, const LVec& v) {
    LVec out(v.size());
    for (size_t c = 0; c < v.size(); ++c) out[map.perm[c]] = map.sign[c] * v[c];
    return out;
}

bool lchol_inplace(LMat& m) {
    for (int j = 0; j < m.rows; ++j) {
        long double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (!(d > 0.0L)) return false;
        d = std::sqrt(d);
        m(j, j) = d;
        for (int i = j + 1; i < m.rows; ++i) {
            long double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
            m(i, j) = s / d;
        }
    }
    return true;
}

void lchol_solve(const LMat& l, LVec& x) {
    const int n = l.rows;
    for (int i = 0; i < n; ++i) {
        long double s = x[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        long double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
}

// Cholesky after symmetric Jacobi scaling, with escalating relative jitter.
struct LChol {
    LVec s;
    LMat l;

    bool factor(const LMat& f) {
        const int n = f.rows;
        s.assign(n, 0.0L);
        for (int q = 0; q < n; ++q) {
            if (!(f(q, q) > 0.0L)) return false;
            s[q] = 1.0L / std::sqrt(f(q, q));
        }
        LMat base(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) base(r, c) = f(r, c) * s[r] * s[c];
        for (long double rel = 1e-18L; rel <= 1e-6L; rel *= 1000.0L) {
            l = base;
            for (int q = 0; q < n; ++q) l(q, q) += rel;
            if (lchol_inplace(l)) return true;
        }
        return false;
    }

    LVec solve(LVec b) const {
        for (size_t q = 0; q < b.size(); ++q) b[q] *= s[q];
        lchol_solve(l, b);
        for (size_t q = 0; q < b.size(); ++q) b[q] *= s[q];
        return b;
    }

    // Residual correction against the unfactored matrix; recovers digits
    // lost to ill conditioning near convergence.
    LVec solve_refined(const LMat& a, const LVec& b) const {
        LVec x = solve(b);
        for (int pass = 0; pass < 2; ++pass) {
            LVec r = b;
            lvec_axpy(r, -1.0L, lmat_vec(a, x));
            lvec_axpy(x, 1.0L, solve(std::move(r)));
        }
        return x;
    }

    void add_inverse_into(LMat& acc) const {
        const int n = l.rows;
        LVec col(n);
        for (int c = 0; c < n; ++c) {
            std::fill(col.begin(), col.end(), 0.0L);
            col[c] = 1.0L;
            const LVec x = solve(col);
            for (int r = 0; r < n; ++r) acc(r, c) += x[r];
        }
    }
};

// ---- PG / QG: feasible primal-dual path following --------------------------
//
// Primal: maximize sum_i Tr(G_i M_i) over POVMs; the last element is
// eliminated as identity minus the rest, so completeness holds exactly.
// Dual: minimize Tr K with every K - G_i PSD. Iterates keep both cone
// families strictly feasible, making Tr K - sum_i Tr(G_i M_i) an exact
// duality gap throughout. Steps follow the Nesterov-Todd direction; the
// element steps substitute out of the step equations, leaving one SPD
// system in the K step whose matrix is the plain sum of the scaling
// sandwiches, assembled without any inversion.

struct GuessState {
    const Costs& pr;
    int nc;
    int nfree;
    std::vector<CMat> m;  // free elements 0 .. n-2; the last is implied
    CMat k;

    explicit GuessState(const Costs& p) : pr(p), nc(detail::coord_count(p.dim)), nfree(p.n - 1) {
        CMat start = CMat::identity(pr.dim);
        start *= 1.0 / pr.n;
        m.assign(nfree, start);
        double c0 = 2.0;
        for (const CMat& g : pr.g) c0 = std::max(c0, 2.0 + max_eig(g));
        k = CMat::identity(pr.dim);
        k *= c0;
    }

    CMat last_element(const std::vector<CMat>& free_elems) const {
        CMat last = CMat::identity(pr.dim);
        for (const CMat& x : free_elems) last -= x;
        return last;
    }

    std::vector<CMat> all_elements() const {
        std::vector<CMat> out = m;
        out.push_back(last_element(m));
        return out;
    }

    double objective_value(const std::vector<CMat>& elems) const {
        double p = 0.0;
        for (int i = 0; i < pr.n; ++i) p += re_trace_prod(pr.g[i], elems[i]);
        return p;
    }

    bool feasible(const std::vector<CMat>& elems, const CMat& kv) const {
        CMat l;
        for (int i = 0; i < pr.n; ++i) {
            if (!cholesky(elems[i], l)) return false;
            if (!cholesky(kv - pr.g[i], l)) return false;
        }
        return true;
    }
};

// Analytically centered POVM for a dual feasible K: normalize the inverse
// slacks so they sum to the identity exactly. Pairwise products of the
// result inherit the slack alignment of K itself, which makes the returned
// measurement certify far more sharply than a raw interior iterate.
std::vector<CMat> centered_povm(const std::vector<CMat>& slacks) {
    const int dim = slacks.front().rows();
    std::vector<CMat> mhat;
    mhat.reserve(slacks.size());
    CMat esum(dim, dim);
    CMat l;
    for (const CMat& x : slacks) {
        if (!cholesky(x, l))
            throw NumericalError("dual slack lost positivity during recovery", 0.0);
        CMat m = refine_inverse(x, chol_inverse(l));
        esum += m;
        mhat.push_back(std::move(m));
    }
    const Spectrum es = eig_hermitian(esum);
    if (es.eigenvalues.front() <= 0.0)
        throw NumericalError("POVM normalizer is singular", es.eigenvalues.front());
    CMat root(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const double w = 1.0 / std::sqrt(es.eigenvalues[a]);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                root(r, c) += w * es.eigenvectors(r, a) * std::conj(es.eigenvectors(c, a));
    }
    for (CMat& m : mhat) m = (root * m * root).hermitian_part();
    return mhat;
}

SolveResult solve_guessing_kernel(const HermitianEnsemble& e, const SolverConfig& cfg,
                                  ProblemKind kind) {
    cfg.validate();
    const Costs pr = weighted_costs(e);
    if (pr.n == 1) return single_outcome_result(pr, kind);

    GuessState st(pr);
    const int nc = st.nc;
    const int nfree = st.nfree;
    const double order = pr.n * pr.dim;
    std::vector<TracePoint> log;
    int iterations = 0;
    int polish_rounds = 0;

    // Frobenius distance of the worst pair product from exact centrality.
    const auto centrality = [&](const std::vector<CMat>& el, const CMat& kv, double mub) {
        double worst = 0.0;
        for (int i = 0; i < pr.n; ++i) {
            CMat prod = (kv - pr.g[i]) * el[i];
            for (int q = 0; q < pr.dim; ++q) prod(q, q) -= mub;
            worst = std::max(worst, prod.frobenius_norm() / mub);
        }
        return worst;
    };

    for (int outer = 0;; ++outer) {
        const std::vector<CMat> elems = st.all_elements();
        const double p = st.objective_value(elems);
        const double dual = st.k.trace().real();
        const double gap = dual - p;
        const double mu = gap / order;
        log.push_back({mu, p, dual});
        if (gap <= cfg.target_gap) {
            // The measurement is recovered from K alone, so its sharpness is
            // set by how exactly K is centered; polish with fixed-mu rounds
            // below until the pair products align.
            std::vector<CMat> slacks;
            slacks.reserve(pr.n);
            for (const CMat& g : pr.g) slacks.push_back(st.k - g);
            const std::vector<CMat> mhat = centered_povm(slacks);
            double ph = 0.0;
            for (int i = 0; i < pr.n; ++i) ph += re_trace_prod(pr.g[i], mhat[i]);
            const double rgap = dual - ph;
            const double psi = centrality(elems, st.k, mu);
            const bool sharp = rgap <= cfg.target_gap && psi <= 0.1;
            if (sharp || polish_rounds >= kMaxPolish) {
                SolveResult r;
                if (rgap <= gap) {
                    r.value = ph;
                    r.povm = Povm::create(pr.d1, pr.d2, mhat);
                    r.certified_gap = rgap;
                } else {
                    r.value = p;
                    std::vector<CMat> sym;
                    sym.reserve(pr.n);
                    for (const CMat& x : elems) sym.push_back(x.hermitian_part());
                    r.povm = Povm::create(pr.d1, pr.d2, sym);
                    r.certified_gap = gap;
                }
                r.dual_K = HermitianOperator::create(pr.d1, pr.d2, st.k);
                r.problem_kind = kind;
                r.iterations = iterations;
                r.trace_log = std::move(log);
                return r;
            }
        }
        if (outer >= cfg.max_outer_iters) fail("iteration limit", mu, log);

        std::vector<LMat> sw(pr.n);
        std::vector<LMat> xinvr(pr.n);
        LChol kfac;
        {
            LMat ksys(nc, nc);
            CMat l;
            for (int i = 0; i < pr.n; ++i) {
                const CMat x = st.k - pr.g[i];
                if (!cholesky(x, l)) fail("dual slack left the feasible cone", mu, log);
                xinvr[i] = refine_inverse_rep(x, chol_inverse(l));
                const NtPair w = nt_scaling(x, elems[i]);
                sw[i] = lsandwich(w.wr);
                for (int r = 0; r < nc; ++r)
                    for (int c = 0; c < nc; ++c) ksys(r, c) += sw[i](r, c);
            }
            if (!kfac.factor(ksys)) fail("step system not definite", mu, log);
        }

        struct Directions {
            CMat dk;
            std::vector<CMat> dm;
        };
        const auto residual_coords = [&](double target, int i) {
            LMat r = xinvr[i];
            const LMat er = to_real_rep(elems[i]);
            for (size_t q = 0; q < r.a.size(); ++q) r.a[q] = target * r.a[q] - er.a[q];
            return lherm_coords(r);
        };
        const auto directions = [&](double target) {
            std::vector<LVec> cr(pr.n);
            LVec rhs(nc, 0.0L);
            for (int i = 0; i < pr.n; ++i) {
                cr[i] = residual_coords(target, i);
                lvec_axpy(rhs, 1.0L, cr[i]);
            }
            const LVec dk = kfac.solve(std::move(rhs));

            Directions dir;
            dir.dk = detail::coords_to_herm(pr.dim, to_dvec(dk));
            dir.dm.resize(nfree);
            for (int i = 0; i < nfree; ++i) {
                LVec mi = cr[i];
                lvec_axpy(mi, -1.0L, lmat_vec(sw[i], dk));
                dir.dm[i] = detail::coords_to_herm(pr.dim, to_dvec(mi));
            }
            return dir;
        };

        struct Trial {
            std::vector<CMat> m;
            std::vector<CMat> elems;
            CMat k;
        };
        const auto trial_at = [&](const Directions& dir, double alpha) {
            Trial t;
            t.m = st.m;
            for (int j = 0; j < nfree; ++j) {
                CMat d = dir.dm[j];
                d *= alpha;
                t.m[j] += d;
            }
            t.elems = t.m;
            t.elems.push_back(st.last_element(t.m));
            t.k = dir.dk;
            t.k *= alpha;
            t.k += st.k;
            return t;
        };

        if (gap <= cfg.target_gap) {
            // Fixed-mu centering round; the gap is already where we want it.
            const Directions dir = directions(mu);
            const double psi0 = centrality(elems, st.k, mu);
            for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
                Trial t = trial_at(dir, alpha);
                if (!st.feasible(t.elems, t.k)) continue;
                const double gap_t = t.k.trace().real() - st.objective_value(t.elems);
                if (!(gap_t <= gap * 1.05)) continue;
                if (!(centrality(t.elems, t.k, gap_t / order) <= 0.9 * psi0)) continue;
                st.m = std::move(t.m);
                st.k = std::move(t.k);
                break;
            }
            ++polish_rounds;
            ++iterations;
            continue;
        }

        // Centering weight from the affine probe, then the actual step.
        const Directions affine = directions(0.0);
        double gap_aff = gap;
        for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
            const Trial t = trial_at(affine, alpha);
            if (!st.feasible(t.elems, t.k)) continue;
            gap_aff = t.k.trace().real() - st.objective_value(t.elems);
            break;
        }
        const double ratio = gap_aff / gap;
        const double sigma = std::min(0.9, std::max(0.01, ratio * ratio * ratio));

        bool moved = false;
        for (double sig : {sigma, 0.95}) {
            const Directions dir = directions(sig * mu);
            for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
                Trial t = trial_at(dir, alpha);
                if (!st.feasible(t.elems, t.k)) continue;
                const double gap_t = t.k.trace().real() - st.objective_value(t.elems);
                if (!(gap_t <= gap * (1.0 - 0.25 * (1.0 - sig) * alpha))) continue;
                st.m = std::move(t.m);
                st.k = std::move(t.k);
                moved = true;
                break;
            }
            if (moved) break;
        }
        if (!moved) fail("step collapsed", mu, log);
        ++iterations;
    }
}

// ---- PPT: feasible primal-dual path following ------------------------------
//
// Primal: maximize sum_i Tr(G_i M_i) over POVMs with every M_i and PT(M_i)
// PSD. Dual: minimize Tr K subject to X_i = K - G_i - PT(Y_i) and Y_i both
// PSD. Every iterate keeps all four cone families strictly feasible, so
// Tr K - sum_i Tr(G_i M_i) is an exact duality gap throughout.

struct PptState : GuessState {
    std::vector<CMat> y;

    explicit PptState(const Costs& p) : GuessState(p) {
        y.assign(pr.n, CMat::identity(pr.dim));
    }

    CMat dual_slack(const CMat& kv, const CMat& yv, int i) const {
        CMat x = kv - pr.g[i];
        x -= partial_transpose(yv, pr.d1, pr.d2);
        return x;
    }

    bool feasible(const std::vector<CMat>& elems, const CMat& kv,
                  const std::vector<CMat>& yv) const {
        CMat l;
        for (int i = 0; i < pr.n; ++i) {
            if (!cholesky(elems[i], l)) return false;
            if (!cholesky(partial_transpose(elems[i], pr.d1, pr.d2), l)) return false;
            if (!cholesky(yv[i], l)) return false;
            if (!cholesky(dual_slack(kv, yv[i], i), l)) return false;
        }
        return true;
    }
};

SolveResult solve_ppt_kernel(const StateEnsemble& e, const SolverConfig& cfg) {
    cfg.validate();
    const HermitianEnsemble he = as_hermitian(e);
    const Costs pr = weighted_costs(he);
    if (pr.n == 1) return single_outcome_result(pr, ProblemKind::PPT);

    const PtCoordMap pt = detail::pt_coord_map(pr.d1, pr.d2);
    PptState st(pr);
    const int nc = st.nc;
    const int nfree = st.nfree;
    const double order = 2.0 * pr.n * pr.dim;
    std::vector<TracePoint> log;
    int iterations = 0;
    int recenters = 0;
    bool use_arrow = false;

    // Frobenius distance of the worst pair product from exact centrality,
    // over both cone families.
    const auto centrality = [&](const std::vector<CMat>& el, const CMat& kv,
                                const std::vector<CMat>& yv, double mub) {
        double worst = 0.0;
        for (int i = 0; i < pr.n; ++i) {
            CMat px = st.dual_slack(kv, yv[i], i) * el[i];
            CMat pn = yv[i] * partial_transpose(el[i], pr.d1, pr.d2);
            for (int q = 0; q < pr.dim; ++q) {
                px(q, q) -= mub;
                pn(q, q) -= mub;
            }
            worst = std::max(
                worst, std::max(px.frobenius_norm(), pn.frobenius_norm()) / mub);
        }
        return worst;
    };

    const auto finish = [&](const std::vector<CMat>& el, double pv, double gapv) {
        SolveResult r;
        r.value = pv;
        std::vector<CMat> sym;
        sym.reserve(pr.n);
        for (const CMat& x : el) sym.push_back(x.hermitian_part());
        r.povm = Povm::create(pr.d1, pr.d2, sym);
        r.dual_K = HermitianOperator::create(pr.d1, pr.d2, st.k);
        for (const CMat& yv : st.y)
            r.ppt_dual_slacks.push_back(HermitianOperator::create(pr.d1, pr.d2, yv));
        r.certified_gap = gapv;
        r.problem_kind = ProblemKind::PPT;
        r.iterations = iterations;
        r.trace_log = std::move(log);
        return r;
    };

    // Terminal salvage once no step moves: the parallel sum of the dual
    // slacks is dominated by every one of them, so lowering K by just under
    // that matrix keeps (K, Y) strictly feasible and removes its trace from
    // the certified gap without touching the primal. Iterated a few rounds
    // this closes the near-misses where the iterate wedges a hair above the
    // target; anything larger stays a genuine failure.
    const auto try_shave = [&](const std::vector<CMat>& el,
                               double p) -> std::optional<SolveResult> {
        CMat k2 = st.k;
        double gap2 = k2.trace().real() - p;
        for (int round = 0; round < 4 && gap2 > cfg.target_gap; ++round) {
            LMat ssum(2 * pr.dim, 2 * pr.dim);
            CMat l;
            bool ok = true;
            for (int i = 0; i < pr.n && ok; ++i) {
                const CMat x = st.dual_slack(k2, st.y[i], i);
                ok = cholesky(x, l);
                if (!ok) break;
                const LMat xr = refine_inverse_rep(x, chol_inverse(l));
                for (size_t q = 0; q < ssum.a.size(); ++q) ssum.a[q] += xr.a[q];
            }
            if (!ok) break;
            const LSpectrum es = ljacobi(ssum);
            if (!(es.evals.front() > 0.0L)) break;
            const LMat psum = lspectral(es, [](long double x) { return 1.0L / x; });
            CMat delta = from_real_rep(psum).hermitian_part();
            delta *= 0.99;
            k2 -= delta;
            const double next = k2.trace().real() - p;
            if (!(next >= 0.0 && next < gap2)) return std::nullopt;
            gap2 = next;
        }
        if (gap2 > cfg.target_gap) return std::nullopt;
        CMat l;
        for (int i = 0; i < pr.n; ++i)
            if (!cholesky(st.dual_slack(k2, st.y[i], i), l)) return std::nullopt;
        st.k = std::move(k2);
        const double dual2 = st.k.trace().real();
        log.push_back({(dual2 - p) / order, p, dual2});
        return finish(el, p, dual2 - p);
    };

    for (int outer = 0;; ++outer) {
        const std::vector<CMat> elems = st.all_elements();
        const double p = st.objective_value(elems);
        const double dual = st.k.trace().real();
        const double gap = dual - p;
        const double mu = gap / order;
        log.push_back({mu, p, dual});
        if (gap <= cfg.target_gap) return finish(elems, p, gap);
        if (outer >= cfg.max_outer_iters) fail("iteration limit", mu, log);

        // Per outcome the Y block and the element step are eliminated
        // through the inverse scalings; everything assembled is a sum of
        // positive semidefinite pieces, so no leading digits cancel. The
        // element response to the K step is F_i^{-1} with
        // F_i = Sw_i^{-1} + P Sv_i^{-1} P. Near the end the explicit
        // inverses get too ill conditioned to yield usable steps, and the
        // coupled (K, Y) system is factored whole instead.
        std::vector<LChol> ffac(pr.n);
        std::vector<LMat> sw(pr.n), sv(pr.n), swinv(pr.n), svinv(pr.n);
        std::vector<LMat> xinvr(pr.n), yinvr(pr.n);
        std::vector<CMat> nmat(pr.n);
        LChol schur_fac;
        bool fast_ok = !use_arrow;
        {
            LMat schur(nc, nc);
            CMat l;
            for (int i = 0; i < pr.n; ++i) {
                const CMat x = st.dual_slack(st.k, st.y[i], i);
                nmat[i] = partial_transpose(elems[i], pr.d1, pr.d2);
                if (!cholesky(x, l)) fail("dual slack left the feasible cone", mu, log);
                xinvr[i] = refine_inverse_rep(x, chol_inverse(l));
                if (!cholesky(st.y[i], l))
                    fail("dual certificate left the feasible cone", mu, log);
                yinvr[i] = refine_inverse_rep(st.y[i], chol_inverse(l));

                const NtPair w = nt_scaling(x, elems[i]);
                const NtPair v = nt_scaling(st.y[i], nmat[i]);
                sw[i] = lsandwich(w.wr);
                sv[i] = lsandwich(v.wr);
                if (!fast_ok) continue;
                swinv[i] = lsandwich(w.winvr);
                svinv[i] = lsandwich(v.winvr);

                LMat f(nc, nc);
                for (int r = 0; r < nc; ++r)
                    for (int c = 0; c < nc; ++c)
                        f(r, c) = pt.sign[r] * pt.sign[c] * svinv[i](pt.perm[r], pt.perm[c]) +
                                  swinv[i](r, c);
                fast_ok = ffac[i].factor(f);
                if (fast_ok) ffac[i].add_inverse_into(schur);
            }
            if (fast_ok) fast_ok = schur_fac.factor(schur);
        }

        struct Directions {
            CMat dk;
            std::vector<CMat> dm;
            std::vector<CMat> dy;
        };
        const auto residuals = [&](double target, int i, LVec& cr, LVec& cs) {
            LMat r = xinvr[i];
            const LMat er = to_real_rep(elems[i]);
            for (size_t q = 0; q < r.a.size(); ++q) r.a[q] = target * r.a[q] - er.a[q];
            LMat s = yinvr[i];
            const LMat nr = to_real_rep(nmat[i]);
            for (size_t q = 0; q < s.a.size(); ++q) s.a[q] = target * s.a[q] - nr.a[q];
            cr = lherm_coords(r);
            cs = lherm_coords(s);
        };
        const auto fast_directions = [&](double target) {
            std::vector<LVec> g(pr.n), cs(pr.n);
            LVec rhs(nc, 0.0L);
            for (int i = 0; i < pr.n; ++i) {
                LVec cr;
                residuals(target, i, cr, cs[i]);
                g[i] = lmat_vec(swinv[i], cr);
                lvec_axpy(g[i], 1.0L, lpt_apply(pt, lmat_vec(svinv[i], cs[i])));
                lvec_axpy(rhs, 1.0L, ffac[i].solve(g[i]));
            }
            const LVec dk = schur_fac.solve(rhs);

            Directions dir;
            dir.dk = detail::coords_to_herm(pr.dim, to_dvec(dk));
            dir.dm.resize(nfree);
            dir.dy.resize(pr.n);
            for (int i = 0; i < pr.n; ++i) {
                LVec mi = g[i];
                lvec_axpy(mi, -1.0L, dk);
                mi = ffac[i].solve(std::move(mi));
                LVec yi = cs[i];
                lvec_axpy(yi, -1.0L, lpt_apply(pt, mi));
                dir.dy[i] = detail::coords_to_herm(pr.dim, to_dvec(lmat_vec(svinv[i], yi)));
                if (i < nfree) dir.dm[i] = detail::coords_to_herm(pr.dim, to_dvec(mi));
            }
            return dir;
        };

        // Coupled system over (K, Y_1..Y_n) with the element steps
        // substituted out through the plain scalings: the quadratic form is
        // sum_i (k - P y_i)' Sw_i (k - P y_i) + y_i' Sv_i y_i, assembled
        // without any inversion and factored once per iteration.
        const int asz = (pr.n + 1) * nc;
        LChol arrow_fac;
        LMat arrow_a;
        bool arrow_ready = false;
        const auto ensure_arrow = [&]() {
            if (arrow_ready) return;
            LMat a(asz, asz);
            for (int i = 0; i < pr.n; ++i) {
                const int off = (i + 1) * nc;
                for (int r = 0; r < nc; ++r)
                    for (int c = 0; c < nc; ++c) {
                        a(r, c) += sw[i](r, c);
                        const long double wp = sw[i](r, pt.perm[c]) * pt.sign[c];
                        a(r, off + c) = -wp;
                        a(off + c, r) = -wp;
                        a(off + r, off + c) =
                            pt.sign[r] * pt.sign[c] * sw[i](pt.perm[r], pt.perm[c]) + sv[i](r, c);
                    }
            }
            if (!arrow_fac.factor(a)) fail("step system not definite", mu, log);
            arrow_a = std::move(a);
            arrow_ready = true;
        };
        const auto arrow_directions = [&](double target) {
            ensure_arrow();
            std::vector<LVec> cr(pr.n);
            LVec rhs(asz, 0.0L);
            for (int i = 0; i < pr.n; ++i) {
                LVec cs;
                residuals(target, i, cr[i], cs);
                const LVec pcr = lpt_apply(pt, cr[i]);
                const int off = (i + 1) * nc;
                for (int q = 0; q < nc; ++q) {
                    rhs[q] += cr[i][q];
                    rhs[off + q] = cs[q] - pcr[q];
                }
            }
            const LVec sol = arrow_fac.solve_refined(arrow_a, rhs);

            Directions dir;
            const LVec dk(sol.begin(), sol.begin() + nc);
            dir.dk = detail::coords_to_herm(pr.dim, to_dvec(dk));
            dir.dm.resize(nfree);
            dir.dy.resize(pr.n);
            for (int i = 0; i < pr.n; ++i) {
                const int off = (i + 1) * nc;
                const LVec yi(sol.begin() + off, sol.begin() + off + nc);
                dir.dy[i] = detail::coords_to_herm(pr.dim, to_dvec(yi));
                if (i < nfree) {
                    LVec t = dk;
                    lvec_axpy(t, -1.0L, lpt_apply(pt, yi));
                    LVec mi = cr[i];
                    lvec_axpy(mi, -1.0L, lmat_vec(sw[i], t));
                    dir.dm[i] = detail::coords_to_herm(pr.dim, to_dvec(mi));
                }
            }
            return dir;
        };

        struct Trial {
            std::vector<CMat> m;
            std::vector<CMat> elems;
            CMat k;
            std::vector<CMat> y;
        };
        const auto trial_at = [&](const Directions& dir, double alpha) {
            Trial t;
            t.m = st.m;
            for (int j = 0; j < nfree; ++j) {
                CMat d = dir.dm[j];
                d *= alpha;
                t.m[j] += d;
            }
            t.elems = t.m;
            t.elems.push_back(st.last_element(t.m));
            t.k = dir.dk;
            t.k *= alpha;
            t.k += st.k;
            t.y = st.y;
            for (int i = 0; i < pr.n; ++i) {
                CMat d = dir.dy[i];
                d *= alpha;
                t.y[i] += d;
            }
            return t;
        };

        // Centering weight from the affine probe, then the actual step.
        const auto run_step = [&](const auto& dirfn) {
            const Directions affine = dirfn(0.0);
            double gap_aff = gap;
            for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
                const Trial t = trial_at(affine, alpha);
                if (!st.feasible(t.elems, t.k, t.y)) continue;
                gap_aff = t.k.trace().real() - st.objective_value(t.elems);
                break;
            }
            const double ratio = gap_aff / gap;
            const double sigma = std::min(0.9, std::max(0.01, ratio * ratio * ratio));

            for (double sig : {sigma, 0.95}) {
                const Directions dir = dirfn(sig * mu);
                for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
                    Trial t = trial_at(dir, alpha);
                    if (!st.feasible(t.elems, t.k, t.y)) continue;
                    const double gap_t = t.k.trace().real() - st.objective_value(t.elems);
                    if (!(gap_t <= gap * (1.0 - 0.25 * (1.0 - sig) * alpha))) continue;
                    st.m = std::move(t.m);
                    st.k = std::move(t.k);
                    st.y = std::move(t.y);
                    return true;
                }
            }
            return false;
        };

        bool moved = false;
        if (fast_ok) moved = run_step(fast_directions);
        if (!moved) {
            use_arrow = true;
            moved = run_step(arrow_directions);
        }
        if (!moved && recenters < kMaxRecenter) {
            // No gap-decreasing step exists once the iterate drifts off
            // center; a fixed-mu round restores alignment and unblocks it.
            const double psi0 = centrality(elems, st.k, st.y, mu);
            const Directions dir = arrow_directions(mu);
            for (double alpha = 0.99; alpha > kMinStep; alpha *= 0.8) {
                Trial t = trial_at(dir, alpha);
                const bool feas = st.feasible(t.elems, t.k, t.y);
                if (std::getenv("QSD_TRACE_CTR") && alpha > 0.01) {
                    const double gap_f =
                        feas ? t.k.trace().real() - st.objective_value(t.elems) : -1.0;
                    const double psi_f =
                        feas ? centrality(t.elems, t.k, t.y, gap_f / order) : -1.0;
                    std::fprintf(stderr, "  ctr psi0=%.3e alpha=%.3e feas=%d gap_t=%.6e psi_t=%.3e\n",
                                 psi0, alpha, feas ? 1 : 0, gap_f, psi_f);
                }
                if (!feas) continue;
                const double gap_t = t.k.trace().real() - st.objective_value(t.elems);
                if (!(gap_t <= gap * 1.05)) continue;
                if (!(centrality(t.elems, t.k, t.y, gap_t / order) <= 0.9 * psi0)) continue;
                st.m = std::move(t.m);
                st.k = std::move(t.k);
                st.y = std::move(t.y);
                moved = true;
                break;
            }
            if (moved) ++recenters;
        }
        if (!moved) {
            if (auto salvaged = try_shave(elems, p)) return std::move(*salvaged);
            fail("step collapsed", mu, log);
        }
        if (std::getenv("QSD_TRACE_PSI")) {
            const std::vector<CMat> el2 = st.all_elements();
            const double gap2 = st.k.trace().real() - st.objective_value(el2);
            std::fprintf(stderr, "  psi outer=%d gap=%.3e psi=%.3e arrow=%d\n", outer, gap2,
                         centrality(el2, st.k, st.y, gap2 / order), use_arrow ? 1 : 0);
        }
        ++iterations;
    }
}

}  // namespace

SolveResult solve_hermitian_guessing(const HermitianEnsemble& e, const SolverConfig& cfg) {
    return solve_guessing_kernel(e, cfg, ProblemKind::PG);
}

SolveResult solve_pg(const StateEnsemble& e, const SolverConfig& cfg) {
    return solve_guessing_kernel(as_hermitian(e), cfg, ProblemKind::PG);
}

SolveResult solve_qg(const StateEnsemble& e, const SolverConfig& cfg) {
    return solve_guessing_kernel(pt_ensemble(e), cfg, ProblemKind::QG);
}

SolveResult solve_ppt(const StateEnsemble& e, const SolverConfig& cfg) {
    return solve_ppt_kernel(e, cfg);
}

double helstrom_two_state(double eta1, const HermitianOperator& rho1, double eta2,
                          const HermitianOperator& rho2) {
    if (rho1.d1() != rho2.d1() || rho1.d2() != rho2.d2())
        throw ValidationError(ValidationKind::DimensionMismatch, "two-state dimensions differ");
    if (!(eta1 > 0.0) || eta1 > 1.0 || !(eta2 > 0.0) || eta2 > 1.0)
        throw ValidationError(ValidationKind::PriorRange, "priors must lie in (0, 1]");
    if (std::abs(eta1 + eta2 - 1.0) > kPriorSumTol)
        throw ValidationError(ValidationKind::PriorSum, "two-state priors must sum to one");
    CMat diff = rho1.mat();
    diff *= eta1;
    CMat b = rho2.mat();
    b *= eta2;
    diff -= b;
    double tn = 0.0;
    for (double ev : eig_hermitian(diff).eigenvalues) tn += std::abs(ev);
    return 0.5 * (1.0 + tn);
}

BoundsReport bounds_report(const StateEnsemble& e, const SolverConfig& cfg) {
    BoundsReport r;
    r.p_g = solve_pg(e, cfg).value;
    r.q_g = solve_qg(e, cfg).value;
    r.p_ppt = solve_ppt(e, cfg).value;
    r.ordering_ok = r.p_ppt <= std::min(r.p_g, r.q_g) + 2.0 * cfg.target_gap;
    r.nlwe_flag = e.separable_asserted() && r.q_g + 2.0 * cfg.target_gap < r.p_g;
    return r;
}

}  // namespace qsd
