#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "../support.hpp"
#include "qsd/linalg.hpp"

using namespace qsd;
using qsd::testing::random_hermitian;
using qsd::testing::rng;

namespace {

const Complex kI(0.0, 1.0);

CMat bell_density() {
    const double s = std::sqrt(0.5);
    std::vector<Complex> v = {s, 0.0, 0.0, s};
    return CMat::outer(v, v);
}

HermitianOperator herm_op(int d1, int d2, const CMat& m, double tol = 1e-10) {
    return HermitianOperator::create(d1, d2, m, tol);
}

}  // namespace

TEST_CASE("outer product and apply agree with hand expansion") {
    std::vector<Complex> u = {1.0, kI};
    std::vector<Complex> v = {2.0, 1.0 - kI};
    const CMat m = CMat::outer(u, v);
    CHECK(m(0, 0) == Complex(2.0, 0.0));
    CHECK(m(0, 1) == Complex(1.0, 1.0));
    CHECK(m(1, 0) == Complex(0.0, 2.0));
    CHECK(m(1, 1) == Complex(-1.0, 1.0));

    const std::vector<Complex> w = m.apply({1.0, 0.0});
    CHECK(std::abs(w[0] - Complex(2.0, 0.0)) == 0.0);
    CHECK(std::abs(w[1] - Complex(0.0, 2.0)) == 0.0);
}

TEST_CASE("adjoint, trace and hermitian part") {
    CMat m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0 + kI;
    m(1, 0) = 3.0;
    m(1, 1) = -kI;

    const CMat a = m.adjoint();
    CHECK(a(0, 1) == Complex(3.0, 0.0));
    CHECK(a(1, 0) == Complex(2.0, -1.0));
    CHECK(m.trace() == Complex(1.0, -1.0));

    const CMat h = m.hermitian_part();
    CHECK(h.hermiticity_defect() == 0.0);
    CHECK(h(0, 1) == Complex(2.5, 0.5));
    CHECK(h(1, 1) == Complex(0.0, 0.0));
    CHECK(m.hermiticity_defect() > 1.0);
}

TEST_CASE("matrix product matches hand expansion") {
    CMat a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = kI;
    a(1, 0) = 0.0;
    a(1, 1) = 2.0;
    CMat b(2, 2);
    b(0, 0) = 3.0;
    b(0, 1) = 1.0;
    b(1, 0) = -kI;
    b(1, 1) = 1.0 + kI;

    const CMat c = a * b;
    CHECK(c(0, 0) == Complex(4.0, 0.0));
    CHECK(c(0, 1) == Complex(0.0, 1.0));
    CHECK(c(1, 0) == Complex(0.0, -2.0));
    CHECK(c(1, 1) == Complex(2.0, 2.0));
}

TEST_CASE("kron matches hand expansion and is multiplicative") {
    CMat a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 3.0;
    a(1, 1) = 4.0;
    CMat b(2, 2);
    b(0, 0) = 0.0;
    b(0, 1) = kI;
    b(1, 0) = -kI;
    b(1, 1) = 1.0;

    const CMat k = kron(a, b);
    REQUIRE(k.rows() == 4);
    CHECK(k(0, 1) == kI);
    CHECK(k(0, 3) == 2.0 * kI);
    CHECK(k(1, 0) == -kI);
    CHECK(k(3, 2) == Complex(0.0, -4.0));
    CHECK(k(3, 3) == Complex(4.0, 0.0));

    auto gen = rng(11);
    const CMat a1 = qsd::testing::random_matrix(gen, 3);
    const CMat a2 = qsd::testing::random_matrix(gen, 3);
    const CMat b1 = qsd::testing::random_matrix(gen, 2);
    const CMat b2 = qsd::testing::random_matrix(gen, 2);
    CHECK(max_abs_diff(kron(a1, b1) * kron(a2, b2), kron(a1 * a2, b1 * b2)) < 1e-12);
}

TEST_CASE("kron rejects results beyond the capacity cap") {
    const CMat a = CMat::identity(17);
    const CMat b = CMat::identity(16);
    CHECK_THROWS_AS(kron(a, b), CapacityError);
}

TEST_CASE("partial transpose is an exact entry permutation") {
    auto gen = rng(12);
    const CMat m = qsd::testing::random_matrix(gen, 6);
    const CMat once = partial_transpose(m, 2, 3);
    CHECK(max_abs_diff(partial_transpose(once, 2, 3), m) == 0.0);
    CHECK(std::abs(once.trace() - m.trace()) == 0.0);
}

TEST_CASE("partial transpose acts as transpose on the second factor") {
    auto gen = rng(13);
    const CMat a = qsd::testing::random_matrix(gen, 3);
    const CMat b = qsd::testing::random_matrix(gen, 4);
    CHECK(max_abs_diff(partial_transpose(kron(a, b), 3, 4), kron(a, b.transpose())) == 0.0);
}

TEST_CASE("partial transpose pairs under the trace inner product") {
    auto gen = rng(14);
    const CMat a = random_hermitian(gen, 6);
    const CMat b = random_hermitian(gen, 6);
    const Complex lhs = (partial_transpose(a, 2, 3) * b).trace();
    const Complex rhs = (a * partial_transpose(b, 2, 3)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("partially transposed Bell state has one negative eigenvalue") {
    const HermitianOperator rho = herm_op(2, 2, bell_density());
    const HermitianOperator pt = partial_transpose(rho);
    const Spectrum s = eig_hermitian(pt);
    REQUIRE(s.eigenvalues.size() == 4);
    CHECK(s.eigenvalues[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(trace_norm(pt) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(min_eigenvalue(pt) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(is_psd(rho, 1e-12));
    CHECK(!is_psd(pt, 1e-3));
}

TEST_CASE("eigendecomposition reconstructs the input") {
    auto gen = rng(15);
    for (int dim : {2, 3, 5, 8, 16, 64}) {
        CMat a = random_hermitian(gen, dim);
        if (dim == 16) a *= 1e6;
        const Spectrum s = eig_hermitian(a);
        REQUIRE(static_cast<int>(s.eigenvalues.size()) == dim);
        for (int k = 0; k + 1 < dim; ++k) CHECK(s.eigenvalues[k] <= s.eigenvalues[k + 1]);

        CMat lam(dim, dim);
        for (int k = 0; k < dim; ++k) lam(k, k) = s.eigenvalues[k];
        const CMat rebuilt = s.eigenvectors * lam * s.eigenvectors.adjoint();
        CHECK(max_abs_diff(rebuilt, a) < 1e-10 * dim * std::max(1.0, a.max_abs()));
        CHECK(max_abs_diff(s.eigenvectors.adjoint() * s.eigenvectors, CMat::identity(dim)) <
              1e-11 * dim);
    }
}

TEST_CASE("eigendecomposition handles diagonal and degenerate input") {
    CMat d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 3.0;
    const Spectrum s = eig_hermitian(d);
    CHECK(s.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hermitian operator validation rejects bad input") {
    CHECK_THROWS_AS(herm_op(2, 2, CMat::identity(3)), ValidationError);

    CMat skew(2, 2);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(herm_op(1, 2, skew), ValidationError);
    CHECK_NOTHROW(herm_op(1, 2, skew, 1.5));

    CMat nan_mat = CMat::identity(2);
    nan_mat(0, 0) = std::nan("");
    CHECK_THROWS_AS(herm_op(1, 2, nan_mat), ValidationError);

    CHECK_THROWS_AS(HermitianOperator::create(17, 16, CMat::identity(272)), CapacityError);

    try {
        herm_op(2, 2, CMat::identity(3));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ValidationKind::DimensionMismatch);
    }
}

TEST_CASE("trace inner product is real for Hermitian pairs") {
    auto gen = rng(16);
    const CMat a = random_hermitian(gen, 4);
    const CMat b = random_hermitian(gen, 4);
    const double v = trace_inner(herm_op(2, 2, a), herm_op(2, 2, b));
    CHECK(v == doctest::Approx((a * b).trace().real()).epsilon(1e-13));
}

TEST_CASE("trace inner product rejects a large imaginary residue") {
    CMat a(2, 2);
    a(0, 1) = 1.0;
    CMat b(2, 2);
    b(1, 0) = kI;
    const HermitianOperator oa = herm_op(1, 2, a, 1.5);
    const HermitianOperator ob = herm_op(1, 2, b, 1.5);
    CHECK_THROWS_AS(trace_inner(oa, ob), NumericalError);
}

TEST_CASE("cholesky round trip, inverse and log det") {
    auto gen = rng(17);
    const CMat g = qsd::testing::random_matrix(gen, 5);
    const CMat m = (g * g.adjoint() + Complex(0.5) * CMat::identity(5)).hermitian_part();

    CMat l;
    REQUIRE(cholesky(m, l));
    CHECK(max_abs_diff(l * l.adjoint(), m) < 1e-12 * m.max_abs());

    const CMat inv = chol_inverse(l);
    CHECK(max_abs_diff(m * inv, CMat::identity(5)) < 1e-10);
    CHECK(inv.hermiticity_defect() == 0.0);

    const Spectrum s = eig_hermitian(m);
    double sum_log = 0.0;
    for (double ev : s.eigenvalues) sum_log += std::log(ev);
    CHECK(chol_log_det(l) == doctest::Approx(sum_log).epsilon(1e-10));
}

TEST_CASE("cholesky reports indefinite input") {
    CMat m = CMat::identity(3);
    m(2, 2) = -1.0;
    CMat l;
    CHECK(!cholesky(m, l));
}
