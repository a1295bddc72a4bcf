#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "../support.hpp"
#include "qsd/certify.hpp"
#include "qsd/solver.hpp"

using namespace qsd;
using qsd::testing::rng;

namespace {

double manual_value(const StateEnsemble& e, const Povm& m) {
    double v = 0.0;
    for (int i = 0; i < e.size(); ++i)
        v += e.prior(i) * trace_inner(e.state(i), m.element(i));
    return v;
}

}  // namespace

TEST_CASE("projective family certifies as globally optimal") {
    for (int d : {2, 3}) {
        const StateEnsemble e = example_ensemble(d, 0.8);
        const Povm g = example_global_povm(d);
        const CertificateReport rep = check_global_optimality(e, g);
        CHECK(rep.passed);
        CHECK(rep.kind == CertificateKind::GlobalOpt);
        REQUIRE(static_cast<int>(rep.lagrangian_residuals.size()) == e.size());
        REQUIRE(rep.slackness_residuals.size() ==
                static_cast<size_t>(e.size()) * (e.size() - 1) / 2);
        for (double lr : rep.lagrangian_residuals) CHECK(lr >= -rep.tolerance);
        for (const PairResidual& pr : rep.slackness_residuals) CHECK(pr.value <= rep.tolerance);
        CHECK(rep.hermiticity_residual < 1e-12);
    }
}

TEST_CASE("product family fails the global certificate but passes the transposed one") {
    for (int d : {2, 3}) {
        const StateEnsemble e = example_ensemble(d, 1.0);
        const Povm l = example_local_povm(d);
        CHECK(!check_global_optimality(e, l).passed);
        const CertificateReport qg = check_qg_optimality(e, l);
        CHECK(qg.passed);
        CHECK(qg.kind == CertificateKind::QgOpt);
    }
}

TEST_CASE("solver outputs close the loop with their certificates") {
    auto gen = rng(41);
    const StateEnsemble e = qsd::testing::random_ensemble(gen, 2, 2, 3);
    CHECK(check_global_optimality(e, solve_pg(e).povm).passed);
    CHECK(check_qg_optimality(e, solve_qg(e).povm).passed);
}

TEST_CASE("transpose positivity check separates the two families") {
    const Povm l = example_local_povm(2);
    const PptPovmReport lrep = check_povm_ppt(l);
    CHECK(lrep.all_ppt);
    for (double ev : lrep.pt_min_eigenvalues) CHECK(ev >= -1e-12);

    const Povm g = example_global_povm(2);
    const PptPovmReport grep = check_povm_ppt(g);
    CHECK(!grep.all_ppt);
    REQUIRE(grep.pt_min_eigenvalues.size() == 4);
    CHECK(grep.pt_min_eigenvalues[0] == doctest::Approx(-0.5).epsilon(1e-10));

    const Povm trivial = Povm::create(2, 2, {CMat::identity(4)});
    CHECK(check_povm_ppt(trivial).all_ppt);
}

TEST_CASE("product structure and the transposed certificate pin the local value") {
    for (int d : {2, 3}) {
        const double lambda = d == 2 ? 1.0 : 0.6;
        const StateEnsemble e = example_ensemble(d, lambda);
        const Povm l = example_local_povm(d);
        const LocalRealizationReport rep = check_local_realization(e, l);
        CHECK(rep.is_product_projective);
        for (double defect : rep.product_defects) CHECK(defect < 1e-12);
        CHECK(rep.qg_report.passed);
        CHECK(rep.pl_established);
        const ClosedForms f = example_closed_forms(d, lambda);
        CHECK(std::abs(rep.achieved_value - f.q_g) < 1e-10);
        CHECK(rep.achieved_value == doctest::Approx(manual_value(e, l)).epsilon(1e-13));
    }
}

TEST_CASE("entangled projectors are flagged as non-product") {
    const StateEnsemble e = example_ensemble(2, 1.0);
    const Povm g = example_global_povm(2);
    const LocalRealizationReport rep = check_local_realization(e, g);
    CHECK(!rep.is_product_projective);
    CHECK(!rep.pl_established);
    REQUIRE(rep.product_defects.size() == 4);
    CHECK(rep.product_defects[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("vanishing elements count as product") {
    CMat p00(4, 4), p01(4, 4), p10(4, 4), p11(4, 4);
    p00(0, 0) = 1.0;
    p01(1, 1) = 1.0;
    p10(2, 2) = 1.0;
    p11(3, 3) = 1.0;
    const Povm m = Povm::create(2, 2, {p00, p01, p10, p11, CMat(4, 4)});

    auto gen = rng(42);
    const StateEnsemble e = qsd::testing::random_ensemble(gen, 2, 2, 5);
    const LocalRealizationReport rep = check_local_realization(e, m);
    CHECK(rep.is_product_projective);
    REQUIRE(rep.product_defects.size() == 5);
    CHECK(rep.product_defects[4] == 0.0);
}

TEST_CASE("certificate inputs must be compatible") {
    const StateEnsemble e = example_ensemble(2, 1.0);
    const Povm small = Povm::create(2, 2, {CMat::identity(4)});
    try {
        check_global_optimality(e, small);
        FAIL("expected a validation error");
    } catch (const ValidationError& err) {
        CHECK(err.kind() == ValidationKind::CountMismatch);
    }

    auto gen = rng(43);
    const StateEnsemble other = qsd::testing::random_ensemble(gen, 1, 2, 8);
    try {
        check_qg_optimality(other, example_global_povm(2));
        FAIL("expected a validation error");
    } catch (const ValidationError& err) {
        CHECK(err.kind() == ValidationKind::DimensionMismatch);
    }
}
