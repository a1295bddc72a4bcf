#include "qsd/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsd {

const char* to_string(CertificateKind kind) {
    return kind == CertificateKind::GlobalOpt ? "global_opt" : "qg_opt";
}

namespace {

void check_compatible(const StateEnsemble& e, const Povm& m) {
    if (e.d1() != m.d1() || e.d2() != m.d2())
        throw ValidationError(ValidationKind::DimensionMismatch,
                              "ensemble and POVM dimensions differ");
    if (e.size() != m.size())
        throw ValidationError(ValidationKind::CountMismatch,
                              "ensemble holds " + std::to_string(e.size()) + " states, POVM " +
                                  std::to_string(m.size()) + " elements");
}

CertificateReport check_optimality(CertificateKind kind, const StateEnsemble& e, const Povm& m,
                                   const std::vector<CMat>& costs, double tol) {
    if (!(tol > 0.0))
        throw ValidationError(ValidationKind::BadArgument, "tolerance must be positive");
    check_compatible(e, m);
    const int n = e.size();

    CertificateReport rep;
    rep.kind = kind;
    rep.tolerance = tol;

    CMat lagr(e.dim(), e.dim());
    std::vector<CMat> weighted;
    weighted.reserve(n);
    for (int i = 0; i < n; ++i) {
        CMat g = costs[i];
        g *= e.prior(i);
        lagr += g * m.element(i).mat();
        weighted.push_back(std::move(g));
    }
    rep.hermiticity_residual = lagr.hermiticity_defect();
    const CMat sym = lagr.hermitian_part();

    double worst_lagr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lo = eig_hermitian(sym - weighted[i]).eigenvalues.front();
        rep.lagrangian_residuals.push_back(lo);
        worst_lagr = std::min(worst_lagr, lo);
    }
    double worst_slack = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s =
                (m.element(i).mat() * (weighted[i] - weighted[j]) * m.element(j).mat()).max_abs();
            rep.slackness_residuals.push_back({i, j, s});
            worst_slack = std::max(worst_slack, s);
        }
    rep.passed = worst_lagr >= -tol && worst_slack <= tol;
    return rep;
}

}  // namespace

CertificateReport check_global_optimality(const StateEnsemble& e, const Povm& m, double tol) {
    std::vector<CMat> costs;
    costs.reserve(e.size());
    for (int i = 0; i < e.size(); ++i) costs.push_back(e.state(i).mat());
    return check_optimality(CertificateKind::GlobalOpt, e, m, costs, tol);
}

CertificateReport check_qg_optimality(const StateEnsemble& e, const Povm& m, double tol) {
    std::vector<CMat> costs;
    costs.reserve(e.size());
    for (int i = 0; i < e.size(); ++i)
        costs.push_back(partial_transpose(e.state(i).mat(), e.d1(), e.d2()));
    return check_optimality(CertificateKind::QgOpt, e, m, costs, tol);
}

PptPovmReport check_povm_ppt(const Povm& m, double tol) {
    if (!(tol > 0.0))
        throw ValidationError(ValidationKind::BadArgument, "tolerance must be positive");
    PptPovmReport rep;
    rep.tolerance = tol;
    rep.all_ppt = true;
    for (int i = 0; i < m.size(); ++i) {
        const double lo = min_eigenvalue(partial_transpose(m.element(i)));
        rep.pt_min_eigenvalues.push_back(lo);
        if (lo < -tol) rep.all_ppt = false;
    }
    return rep;
}

LocalRealizationReport check_local_realization(const StateEnsemble& e, const Povm& m, double tol) {
    if (!(tol > 0.0))
        throw ValidationError(ValidationKind::BadArgument, "tolerance must be positive");
    check_compatible(e, m);

    LocalRealizationReport rep;
    rep.tolerance = tol;
    rep.is_product_projective = true;

    const int d1 = m.d1();
    const int d2 = m.d2();
    for (int idx = 0; idx < m.size(); ++idx) {
        const Spectrum sp = eig_hermitian(m.element(idx));
        const int dim = m.dim();
        const double top = sp.eigenvalues[dim - 1];
        double defect = 0.0;
        if (top > tol) {
            // Rank one up to tol, with a Schmidt-rank-one top eigenvector.
            for (int a = 0; a + 1 < dim; ++a)
                defect = std::max(defect, std::abs(sp.eigenvalues[a]));
            CMat w(d1, d2);
            for (int r = 0; r < d1; ++r)
                for (int c = 0; c < d2; ++c) w(r, c) = sp.eigenvectors(r * d2 + c, dim - 1);
            const CMat gram = w.adjoint() * w;
            const Spectrum gs = eig_hermitian(gram);
            defect = std::max(defect, 1.0 - gs.eigenvalues[d2 - 1]);
        }
        rep.product_defects.push_back(defect);
        if (defect > tol) rep.is_product_projective = false;
    }

    double value = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        const CMat prod = e.state(i).mat() * m.element(i).mat();
        value += e.prior(i) * prod.trace().real();
    }
    rep.achieved_value = value;
    rep.qg_report = check_qg_optimality(e, m, tol);
    rep.pl_established = rep.is_product_projective && rep.qg_report.passed;
    return rep;
}

}  // namespace qsd
