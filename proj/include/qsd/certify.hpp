#pragma once

#include <vector>

#include "qsd/ensembles.hpp"

namespace qsd {

inline constexpr double kDefaultCertTol = 1e-6;

enum class CertificateKind { GlobalOpt, QgOpt };

const char* to_string(CertificateKind kind);

struct PairResidual {
    int i;
    int j;
    double value;
};

// Optimality certificate for a measurement against weighted costs C_i:
// with L = sum_j eta_j C_j M_j symmetrized,
//   lagrangian_residuals[i] = min eig(L - eta_i C_i), nonnegative at an
//   optimum (and sufficient for one);
//   slackness_residuals[(i,j)] = max |M_i (eta_i C_i - eta_j C_j) M_j|,
//   zero at an optimum (necessary only).
struct CertificateReport {
    CertificateKind kind = CertificateKind::GlobalOpt;
    double tolerance = kDefaultCertTol;
    bool passed = false;
    std::vector<double> lagrangian_residuals;
    std::vector<PairResidual> slackness_residuals;
    double hermiticity_residual = 0.0;
};

CertificateReport check_global_optimality(const StateEnsemble& e, const Povm& m,
                                          double tol = kDefaultCertTol);
// Same certificate applied to the partially transposed states.
CertificateReport check_qg_optimality(const StateEnsemble& e, const Povm& m,
                                      double tol = kDefaultCertTol);

struct PptPovmReport {
    double tolerance = kDefaultCertTol;
    bool all_ppt = false;
    std::vector<double> pt_min_eigenvalues;
};

// Does every element stay PSD under partial transpose.
PptPovmReport check_povm_ppt(const Povm& m, double tol = kDefaultCertTol);

struct LocalRealizationReport {
    double tolerance = kDefaultCertTol;
    // Every element is within tol of c |u><u| (x) |w><w| (or vanishes).
    bool is_product_projective = false;
    std::vector<double> product_defects;
    CertificateReport qg_report;
    double achieved_value = 0.0;
    // Product structure plus a passing transposed-cost certificate: a local
    // protocol realizes the measurement and no measurement of its kind does
    // better, so the local optimum is pinned at achieved_value.
    bool pl_established = false;
};

LocalRealizationReport check_local_realization(const StateEnsemble& e, const Povm& m,
                                               double tol = kDefaultCertTol);

}  // namespace qsd
