#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "../support.hpp"
#include "qsd/certify.hpp"
#include "qsd/json_io.hpp"
#include "qsd/solver.hpp"

using namespace qsd;

namespace {

bool g_all_ok = true;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    g_all_ok = g_all_ok && ok;
}

CMat diagonal_sigma(int d) {
    const int dim = d * d;
    CMat sigma(dim, dim);
    double total = 0.0;
    for (int t = 1; t <= dim; ++t) total += t;
    for (int t = 0; t < dim; ++t) sigma(t, t) = (t + 1) / total;
    return sigma;
}

struct GridPoint {
    int d = 0;
    double lambda = 0.0;
    bool mixed_sigma = true;
    ClosedForms closed{};
    StateEnsemble ensemble;
    SolveResult pg, qg, ppt;
};

std::vector<GridPoint> solve_grid() {
    std::vector<GridPoint> grid;
    for (int d : {2, 3, 4}) {
        for (double lambda : {0.25, 0.5, 1.0}) {
            for (bool mixed : {true, false}) {
                GridPoint p;
                p.d = d;
                p.lambda = lambda;
                p.mixed_sigma = mixed;
                p.closed = example_closed_forms(d, lambda);
                p.ensemble = mixed ? example_ensemble(d, lambda)
                                   : example_ensemble(d, lambda, diagonal_sigma(d));
                p.pg = solve_pg(p.ensemble);
                p.qg = solve_qg(p.ensemble);
                p.ppt = solve_ppt(p.ensemble);
                grid.push_back(std::move(p));
            }
        }
    }
    return grid;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace

int main() {
    std::vector<GridPoint> grid;
    try {
        grid = solve_grid();
    } catch (const std::exception& e) {
        report("family grid solves complete", false, e.what());
        return 1;
    }

    {
        double worst = 0.0;
        for (const GridPoint& p : grid)
            worst = std::max(worst, std::abs(p.pg.value - p.closed.p_g));
        report("global optimum matches the closed form across the family grid", worst <= 1e-6,
               "max deviation " + fmt(worst));
    }

    {
        double worst = 0.0;
        for (const GridPoint& p : grid)
            worst = std::max(worst, std::abs(p.qg.value - p.closed.q_g));
        report("transposed-cost optimum matches the closed form across the family grid",
               worst <= 1e-6, "max deviation " + fmt(worst));
    }

    {
        double worst_tie = 0.0;
        double worst_gap = 0.0;
        for (const GridPoint& p : grid) {
            worst_tie = std::max(worst_tie, std::abs(p.ppt.value - p.closed.q_g));
            worst_gap = std::max(worst_gap,
                                 std::abs(p.pg.value - p.qg.value - p.closed.gap));
        }
        report("ppt optimum ties the transposed value and the gap formula",
               worst_tie <= 1e-6 && worst_gap <= 2e-6,
               "max tie deviation " + fmt(worst_tie) + ", max gap deviation " + fmt(worst_gap));
    }

    {
        bool ok = true;
        double worst = 0.0;
        std::string note;
        try {
            for (const GridPoint& p : grid) {
                const Povm g = example_global_povm(p.d);
                const Povm l = example_local_povm(p.d);
                const CertificateReport cg = check_global_optimality(p.ensemble, g, 1e-9);
                const CertificateReport cq = check_qg_optimality(p.ensemble, l, 1e-9);
                ok = ok && cg.passed && cq.passed;
                for (double r : cg.lagrangian_residuals) worst = std::min(worst, r);
                for (double r : cq.lagrangian_residuals) worst = std::min(worst, r);
            }
            note = "worst residual eigenvalue " + fmt(worst);
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        report("exact measurements certify optimal on the family grid", ok, note);
    }

    {
        bool ok = true;
        double worst = 0.0;
        std::string note;
        try {
            for (const GridPoint& p : grid) {
                const Povm l = example_local_povm(p.d);
                const LocalRealizationReport rep = check_local_realization(p.ensemble, l);
                const PptPovmReport ppt_rep = check_povm_ppt(l);
                ok = ok && rep.pl_established && ppt_rep.all_ppt;
                worst = std::max(worst, std::abs(rep.achieved_value - p.closed.q_g));
            }
            ok = ok && worst <= 1e-10;
            note = "max value deviation " + fmt(worst);
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        report("product measurement pins the local value without solving", ok, note);
    }

    {
        bool ok = true;
        double worst = 0.0;
        std::string note;
        try {
            auto gen = qsd::testing::rng(101);
            for (int t = 0; t < 50; ++t) {
                const StateEnsemble e = qsd::testing::random_ensemble(gen, 2, 2, 2);
                const double h =
                    helstrom_two_state(e.prior(0), e.state(0), e.prior(1), e.state(1));
                const double v = solve_pg(e).value;
                worst = std::max(worst, std::abs(v - h));
            }
            ok = worst <= 1e-6;
            note = "max deviation " + fmt(worst) + " over 50 seeded ensembles";
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        report("two-state solves agree with the two-state closed form", ok, note);
    }

    {
        bool ok = true;
        std::string note;
        try {
            auto gen = qsd::testing::rng(102);
            double worst_perm = 0.0;
            for (int t = 0; t < 25; ++t) {
                const CMat m = qsd::testing::random_matrix(gen, 6);
                const CMat back = partial_transpose(partial_transpose(m, 2, 3), 2, 3);
                worst_perm = std::max(worst_perm, max_abs_diff(back, m));
                worst_perm = std::max(
                    worst_perm, std::abs(partial_transpose(m, 2, 3).trace() - m.trace()));
                const CMat a = qsd::testing::random_hermitian(gen, 6);
                const CMat b = qsd::testing::random_hermitian(gen, 6);
                const Complex pair_gap = (partial_transpose(a, 2, 3) * b).trace() -
                                         (a * partial_transpose(b, 2, 3)).trace();
                worst_perm = std::max(worst_perm, std::abs(pair_gap));
            }
            ok = ok && worst_perm <= 1e-12;

            double worst_complete = 0.0;
            for (int d = 2; d <= 5; ++d) {
                for (const Povm& m : {example_global_povm(d), example_local_povm(d)}) {
                    CMat sum(d * d, d * d);
                    for (int i = 0; i < m.size(); ++i) sum += m.element(i).mat();
                    worst_complete =
                        std::max(worst_complete, max_abs_diff(sum, CMat::identity(d * d)));
                }
            }
            ok = ok && worst_complete <= 1e-9;

            double worst_path = 0.0;
            for (const GridPoint& p : grid) {
                const double nd = p.ensemble.size() * static_cast<double>(p.ensemble.dim());
                for (const SolveResult* r : {&p.pg, &p.qg}) {
                    for (const TracePoint& tp : r->trace_log) {
                        const double defect =
                            std::abs(tp.dual_value - tp.primal_value - tp.mu * nd);
                        worst_path = std::max(worst_path, defect / nd);
                    }
                }
            }
            ok = ok && worst_path <= 1e-8;

            auto sgen = qsd::testing::rng(103);
            double worst_sandwich = -1.0;
            for (int t = 0; t < 100; ++t) {
                const StateEnsemble e = qsd::testing::random_ensemble(sgen, 2, 2, 2 + t % 3);
                const BoundsReport rep = bounds_report(e);
                worst_sandwich = std::max(
                    worst_sandwich, rep.p_ppt - std::min(rep.p_g, rep.q_g));
                ok = ok && rep.ordering_ok;
            }
            ok = ok && worst_sandwich <= 2e-8;

            note = "permutation residue " + fmt(worst_perm) + ", completeness defect " +
                   fmt(worst_complete) + ", path identity defect " + fmt(worst_path) +
                   ", sandwich excess " + fmt(worst_sandwich);
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        report("transpose identities, completeness, path identity and sandwich hold", ok, note);
    }

    {
        bool ok = true;
        std::string note;
        try {
            auto gen = qsd::testing::rng(104);
            int certified = 0;
            for (int t = 0; t < 30; ++t) {
                const int side = (t % 2 == 0) ? 2 : 3;
                const int n = 2 + t % 4;
                const StateEnsemble e = qsd::testing::random_ensemble(gen, side, side, n);
                const SolveResult pg = solve_pg(e);
                const SolveResult qg = solve_qg(e);
                ok = ok && pg.certified_gap <= 1e-8 && qg.certified_gap <= 1e-8;
                ok = ok && check_global_optimality(e, pg.povm, 1e-6).passed;
                ok = ok && check_qg_optimality(e, qg.povm, 1e-6).passed;
                if (ok) ++certified;
            }
            note = std::to_string(certified) + "/30 seeded ensembles certified at 1e-6";
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        report("solver measurements pass their own certificates", ok, note);
    }

    return g_all_ok ? 0 : 1;
}
