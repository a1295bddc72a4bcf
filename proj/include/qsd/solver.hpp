#pragma once

#include <vector>

#include "qsd/ensembles.hpp"

namespace qsd {

struct SolverConfig {
    double target_gap = 1e-8;   // certified duality gap to stop at
    int max_outer_iters = 200;  // interior-point iterations

    void validate() const;
};

enum class ProblemKind { PG, QG, PPT };

const char* to_string(ProblemKind kind);

struct TracePoint {
    double mu;
    double primal_value;
    double dual_value;
};

// Solver failure that still exposes the central-path trace walked so far.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, std::vector<TracePoint> trace)
        : Error(msg), trace_log_(std::move(trace)) {}

    const std::vector<TracePoint>& trace_log() const { return trace_log_; }

private:
    std::vector<TracePoint> trace_log_;
};

struct SolveResult {
    double value = 0.0;
    Povm povm;
    HermitianOperator dual_K;
    double certified_gap = 0.0;
    ProblemKind problem_kind = ProblemKind::PG;
    int iterations = 0;                   // interior-point rounds performed
    std::vector<TracePoint> trace_log;    // one entry per visited iterate
    // For PPT results: a Hermitian slack Y_i >= 0 per outcome such that
    // dual_K - eta_i rho_i - PT(Y_i) >= 0 up to the certified tolerance.
    // Empty for PG and QG results.
    std::vector<HermitianOperator> ppt_dual_slacks;
};

// max_POVM sum_i eta_i Tr(C_i M_i) over all POVMs, for Hermitian costs C_i.
// Primal-dual path following against the dual min Tr K with K - eta_i C_i
// PSD; both sides stay strictly feasible, so the reported gap between
// Tr K and the primal value is an exact certificate at every iterate.
SolveResult solve_hermitian_guessing(const HermitianEnsemble& e, const SolverConfig& cfg = {});

// Guessing probability of the ensemble itself.
SolveResult solve_pg(const StateEnsemble& e, const SolverConfig& cfg = {});
// Guessing probability of the partially transposed ensemble. Upper-bounds
// every PPT measurement on the original one.
SolveResult solve_qg(const StateEnsemble& e, const SolverConfig& cfg = {});
// Optimum over POVMs whose elements all stay PSD under partial transpose.
SolveResult solve_ppt(const StateEnsemble& e, const SolverConfig& cfg = {});

// Closed form 1/2 + ||eta1 rho1 - eta2 rho2||_1 / 2 for two states.
double helstrom_two_state(double eta1, const HermitianOperator& rho1, double eta2,
                          const HermitianOperator& rho2);

struct BoundsReport {
    double p_g = 0.0;
    double q_g = 0.0;
    double p_ppt = 0.0;
    // p_ppt <= min(p_g, q_g) + 2 * target_gap held numerically.
    bool ordering_ok = false;
    // Separability was asserted by the caller and q_g sits strictly below
    // p_g, so no product measurement can reach the global optimum.
    bool nlwe_flag = false;
};

BoundsReport bounds_report(const StateEnsemble& e, const SolverConfig& cfg = {});

}  // namespace qsd
