#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

inline constexpr double kPriorSumTol = 1e-12;
inline constexpr double kStateTraceTol = 1e-10;
inline constexpr double kStatePsdTol = 1e-10;
inline constexpr double kStateHermTol = 1e-10;
inline constexpr double kPovmTol = 1e-9;

// A finite ensemble of bipartite density operators with prior probabilities.
// create() enforces: priors in (0, 1] summing to one, unit-trace PSD
// Hermitian states on the declared dimensions.
class StateEnsemble {
public:
    // Empty placeholder, size() == 0. Only create() yields a usable ensemble.
    StateEnsemble() = default;

    static StateEnsemble create(int d1, int d2, std::vector<std::pair<double, CMat>> items,
                                bool separable_asserted = false);

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    int dim() const { return d1_ * d2_; }
    int size() const { return static_cast<int>(states_.size()); }
    bool separable_asserted() const { return separable_asserted_; }
    double prior(int i) const { return priors_[i]; }
    const HermitianOperator& state(int i) const { return states_[i]; }

private:
    int d1_ = 0;
    int d2_ = 0;
    bool separable_asserted_ = false;
    std::vector<double> priors_;
    std::vector<HermitianOperator> states_;
};

// Like StateEnsemble but the operators only need to be Hermitian. This is
// the input type of the generic guessing solver; partial transposes of
// states land here.
class HermitianEnsemble {
public:
    static HermitianEnsemble create(int d1, int d2, std::vector<std::pair<double, CMat>> items);

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    int dim() const { return d1_ * d2_; }
    int size() const { return static_cast<int>(ops_.size()); }
    double prior(int i) const { return priors_[i]; }
    const HermitianOperator& op(int i) const { return ops_[i]; }

private:
    HermitianEnsemble() = default;

    int d1_ = 0;
    int d2_ = 0;
    std::vector<double> priors_;
    std::vector<HermitianOperator> ops_;
};

HermitianEnsemble as_hermitian(const StateEnsemble& e);
// Replaces every state by its partial transpose. Traces and priors carry
// over; positivity generally does not.
HermitianEnsemble pt_ensemble(const StateEnsemble& e);

// Measurement with elements PSD within kPovmTol summing to the identity
// within kPovmTol.
class Povm {
public:
    // Empty placeholder, size() == 0. Only create() yields a usable POVM.
    Povm() = default;

    static Povm create(int d1, int d2, std::vector<CMat> elements);

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    int dim() const { return d1_ * d2_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const HermitianOperator& element(int i) const { return elements_[i]; }

private:
    int d1_ = 0;
    int d2_ = 0;
    std::vector<HermitianOperator> elements_;
};

// Label (i, j, k) with 0 <= i < j <= d-1 and k in 1..4 for the maximally
// entangled family on C^d (x) C^d:
//   k=1: (|ii> + |jj>)/sqrt(2)    k=2: (|ii> - |jj>)/sqrt(2)
//   k=3: (|ij> + |ji>)/sqrt(2)    k=4: (|ij> - |ji>)/sqrt(2)
struct ExampleLabel {
    int i;
    int j;
    int k;
};

// All 2d(d-1) labels, ordered by (i, j) lexicographic, then k.
std::vector<ExampleLabel> example_labels(int d);

std::vector<Complex> psi_state(const ExampleLabel& label, int d);

// Ensemble of rho = lambda |psi><psi| + (1 - lambda) sigma under uniform
// priors 1/(2d(d-1)). sigma defaults to the maximally mixed state; any
// density matrix on C^{d*d} works and none of the derived quantities below
// depend on it. Requires d >= 2 and lambda in (0, 1].
StateEnsemble example_ensemble(int d, double lambda, const std::optional<CMat>& sigma = std::nullopt);

// Projectors onto the |psi> family, weighted 1/(d-1) for k in {1, 2} and 1
// for k in {3, 4}. Optimal for the ensemble above.
Povm example_global_povm(int d);

// Product measurement: per pair i < j the four elements
//   1/(d-1) |ii><ii|, 1/(d-1) |jj><jj|, |ij><ij|, |ji><ji|
// matched to k = 1..4. Optimal among PPT measurements for the ensemble
// above.
Povm example_local_povm(int d);

struct ClosedForms {
    double p_g;   // (1 + lambda (d^2 - 1)) / (2 d (d - 1))
    double q_g;   // (2 + lambda (d^2 - 2)) / (4 d (d - 1))
    double gap;   // p_g - q_g = lambda d / (4 (d - 1))
};

ClosedForms example_closed_forms(int d, double lambda);

}  // namespace qsd
