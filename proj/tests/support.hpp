#pragma once

#include <random>
#include <utility>
#include <vector>

#include "qsd/ensembles.hpp"
#include "qsd/linalg.hpp"

namespace qsd::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline CMat random_matrix(std::mt19937_64& gen, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = Complex(n(gen), n(gen));
    return g;
}

inline CMat random_hermitian(std::mt19937_64& gen, int dim) {
    return random_matrix(gen, dim).hermitian_part();
}

inline CMat random_density(std::mt19937_64& gen, int dim) {
    const CMat g = random_matrix(gen, dim);
    CMat w = g * g.adjoint();
    w *= 1.0 / w.trace().real();
    return w.hermitian_part();
}

inline std::vector<double> random_priors(std::mt19937_64& gen, int n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(n);
    double total = 0.0;
    for (double& x : p) total += (x = u(gen));
    for (double& x : p) x /= total;
    return p;
}

inline StateEnsemble random_ensemble(std::mt19937_64& gen, int d1, int d2, int n) {
    const std::vector<double> priors = random_priors(gen, n);
    std::vector<std::pair<double, CMat>> states;
    states.reserve(n);
    for (int i = 0; i < n; ++i) states.emplace_back(priors[i], random_density(gen, d1 * d2));
    return StateEnsemble::create(d1, d2, states);
}

}  // namespace qsd::testing
