#include "qsd/ensembles.hpp"

#include <cmath>
#include <string>

namespace qsd {

namespace {

constexpr double kSqrtHalfAmp = 0.70710678118654752440;

void check_priors(const std::vector<double>& priors) {
    double sum = 0.0;
    for (size_t i = 0; i < priors.size(); ++i) {
        const double p = priors[i];
        if (!std::isfinite(p))
            throw ValidationError(ValidationKind::NonFinite, "prior " + std::to_string(i));
        if (p <= 0.0 || p > 1.0)
            throw ValidationError(ValidationKind::PriorRange,
                                  "prior " + std::to_string(i) + " = " + std::to_string(p));
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPriorSumTol)
        throw ValidationError(ValidationKind::PriorSum,
                              "priors sum to " + std::to_string(sum));
}

}  // namespace

StateEnsemble StateEnsemble::create(int d1, int d2, std::vector<std::pair<double, CMat>> items,
                                    bool separable_asserted) {
    if (items.empty())
        throw ValidationError(ValidationKind::BadArgument, "ensemble must hold at least one state");
    StateEnsemble e;
    e.d1_ = d1;
    e.d2_ = d2;
    e.separable_asserted_ = separable_asserted;
    e.priors_.reserve(items.size());
    for (auto& [p, _] : items) e.priors_.push_back(p);
    check_priors(e.priors_);
    for (size_t i = 0; i < items.size(); ++i) {
        HermitianOperator h = HermitianOperator::create(d1, d2, std::move(items[i].second),
                                                        kStateHermTol);
        const double tr = h.mat().trace().real();
        if (std::abs(tr - 1.0) > kStateTraceTol)
            throw ValidationError(ValidationKind::TraceViolation,
                                  "state " + std::to_string(i) + " has trace " + std::to_string(tr));
        const double lo = min_eigenvalue(h);
        if (lo < -kStatePsdTol)
            throw ValidationError(ValidationKind::NonPsd,
                                  "state " + std::to_string(i) + " has eigenvalue " + std::to_string(lo));
        e.states_.push_back(std::move(h));
    }
    return e;
}

HermitianEnsemble HermitianEnsemble::create(int d1, int d2,
                                            std::vector<std::pair<double, CMat>> items) {
    if (items.empty())
        throw ValidationError(ValidationKind::BadArgument, "ensemble must hold at least one operator");
    HermitianEnsemble e;
    e.d1_ = d1;
    e.d2_ = d2;
    e.priors_.reserve(items.size());
    for (auto& [p, _] : items) e.priors_.push_back(p);
    check_priors(e.priors_);
    for (auto& [_, m] : items)
        e.ops_.push_back(HermitianOperator::create(d1, d2, std::move(m), kStateHermTol));
    return e;
}

HermitianEnsemble as_hermitian(const StateEnsemble& e) {
    std::vector<std::pair<double, CMat>> items;
    items.reserve(e.size());
    for (int i = 0; i < e.size(); ++i) items.emplace_back(e.prior(i), e.state(i).mat());
    return HermitianEnsemble::create(e.d1(), e.d2(), std::move(items));
}

HermitianEnsemble pt_ensemble(const StateEnsemble& e) {
    std::vector<std::pair<double, CMat>> items;
    items.reserve(e.size());
    for (int i = 0; i < e.size(); ++i)
        items.emplace_back(e.prior(i), partial_transpose(e.state(i).mat(), e.d1(), e.d2()));
    return HermitianEnsemble::create(e.d1(), e.d2(), std::move(items));
}

Povm Povm::create(int d1, int d2, std::vector<CMat> elements) {
    if (elements.empty())
        throw ValidationError(ValidationKind::BadArgument, "POVM must hold at least one element");
    Povm m;
    m.d1_ = d1;
    m.d2_ = d2;
    CMat sum(d1 * d2, d1 * d2);
    for (size_t i = 0; i < elements.size(); ++i) {
        HermitianOperator h = HermitianOperator::create(d1, d2, std::move(elements[i]), kPovmTol);
        const double lo = min_eigenvalue(h);
        if (lo < -kPovmTol)
            throw ValidationError(ValidationKind::NonPsd,
                                  "POVM element " + std::to_string(i) + " has eigenvalue " +
                                      std::to_string(lo));
        sum += h.mat();
        m.elements_.push_back(std::move(h));
    }
    const double defect = max_abs_diff(sum, CMat::identity(d1 * d2));
    if (defect > kPovmTol)
        throw ValidationError(ValidationKind::Completeness,
                              "POVM elements sum to identity only within " + std::to_string(defect));
    return m;
}

std::vector<ExampleLabel> example_labels(int d) {
    if (d < 2)
        throw ValidationError(ValidationKind::BadArgument, "family needs d >= 2");
    std::vector<ExampleLabel> labels;
    labels.reserve(static_cast<size_t>(2 * d * (d - 1)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int k = 1; k <= 4; ++k) labels.push_back({i, j, k});
    return labels;
}

std::vector<Complex> psi_state(const ExampleLabel& label, int d) {
    if (d < 2)
        throw ValidationError(ValidationKind::BadArgument, "family needs d >= 2");
    const auto [i, j, k] = label;
    if (i < 0 || j <= i || j >= d || k < 1 || k > 4)
        throw ValidationError(ValidationKind::BadArgument,
                              "label (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                                  std::to_string(k) + ") invalid for d = " + std::to_string(d));
    std::vector<Complex> v(static_cast<size_t>(d) * d, Complex(0.0, 0.0));
    const double amp = (k == 1 || k == 3) ? kSqrtHalfAmp : -kSqrtHalfAmp;
    if (k <= 2) {
        v[static_cast<size_t>(i) * d + i] = kSqrtHalfAmp;
        v[static_cast<size_t>(j) * d + j] = amp;
    } else {
        v[static_cast<size_t>(i) * d + j] = kSqrtHalfAmp;
        v[static_cast<size_t>(j) * d + i] = amp;
    }
    return v;
}

StateEnsemble example_ensemble(int d, double lambda, const std::optional<CMat>& sigma) {
    if (d < 2)
        throw ValidationError(ValidationKind::BadArgument, "family needs d >= 2");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw ValidationError(ValidationKind::BadArgument,
                              "lambda must lie in (0, 1], got " + std::to_string(lambda));
    const int dim = d * d;
    CMat sig(dim, dim);
    if (sigma) {
        sig = *sigma;
        HermitianOperator h = HermitianOperator::create(d, d, sig, kStateHermTol);
        const double tr = h.mat().trace().real();
        if (std::abs(tr - 1.0) > kStateTraceTol)
            throw ValidationError(ValidationKind::TraceViolation,
                                  "sigma has trace " + std::to_string(tr));
        if (min_eigenvalue(h) < -kStatePsdTol)
            throw ValidationError(ValidationKind::NonPsd, "sigma is not positive semidefinite");
    } else {
        for (int r = 0; r < dim; ++r) sig(r, r) = 1.0 / dim;
    }

    const auto labels = example_labels(d);
    const double prior = 1.0 / static_cast<double>(labels.size());
    std::vector<std::pair<double, CMat>> items;
    items.reserve(labels.size());
    for (const auto& label : labels) {
        const auto v = psi_state(label, d);
        CMat rho = CMat::outer(v, v);
        rho *= lambda;
        CMat mixed = sig;
        mixed *= (1.0 - lambda);
        rho += mixed;
        items.emplace_back(prior, std::move(rho));
    }
    return StateEnsemble::create(d, d, std::move(items));
}

Povm example_global_povm(int d) {
    const auto labels = example_labels(d);
    std::vector<CMat> elems;
    elems.reserve(labels.size());
    for (const auto& label : labels) {
        const auto v = psi_state(label, d);
        CMat proj = CMat::outer(v, v);
        if (label.k <= 2) proj *= 1.0 / (d - 1);
        elems.push_back(std::move(proj));
    }
    return Povm::create(d, d, std::move(elems));
}

Povm example_local_povm(int d) {
    const auto labels = example_labels(d);
    std::vector<CMat> elems;
    elems.reserve(labels.size());
    const int dim = d * d;
    for (const auto& [i, j, k] : labels) {
        std::vector<Complex> v(static_cast<size_t>(dim), Complex(0.0, 0.0));
        double weight = 1.0;
        switch (k) {
            case 1: v[static_cast<size_t>(i) * d + i] = 1.0; weight = 1.0 / (d - 1); break;
            case 2: v[static_cast<size_t>(j) * d + j] = 1.0; weight = 1.0 / (d - 1); break;
            case 3: v[static_cast<size_t>(i) * d + j] = 1.0; break;
            case 4: v[static_cast<size_t>(j) * d + i] = 1.0; break;
        }
        CMat proj = CMat::outer(v, v);
        proj *= weight;
        elems.push_back(std::move(proj));
    }
    return Povm::create(d, d, std::move(elems));
}

ClosedForms example_closed_forms(int d, double lambda) {
    if (d < 2)
        throw ValidationError(ValidationKind::BadArgument, "family needs d >= 2");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw ValidationError(ValidationKind::BadArgument,
                              "lambda must lie in (0, 1], got " + std::to_string(lambda));
    const double dd = d;
    ClosedForms f;
    f.p_g = (1.0 + lambda * (dd * dd - 1.0)) / (2.0 * dd * (dd - 1.0));
    f.q_g = (2.0 + lambda * (dd * dd - 2.0)) / (4.0 * dd * (dd - 1.0));
    f.gap = lambda * dd / (4.0 * (dd - 1.0));
    return f;
}

}  // namespace qsd
