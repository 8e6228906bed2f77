#include "qcrypt/discrim.hpp"

#include <cmath>
#include <stdexcept>

namespace qcrypt::discrim {

Ensemble::Ensemble(FiniteDistribution p, std::vector<DensityOperator> s)
    : priors(std::move(p)), states(std::move(s)) {
    if (states.empty() || priors.size() != static_cast<int>(states.size()))
        throw std::invalid_argument("Ensemble: prior/state count mismatch");
    for (const auto& st : states)
        if (st.dim() != states.front().dim())
            throw std::invalid_argument("Ensemble: state dimensions differ");
}

double guess_probability(const Ensemble& ensemble, const PovmSet& povm) {
    if (povm.size() != ensemble.size())
        throw std::invalid_argument("guess_probability: POVM outcome count mismatch");
    if (povm.dim() != ensemble.dim())
        throw std::invalid_argument("guess_probability: dimension mismatch");
    double p = 0.0;
    for (int i = 0; i < ensemble.size(); ++i)
        p += ensemble.priors.prob(i) *
             (povm.element(i) * ensemble.states[i].matrix()).trace().real();
    return p;
}

HelstromResult helstrom(const Ensemble& ensemble) {
    if (ensemble.size() != 2)
        throw std::invalid_argument("helstrom: ensemble must have exactly two states");
    Matrix delta = ensemble.priors.prob(0) * ensemble.states[0].matrix() -
                   ensemble.priors.prob(1) * ensemble.states[1].matrix();
    HermEig eig = herm_eig(delta);
    const int d = ensemble.dim();
    Matrix p0 = Matrix::Zero(d, d);
    double abs_sum = 0.0;
    for (int i = 0; i < d; ++i) {
        abs_sum += std::abs(eig.eigenvalues(i));
        if (eig.eigenvalues(i) > 0.0)
            p0 += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
    }
    Matrix p1 = Matrix::Identity(d, d) - p0;
    double value = 0.5 * (1.0 + abs_sum);
    return {value, PovmSet({std::move(p0), std::move(p1)})};
}

PovmSet square_root_measurement(const Ensemble& ensemble) {
    const int d = ensemble.dim();
    Matrix s = Matrix::Zero(d, d);
    for (int i = 0; i < ensemble.size(); ++i)
        s += ensemble.priors.prob(i) * ensemble.states[i].matrix();
    Matrix w = psd_inv_sqrt(s);

    std::vector<Matrix> elems;
    Matrix acc = Matrix::Zero(d, d);
    for (int i = 0; i < ensemble.size(); ++i) {
        Matrix e = w * (ensemble.priors.prob(i) * ensemble.states[i].matrix()) * w;
        e = (e + e.adjoint().eval()) / 2.0;
        acc += e;
        elems.push_back(std::move(e));
    }
    // acc is the projector onto supp(S); element 0 absorbs the complement.
    elems[0] += Matrix::Identity(d, d) - acc;
    elems[0] = (elems[0] + elems[0].adjoint().eval()) / 2.0;
    return PovmSet(std::move(elems));
}

OptimalityReport check_optimality(const Ensemble& ensemble, const PovmSet& povm, double tol) {
    if (povm.size() != ensemble.size())
        throw std::invalid_argument("check_optimality: POVM outcome count mismatch");
    if (povm.dim() != ensemble.dim())
        throw std::invalid_argument("check_optimality: dimension mismatch");

    const int n = ensemble.size();
    const int d = ensemble.dim();
    std::vector<Matrix> weighted(n);
    for (int i = 0; i < n; ++i)
        weighted[i] = ensemble.priors.prob(i) * ensemble.states[i].matrix();

    double violation = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            if (j == l) continue;
            Matrix m = povm.element(j) * (weighted[j] - weighted[l]) * povm.element(l);
            violation = std::max(violation, m.cwiseAbs().maxCoeff());
        }

    Matrix gamma = Matrix::Zero(d, d);
    for (int j = 0; j < n; ++j) gamma += povm.element(j) * weighted[j];
    // gamma is Hermitian at an optimum; any asymmetry counts as violation.
    violation = std::max(violation, (gamma - gamma.adjoint().eval()).cwiseAbs().maxCoeff());
    Matrix gamma_h = (gamma + gamma.adjoint().eval()) / 2.0;
    for (int l = 0; l < n; ++l) {
        double lmin = min_eigenvalue(gamma_h - weighted[l]);
        if (lmin < 0) violation = std::max(violation, -lmin);
    }
    return {violation <= tol, violation};
}

}  // namespace qcrypt::discrim
