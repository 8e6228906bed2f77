#pragma once

#include "qcrypt/qmath.hpp"
#include "qcrypt/rng.hpp"

namespace qcrypt {

inline Vector random_complex_vector(int dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v;
}

inline PureState random_pure_state(int dim, Rng& rng) {
    Vector v = random_complex_vector(dim, rng);
    return PureState(v / v.norm());
}

// Ginibre construction: G G^dag normalized.
inline DensityOperator random_density(int dim, Rng& rng, int rank = 0) {
    if (rank <= 0) rank = dim;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    m = (m + m.adjoint().eval()) / 2.0;
    return DensityOperator(std::move(m));
}

inline UnitaryOp random_unitary(int dim, Rng& rng) {
    Matrix g(dim, dim);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return UnitaryOp(std::move(q));
}

// Random PSD pieces A_i pushed through S^{-1/2} so they sum to identity.
inline PovmSet random_povm(int dim, int n_outcomes, Rng& rng) {
    std::vector<Matrix> raw;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix sum = Matrix::Zero(dim, dim);
    for (int k = 0; k < n_outcomes; ++k) {
        Matrix g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
        Matrix a = g * g.adjoint();
        sum += a;
        raw.push_back(std::move(a));
    }
    Matrix whiten = psd_inv_sqrt(sum, 1e-14);
    std::vector<Matrix> elems;
    Matrix acc = Matrix::Zero(dim, dim);
    for (int k = 0; k < n_outcomes; ++k) {
        Matrix e = whiten * raw[k] * whiten;
        e = (e + e.adjoint().eval()) / 2.0;
        if (k + 1 < n_outcomes) {
            acc += e;
            elems.push_back(std::move(e));
        } else {
            // close the set exactly against roundoff
            Matrix last = Matrix::Identity(dim, dim) - acc;
            elems.push_back((last + last.adjoint().eval()) / 2.0);
        }
    }
    return PovmSet(std::move(elems));
}

inline FiniteDistribution random_distribution(int n, Rng& rng) {
    RealVector p(n);
    for (int i = 0; i < n; ++i) p(i) = -std::log(std::max(uniform01(rng), 1e-300));
    p /= p.sum();
    // exact renormalization to survive the 1e-12 sum check
    p(n - 1) += 1.0 - p.sum();
    if (p(n - 1) < 0) p(n - 1) = 0;
    p /= p.sum();
    return FiniteDistribution::indexed(std::move(p));
}

}  // namespace qcrypt
