#pragma once

#include "qcrypt/qmath.hpp"

namespace qcrypt::discrim {

// A prepared-with-prior family of states to be distinguished.
struct Ensemble {
    FiniteDistribution priors;
    std::vector<DensityOperator> states;

    Ensemble(FiniteDistribution p, std::vector<DensityOperator> s);
    int size() const { return priors.size(); }
    int dim() const { return states.front().dim(); }
};

// sum_i eta_i tr(E_i rho_i)
double guess_probability(const Ensemble& ensemble, const PovmSet& povm);

struct HelstromResult {
    double value;  // (1 + tr|eta0 rho0 - eta1 rho1|) / 2
    PovmSet povm;  // projectors onto the +/- support of the weighted difference
};

// Optimal two-state discrimination; zero eigenvalues of the weighted
// difference go to the second projector.
HelstromResult helstrom(const Ensemble& ensemble);

// E_j = S^{-1/2} eta_j rho_j S^{-1/2} with S = sum_j eta_j rho_j, pseudo-
// inverted on the support; the complement projector is folded into E_0.
PovmSet square_root_measurement(const Ensemble& ensemble);

struct OptimalityReport {
    bool optimal;
    double max_violation;
};

inline constexpr double kOptimalityTol = 1e-7;

// Holevo-Yuen-Helstrom conditions: E_j(eta_j rho_j - eta_l rho_l)E_l = 0 for
// all j,l and sum_j E_j eta_j rho_j - eta_l rho_l >= 0 for all l.
OptimalityReport check_optimality(const Ensemble& ensemble, const PovmSet& povm,
                                  double tol = kOptimalityTol);

}  // namespace qcrypt::discrim
