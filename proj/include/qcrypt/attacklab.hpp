#pragma once

#include "qcrypt/discrim.hpp"
#include "qcrypt/qmath.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qcrypt::attacklab {

// Deterministic two-sided function, outputs(i, j) for Alice's input i and
// Bob's input j, labels counted from 0.
struct DetFunctionTable {
    Eigen::MatrixXi outputs;

    explicit DetFunctionTable(Eigen::MatrixXi m);
    int n_alice() const { return static_cast<int>(outputs.rows()); }
    int n_bob() const { return static_cast<int>(outputs.cols()); }
    int f(int i, int j) const { return outputs(i, j); }
    int alphabet_size() const { return outputs.maxCoeff() + 1; }

    // every line must repeat a value (no line reveals the cross input)
    bool potentially_concealing() const;
    // no two equal rows or columns
    bool non_degenerate() const;
};

// p(i, j) = probability of output 0 given inputs i, j.
struct ProbFunctionTable {
    std::array<std::array<double, 2>, 2> p;

    ProbFunctionTable(double p00, double p10, double p01, double p11);
    double at(int i, int j) const { return p[i][j]; }
};

struct TableTransform {
    std::array<int, 3> alice_perm;   // canonical(i,j) = relabel[f(alice_perm[i], bob_perm[j])]
    std::array<int, 3> bob_perm;
    std::vector<int> output_map;     // original symbol -> canonical symbol (-1 unused)
};

struct CanonicalForm {
    bool valid = false;
    std::optional<DetFunctionTable> canonical;
    std::optional<TableTransform> transform;
    int a = -1;  // canonical second column is (a, b, b)
    int b = -1;
};

// Puts a 3x3 table into the reference form: first column (0,0,1), second
// (a,b,b) with a != b and a = 0 or b = 0 or b = 1; lexicographically smallest
// realization wins.
CanonicalForm validate_and_canonicalize(const DetFunctionTable& f);

enum class Sided { One, Two };

// Alice's reduced state after the black box ran on her (possibly superposed)
// input against Bob's input j.
DensityOperator box_output_state(const DetFunctionTable& f, const Vector& amplitudes, int j);
DensityOperator box_output_state(const ProbFunctionTable& p, const Vector& amplitudes, int j,
                                 Sided sided);

// Output-register state of a one-input box that emits outcome k with
// probability outcome_probs(k, i): sum_k sqrt(p(k|i)) |k>.
PureState one_input_box_state(const Eigen::MatrixXd& outcome_probs, int i);

// Best classical strategy: input honestly, guess from the output.
double honest_best(const DetFunctionTable& f, const FiniteDistribution& prior);
double honest_best(const ProbFunctionTable& p, double eta0);

struct SrmCheatResult {
    double p_srm;
    PovmSet povm;
};

// Superposed input (|0>+|1>+|2>)/sqrt(3), square-root measurement over the
// three j-dependent output states.
SrmCheatResult srm_cheat(const DetFunctionTable& f, const FiniteDistribution& prior);

struct SweepRow {
    std::string canonical_id;
    int a = 0;
    int b = 0;
    std::string free_entries;  // the unconstrained third column
    double p_h = 0.0;
    double p_srm = 0.0;
    double gap = 0.0;
    bool honest_optimal = false;  // reference-measurement optimality (expected false)
};

struct SweepReport {
    std::vector<SweepRow> rows;
    long tables_enumerated = 0;  // raw tables satisfying both conditions
};

// Enumerates all 3x3 tables over alphabets up to max_output_alphabet that are
// potentially concealing and non-degenerate, deduplicated by symmetry class.
SweepReport sweep_3x3(int max_output_alphabet);

// The reference (honest-embedding) operators for the canonical attack states,
// parameterized by the five free weights in [0,1].
PovmSet honest_reference_ops(int a, int b, const std::array<double, 5>& alphas);

// Attack states for the canonical (a,b) with Alice's input (|0>+|1>)/sqrt(2).
std::vector<DensityOperator> canonical_attack_states(int a, int b);

// True when the reference operators fail optimality for every alpha on the
// grid {0, 1/4, 1/2, 3/4, 1}^5.
bool honest_ops_never_optimal(int a, int b, double tol = discrim::kOptimalityTol);

struct HelstromCheatResult {
    double p_c;
    std::array<double, 4> lambdas;  // closed form {l+, l-, m+, m-} (two-sided);
                                    // numeric spectrum entries for one-sided
};

// Optimal guessing of Bob's input; two-sided uses the superposed input and
// the closed-form spectrum, one-sided the better basis input.
HelstromCheatResult helstrom_cheat_2x2(const ProbFunctionTable& p, double eta0, Sided sided);

struct ScanResult {
    bool found = false;
    double eta_star = -1.0;  // first prior with a strict quantum advantage
};

// Default grid: 201 uniform points plus 1 - 1e-2, 1 - 1e-3, 1 - 1e-4.
std::vector<double> default_eta_grid();
ScanResult thm3_scan(const ProbFunctionTable& p, const std::vector<double>& grid);

// Exception classes: one party's input is irrelevant.
bool is_exception_class(const ProbFunctionTable& p);

struct OneSidedCheck {
    bool basis_optimal = false;
    double p_best = 0.0;
};

// Is the computational-basis readout optimal for Alice's input i?
OneSidedCheck one_sided_check(const ProbFunctionTable& p, int i, double eta0);

// --- the OT demonstration ----------------------------------------------------

struct OtDemo {
    double p_honest;   // 3/4
    double p_attack;   // (1 + sqrt(3)/2)/2
    PovmSet attack_povm;
    bool attack_optimal;
    double e0_match;   // max elementwise gap to the published attack element
};

OtDemo ot_demo();

}  // namespace qcrypt::attacklab
