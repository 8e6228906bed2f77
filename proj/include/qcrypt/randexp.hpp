#pragma once

#include "qcrypt/extract.hpp"
#include "qcrypt/qmath.hpp"
#include "qcrypt/rng.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qcrypt::randexp {

// --- the four-constraint test plumbing ------------------------------------

// Two random bits choose which of the four products is measured: 00 tests
// P1P2P3 (demanded -1), the others place the single P on device 2b1+b2-1
// (demanded +1).
std::array<int, 3> ghz_input_map(int b1, int b2);  // 0 = P, 1 = Q per device

// Sign triples with matching parity collapse onto two bits; a triple and its
// global flip share the assignment.
int ghz_output_map(const std::array<int, 3>& signs);  // signs are +/-1

// Expected product for the setting chosen by (b1, b2): -1 for PPP else +1.
int ghz_expected_product(int b1, int b2);

// --- devices -------------------------------------------------------------------

class DeviceTriple {
  public:
    enum class Kind { HonestGhz, ClassicalProgrammed, Replay, Custom };

    static DeviceTriple honest_ghz();
    // one sign per (device, setting): signs[device][0] answers P, [1] answers Q
    static DeviceTriple classical_programmed(const std::array<std::array<int, 2>, 3>& signs);
    // honest on the first feed, replays its memory (with the two-flip
    // randomization) on any further feed
    static DeviceTriple replay();
    static DeviceTriple custom(DensityOperator state, std::vector<Matrix> p_ops,
                               std::vector<Matrix> q_ops);

    Kind kind() const { return kind_; }
    // Each device sees only its own setting; correlations flow through the
    // shared entangled register.
    std::array<int, 3> query(const std::array<int, 3>& settings, Rng& rng);
    void begin_feed();  // marks the start of a (re)run of the input string
    bool replaying() const { return kind_ == Kind::Replay && feed_count_ > 1; }

  private:
    DeviceTriple() = default;

    Kind kind_ = Kind::HonestGhz;
    std::array<std::array<int, 2>, 3> programmed_{};
    std::optional<DensityOperator> state_;
    std::vector<Matrix> p_ops_, q_ops_;
    int feed_count_ = 0;
    long round_ = 0;
    std::vector<std::array<int, 3>> memory_;  // per-round outputs of the first feed
};

// --- protocols ------------------------------------------------------------------

enum class CreditMode { Conjectured, ClassicalThreat };

struct ExpansionConfig {
    double epsilon = 1e-6;       // security parameter
    double zeta = 2.0;           // conjectured fresh min-entropy per passed test
    CreditMode mode = CreditMode::Conjectured;
    uint64_t seed = 0;           // device-side randomness
    long max_tests = 0;          // 0: loop until the test half is depleted
};

struct ExpansionResult {
    bool aborted = false;
    int abort_round = -1;
    extract::BitString output;
    long consumed_bits = 0;  // test-half bits used
    long produced_bits = 0;
    long tests_run = 0;
    std::string credit_mode_label;
};

ExpansionResult run_protocol_a(const extract::BitString& x, DeviceTriple& triple,
                               const ExpansionConfig& config);

// One sub-lab per triple, all fed the same string; any failed test aborts the
// whole run and the outputs concatenate otherwise.
ExpansionResult run_protocol_n(const extract::BitString& x, std::vector<DeviceTriple>& triples,
                               const ExpansionConfig& config);

struct ClassicalAttackAnalysis {
    double max_attacks;       // log(1/eps) / log(4/3)
    double compression_bits;  // 2 (1/log(4/3) + 1) log(1/eps) - 2
};

ClassicalAttackAnalysis classical_attack_analysis(double epsilon);

// Direct test-layer statistics: n single tests with uniform settings.
struct GhzTestStats {
    long tests = 0;
    long failures = 0;
    // outcome histogram (4 two-bit values) per setting choice
    std::array<std::array<long, 4>, 4> outcome_counts{};
};

GhzTestStats ghz_test_statistics(DeviceTriple& triple, long n_tests, uint64_t seed);

// --- nonlocal games ----------------------------------------------------------------

enum class Game { Ghz, Chsh, Prc };

struct BruteForceResult {
    double max_value = 0.0;   // satisfied-constraint count, or the CHSH value
    int total_constraints = 0;
};

// Exhausts every deterministic +/-1 assignment; prc takes k <= 3.
BruteForceResult classical_brute_force(Game game, int k = 1);

struct QuantumGameResult {
    bool passes = true;       // every constraint met with certainty
    double value = 0.0;       // CHSH correlator when applicable
    // per-setting outcome distributions for the three-device test
    std::vector<RealVector> outcome_distributions;
};

QuantumGameResult quantum_values(Game game, int k = 1);

// --- characterization ----------------------------------------------------------------

struct CharacterizationResult {
    bool satisfies = false;
    bool anticommute_ok = false;
    std::vector<double> block_weights;  // present when the structure applies
};

// Checks the four product relations for the given tripartite state and
// +/-1-valued observables, then verifies the support-restricted
// anticommutators and extracts the block weights for party dimension 2d.
CharacterizationResult ghz_characterization_check(const DensityOperator& state,
                                                  const std::vector<Matrix>& p_ops,
                                                  const std::vector<Matrix>& q_ops);

struct TestRates {
    int devices;
    int constraints;
    double nu;  // bits generated per bit consumed
};

TestRates test_rates(int k);

}  // namespace qcrypt::randexp
