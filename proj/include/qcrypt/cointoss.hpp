#pragma once

#include "qcrypt/qmath.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcrypt::cointoss {

enum class Outcome { Zero, One, Abort };

struct PartyStrategy {
    enum class Kind { Honest, CheatTowards };
    Kind kind = Kind::Honest;
    int target_bit = 0;

    static PartyStrategy honest() { return {Kind::Honest, 0}; }
    static PartyStrategy cheat_towards(int bit) { return {Kind::CheatTowards, bit & 1}; }
    bool is_honest() const { return kind == Kind::Honest; }
};

struct TossReport {
    double p_zero = 0.0;
    double p_one = 0.0;
    double p_abort = 0.0;
    double detection_prob = 0.0;  // honest party catches the cheat
    long trials = 0;              // 0 means analytic
    bool analytic() const { return trials == 0; }
};

struct SampledMode {
    long trials = 100000;
    uint64_t seed = 0;
};

// Qutrit protocol: Alice commits b inside one of two non-orthogonal state
// pairs, Bob replies b', outcome b xor b'.  Only Bob-side optimal cheating
// is supported; a cheating Bob measures the commitment with the optimal
// two-state discriminator before choosing b'.
TossReport run_ambainis(const PartyStrategy& alice, const PartyStrategy& bob);
TossReport run_ambainis(const PartyStrategy& alice, const PartyStrategy& bob,
                        const SampledMode& mode);

// Entanglement-sharing protocol: two shared pairs, Bob picks the toss pair,
// Alice's unused half is returned and verified.
TossReport run_colbeck(const PartyStrategy& alice, const PartyStrategy& bob);
TossReport run_colbeck(const PartyStrategy& alice, const PartyStrategy& bob,
                       const SampledMode& mode);

struct BiasRow {
    std::string protocol;
    std::string strategy;
    double bias = 0.0;
    double detection = 0.0;
};

// 1/sqrt(2) - 1/2, reported as a reference line only.
inline constexpr double kKitaevBound = 0.20710678118654746;

std::vector<BiasRow> bias_report(const std::string& protocol);  // "ambainis" | "colbeck"

}  // namespace qcrypt::cointoss
