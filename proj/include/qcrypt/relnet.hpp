#pragma once

#include "qcrypt/cointoss.hpp"
#include "qcrypt/qmath.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qcrypt::relnet {

// One spatial dimension, c = 1: light needs |dx| time units to cross dx.
struct SpacetimeEvent {
    double site = 0.0;
    double time = 0.0;
};

// Strictly spacelike separation; lightlike pairs are not independent.
bool verify_independence(const SpacetimeEvent& a, const SpacetimeEvent& b);

struct TimedMessage {
    std::string sender;
    std::string receiver;
    std::vector<uint8_t> payload;
    SpacetimeEvent emitted;
    SpacetimeEvent received;

    // throws if the message would outrun light
    TimedMessage(std::string from, std::string to, std::vector<uint8_t> data,
                 SpacetimeEvent emit, SpacetimeEvent recv);
};

struct SiteLayout {
    std::vector<double> positions;
    double separation = 0.0;  // minimum pairwise distance

    explicit SiteLayout(std::vector<double> pos);
};

struct TraceEvent {
    double t = 0.0;
    double site = 0.0;
    std::string agent;
    std::string kind;
    std::string payload_digest;
};

class EventLog {
  public:
    void record(const TraceEvent& e) { events_.push_back(e); }
    void record_message(const TimedMessage& m, const std::string& kind);
    const std::vector<TraceEvent>& events() const { return events_; }
    std::string to_json() const;
    void clear() { events_.clear(); }

  private:
    std::vector<TraceEvent> events_;
};

std::string payload_digest(const std::vector<uint8_t>& payload);

// --- relativistic coin toss ---------------------------------------------------

struct RelCtStrategy {
    enum class Kind {
        Honest,        // emit a fresh uniform bit at t0
        FixedBit,      // emit a constant at t0
        WaitForOther,  // wait until the other party's bit can have arrived
    };
    Kind kind = Kind::Honest;
    int bit = 0;

    static RelCtStrategy honest() { return {Kind::Honest, 0}; }
    static RelCtStrategy fixed(int b) { return {Kind::FixedBit, b & 1}; }
    static RelCtStrategy wait_for_other() { return {Kind::WaitForOther, 0}; }
};

cointoss::TossReport run_rel_coin_toss(const RelCtStrategy& alice, const RelCtStrategy& bob,
                                       const SiteLayout& layout, long trials, uint64_t seed,
                                       EventLog* log = nullptr);

// --- biased n-faced die roll -----------------------------------------------------

struct DieStrategy {
    enum class Kind { Honest, Miscompose, WaitForString };
    Kind kind = Kind::Honest;

    static DieStrategy honest() { return {Kind::Honest}; }
    static DieStrategy miscompose() { return {Kind::Miscompose}; }       // Alice only
    static DieStrategy wait_for_string() { return {Kind::WaitForString}; }  // Bob only
};

struct DieRollReport {
    std::vector<long> face_counts;
    long aborts = 0;
    long trials = 0;
};

// Requires N*p_i integral unless allow_rounding; composition is checked by Bob.
DieRollReport run_die_roll(const FiniteDistribution& faces, int N, const DieStrategy& alice,
                           const DieStrategy& bob, const SiteLayout& layout, long trials,
                           uint64_t seed, bool allow_rounding = false, EventLog* log = nullptr);

// --- sustained bit commitment ----------------------------------------------------

enum class RbcOutcome { Unveiled0, Unveiled1, Rejected, Aborted };

struct RbcAdversary {
    enum class Kind { None, AliceFlips, AliceGarbles };
    Kind kind = Kind::None;
    int garble_round = 0;

    static RbcAdversary none() { return {Kind::None, 0}; }
    static RbcAdversary alice_flips() { return {Kind::AliceFlips, 0}; }
    static RbcAdversary alice_garbles(int round) { return {Kind::AliceGarbles, round}; }
};

// Modular-sum commitment sustained by committing the binary form of each
// round's blinding values; unveiling reveals the last round's blinds and the
// verifier replays the chain.  All arithmetic mod 2^p.
RbcOutcome run_rbc1(int bit, int p, int sustain_rounds, const RbcAdversary& adversary,
                    uint64_t seed, EventLog* log = nullptr);

struct RbcBindingSearch {
    long candidates_tested = 0;
    // forged unveilings accepted when the forger is granted the final-round
    // pairs (shows the enumeration bites)
    long accepted_flips_omniscient = 0;
    // forged unveilings accepted that are constructible from Alice's causal
    // view, which excludes those pairs
    long accepted_flips_within_view = 0;
};

// Enumerates every candidate first-level claim (all 2^p) over one sustain
// round and classifies the forged unveil message each would require.
RbcBindingSearch rbc1_binding_search(int p, uint64_t seed);

// Exact enumeration: per commitment slot the sum n_{.,a} + m is uniform over
// the modulus and identical for both committed bits.
bool rbc1_concealing_exact(int p, uint64_t seed);

// --- variable bias coin tossing ---------------------------------------------------

struct Vbct1Config {
    double theta = 1.0;        // state overlap angle, (0, pi/2]
    int bob_wish = 0;          // 0, 1, or -1 for uniform per trial
    double poisson_mean = 50;  // toss index distribution, truncated at >= 1
    long trials = 100000;
    uint64_t seed = 0;
};

struct Vbct1Adversary {
    enum class Kind { None, Biased };
    Kind kind = Kind::None;
    double delta = 0.0;  // overlap shift of tampered states
    double gamma = 0.0;  // tampered fraction

    static Vbct1Adversary none() { return {}; }
    static Vbct1Adversary biased(double delta, double gamma) {
        return {Kind::Biased, delta, gamma};
    }
};

struct Vbct1Report {
    cointoss::TossReport toss;
    // counts[w][a][b] over completed runs (c = a xor b)
    long counts[2][2][2] = {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}};
    double undetected_cheat_rate = 0.0;
    double cheat_bound = 0.0;  // gamma (1-delta^2)^(gamma n-bar)
};

Vbct1Report run_vbct1(const Vbct1Config& config, const Vbct1Adversary& adversary,
                      EventLog* log = nullptr);

// |+> weight of a state shifted delta away from both legitimate overlaps.
double vbct1_tampered_weight(double theta, double delta);

// Best verification-pass probability of such a tampered qubit, maximized
// over the declared identity; at most 1 - delta^2.
double vbct1_tampered_pass_prob(double theta, double delta);

struct Vbct2Config {
    double alpha0_sq = 0.9;  // bias of the 0-heavy state, > alpha1_sq
    double alpha1_sq = 0.1;
    int n_states = 4;   // batch size N >= 2
    int m_exponent = 3; // Alice trusts with probability 2^-M
    int bob_wish = 0;
    bool extra_test = true;
    long trials = 10000;
    uint64_t seed = 0;
};

struct Vbct2Adversary {
    enum class Kind { None, BobOverbias, AliceSplitZ };
    Kind kind = Kind::None;
    double delta = 0.0;

    static Vbct2Adversary none() { return {}; }
    static Vbct2Adversary bob_overbias(double delta) { return {Kind::BobOverbias, delta}; }
    static Vbct2Adversary alice_split_z() { return {Kind::AliceSplitZ, 0.0}; }
};

struct Vbct2Report {
    cointoss::TossReport toss;
    double detection_rate = 0.0;   // dishonest batches caught by the z=1 test
    double exposed_rate = 0.0;     // split-z flag raised when agents compare
    double bias_learned_rate = 0.0;
};

Vbct2Report run_vbct2(const Vbct2Config& config, const Vbct2Adversary& adversary,
                      EventLog* log = nullptr);

struct Vbct2InfoBound {
    double d_full;    // distance of the full remaining views
    double d_single;  // distance of the toss qubit alone
};

// Exact mixture construction over the remaining N-1 qubits; 2 <= N <= 9.
Vbct2InfoBound vbct2_alice_info_bound(double alpha0_sq, double alpha1_sq, int N);

}  // namespace qcrypt::relnet
