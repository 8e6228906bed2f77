#include "qcrypt/relnet.hpp"

#include "qcrypt/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qcrypt::relnet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

constexpr double kLightTol = 1e-9;

}  // namespace

bool verify_independence(const SpacetimeEvent& a, const SpacetimeEvent& b) {
    return std::abs(a.site - b.site) > std::abs(a.time - b.time);
}

TimedMessage::TimedMessage(std::string from, std::string to, std::vector<uint8_t> data,
                           SpacetimeEvent emit, SpacetimeEvent recv)
    : sender(std::move(from)),
      receiver(std::move(to)),
      payload(std::move(data)),
      emitted(emit),
      received(recv) {
    require(std::isfinite(emit.site) && std::isfinite(emit.time) && std::isfinite(recv.site) &&
                std::isfinite(recv.time),
            "TimedMessage: non-finite event");
    require(std::abs(received.site - emitted.site) <= received.time - emitted.time + kLightTol,
            "TimedMessage: faster-than-light delivery");
}

SiteLayout::SiteLayout(std::vector<double> pos) : positions(std::move(pos)) {
    require(positions.size() >= 2, "SiteLayout: need at least two sites");
    separation = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < positions.size(); ++i)
        for (size_t j = i + 1; j < positions.size(); ++j)
            separation = std::min(separation, std::abs(positions[i] - positions[j]));
    require(separation > 0.0, "SiteLayout: coincident sites");
}

std::string payload_digest(const std::vector<uint8_t>& payload) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (uint8_t b : payload) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void EventLog::record_message(const TimedMessage& m, const std::string& kind) {
    std::string digest = payload_digest(m.payload);
    events_.push_back({m.emitted.time, m.emitted.site, m.sender, "send:" + kind, digest});
    events_.push_back({m.received.time, m.received.site, m.receiver, "recv:" + kind, digest});
}

std::string EventLog::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const TraceEvent& e : events_) {
        arr.push_back({{"t", e.t},
                       {"site", e.site},
                       {"agent", e.agent},
                       {"kind", e.kind},
                       {"payload-digest", e.payload_digest}});
    }
    return arr.dump();
}

namespace {

std::vector<uint8_t> bytes_of(uint64_t v) {
    std::vector<uint8_t> out(8);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(v >> (8 * i));
    return out;
}

// Light-speed delivery; co-sited agents hand over instantly.
TimedMessage send_at(EventLog* log, const std::string& from, double from_site,
                     const std::string& to, double to_site, double t_emit, uint64_t payload,
                     const std::string& kind) {
    double travel = std::abs(to_site - from_site);
    TimedMessage m(from, to, bytes_of(payload), {from_site, t_emit}, {to_site, t_emit + travel});
    if (log) log->record_message(m, kind);
    return m;
}

}  // namespace

// --- relativistic coin toss -------------------------------------------------------

cointoss::TossReport run_rel_coin_toss(const RelCtStrategy& alice, const RelCtStrategy& bob,
                                       const SiteLayout& layout, long trials, uint64_t seed,
                                       EventLog* log) {
    const double x1 = layout.positions[0];
    const double x2 = layout.positions[1];
    const double d = std::abs(x1 - x2);
    const double t0 = 0.0;

    long counts[3] = {0, 0, 0};
    for (long trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(seed, static_cast<uint64_t>(trial));
        EventLog* trace = trial == 0 ? log : nullptr;

        int a_bit = alice.kind == RelCtStrategy::Kind::Honest ? uniform_bit(rng) : alice.bit;
        int b_bit = bob.kind == RelCtStrategy::Kind::Honest ? uniform_bit(rng) : bob.bit;
        double a_emit = t0, b_emit = t0;
        if (alice.kind == RelCtStrategy::Kind::WaitForOther) {
            a_emit = t0 + d;  // Bob's bit cannot reach site 1 before then
            a_bit = b_bit;
        }
        if (bob.kind == RelCtStrategy::Kind::WaitForOther) {
            b_emit = t0 + d;
            b_bit = a_bit;
        }

        // Alice's bit goes A1 -> B1 at site 1; Bob's goes B2 -> A2 at site 2.
        TimedMessage ma = send_at(trace, "A1", x1, "B1", x1, a_emit,
                                  static_cast<uint64_t>(a_bit), "bit");
        TimedMessage mb = send_at(trace, "B2", x2, "A2", x2, b_emit,
                                  static_cast<uint64_t>(b_bit), "bit");

        bool deadline_ok = ma.received.time < t0 + d - kLightTol &&
                           mb.received.time < t0 + d - kLightTol;
        bool independent = verify_independence(ma.emitted, mb.emitted);
        if (!deadline_ok || !independent) {
            ++counts[2];
            continue;
        }
        // afterwards the co-party agents pool their data at light speed
        send_at(trace, "B1", x1, "B2", x2, ma.received.time, static_cast<uint64_t>(a_bit),
                "relay");
        send_at(trace, "A2", x2, "A1", x1, mb.received.time, static_cast<uint64_t>(b_bit),
                "relay");
        ++counts[(a_bit ^ b_bit) & 1];
    }

    cointoss::TossReport report;
    report.trials = trials;
    report.p_zero = static_cast<double>(counts[0]) / trials;
    report.p_one = static_cast<double>(counts[1]) / trials;
    report.p_abort = static_cast<double>(counts[2]) / trials;
    return report;
}

// --- die roll ------------------------------------------------------------------------

DieRollReport run_die_roll(const FiniteDistribution& faces, int N, const DieStrategy& alice,
                           const DieStrategy& bob, const SiteLayout& layout, long trials,
                           uint64_t seed, bool allow_rounding, EventLog* log) {
    const int n_faces = faces.size();
    require(N >= 1, "run_die_roll: N >= 1");
    std::vector<long> composition(n_faces);
    long total = 0;
    for (int i = 0; i < n_faces; ++i) {
        double exact = faces.prob(i) * N;
        long c = std::lround(exact);
        if (!allow_rounding)
            require(std::abs(exact - c) <= 1e-9, "run_die_roll: N p_i not integral");
        composition[i] = c;
        total += c;
    }
    while (total < N) {
        ++composition[std::max_element(composition.begin(), composition.end()) -
                      composition.begin()];
        ++total;
    }
    while (total > N) {
        --composition[std::max_element(composition.begin(), composition.end()) -
                      composition.begin()];
        --total;
    }

    const double x1 = layout.positions[0];
    const double x2 = layout.positions[1];
    const double d = std::abs(x1 - x2);
    const double t0 = 0.0;

    DieRollReport report;
    report.face_counts.assign(n_faces, 0);
    report.trials = trials;

    for (long trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(seed, static_cast<uint64_t>(trial));
        EventLog* trace = trial == 0 ? log : nullptr;

        std::vector<uint8_t> x;
        for (int i = 0; i < n_faces; ++i)
            x.insert(x.end(), composition[i], static_cast<uint8_t>(i));
        std::shuffle(x.begin(), x.end(), rng);
        if (alice.kind == DieStrategy::Kind::Miscompose && n_faces >= 2)
            x[0] = x[0] == 0 ? 1 : 0;  // one entry substituted

        double j_emit = bob.kind == DieStrategy::Kind::WaitForString ? t0 + d : t0;
        int j = uniform_int(rng, 0, N - 1);

        TimedMessage mx("A1", "B1", x, {x1, t0}, {x1, t0});
        if (trace) trace->record_message(mx, "die-string");
        TimedMessage mj = send_at(trace, "B2", x2, "A2", x2, j_emit, static_cast<uint64_t>(j),
                                  "die-index");

        if (!(mx.received.time < t0 + d - kLightTol && mj.received.time < t0 + d - kLightTol) ||
            !verify_independence(mx.emitted, mj.emitted)) {
            ++report.aborts;
            continue;
        }
        send_at(trace, "B1", x1, "B2", x2, mx.received.time, 0, "relay");
        std::vector<long> seen(n_faces, 0);
        for (uint8_t v : x) ++seen[v];
        if (seen != composition) {
            ++report.aborts;
            continue;
        }
        ++report.face_counts[x[j]];
    }
    return report;
}

// --- sustained bit commitment ----------------------------------------------------------

namespace {

struct RbcSlot {
    long n0 = 0, n1 = 0;  // verifier's random non-equal pair
    long m = 0;           // committer's blind
    int bit = 0;          // committed digit
    long sum = 0;         // n_{digit} + m mod N
};

struct RbcTranscript {
    int p = 0;
    long modulus = 0;
    int bit = 0;
    std::vector<std::vector<RbcSlot>> levels;
    SpacetimeEvent last_pair_receipt;
    SpacetimeEvent unveil_emission;
};

RbcTranscript rbc1_transcript(int bit, int p, int sustain_rounds, Rng& rng, EventLog* log) {
    RbcTranscript tr;
    tr.p = p;
    tr.modulus = 1L << p;
    tr.bit = bit & 1;
    const double sites[2] = {0.0, 1.0};

    auto fill_slot = [&](RbcSlot& slot, int digit) {
        slot.n0 = uniform_int(rng, 0, static_cast<int>(tr.modulus - 1));
        do {
            slot.n1 = uniform_int(rng, 0, static_cast<int>(tr.modulus - 1));
        } while (slot.n1 == slot.n0);
        slot.bit = digit;
        slot.m = uniform_int(rng, 0, static_cast<int>(tr.modulus - 1));
        slot.sum = ((digit == 0 ? slot.n0 : slot.n1) + slot.m) % tr.modulus;
    };

    std::vector<RbcSlot> level0(1);
    fill_slot(level0[0], tr.bit);
    tr.levels.push_back(std::move(level0));

    for (int r = 1; r <= sustain_rounds; ++r) {
        const std::vector<RbcSlot>& prev = tr.levels.back();
        std::vector<RbcSlot> cur;
        cur.reserve(prev.size() * static_cast<size_t>(p));
        for (const RbcSlot& parent : prev) {
            for (int k = 0; k < p; ++k) {  // binary form, most significant digit first
                RbcSlot slot;
                fill_slot(slot, static_cast<int>((parent.m >> (p - 1 - k)) & 1));
                cur.push_back(slot);
            }
        }
        tr.levels.push_back(std::move(cur));
    }

    // level r plays out at the alternating site at time 3r; the unveiling
    // leaves the opposite site half a light-crossing later
    const int last = static_cast<int>(tr.levels.size()) - 1;
    tr.last_pair_receipt = {sites[last % 2], 3.0 * last};
    tr.unveil_emission = {sites[(last + 1) % 2], 3.0 * last + 0.5};

    if (log) {
        for (size_t r = 0; r < tr.levels.size(); ++r) {
            double site = sites[r % 2];
            const char* committer = (r % 2) == 0 ? "A1" : "A2";
            const char* verifier = (r % 2) == 0 ? "B1" : "B2";
            for (const RbcSlot& slot : tr.levels[r]) {
                log->record_message(
                    TimedMessage(verifier, committer,
                                 bytes_of((static_cast<uint64_t>(slot.n0) << 32) |
                                          static_cast<uint64_t>(slot.n1)),
                                 {site, 3.0 * r}, {site, 3.0 * r}),
                    "pair");
                log->record_message(TimedMessage(committer, verifier,
                                                 bytes_of(static_cast<uint64_t>(slot.sum)),
                                                 {site, 3.0 * r + 0.1}, {site, 3.0 * r + 0.1}),
                                    "sum");
            }
        }
    }
    return tr;
}

}  // namespace

RbcOutcome run_rbc1(int bit, int p, int sustain_rounds, const RbcAdversary& adversary,
                    uint64_t seed, EventLog* log) {
    require(p >= 2, "run_rbc1: p >= 2 required");
    require(sustain_rounds >= 0, "run_rbc1: sustain_rounds >= 0");
    Rng rng = make_rng(seed);
    RbcTranscript tr = rbc1_transcript(bit, p, sustain_rounds, rng, log);
    const long N = tr.modulus;

    if (adversary.kind == RbcAdversary::Kind::AliceGarbles) {
        int round = adversary.garble_round;
        require(round >= 0 && round < static_cast<int>(tr.levels.size()),
                "run_rbc1: garble round out of range");
        RbcSlot& victim = tr.levels[round][0];
        // worst-case garble: a sum that decodes against neither pair value
        for (long off = 1; off < N; ++off) {
            long candidate = (victim.sum + off) % N;
            long back = ((candidate - victim.m) % N + N) % N;
            if (back != victim.n0 && back != victim.n1) {
                victim.sum = candidate;
                break;
            }
        }
    }

    // unveiling: the final level's blinds
    std::vector<long> unveil;
    for (const RbcSlot& slot : tr.levels.back()) unveil.push_back(slot.m);
    if (adversary.kind == RbcAdversary::Kind::AliceFlips) {
        // Flipping a digit needs m + (n_a - n_a') for the final-round pairs,
        // which sit outside the light cone of the unveil emission.  The model
        // gives adversaries only their causal view, so the best available
        // forgery perturbs the blinds uninformed.
        for (long& v : unveil) v = (v + 1) % N;
    }

    if (!verify_independence(tr.unveil_emission, tr.last_pair_receipt)) return RbcOutcome::Aborted;
    if (log)
        log->record_message(TimedMessage("A1", "B1", bytes_of(unveil.size()), tr.unveil_emission,
                                         tr.unveil_emission),
                            "unveil");

    // verifier replay from the last level down to the root
    std::vector<long> claimed = unveil;
    for (int r = static_cast<int>(tr.levels.size()) - 1; r >= 1; --r) {
        const std::vector<RbcSlot>& level = tr.levels[r];
        if (claimed.size() != level.size()) return RbcOutcome::Rejected;
        std::vector<long> parents(tr.levels[r - 1].size(), 0);
        for (size_t s = 0; s < level.size(); ++s) {
            long back = ((level[s].sum - claimed[s]) % N + N) % N;
            int digit;
            if (back == level[s].n0)
                digit = 0;
            else if (back == level[s].n1)
                digit = 1;
            else
                return RbcOutcome::Rejected;
            size_t parent = s / static_cast<size_t>(p);
            int position = static_cast<int>(s % static_cast<size_t>(p));
            parents[parent] |= static_cast<long>(digit) << (p - 1 - position);
        }
        claimed = std::move(parents);
    }
    if (claimed.size() != 1) return RbcOutcome::Rejected;
    long back = ((tr.levels[0][0].sum - claimed[0]) % N + N) % N;
    if (back == tr.levels[0][0].n0) return RbcOutcome::Unveiled0;
    if (back == tr.levels[0][0].n1) return RbcOutcome::Unveiled1;
    return RbcOutcome::Rejected;
}

RbcBindingSearch rbc1_binding_search(int p, uint64_t seed) {
    require(p >= 2 && p <= 6, "rbc1_binding_search: p in [2,6]");
    Rng rng = make_rng(seed);
    RbcBindingSearch result;
    const long N = 1L << p;

    for (int bit = 0; bit < 2; ++bit) {
        RbcTranscript tr = rbc1_transcript(bit, p, 1, rng, nullptr);
        const RbcSlot& root = tr.levels[0][0];
        const std::vector<RbcSlot>& last = tr.levels[1];
        if (!verify_independence(tr.unveil_emission, tr.last_pair_receipt))
            throw std::logic_error("rbc1_binding_search: schedule not spacelike");

        for (long claim = 0; claim < N; ++claim) {  // every candidate root blind
            ++result.candidates_tested;
            long back = ((root.sum - claim) % N + N) % N;
            bool flips = back == (bit == 0 ? root.n1 : root.n0);
            if (!flips) continue;

            // the unique unveil message supporting this claim
            bool constructible = true;  // from Alice's causal view
            bool accepted = true;
            for (int k = 0; k < p; ++k) {
                int digit = static_cast<int>((claim >> (p - 1 - k)) & 1);
                long needed =
                    ((last[k].sum - (digit == 0 ? last[k].n0 : last[k].n1)) % N + N) % N;
                // any blind other than the true one encodes the pair
                // difference, which is spacelike-separated from the unveiling
                if (needed != last[k].m) constructible = false;
                long check = ((last[k].sum - needed) % N + N) % N;
                if (check != last[k].n0 && check != last[k].n1) accepted = false;
            }
            if (accepted) ++result.accepted_flips_omniscient;
            if (accepted && constructible) ++result.accepted_flips_within_view;
        }
    }
    return result;
}

bool rbc1_concealing_exact(int p, uint64_t seed) {
    require(p >= 2 && p <= 6, "rbc1_concealing_exact: p in [2,6]");
    Rng rng = make_rng(seed);
    const long N = 1L << p;
    // per slot: over all blinds, the sum histogram is exactly uniform and
    // identical for both digits
    for (int rep = 0; rep < 32; ++rep) {
        long n0 = uniform_int(rng, 0, static_cast<int>(N - 1));
        long n1;
        do {
            n1 = uniform_int(rng, 0, static_cast<int>(N - 1));
        } while (n1 == n0);
        std::vector<long> h0(N, 0), h1(N, 0);
        for (long m = 0; m < N; ++m) {
            ++h0[(n0 + m) % N];
            ++h1[(n1 + m) % N];
        }
        for (long v = 0; v < N; ++v)
            if (h0[v] != 1 || h1[v] != 1) return false;
    }
    return true;
}

// --- VBCT1 -------------------------------------------------------------------------------

// |+> weight of a state shifted delta away from both legitimate overlaps;
// shifts upward, or downward when p_max + delta would exceed one.
double vbct1_tampered_weight(double theta, double delta) {
    double p_max = 0.5 * (1.0 + std::sin(theta));
    double p_min = 1.0 - p_max;
    if (p_max + delta <= 1.0) return p_max + delta;
    double down = p_max - delta;
    require(down >= p_min + delta, "vbct1_tampered_weight: delta out of range");
    return down;
}

double vbct1_tampered_pass_prob(double theta, double delta) {
    double p_max = 0.5 * (1.0 + std::sin(theta));
    double p_min = 1.0 - p_max;
    double w = vbct1_tampered_weight(theta, delta);
    double pass0 = std::pow(std::sqrt(p_max * w) + std::sqrt(p_min * (1.0 - w)), 2.0);
    double pass1 = std::pow(std::sqrt(p_min * w) + std::sqrt(p_max * (1.0 - w)), 2.0);
    return std::max(pass0, pass1);
}

Vbct1Report run_vbct1(const Vbct1Config& config, const Vbct1Adversary& adversary, EventLog* log) {
    require(config.theta > 0.0 && config.theta <= std::acos(0.0) + 1e-12,
            "run_vbct1: theta in (0, pi/2]");
    require(config.poisson_mean >= 1.0, "run_vbct1: poisson mean >= 1");
    const double p_max = 0.5 * (1.0 + std::sin(config.theta));
    const double tamper_pass = adversary.kind == Vbct1Adversary::Kind::Biased
                                   ? vbct1_tampered_pass_prob(config.theta, adversary.delta)
                                   : 1.0;

    Vbct1Report out;
    long counts[3] = {0, 0, 0};
    long undetected_cheats = 0;

    for (long trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, static_cast<uint64_t>(trial));
        EventLog* trace = trial == 0 ? log : nullptr;

        std::poisson_distribution<int> poisson(config.poisson_mean);
        int n = 0;
        while (n < 1) n = poisson(rng);

        int wish = config.bob_wish >= 0 ? config.bob_wish : uniform_bit(rng);

        std::vector<int> sent_bits(n);
        std::vector<bool> tampered(n, false);
        for (int i = 0; i < n; ++i) {
            sent_bits[i] = uniform_bit(rng);
            if (adversary.kind == Vbct1Adversary::Kind::Biased)
                tampered[i] = uniform01(rng) < adversary.gamma;
        }

        if (trace) {
            // qubit legs and their classical identities ride spacelike-separated
            for (int i = 0; i < std::min(n, 3); ++i) {
                double t = 2.0 * i;
                TimedMessage q("A1", "B1", bytes_of(static_cast<uint64_t>(i)), {0.0, t},
                               {0.0, t});
                trace->record_message(q, "qubit");
                TimedMessage id("A2", "B2", bytes_of(static_cast<uint64_t>(sent_bits[i])),
                                {1.0, t}, {1.0, t});
                trace->record_message(id, "identity");
                if (!verify_independence(q.emitted, id.emitted))
                    throw std::logic_error("run_vbct1: schedule not spacelike");
            }
        }

        double plus_weight = tampered[n - 1]
                                 ? vbct1_tampered_weight(config.theta, adversary.delta)
                                 : (sent_bits[n - 1] == 0 ? p_max : 1.0 - p_max);
        int guess = uniform01(rng) < plus_weight ? 0 : 1;
        int b = wish == 0 ? guess : 1 - guess;
        int a = sent_bits[n - 1];
        int c = a ^ b;

        // stored states are later verified against the declared identities
        bool caught = false;
        for (int i = 0; i < n && !caught; ++i) {
            if (i == n - 1 || !tampered[i]) continue;
            if (uniform01(rng) >= tamper_pass) caught = true;
        }
        if (caught) {
            ++counts[2];
            continue;
        }
        if (adversary.kind == Vbct1Adversary::Kind::Biased && tampered[n - 1])
            ++undetected_cheats;
        ++counts[c];
        ++out.counts[wish][a][b];
    }

    out.toss.trials = config.trials;
    out.toss.p_zero = static_cast<double>(counts[0]) / config.trials;
    out.toss.p_one = static_cast<double>(counts[1]) / config.trials;
    out.toss.p_abort = static_cast<double>(counts[2]) / config.trials;
    out.toss.detection_prob = out.toss.p_abort;
    out.undetected_cheat_rate = static_cast<double>(undetected_cheats) / config.trials;
    out.cheat_bound = adversary.kind == Vbct1Adversary::Kind::Biased
                          ? adversary.gamma * std::pow(1.0 - adversary.delta * adversary.delta,
                                                       adversary.gamma * config.poisson_mean)
                          : 0.0;
    return out;
}

// --- VBCT2 -------------------------------------------------------------------------------

Vbct2Report run_vbct2(const Vbct2Config& config, const Vbct2Adversary& adversary, EventLog* log) {
    require(config.alpha0_sq > config.alpha1_sq && config.alpha1_sq > 0.0 &&
                config.alpha0_sq < 1.0,
            "run_vbct2: need 0 < alpha1^2 < alpha0^2 < 1");
    require(config.n_states >= 2 && config.m_exponent >= 1, "run_vbct2: N >= 2, M >= 1");

    const double alpha[2] = {config.alpha0_sq, config.alpha1_sq};
    const double p_trust = std::pow(2.0, -config.m_exponent);
    double overbias_pass = 1.0;
    if (adversary.kind == Vbct2Adversary::Kind::BobOverbias) {
        double w = config.alpha0_sq + adversary.delta;
        require(w < 1.0, "run_vbct2: overbias delta too large");
        overbias_pass = std::pow(std::sqrt(config.alpha0_sq * w) +
                                     std::sqrt((1.0 - config.alpha0_sq) * (1.0 - w)),
                                 2.0);
    }

    Vbct2Report out;
    long counts[3] = {0, 0, 0};
    long detections = 0, exposures = 0, learned = 0;

    for (long trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, static_cast<uint64_t>(trial));
        EventLog* trace = trial == 0 ? log : nullptr;

        auto draw_batch = [&]() {
            std::vector<int> ys(config.n_states);
            bool all_same = true;
            do {
                for (int i = 0; i < config.n_states; ++i) ys[i] = uniform_bit(rng);
                all_same = std::all_of(ys.begin(), ys.end(), [&](int v) { return v == ys[0]; });
            } while (all_same);
            return ys;
        };
        auto pick_wished = [&](const std::vector<int>& ys) {
            int pick = -1, n_match = 0;
            for (int i = 0; i < config.n_states; ++i)
                if (ys[i] == config.bob_wish && uniform_int(rng, 0, n_match++) == 0) pick = i;
            return pick;
        };

        if (adversary.kind == Vbct2Adversary::Kind::AliceSplitZ) {
            // A1 claims trust, A2 claims test: B1 names his chosen state while
            // B2 hands the identities over, so Alice learns the bias; the
            // mismatching claims surface as soon as B1 and B2 compare.
            std::vector<int> ys = draw_batch();
            ++learned;
            ++exposures;
            int pick = pick_wished(ys);
            ++counts[uniform01(rng) < alpha[ys[pick]] ? 0 : 1];
            continue;
        }

        bool caught = false;
        bool tossed = false;
        while (!caught && !tossed) {
            std::vector<int> ys = draw_batch();
            bool alice_tests = uniform01(rng) >= p_trust;  // z = 1
            if (alice_tests) {
                if (trace)
                    trace->record_message(
                        TimedMessage("A1", "B1", {1}, {0.0, 1.0}, {0.0, 1.0}), "z-choice");
                if (adversary.kind == Vbct2Adversary::Kind::BobOverbias) {
                    // each shifted 0-declared state survives the projective
                    // check independently
                    for (int i = 0; i < config.n_states && !caught; ++i)
                        if (ys[i] == 0 && uniform01(rng) >= overbias_pass) caught = true;
                }
                continue;  // batch consumed; the protocol restarts
            }
            int pick = pick_wished(ys);
            double p0 = alpha[ys[pick]];
            if (adversary.kind == Vbct2Adversary::Kind::BobOverbias && ys[pick] == 0)
                p0 = config.alpha0_sq + adversary.delta;
            ++counts[uniform01(rng) < p0 ? 0 : 1];
            tossed = true;
            (void)config.extra_test;  // honest Alice passes the post-toss check
        }
        if (caught) {
            ++counts[2];
            ++detections;
        }
    }

    out.toss.trials = config.trials;
    out.toss.p_zero = static_cast<double>(counts[0]) / config.trials;
    out.toss.p_one = static_cast<double>(counts[1]) / config.trials;
    out.toss.p_abort = static_cast<double>(counts[2]) / config.trials;
    out.detection_rate = static_cast<double>(detections) / config.trials;
    out.exposed_rate = static_cast<double>(exposures) / config.trials;
    out.bias_learned_rate = static_cast<double>(learned) / config.trials;
    return out;
}

Vbct2InfoBound vbct2_alice_info_bound(double alpha0_sq, double alpha1_sq, int N) {
    require(N >= 2 && N <= 9, "vbct2_alice_info_bound: N in [2,9]");
    require(alpha0_sq >= alpha1_sq && alpha1_sq >= 0.0 && alpha0_sq <= 1.0,
            "vbct2_alice_info_bound: need alpha0^2 >= alpha1^2");

    // the reduced states are diagonal, so everything here is as well
    Eigen::Vector2d rho[2] = {{alpha0_sq, 1.0 - alpha0_sq}, {alpha1_sq, 1.0 - alpha1_sq}};
    const int rest = N - 1;
    const long dim = 1L << rest;

    // given the toss state was kind b, the remaining qubits must still
    // contain at least one state of the other kind
    Eigen::VectorXd sigma0 = Eigen::VectorXd::Zero(dim), sigma1 = Eigen::VectorXd::Zero(dim);
    for (long config = 0; config < (1L << rest); ++config) {
        Eigen::VectorXd term = Eigen::VectorXd::Ones(1);
        for (int q = 0; q < rest; ++q) {
            int kind = static_cast<int>((config >> (rest - 1 - q)) & 1);
            Eigen::VectorXd next(term.size() * 2);
            for (long i = 0; i < term.size(); ++i) {
                next(2 * i) = term(i) * rho[kind](0);
                next(2 * i + 1) = term(i) * rho[kind](1);
            }
            term = std::move(next);
        }
        if (config != 0) sigma0 += term;                   // has a 1-kind state
        if (config != (1L << rest) - 1) sigma1 += term;    // has a 0-kind state
    }
    sigma0 /= sigma0.sum();
    sigma1 /= sigma1.sum();

    double d_single = 0.5 * (rho[0] - rho[1]).cwiseAbs().sum();
    double d_full = 0.0;
    for (long i = 0; i < dim; ++i) {
        d_full += std::abs(rho[0](0) * sigma0(i) - rho[1](0) * sigma1(i));
        d_full += std::abs(rho[0](1) * sigma0(i) - rho[1](1) * sigma1(i));
    }
    d_full *= 0.5;
    return {d_full, d_single};
}

}  // namespace qcrypt::relnet
