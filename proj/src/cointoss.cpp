#include "qcrypt/cointoss.hpp"

#include "qcrypt/discrim.hpp"
#include "qcrypt/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qcrypt::cointoss {

namespace {

const double kInvRoot2 = 1.0 / std::sqrt(2.0);

// phi_{b,x} over a qutrit: (|0> +/- |b+1>)/sqrt(2)
Vector ambainis_state(int b, int x) {
    Vector v = Vector::Zero(3);
    v(0) = kInvRoot2;
    v(b + 1) = (x == 0 ? 1.0 : -1.0) * kInvRoot2;
    return v;
}

DensityOperator ambainis_commit_mixture(int b) {
    Matrix m = Matrix::Zero(3, 3);
    for (int x = 0; x < 2; ++x) {
        Vector v = ambainis_state(b, x);
        m += 0.5 * (v * v.adjoint());
    }
    return DensityOperator(std::move(m));
}

discrim::HelstromResult ambainis_discriminator() {
    discrim::Ensemble e(FiniteDistribution::uniform(2),
                        {ambainis_commit_mixture(0), ambainis_commit_mixture(1)});
    return discrim::helstrom(e);
}

[[noreturn]] void unsupported(const std::string& what) {
    throw std::invalid_argument("unsupported strategy combination: " + what);
}

// Computational-basis measurement of one qubit in an n-qubit register.
struct QubitBranches {
    double p0;
    Vector branch0;  // normalized; zero when the branch has no weight
    Vector branch1;
};

QubitBranches measure_qubit(const Vector& state, int n_qubits, int target) {
    const long dim = 1L << n_qubits;
    Vector b0 = Vector::Zero(dim), b1 = Vector::Zero(dim);
    const long mask = 1L << (n_qubits - 1 - target);
    for (long i = 0; i < dim; ++i) ((i & mask) ? b1 : b0)(i) = state(i);
    double p0 = b0.squaredNorm();
    double p1 = b1.squaredNorm();
    if (p0 > 0) b0 /= std::sqrt(p0);
    if (p1 > 0) b1 /= std::sqrt(p1);
    return {p0, std::move(b0), std::move(b1)};
}

// Probability that qubits (q1,q2) pass a projection onto (|00>+|11>)/sqrt(2).
double bell_projection_prob(const Vector& state, int n_qubits, int q1, int q2) {
    const long dim = 1L << n_qubits;
    const long m1 = 1L << (n_qubits - 1 - q1);
    const long m2 = 1L << (n_qubits - 1 - q2);
    double total = 0.0;
    for (long rest = 0; rest < dim; ++rest) {
        if (rest & (m1 | m2)) continue;  // enumerate with q1 = q2 = 0
        Complex amp = (state(rest) + state(rest | m1 | m2)) * kInvRoot2;
        total += std::norm(amp);
    }
    return total;
}

// Alice's optimal bias-to-b state on registers (A1, B1, A2, B2).
Vector colbeck_cheat_state(int target) {
    Vector v = Vector::Zero(16);
    auto idx = [target](int a1, int b1, int a2, int b2) {
        if (target == 1) {  // relabelled copy for the symmetric cheat
            a1 ^= 1;
            b1 ^= 1;
            a2 ^= 1;
            b2 ^= 1;
        }
        return (a1 << 3) | (b1 << 2) | (a2 << 1) | b2;
    };
    v(idx(0, 0, 0, 0)) = std::sqrt(2.0 / 3.0);
    v(idx(0, 0, 1, 1)) = 1.0 / std::sqrt(6.0);
    v(idx(1, 1, 0, 0)) = 1.0 / std::sqrt(6.0);
    return v;
}

struct ColbeckBranch {
    double p_zero = 0, p_one = 0, p_abort = 0;
};

// Exact outcome distribution against a cheating Alice holding `psi`, given
// Bob chose pair c for the toss.  Registers: A1=0, B1=1, A2=2, B2=3.
ColbeckBranch colbeck_cheat_branch(const Vector& psi, int c) {
    int toss_b = 2 * c + 1;
    int test_a = 2 * (1 - c);
    int test_b = 2 * (1 - c) + 1;
    ColbeckBranch out;
    QubitBranches bob = measure_qubit(psi, 4, toss_b);
    const double p_out[2] = {bob.p0, 1.0 - bob.p0};
    const Vector* branches[2] = {&bob.branch0, &bob.branch1};
    for (int o = 0; o < 2; ++o) {
        if (p_out[o] <= 0) continue;
        double pass = bell_projection_prob(*branches[o], 4, test_a, test_b);
        (o == 0 ? out.p_zero : out.p_one) += p_out[o] * pass;
        out.p_abort += p_out[o] * (1.0 - pass);
    }
    return out;
}

}  // namespace

// --- qutrit protocol ----------------------------------------------------------

TossReport run_ambainis(const PartyStrategy& alice, const PartyStrategy& bob) {
    if (!alice.is_honest()) unsupported("ambainis: only Bob-side cheating is modelled");
    TossReport report;
    if (bob.is_honest()) {
        report.p_zero = report.p_one = 0.5;
        return report;
    }
    // Bob distinguishes the two commitment mixtures optimally, then echoes
    // his guess (target 0) or its flip (target 1); outcome = b xor b'.
    double p_correct = ambainis_discriminator().value;
    report.p_zero = bob.target_bit == 0 ? p_correct : 1.0 - p_correct;
    report.p_one = 1.0 - report.p_zero;
    return report;
}

TossReport run_ambainis(const PartyStrategy& alice, const PartyStrategy& bob,
                        const SampledMode& mode) {
    if (!alice.is_honest()) unsupported("ambainis: only Bob-side cheating is modelled");
    Rng rng = make_rng(mode.seed);
    PovmSet cheat_povm = bob.is_honest() ? PovmSet::computational(3)
                                         : ambainis_discriminator().povm;
    long counts[3] = {0, 0, 0};
    for (long t = 0; t < mode.trials; ++t) {
        int b = uniform_bit(rng);
        int x = uniform_bit(rng);
        int b_prime;
        if (bob.is_honest()) {
            b_prime = uniform_bit(rng);
        } else {
            DensityOperator rho = DensityOperator::pure(PureState(ambainis_state(b, x)));
            auto m = measure_povm(rho, cheat_povm);
            int guess = uniform01(rng) < m.outcome_probs.prob(0) ? 0 : 1;
            b_prime = guess ^ bob.target_bit;
        }
        // Alice reveals (b, x); the verification measurement passes with
        // certainty for an honest Alice, and a cheating Bob never aborts.
        ++counts[b ^ b_prime];
    }
    TossReport report;
    report.trials = mode.trials;
    report.p_zero = static_cast<double>(counts[0]) / mode.trials;
    report.p_one = static_cast<double>(counts[1]) / mode.trials;
    report.p_abort = static_cast<double>(counts[2]) / mode.trials;
    return report;
}

// --- entanglement-sharing protocol ----------------------------------------------

TossReport run_colbeck(const PartyStrategy& alice, const PartyStrategy& bob) {
    if (!alice.is_honest() && !bob.is_honest()) unsupported("both parties cheat");
    TossReport report;
    if (alice.is_honest() && bob.is_honest()) {
        report.p_zero = report.p_one = 0.5;
        return report;
    }
    if (bob.is_honest()) {
        Vector psi = colbeck_cheat_state(alice.target_bit);
        for (int c = 0; c < 2; ++c) {
            ColbeckBranch br = colbeck_cheat_branch(psi, c);
            report.p_zero += 0.5 * br.p_zero;
            report.p_one += 0.5 * br.p_one;
            report.p_abort += 0.5 * br.p_abort;
        }
        report.detection_prob = report.p_abort;
        return report;
    }
    // Bob measures both received halves and announces a pair showing his
    // target; both halves are maximally mixed, so he misses w.p. 1/4.
    double hit = 0.75;
    report.p_zero = bob.target_bit == 0 ? hit : 1.0 - hit;
    report.p_one = 1.0 - report.p_zero;
    return report;
}

TossReport run_colbeck(const PartyStrategy& alice, const PartyStrategy& bob,
                       const SampledMode& mode) {
    if (!alice.is_honest() && !bob.is_honest()) unsupported("both parties cheat");
    Rng rng = make_rng(mode.seed);
    long counts[3] = {0, 0, 0};
    long detections = 0;
    for (long t = 0; t < mode.trials; ++t) {
        if (alice.is_honest() && bob.is_honest()) {
            ++counts[uniform_bit(rng)];  // both halves agree on a uniform bit
            continue;
        }
        if (bob.is_honest()) {
            Vector psi = colbeck_cheat_state(alice.target_bit);
            int c = uniform_bit(rng);
            QubitBranches br = measure_qubit(psi, 4, 2 * c + 1);
            int outcome = uniform01(rng) < br.p0 ? 0 : 1;
            const Vector& post = outcome == 0 ? br.branch0 : br.branch1;
            double pass = bell_projection_prob(post, 4, 2 * (1 - c), 2 * (1 - c) + 1);
            if (uniform01(rng) < pass) {
                ++counts[outcome];
            } else {
                ++counts[2];
                ++detections;
            }
            continue;
        }
        int v1 = uniform_bit(rng);
        int v2 = uniform_bit(rng);
        int outcome = (v1 == bob.target_bit || v2 == bob.target_bit) ? bob.target_bit
                                                                     : 1 - bob.target_bit;
        ++counts[outcome];
    }
    TossReport report;
    report.trials = mode.trials;
    report.p_zero = static_cast<double>(counts[0]) / mode.trials;
    report.p_one = static_cast<double>(counts[1]) / mode.trials;
    report.p_abort = static_cast<double>(counts[2]) / mode.trials;
    report.detection_prob = static_cast<double>(detections) / mode.trials;
    return report;
}

std::vector<BiasRow> bias_report(const std::string& protocol) {
    std::vector<BiasRow> rows;
    auto bias_of = [](const TossReport& r, int target) {
        return (target == 0 ? r.p_zero : r.p_one) - 0.5;
    };
    if (protocol == "ambainis") {
        for (int b = 0; b < 2; ++b) {
            TossReport r = run_ambainis(PartyStrategy::honest(), PartyStrategy::cheat_towards(b));
            rows.push_back({protocol, "bob_cheat_" + std::to_string(b), bias_of(r, b),
                            r.detection_prob});
        }
    } else if (protocol == "colbeck") {
        for (int b = 0; b < 2; ++b) {
            TossReport r = run_colbeck(PartyStrategy::cheat_towards(b), PartyStrategy::honest());
            rows.push_back({protocol, "alice_cheat_" + std::to_string(b), bias_of(r, b),
                            r.detection_prob});
        }
        for (int b = 0; b < 2; ++b) {
            TossReport r = run_colbeck(PartyStrategy::honest(), PartyStrategy::cheat_towards(b));
            rows.push_back({protocol, "bob_cheat_" + std::to_string(b), bias_of(r, b),
                            r.detection_prob});
        }
    } else {
        throw std::invalid_argument("bias_report: unknown protocol " + protocol);
    }
    rows.push_back({protocol, "reference:kitaev_lower_bound", kKitaevBound, 0.0});
    return rows;
}

}  // namespace qcrypt::cointoss
