#include "qcrypt/randexp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qcrypt::randexp {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// (|0...0> - |1...1>)/sqrt(2) over n qubits
Vector cat_state(int n) {
    Vector v = Vector::Zero(1L << n);
    v(0) = 1.0 / std::sqrt(2.0);
    v((1L << n) - 1) = -1.0 / std::sqrt(2.0);
    return v;
}

// projector onto the +/- eigenspace of a +/-1 observable
Matrix sign_projector(const Matrix& obs, int sign) {
    const long d = obs.rows();
    return (Matrix::Identity(d, d) + static_cast<double>(sign) * obs) / 2.0;
}

}  // namespace

std::array<int, 3> ghz_input_map(int b1, int b2) {
    require((b1 | b2) >= 0 && b1 <= 1 && b2 <= 1, "ghz_input_map: two bits expected");
    if (b1 == 0 && b2 == 0) return {0, 0, 0};
    std::array<int, 3> settings = {1, 1, 1};
    settings[2 * b1 + b2 - 1] = 0;
    return settings;
}

int ghz_output_map(const std::array<int, 3>& signs) {
    for (int s : signs) require(s == 1 || s == -1, "ghz_output_map: signs must be +/-1");
    int u1 = signs[0] < 0, u2 = signs[1] < 0, u3 = signs[2] < 0;
    return ((u2 ^ u3) << 1) | (u1 ^ u3);
}

int ghz_expected_product(int b1, int b2) { return (b1 == 0 && b2 == 0) ? -1 : 1; }

// --- devices ---------------------------------------------------------------------

DeviceTriple DeviceTriple::honest_ghz() {
    DeviceTriple t;
    t.kind_ = Kind::HonestGhz;
    t.state_ = DensityOperator::pure(PureState(cat_state(3)));
    t.p_ops_ = {pauli_x(), pauli_x(), pauli_x()};
    t.q_ops_ = {pauli_y(), pauli_y(), pauli_y()};
    return t;
}

DeviceTriple DeviceTriple::classical_programmed(const std::array<std::array<int, 2>, 3>& signs) {
    DeviceTriple t;
    t.kind_ = Kind::ClassicalProgrammed;
    for (const auto& device : signs)
        for (int s : device)
            require(s == 1 || s == -1, "classical_programmed: signs must be +/-1");
    t.programmed_ = signs;
    return t;
}

DeviceTriple DeviceTriple::replay() {
    DeviceTriple t = honest_ghz();
    t.kind_ = Kind::Replay;
    return t;
}

DeviceTriple DeviceTriple::custom(DensityOperator state, std::vector<Matrix> p_ops,
                                  std::vector<Matrix> q_ops) {
    require(p_ops.size() == 3 && q_ops.size() == 3, "custom: three devices expected");
    long dim = 1;
    for (int i = 0; i < 3; ++i) {
        require(p_ops[i].rows() == q_ops[i].rows(), "custom: observable dims differ");
        require(is_hermitian(p_ops[i]) && is_hermitian(q_ops[i]),
                "custom: observables must be Hermitian");
        // eigenvalues pinned to +/-1
        for (const Matrix* obs : {&p_ops[i], &q_ops[i]}) {
            Matrix sq = (*obs) * (*obs);
            require((sq - Matrix::Identity(sq.rows(), sq.cols())).cwiseAbs().maxCoeff() <= kTol,
                    "custom: observable eigenvalues must be +/-1");
        }
        dim *= p_ops[i].rows();
    }
    require(dim == state.dim(), "custom: state dimension mismatch");
    DeviceTriple t;
    t.kind_ = Kind::Custom;
    t.state_ = std::move(state);
    t.p_ops_ = std::move(p_ops);
    t.q_ops_ = std::move(q_ops);
    return t;
}

void DeviceTriple::begin_feed() {
    ++feed_count_;
    round_ = 0;
}

std::array<int, 3> DeviceTriple::query(const std::array<int, 3>& settings, Rng& rng) {
    for (int s : settings) require(s == 0 || s == 1, "query: settings must be 0 (P) or 1 (Q)");

    if (kind_ == Kind::ClassicalProgrammed) {
        ++round_;
        return {programmed_[0][settings[0]], programmed_[1][settings[1]],
                programmed_[2][settings[2]]};
    }

    if (kind_ == Kind::Replay && feed_count_ > 1) {
        // recall the first feed; with probability 1/4 replay directly,
        // otherwise flip a pre-agreed pair (the product is untouched)
        require(round_ < static_cast<long>(memory_.size()), "replay: ran past the recording");
        std::array<int, 3> out = memory_[round_++];
        int choice = uniform_int(rng, 0, 3);
        if (choice > 0) {
            int skip = choice - 1;  // the device left alone
            for (int i = 0; i < 3; ++i)
                if (i != skip) out[i] = -out[i];
        }
        return out;
    }

    // quantum triples measure their shared register one device at a time
    std::array<int, 3> out{};
    long dims[3];
    for (int i = 0; i < 3; ++i) dims[i] = p_ops_[i].rows();
    Matrix rho = state_->matrix();
    for (int device = 0; device < 3; ++device) {
        const Matrix& local = settings[device] == 0 ? p_ops_[device] : q_ops_[device];
        long left = 1, right = 1;
        for (int i = 0; i < device; ++i) left *= dims[i];
        for (int i = device + 1; i < 3; ++i) right *= dims[i];
        Matrix plus = kron(Matrix::Identity(left, left),
                           kron(sign_projector(local, 1), Matrix::Identity(right, right)));
        double p_plus = std::clamp((plus * rho).trace().real(), 0.0, 1.0);
        int sign = uniform01(rng) < p_plus ? 1 : -1;
        const Matrix proj = sign == 1
                                ? plus
                                : kron(Matrix::Identity(left, left),
                                       kron(sign_projector(local, -1),
                                            Matrix::Identity(right, right)));
        rho = proj * rho * proj;
        double tr = rho.trace().real();
        if (tr > 0) rho /= tr;
        out[device] = sign;
    }
    if (kind_ == Kind::Replay && feed_count_ <= 1) memory_.push_back(out);
    ++round_;
    return out;
}

// --- protocols ----------------------------------------------------------------------

ClassicalAttackAnalysis classical_attack_analysis(double epsilon) {
    require(epsilon > 0.0 && epsilon < 1.0, "classical_attack_analysis: epsilon in (0,1)");
    double inv_log43 = 1.0 / std::log2(4.0 / 3.0);
    double log1e = std::log2(1.0 / epsilon);
    return {log1e * inv_log43, 2.0 * (inv_log43 + 1.0) * log1e - 2.0};
}

ExpansionResult run_protocol_a(const extract::BitString& x, DeviceTriple& triple,
                               const ExpansionConfig& config) {
    require(x.length() >= 4 && x.length() % 2 == 0, "run_protocol_a: even-length input needed");
    require(config.epsilon > 0.0 && config.epsilon < 1.0, "run_protocol_a: epsilon in (0,1)");
    require(config.zeta >= 0.0, "run_protocol_a: zeta >= 0");

    const int half = x.length() / 2;
    extract::BitString x1 = x.slice(0, half);
    extract::BitString r = x.slice(half, half);

    long budget = half / 2;
    if (config.max_tests > 0) budget = std::min(budget, config.max_tests);

    ExpansionResult result;
    triple.begin_feed();
    Rng rng = make_rng(config.seed, 0x6272ULL);

    extract::BitString raw;
    for (long t = 0; t < budget; ++t) {
        int b1 = x1.bit(2 * t), b2 = x1.bit(2 * t + 1);
        std::array<int, 3> outs = triple.query(ghz_input_map(b1, b2), rng);
        ++result.tests_run;
        result.consumed_bits += 2;
        if (outs[0] * outs[1] * outs[2] != ghz_expected_product(b1, b2)) {
            result.aborted = true;
            result.abort_round = static_cast<int>(t);
            result.produced_bits = 0;
            return result;
        }
        int two_bits = ghz_output_map(outs);
        raw.append(static_cast<uint8_t>((two_bits >> 1) & 1));
        raw.append(static_cast<uint8_t>(two_bits & 1));
    }

    // hash length: conjectured per-test credit, or the classical-threat
    // accounting that treats every attack as revealing two raw bits
    const double margin = 2.0 * std::log2(1.0 / (2.0 * config.epsilon));
    double credit;
    if (triple.replaying()) {
        credit = 0.0;  // a replayed feed carries no fresh private randomness
        result.credit_mode_label = "replayed-feed";
    } else if (config.mode == CreditMode::ClassicalThreat ||
               triple.kind() == DeviceTriple::Kind::ClassicalProgrammed) {
        credit = static_cast<double>(raw.length()) -
                 2.0 * classical_attack_analysis(config.epsilon).max_attacks;
        result.credit_mode_label = "classical-threat";
    } else {
        credit = config.zeta * static_cast<double>(result.tests_run);
        result.credit_mode_label = "conjectured";
    }
    long tau = std::max(0L, static_cast<long>(std::floor(credit - margin)));
    tau = std::min(tau, static_cast<long>(raw.length()));

    if (tau > 0) {
        // Toeplitz seed from R, extended cyclically when n + tau - 1 > |R|
        const int n = raw.length();
        extract::BitString diag;
        for (int i = 0; i < n + static_cast<int>(tau) - 1; ++i)
            diag.append(r.bit(i % r.length()));
        result.output =
            extract::toeplitz_hash(extract::ToeplitzSeed(n, static_cast<int>(tau), diag), raw);
    }
    result.produced_bits = result.output.length();
    return result;
}

ExpansionResult run_protocol_n(const extract::BitString& x, std::vector<DeviceTriple>& triples,
                               const ExpansionConfig& config) {
    require(!triples.empty(), "run_protocol_n: at least one triple");
    ExpansionResult total;
    total.credit_mode_label = "per-lab";
    for (size_t lab = 0; lab < triples.size(); ++lab) {
        ExpansionConfig sub = config;
        sub.seed = substream_seed(config.seed, lab + 1);  // independent device randomness
        ExpansionResult r = run_protocol_a(x, triples[lab], sub);
        total.consumed_bits = std::max(total.consumed_bits, r.consumed_bits);
        total.tests_run += r.tests_run;
        if (r.aborted) {
            total.aborted = true;
            total.abort_round = r.abort_round;
            total.produced_bits = 0;
            total.output = extract::BitString();
            return total;
        }
        for (uint8_t b : r.output.bits()) total.output.append(b);
    }
    total.produced_bits = total.output.length();
    return total;
}

GhzTestStats ghz_test_statistics(DeviceTriple& triple, long n_tests, uint64_t seed) {
    GhzTestStats stats;
    Rng rng = make_rng(seed);
    triple.begin_feed();
    for (long t = 0; t < n_tests; ++t) {
        int b1 = uniform_bit(rng), b2 = uniform_bit(rng);
        std::array<int, 3> outs = triple.query(ghz_input_map(b1, b2), rng);
        ++stats.tests;
        if (outs[0] * outs[1] * outs[2] != ghz_expected_product(b1, b2)) {
            ++stats.failures;
            continue;
        }
        ++stats.outcome_counts[2 * b1 + b2][ghz_output_map(outs)];
    }
    return stats;
}

// --- nonlocal games --------------------------------------------------------------------

namespace {

// Constraints as parity masks over the assignment bits: device i's P sign
// sits at bit 2i and its Q sign at bit 2i+1; a set sign bit means -1.
struct ParityConstraint {
    uint64_t mask;
    int demanded;  // +/-1
};

std::vector<ParityConstraint> prc_constraints(int k) {
    const int devices = 4 * k - 1;
    std::vector<ParityConstraint> cs;
    for (int p_at = 0; p_at < devices; ++p_at) {  // one P, rest Q: demanded +1
        uint64_t mask = 0;
        for (int d = 0; d < devices; ++d)
            mask |= 1ULL << (2 * d + (d == p_at ? 0 : 1));
        cs.push_back({mask, 1});
    }
    uint64_t all_p = 0;  // every device on P: demanded -1
    for (int d = 0; d < devices; ++d) all_p |= 1ULL << (2 * d);
    cs.push_back({all_p, -1});
    return cs;
}

// The three-device test in the same representation.
std::vector<ParityConstraint> ghz_constraints() {
    std::vector<ParityConstraint> cs;
    auto mask_for = [](const std::array<int, 3>& settings) {
        uint64_t mask = 0;
        for (int d = 0; d < 3; ++d) mask |= 1ULL << (2 * d + settings[d]);
        return mask;
    };
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            cs.push_back({mask_for(ghz_input_map(b1, b2)), ghz_expected_product(b1, b2)});
    return cs;
}

int assignment_product(uint64_t assignment, uint64_t mask) {
    return (std::popcount(assignment & mask) % 2 == 0) ? 1 : -1;
}

}  // namespace

BruteForceResult classical_brute_force(Game game, int k) {
    if (game == Game::Chsh) {
        // P1,Q1,P2,Q2 in {+/-1}: maximize P1P2 + P1Q2 + Q1P2 - Q1Q2
        double best = -4.0;
        for (int code = 0; code < 16; ++code) {
            double v[4];
            for (int i = 0; i < 4; ++i) v[i] = (code >> i) & 1 ? -1.0 : 1.0;
            double s = v[0] * v[2] + v[0] * v[3] + v[1] * v[2] - v[1] * v[3];
            best = std::max(best, s);
        }
        return {best, 1};
    }

    std::vector<ParityConstraint> cs = game == Game::Ghz ? ghz_constraints()
                                                         : prc_constraints(k);
    if (game == Game::Prc) require(k >= 1 && k <= 3, "classical_brute_force: prc k in [1,3]");
    int n_bits = game == Game::Ghz ? 6 : 2 * (4 * k - 1);
    int best = 0;
    for (uint64_t assignment = 0; assignment < (1ULL << n_bits); ++assignment) {
        int satisfied = 0;
        for (const auto& c : cs)
            if (assignment_product(assignment, c.mask) == c.demanded) ++satisfied;
        best = std::max(best, satisfied);
    }
    return {static_cast<double>(best), static_cast<int>(cs.size())};
}

QuantumGameResult quantum_values(Game game, int k) {
    QuantumGameResult result;
    if (game == Game::Chsh) {
        // singlet with the standard optimal angles
        Vector singlet(4);
        singlet << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
        Matrix rho = singlet * singlet.adjoint();
        Matrix p1 = pauli_z(), q1 = pauli_x();
        Matrix p2 = -(pauli_z() + pauli_x()) / std::sqrt(2.0);
        Matrix q2 = (pauli_x() - pauli_z()) / std::sqrt(2.0);
        auto corr = [&](const Matrix& a, const Matrix& b) {
            return (kron(a, b) * rho).trace().real();
        };
        result.value = corr(p1, p2) + corr(p1, q2) + corr(q1, p2) - corr(q1, q2);
        result.passes = true;
        return result;
    }

    const int devices = game == Game::Ghz ? 3 : 4 * k - 1;
    if (game == Game::Prc) require(k >= 1 && k <= 2, "quantum_values: prc k in [1,2]");
    Vector psi = cat_state(devices);
    std::vector<ParityConstraint> cs = game == Game::Ghz ? ghz_constraints()
                                                         : prc_constraints(k);
    for (const auto& c : cs) {
        Matrix op = Matrix::Identity(1, 1);
        for (int d = 0; d < devices; ++d) {
            bool q_setting = (c.mask >> (2 * d + 1)) & 1;
            op = kron(op, q_setting ? pauli_y() : pauli_x());
        }
        double expectation = (psi.adjoint() * op * psi).real()(0, 0);
        if (std::abs(expectation - c.demanded) > 1e-9) result.passes = false;
    }

    if (game == Game::Ghz) {
        // exact outcome distribution for each of the four settings
        DeviceTriple honest = DeviceTriple::honest_ghz();
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b2 = 0; b2 < 2; ++b2) {
                std::array<int, 3> settings = ghz_input_map(b1, b2);
                RealVector dist = RealVector::Zero(4);
                for (int signs_code = 0; signs_code < 8; ++signs_code) {
                    std::array<int, 3> signs;
                    Matrix proj = Matrix::Identity(1, 1);
                    for (int d = 0; d < 3; ++d) {
                        signs[d] = (signs_code >> d) & 1 ? -1 : 1;
                        const Matrix local = settings[d] == 0 ? pauli_x() : pauli_y();
                        proj = kron(proj, sign_projector(local, signs[d]));
                    }
                    double prob = (psi.adjoint() * proj * psi).real()(0, 0);
                    if (prob < 1e-12) continue;
                    if (signs[0] * signs[1] * signs[2] != ghz_expected_product(b1, b2)) {
                        result.passes = false;
                        continue;
                    }
                    dist(ghz_output_map(signs)) += prob;
                }
                result.outcome_distributions.push_back(dist);
            }
    }
    return result;
}

// --- characterization ---------------------------------------------------------------------

CharacterizationResult ghz_characterization_check(const DensityOperator& state,
                                                  const std::vector<Matrix>& p_ops,
                                                  const std::vector<Matrix>& q_ops) {
    require(p_ops.size() == 3 && q_ops.size() == 3,
            "ghz_characterization_check: three parties expected");
    long dims[3];
    long total = 1;
    for (int i = 0; i < 3; ++i) {
        require(p_ops[i].rows() >= 2, "ghz_characterization_check: party dimension >= 2");
        require(p_ops[i].rows() == q_ops[i].rows(),
                "ghz_characterization_check: P/Q dims differ");
        dims[i] = p_ops[i].rows();
        total *= dims[i];
    }
    require(total == state.dim(), "ghz_characterization_check: state dimension mismatch");

    CharacterizationResult result;

    auto product_op = [&](bool q1, bool q2, bool q3) {
        return kron(q1 ? q_ops[0] : p_ops[0],
                    kron(q2 ? q_ops[1] : p_ops[1], q3 ? q_ops[2] : p_ops[2]));
    };
    struct Relation {
        bool q1, q2, q3;
        int demanded;
    };
    const Relation relations[4] = {{false, false, false, -1},
                                   {true, true, false, 1},
                                   {true, false, true, 1},
                                   {false, true, true, 1}};
    result.satisfies = true;
    for (const Relation& rel : relations) {
        double expectation =
            (product_op(rel.q1, rel.q2, rel.q3) * state.matrix()).trace().real();
        if (std::abs(expectation - rel.demanded) > 1e-9) result.satisfies = false;
    }
    if (!result.satisfies) return result;

    // support-restricted anticommutators vanish
    std::vector<int> factor_dims = {static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                                    static_cast<int>(dims[2])};
    result.anticommute_ok = true;
    std::vector<Matrix> supports(3);
    for (int party = 0; party < 3; ++party) {
        DensityOperator reduced = partial_trace(state, factor_dims, {party});
        Matrix pi = support_projector(reduced.matrix(), 1e-10);
        supports[party] = pi;
        Matrix p = pi * p_ops[party] * pi;
        Matrix q = pi * q_ops[party] * pi;
        if ((p * q + q * p).cwiseAbs().maxCoeff() > 1e-8) result.anticommute_ok = false;
    }
    if (!result.anticommute_ok) return result;

    // block weights for even party dimensions: s = -i p q acts like a
    // block-local sigma_z, and the reduced state is flat on each pair
    bool all_even = dims[0] % 2 == 0 && dims[1] % 2 == 0 && dims[2] % 2 == 0;
    if (!all_even) return result;

    DensityOperator rho1 = partial_trace(state, factor_dims, {0});
    Matrix s = Complex(0, -1) * (p_ops[0] * q_ops[0]);
    s = (s + s.adjoint().eval()) / 2.0;
    HermEig eig = herm_eig(s);
    std::vector<int> plus_indices;
    for (long i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues(i) > 0.5) plus_indices.push_back(static_cast<int>(i));
    Matrix basis(dims[0], plus_indices.size());
    for (size_t c = 0; c < plus_indices.size(); ++c)
        basis.col(c) = eig.eigenvectors.col(plus_indices[c]);
    Matrix compressed = basis.adjoint() * rho1.matrix() * basis;
    HermEig w = herm_eig(compressed);
    for (long i = w.eigenvalues.size() - 1; i >= 0; --i) {
        double weight = 2.0 * w.eigenvalues(i);
        if (weight > 1e-10) result.block_weights.push_back(weight);
    }
    return result;
}

TestRates test_rates(int k) {
    require(k >= 1, "test_rates: k >= 1");
    int devices = 4 * k - 1;
    int constraints = 4 * k;
    double nu = (4.0 * k - 2.0) / std::log2(4.0 * k);
    return {devices, constraints, nu};
}

}  // namespace qcrypt::randexp
