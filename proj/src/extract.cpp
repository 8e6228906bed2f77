#include "qcrypt/extract.hpp"

#include "qcrypt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcrypt::extract {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

JointDistribution::JointDistribution(std::vector<std::string> xs, std::vector<std::string> ys,
                                     Eigen::MatrixXd p)
    : x_alphabet(std::move(xs)), y_alphabet(std::move(ys)), probs(std::move(p)) {
    require(probs.rows() == static_cast<long>(x_alphabet.size()) &&
                probs.cols() == static_cast<long>(y_alphabet.size()),
            "JointDistribution: alphabet/matrix shape mismatch");
    require(probs.minCoeff() >= 0.0, "JointDistribution: negative entry");
    require(std::abs(probs.sum() - 1.0) <= 1e-12, "JointDistribution: total != 1");
}

BitString::BitString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
    for (uint8_t b : bits_)
        if (b > 1) throw std::invalid_argument("BitString: non-binary entry");
}

BitString BitString::zeros(int n) { return BitString(std::vector<uint8_t>(n, 0)); }

BitString BitString::from_uint(uint64_t value, int n) {
    std::vector<uint8_t> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = (value >> (n - 1 - i)) & 1ULL;
    return BitString(std::move(bits));
}

uint64_t BitString::to_uint() const {
    require(length() <= 64, "BitString::to_uint: too long");
    uint64_t v = 0;
    for (uint8_t b : bits_) v = (v << 1) | b;
    return v;
}

BitString BitString::slice(int begin, int len) const {
    require(begin >= 0 && len >= 0 && begin + len <= length(), "BitString::slice: out of range");
    return BitString(std::vector<uint8_t>(bits_.begin() + begin, bits_.begin() + begin + len));
}

BitString BitString::operator^(const BitString& other) const {
    require(length() == other.length(), "BitString: xor length mismatch");
    std::vector<uint8_t> out(bits_.size());
    for (size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] ^ other.bits_[i];
    return BitString(std::move(out));
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    const int n = length();
    const int nd = (n + 3) / 4;
    // left-pad to a nibble boundary; bit 0 is the most significant
    const int pad = nd * 4 - n;
    std::string out(nd, '0');
    for (int i = 0; i < n; ++i) {
        if (!bits_[i]) continue;
        int pos = i + pad;
        int d = pos / 4;
        int v = out[d] <= '9' ? out[d] - '0' : out[d] - 'a' + 10;
        v |= 8 >> (pos % 4);
        out[d] = digits[v];
    }
    return out;
}

BitString BitString::from_hex(const std::string& hex, int n) {
    const int nd = (n + 3) / 4;
    require(static_cast<int>(hex.size()) == nd, "BitString::from_hex: digit count mismatch");
    std::vector<uint8_t> bits(n, 0);
    int pad = nd * 4 - n;
    for (int d = 0; d < nd; ++d) {
        char c = hex[d];
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw std::invalid_argument("BitString::from_hex: bad digit");
        for (int k = 0; k < 4; ++k) {
            int pos = d * 4 + k - pad;
            int bit = (v >> (3 - k)) & 1;
            if (pos < 0) {
                require(bit == 0, "BitString::from_hex: padding bits nonzero");
            } else {
                bits[pos] = static_cast<uint8_t>(bit);
            }
        }
    }
    return BitString(std::move(bits));
}

ToeplitzSeed::ToeplitzSeed(int n_, int tau_, BitString diag)
    : n(n_), tau(tau_), diagonal_bits(std::move(diag)) {
    require(n > 0 && tau >= 0 && tau <= n, "ToeplitzSeed: need 0 <= tau <= n");
    require(diagonal_bits.length() == n + tau - 1 || (tau == 0 && diagonal_bits.length() == 0),
            "ToeplitzSeed: diagonal length must be n+tau-1");
}

CqState::CqState(FiniteDistribution p, std::vector<DensityOperator> s)
    : priors(std::move(p)), side_states(std::move(s)) {
    require(!side_states.empty() && priors.size() == static_cast<int>(side_states.size()),
            "CqState: prior/state count mismatch");
    for (const auto& st : side_states)
        require(st.dim() == side_states.front().dim(), "CqState: side dimensions differ");
}

// --- entropies ----------------------------------------------------------------

double renyi_entropy(const FiniteDistribution& p, double alpha) {
    require(!(alpha < 0.0), "renyi_entropy: negative order");
    const RealVector& q = p.probs();
    if (alpha == kInfinity) {
        return -std::log2(q.maxCoeff());
    }
    if (alpha == 0.0) {
        int support = 0;
        for (int i = 0; i < q.size(); ++i)
            if (q(i) > 0.0) ++support;
        return std::log2(static_cast<double>(support));
    }
    if (std::abs(alpha - 1.0) < 1e-12) {
        double h = 0.0;
        for (int i = 0; i < q.size(); ++i)
            if (q(i) > 0.0) h -= q(i) * std::log2(q(i));
        return h;
    }
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i)
        if (q(i) > 0.0) s += std::pow(q(i), alpha);
    return std::log2(s) / (1.0 - alpha);
}

double conditional_min_entropy(const JointDistribution& j) {
    double guess = 0.0;
    for (int y = 0; y < j.ny(); ++y) {
        if (j.y_marginal(y) <= 0.0) continue;
        guess += j.probs.col(y).maxCoeff();
    }
    return -std::log2(guess);
}

namespace {

struct Atom {
    int x, y;
    double joint;  // P(x,y)
    double cond;   // P(x,y)/P(y)
};

std::vector<Atom> support_atoms(const JointDistribution& j) {
    std::vector<Atom> atoms;
    for (int y = 0; y < j.ny(); ++y) {
        double py = j.y_marginal(y);
        if (py <= 0.0) continue;
        for (int x = 0; x < j.nx(); ++x)
            if (j.probs(x, y) > 0.0) atoms.push_back({x, y, j.probs(x, y), j.probs(x, y) / py});
    }
    return atoms;
}

double smooth_min_value(const std::vector<Atom>& kept) {
    double worst = 0.0;
    for (const Atom& a : kept) worst = std::max(worst, a.cond);
    return -std::log2(worst);
}

double smooth_max_value(const std::vector<Atom>& kept, int ny) {
    std::vector<int> count(ny, 0);
    for (const Atom& a : kept) ++count[a.y];
    int worst = 0;
    for (int c : count) worst = std::max(worst, c);
    return std::log2(static_cast<double>(worst));
}

constexpr double kBudgetSlack = 1e-12;

}  // namespace

double smooth_entropy(const JointDistribution& j, double epsilon, SmoothKind kind) {
    require(epsilon >= 0.0 && epsilon < 1.0, "smooth_entropy: epsilon out of [0,1)");
    std::vector<Atom> atoms = support_atoms(j);

    if (kind == SmoothKind::Min) {
        // The kept maximum is set by the largest surviving conditional value,
        // so removing the sorted prefix that fits the budget is optimal.
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.cond > b.cond; });
        double removed = 0.0;
        size_t cut = 0;
        while (cut < atoms.size() && removed + atoms[cut].joint <= epsilon + kBudgetSlack)
            removed += atoms[cut++].joint;
        require(cut < atoms.size(), "smooth_entropy: all mass removed");
        double worst = 0.0;
        for (size_t i = cut; i < atoms.size(); ++i) worst = std::max(worst, atoms[i].cond);
        return -std::log2(worst);
    }

    // Max kind: for a target support size k, each column sheds its cheapest
    // excess atoms; take the smallest feasible k.
    std::vector<std::vector<double>> columns(j.ny());
    for (const Atom& a : atoms) columns[a.y].push_back(a.joint);
    int kmax = 0;
    for (auto& col : columns) {
        std::sort(col.begin(), col.end());  // cheapest first
        kmax = std::max(kmax, static_cast<int>(col.size()));
    }
    int best = kmax;
    for (int k = kmax - 1; k >= 1; --k) {
        double cost = 0.0;
        for (const auto& col : columns) {
            int excess = static_cast<int>(col.size()) - k;
            for (int i = 0; i < excess; ++i) cost += col[i];
        }
        if (cost <= epsilon + kBudgetSlack)
            best = k;
        else
            break;
    }
    return std::log2(static_cast<double>(best));
}

double smooth_entropy_exhaustive(const JointDistribution& j, double epsilon, SmoothKind kind) {
    require(epsilon >= 0.0 && epsilon < 1.0, "smooth_entropy_exhaustive: epsilon out of [0,1)");
    std::vector<Atom> atoms = support_atoms(j);
    const int n = static_cast<int>(atoms.size());
    require(n <= 20, "smooth_entropy_exhaustive: support too large");

    double best = kind == SmoothKind::Min ? -kInfinity : kInfinity;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        double removed = 0.0;
        std::vector<Atom> kept;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i))
                removed += atoms[i].joint;
            else
                kept.push_back(atoms[i]);
        }
        if (removed > epsilon + kBudgetSlack || kept.empty()) continue;
        if (kind == SmoothKind::Min)
            best = std::max(best, smooth_min_value(kept));
        else
            best = std::min(best, smooth_max_value(kept, j.ny()));
    }
    return best;
}

CollisionReport collision_uniformity(const FiniteDistribution& p) {
    const RealVector& q = p.probs();
    double pc = q.squaredNorm();
    double v = static_cast<double>(q.size());
    double inner = std::max(0.0, pc - 1.0 / v);
    return {pc, 0.5 * std::sqrt(v) * std::sqrt(inner)};
}

// --- hashing -------------------------------------------------------------------

BitString toeplitz_hash(const ToeplitzSeed& seed, const BitString& input) {
    require(input.length() == seed.n, "toeplitz_hash: input length mismatch");
    BitString out = BitString::zeros(seed.tau);
    for (int k = 0; k < seed.tau; ++k) {
        uint8_t parity = 0;
        for (int i = 0; i < seed.n; ++i)
            parity ^= static_cast<uint8_t>(input.bit(i) & seed.diagonal_bits.bit(k - i + seed.n - 1));
        out.set(k, parity);
    }
    return out;
}

double extractor_distance_mc(const FiniteDistribution& source, int n, int tau,
                             long trials, uint64_t rng_seed) {
    require(tau >= 0 && tau <= n, "extractor_distance_mc: need 0 <= tau <= n");
    require(trials >= 1, "extractor_distance_mc: trials >= 1 required");
    require(source.size() <= (1L << n), "extractor_distance_mc: source larger than 2^n");
    if (tau == 0) return 0.0;

    std::vector<std::pair<uint64_t, double>> support;
    for (int i = 0; i < source.size(); ++i)
        if (source.prob(i) > 0.0) support.emplace_back(static_cast<uint64_t>(i), source.prob(i));

    const int seed_bits = n + tau - 1;
    const double uniform = std::pow(2.0, -tau);

    auto per_seed_distance = [&](uint64_t seed_value) {
        ToeplitzSeed seed(n, tau, BitString::from_uint(seed_value, seed_bits));
        std::vector<double> out_probs(static_cast<size_t>(1) << tau, 0.0);
        for (const auto& [x, px] : support) {
            uint64_t s = toeplitz_hash(seed, BitString::from_uint(x, n)).to_uint();
            out_probs[s] += px;
        }
        double d = 0.0;
        for (double ps : out_probs) d += std::abs(ps - uniform);
        return 0.5 * d;
    };

    bool exact = seed_bits <= 40 &&
                 static_cast<double>(support.size()) * std::pow(2.0, seed_bits) <= double(1 << 22);
    if (exact) {
        double total = 0.0;
        const uint64_t n_seeds = 1ULL << seed_bits;
        for (uint64_t r = 0; r < n_seeds; ++r) total += per_seed_distance(r);
        return total / static_cast<double>(n_seeds);
    }

    Rng rng = make_rng(rng_seed);
    double total = 0.0;
    for (long t = 0; t < trials; ++t) {
        uint64_t r = rng();
        if (seed_bits < 64) r &= (1ULL << seed_bits) - 1;
        total += per_seed_distance(r);
    }
    return total / static_cast<double>(trials);
}

Bracket pa_ir_bounds(double kappa_or_h0, double epsilon, double epsilon1, double epsilon2,
                     BoundMode mode) {
    require(epsilon1 > 0.0 && epsilon2 > 0.0 && epsilon < 1.0 &&
                std::abs(epsilon1 + epsilon2 - epsilon) <= 1e-12,
            "pa_ir_bounds: need epsilon = epsilon1 + epsilon2 in (0,1)");
    if (mode == BoundMode::Amplification)
        return {kappa_or_h0 - 2.0 * std::log2(1.0 / epsilon2), kappa_or_h0};
    return {kappa_or_h0, kappa_or_h0 + std::log2(1.0 / epsilon2)};
}

double max_extract_length(double kappa, double epsilon) {
    return kappa - 2.0 * std::log2(1.0 / (2.0 * epsilon));
}

// --- classical-quantum min-entropy -----------------------------------------------

namespace {

// lambda(sigma) = max_i lmax(sigma^{-1/2} eta_i rho_i sigma^{-1/2}), +inf on
// support leak.  Also reports the active generalized eigenvector for the
// subgradient step.
double cq_lambda(const CqState& state, const Matrix& sigma, Vector* active_vec) {
    const int d = state.side_dim();
    Matrix proj = support_projector(sigma, 1e-11);
    Matrix w = psd_inv_sqrt(sigma, 1e-11);
    double best = -kInfinity;
    for (int i = 0; i < state.priors.size(); ++i) {
        Matrix a = state.priors.prob(i) * state.side_states[i].matrix();
        double leak = ((Matrix::Identity(d, d) - proj) * a).trace().real();
        if (leak > 1e-9) return kInfinity;
        Matrix m = w * a * w;
        m = (m + m.adjoint().eval()) / 2.0;
        HermEig eig = herm_eig(m);
        double top = eig.eigenvalues(d - 1);
        if (top > best) {
            best = top;
            if (active_vec) {
                Vector v = w * eig.eigenvectors.col(d - 1);
                double scale = std::sqrt((v.adjoint() * sigma * v).real()(0, 0));
                *active_vec = scale > 0 ? Vector(v / scale) : v;
            }
        }
    }
    return best;
}

Matrix project_to_density(const Matrix& m) {
    Matrix h = (m + m.adjoint().eval()) / 2.0;
    HermEig eig = herm_eig(h);
    // Euclidean projection of the spectrum onto the probability simplex.
    RealVector v = eig.eigenvalues;
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.rbegin(), sorted.rend());
    double cum = 0.0, theta = 0.0;
    int rho_count = 0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        cum += sorted[i];
        double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0) {
            theta = t;
            rho_count = static_cast<int>(i + 1);
        }
    }
    (void)rho_count;
    RealVector proj = v.unaryExpr([theta](double x) { return std::max(0.0, x - theta); });
    return eig.eigenvectors * proj.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

double cq_min_entropy(const CqState& state, const DensityOperator& sigma) {
    require(sigma.dim() == state.side_dim(), "cq_min_entropy: sigma dimension mismatch");
    double lambda = cq_lambda(state, sigma.matrix(), nullptr);
    return -std::log2(lambda);  // -inf when lambda is +inf
}

double cq_min_entropy(const CqState& state) {
    const int d = state.side_dim();
    require(d <= 4, "cq_min_entropy: sigma optimization limited to side dimension <= 4");

    Matrix rho_b = Matrix::Zero(d, d);
    for (int i = 0; i < state.priors.size(); ++i)
        rho_b += state.priors.prob(i) * state.side_states[i].matrix();
    rho_b = (rho_b + rho_b.adjoint().eval()) / 2.0;

    auto minimize_from = [&](Matrix sigma) {
        double f = cq_lambda(state, sigma, nullptr);
        double step = 0.5;
        for (int iter = 0; iter < 400 && step > 1e-9; ++iter) {
            Vector v;
            double cur = cq_lambda(state, sigma, &v);
            if (!std::isfinite(cur)) break;
            // Subgradient of max_i (v' eta_i rho_i v)/(v' sigma v) at the
            // active pair is -cur * v v'; step opposite to it.
            Matrix candidate = project_to_density(sigma + step * cur * (v * v.adjoint()));
            double fc = cq_lambda(state, candidate, nullptr);
            if (fc < cur - 1e-12) {
                sigma = candidate;
                f = fc;
            } else {
                step *= 0.5;
            }
            if (step < 1e-7 && std::abs(cur - f) < 1e-6) break;
        }
        return f;
    };

    double best = minimize_from(rho_b);
    Rng rng = make_rng(0x9e3779b97f4a7c15ULL);
    for (int s = 0; s < 8; ++s) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
        Matrix start = g * g.adjoint();
        start /= start.trace().real();
        // keep random starts inside the support of rho_b
        Matrix proj = support_projector(rho_b, 1e-11);
        start = proj * start * proj;
        double tr = start.trace().real();
        if (tr < 1e-9) continue;
        start /= tr;
        best = std::min(best, minimize_from(start));
    }
    return -std::log2(best);
}

}  // namespace qcrypt::extract
