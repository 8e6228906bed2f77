#pragma once

#include "qcrypt/qmath.hpp"

#include <cstdint>
#include <limits>

namespace qcrypt::extract {

struct JointDistribution {
    std::vector<std::string> x_alphabet;
    std::vector<std::string> y_alphabet;
    Eigen::MatrixXd probs;  // rows indexed by x, columns by y

    JointDistribution(std::vector<std::string> xs, std::vector<std::string> ys,
                      Eigen::MatrixXd p);
    int nx() const { return static_cast<int>(probs.rows()); }
    int ny() const { return static_cast<int>(probs.cols()); }
    double y_marginal(int y) const { return probs.col(y).sum(); }
};

class BitString {
  public:
    BitString() = default;
    explicit BitString(std::vector<uint8_t> bits);
    static BitString zeros(int n);
    static BitString from_uint(uint64_t value, int n);  // big-endian
    static BitString from_hex(const std::string& hex, int n);

    int length() const { return static_cast<int>(bits_.size()); }
    uint8_t bit(int i) const { return bits_.at(i); }
    void set(int i, uint8_t v) { bits_.at(i) = v & 1; }
    void append(uint8_t v) { bits_.push_back(v & 1); }
    BitString slice(int begin, int len) const;
    BitString operator^(const BitString& other) const;
    bool operator==(const BitString& other) const { return bits_ == other.bits_; }
    uint64_t to_uint() const;
    std::string to_hex() const;  // big-endian, bit 0 is the most significant

    const std::vector<uint8_t>& bits() const { return bits_; }

  private:
    std::vector<uint8_t> bits_;
};

struct ToeplitzSeed {
    int n = 0;    // input length
    int tau = 0;  // output length, tau <= n
    BitString diagonal_bits;  // length n + tau - 1

    ToeplitzSeed(int n_, int tau_, BitString diag);
};

// rho_AB = sum_i P(i)|i><i| (x) rho_B^i
struct CqState {
    FiniteDistribution priors;
    std::vector<DensityOperator> side_states;

    CqState(FiniteDistribution p, std::vector<DensityOperator> s);
    int side_dim() const { return side_states.front().dim(); }
};

// --- entropies --------------------------------------------------------------

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// H_alpha(p) = log(sum p^alpha)/(1-alpha); alpha=1 is Shannon, alpha=0 the
// log support size, alpha=inf the min-entropy. Base 2.
double renyi_entropy(const FiniteDistribution& p, double alpha);

// H_inf(X|Z) = -log sum_z P(z) max_x P(x|z)
double conditional_min_entropy(const JointDistribution& j);

enum class SmoothKind { Min, Max };

// Smoothed conditional Renyi entropies over whole-atom event sets with
// removed joint mass <= epsilon.  Min maximizes -log max_{y,x} P(x, kept | y),
// Max minimizes max_y log |kept support of column y|.
double smooth_entropy(const JointDistribution& j, double epsilon, SmoothKind kind);

// Brute force over all kept/removed atom subsets; supports up to ~20 atoms.
double smooth_entropy_exhaustive(const JointDistribution& j, double epsilon,
                                 SmoothKind kind);

struct CollisionReport {
    double collision_prob;   // sum p^2
    double distance_bound;   // (sqrt|V|/2) sqrt(collision - 1/|V|)
};

CollisionReport collision_uniformity(const FiniteDistribution& p);

// --- hashing and extraction --------------------------------------------------

BitString toeplitz_hash(const ToeplitzSeed& seed, const BitString& input);

// Distance of (hash output, seed) from (uniform x seed) for a source over
// n-bit strings (label index i encodes the string big-endian).  Exact when
// #seeds * #support <= 2^22, else a Monte-Carlo average over sampled seeds.
double extractor_distance_mc(const FiniteDistribution& source, int n, int tau,
                             long trials, uint64_t rng_seed);

enum class BoundMode { Amplification, Reconciliation };

struct Bracket {
    double lower;
    double upper;
};

// Two-sided brackets on extractable/encoding length from caller-supplied
// smooth entropy values; requires epsilon = epsilon1 + epsilon2.
Bracket pa_ir_bounds(double kappa_or_h0, double epsilon, double epsilon1,
                     double epsilon2, BoundMode mode);

// tau <= kappa - 2 log(1/(2 epsilon)), the universal_2 extraction length.
double max_extract_length(double kappa, double epsilon);

// --- classical-quantum min-entropy --------------------------------------------

// H_inf(rho_AB | sigma_B) = -log max_i lmax(sigma^{-1/2} eta_i rho_i sigma^{-1/2});
// -infinity when some eta_i rho_i leaks outside supp(sigma).
double cq_min_entropy(const CqState& state, const DensityOperator& sigma);

// Minimized over sigma_B (projected subgradient descent, multi-start);
// side dimension must be <= 4.
double cq_min_entropy(const CqState& state);

}  // namespace qcrypt::extract
