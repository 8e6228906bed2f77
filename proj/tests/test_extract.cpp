#include "doctest.h"

#include "qcrypt/extract.hpp"
#include "qcrypt/random_states.hpp"
#include "qcrypt/rng.hpp"

#include <cmath>

using namespace qcrypt;
using namespace qcrypt::extract;

namespace {

JointDistribution make_joint(const Eigen::MatrixXd& p) {
    std::vector<std::string> xs(p.rows()), ys(p.cols());
    for (long i = 0; i < p.rows(); ++i) xs[i] = "x" + std::to_string(i);
    for (long j = 0; j < p.cols(); ++j) ys[j] = "y" + std::to_string(j);
    return JointDistribution(xs, ys, p);
}

JointDistribution random_joint(int nx, int ny, Rng& rng, double sparsity = 0.0) {
    Eigen::MatrixXd p(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double v = -std::log(std::max(uniform01(rng), 1e-300));
            if (sparsity > 0 && uniform01(rng) < sparsity) v = 0.0;
            p(i, j) = v;
        }
    if (p.sum() <= 0) p(0, 0) = 1.0;
    p /= p.sum();
    p(nx - 1, ny - 1) += 1.0 - p.sum();
    if (p(nx - 1, ny - 1) < 0) p(nx - 1, ny - 1) = 0;
    p /= p.sum();
    return make_joint(p);
}

// The heavy-atom construction: P(x=0) = 2^{-n/4}, remaining mass uniform
// over the other 2^n - 1 strings.
FiniteDistribution heavy_atom_source(int n) {
    long size = 1L << n;
    double heavy = std::pow(2.0, -n / 4.0);
    RealVector p = RealVector::Constant(size, (1.0 - heavy) / static_cast<double>(size - 1));
    p(0) = heavy;
    p /= p.sum();
    p(size - 1) += 1.0 - p.sum();
    return FiniteDistribution::indexed(p);
}

}  // namespace

TEST_CASE("renyi_entropy") {
    FiniteDistribution u16 = FiniteDistribution::uniform(16);
    for (double alpha : {0.0, 0.5, 1.0, 2.0, kInfinity})
        CHECK(renyi_entropy(u16, alpha) == doctest::Approx(4.0).epsilon(1e-12));

    RealVector p(2);
    p << 0.75, 0.25;
    CHECK(renyi_entropy(FiniteDistribution::indexed(p), kInfinity) ==
          doctest::Approx(-std::log2(0.75)).epsilon(1e-12));

    CHECK_THROWS_AS(renyi_entropy(u16, -0.5), std::invalid_argument);

    SUBCASE("monotone nonincreasing in alpha") {
        Rng rng = make_rng(67);
        for (int t = 0; t < 1000; ++t) {
            FiniteDistribution d = random_distribution(uniform_int(rng, 2, 8), rng);
            double prev = renyi_entropy(d, 0.0);
            for (double alpha : {0.3, 0.7, 1.0, 1.5, 2.0, 4.0, kInfinity}) {
                double cur = renyi_entropy(d, alpha);
                CHECK(cur <= prev + 1e-9);
                prev = cur;
            }
        }
    }

    SUBCASE("order 2 is minus log collision probability") {
        Rng rng = make_rng(71);
        for (int t = 0; t < 100; ++t) {
            FiniteDistribution d = random_distribution(6, rng);
            CHECK(renyi_entropy(d, 2.0) ==
                  doctest::Approx(-std::log2(collision_uniformity(d).collision_prob)).epsilon(1e-9));
        }
    }
}

TEST_CASE("conditional_min_entropy") {
    SUBCASE("independent uniform 2 bits") {
        Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 3, 1.0 / 12);
        CHECK(conditional_min_entropy(make_joint(p)) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("perfect correlation leaks everything") {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
        p(0, 0) = p(1, 1) = p(2, 2) = 1.0 / 3;
        CHECK(conditional_min_entropy(make_joint(p)) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("heavy-atom gap at n = 4 is 3n/4") {
        FiniteDistribution src = heavy_atom_source(4);
        Eigen::MatrixXd p(src.size(), 1);
        for (int i = 0; i < src.size(); ++i) p(i, 0) = src.prob(i);
        double h = conditional_min_entropy(make_joint(p));
        CHECK(h == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(4.0 - h == doctest::Approx(3.0).epsilon(1e-12));  // 3n/4 below uniform
    }

    SUBCASE("chebyshev tail: few columns fall t below the average") {
        Rng rng = make_rng(73);
        for (int rep = 0; rep < 20; ++rep) {
            JointDistribution j = random_joint(8, 16, rng);
            double h_avg = conditional_min_entropy(j);
            RealVector py(j.ny());
            for (int y = 0; y < j.ny(); ++y) py(y) = j.y_marginal(y);
            std::discrete_distribution<int> sample_y(py.data(), py.data() + py.size());
            for (int t = 1; t <= 6; ++t) {
                int violations = 0;
                const int trials = 10000;
                for (int s = 0; s < trials; ++s) {
                    int y = sample_y(rng);
                    double h_point = -std::log2(j.probs.col(y).maxCoeff() / py(y));
                    if (h_point < h_avg - t) ++violations;
                }
                // 2^-t bound with a generous sampling cushion
                CHECK(static_cast<double>(violations) / trials <
                      std::pow(2.0, -t) + 3.0 * std::sqrt(std::pow(2.0, -t) / trials) + 1e-3);
            }
        }
    }
}

TEST_CASE("smooth_entropy") {
    SUBCASE("epsilon = 0 reduces to the sharp definitions") {
        Rng rng = make_rng(79);
        for (int t = 0; t < 50; ++t) {
            JointDistribution j = random_joint(4, 3, rng, 0.3);
            double sharp_min = kInfinity, sharp_max = 0.0;
            for (int y = 0; y < j.ny(); ++y) {
                double py = j.y_marginal(y);
                if (py <= 0) continue;
                int support = 0;
                for (int x = 0; x < j.nx(); ++x)
                    if (j.probs(x, y) > 0) ++support;
                sharp_min = std::min(sharp_min, -std::log2(j.probs.col(y).maxCoeff() / py));
                sharp_max = std::max(sharp_max, std::log2(static_cast<double>(support)));
            }
            CHECK(smooth_entropy(j, 0.0, SmoothKind::Min) == doctest::Approx(sharp_min));
            CHECK(smooth_entropy(j, 0.0, SmoothKind::Max) == doctest::Approx(sharp_max));
        }
    }

    SUBCASE("heavy-atom smoothing recovers near-uniform min-entropy") {
        // n = 4: dropping the 1/2-mass atom lifts H_inf within one bit of 4
        FiniteDistribution src = heavy_atom_source(4);
        Eigen::MatrixXd p(src.size(), 1);
        for (int i = 0; i < src.size(); ++i) p(i, 0) = src.prob(i);
        JointDistribution j = make_joint(p);
        double eps = std::pow(2.0, -1.0);  // 2^{-n/4}
        double smoothed = smooth_entropy(j, eps, SmoothKind::Min);
        CHECK(smoothed >= 4.0 - 1.0);
        CHECK(smoothed == doctest::Approx(std::log2(30.0)).epsilon(1e-9));
    }

    SUBCASE("greedy equals exhaustive on supports up to 12") {
        Rng rng = make_rng(83);
        for (int t = 0; t < 150; ++t) {
            int nx = uniform_int(rng, 2, 4), ny = uniform_int(rng, 1, 3);
            JointDistribution j = random_joint(nx, ny, rng, 0.35);
            int support = 0;
            for (int x = 0; x < nx; ++x)
                for (int y = 0; y < ny; ++y)
                    if (j.probs(x, y) > 0) ++support;
            if (support > 12) continue;
            for (double eps : {0.0, 0.05, 0.2, 0.45}) {
                CHECK(smooth_entropy(j, eps, SmoothKind::Min) ==
                      doctest::Approx(smooth_entropy_exhaustive(j, eps, SmoothKind::Min))
                          .epsilon(1e-10));
                CHECK(smooth_entropy(j, eps, SmoothKind::Max) ==
                      doctest::Approx(smooth_entropy_exhaustive(j, eps, SmoothKind::Max))
                          .epsilon(1e-10));
            }
        }
    }

    SUBCASE("epsilon out of range") {
        Rng rng = make_rng(1);
        JointDistribution j = random_joint(2, 2, rng);
        CHECK_THROWS_AS(smooth_entropy(j, 1.0, SmoothKind::Min), std::invalid_argument);
    }
}

TEST_CASE("collision_uniformity") {
    SUBCASE("uniform source") {
        auto r = collision_uniformity(FiniteDistribution::uniform(8));
        CHECK(r.collision_prob == doctest::Approx(0.125).epsilon(1e-12));
        CHECK(r.distance_bound == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("point mass on a pair: bound is tight") {
        RealVector p(2);
        p << 1.0, 0.0;
        FiniteDistribution d = FiniteDistribution::indexed(p);
        auto r = collision_uniformity(d);
        CHECK(r.collision_prob == doctest::Approx(1.0));
        CHECK(r.distance_bound == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(trace_distance(d, FiniteDistribution::uniform(2)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("bound dominates the true distance on random sources") {
        Rng rng = make_rng(89);
        for (int t = 0; t < 1000; ++t) {
            int n = uniform_int(rng, 2, 16);
            FiniteDistribution d = random_distribution(n, rng);
            auto r = collision_uniformity(d);
            CHECK(trace_distance(d, FiniteDistribution::uniform(n)) <= r.distance_bound + 1e-12);
        }
    }
}

TEST_CASE("toeplitz_hash") {
    Rng rng = make_rng(97);
    auto random_bits = [&rng](int n) {
        std::vector<uint8_t> b(n);
        for (auto& v : b) v = static_cast<uint8_t>(uniform_bit(rng));
        return BitString(std::move(b));
    };

    SUBCASE("all-zero input maps to all-zero output") {
        ToeplitzSeed seed(6, 3, random_bits(8));
        CHECK(toeplitz_hash(seed, BitString::zeros(6)) == BitString::zeros(3));
    }

    SUBCASE("GF(2) linearity") {
        for (int t = 0; t < 200; ++t) {
            ToeplitzSeed seed(8, 4, random_bits(11));
            BitString x = random_bits(8), y = random_bits(8);
            CHECK((toeplitz_hash(seed, x) ^ toeplitz_hash(seed, y)) ==
                  toeplitz_hash(seed, x ^ y));
        }
    }

    SUBCASE("exhaustive universal_2 check at n=4 tau=2") {
        const int n = 4, tau = 2;
        const int n_seeds = 1 << (n + tau - 1);
        for (uint64_t a = 0; a < 16; ++a)
            for (uint64_t b = a + 1; b < 16; ++b) {
                int collisions = 0;
                for (int s = 0; s < n_seeds; ++s) {
                    ToeplitzSeed seed(n, tau, BitString::from_uint(s, n + tau - 1));
                    if (toeplitz_hash(seed, BitString::from_uint(a, n)) ==
                        toeplitz_hash(seed, BitString::from_uint(b, n)))
                        ++collisions;
                }
                CHECK(static_cast<double>(collisions) / n_seeds <= 0.25 + 1e-12);
            }
    }

    SUBCASE("length mismatch") {
        ToeplitzSeed seed(6, 3, random_bits(8));
        CHECK_THROWS_AS(toeplitz_hash(seed, BitString::zeros(5)), std::invalid_argument);
    }

    SUBCASE("hex round trip, big-endian") {
        BitString b = BitString::from_uint(0b10110, 5);
        CHECK(b.to_hex() == "16");
        CHECK(BitString::from_hex("16", 5) == b);
        for (int t = 0; t < 100; ++t) {
            int n = uniform_int(rng, 1, 40);
            BitString x = random_bits(n);
            CHECK(BitString::from_hex(x.to_hex(), n) == x);
        }
    }
}

TEST_CASE("extractor_distance_mc") {
    SUBCASE("point mass at tau = 1 sits at distance 1/2") {
        RealVector p = RealVector::Zero(16);
        p(5) = 1.0;
        CHECK(extractor_distance_mc(FiniteDistribution::indexed(p), 4, 1, 10, 1) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("uniform 8-bit source stays within the leftover-hash bound") {
        FiniteDistribution u = FiniteDistribution::uniform(256);
        for (int tau : {2, 4, 6}) {
            double d = extractor_distance_mc(u, 8, tau, 10, 2);
            CHECK(d <= 0.5 * std::pow(2.0, -(8.0 - tau) / 2.0) + 1e-9);
        }
    }

    SUBCASE("tau = 0 is distance zero") {
        CHECK(extractor_distance_mc(FiniteDistribution::uniform(4), 2, 0, 10, 3) == 0.0);
    }

    SUBCASE("deterministic given the seed") {
        FiniteDistribution src = heavy_atom_source(4);
        // force the Monte-Carlo path with a large virtual seed space
        double a = extractor_distance_mc(src, 4, 2, 64, 12345);
        double b = extractor_distance_mc(src, 4, 2, 64, 12345);
        CHECK(a == b);
    }
}

TEST_CASE("pa_ir_bounds") {
    auto amp = pa_ir_bounds(10.0, 0.5, 0.25, 0.25, BoundMode::Amplification);
    CHECK(amp.lower == doctest::Approx(6.0));
    CHECK(amp.upper == doctest::Approx(10.0));

    auto rec = pa_ir_bounds(5.0, 1.0 - 1e-9, 0.5 - 1e-9, 0.5, BoundMode::Reconciliation);
    CHECK(rec.lower == doctest::Approx(5.0));
    CHECK(rec.upper == doctest::Approx(6.0));

    CHECK(max_extract_length(8.0, 0.25) == doctest::Approx(6.0));

    CHECK_THROWS_AS(pa_ir_bounds(5.0, 0.5, 0.1, 0.2, BoundMode::Amplification),
                    std::invalid_argument);
}

TEST_CASE("cq_min_entropy") {
    Rng rng = make_rng(101);

    SUBCASE("identical side states reduce to the prior min-entropy") {
        for (int t = 0; t < 50; ++t) {
            DensityOperator rho = random_density(3, rng);
            FiniteDistribution priors = random_distribution(3, rng);
            CqState state(priors, {rho, rho, rho});
            double h = cq_min_entropy(state, rho);
            CHECK(h == doctest::Approx(-std::log2(priors.probs().maxCoeff())).epsilon(1e-8));
        }
    }

    SUBCASE("support leak gives -infinity") {
        CqState state(FiniteDistribution::uniform(2),
                      {DensityOperator::pure(PureState::basis(2, 0)),
                       DensityOperator::pure(PureState::basis(2, 1))});
        double h = cq_min_entropy(state, DensityOperator::pure(PureState::basis(2, 0)));
        CHECK(std::isinf(h));
        CHECK(h < 0);
    }

    SUBCASE("orthogonal pure side states minimize to zero") {
        CqState state(FiniteDistribution::uniform(2),
                      {DensityOperator::pure(PureState::basis(2, 0)),
                       DensityOperator::pure(PureState::basis(2, 1))});
        CHECK(cq_min_entropy(state) == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("minimized value is never negative") {
        for (int t = 0; t < 60; ++t) {
            int n = uniform_int(rng, 2, 3);
            int d = uniform_int(rng, 2, 4);
            std::vector<DensityOperator> states;
            for (int i = 0; i < n; ++i) states.push_back(random_density(d, rng));
            CqState state(random_distribution(n, rng), std::move(states));
            CHECK(cq_min_entropy(state) >= -1e-9);
        }
    }

    SUBCASE("side dimension above 4 rejected for the minimized form") {
        std::vector<DensityOperator> states{DensityOperator::maximally_mixed(5),
                                            DensityOperator::maximally_mixed(5)};
        CqState state(FiniteDistribution::uniform(2), std::move(states));
        CHECK_THROWS_AS(cq_min_entropy(state), std::invalid_argument);
    }
}

TEST_CASE("quantum leftover hash bound on classical embeddings") {
    // Classical side information as commuting rho_E^x; the enumerated hashing
    // distance must respect (1/2) 2^{-(H_inf(X|E) - tau)/2}.
    Rng rng = make_rng(103);
    for (int t = 0; t < 8; ++t) {
        int n = uniform_int(rng, 3, 5);
        int nz = uniform_int(rng, 1, 3);
        long size = 1L << n;
        Eigen::MatrixXd joint(size, nz);
        for (long i = 0; i < size; ++i)
            for (int z = 0; z < nz; ++z)
                joint(i, z) = -std::log(std::max(uniform01(rng), 1e-300));
        joint /= joint.sum();
        joint(size - 1, nz - 1) += 1.0 - joint.sum();

        // H_inf(rho_XE|E) for a cc-state equals -log sum_z max_x P(x,z)
        double guess = 0.0;
        for (int z = 0; z < nz; ++z) guess += joint.col(z).maxCoeff();
        double h_min = -std::log2(guess);

        for (int tau = 1; tau <= 2; ++tau) {
            const int seed_bits = n + tau - 1;
            const uint64_t n_seeds = 1ULL << seed_bits;
            const double uniform = std::pow(2.0, -tau);
            // D(rho_SRE, U_S x rho_RE) with everything classical: average over
            // seeds and z of the per-(r,z) L1 distance of hashed outputs.
            double dist = 0.0;
            for (uint64_t r = 0; r < n_seeds; ++r) {
                ToeplitzSeed seed(n, tau, BitString::from_uint(r, seed_bits));
                for (int z = 0; z < nz; ++z) {
                    std::vector<double> out(static_cast<size_t>(1) << tau, 0.0);
                    for (long x = 0; x < size; ++x)
                        out[toeplitz_hash(seed, BitString::from_uint(x, n)).to_uint()] +=
                            joint(x, z);
                    double pz = joint.col(z).sum();
                    for (double ps : out) dist += 0.5 * std::abs(ps - uniform * pz);
                }
            }
            dist /= static_cast<double>(n_seeds);
            CHECK(dist <= 0.5 * std::pow(2.0, -(h_min - tau) / 2.0) + 1e-9);
        }
    }
}
