#include "doctest.h"

#include "qcrypt/attacklab.hpp"
#include "qcrypt/rng.hpp"

#include <cmath>

using namespace qcrypt;
using namespace qcrypt::attacklab;

namespace {

DetFunctionTable not_equal_table() {  // f(i,j) = 1 - delta_ij
    Eigen::MatrixXi m(3, 3);
    m << 0, 1, 1,
         1, 0, 1,
         1, 1, 0;
    return DetFunctionTable(m);
}

ProbFunctionTable paper_order(double p00, double p01, double p10, double p11) {
    return ProbFunctionTable(p00, p10, p01, p11);
}

}  // namespace

TEST_CASE("validate_and_canonicalize") {
    SUBCASE("the not-equal function is valid and canonicalizes") {
        auto form = validate_and_canonicalize(not_equal_table());
        CHECK(form.valid);
        const DetFunctionTable& c = *form.canonical;
        CHECK(c.f(0, 0) == 0);
        CHECK(c.f(0, 1) == 0);
        CHECK(c.f(0, 2) == 1);
        CHECK(form.a == c.f(1, 0));
        CHECK(form.b == c.f(1, 1));
        CHECK(c.f(1, 2) == form.b);
        CHECK(form.a != form.b);
        CHECK((form.a == 0 || form.b == 0 || form.b == 1));

        // transform reproduces the original: canonical(i,j) = map[f(ap[i], bp[j])]
        const TableTransform& t = *form.transform;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int orig = not_equal_table().f(t.alice_perm[i], t.bob_perm[j]);
                CHECK(c.f(i, j) == t.output_map[orig]);
            }
    }

    SUBCASE("constant table is degenerate") {
        Eigen::MatrixXi m = Eigen::MatrixXi::Zero(3, 3);
        CHECK_FALSE(validate_and_canonicalize(DetFunctionTable(m)).valid);
    }

    SUBCASE("a fully distinct row is not concealing") {
        Eigen::MatrixXi m(3, 3);
        m << 0, 1, 2,
             0, 0, 1,
             1, 0, 0;
        CHECK_FALSE(validate_and_canonicalize(DetFunctionTable(m)).valid);
    }

    SUBCASE("non-3x3 rejected") {
        Eigen::MatrixXi m = Eigen::MatrixXi::Zero(2, 3);
        CHECK_THROWS_AS(validate_and_canonicalize(DetFunctionTable(m)), std::invalid_argument);
    }
}

TEST_CASE("box_output_state") {
    SUBCASE("basis input gives the pure classical record") {
        DetFunctionTable f = not_equal_table();
        Vector e1 = Vector::Zero(3);
        e1(1) = 1.0;
        DensityOperator rho = box_output_state(f, e1, 2);
        // input 1, Bob 2 -> output 1: pure |1,1> at index 1*2+1 = 3 (alphabet 2)
        CHECK(rho.matrix()(3, 3).real() == doctest::Approx(1.0));
    }

    SUBCASE("canonical attack states carry the published cross terms") {
        for (int a : {0, 1}) {
            int b = a == 0 ? 1 : 0;
            auto rhos = canonical_attack_states(a, b);
            // rho_0 cross term |00><10| present iff a = 0
            double cross = std::abs(rhos[0].matrix()(0 * 4 + 0, 1 * 4 + 0));
            if (a == 0)
                CHECK(cross == doctest::Approx(0.5));
            else
                CHECK(cross == doctest::Approx(0.0));
            // diagonal weights are half/half
            CHECK(rhos[0].matrix()(0, 0).real() == doctest::Approx(0.5));
            CHECK(rhos[0].matrix()(1 * 4 + a, 1 * 4 + a).real() == doctest::Approx(0.5));
        }
    }

    SUBCASE("probabilistic one-sided stays pure") {
        ProbFunctionTable p = paper_order(0.3, 0.7, 0.8, 0.2);
        Vector e0 = Vector::Zero(2);
        e0(0) = 1.0;
        DensityOperator rho = box_output_state(p, e0, 1, Sided::One);
        HermEig eig = herm_eig(rho.matrix());
        CHECK(eig.eigenvalues.maxCoeff() == doctest::Approx(1.0));
    }

    SUBCASE("normalization is enforced") {
        Vector bad = Vector::Ones(3);
        CHECK_THROWS_AS(box_output_state(not_equal_table(), bad, 0), std::invalid_argument);
    }
}

TEST_CASE("honest_best") {
    SUBCASE("a known input is a solved game") {
        RealVector certain(3);
        certain << 1.0, 0.0, 0.0;
        CHECK(honest_best(not_equal_table(), FiniteDistribution::indexed(certain)) ==
              doctest::Approx(1.0));
        CHECK(honest_best(paper_order(0.3, 0.7, 0.8, 0.2), 1.0) == doctest::Approx(1.0));
    }

    SUBCASE("uniform prior on the not-equal function") {
        CHECK(honest_best(not_equal_table(), FiniteDistribution::uniform(3)) ==
              doctest::Approx(2.0 / 3.0));
    }

    SUBCASE("skewed priors collapse to eta0") {
        for (double eps : {1e-2, 1e-3}) {
            ProbFunctionTable p = paper_order(0.3, 0.7, 0.8, 0.2);
            CHECK(honest_best(p, 1.0 - eps) == doctest::Approx(1.0 - eps));
        }
    }
}

TEST_CASE("srm_cheat beats honesty") {
    FiniteDistribution uniform = FiniteDistribution::uniform(3);
    auto r = srm_cheat(not_equal_table(), uniform);
    double p_h = honest_best(not_equal_table(), uniform);
    CHECK(r.p_srm > p_h + 1e-6);

    SUBCASE("invalid tables are rejected upstream") {
        Eigen::MatrixXi m = Eigen::MatrixXi::Zero(3, 3);
        CHECK_THROWS_AS(srm_cheat(DetFunctionTable(m), uniform), std::invalid_argument);
    }
}

TEST_CASE("honest embedding sanity check") {
    // basis-state inputs produce orthogonal-or-equal records; the square-root
    // measurement on them reproduces the classical guessing value exactly
    FiniteDistribution uniform = FiniteDistribution::uniform(3);
    DetFunctionTable f = not_equal_table();
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
        Vector e = Vector::Zero(3);
        e(i) = 1.0;
        std::vector<DensityOperator> rhos;
        for (int j = 0; j < 3; ++j) rhos.push_back(box_output_state(f, e, j));
        discrim::Ensemble ensemble(uniform, std::move(rhos));
        double via_srm =
            discrim::guess_probability(ensemble, discrim::square_root_measurement(ensemble));
        int distinct = 0;
        for (int k = 0; k < f.alphabet_size(); ++k)
            for (int j = 0; j < 3; ++j)
                if (f.f(i, j) == k) {
                    ++distinct;
                    break;
                }
        CHECK(via_srm == doctest::Approx(distinct / 3.0).epsilon(1e-9));
        best = std::max(best, via_srm);
    }
    CHECK(best == doctest::Approx(honest_best(f, uniform)).epsilon(1e-9));
}

TEST_CASE("sweep_3x3") {
    SweepReport report = sweep_3x3(4);
    CHECK(report.tables_enumerated > 0);
    CHECK(!report.rows.empty());
    MESSAGE("canonical classes: ", report.rows.size(),
            ", raw valid tables: ", report.tables_enumerated);
    for (const auto& row : report.rows) {
        CHECK(row.gap > 1e-9);
        CHECK(row.p_h == doctest::Approx(2.0 / 3.0));
        CHECK_FALSE(row.honest_optimal);
    }

    // determinism
    SweepReport again = sweep_3x3(4);
    CHECK(again.tables_enumerated == report.tables_enumerated);
    CHECK(again.rows.size() == report.rows.size());
}

TEST_CASE("honest reference operators are never optimal") {
    // all canonical (a,b): a=0 or b=0 or b=1, a != b, labels within 4 symbols
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            if (!(a == 0 || b == 0 || b == 1)) continue;
            CAPTURE(a);
            CAPTURE(b);
            CHECK(honest_ops_never_optimal(a, b));
        }
}

TEST_CASE("helstrom_cheat_2x2") {
    SUBCASE("closed-form eigenvalues match the numeric spectrum") {
        Rng rng = make_rng(113);
        for (int t = 0; t < 2000; ++t) {
            ProbFunctionTable p(uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng));
            double eta0 = uniform01(rng);
            auto r = helstrom_cheat_2x2(p, eta0, Sided::Two);

            Vector amps = Vector::Constant(2, 1.0 / std::sqrt(2.0));
            Matrix delta = eta0 * box_output_state(p, amps, 0, Sided::Two).matrix() -
                           (1 - eta0) * box_output_state(p, amps, 1, Sided::Two).matrix();
            HermEig eig = herm_eig(delta);
            std::vector<double> numeric(eig.eigenvalues.data(), eig.eigenvalues.data() + 4);
            std::vector<double> closed(r.lambdas.begin(), r.lambdas.end());
            std::sort(numeric.begin(), numeric.end());
            std::sort(closed.begin(), closed.end());
            for (int k = 0; k < 4; ++k) CHECK(std::abs(numeric[k] - closed[k]) < 1e-9);
        }
    }

    SUBCASE("exception class 1 never helps at any prior") {
        ProbFunctionTable p = paper_order(0.3, 0.7, 0.3, 0.7);  // p00=p10, p01=p11
        CHECK(is_exception_class(p));
        for (double eta0 : default_eta_grid()) {
            auto r = helstrom_cheat_2x2(p, eta0, Sided::Two);
            CHECK(r.p_c <= honest_best(p, eta0) + 1e-9);
        }
    }

    SUBCASE("the published counterexample shows no advantage at eta0 = 1/2") {
        ProbFunctionTable p = paper_order(47.0 / 150, 103.0 / 150, 8.0 / 9, 5.0 / 9);
        auto r = helstrom_cheat_2x2(p, 0.5, Sided::Two);
        CHECK(r.p_c <= honest_best(p, 0.5) + 1e-9);
    }
}

TEST_CASE("thm3_scan") {
    SUBCASE("generic tables have a prior with strict advantage") {
        ProbFunctionTable p = paper_order(0.3, 0.7, 0.8, 0.2);
        auto r = thm3_scan(p, default_eta_grid());
        CHECK(r.found);
        // the construction bites near eta0 -> 1
        auto near_one = thm3_scan(p, {1.0 - 1e-2, 1.0 - 1e-3, 1.0 - 1e-4});
        CHECK(near_one.found);
    }

    SUBCASE("exception classes never produce a witness") {
        ProbFunctionTable class1 = paper_order(0.3, 0.7, 0.3, 0.7);
        ProbFunctionTable class2 = paper_order(0.3, 0.3, 0.7, 0.7);
        CHECK(is_exception_class(class1));
        CHECK(is_exception_class(class2));
        CHECK_FALSE(thm3_scan(class1, default_eta_grid()).found);
        CHECK_FALSE(thm3_scan(class2, default_eta_grid()).found);
    }

    SUBCASE("random non-exception tables are broken somewhere on the grid") {
        Rng rng = make_rng(127);
        auto grid = default_eta_grid();
        for (int t = 0; t < 50; ++t) {
            double p00 = 0.1 + 0.8 * uniform01(rng);
            double p01 = 0.1 + 0.8 * uniform01(rng);
            double p10 = 0.1 + 0.8 * uniform01(rng);
            double p11 = 0.1 + 0.8 * uniform01(rng);
            ProbFunctionTable p = paper_order(p00, p01, p10, p11);
            if (is_exception_class(p)) continue;
            CHECK(thm3_scan(p, grid).found);
        }
    }
}

TEST_CASE("one_sided_check") {
    SUBCASE("deterministic entries keep the basis optimal") {
        ProbFunctionTable p(1.0, 0.0, 1.0, 0.0);
        for (int i = 0; i < 2; ++i)
            for (double eta0 : {0.2, 0.5, 0.9}) {
                auto r = one_sided_check(p, i, eta0);
                CHECK(r.basis_optimal);
            }
    }

    SUBCASE("one-sided variable bias tables are never basis-readable") {
        // p00 = p10 and p01 = p11, non-extreme: the input carries no
        // information yet the basis readout is suboptimal
        ProbFunctionTable p = paper_order(0.3, 0.7, 0.3, 0.7);
        auto r = one_sided_check(p, 0, 0.3);
        CHECK_FALSE(r.basis_optimal);
        CHECK(r.p_best > honest_best(p, 0.3) - 1e-12);
    }

    SUBCASE("balanced entries pass only at the balanced prior") {
        ProbFunctionTable p = paper_order(0.2, 0.8, 0.5, 0.5);  // p10 = p11 = 1/2
        CHECK(one_sided_check(p, 1, 0.5).basis_optimal);
        CHECK_FALSE(one_sided_check(p, 1, 0.3).basis_optimal);
        CHECK_FALSE(one_sided_check(p, 1, 0.7).basis_optimal);
    }
}

TEST_CASE("one-input box states") {
    Eigen::MatrixXd ot_table(3, 2);
    ot_table << 0.5, 0.0,
                0.0, 0.5,
                0.5, 0.5;
    for (int b = 0; b < 2; ++b) {
        PureState chi = one_input_box_state(ot_table, b);
        // (|b> + |?>)/sqrt(2) over the orthogonal triple {|0>,|1>,|?>}
        CHECK(std::abs(chi.amplitudes()(b) - 1.0 / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(chi.amplitudes()(2) - 1.0 / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(chi.amplitudes()(1 - b)) < 1e-12);
    }
    CHECK_THROWS_AS(one_input_box_state(ot_table, 2), std::invalid_argument);
}

TEST_CASE("ot demonstration") {
    OtDemo demo = ot_demo();
    CHECK(demo.p_honest == doctest::Approx(0.75));
    CHECK(demo.p_attack == doctest::Approx(0.5 * (1 + std::sqrt(3.0) / 2)).epsilon(1e-12));
    CHECK(demo.attack_optimal);
    CHECK(demo.e0_match < 1e-9);
}
