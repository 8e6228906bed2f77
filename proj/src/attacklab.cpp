#include "qcrypt/attacklab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qcrypt::attacklab {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

const std::array<std::array<int, 3>, 6> kPerms3 = {{{0, 1, 2},
                                                    {0, 2, 1},
                                                    {1, 0, 2},
                                                    {1, 2, 0},
                                                    {2, 0, 1},
                                                    {2, 1, 0}}};

}  // namespace

DetFunctionTable::DetFunctionTable(Eigen::MatrixXi m) : outputs(std::move(m)) {
    require(outputs.rows() > 0 && outputs.cols() > 0, "DetFunctionTable: empty");
    require(outputs.minCoeff() >= 0, "DetFunctionTable: negative label");
}

bool DetFunctionTable::potentially_concealing() const {
    auto line_repeats = [](int x, int y, int z) { return x == y || x == z || y == z; };
    for (int i = 0; i < n_alice(); ++i)
        if (!line_repeats(outputs(i, 0), outputs(i, 1), outputs(i, 2))) return false;
    for (int j = 0; j < n_bob(); ++j)
        if (!line_repeats(outputs(0, j), outputs(1, j), outputs(2, j))) return false;
    return true;
}

bool DetFunctionTable::non_degenerate() const {
    for (int u = 0; u < n_alice(); ++u)
        for (int v = u + 1; v < n_alice(); ++v)
            if (outputs.row(u) == outputs.row(v)) return false;
    for (int u = 0; u < n_bob(); ++u)
        for (int v = u + 1; v < n_bob(); ++v)
            if (outputs.col(u) == outputs.col(v)) return false;
    return true;
}

ProbFunctionTable::ProbFunctionTable(double p00, double p10, double p01, double p11)
    : p{{{p00, p01}, {p10, p11}}} {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            require(p[i][j] >= 0.0 && p[i][j] <= 1.0, "ProbFunctionTable: entry outside [0,1]");
}

CanonicalForm validate_and_canonicalize(const DetFunctionTable& f) {
    require(f.n_alice() == 3 && f.n_bob() == 3, "validate_and_canonicalize: 3x3 required");
    CanonicalForm out;
    if (!f.potentially_concealing() || !f.non_degenerate()) return out;

    bool have_best = false;
    Eigen::MatrixXi best(3, 3);
    TableTransform best_transform{};
    int best_a = -1, best_b = -1;

    for (const auto& ap : kPerms3) {
        for (const auto& bp : kPerms3) {
            // the first column must read (0,0,1); pin the relabeling there
            int s00 = f.f(ap[0], bp[0]);
            int s01 = f.f(ap[0], bp[1]);
            int s02 = f.f(ap[0], bp[2]);
            if (s00 != s01 || s02 == s00) continue;

            std::vector<int> relabel(f.alphabet_size(), -1);
            relabel[s00] = 0;
            relabel[s02] = 1;
            int next = 2;
            Eigen::MatrixXi c(3, 3);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int s = f.f(ap[i], bp[j]);
                    if (relabel[s] < 0) relabel[s] = next++;
                    c(i, j) = relabel[s];
                }
            int a = c(1, 0), b = c(1, 1);
            if (c(1, 2) != b || a == b) continue;
            if (!(a == 0 || b == 0 || b == 1)) continue;

            bool better = !have_best;
            if (have_best) {
                for (int k = 0; k < 9; ++k) {
                    int ci = c(k / 3, k % 3), bi = best(k / 3, k % 3);
                    if (ci != bi) {
                        better = ci < bi;
                        break;
                    }
                }
            }
            if (better) {
                have_best = true;
                best = c;
                best_a = a;
                best_b = b;
                best_transform.alice_perm = ap;
                best_transform.bob_perm = bp;
                best_transform.output_map = relabel;
            }
        }
    }
    if (!have_best)
        throw std::logic_error("validate_and_canonicalize: no reference form found");
    out.valid = true;
    out.canonical = DetFunctionTable(best);
    out.transform = best_transform;
    out.a = best_a;
    out.b = best_b;
    return out;
}

// --- black box output states -----------------------------------------------------

DensityOperator box_output_state(const DetFunctionTable& f, const Vector& amplitudes, int j) {
    require(amplitudes.size() == f.n_alice(), "box_output_state: amplitude count mismatch");
    require(std::abs(amplitudes.squaredNorm() - 1.0) <= kTol,
            "box_output_state: amplitudes not normalized");
    require(j >= 0 && j < f.n_bob(), "box_output_state: j out of range");
    const int ni = f.n_alice();
    const int no = f.alphabet_size();
    Matrix rho = Matrix::Zero(ni * no, ni * no);
    for (int i = 0; i < ni; ++i)
        for (int i2 = 0; i2 < ni; ++i2) {
            if (f.f(i, j) != f.f(i2, j)) continue;  // Bob's output copy kills the coherence
            rho(i * no + f.f(i, j), i2 * no + f.f(i2, j)) +=
                amplitudes(i) * std::conj(amplitudes(i2));
        }
    return DensityOperator(std::move(rho));
}

DensityOperator box_output_state(const ProbFunctionTable& p, const Vector& amplitudes, int j,
                                 Sided sided) {
    require(amplitudes.size() == 2, "box_output_state: two inputs expected");
    require(std::abs(amplitudes.squaredNorm() - 1.0) <= kTol,
            "box_output_state: amplitudes not normalized");
    require(j == 0 || j == 1, "box_output_state: j out of range");
    Matrix rho = Matrix::Zero(4, 4);
    if (sided == Sided::Two) {
        // Bob keeps an output copy: only matching-outcome coherences survive
        for (int i = 0; i < 2; ++i)
            for (int i2 = 0; i2 < 2; ++i2) {
                Complex w = amplitudes(i) * std::conj(amplitudes(i2));
                rho(i * 2 + 0, i2 * 2 + 0) += w * std::sqrt(p.at(i, j) * p.at(i2, j));
                rho(i * 2 + 1, i2 * 2 + 1) +=
                    w * std::sqrt((1.0 - p.at(i, j)) * (1.0 - p.at(i2, j)));
            }
    } else {
        // single output register, so a pure input stays pure
        Vector chi = Vector::Zero(4);
        for (int i = 0; i < 2; ++i) {
            chi(i * 2 + 0) = amplitudes(i) * std::sqrt(p.at(i, j));
            chi(i * 2 + 1) = amplitudes(i) * std::sqrt(1.0 - p.at(i, j));
        }
        rho = chi * chi.adjoint();
    }
    rho = (rho + rho.adjoint().eval()) / 2.0;
    return DensityOperator(std::move(rho));
}

PureState one_input_box_state(const Eigen::MatrixXd& outcome_probs, int i) {
    require(i >= 0 && i < outcome_probs.cols(), "one_input_box_state: input out of range");
    require(outcome_probs.minCoeff() >= 0.0, "one_input_box_state: negative probability");
    require(std::abs(outcome_probs.col(i).sum() - 1.0) <= 1e-9,
            "one_input_box_state: column does not sum to 1");
    Vector chi(outcome_probs.rows());
    for (long k = 0; k < outcome_probs.rows(); ++k) chi(k) = std::sqrt(outcome_probs(k, i));
    return PureState(std::move(chi));
}

// --- honest strategies --------------------------------------------------------------

double honest_best(const DetFunctionTable& f, const FiniteDistribution& prior) {
    require(prior.size() == f.n_bob(), "honest_best: prior size mismatch");
    double best = 0.0;
    for (int i = 0; i < f.n_alice(); ++i) {
        double total = 0.0;
        for (int k = 0; k < f.alphabet_size(); ++k) {
            double top = 0.0;
            for (int j = 0; j < f.n_bob(); ++j)
                if (f.f(i, j) == k) top = std::max(top, prior.prob(j));
            total += top;
        }
        best = std::max(best, total);
    }
    return best;
}

double honest_best(const ProbFunctionTable& p, double eta0) {
    require(eta0 >= 0.0 && eta0 <= 1.0, "honest_best: eta0 outside [0,1]");
    double eta[2] = {eta0, 1.0 - eta0};
    double best = 0.0;
    for (int i = 0; i < 2; ++i) {
        double on0 = std::max(p.at(i, 0) * eta[0], p.at(i, 1) * eta[1]);
        double on1 = std::max((1.0 - p.at(i, 0)) * eta[0], (1.0 - p.at(i, 1)) * eta[1]);
        best = std::max(best, on0 + on1);
    }
    return best;
}

SrmCheatResult srm_cheat(const DetFunctionTable& f, const FiniteDistribution& prior) {
    CanonicalForm form = validate_and_canonicalize(f);
    require(form.valid, "srm_cheat: table fails the concealing/degeneracy conditions");
    Vector amps = Vector::Constant(3, 1.0 / std::sqrt(3.0));
    std::vector<DensityOperator> sigmas;
    for (int j = 0; j < 3; ++j) sigmas.push_back(box_output_state(f, amps, j));
    discrim::Ensemble ensemble(prior, std::move(sigmas));
    PovmSet povm = discrim::square_root_measurement(ensemble);
    double value = discrim::guess_probability(ensemble, povm);
    return {value, std::move(povm)};
}

// --- reference operators and the sweep ---------------------------------------------

std::vector<DensityOperator> canonical_attack_states(int a, int b) {
    Eigen::MatrixXi m(3, 3);
    // the third row never appears in the states; any completion works
    m << 0, 0, 1,
         a, b, b,
         2, 3, 0;
    DetFunctionTable table(m);
    Vector amps(3);
    amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
    std::vector<DensityOperator> rhos;
    for (int j = 0; j < 3; ++j) rhos.push_back(box_output_state(table, amps, j));
    return rhos;
}

PovmSet honest_reference_ops(int a, int b, const std::array<double, 5>& alphas) {
    require(a >= 0 && a < 4 && b >= 0 && b < 4 && a != b, "honest_reference_ops: bad (a,b)");
    const int no = 4;
    const int dim = 3 * no;
    auto basis = [no](int i, int k) { return i * no + k; };
    Matrix e0 = Matrix::Zero(dim, dim);
    Matrix e1 = Matrix::Zero(dim, dim);
    e0(basis(0, 0), basis(0, 0)) = alphas[0];
    e0(basis(1, a), basis(1, a)) = 1.0;
    e1(basis(0, 0), basis(0, 0)) = 1.0 - alphas[0];
    e1(basis(1, b), basis(1, b)) = alphas[1 + b];
    Matrix e2 = Matrix::Identity(dim, dim) - e0 - e1;
    return PovmSet({std::move(e0), std::move(e1), std::move(e2)});
}

bool honest_ops_never_optimal(int a, int b, double tol) {
    std::vector<DensityOperator> rhos = canonical_attack_states(a, b);
    discrim::Ensemble ensemble(FiniteDistribution::uniform(3), std::move(rhos));
    const std::array<double, 5> grid_values = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::array<int, 5> idx{};
    while (true) {
        std::array<double, 5> alphas{};
        for (int k = 0; k < 5; ++k) alphas[k] = grid_values[idx[k]];
        auto report = discrim::check_optimality(ensemble, honest_reference_ops(a, b, alphas), tol);
        if (report.optimal) return false;
        int k = 0;
        for (; k < 5; ++k) {
            if (++idx[k] < 5) break;
            idx[k] = 0;
        }
        if (k == 5) break;
    }
    return true;
}

namespace {

std::string class_key(const Eigen::MatrixXi& m) {
    // first-appearance relabeling per row/column permutation; the
    // lexicographic minimum is the symmetry-class key
    std::string best;
    for (const auto& ap : kPerms3)
        for (const auto& bp : kPerms3) {
            std::array<int, 16> relabel;
            relabel.fill(-1);
            int next = 0;
            std::string key(9, '0');
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int s = m(ap[i], bp[j]);
                    if (relabel[s] < 0) relabel[s] = next++;
                    key[i * 3 + j] = static_cast<char>('0' + relabel[s]);
                }
            if (best.empty() || key < best) best = key;
        }
    return best;
}

}  // namespace

SweepReport sweep_3x3(int max_output_alphabet) {
    require(max_output_alphabet >= 2 && max_output_alphabet <= 4,
            "sweep_3x3: alphabet size in [2,4]");
    SweepReport report;
    std::map<std::string, Eigen::MatrixXi> classes;

    long total = 1;
    for (int k = 0; k < 9; ++k) total *= max_output_alphabet;
    for (long code = 0; code < total; ++code) {
        Eigen::MatrixXi m(3, 3);
        long rem = code;
        for (int k = 0; k < 9; ++k) {
            m(k / 3, k % 3) = static_cast<int>(rem % max_output_alphabet);
            rem /= max_output_alphabet;
        }
        DetFunctionTable table(m);
        if (!table.potentially_concealing() || !table.non_degenerate()) continue;
        ++report.tables_enumerated;
        classes.emplace(class_key(m), m);
    }

    FiniteDistribution uniform = FiniteDistribution::uniform(3);
    for (const auto& [key, m] : classes) {
        DetFunctionTable table(m);
        CanonicalForm form = validate_and_canonicalize(table);
        if (!form.valid) throw std::logic_error("sweep_3x3: class lost validity");
        const DetFunctionTable& canon = *form.canonical;

        SweepRow row;
        row.canonical_id = key;
        row.a = form.a;
        row.b = form.b;
        {
            std::ostringstream os;
            os << canon.f(2, 0) << canon.f(2, 1) << canon.f(2, 2);
            row.free_entries = os.str();
        }
        row.p_h = honest_best(canon, uniform);
        row.p_srm = srm_cheat(canon, uniform).p_srm;
        row.gap = row.p_srm - row.p_h;

        std::vector<DensityOperator> rhos = canonical_attack_states(form.a, form.b);
        discrim::Ensemble ensemble(uniform, std::move(rhos));
        row.honest_optimal =
            discrim::check_optimality(ensemble,
                                      honest_reference_ops(form.a, form.b,
                                                           {0.5, 0.5, 0.5, 0.5, 0.5}))
                .optimal;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- probabilistic 2x2 analysis ------------------------------------------------------

HelstromCheatResult helstrom_cheat_2x2(const ProbFunctionTable& p, double eta0, Sided sided) {
    require(eta0 >= 0.0 && eta0 <= 1.0, "helstrom_cheat_2x2: eta0 outside [0,1]");
    RealVector priors(2);
    priors << eta0, 1.0 - eta0;

    if (sided == Sided::Two) {
        Vector amps = Vector::Constant(2, 1.0 / std::sqrt(2.0));
        discrim::Ensemble ensemble(FiniteDistribution::indexed(priors),
                                   {box_output_state(p, amps, 0, Sided::Two),
                                    box_output_state(p, amps, 1, Sided::Two)});
        double p_c = discrim::helstrom(ensemble).value;

        auto branch = [&](double q00, double q10, double q01, double q11) {
            double a = (q00 + q10) * eta0 - (q01 + q11) * (1.0 - eta0);
            double b = 4.0 * std::pow(std::sqrt(q01 * q10) - std::sqrt(q00 * q11), 2.0) * eta0 *
                       (1.0 - eta0);
            double root = std::sqrt(a * a + b);
            return std::pair<double, double>{0.25 * (a + root), 0.25 * (a - root)};
        };
        auto [lp, lm] = branch(p.at(0, 0), p.at(1, 0), p.at(0, 1), p.at(1, 1));
        auto [mp, mm] = branch(1 - p.at(0, 0), 1 - p.at(1, 0), 1 - p.at(0, 1), 1 - p.at(1, 1));
        return {p_c, {lp, lm, mp, mm}};
    }

    // one-sided: the better honest basis input, then the optimal readout
    HelstromCheatResult best{-1.0, {0, 0, 0, 0}};
    for (int i = 0; i < 2; ++i) {
        Vector v0(2), v1(2);
        v0 << std::sqrt(p.at(i, 0)), std::sqrt(1.0 - p.at(i, 0));
        v1 << std::sqrt(p.at(i, 1)), std::sqrt(1.0 - p.at(i, 1));
        discrim::Ensemble ensemble(FiniteDistribution::indexed(priors),
                                   {DensityOperator::pure(PureState(v0)),
                                    DensityOperator::pure(PureState(v1))});
        double value = discrim::helstrom(ensemble).value;
        if (value > best.p_c) {
            Matrix delta = eta0 * ensemble.states[0].matrix() -
                           (1.0 - eta0) * ensemble.states[1].matrix();
            HermEig eig = herm_eig(delta);
            best = {value, {eig.eigenvalues(1), eig.eigenvalues(0), 0.0, 0.0}};
        }
    }
    return best;
}

std::vector<double> default_eta_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(k / 200.0);
    grid.push_back(1.0 - 1e-2);
    grid.push_back(1.0 - 1e-3);
    grid.push_back(1.0 - 1e-4);
    return grid;
}

bool is_exception_class(const ProbFunctionTable& p) {
    constexpr double tol = 1e-12;
    bool alice_moot = std::abs(p.at(0, 0) - p.at(1, 0)) <= tol &&
                      std::abs(p.at(0, 1) - p.at(1, 1)) <= tol;
    bool bob_moot = std::abs(p.at(0, 0) - p.at(0, 1)) <= tol &&
                    std::abs(p.at(1, 0) - p.at(1, 1)) <= tol;
    return alice_moot || bob_moot;
}

ScanResult thm3_scan(const ProbFunctionTable& p, const std::vector<double>& grid) {
    require(!grid.empty(), "thm3_scan: empty grid");
    ScanResult out;
    for (double eta0 : grid) {
        double p_c = helstrom_cheat_2x2(p, eta0, Sided::Two).p_c;
        double p_h = honest_best(p, eta0);
        if (p_c > p_h + 1e-9) {
            out.found = true;
            out.eta_star = eta0;
            return out;
        }
    }
    return out;
}

OneSidedCheck one_sided_check(const ProbFunctionTable& p, int i, double eta0) {
    require(i == 0 || i == 1, "one_sided_check: input bit expected");
    Vector v0(2), v1(2);
    v0 << std::sqrt(p.at(i, 0)), std::sqrt(1.0 - p.at(i, 0));
    v1 << std::sqrt(p.at(i, 1)), std::sqrt(1.0 - p.at(i, 1));
    RealVector priors(2);
    priors << eta0, 1.0 - eta0;
    discrim::Ensemble ensemble(FiniteDistribution::indexed(priors),
                               {DensityOperator::pure(PureState(v0)),
                                DensityOperator::pure(PureState(v1))});

    PovmSet basis = PovmSet::computational(2);
    PovmSet swapped({basis.element(1), basis.element(0)});
    bool optimal = discrim::check_optimality(ensemble, basis).optimal ||
                   discrim::check_optimality(ensemble, swapped).optimal;
    return {optimal, discrim::helstrom(ensemble).value};
}

// --- OT ------------------------------------------------------------------------------

OtDemo ot_demo() {
    // receiver-side outcome probabilities over {0, 1, ?} per sender bit
    Eigen::MatrixXd ot_table(3, 2);
    ot_table << 0.5, 0.0,
                0.0, 0.5,
                0.5, 0.5;
    discrim::Ensemble ensemble(
        FiniteDistribution::uniform(2),
        {DensityOperator::pure(one_input_box_state(ot_table, 0)),
         DensityOperator::pure(one_input_box_state(ot_table, 1))});

    // honest readout {|0>,|1>,|?>}: certain on a bit outcome, coin flip on ?
    double p_honest = 0.5 * (0.5 + 0.5 * 0.5) + 0.5 * (0.5 + 0.5 * 0.5);

    auto attack = discrim::helstrom(ensemble);
    const double r3 = std::sqrt(3.0);
    Matrix e0(3, 3);
    e0 << 2 + r3, -1, 1 + r3,
          -1, 2 - r3, 1 - r3,
          1 + r3, 1 - r3, 2;
    e0 /= 6.0;

    bool optimal = discrim::check_optimality(ensemble, attack.povm).optimal;
    double match = (attack.povm.element(0) - e0).cwiseAbs().maxCoeff();
    return {p_honest, attack.value, std::move(attack.povm), optimal, match};
}

}  // namespace qcrypt::attacklab
