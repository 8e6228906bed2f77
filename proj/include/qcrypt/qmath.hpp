#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcrypt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Validation tolerance for state/measurement invariants; eigenvalues above
// -kTol are clamped to zero when positivity is required.
inline constexpr double kTol = 1e-9;
// Outcomes below this probability carry no post-measurement state.
inline constexpr double kProbFloor = 1e-12;

class PureState {
  public:
    explicit PureState(Vector amplitudes);
    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(amps_.size()); }
    const Vector& amplitudes() const { return amps_; }

  private:
    Vector amps_;
};

class DensityOperator {
  public:
    explicit DensityOperator(Matrix m);
    static DensityOperator pure(const PureState& psi);
    static DensityOperator maximally_mixed(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

  private:
    Matrix m_;
};

class PovmSet {
  public:
    explicit PovmSet(std::vector<Matrix> elements);
    // Projectors onto the given orthonormal states, one outcome per state.
    static PovmSet projective(const std::vector<PureState>& basis);
    static PovmSet computational(int dim);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const Matrix& element(int i) const { return elems_.at(i); }
    const std::vector<Matrix>& elements() const { return elems_; }

  private:
    std::vector<Matrix> elems_;
    int dim_ = 0;
};

class UnitaryOp {
  public:
    explicit UnitaryOp(Matrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

    PureState apply(const PureState& psi) const;
    DensityOperator apply(const DensityOperator& rho) const;

  private:
    Matrix m_;
};

class FiniteDistribution {
  public:
    FiniteDistribution(std::vector<std::string> labels, RealVector probs);
    // Labels "0", "1", ... for measurement outcomes and the like.
    static FiniteDistribution indexed(RealVector probs);
    static FiniteDistribution uniform(int n);

    int size() const { return static_cast<int>(probs_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const RealVector& probs() const { return probs_; }
    double prob(int i) const { return probs_(i); }

  private:
    std::vector<std::string> labels_;
    RealVector probs_;
};

// --- operations -----------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
Matrix kron(const Matrix& a, const Matrix& b);

// Trace out the factors not listed in `keep`; factor_dims must multiply to
// rho.dim and keep must be a nonempty subset of factor indices.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& factor_dims,
                              const std::vector<int>& keep);

struct MeasurementResult {
    FiniteDistribution outcome_probs;
    // Post-measurement states; absent for outcomes with probability <= 1e-12.
    std::vector<std::optional<DensityOperator>> post_states;
};

MeasurementResult measure_povm(const DensityOperator& rho, const PovmSet& povm);

struct NeumarkDilation {
    UnitaryOp unitary;           // acts on ancilla (dim = #outcomes) x system
    PovmSet ancilla_projectors;  // |i><i| (x) 1 on the dilated space
    int ancilla_dim = 0;
    int system_dim = 0;
};

NeumarkDilation dilate_povm(const PovmSet& povm);

// Outcome distribution obtained by running rho through the dilation: ancilla
// prepared in |0>, unitary applied, ancilla projectors measured.
FiniteDistribution dilated_statistics(const NeumarkDilation& dilation,
                                      const DensityOperator& rho);

double trace_distance(const DensityOperator& a, const DensityOperator& b);
double trace_distance(const FiniteDistribution& a, const FiniteDistribution& b);

// Base-2 quantum relative entropy; +infinity when supp(rho) is not contained
// in supp(sigma).
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

// --- dense Hermitian helpers ----------------------------------------------

struct HermEig {
    RealVector eigenvalues;
    Matrix eigenvectors;  // columns
};

HermEig herm_eig(const Matrix& m);

// f applied to the spectrum of a Hermitian matrix.
Matrix herm_apply(const Matrix& m, double (*f)(double));
Matrix psd_sqrt(const Matrix& m);
// Pseudo-inverse square root on the support (eigenvalues > cutoff).
Matrix psd_inv_sqrt(const Matrix& m, double cutoff = 1e-10);
Matrix support_projector(const Matrix& m, double cutoff = 1e-10);

double min_eigenvalue(const Matrix& herm);
bool is_hermitian(const Matrix& m, double tol = kTol);

}  // namespace qcrypt
