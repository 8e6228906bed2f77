#include "qcrypt/qmath.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace qcrypt {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// --- types ------------------------------------------------------------------

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
    require(amps_.size() > 0, "PureState: empty amplitude vector");
    double n2 = amps_.squaredNorm();
    require(std::abs(n2 - 1.0) <= kTol, "PureState: squared norm " + std::to_string(n2) + " != 1");
}

PureState PureState::basis(int dim, int index) {
    require(dim > 0 && index >= 0 && index < dim, "PureState::basis: bad index");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

DensityOperator::DensityOperator(Matrix m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols() && m_.rows() > 0, "DensityOperator: not square");
    require(is_hermitian(m_), "DensityOperator: not Hermitian");
    require(std::abs(m_.trace().real() - 1.0) <= kTol && std::abs(m_.trace().imag()) <= kTol,
            "DensityOperator: trace != 1");
    require(min_eigenvalue(m_) >= -kTol, "DensityOperator: negative eigenvalue");
}

DensityOperator DensityOperator::pure(const PureState& psi) {
    const Vector& v = psi.amplitudes();
    return DensityOperator(v * v.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
    return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

PovmSet::PovmSet(std::vector<Matrix> elements) : elems_(std::move(elements)) {
    require(!elems_.empty(), "PovmSet: no elements");
    dim_ = static_cast<int>(elems_[0].rows());
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (const Matrix& e : elems_) {
        require(e.rows() == dim_ && e.cols() == dim_, "PovmSet: element dimension mismatch");
        require(is_hermitian(e), "PovmSet: element not Hermitian");
        require(min_eigenvalue(e) >= -kTol, "PovmSet: element not positive");
        sum += e;
    }
    require((sum - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() <= kTol,
            "PovmSet: elements do not sum to identity");
}

PovmSet PovmSet::projective(const std::vector<PureState>& basis) {
    std::vector<Matrix> elems;
    elems.reserve(basis.size());
    for (const PureState& s : basis) {
        const Vector& v = s.amplitudes();
        elems.push_back(v * v.adjoint());
    }
    return PovmSet(std::move(elems));
}

PovmSet PovmSet::computational(int dim) {
    std::vector<Matrix> elems;
    for (int i = 0; i < dim; ++i) {
        Matrix e = Matrix::Zero(dim, dim);
        e(i, i) = 1.0;
        elems.push_back(std::move(e));
    }
    return PovmSet(std::move(elems));
}

UnitaryOp::UnitaryOp(Matrix m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols() && m_.rows() > 0, "UnitaryOp: not square");
    Matrix prod = m_ * m_.adjoint();
    require((prod - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() <= kTol,
            "UnitaryOp: not unitary");
}

PureState UnitaryOp::apply(const PureState& psi) const {
    require(psi.dim() == dim(), "UnitaryOp::apply: dimension mismatch");
    return PureState(m_ * psi.amplitudes());
}

DensityOperator UnitaryOp::apply(const DensityOperator& rho) const {
    require(rho.dim() == dim(), "UnitaryOp::apply: dimension mismatch");
    return DensityOperator(m_ * rho.matrix() * m_.adjoint());
}

FiniteDistribution::FiniteDistribution(std::vector<std::string> labels, RealVector probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
    require(static_cast<int>(labels_.size()) == probs_.size(),
            "FiniteDistribution: label/prob size mismatch");
    require(probs_.size() > 0, "FiniteDistribution: empty");
    for (int i = 0; i < probs_.size(); ++i)
        require(probs_(i) >= 0.0, "FiniteDistribution: negative probability");
    require(std::abs(probs_.sum() - 1.0) <= 1e-12, "FiniteDistribution: probabilities do not sum to 1");
    for (size_t i = 0; i < labels_.size(); ++i)
        for (size_t j = i + 1; j < labels_.size(); ++j)
            require(labels_[i] != labels_[j], "FiniteDistribution: duplicate label");
}

FiniteDistribution FiniteDistribution::indexed(RealVector probs) {
    std::vector<std::string> labels(probs.size());
    for (int i = 0; i < probs.size(); ++i) labels[i] = std::to_string(i);
    return FiniteDistribution(std::move(labels), std::move(probs));
}

FiniteDistribution FiniteDistribution::uniform(int n) {
    return indexed(RealVector::Constant(n, 1.0 / n));
}

// --- helpers ----------------------------------------------------------------

bool is_hermitian(const Matrix& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermEig herm_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix herm_apply(const Matrix& m, double (*f)(double)) {
    HermEig eig = herm_eig(m);
    RealVector fv = eig.eigenvalues.unaryExpr([f](double x) { return f(x); });
    return eig.eigenvectors * fv.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix psd_sqrt(const Matrix& m) {
    HermEig eig = herm_eig(m);
    RealVector s = eig.eigenvalues.unaryExpr([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
    return eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix psd_inv_sqrt(const Matrix& m, double cutoff) {
    HermEig eig = herm_eig(m);
    RealVector s = eig.eigenvalues.unaryExpr(
        [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
    return eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix support_projector(const Matrix& m, double cutoff) {
    HermEig eig = herm_eig(m);
    RealVector s = eig.eigenvalues.unaryExpr(
        [cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
    return eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.adjoint();
}

double min_eigenvalue(const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// --- operations ---------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

PureState tensor(const PureState& a, const PureState& b) {
    Vector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j)
            out(i * b.dim() + j) = a.amplitudes()(i) * b.amplitudes()(j);
    return PureState(std::move(out));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(kron(a.matrix(), b.matrix()));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<int>& factor_dims,
                              const std::vector<int>& keep) {
    const int k = static_cast<int>(factor_dims.size());
    long total = 1;
    for (int d : factor_dims) {
        require(d > 0, "partial_trace: nonpositive factor dimension");
        total *= d;
    }
    require(total == rho.dim(), "partial_trace: factor dims inconsistent with state dimension");
    require(!keep.empty(), "partial_trace: keep set empty");
    std::vector<bool> kept(k, false);
    for (int idx : keep) {
        require(idx >= 0 && idx < k, "partial_trace: keep index out of range");
        require(!kept[idx], "partial_trace: duplicate keep index");
        kept[idx] = true;
    }

    std::vector<int> keep_sorted, traced;
    for (int i = 0; i < k; ++i) (kept[i] ? keep_sorted : traced).push_back(i);

    long keep_dim = 1, trace_dim = 1;
    for (int i : keep_sorted) keep_dim *= factor_dims[i];
    for (int i : traced) trace_dim *= factor_dims[i];

    // Strides of each factor in the flat row-major multi-index.
    std::vector<long> stride(k, 1);
    for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * factor_dims[i + 1];

    auto flat_index = [&](long kept_part, long traced_part) {
        long idx = 0;
        long rem = kept_part;
        for (int pos = static_cast<int>(keep_sorted.size()) - 1; pos >= 0; --pos) {
            int f = keep_sorted[pos];
            idx += (rem % factor_dims[f]) * stride[f];
            rem /= factor_dims[f];
        }
        rem = traced_part;
        for (int pos = static_cast<int>(traced.size()) - 1; pos >= 0; --pos) {
            int f = traced[pos];
            idx += (rem % factor_dims[f]) * stride[f];
            rem /= factor_dims[f];
        }
        return idx;
    };

    Matrix out = Matrix::Zero(keep_dim, keep_dim);
    for (long a = 0; a < keep_dim; ++a)
        for (long b = 0; b < keep_dim; ++b) {
            Complex sum = 0.0;
            for (long t = 0; t < trace_dim; ++t)
                sum += rho.matrix()(flat_index(a, t), flat_index(b, t));
            out(a, b) = sum;
        }
    // Round off Hermiticity noise from the summation.
    out = (out + out.adjoint().eval()) / 2.0;
    return DensityOperator(std::move(out));
}

MeasurementResult measure_povm(const DensityOperator& rho, const PovmSet& povm) {
    require(rho.dim() == povm.dim(), "measure_povm: dimension mismatch");
    const int n = povm.size();
    RealVector probs(n);
    for (int i = 0; i < n; ++i)
        probs(i) = std::max(0.0, (povm.element(i) * rho.matrix()).trace().real());
    double total = probs.sum();
    require(std::abs(total - 1.0) <= kTol, "measure_povm: probabilities do not sum to 1");

    std::vector<std::optional<DensityOperator>> post(n);
    for (int i = 0; i < n; ++i) {
        if (probs(i) <= kProbFloor) continue;
        Matrix root = psd_sqrt(povm.element(i));
        Matrix m = root * rho.matrix() * root;
        m /= m.trace().real();
        m = (m + m.adjoint().eval()) / 2.0;
        post[i] = DensityOperator(std::move(m));
    }
    return {FiniteDistribution::indexed(probs / total), std::move(post)};
}

NeumarkDilation dilate_povm(const PovmSet& povm) {
    const int d = povm.dim();
    const int m = povm.size();
    const int dd = m * d;  // ancilla-major ordering: index = anc * d + sys

    // Isometry V: |psi> -> sum_i |i> (x) sqrt(E_i)|psi>, specified on the
    // ancilla-|0> block of the full unitary.
    Matrix V(dd, d);
    for (int i = 0; i < m; ++i) V.block(i * d, 0, d, d) = psd_sqrt(povm.element(i));

    // Complete the isometry columns to a full unitary. QR of V gives Q whose
    // first d columns equal V up to column phases; undo the phases so the
    // specified block is reproduced exactly.
    Eigen::HouseholderQR<Matrix> qr(V);
    Matrix Q = qr.householderQ();
    Matrix R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) Q.col(j) *= R(j, j) / std::abs(R(j, j));

    // Inputs (anc=0, sys=j) are flat indices 0..d-1, so Q is the unitary.
    Matrix U = std::move(Q);

    std::vector<Matrix> projectors;
    projectors.reserve(m);
    for (int i = 0; i < m; ++i) {
        Matrix p = Matrix::Zero(dd, dd);
        p.block(i * d, i * d, d, d) = Matrix::Identity(d, d);
        projectors.push_back(std::move(p));
    }
    return {UnitaryOp(std::move(U)), PovmSet(std::move(projectors)), m, d};
}

FiniteDistribution dilated_statistics(const NeumarkDilation& dilation,
                                      const DensityOperator& rho) {
    const int d = dilation.system_dim;
    const int m = dilation.ancilla_dim;
    require(rho.dim() == d, "dilated_statistics: dimension mismatch");
    Matrix anc0 = Matrix::Zero(m, m);
    anc0(0, 0) = 1.0;
    Matrix joint = kron(anc0, rho.matrix());
    const Matrix& u = dilation.unitary.matrix();
    Matrix evolved = u * joint * u.adjoint();
    RealVector probs(m);
    for (int i = 0; i < m; ++i)
        probs(i) = std::max(0.0, (dilation.ancilla_projectors.element(i) * evolved).trace().real());
    return FiniteDistribution::indexed(probs / probs.sum());
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    require(a.dim() == b.dim(), "trace_distance: dimension mismatch");
    HermEig eig = herm_eig(a.matrix() - b.matrix());
    return 0.5 * eig.eigenvalues.cwiseAbs().sum();
}

double trace_distance(const FiniteDistribution& a, const FiniteDistribution& b) {
    require(a.labels() == b.labels(), "trace_distance: alphabets differ");
    return 0.5 * (a.probs() - b.probs()).cwiseAbs().sum();
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    require(rho.dim() == sigma.dim(), "relative_entropy: dimension mismatch");
    HermEig er = herm_eig(rho.matrix());
    HermEig es = herm_eig(sigma.matrix());
    constexpr double kSupportCut = 1e-12;

    double tr_rho_log_rho = 0.0;
    for (int i = 0; i < er.eigenvalues.size(); ++i) {
        double p = er.eigenvalues(i);
        if (p > kSupportCut) tr_rho_log_rho += p * std::log2(p);
    }

    double tr_rho_log_sigma = 0.0;
    for (int i = 0; i < er.eigenvalues.size(); ++i) {
        double p = er.eigenvalues(i);
        if (p <= kSupportCut) continue;
        for (int j = 0; j < es.eigenvalues.size(); ++j) {
            double q = es.eigenvalues(j);
            double overlap = std::norm(es.eigenvectors.col(j).dot(er.eigenvectors.col(i)));
            if (overlap <= kTol) continue;
            if (q <= kSupportCut) return std::numeric_limits<double>::infinity();
            tr_rho_log_sigma += p * overlap * std::log2(q);
        }
    }
    double value = tr_rho_log_rho - tr_rho_log_sigma;
    return std::abs(value) < kTol ? 0.0 : value;
}

}  // namespace qcrypt
