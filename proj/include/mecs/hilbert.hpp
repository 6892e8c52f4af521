#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Truncated tensor-product Hilbert spaces and operator algebra for qubits,
// three-level systems, and bosonic modes.
//
// Conventions used throughout:
//   - subsystem 0 is the slowest tensor index (kron order: A (x) B has A slow);
//   - bosonic modes are Fock-truncated at n <= truncation, dim = truncation+1;
//   - x = (b + b^dag)/sqrt(2), p = i(b^dag - b)/sqrt(2), so [x, p] = i;
//   - operators are stored sparse, density matrices and state vectors dense.

namespace mecs {

using cxd = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cxd>;
using StateVector = Eigen::VectorXcd;

inline constexpr cxd ci{0.0, 1.0};

enum class SubsystemKind { qubit, qutrit, boson };

struct SubsystemSpec {
    SubsystemKind kind = SubsystemKind::qubit;
    int truncation = 1;  // bosonic Fock cutoff N_max; ignored for qubit/qutrit

    int dimension() const {
        switch (kind) {
            case SubsystemKind::qubit: return 2;
            case SubsystemKind::qutrit: return 3;
            case SubsystemKind::boson: return truncation + 1;
        }
        return 0;
    }

    static SubsystemSpec qubit() { return {SubsystemKind::qubit, 1}; }
    static SubsystemSpec qutrit() { return {SubsystemKind::qutrit, 2}; }
    static SubsystemSpec boson(int n_max) {
        if (n_max < 1) throw std::invalid_argument("boson truncation must be >= 1");
        return {SubsystemKind::boson, n_max};
    }

    bool operator==(const SubsystemSpec& o) const {
        return kind == o.kind && dimension() == o.dimension();
    }
};

class CompositeSpace {
  public:
    CompositeSpace() = default;
    explicit CompositeSpace(std::vector<SubsystemSpec> subs) : subsystems_(std::move(subs)) {
        if (subsystems_.empty()) throw std::invalid_argument("CompositeSpace: no subsystems");
        dimension_ = 1;
        for (const auto& s : subsystems_) dimension_ *= s.dimension();
        strides_.assign(subsystems_.size(), 1);
        for (int i = static_cast<int>(subsystems_.size()) - 2; i >= 0; --i)
            strides_[i] = strides_[i + 1] * subsystems_[i + 1].dimension();
    }

    long dimension() const { return dimension_; }
    int count() const { return static_cast<int>(subsystems_.size()); }
    const SubsystemSpec& subsystem(int i) const { return subsystems_.at(i); }
    const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }
    long stride(int i) const { return strides_.at(i); }

    bool operator==(const CompositeSpace& o) const { return subsystems_ == o.subsystems_; }
    bool operator!=(const CompositeSpace& o) const { return !(*this == o); }

    // Flat basis index from per-subsystem indices.
    long index(const std::vector<int>& idx) const {
        long n = 0;
        for (int i = 0; i < count(); ++i) n += strides_[i] * idx[i];
        return n;
    }

  private:
    std::vector<SubsystemSpec> subsystems_;
    std::vector<long> strides_;
    long dimension_ = 0;
};

inline void require_same_space(const CompositeSpace& a, const CompositeSpace& b,
                               const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": space mismatch");
}

struct Operator {
    CompositeSpace space;
    SparseMatrix mat;

    Operator() = default;
    Operator(CompositeSpace s, SparseMatrix m) : space(std::move(s)), mat(std::move(m)) {
        if (mat.rows() != space.dimension() || mat.cols() != space.dimension())
            throw std::invalid_argument("Operator: matrix size does not match space");
    }
    Operator(CompositeSpace s, const DenseMatrix& m)
        : Operator(std::move(s), SparseMatrix(m.sparseView())) {}

    DenseMatrix dense() const { return DenseMatrix(mat); }

    Operator adjoint() const { return {space, SparseMatrix(mat.adjoint())}; }

    Operator operator*(const Operator& o) const {
        require_same_space(space, o.space, "Operator product");
        return {space, SparseMatrix(mat * o.mat)};
    }
    Operator operator+(const Operator& o) const {
        require_same_space(space, o.space, "Operator sum");
        return {space, SparseMatrix(mat + o.mat)};
    }
    Operator operator-(const Operator& o) const {
        require_same_space(space, o.space, "Operator difference");
        return {space, SparseMatrix(mat - o.mat)};
    }
    Operator operator*(cxd c) const { return {space, SparseMatrix(c * mat)}; }
    friend Operator operator*(cxd c, const Operator& o) { return o * c; }
};

struct PureState {
    CompositeSpace space;
    StateVector amp;

    PureState() = default;
    PureState(CompositeSpace s, StateVector a) : space(std::move(s)), amp(std::move(a)) {
        if (amp.size() != space.dimension())
            throw std::invalid_argument("PureState: vector size does not match space");
    }

    double norm() const { return amp.norm(); }
    void normalize() {
        const double n = amp.norm();
        if (n == 0.0) throw std::invalid_argument("PureState: cannot normalize null vector");
        amp /= n;
    }
};

struct DensityOperator {
    CompositeSpace space;
    DenseMatrix mat;

    DensityOperator() = default;
    DensityOperator(CompositeSpace s, DenseMatrix m) : space(std::move(s)), mat(std::move(m)) {
        if (mat.rows() != space.dimension() || mat.cols() != space.dimension())
            throw std::invalid_argument("DensityOperator: matrix size does not match space");
    }

    static DensityOperator from_pure(const PureState& psi) {
        return {psi.space, DenseMatrix(psi.amp * psi.amp.adjoint())};
    }

    cxd trace() const { return mat.trace(); }

    double hermiticity_deviation() const {
        return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (mat + mat.adjoint()),
                                                      Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    // Trace within 1e-9, Hermitian within 1e-9 elementwise, min eigenvalue >= -1e-7.
    void validate(double trace_tol = 1e-9, double herm_tol = 1e-9,
                  double psd_slack = 1e-7) const {
        if (std::abs(trace().real() - 1.0) > trace_tol || std::abs(trace().imag()) > trace_tol)
            throw std::invalid_argument("DensityOperator: trace deviates from 1");
        if (hermiticity_deviation() > herm_tol)
            throw std::invalid_argument("DensityOperator: not Hermitian");
        if (min_eigenvalue() < -psd_slack)
            throw std::invalid_argument("DensityOperator: negative eigenvalue beyond slack");
    }
};

// ---------------------------------------------------------------------------
// Local (single-subsystem) matrices.

inline SparseMatrix sparse_from_triplets(long dim,
                                         const std::vector<Eigen::Triplet<cxd>>& t) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

inline CompositeSpace single_boson_space(int truncation) {
    return CompositeSpace({SubsystemSpec::boson(truncation)});
}

// a with a[n-1, n] = sqrt(n). At the cutoff [a, a^dag] deviates from the
// identity in the last Fock level only: ([a,a^dag])_{NN} = -N.
inline Operator annihilation(int truncation) {
    if (truncation < 1) throw std::invalid_argument("annihilation: truncation must be >= 1");
    std::vector<Eigen::Triplet<cxd>> t;
    for (int n = 1; n <= truncation; ++n)
        t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    return {single_boson_space(truncation), sparse_from_triplets(truncation + 1, t)};
}

inline Operator creation(int truncation) { return annihilation(truncation).adjoint(); }

inline Operator number_operator(int truncation) {
    std::vector<Eigen::Triplet<cxd>> t;
    for (int n = 1; n <= truncation; ++n) t.emplace_back(n, n, static_cast<double>(n));
    return {single_boson_space(truncation), sparse_from_triplets(truncation + 1, t)};
}

// x = (b + b^dag)/sqrt(2)
inline Operator position_operator(int truncation) {
    auto b = annihilation(truncation);
    return {b.space, SparseMatrix((b.mat + SparseMatrix(b.mat.adjoint())) / std::sqrt(2.0))};
}

// p = i(b^dag - b)/sqrt(2)
inline Operator momentum_operator(int truncation) {
    auto b = annihilation(truncation);
    return {b.space, SparseMatrix(ci * (SparseMatrix(b.mat.adjoint()) - b.mat) / std::sqrt(2.0))};
}

inline Operator identity_operator(const CompositeSpace& space) {
    SparseMatrix m(space.dimension(), space.dimension());
    m.setIdentity();
    return {space, std::move(m)};
}

// |j><k| on a d-level space.
inline SparseMatrix transition_matrix(int j, int k, int dim) {
    std::vector<Eigen::Triplet<cxd>> t{{j, k, cxd(1.0, 0.0)}};
    return sparse_from_triplets(dim, t);
}

inline SparseMatrix projector_matrix(int level, int dim) {
    return transition_matrix(level, level, dim);
}

// ---------------------------------------------------------------------------
// Tensor structure.

inline SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<cxd>> t;
    t.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    t.emplace_back(ia.row() * b.rows() + ib.row(),
                                   ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
}

inline CompositeSpace tensor_space(const CompositeSpace& a, const CompositeSpace& b) {
    std::vector<SubsystemSpec> subs = a.subsystems();
    subs.insert(subs.end(), b.subsystems().begin(), b.subsystems().end());
    return CompositeSpace(subs);
}

inline Operator tensor(const Operator& a, const Operator& b) {
    return {tensor_space(a.space, b.space), kron_sparse(a.mat, b.mat)};
}

inline PureState tensor(const PureState& a, const PureState& b) {
    StateVector v(a.amp.size() * b.amp.size());
    for (long i = 0; i < a.amp.size(); ++i)
        v.segment(i * b.amp.size(), b.amp.size()) = a.amp[i] * b.amp;
    return {tensor_space(a.space, b.space), std::move(v)};
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    DenseMatrix m(a.mat.rows() * b.mat.rows(), a.mat.cols() * b.mat.cols());
    for (long i = 0; i < a.mat.rows(); ++i)
        for (long j = 0; j < a.mat.cols(); ++j)
            m.block(i * b.mat.rows(), j * b.mat.cols(), b.mat.rows(), b.mat.cols()) =
                a.mat(i, j) * b.mat;
    return {tensor_space(a.space, b.space), std::move(m)};
}

// Embed an operator on the subsystems named by `indices` (strictly increasing)
// into the full space, acting as identity elsewhere. The local operator's rows
// and columns follow the same subsystem ordering as `indices`.
inline Operator embed_on(const SparseMatrix& local, const CompositeSpace& space,
                         const std::vector<int>& indices) {
    const int k = static_cast<int>(indices.size());
    if (k == 0) throw std::invalid_argument("embed_on: empty index list");
    long local_dim = 1;
    for (int i = 0; i < k; ++i) {
        if (indices[i] < 0 || indices[i] >= space.count())
            throw std::invalid_argument("embed_on: subsystem index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("embed_on: indices must be strictly increasing");
        local_dim *= space.subsystem(indices[i]).dimension();
    }
    if (local.rows() != local_dim || local.cols() != local_dim)
        throw std::invalid_argument("embed_on: operator dimension does not match subsystems");

    // Strides of the named subsystems inside the full space, and an
    // enumeration of the complement.
    std::vector<long> sel_stride(k), sel_dim(k);
    for (int i = 0; i < k; ++i) {
        sel_stride[i] = space.stride(indices[i]);
        sel_dim[i] = space.subsystem(indices[i]).dimension();
    }
    std::vector<int> rest;
    for (int i = 0; i < space.count(); ++i)
        if (std::find(indices.begin(), indices.end(), i) == indices.end()) rest.push_back(i);
    long rest_dim = 1;
    for (int i : rest) rest_dim *= space.subsystem(i).dimension();

    auto local_to_offset = [&](long flat) {
        long off = 0;
        for (int i = k - 1; i >= 0; --i) {
            off += (flat % sel_dim[i]) * sel_stride[i];
            flat /= sel_dim[i];
        }
        return off;
    };
    std::vector<long> rest_offsets(rest_dim, 0);
    for (long r = 0; r < rest_dim; ++r) {
        long flat = r, off = 0;
        for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
            const long d = space.subsystem(rest[i]).dimension();
            off += (flat % d) * space.stride(rest[i]);
            flat /= d;
        }
        rest_offsets[r] = off;
    }

    std::vector<Eigen::Triplet<cxd>> t;
    t.reserve(static_cast<size_t>(local.nonZeros()) * static_cast<size_t>(rest_dim));
    for (int kc = 0; kc < local.outerSize(); ++kc)
        for (SparseMatrix::InnerIterator it(local, kc); it; ++it) {
            const long ro = local_to_offset(it.row());
            const long co = local_to_offset(it.col());
            for (long r = 0; r < rest_dim; ++r)
                t.emplace_back(ro + rest_offsets[r], co + rest_offsets[r], it.value());
        }
    return {space, sparse_from_triplets(space.dimension(), t)};
}

inline Operator embed(const Operator& op, const CompositeSpace& space, int index) {
    if (index < 0 || index >= space.count())
        throw std::invalid_argument("embed: subsystem index out of range");
    if (op.space.count() != 1 ||
        op.space.subsystem(0).dimension() != space.subsystem(index).dimension())
        throw std::invalid_argument("embed: operator does not match subsystem dimension");
    return embed_on(op.mat, space, {index});
}

// ---------------------------------------------------------------------------
// States.

inline PureState basis_state(const CompositeSpace& space, const std::vector<int>& levels) {
    if (static_cast<int>(levels.size()) != space.count())
        throw std::invalid_argument("basis_state: wrong number of level indices");
    for (int i = 0; i < space.count(); ++i)
        if (levels[i] < 0 || levels[i] >= space.subsystem(i).dimension())
            throw std::invalid_argument("basis_state: level index out of range");
    StateVector v = StateVector::Zero(space.dimension());
    v[space.index(levels)] = 1.0;
    return {space, std::move(v)};
}

inline PureState vacuum_state(const CompositeSpace& space) {
    return basis_state(space, std::vector<int>(space.count(), 0));
}

inline PureState apply(const Operator& op, const PureState& psi) {
    require_same_space(op.space, psi.space, "apply");
    return {psi.space, StateVector(op.mat * psi.amp)};
}

inline DensityOperator conjugate(const Operator& u, const DensityOperator& rho) {
    require_same_space(u.space, rho.space, "conjugate");
    return {rho.space, DenseMatrix(u.mat * rho.mat * u.mat.adjoint())};
}

inline cxd overlap(const PureState& a, const PureState& b) {
    require_same_space(a.space, b.space, "overlap");
    return a.amp.dot(b.amp);  // Eigen's dot conjugates the left argument
}

// ---------------------------------------------------------------------------
// Matrix exponentials. All generators in this artifact are (anti-)Hermitian,
// so eigendecomposition gives exactly unitary results.

// exp(-i H t) for Hermitian H.
inline DenseMatrix expm_i_hermitian(const DenseMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expm_i_hermitian: eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    StateVector phases(ev.size());
    for (long i = 0; i < ev.size(); ++i) phases[i] = std::exp(-ci * ev[i] * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Operator evolution_operator(const Operator& hamiltonian, double t) {
    return {hamiltonian.space, expm_i_hermitian(hamiltonian.dense(), t)};
}

// exp(G) for anti-Hermitian G (writes G = -i(iG) with iG Hermitian).
inline DenseMatrix expm_antihermitian(const DenseMatrix& g) {
    return expm_i_hermitian(ci * g, 1.0);
}

// ---------------------------------------------------------------------------
// Displacements and coherent states.

// D(alpha) = exp(alpha a^dag - conj(alpha) a) on a truncated mode.
inline Operator displacement(cxd alpha, int truncation) {
    auto a = annihilation(truncation);
    DenseMatrix gen = alpha * DenseMatrix(a.mat.adjoint()) - std::conj(alpha) * a.dense();
    return {a.space, expm_antihermitian(gen)};
}

// Weight of the coherent state |alpha> beyond the Fock cutoff. Exposed as the
// truncation-quality diagnostic for displacement/coherent_state callers.
inline double coherent_tail_weight(cxd alpha, int truncation) {
    const double n_mean = std::norm(alpha);
    double term = std::exp(-n_mean), kept = term;
    for (int n = 1; n <= truncation; ++n) {
        term *= n_mean / n;
        kept += term;
    }
    return std::max(0.0, 1.0 - kept);
}

inline PureState coherent_state(cxd alpha, int truncation) {
    PureState psi = apply(displacement(alpha, truncation),
                          vacuum_state(single_boson_space(truncation)));
    psi.normalize();
    return psi;
}

// Truncated-and-renormalized geometric distribution. Exact fixed point of the
// truncated thermal dissipator (the edge terms cancel pairwise).
inline DensityOperator thermal_state(double n_bar, int truncation) {
    if (n_bar < 0) throw std::invalid_argument("thermal_state: n_bar must be >= 0");
    const CompositeSpace space = single_boson_space(truncation);
    DenseMatrix m = DenseMatrix::Zero(space.dimension(), space.dimension());
    if (n_bar == 0.0) {
        m(0, 0) = 1.0;
        return {space, std::move(m)};
    }
    const double q = n_bar / (n_bar + 1.0);
    double p = 1.0, norm = 0.0;
    for (int n = 0; n <= truncation; ++n, p *= q) {
        m(n, n) = p;
        norm += p;
    }
    m /= norm;
    return {space, std::move(m)};
}

// ---------------------------------------------------------------------------
// Traces and expectations.

inline cxd expectation(const DensityOperator& rho, const Operator& op) {
    require_same_space(rho.space, op.space, "expectation");
    // Tr(rho op) = sum_{ij} op_ij rho_ji over the nonzeros of op.
    cxd tr = 0.0;
    for (int k = 0; k < op.mat.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.mat, k); it; ++it)
            tr += it.value() * rho.mat(it.col(), it.row());
    return tr;
}

inline cxd expectation(const PureState& psi, const Operator& op) {
    require_same_space(psi.space, op.space, "expectation");
    return psi.amp.dot(op.mat * psi.amp);
}

namespace detail {

struct TraceLayout {
    std::vector<int> keep;       // sorted kept subsystem indices
    std::vector<long> keep_off;  // flat offsets of each kept multi-index
    std::vector<long> rest_off;  // flat offsets of each traced multi-index
    CompositeSpace reduced;
};

inline TraceLayout trace_layout(const CompositeSpace& space, std::vector<int> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int i : keep)
        if (i < 0 || i >= space.count())
            throw std::invalid_argument("partial_trace: subsystem index out of range");

    std::vector<int> rest;
    for (int i = 0; i < space.count(); ++i)
        if (!std::binary_search(keep.begin(), keep.end(), i)) rest.push_back(i);

    auto offsets = [&](const std::vector<int>& subs) {
        long dim = 1;
        for (int i : subs) dim *= space.subsystem(i).dimension();
        std::vector<long> off(dim, 0);
        for (long f = 0; f < dim; ++f) {
            long flat = f, o = 0;
            for (int i = static_cast<int>(subs.size()) - 1; i >= 0; --i) {
                const long d = space.subsystem(subs[i]).dimension();
                o += (flat % d) * space.stride(subs[i]);
                flat /= d;
            }
            off[f] = o;
        }
        return off;
    };

    std::vector<SubsystemSpec> red_subs;
    for (int i : keep) red_subs.push_back(space.subsystem(i));
    return {keep, offsets(keep), offsets(rest), CompositeSpace(red_subs)};
}

}  // namespace detail

// Reduced density operator on the kept subsystems (original ordering).
inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep) {
    const auto lay = detail::trace_layout(rho.space, std::move(keep));
    const long kd = static_cast<long>(lay.keep_off.size());
    DenseMatrix out = DenseMatrix::Zero(kd, kd);
    for (long i = 0; i < kd; ++i)
        for (long j = 0; j < kd; ++j) {
            cxd s = 0.0;
            for (const long r : lay.rest_off)
                s += rho.mat(lay.keep_off[i] + r, lay.keep_off[j] + r);
            out(i, j) = s;
        }
    return {lay.reduced, std::move(out)};
}

// Partial trace of a pure state without forming the full density matrix.
inline DensityOperator partial_trace(const PureState& psi, std::vector<int> keep) {
    const auto lay = detail::trace_layout(psi.space, std::move(keep));
    const long kd = static_cast<long>(lay.keep_off.size());
    const long rd = static_cast<long>(lay.rest_off.size());
    DenseMatrix w(kd, rd);
    for (long i = 0; i < kd; ++i)
        for (long r = 0; r < rd; ++r) w(i, r) = psi.amp[lay.keep_off[i] + lay.rest_off[r]];
    return {lay.reduced, DenseMatrix(w * w.adjoint())};
}

// Reorder the subsystems of a pure state; `order[i]` names the old subsystem
// that becomes new position i.
inline PureState permute_subsystems(const PureState& psi, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != psi.space.count())
        throw std::invalid_argument("permute_subsystems: order length mismatch");
    std::vector<SubsystemSpec> subs;
    for (int o : order) subs.push_back(psi.space.subsystem(o));
    CompositeSpace target(subs);
    StateVector v(psi.amp.size());
    std::vector<int> idx(order.size(), 0);
    const int n = psi.space.count();
    for (long f = 0; f < psi.amp.size(); ++f) {
        long flat = f;
        long src = 0;
        for (int i = n - 1; i >= 0; --i) {
            const long d = target.subsystem(i).dimension();
            src += (flat % d) * psi.space.stride(order[i]);
            flat /= d;
        }
        v[f] = psi.amp[src];
    }
    return {target, std::move(v)};
}

inline double purity(const DensityOperator& rho) {
    return (rho.mat * rho.mat).trace().real();
}

}  // namespace mecs
