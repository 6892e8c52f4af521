#pragma once

#include <mecs/hilbert.hpp>

#include <cmath>
#include <stdexcept>

// Entanglement measures and target states: Wootters concurrence, the
// off-diagonal-block shortcut valid when the two-qubit populations live in the
// ge/eg sector, negativity, entangled-coherent-state targets, and fidelity.
//
// Two-qubit basis ordering is {gg, ge, eg, ee} (qubit A is the slow index).

namespace mecs {

struct ConcurrenceDiagnostics {
    double value = 0.0;  // clamped to [0, 1]
    double raw = 0.0;    // sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4) before clamping
    Eigen::Vector4d lambdas;  // eigenvalues of rho rho~, descending
};

namespace detail {

inline DenseMatrix spin_flip_matrix() {
    // sigma_y (x) sigma_y in {gg, ge, eg, ee}
    DenseMatrix f = DenseMatrix::Zero(4, 4);
    f(0, 3) = -1.0;
    f(1, 2) = 1.0;
    f(2, 1) = 1.0;
    f(3, 0) = -1.0;
    return f;
}

// PSD square root with negative-eigenvalue slack.
inline DenseMatrix psd_sqrt(const DenseMatrix& m, double slack) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues();
    for (long i = 0; i < ev.size(); ++i) {
        if (ev[i] < -slack) throw std::invalid_argument("concurrence: input not PSD");
        ev[i] = std::sqrt(std::max(0.0, ev[i]));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

inline ConcurrenceDiagnostics concurrence_diagnostics(const DensityOperator& rho,
                                                      double psd_slack = 1e-7) {
    if (rho.mat.rows() != 4)
        throw std::invalid_argument("concurrence: expects a two-qubit (4x4) state");
    const DenseMatrix f = detail::spin_flip_matrix();
    const DenseMatrix rho_tilde = f * rho.mat.conjugate() * f;
    // Eigenvalues of rho rho~ through the Hermitian product
    // sqrt(rho) rho~ sqrt(rho), which shares its nonzero spectrum.
    const DenseMatrix sq = detail::psd_sqrt(rho.mat, psd_slack);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(
        DenseMatrix(0.5 * (sq * rho_tilde * sq + (sq * rho_tilde * sq).adjoint())));
    Eigen::Vector4d l = es.eigenvalues().reverse();
    // eigenvalues below the relative noise floor are numerically zero; their
    // square roots would otherwise leak ~1e-9 into the difference
    for (int i = 0; i < 4; ++i) l[i] = (l[i] < 1e-14 * l[0]) ? 0.0 : l[i];

    ConcurrenceDiagnostics out;
    out.lambdas = l;
    out.raw = std::sqrt(l[0]) - std::sqrt(l[1]) - std::sqrt(l[2]) - std::sqrt(l[3]);
    out.value = std::min(1.0, std::max(0.0, out.raw));
    return out;
}

inline double concurrence(const DensityOperator& rho) {
    return concurrence_diagnostics(rho).value;
}

// C = 2 |Tr_m rho_{ge,eg}|, valid when the two-qubit populations are confined
// to the ge/eg sector.
inline double concurrence_from_offdiagonal(cxd block_trace) {
    return 2.0 * std::abs(block_trace);
}

// N_pm (|-a>|a> pm |a>|-a>); normalization 1/sqrt(2(1 pm e^{-4|a|^2})).
inline PureState entangled_coherent_state(cxd alpha, int sign, int truncation) {
    if (sign != +1 && sign != -1)
        throw std::invalid_argument("entangled_coherent_state: sign must be +1 or -1");
    if (sign == -1 && std::abs(alpha) == 0.0)
        throw std::invalid_argument("entangled_coherent_state: psi_minus vanishes at alpha = 0");
    auto plus = coherent_state(alpha, truncation);
    auto minus = coherent_state(-alpha, truncation);
    PureState psi = tensor(minus, plus);
    psi.amp += double(sign) * tensor(plus, minus).amp;
    psi.normalize();
    return psi;
}

// (||rho^{T_B}||_1 - 1)/2 with the partial transpose taken over the named
// subsystems.
inline double negativity(const DensityOperator& rho, const std::vector<int>& partition_b) {
    if (partition_b.empty() || static_cast<int>(partition_b.size()) >= rho.space.count())
        throw std::invalid_argument("negativity: bipartition must split the subsystem list");
    const auto& space = rho.space;
    const long d = space.dimension();

    std::vector<int> dims(space.count()), in_b(space.count(), 0);
    for (int i = 0; i < space.count(); ++i) dims[i] = space.subsystem(i).dimension();
    for (int i : partition_b) {
        if (i < 0 || i >= space.count())
            throw std::invalid_argument("negativity: subsystem index out of range");
        in_b[i] = 1;
    }

    auto split = [&](long flat, std::vector<int>& idx) {
        for (int i = space.count() - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(flat % dims[i]);
            flat /= dims[i];
        }
    };

    DenseMatrix pt(d, d);
    std::vector<int> ri(space.count()), ci(space.count());
    for (long r = 0; r < d; ++r)
        for (long c = 0; c < d; ++c) {
            split(r, ri);
            split(c, ci);
            for (int i = 0; i < space.count(); ++i)
                if (in_b[i]) std::swap(ri[i], ci[i]);
            long rr = 0, cc = 0;
            for (int i = 0; i < space.count(); ++i) {
                rr = rr * dims[i] + ri[i];
                cc = cc * dims[i] + ci[i];
            }
            pt(rr, cc) = rho.mat(r, c);
        }

    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(DenseMatrix(0.5 * (pt + pt.adjoint())),
                                                  Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (long i = 0; i < d; ++i) neg += std::max(0.0, -es.eigenvalues()[i]);
    return neg;
}

// <target| rho |target>
inline double fidelity(const DensityOperator& rho, const PureState& target) {
    require_same_space(rho.space, target.space, "fidelity");
    return std::real(target.amp.dot(rho.mat * target.amp));
}

inline double fidelity(const PureState& psi, const PureState& target) {
    return std::norm(overlap(target, psi));
}

}  // namespace mecs
