#pragma once

#include <mecs/hilbert.hpp>

#include <cmath>
#include <string>
#include <vector>

// Hamiltonians of the two-site electromechanical network: the site Hamiltonian
// with a qubit-state-dependent force and a three-level Jaynes-Cummings term,
// the dispersive detector Hamiltonian, instantaneous pulse unitaries, the
// 50:50 beam splitter, and charge-basis transmon diagonalization.
//
// Level ordering for the transmon qutrit is g=0, e=1, f=2.
//
// Coupling convention: the state-dependent force enters as
//     sum_j lambda_j (b + b^dag) |j><j|   ==   sum_j sqrt(2) lambda_j x |j><j|
// with x = (b + b^dag)/sqrt(2). With this normalization a constant drive
// lambda displaces an initially resting mode along
// beta(t) = (lambda/omega_m)(e^{-i omega_m t} - 1), reaching -2 lambda/omega_m
// after half a period, and an N_p-pulse flipping sequence prepares coherent
// amplitudes +/- alpha with alpha = (N_p+1)(lambda_e - lambda_g)/omega_m.

namespace mecs {

enum class Frame { lab, rotating };

inline constexpr int kG = 0;
inline constexpr int kE = 1;
inline constexpr int kF = 2;

struct SiteParams {
    double omega_c = 0.0;  // cavity frequency (rad/s)
    double omega_m = 0.0;  // mechanical frequency (rad/s)
    double Omega_g = 0.0, Omega_e = 0.0, Omega_f = 0.0;  // level energies (rad/s)
    double lambda_g = 0.0, lambda_e = 0.0, lambda_f = 0.0;  // force couplings (rad/s)
    double chi = 0.0;  // transmon-cavity Jaynes-Cummings rate (rad/s)
    Frame frame = Frame::rotating;

    void check() const {
        if (omega_c < 0 || omega_m < 0)
            throw std::invalid_argument("SiteParams: frequencies must be >= 0");
        for (double l : {lambda_g, lambda_e, lambda_f})
            if (!std::isfinite(l)) throw std::invalid_argument("SiteParams: lambda not finite");
    }

    double lambda(int level) const {
        return level == kG ? lambda_g : (level == kE ? lambda_e : lambda_f);
    }
    double omega_level(int level) const {
        return level == kG ? Omega_g : (level == kE ? Omega_e : Omega_f);
    }
};

struct DetectorParams {
    double omega_c = 0.0;   // detector cavity frequency (rad/s)
    double Omega_e = 0.0;   // detector qubit frequency (rad/s)
    double chi_p = 0.0;     // qubit-cavity coupling (rad/s)
    double Delta = 0.0;     // detuning Omega_e - omega_c (rad/s)

    static DetectorParams from_detuning(double omega_c, double chi_p, double delta) {
        return {omega_c, omega_c + delta, chi_p, delta};
    }

    double dispersive_ratio() const { return Delta == 0.0 ? INFINITY : chi_p / Delta; }
    bool dispersive_regime_ok() const { return std::abs(dispersive_ratio()) <= 0.1; }
    double dispersive_shift() const {
        if (Delta == 0.0) throw std::invalid_argument("DetectorParams: Delta = 0");
        return chi_p * chi_p / Delta;
    }
    // Time after which one cavity photon imprints a pi phase on the qubit.
    double parity_gate_time() const { return M_PI / dispersive_shift(); }
};

// (qutrit, mechanics, cavity) in fixed order.
inline CompositeSpace site_space(int mech_truncation, int cavity_truncation) {
    return CompositeSpace({SubsystemSpec::qutrit(), SubsystemSpec::boson(mech_truncation),
                           SubsystemSpec::boson(cavity_truncation)});
}

inline void require_site_layout(const CompositeSpace& space) {
    if (space.count() != 3 || space.subsystem(0).kind != SubsystemKind::qutrit ||
        space.subsystem(1).kind != SubsystemKind::boson ||
        space.subsystem(2).kind != SubsystemKind::boson)
        throw std::invalid_argument("site Hamiltonian expects (qutrit, mechanics, cavity)");
}

// omega_c a^dag a + omega_m (b^dag b + 1/2)
//   + sum_j (Omega_j + lambda_j (b + b^dag)) |j><j|
//   + chi [ (1/sqrt2 |e><g| + |f><e|) a + h.c. ]
// In the rotating frame the Omega_j and omega_c diagonal parts are dropped;
// the mechanical term stays (the conditional-displacement dynamics lives
// there). The oscillator energy is built as omega_m (n + 1/2), which equals
// omega_m (x^2 + p^2)/2 everywhere below the Fock cutoff and keeps the
// spectrum exactly linear at the edge.
inline Operator site_hamiltonian(const SiteParams& p, const CompositeSpace& space) {
    p.check();
    require_site_layout(space);
    const int mech_n = space.subsystem(1).truncation;
    const int cav_n = space.subsystem(2).truncation;

    const auto b = annihilation(mech_n).mat;
    const SparseMatrix bdb_half =
        SparseMatrix(b.adjoint() * b) +
        SparseMatrix(0.5 * identity_operator(single_boson_space(mech_n)).mat);
    SparseMatrix h = p.omega_m * embed_on(bdb_half, space, {1}).mat;

    const SparseMatrix b_plus_bd = SparseMatrix(b + SparseMatrix(b.adjoint()));
    for (int j : {kG, kE, kF}) {
        SparseMatrix coupling = kron_sparse(projector_matrix(j, 3), b_plus_bd);
        h += p.lambda(j) * embed_on(coupling, space, {0, 1}).mat;
        if (p.frame == Frame::lab)
            h += p.omega_level(j) * embed_on(projector_matrix(j, 3), space, {0}).mat;
    }

    if (p.frame == Frame::lab) {
        const auto n_cav = number_operator(cav_n).mat;
        h += p.omega_c * embed_on(n_cav, space, {2}).mat;
    }

    if (p.chi != 0.0) {
        const auto a_cav = annihilation(cav_n).mat;
        SparseMatrix ladder = SparseMatrix((1.0 / std::sqrt(2.0)) * transition_matrix(kE, kG, 3)) +
                              transition_matrix(kF, kE, 3);
        SparseMatrix jc = kron_sparse(ladder, a_cav);
        jc = SparseMatrix(jc + SparseMatrix(jc.adjoint()));
        h += p.chi * embed_on(jc, space, {0, 2}).mat;
    }

    h.makeCompressed();
    return {space, std::move(h)};
}

// Resonant part of the transmon-cavity interaction alone, used while the
// e-f transition is flux-tuned onto the cavity: chi(|f><e| a + h.c.).
inline Operator jaynes_cummings_term(double chi, const CompositeSpace& space) {
    require_site_layout(space);
    const int cav_n = space.subsystem(2).truncation;
    SparseMatrix jc = kron_sparse(transition_matrix(kF, kE, 3), annihilation(cav_n).mat);
    jc = SparseMatrix(jc + SparseMatrix(jc.adjoint()));
    return {space, SparseMatrix(chi * embed_on(jc, space, {0, 2}).mat)};
}

// (omega_c + chi_p^2/Delta |e><e|) a^dag a + (Omega_e + chi_p^2/Delta) |e><e|
// on a (qubit, cavity) space.
inline Operator dispersive_hamiltonian(const DetectorParams& p, const CompositeSpace& space) {
    if (space.count() != 2 || space.subsystem(0).kind != SubsystemKind::qubit ||
        space.subsystem(1).kind != SubsystemKind::boson)
        throw std::invalid_argument("dispersive Hamiltonian expects (qubit, cavity)");
    const double shift = p.dispersive_shift();  // throws on Delta = 0
    const int cav_n = space.subsystem(1).truncation;
    const auto n_cav = number_operator(cav_n).mat;
    const auto p_e = projector_matrix(1, 2);

    SparseMatrix h = p.omega_c * embed_on(n_cav, space, {1}).mat;
    h += shift * embed_on(kron_sparse(p_e, n_cav), space, {0, 1}).mat;
    h += (p.Omega_e + shift) * embed_on(p_e, space, {0}).mat;
    h.makeCompressed();
    return {space, std::move(h)};
}

// Conditional part (chi_p^2/Delta) |e><e| a^dag a alone: the detector-stage
// generator in the frame rotating at the cavity and Lamb-shifted qubit
// frequencies.
inline Operator dispersive_coupling_term(const DetectorParams& p, const CompositeSpace& space) {
    if (space.count() != 2 || space.subsystem(0).kind != SubsystemKind::qubit ||
        space.subsystem(1).kind != SubsystemKind::boson)
        throw std::invalid_argument("dispersive coupling expects (qubit, cavity)");
    const double shift = p.dispersive_shift();
    const int cav_n = space.subsystem(1).truncation;
    SparseMatrix h = shift *
        embed_on(kron_sparse(projector_matrix(1, 2), number_operator(cav_n).mat), space, {0, 1})
            .mat;
    return {space, std::move(h)};
}

enum class PulseTransition { ge, ef };

// exp(-i (angle/2) (cos(phase) sigma_x + sin(phase) sigma_y)) on the named
// two-level subspace, identity elsewhere. sigma_y = [[0,-i],[i,0]] in the
// (lower, upper) ordering. With phase = +pi/2 this is the rotation
// |g> -> cos(angle/2)|g> + sin(angle/2)|e>, giving real-coefficient pi/2 and
// pi pulses (pi: |g> -> |e>, |e> -> -|g>).
inline Operator pulse_unitary(PulseTransition tr, double angle, double phase,
                              const CompositeSpace& space, int subsystem = 0) {
    if (!std::isfinite(angle)) throw std::invalid_argument("pulse_unitary: angle not finite");
    const int dim = space.subsystem(subsystem).dimension();
    const int lo = (tr == PulseTransition::ge) ? 0 : 1;
    const int hi = lo + 1;
    if (hi >= dim)
        throw std::invalid_argument("pulse_unitary: transition not present in subsystem");

    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const cxd u01 = -ci * s * (std::cos(phase) - ci * std::sin(phase));  // -i s e^{-i phase}
    const cxd u10 = -ci * s * (std::cos(phase) + ci * std::sin(phase));  // -i s e^{+i phase}
    std::vector<Eigen::Triplet<cxd>> t;
    for (int l = 0; l < dim; ++l)
        if (l != lo && l != hi) t.emplace_back(l, l, cxd(1.0, 0.0));
    t.emplace_back(lo, lo, cxd(c, 0.0));
    t.emplace_back(hi, hi, cxd(c, 0.0));
    t.emplace_back(lo, hi, u01);
    t.emplace_back(hi, lo, u10);
    return embed_on(sparse_from_triplets(dim, t), space, {subsystem});
}

// 50:50 beam splitter U = exp{(pi/4)(a_A^dag a_B - a_A a_B^dag)} on two equal
// bosonic factors. With this exponent a single photon maps as
//   |1,0> -> (|1,0> - |0,1>)/sqrt2,   |0,1> -> (|0,1> + |1,0>)/sqrt2,
// and |1,1> -> (|2,0> - |0,2>)/sqrt2 (Hong-Ou-Mandel, no |1,1> output).
inline Operator beam_splitter_unitary(const CompositeSpace& space) {
    if (space.count() != 2 || space.subsystem(0).kind != SubsystemKind::boson ||
        space.subsystem(1).kind != SubsystemKind::boson ||
        space.subsystem(0).truncation != space.subsystem(1).truncation)
        throw std::invalid_argument("beam splitter expects two equal bosonic modes");
    const int n = space.subsystem(0).truncation;
    const SparseMatrix a = annihilation(n).mat;
    const SparseMatrix id = identity_operator(single_boson_space(n)).mat;
    SparseMatrix gen = kron_sparse(SparseMatrix(a.adjoint()), a);
    gen = SparseMatrix(gen - SparseMatrix(gen.adjoint()));
    return {space, expm_antihermitian((M_PI / 4.0) * DenseMatrix(gen))};
}

// ---------------------------------------------------------------------------
// Charge-basis transmon diagonalization.

struct TransmonParams {
    double E_J = 0.0;  // Josephson energy (rad/s)
    double E_C = 0.0;  // charging energy (rad/s)
    double n_g = 0.0;  // offset charge
    double eta = 0.0;  // circuit Lamb-Dicke parameter
    int charge_cutoff = 30;
};

struct TransmonLevels {
    double Omega_g = 0.0, Omega_e = 0.0, Omega_f = 0.0;  // lowest three eigenvalues
    DenseMatrix n_matrix;  // <j| n |k> for j,k in {g,e,f}
    double chi = 0.0;      // 8 E_C eta |<f| n |e>|
    double convergence_shift = 0.0;  // relative eigenvalue shift under cutoff+5
    std::vector<std::string> warnings;

    double transition_ge() const { return Omega_e - Omega_g; }
    double transition_ef() const { return Omega_f - Omega_e; }
    double anharmonicity() const { return transition_ef() - transition_ge(); }
};

namespace detail {

// Lowest `count` eigenpairs of 4 E_C (n - n_g)^2 - E_J cos(phi) in the charge
// basis n in [-cutoff, cutoff]; cos(phi) is half the sum of the unit charge
// shift operators.
inline void transmon_eig(const TransmonParams& p, int cutoff, Eigen::VectorXd& evals,
                         Eigen::MatrixXd& evecs) {
    const int dim = 2 * cutoff + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - cutoff;
        h(i, i) = 4.0 * p.E_C * (n - p.n_g) * (n - p.n_g);
        if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = -p.E_J / 2.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("transmon_eig: eigensolver failed");
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
}

}  // namespace detail

inline TransmonLevels transmon_levels(const TransmonParams& p) {
    if (p.charge_cutoff < 10)
        throw std::invalid_argument("transmon_levels: charge_cutoff must be >= 10");
    if (p.E_C <= 0) throw std::invalid_argument("transmon_levels: E_C must be > 0");

    TransmonLevels out;
    if (p.E_J / p.E_C <= 1.0)
        out.warnings.push_back("E_J/E_C <= 1: outside the transmon regime");

    Eigen::VectorXd evals, evals_chk;
    Eigen::MatrixXd evecs, evecs_chk;
    detail::transmon_eig(p, p.charge_cutoff, evals, evecs);
    detail::transmon_eig(p, p.charge_cutoff + 5, evals_chk, evecs_chk);

    const double scale = std::max(std::abs(evals[1] - evals[0]), p.E_C);
    double shift = 0.0;
    for (int k = 0; k < 3; ++k)
        shift = std::max(shift, std::abs(evals[k] - evals_chk[k]) / scale);
    out.convergence_shift = shift;
    if (shift > 1e-8)
        throw std::runtime_error("transmon_levels: charge cutoff not converged, shift = " +
                                 std::to_string(shift));

    out.Omega_g = evals[0];
    out.Omega_e = evals[1];
    out.Omega_f = evals[2];

    // Gauge: largest-magnitude component of each eigenvector real positive.
    const int dim = 2 * p.charge_cutoff + 1;
    Eigen::MatrixXd v = evecs.leftCols(3);
    for (int k = 0; k < 3; ++k) {
        int imax = 0;
        v.col(k).cwiseAbs().maxCoeff(&imax);
        if (v(imax, k) < 0) v.col(k) = -v.col(k);
    }
    out.n_matrix = DenseMatrix::Zero(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            double s = 0.0;
            for (int i = 0; i < dim; ++i) s += v(i, j) * (i - p.charge_cutoff) * v(i, k);
            out.n_matrix(j, k) = s;
        }
    out.chi = 8.0 * p.E_C * p.eta * std::abs(out.n_matrix(kF, kE));
    return out;
}

// Fill the level structure of SiteParams from a transmon description; the
// force couplings are independent device inputs and stay untouched.
inline SiteParams site_params_from_transmon(const TransmonParams& t, double omega_c,
                                            double omega_m, double lambda_e,
                                            double lambda_g = 0.0, double lambda_f = 0.0,
                                            Frame frame = Frame::rotating) {
    const TransmonLevels lv = transmon_levels(t);
    SiteParams p;
    p.omega_c = omega_c;
    p.omega_m = omega_m;
    p.Omega_g = lv.Omega_g;
    p.Omega_e = lv.Omega_e;
    p.Omega_f = lv.Omega_f;
    p.lambda_g = lambda_g;
    p.lambda_e = lambda_e;
    p.lambda_f = lambda_f;
    p.chi = lv.chi;
    p.frame = frame;
    return p;
}

}  // namespace mecs
