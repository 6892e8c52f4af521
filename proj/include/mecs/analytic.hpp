#pragma once

#include <mecs/constants.hpp>
#include <mecs/hilbert.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Closed-form solution of the off-diagonal characteristic-function dynamics:
// displacement trajectories, the decoherence exponent zeta(t), the geometric
// phase phi(t), concurrence envelopes, and success probabilities. These are
// the oracles the numerical modules are validated against, so everything here
// is an explicit expression; no time stepping.
//
// Solution structure (method of characteristics for chi(beta = 0, t) with
// Omega = omega_m + i gamma_m/2): the pullback trajectory is
//     beta(s) = beta_p (1 - e^{i Omega (t - s)}),
// with fixed point beta_p = lambda/Omega for the one-sided block drive and
// beta_p = 2c/Omega for the collective-mode anticommutator drive of strength
// c. A thermally occupied initial state then gives
//     |chi(0, t)| = exp{ -(nbar + 1/2) zeta(t) },
//     zeta(t) = |beta(0)|^2 + gamma_m  int_0^t |beta(s)|^2 ds,
// which reproduces the familiar weak-damping approximation
//     zeta(t) ~ (2 lambda^2/omega^2) [1 - cos(omega t) e^{-gamma t/2}
//                                     + gamma t / 2]
// to first order in gamma/omega. A position-coupled double-commutator channel
// adds 2 Gamma int (Re beta)^2 ds to the exponent.

namespace mecs::analytic {

struct AnalyticParams {
    double lambda_e = 0.0;       // conditional drive rate (rad/s)
    double omega_m = 0.0;        // mechanical frequency (rad/s)
    double gamma_m = 0.0;        // mechanical damping (rad/s)
    double n_bar = 0.0;          // bath occupation
    double gamma_q_tilde = 0.0;  // per-qubit coherence dephasing rate (rad/s)

    cxd Omega() const { return {omega_m, gamma_m / 2.0}; }
    bool weak_damping_ok() const { return gamma_m <= 0.1 * omega_m; }
    void check() const {
        if (omega_m <= 0) throw std::invalid_argument("AnalyticParams: omega_m must be > 0");
        if (gamma_m < 0 || n_bar < 0 || gamma_q_tilde < 0)
            throw std::invalid_argument("AnalyticParams: rates must be >= 0");
    }
};

enum class CurveKind { concurrence, characteristic, zeta, displacement };

struct AnalyticCurve {
    std::vector<double> times;
    std::vector<cxd> values;
    CurveKind kind = CurveKind::concurrence;

    void check() const {
        if (times.size() != values.size())
            throw std::invalid_argument("AnalyticCurve: size mismatch");
        for (size_t i = 1; i < times.size(); ++i)
            if (times[i] <= times[i - 1])
                throw std::invalid_argument("AnalyticCurve: times must be strictly increasing");
    }
};

namespace detail {

// (e^{c t} - 1)/c, with the c -> 0 limit t.
inline cxd expm1_over(cxd c, double t) {
    if (std::abs(c) * t < 1e-12) return cxd(t, 0.0) * (1.0 + 0.5 * c * t);
    return (std::exp(c * t) - 1.0) / c;
}

struct PullbackIntegrals {
    double beta0_sq = 0.0;      // |beta(0)|^2
    double int_beta_sq = 0.0;   // int |beta|^2 ds
    double int_re_beta_sq = 0.0;  // int (Re beta)^2 ds
};

inline PullbackIntegrals pullback_integrals(double t, cxd beta_p, cxd omega_c) {
    const cxd iw = ci * omega_c;
    const double gamma = 2.0 * omega_c.imag();
    const cxd e_t = std::exp(iw * t);

    PullbackIntegrals out;
    out.beta0_sq = std::norm(beta_p) * std::norm(1.0 - e_t);

    const cxd i1 = expm1_over(iw, t);                    // int e^{i O u}
    const double ig = std::real(expm1_over(cxd(-gamma, 0.0), t));  // int e^{-gamma u}
    out.int_beta_sq = std::norm(beta_p) * (t - 2.0 * std::real(i1) + ig);

    const double a = std::real(beta_p);
    const cxd i2 = expm1_over(2.0 * iw, t);  // int e^{2 i O u}
    out.int_re_beta_sq = a * a * t - 2.0 * a * std::real(beta_p * i1) +
                         0.5 * std::real(beta_p * beta_p * i2) +
                         0.5 * std::norm(beta_p) * ig;
    return out;
}

}  // namespace detail

// alpha_e(t) = (lambda_e/omega_m)(e^{-i omega_m t} - 1); maximum excursion
// -2 lambda_e/omega_m at half period.
inline cxd displacement_trajectory(double t, const AnalyticParams& p) {
    if (t < 0) throw std::invalid_argument("displacement_trajectory: t must be >= 0");
    return (p.lambda_e / p.omega_m) * (std::exp(-ci * p.omega_m * t) - 1.0);
}

// Weak-damping approximation as displayed in closed form.
inline double zeta_approx(double t, const AnalyticParams& p) {
    const double r = p.lambda_e / p.omega_m;
    return 2.0 * r * r *
           (1.0 - std::cos(p.omega_m * t) * std::exp(-p.gamma_m * t / 2.0) +
            p.gamma_m * t / 2.0);
}

// Exact characteristic-integral form (per site, one-sided drive).
inline double zeta_exact(double t, const AnalyticParams& p) {
    if (t < 0) throw std::invalid_argument("zeta_exact: t must be >= 0");
    const cxd beta_p = p.lambda_e / p.Omega();
    const auto pb = detail::pullback_integrals(t, beta_p, p.Omega());
    return pb.beta0_sq + p.gamma_m * pb.int_beta_sq;
}

// Geometric phase from the first ansatz, kappa' = -i Omega~ kappa - i lambda/2
// with the damped branch Omega~ = omega - i gamma/2:
//   phi(t) = -2 lambda Re int kappa ds,
// reducing to (lambda/omega)^2 (omega t - sin omega t) for gamma = 0.
inline double phase_phi(double t, const AnalyticParams& p) {
    const cxd omega_damped{p.omega_m, -p.gamma_m / 2.0};
    const cxd kappa_p = -p.lambda_e / (2.0 * omega_damped);
    // int_0^t kappa ds = kappa_p (t - (1 - e^{-i O~ t})/(i O~)); note
    // (e^{-i O~ t} - 1)/(-i O~) is the same bracket term.
    const cxd bracket = cxd(t, 0.0) - detail::expm1_over(-ci * omega_damped, t);
    return -2.0 * p.lambda_e * std::real(kappa_p * bracket);
}

// chi_ge(beta = 0, t) for a thermal (or precooled, nbar = 0) initial state:
// e^{i phi(t)} e^{-(nbar + 1/2) zeta(t)}.
inline cxd characteristic_offdiagonal(double t, const AnalyticParams& p) {
    return std::exp(cxd(0.0, phase_phi(t, p))) *
           std::exp(-(p.n_bar + 0.5) * zeta_exact(t, p));
}

// Two identical sites: C(t) = e^{-2 gq t} e^{-2 (nbar + 1/2) zeta(t)}.
inline double concurrence_analytic(double t, const AnalyticParams& p) {
    return std::exp(-2.0 * p.gamma_q_tilde * t) *
           std::exp(-2.0 * (p.n_bar + 0.5) * zeta_exact(t, p));
}

struct DecoherenceRates {
    double n_bar = 0.0;
    double gamma_m = 0.0;
    double Gamma_th = 0.0;   // gamma_m nbar ~ kB T / (hbar Q)
    double Gamma_dec = 0.0;  // (2 nbar + 1) gamma_m
};

inline DecoherenceRates decoherence_rates(double omega_m, double temperature_k, double q_m) {
    if (temperature_k <= 0 || q_m <= 0)
        throw std::invalid_argument("decoherence_rates: T and Q_m must be > 0");
    DecoherenceRates out;
    out.n_bar = constants::thermal_occupation(omega_m, temperature_k);
    out.gamma_m = omega_m / q_m;
    out.Gamma_th = out.gamma_m * out.n_bar;
    out.Gamma_dec = (2.0 * out.n_bar + 1.0) * out.gamma_m;
    return out;
}

// p_pm = (1 pm e^{-4 |alpha|^2}) / 2
inline std::pair<double, double> success_probabilities(cxd alpha) {
    const double e = std::exp(-4.0 * std::norm(alpha));
    return {(1.0 + e) / 2.0, (1.0 - e) / 2.0};
}

// ---------------------------------------------------------------------------
// Collective-mode envelope for the normal-mode (gravity) runs.
//
// One driven mode at omega_d with an anticommutator drive -i c {X, M},
// thermal damping, an optional position double commutator of strength Gamma,
// and total qubit-pair dephasing gq_total. The pullback fixed point is
// beta_p = 2c/Omega (twice the one-sided value), so with c = lambda/sqrt(2)
// the Gamma = 0 result coincides with the two-site product
// e^{-2(nbar+1/2) zeta}.

struct CollectiveModeParams {
    double omega_d = 0.0;   // normal-mode frequency (rad/s)
    double drive = 0.0;     // anticommutator coefficient c (rad/s)
    double gamma_m = 0.0;
    double n_bar = 0.0;
    double gamma_q_total = 0.0;  // 2 gamma_q_tilde for the qubit pair
    double gamma_grav = 0.0;     // position double-commutator rate
};

inline double collective_envelope_exponent(double t, const CollectiveModeParams& p) {
    const cxd omega_c{p.omega_d, p.gamma_m / 2.0};
    const cxd beta_p = 2.0 * p.drive / omega_c;
    const auto pb = detail::pullback_integrals(t, beta_p, omega_c);
    return (p.n_bar + 0.5) * (pb.beta0_sq + p.gamma_m * pb.int_beta_sq) +
           2.0 * p.gamma_grav * pb.int_re_beta_sq;
}

inline double collective_concurrence_analytic(double t, const CollectiveModeParams& p) {
    return std::exp(-p.gamma_q_total * t - collective_envelope_exponent(t, p));
}

}  // namespace mecs::analytic
