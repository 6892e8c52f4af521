#pragma once

#include <mecs/hilbert.hpp>

#include <cmath>
#include <complex>

// Independent numerical oracles for the closed-form module. These integrate
// the scalar ODE systems directly (RK4 on complex scalars) and never touch
// the closed-form code paths they validate.

namespace test_oracles {

using mecs::cxd;

// kappa~' = -i (omega - i gamma/2) kappa~ - i lambda, zeta' = -2 lambda Im kappa~
inline double zeta_ode_quadrature(double t, double lambda, double omega, double gamma,
                                  long steps = 40000) {
    const cxd om{omega, -gamma / 2.0};
    cxd k = 0.0;
    double z = 0.0;
    const double dt = t / static_cast<double>(steps);
    auto fk = [&](cxd kk) { return -mecs::ci * om * kk - mecs::ci * lambda; };
    auto fz = [&](cxd kk) { return -2.0 * lambda * kk.imag(); };
    for (long i = 0; i < steps; ++i) {
        const cxd k1 = fk(k);
        const double z1 = fz(k);
        const cxd k2 = fk(k + 0.5 * dt * k1);
        const double z2 = fz(k + 0.5 * dt * k1);
        const cxd k3 = fk(k + 0.5 * dt * k2);
        const double z3 = fz(k + 0.5 * dt * k2);
        const cxd k4 = fk(k + dt * k3);
        const double z4 = fz(k + dt * k3);
        z += dt / 6.0 * (z1 + 2.0 * z2 + 2.0 * z3 + z4);
        k += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
}

// Simpson quadrature of the pullback integrals defining the collective-mode
// envelope exponent: beta(s) = beta_p (1 - e^{i Omega (t-s)}).
inline double collective_exponent_quadrature(double t, double omega_d, double drive,
                                             double gamma_m, double n_bar, double gamma_grav,
                                             long panels = 4000) {
    const cxd omega{omega_d, gamma_m / 2.0};
    const cxd beta_p = 2.0 * drive / omega;
    auto beta = [&](double s) { return beta_p * (1.0 - std::exp(mecs::ci * omega * (t - s))); };

    double int_abs2 = 0.0, int_re2 = 0.0;
    const double h = t / (2.0 * panels);
    for (long i = 0; i <= 2 * panels; ++i) {
        const double s = i * h;
        const double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const cxd b = beta(s);
        int_abs2 += w * std::norm(b);
        const double rb = b.real();
        int_re2 += w * rb * rb;
    }
    int_abs2 *= h / 3.0;
    int_re2 *= h / 3.0;

    const double beta0_sq = std::norm(beta(0.0));
    return (n_bar + 0.5) * (beta0_sq + gamma_m * int_abs2) + 2.0 * gamma_grav * int_re2;
}

}  // namespace test_oracles
