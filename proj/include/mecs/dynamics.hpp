#pragma once

#include <mecs/hilbert.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

// Lindblad right-hand side assembly and time integration. The right-hand side
// is applied directly to the density matrix (two sparse-dense products per
// term) instead of building the d^2 x d^2 superoperator, so memory stays at
// d^2 and the cost per step is dominated by a handful of sparse products.
//
// Dissipator families:
//   qubit_dephasing      (rate/2) (sum_k P_k rho P_k - rho)
//   transmon_relaxation  (rate/2) sum_{j<k} (2|j><k| rho |k><j| - {P_k, rho})
//   boson_thermal        (rate/2)(nbar+1)(2 b rho b+ - {b+b, rho})
//                        + (rate/2) nbar (2 b+ rho b - {b b+, rho})
//   cascaded             (ks/2)(L_A + L_B) + (kp/2) L_D
//                        - sqrt(eps ks kp) { [aD+, m rho] + [rho m+, aD] },
//                        m = (a_A +/- a_B)/sqrt2
//   position_double_commutator   -Gamma [x, [x, rho]]
//
// The relaxation sum runs over every downward pair, including f -> g; real
// transmons suppress that jump but the model keeps it.
// Note the printed cascaded cross terms are commutators, hence exactly
// traceless; the unit tests pin this.

namespace mecs {

enum class DissipatorKind {
    qubit_dephasing,
    transmon_relaxation,
    boson_thermal,
    cascaded,
    position_double_commutator,
};

struct DissipatorSpec {
    DissipatorKind kind = DissipatorKind::boson_thermal;
    double rate = 0.0;   // gamma for local variants, Gamma for the double commutator
    double n_bar = 0.0;  // thermal occupation (boson_thermal)
    int subsystem = 0;   // local variants

    // cascaded network
    double kappa_s = 0.0, kappa_p = 0.0, efficiency = 1.0;
    int source_a = 0, source_b = 0, target = 0;
    int mix_sign = +1;                // m = (a_A + sign a_B)/sqrt2
    bool include_source_decay = true;  // the (ks/2)(L_A+L_B) bundle

    static DissipatorSpec qubit_dephasing(double rate, int subsystem) {
        DissipatorSpec d;
        d.kind = DissipatorKind::qubit_dephasing;
        d.rate = rate;
        d.subsystem = subsystem;
        return d;
    }
    static DissipatorSpec transmon_relaxation(double rate, int subsystem) {
        DissipatorSpec d;
        d.kind = DissipatorKind::transmon_relaxation;
        d.rate = rate;
        d.subsystem = subsystem;
        return d;
    }
    static DissipatorSpec boson_thermal(double rate, double n_bar, int subsystem) {
        DissipatorSpec d;
        d.kind = DissipatorKind::boson_thermal;
        d.rate = rate;
        d.n_bar = n_bar;
        d.subsystem = subsystem;
        return d;
    }
    static DissipatorSpec cascaded(double kappa_s, double kappa_p, double efficiency,
                                   int source_a, int source_b, int target, int mix_sign,
                                   bool include_source_decay = true) {
        DissipatorSpec d;
        d.kind = DissipatorKind::cascaded;
        d.kappa_s = kappa_s;
        d.kappa_p = kappa_p;
        d.efficiency = efficiency;
        d.source_a = source_a;
        d.source_b = source_b;
        d.target = target;
        d.mix_sign = mix_sign;
        d.include_source_decay = include_source_decay;
        return d;
    }
    static DissipatorSpec position_double_commutator(double gamma, int subsystem) {
        DissipatorSpec d;
        d.kind = DissipatorKind::position_double_commutator;
        d.rate = gamma;
        d.subsystem = subsystem;
        return d;
    }

    void check() const {
        if (rate < 0 || kappa_s < 0 || kappa_p < 0)
            throw std::invalid_argument("DissipatorSpec: rates must be >= 0");
        if (n_bar < 0) throw std::invalid_argument("DissipatorSpec: n_bar must be >= 0");
        if (efficiency < 0 || efficiency > 1)
            throw std::invalid_argument("DissipatorSpec: efficiency must be in [0, 1]");
        if (mix_sign != 1 && mix_sign != -1)
            throw std::invalid_argument("DissipatorSpec: mix sign must be +1 or -1");
    }
};

// Both detector ports fed by the two site cavities through the beam splitter;
// the shared source decay enters once.
inline std::vector<DissipatorSpec> cascaded_network_dissipators(double kappa_s, double kappa_p,
                                                                double efficiency, int source_a,
                                                                int source_b, int target_1,
                                                                int target_2) {
    return {DissipatorSpec::cascaded(kappa_s, kappa_p, efficiency, source_a, source_b, target_1,
                                     +1, true),
            DissipatorSpec::cascaded(kappa_s, kappa_p, efficiency, source_a, source_b, target_2,
                                     -1, false)};
}

struct LiouvillianSpec {
    Operator hamiltonian;
    std::vector<DissipatorSpec> dissipators;
};

struct IntegratorConfig {
    enum class Method { rk4_fixed, adaptive_embedded };
    Method method = Method::rk4_fixed;
    double dt = 0.0;          // fixed-step size; <= 0 derives one from the generator scale
    double tolerance = 1e-9;  // adaptive local error target (max-norm)
    double max_step = 0.0;    // adaptive cap; <= 0 means unbounded
    bool renormalize_trace = false;

    void check() const {
        if (method == Method::rk4_fixed && dt < 0)
            throw std::invalid_argument("IntegratorConfig: dt must be > 0 or 0 for automatic");
        if (tolerance <= 0) throw std::invalid_argument("IntegratorConfig: tolerance must be > 0");
    }
};

struct IntegrationError : std::runtime_error {
    double t = 0.0, dt = 0.0;
    IntegrationError(const std::string& msg, double t_, double dt_)
        : std::runtime_error(msg), t(t_), dt(dt_) {}
};

// ---------------------------------------------------------------------------
// Compiled generator.

class Liouvillian {
  public:
    explicit Liouvillian(const LiouvillianSpec& spec) : space_(spec.hamiltonian.space) {
        h_ = spec.hamiltonian.mat;
        have_h_ = h_.nonZeros() > 0;
        for (const auto& d : spec.dissipators) compile(d);
    }

    const CompositeSpace& space() const { return space_; }

    // -i[H, rho] + dissipators. Exactly trace-free up to roundoff, and written
    // with the literal two-sided products so that rhs(rho)^dag = rhs(rho^dag)
    // holds for non-Hermitian arguments as well.
    DenseMatrix rhs(const DenseMatrix& rho) const {
        DenseMatrix out = DenseMatrix::Zero(rho.rows(), rho.cols());
        if (have_h_) out.noalias() -= ci * (h_ * rho - rho * h_);
        for (const auto& j : jumps_) {
            out.noalias() += (2.0 * j.weight) * DenseMatrix(j.op * rho * j.op_dag);
            out.noalias() -= j.weight * (j.opdag_op * rho);
            out.noalias() -= j.weight * (rho * j.opdag_op);
        }
        for (const auto& c : crosses_) {
            // -w ( [aD+, m rho] + [rho m+, aD] )
            out.noalias() -= c.weight * (c.tdag_mix * rho);
            out.noalias() += c.weight * DenseMatrix(c.mix * rho * c.target_dag);
            out.noalias() -= c.weight * (rho * c.mixdag_t);
            out.noalias() += c.weight * DenseMatrix(c.target * rho * c.mix_dag);
        }
        for (const auto& d : double_comms_) {
            // -Gamma (x^2 rho - 2 x rho x + rho x^2)
            out.noalias() += (2.0 * d.gamma) * DenseMatrix(d.x * rho * d.x);
            out.noalias() -= d.gamma * (d.x2 * rho);
            out.noalias() -= d.gamma * (rho * d.x2);
        }
        return out;
    }

    // Crude spectral scale used to pick a default step: Gershgorin bound on H
    // plus the summed dissipation rates.
    double frequency_scale() const {
        double h_scale = 0.0;
        for (int k = 0; k < h_.outerSize(); ++k) {
            double row = 0.0;
            for (SparseMatrix::InnerIterator it(h_, k); it; ++it) row += std::abs(it.value());
            h_scale = std::max(h_scale, row);
        }
        return h_scale;
    }
    double rate_scale() const { return rate_scale_; }

    double default_timestep() const {
        const double w = frequency_scale();
        double dt = INFINITY;
        if (w > 0) dt = std::min(dt, constants::two_pi / w / 40.0);
        if (rate_scale_ > 0) dt = std::min(dt, 1.0 / (20.0 * rate_scale_));
        if (!std::isfinite(dt))
            throw std::invalid_argument("Liouvillian: cannot derive a timestep from a zero generator");
        return dt;
    }

  private:
    struct Jump {
        double weight;  // rate/2 in the (rate/2)(2 L rho L+ - {L+L, rho}) convention
        SparseMatrix op, op_dag, opdag_op;
    };
    struct Cross {
        double weight;
        SparseMatrix target, target_dag, mix, mix_dag;
        SparseMatrix tdag_mix, mixdag_t;  // aD+ m and m+ aD
    };
    struct DoubleComm {
        double gamma;
        SparseMatrix x, x2;
    };

    void add_jump(double weight, const SparseMatrix& l) {
        if (weight == 0.0) return;
        SparseMatrix ld = l.adjoint();
        jumps_.push_back({weight, l, ld, SparseMatrix(ld * l)});
        rate_scale_ += 2.0 * weight;
    }

    void compile(const DissipatorSpec& d) {
        d.check();
        switch (d.kind) {
            case DissipatorKind::qubit_dephasing: {
                // (rate/2)(sum_k P_k rho P_k - rho) as projector jumps with
                // weight rate/4 each (sum_k {P_k, rho} = 2 rho).
                const int dim = space_.subsystem(d.subsystem).dimension();
                for (int k = 0; k < dim; ++k)
                    add_jump(d.rate / 4.0,
                             embed_on(projector_matrix(k, dim), space_, {d.subsystem}).mat);
                break;
            }
            case DissipatorKind::transmon_relaxation: {
                const int dim = space_.subsystem(d.subsystem).dimension();
                for (int k = 1; k < dim; ++k)
                    for (int j = 0; j < k; ++j)
                        add_jump(d.rate / 2.0,
                                 embed_on(transition_matrix(j, k, dim), space_, {d.subsystem}).mat);
                break;
            }
            case DissipatorKind::boson_thermal: {
                const int n = space_.subsystem(d.subsystem).truncation;
                const SparseMatrix b = embed_on(annihilation(n).mat, space_, {d.subsystem}).mat;
                add_jump(d.rate / 2.0 * (d.n_bar + 1.0), b);
                if (d.n_bar > 0) add_jump(d.rate / 2.0 * d.n_bar, SparseMatrix(b.adjoint()));
                break;
            }
            case DissipatorKind::cascaded: {
                auto cavity = [&](int idx) {
                    const int n = space_.subsystem(idx).truncation;
                    return embed_on(annihilation(n).mat, space_, {idx}).mat;
                };
                const SparseMatrix a_src_a = cavity(d.source_a);
                const SparseMatrix a_src_b = cavity(d.source_b);
                const SparseMatrix a_tgt = cavity(d.target);
                if (d.include_source_decay) {
                    add_jump(d.kappa_s / 2.0, a_src_a);
                    add_jump(d.kappa_s / 2.0, a_src_b);
                }
                add_jump(d.kappa_p / 2.0, a_tgt);
                const double w = std::sqrt(d.efficiency * d.kappa_s * d.kappa_p);
                if (w > 0.0) {
                    Cross c;
                    c.weight = w;
                    c.target = a_tgt;
                    c.target_dag = a_tgt.adjoint();
                    c.mix = SparseMatrix((a_src_a + double(d.mix_sign) * a_src_b) /
                                         std::sqrt(2.0));
                    c.mix_dag = c.mix.adjoint();
                    c.tdag_mix = SparseMatrix(c.target_dag * c.mix);
                    c.mixdag_t = SparseMatrix(c.mix_dag * c.target);
                    crosses_.push_back(std::move(c));
                    rate_scale_ += w;
                }
                break;
            }
            case DissipatorKind::position_double_commutator: {
                if (d.rate == 0.0) break;
                const int n = space_.subsystem(d.subsystem).truncation;
                const SparseMatrix x =
                    embed_on(position_operator(n).mat, space_, {d.subsystem}).mat;
                double_comms_.push_back({d.rate, x, SparseMatrix(x * x)});
                // x^2 scales with the occupied levels; n+1 is a workable bound
                rate_scale_ += d.rate * (n + 1.0);
                break;
            }
        }
    }

    CompositeSpace space_;
    SparseMatrix h_;
    bool have_h_ = false;
    std::vector<Jump> jumps_;
    std::vector<Cross> crosses_;
    std::vector<DoubleComm> double_comms_;
    double rate_scale_ = 0.0;
};

// Spec'd single-shot form; evolve() compiles once instead.
inline Operator lindblad_rhs(const DensityOperator& rho, const LiouvillianSpec& spec) {
    require_same_space(rho.space, spec.hamiltonian.space, "lindblad_rhs");
    Liouvillian l(spec);
    return {rho.space, l.rhs(rho.mat)};
}

// ---------------------------------------------------------------------------
// Integrators on generic matrix states (density matrices and coherence
// blocks share them).

namespace detail {

template <typename Rhs>
void rk4_step(DenseMatrix& y, double dt, Rhs&& rhs) {
    const DenseMatrix k1 = rhs(y);
    const DenseMatrix k2 = rhs(DenseMatrix(y + 0.5 * dt * k1));
    const DenseMatrix k3 = rhs(DenseMatrix(y + 0.5 * dt * k2));
    const DenseMatrix k4 = rhs(DenseMatrix(y + dt * k3));
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Rhs>
void rk4_span(DenseMatrix& y, double t0, double t1, double dt, Rhs&& rhs) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / dt)));
    const double h = span / static_cast<double>(n);
    for (long i = 0; i < n; ++i) rk4_step(y, h, rhs);
}

// Cash-Karp embedded 4(5) pair with max-norm error control.
template <typename Rhs>
void rkck_span(DenseMatrix& y, double t0, double t1, const IntegratorConfig& cfg, Rhs&& rhs) {
    static const double a21 = 1.0 / 5.0;
    static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static const double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
    static const double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0,
                        a54 = 35.0 / 27.0;
    static const double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0, a63 = 575.0 / 13824.0,
                        a64 = 44275.0 / 110592.0, a65 = 253.0 / 4096.0;
    static const double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0, b4 = 125.0 / 594.0,
                        b6 = 512.0 / 1771.0;
    static const double d1 = b1 - 2825.0 / 27648.0, d3 = b3 - 18575.0 / 48384.0,
                        d4 = b4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                        d6 = b6 - 0.25;

    double t = t0;
    const double span = t1 - t0;
    if (span <= 0.0) return;
    double h = cfg.max_step > 0 ? std::min(cfg.max_step, span) : span;
    const double h_floor = span * 1e-14;

    while (t < t1) {
        h = std::min(h, t1 - t);
        const DenseMatrix k1 = rhs(y);
        const DenseMatrix k2 = rhs(DenseMatrix(y + h * (a21 * k1)));
        const DenseMatrix k3 = rhs(DenseMatrix(y + h * (a31 * k1 + a32 * k2)));
        const DenseMatrix k4 = rhs(DenseMatrix(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const DenseMatrix k5 =
            rhs(DenseMatrix(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const DenseMatrix k6 = rhs(
            DenseMatrix(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));

        const DenseMatrix err = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
        const double e = err.cwiseAbs().maxCoeff() / (cfg.tolerance * scale);

        if (e <= 1.0) {
            y += h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
            t += h;
            const double grow = (e > 0) ? 0.9 * std::pow(e, -0.2) : 5.0;
            h *= std::min(5.0, grow);
            if (cfg.max_step > 0) h = std::min(h, cfg.max_step);
        } else {
            h *= std::max(0.1, 0.9 * std::pow(e, -0.25));
        }
        if (h < h_floor)
            throw IntegrationError("adaptive step size underflow (tolerance unreachable)", t, h);
    }
}

template <typename Rhs>
void integrate_span(DenseMatrix& y, double t0, double t1, const IntegratorConfig& cfg,
                    double default_dt, Rhs&& rhs) {
    if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
        const double dt = cfg.dt > 0 ? cfg.dt : default_dt;
        rk4_span(y, t0, t1, dt, rhs);
    } else {
        rkck_span(y, t0, t1, cfg, rhs);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Density-matrix trajectories.

struct TrajectorySample {
    double t = 0.0;
    DensityOperator state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    // raw drift diagnostics, accumulated before any renormalization
    double max_trace_drift = 0.0;
    double max_hermiticity_deviation = 0.0;
    double min_eigenvalue = 1.0;
};

inline Trajectory evolve(const DensityOperator& rho0, const LiouvillianSpec& spec,
                         double duration, const IntegratorConfig& config = {},
                         std::vector<double> sample_times = {}) {
    require_same_space(rho0.space, spec.hamiltonian.space, "evolve");
    config.check();
    if (duration < 0) throw std::invalid_argument("evolve: duration must be >= 0");

    if (sample_times.empty()) sample_times = {duration};
    std::sort(sample_times.begin(), sample_times.end());
    if (sample_times.front() < 0 || sample_times.back() > duration + 1e-15 * duration)
        throw std::invalid_argument("evolve: sample times outside [0, duration]");

    Liouvillian gen(spec);
    const double default_dt = duration > 0 ? gen.default_timestep() : 1.0;
    auto rhs = [&gen](const DenseMatrix& m) { return gen.rhs(m); };

    Trajectory out;
    DenseMatrix y = rho0.mat;
    double t = 0.0;
    for (double ts : sample_times) {
        detail::integrate_span(y, t, ts, config, default_dt, rhs);
        t = ts;

        DensityOperator snap(rho0.space, y);
        out.max_trace_drift =
            std::max(out.max_trace_drift, std::abs(snap.trace() - cxd(1.0, 0.0)));
        out.max_hermiticity_deviation =
            std::max(out.max_hermiticity_deviation, snap.hermiticity_deviation());
        out.min_eigenvalue = std::min(out.min_eigenvalue, snap.min_eigenvalue());
        if (config.renormalize_trace) {
            snap.mat /= snap.trace().real();
            y = snap.mat;
        }
        out.samples.push_back({ts, std::move(snap)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Off-diagonal coherence blocks.
//
// The two-qubit ge,eg coherence block M(t) on the two mechanical modes obeys
//   dM/dt = sum_j { -i w_m [n_j, M] + thermal_j(M) } - 2 gq M
//           - i lambda_A (b_A + b_A+) M + i lambda_B M (b_B + b_B+),
// where gq is the per-qubit coherence dephasing rate (so the block trace
// decays as e^{-2 gq t} times the mechanical envelope). The generic generator
// below also covers the collective-mode variants: an anticommutator drive
// -i c {X, M} for the excited normal mode, a commutator drive for the
// spectator, and an optional -Gamma [x, [x, M]] channel.

class BlockGenerator {
  public:
    explicit BlockGenerator(CompositeSpace space) : space_(std::move(space)) {}

    const CompositeSpace& space() const { return space_; }

    void add_hamiltonian(const SparseMatrix& h) {
        h_ = have_h_ ? SparseMatrix(h_ + h) : h;
        have_h_ = true;
    }
    void add_thermal(double rate, double n_bar, int subsystem) {
        const int n = space_.subsystem(subsystem).truncation;
        const SparseMatrix b = embed_on(annihilation(n).mat, space_, {subsystem}).mat;
        add_jump(rate / 2.0 * (n_bar + 1.0), b);
        if (n_bar > 0) add_jump(rate / 2.0 * n_bar, SparseMatrix(b.adjoint()));
    }
    void add_scalar_decay(double rate) { scalar_ -= rate; }
    // coef * (op M) contribution
    void add_left(cxd coef, const SparseMatrix& op) { left_.push_back({coef, op}); }
    // coef * (M op) contribution
    void add_right(cxd coef, const SparseMatrix& op) { right_.push_back({coef, op}); }
    void add_drive_left(double lambda, int subsystem) {
        add_left(-ci * lambda, x_times_sqrt2(subsystem));
    }
    void add_drive_right(double lambda, int subsystem) {
        add_right(ci * lambda, x_times_sqrt2(subsystem));
    }
    // -i c {X, M} with X = b + b+
    void add_drive_anticommutator(double c, int subsystem) {
        const SparseMatrix x = x_times_sqrt2(subsystem);
        add_left(-ci * c, x);
        add_right(-ci * c, x);
    }
    // -i c [X, M]
    void add_drive_commutator(double c, int subsystem) {
        const SparseMatrix x = x_times_sqrt2(subsystem);
        add_left(-ci * c, x);
        add_right(ci * c, x);
    }
    void add_position_double_commutator(double gamma, int subsystem) {
        if (gamma == 0.0) return;
        const int n = space_.subsystem(subsystem).truncation;
        const SparseMatrix x = embed_on(position_operator(n).mat, space_, {subsystem}).mat;
        dcomms_.push_back({gamma, x, SparseMatrix(x * x)});
    }

    DenseMatrix rhs(const DenseMatrix& m) const {
        DenseMatrix out = DenseMatrix::Zero(m.rows(), m.cols());
        if (have_h_) out.noalias() -= ci * (h_ * m - m * h_);
        for (const auto& j : jumps_) {
            out.noalias() += (2.0 * j.weight) * DenseMatrix(j.op * m * j.op_dag);
            out.noalias() -= j.weight * (j.opdag_op * m);
            out.noalias() -= j.weight * (m * j.opdag_op);
        }
        for (const auto& l : left_) out.noalias() += l.coef * (l.op * m);
        for (const auto& r : right_) out.noalias() += r.coef * (m * r.op);
        for (const auto& d : dcomms_) {
            out.noalias() += (2.0 * d.gamma) * DenseMatrix(d.x * m * d.x);
            out.noalias() -= d.gamma * (d.x2 * m);
            out.noalias() -= d.gamma * (m * d.x2);
        }
        if (scalar_ != 0.0) out.noalias() += scalar_ * m;
        return out;
    }

    double default_timestep(double omega_scale, double rate_scale) const {
        double dt = constants::two_pi / std::max(omega_scale, 1e-300) / 40.0;
        if (rate_scale > 0) dt = std::min(dt, 1.0 / (20.0 * rate_scale));
        return dt;
    }

  private:
    struct Jump {
        double weight;
        SparseMatrix op, op_dag, opdag_op;
    };
    struct Side {
        cxd coef;
        SparseMatrix op;
    };
    struct DoubleComm {
        double gamma;
        SparseMatrix x, x2;
    };

    SparseMatrix x_times_sqrt2(int subsystem) const {
        const int n = space_.subsystem(subsystem).truncation;
        const auto b = annihilation(n).mat;
        return embed_on(SparseMatrix(b + SparseMatrix(b.adjoint())), space_, {subsystem}).mat;
    }
    void add_jump(double w, const SparseMatrix& l) {
        if (w == 0.0) return;
        SparseMatrix ld = l.adjoint();
        jumps_.push_back({w, l, ld, SparseMatrix(ld * l)});
    }

    CompositeSpace space_;
    SparseMatrix h_;
    bool have_h_ = false;
    double scalar_ = 0.0;
    std::vector<Jump> jumps_;
    std::vector<Side> left_, right_;
    std::vector<DoubleComm> dcomms_;
};

struct OffdiagonalBlockParams {
    double omega_m = 0.0;
    double lambda_A = 0.0;
    double lambda_B = 0.0;
    double gamma_m = 0.0;
    double n_bar = 0.0;
    double gamma_q_tilde = 0.0;  // per-qubit coherence rate; block decays at 2x
};

inline BlockGenerator make_offdiagonal_block_generator(const OffdiagonalBlockParams& p,
                                                       int truncation) {
    CompositeSpace space(
        {SubsystemSpec::boson(truncation), SubsystemSpec::boson(truncation)});
    BlockGenerator gen(space);
    for (int j : {0, 1}) {
        const SparseMatrix n =
            embed_on(number_operator(truncation).mat, space, {j}).mat;
        gen.add_hamiltonian(SparseMatrix(p.omega_m * n));
        if (p.gamma_m > 0) gen.add_thermal(p.gamma_m, p.n_bar, j);
    }
    gen.add_scalar_decay(2.0 * p.gamma_q_tilde);
    if (p.lambda_A != 0.0) gen.add_drive_left(p.lambda_A, 0);
    if (p.lambda_B != 0.0) gen.add_drive_right(p.lambda_B, 1);
    return gen;
}

inline Operator offdiagonal_block_rhs(const Operator& block, const OffdiagonalBlockParams& p) {
    if (block.space.count() != 2 || block.space.subsystem(0).kind != SubsystemKind::boson)
        throw std::invalid_argument("offdiagonal_block_rhs: expects two mechanical modes");
    auto gen = make_offdiagonal_block_generator(p, block.space.subsystem(0).truncation);
    return {block.space, gen.rhs(block.dense())};
}

// Block trajectory; returns (t, Tr M(t)) pairs and the final block.
struct BlockTrajectory {
    std::vector<std::pair<double, cxd>> trace_series;
    DenseMatrix final_block;
};

inline BlockTrajectory evolve_block(const BlockGenerator& gen, const DenseMatrix& m0,
                                    const std::vector<double>& sample_times,
                                    double omega_scale, double rate_scale,
                                    const IntegratorConfig& config = {}) {
    config.check();
    BlockTrajectory out;
    DenseMatrix y = m0;
    const double default_dt = gen.default_timestep(omega_scale, rate_scale);
    auto rhs = [&gen](const DenseMatrix& m) { return gen.rhs(m); };
    double t = 0.0;
    for (double ts : sample_times) {
        if (ts < t) throw std::invalid_argument("evolve_block: sample times must be sorted");
        detail::integrate_span(y, t, ts, config, default_dt, rhs);
        t = ts;
        out.trace_series.emplace_back(ts, y.trace());
    }
    out.final_block = std::move(y);
    return out;
}

}  // namespace mecs
