#include <mecs/hilbert.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support/test_helpers.hpp"

using namespace mecs;
using Catch::Matchers::WithinAbs;

TEST_CASE("annihilation operator") {
    SECTION("acts as sqrt(n) lowering") {
        auto a = annihilation(5);
        auto space = a.space;
        auto v0 = apply(a, vacuum_state(space));
        REQUIRE(v0.amp.norm() == 0.0);

        auto v3 = apply(a, basis_state(space, {3}));
        REQUIRE_THAT(std::abs(overlap(basis_state(space, {2}), v3)),
                     WithinAbs(std::sqrt(3.0), 1e-14));
        REQUIRE_THAT(v3.amp.norm(), WithinAbs(std::sqrt(3.0), 1e-14));
    }

    SECTION("commutator [a, a^dag] is identity except in the last Fock level") {
        // At the cutoff the commutator picks up -N in the corner; everything
        // below the edge is exact.
        const int n_max = 7;
        auto a = annihilation(n_max);
        DenseMatrix comm = a.dense() * a.adjoint().dense() - a.adjoint().dense() * a.dense();
        for (int n = 0; n < n_max; ++n) REQUIRE_THAT(comm(n, n).real(), WithinAbs(1.0, 1e-13));
        REQUIRE_THAT(comm(n_max, n_max).real(), WithinAbs(-double(n_max), 1e-13));
        comm.diagonal().setZero();
        REQUIRE(comm.cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("rejects zero truncation") {
        REQUIRE_THROWS_AS(annihilation(0), std::invalid_argument);
    }
}

TEST_CASE("embed") {
    CompositeSpace two_qubits({SubsystemSpec::qubit(), SubsystemSpec::qubit()});

    SECTION("identity embeds to identity") {
        auto id = identity_operator(CompositeSpace({SubsystemSpec::qubit()}));
        auto emb = embed(id, two_qubits, 1);
        REQUIRE((emb.dense() - DenseMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
    }

    SECTION("acts on the named tensor factor only") {
        // sigma = |g><e| on subsystem 0 of a 2x2 space, applied to |e,g>.
        Operator sigma(CompositeSpace({SubsystemSpec::qubit()}), transition_matrix(0, 1, 2));
        auto psi = basis_state(two_qubits, {1, 0});
        auto out = apply(embed(sigma, two_qubits, 0), psi);
        REQUIRE_THAT(std::abs(overlap(basis_state(two_qubits, {0, 0}), out)),
                     WithinAbs(1.0, 1e-14));
    }

    SECTION("number operator expectation on |0> x |2>") {
        CompositeSpace s({SubsystemSpec::boson(4), SubsystemSpec::boson(4)});
        auto psi = basis_state(s, {0, 2});
        auto n1 = embed(number_operator(4), s, 1);
        REQUIRE_THAT(expectation(psi, n1).real(), WithinAbs(2.0, 1e-14));
    }

    SECTION("index out of range") {
        auto id = identity_operator(CompositeSpace({SubsystemSpec::qubit()}));
        REQUIRE_THROWS_AS(embed(id, two_qubits, 2), std::invalid_argument);
    }

    SECTION("three-factor embedding equals iterated two-factor tensor products") {
        CompositeSpace s(
            {SubsystemSpec::qubit(), SubsystemSpec::boson(3), SubsystemSpec::qutrit()});
        auto n = number_operator(3);
        auto emb = embed(n, s, 1);
        auto iter = tensor(tensor(identity_operator(CompositeSpace({SubsystemSpec::qubit()})), n),
                           identity_operator(CompositeSpace({SubsystemSpec::qutrit()})));
        REQUIRE((emb.dense() - iter.dense()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("partial trace") {
    SECTION("product state reduces to its factor") {
        auto gen = test_support::rng(11);
        CompositeSpace qa({SubsystemSpec::qutrit()});
        CompositeSpace qb({SubsystemSpec::qubit()});
        DensityOperator rho_a(qa, test_support::random_density_matrix(gen, 3));
        DensityOperator rho_b(qb, test_support::random_density_matrix(gen, 2));
        auto joint = tensor(rho_a, rho_b);
        auto red = partial_trace(joint, {0});
        REQUIRE((red.mat - rho_a.mat).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("Bell state reduces to maximally mixed") {
        CompositeSpace s({SubsystemSpec::qubit(), SubsystemSpec::qubit()});
        StateVector v = StateVector::Zero(4);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);
        auto red = partial_trace(PureState(s, v), {1});
        REQUIRE((red.mat - 0.5 * DenseMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("entangled coherent state purity matches brute-force contraction") {
        // |psi_+> ~ |-a>|a> + |a>|-a> at a = 0.5, truncation 20. The oracle
        // contracts the Fock indices explicitly; the closed form follows from
        // s = <a|-a> = exp(-2|a|^2):  P = (1 + 6 s^2 + s^4) / (2 (1 + s^2)^2).
        const int nmax = 20;
        const cxd alpha{0.5, 0.0};
        auto plus = coherent_state(alpha, nmax);
        auto minus = coherent_state(-alpha, nmax);
        PureState psi = tensor(minus, plus);
        psi.amp += tensor(plus, minus).amp;
        psi.normalize();

        auto red = partial_trace(psi, {0});

        const long d = nmax + 1;
        DenseMatrix oracle = DenseMatrix::Zero(d, d);
        for (long i = 0; i < d; ++i)
            for (long j = 0; j < d; ++j)
                for (long k = 0; k < d; ++k)
                    oracle(i, j) += psi.amp[i * d + k] * std::conj(psi.amp[j * d + k]);
        REQUIRE((red.mat - oracle).cwiseAbs().maxCoeff() < 1e-13);

        const double s = std::exp(-2.0 * std::norm(alpha));
        const double closed =
            (1.0 + 6.0 * s * s + s * s * s * s) / (2.0 * (1.0 + s * s) * (1.0 + s * s));
        REQUIRE_THAT(purity(red), WithinAbs(closed, 1e-9));
        REQUIRE_THAT(closed, WithinAbs(0.8932238664829638, 1e-9));  // frozen from the oracle
    }

    SECTION("keeping everything returns the state; trace is preserved") {
        auto gen = test_support::rng(13);
        CompositeSpace s({SubsystemSpec::qubit(), SubsystemSpec::qutrit()});
        DensityOperator rho(s, test_support::random_density_matrix(gen, 6));
        auto full = partial_trace(rho, {0, 1});
        REQUIRE((full.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-13);
        auto red = partial_trace(rho, {1});
        REQUIRE_THAT(red.trace().real(), WithinAbs(rho.trace().real(), 1e-10));
    }

    SECTION("empty keep set rejected") {
        CompositeSpace s({SubsystemSpec::qubit(), SubsystemSpec::qubit()});
        DensityOperator rho(s, DenseMatrix::Identity(4, 4) / 4.0);
        REQUIRE_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    }
}

TEST_CASE("displacement operator") {
    SECTION("zero displacement is the identity") {
        auto d0 = displacement(0.0, 10);
        REQUIRE((d0.dense() - DenseMatrix::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("vacuum overlap <0|D(a)|0> = exp(-|a|^2/2)") {
        const cxd alpha{0.3, 0.0};
        auto d = displacement(alpha, 20);
        const cxd got = d.dense()(0, 0);
        REQUIRE_THAT(std::abs(got - std::exp(-std::norm(alpha) / 2.0)), WithinAbs(0.0, 1e-8));
    }

    SECTION("D(a) D(-a) = 1") {
        const cxd alpha{0.5, 0.0};
        auto prod = displacement(alpha, 20) * displacement(-alpha, 20);
        REQUIRE((prod.dense() - DenseMatrix::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-8);
    }

    SECTION("unitarity on the bulk of the Fock ladder") {
        const cxd alpha{0.7, 0.4};
        const int nmax = 20;
        auto d = displacement(alpha, nmax);
        DenseMatrix dev = (d.adjoint() * d).dense() - DenseMatrix::Identity(nmax + 1, nmax + 1);
        const int safe = nmax - static_cast<int>(std::ceil(4.0 * std::norm(alpha) + 6.0));
        REQUIRE(dev.topLeftCorner(safe + 1, safe + 1).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("coherent states") {
    SECTION("alpha = 0 gives the vacuum") {
        auto c = coherent_state(0.0, 8);
        REQUIRE_THAT(std::abs(c.amp[0]), WithinAbs(1.0, 1e-14));
    }

    SECTION("overlap <a|-a> = exp(-2|a|^2)") {
        const cxd alpha{0.5, 0.0};
        auto p = coherent_state(alpha, 20);
        auto m = coherent_state(-alpha, 20);
        REQUIRE_THAT(std::abs(overlap(p, m) - std::exp(-2.0 * std::norm(alpha))),
                     WithinAbs(0.0, 1e-8));
    }

    SECTION("mean photon number |alpha|^2") {
        auto c = coherent_state(0.05, 12);
        REQUIRE_THAT(expectation(c, number_operator(12)).real(), WithinAbs(2.5e-3, 1e-9));
    }

    SECTION("tail weight diagnostic is tiny for adequate truncation") {
        REQUIRE(coherent_tail_weight(0.5, 20) < 1e-16);
        REQUIRE(coherent_tail_weight(2.0, 8) > 1e-3);  // inadequate cutoff is flagged
    }
}

TEST_CASE("expectation values") {
    SECTION("identity expectation is the trace") {
        auto gen = test_support::rng(17);
        CompositeSpace s({SubsystemSpec::boson(5)});
        DensityOperator rho(s, test_support::random_density_matrix(gen, 6));
        REQUIRE_THAT(expectation(rho, identity_operator(s)).real(), WithinAbs(1.0, 1e-12));
    }

    SECTION("Fock state photon number") {
        CompositeSpace s({SubsystemSpec::boson(4)});
        auto rho = DensityOperator::from_pure(basis_state(s, {1}));
        REQUIRE_THAT(expectation(rho, number_operator(4)).real(), WithinAbs(1.0, 1e-14));
    }

    SECTION("thermal occupation from the geometric distribution") {
        auto th = thermal_state(0.5, 30);
        REQUIRE_THAT(expectation(th, number_operator(30)).real(), WithinAbs(0.5, 1e-6));
    }

    SECTION("space mismatch rejected") {
        CompositeSpace a({SubsystemSpec::boson(3)});
        CompositeSpace b({SubsystemSpec::boson(4)});
        DensityOperator rho(a, DenseMatrix::Identity(4, 4) / 4.0);
        REQUIRE_THROWS_AS(expectation(rho, number_operator(4)), std::invalid_argument);
    }
}

TEST_CASE("tensor algebra properties") {
    auto gen = test_support::rng(23);

    SECTION("(A x B)^dag = A^dag x B^dag") {
        CompositeSpace qa({SubsystemSpec::qubit()});
        CompositeSpace qb({SubsystemSpec::qutrit()});
        for (int rep = 0; rep < 5; ++rep) {
            Operator a(qa, test_support::random_complex_matrix(gen, 2));
            Operator b(qb, test_support::random_complex_matrix(gen, 3));
            auto lhs = tensor(a, b).adjoint();
            auto rhs = tensor(a.adjoint(), b.adjoint());
            REQUIRE((lhs.dense() - rhs.dense()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SECTION("operator space checks") {
        CompositeSpace qa({SubsystemSpec::qubit()});
        CompositeSpace qb({SubsystemSpec::qutrit()});
        Operator a(qa, test_support::random_complex_matrix(gen, 2));
        Operator b(qb, test_support::random_complex_matrix(gen, 3));
        REQUIRE_THROWS_AS(a * b, std::invalid_argument);
    }

    SECTION("permutation round trip") {
        CompositeSpace s(
            {SubsystemSpec::qubit(), SubsystemSpec::boson(3), SubsystemSpec::qutrit()});
        StateVector v = StateVector::Random(s.dimension());
        PureState psi(s, v);
        auto perm = permute_subsystems(psi, {2, 0, 1});
        auto back = permute_subsystems(perm, {1, 2, 0});
        REQUIRE((back.amp - psi.amp).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("density operator validation") {
    CompositeSpace s({SubsystemSpec::qubit()});
    SECTION("accepts a proper state") {
        DensityOperator rho(s, DenseMatrix::Identity(2, 2) / 2.0);
        REQUIRE_NOTHROW(rho.validate());
    }
    SECTION("rejects trace deviation") {
        DensityOperator rho(s, DenseMatrix::Identity(2, 2));
        REQUIRE_THROWS_AS(rho.validate(), std::invalid_argument);
    }
    SECTION("rejects negativity beyond slack") {
        DenseMatrix m(2, 2);
        m << 1.5, 0.0, 0.0, -0.5;
        DensityOperator rho(s, m);
        REQUIRE_THROWS_AS(rho.validate(), std::invalid_argument);
    }
}
