#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "clustergibbs/generators.hpp"
#include "clustergibbs/oracle.hpp"

using namespace clustergibbs;
using oracle::Matrix;

TEST(Oracle, GibbsMatchesPadeExponential) {
    Random rng(71);
    const auto spec = generators::random_chain(3, rng);
    for (double beta : {0.1, 1.0}) {
        const Matrix h = oracle::dense_hamiltonian(spec);
        const Matrix reference = (-beta * h).exp();
        EXPECT_LT((oracle::dense_gibbs(spec, beta).rho - reference).norm(), 1e-8 * reference.norm());
    }
    // Real-H path.
    const auto real = generators::random_chain(3, rng, true);
    const Matrix reference = (-0.7 * oracle::dense_hamiltonian(real)).exp();
    EXPECT_LT((oracle::dense_gibbs(real, 0.7).rho - reference).norm(), 1e-8 * reference.norm());
}

TEST(Oracle, ClosedFormMarginals) {
    const double lambda = 0.7, beta = 0.9;
    EXPECT_NEAR(oracle::exact_marginal(oracle::dense_gibbs(make_spec(2, {}), beta), {}, 1, basis_axis('Z')), 0.5, 1e-15);
    const auto zz = oracle::dense_gibbs(make_spec(2, {{lambda, parse_pauli("Z0 Z1")}}), beta);
    ProjectorProduct e;
    e.add(0, basis_axis('Z'));
    EXPECT_NEAR(oracle::exact_marginal(zz, e, 1, basis_axis('Z')), 0.5 * (1 - std::tanh(beta * lambda)), 1e-14);
    const auto x = oracle::dense_gibbs(make_spec(1, {{lambda, parse_pauli("X0")}}), beta);
    EXPECT_NEAR(oracle::exact_marginal(x, {}, 0, basis_axis('X')), 0.5 * (1 - std::tanh(beta * lambda)), 1e-14);
}

TEST(Oracle, ConditioningMatchesDenseProjection) {
    Random rng(72);
    const auto spec = generators::random_chain(5, rng);
    const auto st = oracle::dense_gibbs(spec, 0.4);
    for (int t = 0; t < 10; ++t) {
        ProjectorProduct e;
        for (int q = 0; q < 4; ++q)
            if (rng.chance(0.5)) e.add(q, rng.unit_vector());
        const Vec3 axis = rng.unit_vector();
        const Matrix ed = oracle::dense_projectors(e, 5);
        const Matrix p4 = oracle::embed(oracle::projector(axis), 4, 5);
        const double want = (p4 * ed * st.rho).trace().real() / (ed * st.rho).trace().real();
        const double p0 = oracle::exact_marginal(st, e, 4, axis, 0);
        EXPECT_NEAR(p0, want, 1e-12);
        EXPECT_NEAR(p0 + oracle::exact_marginal(st, e, 4, axis, 1), 1.0, 1e-10);
    }
}

TEST(Oracle, RestrictReordersQubits) {
    Random rng(73);
    const auto spec = generators::random_chain(4, rng);
    const auto st = oracle::dense_gibbs(spec, 0.5);
    const auto r = oracle::full(st).restrict_to({3, 1});
    // <Z3 X1> on the reduced operator with qubit 3 in bit 0.
    const Matrix op = oracle::dense_pauli(parse_pauli("Z0 X1"), 2);
    const double reduced = (op * r.rho).trace().real() / r.trace();
    const double full = (oracle::dense_pauli(parse_pauli("Z3 X1"), 4) * st.rho).trace().real() / st.rho.trace().real();
    EXPECT_NEAR(reduced, full, 1e-12);
}

TEST(Oracle, DistributionAndTv) {
    Random rng(74);
    const auto spec = generators::random_chain(4, rng);
    const auto st = oracle::dense_gibbs(spec, 0.3);
    const auto p = oracle::exact_distribution(st, Schedule::z_basis(4));
    double total = 0.0;
    for (const auto& [x, v] : p) total += v;
    EXPECT_NEAR(total, 1.0, 1e-10);
    // Z-basis probabilities are the diagonal of the normalized Gibbs state.
    for (const auto& [x, v] : p) {
        std::size_t s = 0;
        for (int q = 0; q < 4; ++q) s |= std::size_t(x[q] - '0') << q;
        EXPECT_NEAR(v, st.rho(s, s).real() / st.rho.trace().real(), 1e-12);
    }
    EXPECT_EQ(oracle::exact_tv(p, p), 0.0);
    EXPECT_EQ(oracle::exact_tv({{"0", 1.0}}, {{"1", 1.0}}), 2.0);
    const auto q = oracle::exact_distribution(oracle::dense_gibbs(spec, 0.1), Schedule::z_basis(4));
    EXPECT_DOUBLE_EQ(oracle::exact_tv(p, q), oracle::exact_tv(q, p));
}

TEST(Oracle, Correlations) {
    const double lambda = 0.6, beta = 0.8;
    const auto zz = oracle::dense_gibbs(make_spec(2, {{lambda, parse_pauli("Z0 Z1")}}), beta);
    EXPECT_NEAR(oracle::exact_correlation(zz, {}, 0, 1).value, std::tanh(beta * lambda), 1e-12);
    const auto product = oracle::dense_gibbs(make_spec(2, {{lambda, parse_pauli("Z0")}, {lambda, parse_pauli("Z1")}}), beta);
    EXPECT_LT(oracle::exact_correlation(product, {}, 0, 1).value, 1e-10);

    Random rng(75);
    const auto spec = generators::random_chain(6, rng);
    const auto st = oracle::dense_gibbs(spec, 0.5);
    ProjectorProduct e;
    e.add(2, rng.unit_vector());
    const auto c = oracle::exact_correlation(st, e, 0, 4);
    // The singular vectors realize the value through a direct trace.
    const Matrix ed = oracle::dense_projectors(e, 6);
    Matrix a = Matrix::Zero(64, 64), b = Matrix::Zero(64, 64);
    for (int k = 0; k < 3; ++k) {
        a += c.ei[k] * oracle::embed(oracle::sigma(k), 0, 6);
        b += c.ej[k] * oracle::embed(oracle::sigma(k), 4, 6);
    }
    const Matrix rho = ed * st.rho * ed / (ed * st.rho).trace().real();
    const double direct = (a * b * rho).trace().real() - (a * rho).trace().real() * (b * rho).trace().real();
    EXPECT_NEAR(direct, c.value, 1e-10);
    EXPECT_NEAR(oracle::connected_correlator(st, e, 0, 4, c.ei, c.ej), c.value, 1e-12);
    // Decay with distance on a chain.
    EXPECT_LT(c.value, oracle::exact_correlation(st, e, 0, 1).value);
}

TEST(Oracle, SizeGuard) { EXPECT_THROW(oracle::dense_pauli(parse_pauli("Z0"), 13), PreconditionError); }
