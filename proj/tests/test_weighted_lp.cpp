#include <gtest/gtest.h>

#include "lsq/lindblad.hpp"
#include "lsq/weighted_lp.hpp"

using namespace lsq;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

WeightedContext half() { return WeightedContext(FullRankState::maximally_mixed(2)); }

// Independent evaluation of the weighted p-norm for commuting diagonal sigma and f.
double diagonal_lp(const std::vector<double>& s, const std::vector<double>& f, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * std::pow(std::abs(f[i]), p);
    return std::pow(acc, 1.0 / p);
}

// Qubit thermal generator with lowering rate g and raising rate g e^{-2 beta}.
Superoperator qubit_thermal(double beta, double g = 1.0) {
    LindbladSpec spec{HermitianOperator::zero(2),
                      {std::sqrt(g) * ket_bra(2, 0, 1), std::sqrt(g * std::exp(-2 * beta)) * ket_bra(2, 1, 0)}};
    return build_lindblad(spec);
}

} // namespace

TEST(WeightedLp, IdentityHasUnitNorm) {
    std::mt19937_64 rng(2);
    const WeightedContext ctx(random_state(3, rng));
    for (double p : {1.0, 1.5, 2.0, 4.0, 7.3}) EXPECT_NEAR(lp_norm(ctx, identity(3), p), 1.0, 1e-12);
}

TEST(WeightedLp, ProjectorNorms) {
    EXPECT_NEAR(lp_norm(half(), ket_bra(2, 0, 0), 2.0), 0.7071068, 1e-7);
    EXPECT_NEAR(lp_norm(half(), ket_bra(2, 0, 0), 4.0), 0.8408964, 1e-7);
}

TEST(WeightedLp, DiagonalOracle) {
    const WeightedContext ctx{FullRankState(HermitianOperator(diag2(0.2, 0.8)))};
    for (double p : {1.0, 2.0, 3.0, 4.5})
        EXPECT_NEAR(lp_norm(ctx, diag2(1.7, -0.4), p), diagonal_lp({0.2, 0.8}, {1.7, -0.4}, p), 1e-12);
}

TEST(WeightedLp, InvalidExponent) {
    EXPECT_THROW(lp_norm(half(), identity(2), 0.5), InvalidExponent);
    EXPECT_THROW(lp_norm(half(), identity(3), 2.0), DimensionMismatch);
}

TEST(WeightedLp, InnerProductBasics) {
    EXPECT_NEAR(weighted_inner(half(), HermitianOperator::identity(2), HermitianOperator::identity(2)), 1.0, 1e-14);
    EXPECT_NEAR(weighted_inner(half(), HermitianOperator(pauli_x()), HermitianOperator(pauli_z())), 0.0, 1e-14);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const WeightedContext ctx(random_state(4, rng));
        const auto f = random_hermitian(4, rng), g = random_hermitian(4, rng);
        EXPECT_NEAR(weighted_inner(ctx, f, f), std::pow(lp_norm(ctx, f, 2.0), 2), 1e-10);
        EXPECT_NEAR(weighted_inner(ctx, f, g), weighted_inner(ctx, g, f), 1e-10);
    }
}

TEST(WeightedLp, NormMonotoneInExponent) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const WeightedContext ctx(random_state(3, rng));
        const auto f = random_hermitian(3, rng);
        double prev = lp_norm(ctx, f, 1.0);
        for (double p : {1.3, 2.0, 2.5, 4.0, 8.0}) {
            const double cur = lp_norm(ctx, f, p);
            EXPECT_LE(prev, cur + 1e-10);
            prev = cur;
        }
    }
}

TEST(WeightedLp, FourNormBoundedByInverseNorm) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const WeightedContext ctx(random_state(3, rng));
        const auto f = random_hermitian(3, rng);
        EXPECT_LE(lp_norm(ctx, f, 4.0),
                  std::pow(ctx.sigma().inverse_norm(), 0.25) * lp_norm(ctx, f, 2.0) + 1e-10);
    }
}

TEST(WeightedLp, DirichletFormExamples) {
    const auto ctx = half();
    // L(f) = tr[sigma f] 1 - f
    const auto l = superop_from_action([](const Matrix& f) {
        Matrix r = 0.5 * f.trace() * identity(2) - f;
        return r;
    }, 2);
    EXPECT_NEAR(dirichlet_form(ctx, l, HermitianOperator::identity(2)), 0.0, 1e-14);
    EXPECT_NEAR(dirichlet_form(ctx, l, HermitianOperator(pauli_z())), 1.0, 1e-14);
    const Superoperator not_unital = Superoperator::identity(2);
    EXPECT_THROW(dirichlet_form(ctx, not_unital, HermitianOperator(pauli_z())), NotUnital);
}

TEST(WeightedLp, DirichletFormDominatesGapVariance) {
    const auto a = analyze(qubit_thermal(0.8));
    const WeightedContext ctx(a.fixed_point);
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_hermitian(2, rng);
        const double mean = (a.fixed_point.matrix() * f.matrix()).trace().real();
        const HermitianOperator centered(f.matrix() - mean * identity(2));
        const double e = dirichlet_form(ctx, a.generator, f);
        EXPECT_GE(e, -1e-10);
        EXPECT_GE(e + 1e-10, a.gap * std::pow(lp_norm(ctx, centered, 2.0), 2));
    }
}

TEST(WeightedLp, EntropyExamples) {
    std::mt19937_64 rng(15);
    const WeightedContext ctx(random_state(3, rng));
    EXPECT_NEAR(ent_functional(ctx, HermitianOperator::identity(3)), 0.0, 1e-12);
    EXPECT_NEAR(ent_functional(ctx, HermitianOperator(3.7 * identity(3))), 0.0, 1e-12);
    EXPECT_NEAR(ent_functional(half(), HermitianOperator(diag2(std::sqrt(2.0), 0.0))), std::log(2.0) / 2, 1e-12);
    EXPECT_NEAR(std::log(2.0) / 2, 0.3465736, 1e-7);
    EXPECT_THROW(ent_functional(half(), HermitianOperator(pauli_z())), NegativeInput);
}

// In the commuting case the functional equals half the classical entropy of f^2 against sigma.
TEST(WeightedLp, EntropyCommutingOracle) {
    const std::vector<double> s{0.15, 0.35, 0.5};
    const std::vector<double> f{0.3, 2.1, 1.2};
    Matrix sm = Matrix::Zero(3, 3), fm = Matrix::Zero(3, 3);
    double norm2 = 0.0, classical = 0.0;
    for (int i = 0; i < 3; ++i) {
        sm(i, i) = s[i];
        fm(i, i) = f[i];
        norm2 += s[i] * f[i] * f[i];
    }
    for (int i = 0; i < 3; ++i) classical += s[i] * f[i] * f[i] * std::log(f[i] * f[i] / norm2);
    const WeightedContext ctx{FullRankState(HermitianOperator(sm))};
    EXPECT_NEAR(ent_functional(ctx, HermitianOperator(fm)), 0.5 * classical, 1e-12);
}

TEST(WeightedLp, EntropyNonnegativeOnRandomPsd) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 30; ++trial) {
        const WeightedContext ctx(random_state(3, rng));
        const auto f = random_psd(3, rng, 1 + trial % 3);
        EXPECT_GE(ent_functional(ctx, f), -1e-10);
    }
}

TEST(WeightedLp, QFormBasics) {
    std::mt19937_64 rng(17);
    const WeightedContext ctx(random_state(3, rng));
    const auto id = HermitianOperator::identity(3);
    EXPECT_NEAR(q_form(ctx, id, id, id, id).value.real(), 1.0, 1e-12);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix v1 = random_matrix(3, 3, rng), v2 = random_matrix(3, 3, rng);
        const Matrix v3 = random_matrix(3, 3, rng), v4 = random_matrix(3, 3, rng);
        const auto q = q_form(ctx, v1, v2, v3, v4);
        const Matrix& s = ctx.sigma().power(1, 4);
        EXPECT_LE(std::abs(q.value - (s * v1.adjoint() * s * v2 * s * v3.adjoint() * s * v4).trace()), 1e-10);
        const double bound = lp_norm(ctx, v1, 4) * lp_norm(ctx, v2, 4) * lp_norm(ctx, v3, 4) * lp_norm(ctx, v4, 4);
        EXPECT_LE(q.magnitude, bound + 1e-10);
    }
}

TEST(WeightedLp, TwoToFourNormOfIdentityMap) {
    AscentOptions opt;
    opt.restarts = 8;
    const auto r = norm_2_to_q(half(), Superoperator::identity(2), 4.0, opt);
    EXPECT_NEAR(r.lower, std::pow(2.0, 0.25), 1e-8);
    ASSERT_TRUE(r.upper.has_value());
    EXPECT_LE(r.lower, *r.upper + 1e-12);
    EXPECT_NEAR(std::pow(2.0, 0.25), 1.1892, 1e-4);
}

TEST(WeightedLp, TwoToFourNormOfProjection) {
    std::mt19937_64 rng(19);
    const auto sigma = random_state(2, rng);
    const Matrix s = sigma.matrix();
    const auto proj = superop_from_action([&](const Matrix& f) {
        Matrix r = (s * f).trace() * identity(2);
        return r;
    }, 2);
    AscentOptions opt;
    opt.restarts = 8;
    const auto r = norm_2_to_q(WeightedContext(sigma), proj, 4.0, opt);
    EXPECT_NEAR(r.lower, 1.0, 1e-8);
}

TEST(WeightedLp, TwoToQNormOfSemigroupAtLeastOne) {
    const auto a = analyze(qubit_thermal(0.5));
    AscentOptions opt;
    opt.restarts = 6;
    const auto r = norm_2_to_q(WeightedContext(a.fixed_point), evolve(a, 0.2), 4.0, opt);
    EXPECT_GE(r.lower, 1.0 - 1e-12);
    EXPECT_LE(r.lower, *r.upper + 1e-10);
    EXPECT_THROW(norm_2_to_q(half(), Superoperator::identity(2), 2.0), InvalidExponent);
}
