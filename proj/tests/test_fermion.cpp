#include <gtest/gtest.h>

#include <algorithm>

#include "lsq/fermion.hpp"

using namespace lsq;

namespace {

std::vector<double> sorted_spectrum(const Superoperator& l) {
    Eigen::ComplexEigenSolver<Matrix> es(l.matrix(), false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        EXPECT_LE(std::abs(es.eigenvalues()(i).imag()), 1e-9);
        out.push_back(es.eigenvalues()(i).real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void expect_same_spectrum(const Superoperator& a, const Superoperator& b, double tol = 1e-9) {
    const auto sa = sorted_spectrum(a), sb = sorted_spectrum(b);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i], sb[i], tol) << "index " << i;
}

Matrix row(std::initializer_list<cplx> v) {
    Matrix m(1, static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (cplx x : v) m(0, i++) = x;
    return m;
}

CanonicalFermionGenerator two_mode(double beta) {
    return canonical_generator({1.0, 2.0}, {0.8, 0.5}, {0.8, 0.5}, beta);
}

} // namespace

TEST(Fermion, JordanWignerSingleMode) {
    const auto w = jordan_wigner(1);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_LE((w[0] - pauli_x()).norm(), 0.0);
    EXPECT_LE((w[1] - pauli_y()).norm(), 0.0);
    EXPECT_LE((annihilator(w, 0) - ket_bra(2, 0, 1)).norm(), 1e-15);
    EXPECT_THROW(jordan_wigner(kMajoranaCap + 1), DimensionCap);
}

TEST(Fermion, MajoranaAnticommutation) {
    const auto w = jordan_wigner(3);
    int pairs = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_LE((w[i] - w[i].adjoint()).norm(), 0.0);
        for (std::size_t j = i; j < w.size(); ++j, ++pairs) {
            const Matrix expected = (i == j ? 2.0 : 0.0) * identity(8);
            EXPECT_LE((w[i] * w[j] + w[j] * w[i] - expected).norm(), 1e-12);
        }
    }
    EXPECT_EQ(pairs, 21);
    for (int k = 0; k < 3; ++k) {
        const Matrix d = annihilator(w, k);
        Eigen::SelfAdjointEigenSolver<Matrix> es(d.adjoint() * d);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            EXPECT_NEAR(std::min(std::abs(es.eigenvalues()(i)), std::abs(es.eigenvalues()(i) - 1.0)), 0.0, 1e-12);
        EXPECT_NEAR(es.eigenvalues().sum(), 4.0, 1e-12);
    }
}

TEST(Fermion, SingleModeCanonicalForm) {
    const double beta = 1.0;
    const FermionModel m{{2.0}, row({1.0}), BathSpectralDensity::flat(beta)};
    const auto g = canonicalize(m);
    EXPECT_DOUBLE_EQ(g.rates[0], 1.0);
    const Matrix d = ket_bra(2, 0, 1);
    const auto ref = build_lindblad({HermitianOperator::zero(2), {d, std::exp(-beta) * d.adjoint()}});
    EXPECT_LE((g.generator.matrix() - ref.matrix()).norm(), 1e-14);
    EXPECT_LE((g.generator.matrix() - build_davies_generator(fermion_davies_model(m)).matrix()).norm(), 1e-12);
    EXPECT_TRUE(g.primitive);
}

TEST(Fermion, NonDegenerateRatesAndDirectDavies) {
    const double beta = 0.7;
    Matrix s(2, 2);
    s << cplx(0.3, 0.4), cplx(-0.5, 0.1), cplx(0.2, -0.6), cplx(0.7, 0.2);
    const FermionModel m{{1.0, 2.5}, s, BathSpectralDensity::ohmic(beta)};
    const auto g = canonicalize(m);
    for (int k = 0; k < 2; ++k) {
        double expected = 0.0;
        for (int a = 0; a < 2; ++a) expected += m.bath(static_cast<std::size_t>(a), m.frequencies[static_cast<std::size_t>(k)]) * std::norm(s(a, k));
        EXPECT_NEAR(g.rates[static_cast<std::size_t>(k)], expected, 1e-14);
    }
    EXPECT_LE((g.generator.matrix() - build_davies_generator(fermion_davies_model(m)).matrix()).norm(), 1e-12);
}

TEST(Fermion, DegenerateClusterIsRotated) {
    const double beta = 0.9, gamma = 1.3;
    const FermionModel m{{1.5, 1.5}, row({1.0, 1.0}), BathSpectralDensity::flat(beta, gamma)};
    const auto g = canonicalize(m);
    EXPECT_NEAR(g.rates[0], 2 * gamma, 1e-12);
    EXPECT_NEAR(g.rates[1], 0.0, 1e-12);
    EXPECT_FALSE(g.primitive);
    EXPECT_THROW(analyze(g.generator), NotPrimitive);
    EXPECT_THROW(bound_fermion_lsi(g), NotPrimitive);
    expect_same_spectrum(g.generator, build_davies_generator(fermion_davies_model(m)));

    Matrix s(2, 2);
    s << cplx(0.3, 0.4), cplx(-0.5, 0.1), cplx(0.2, -0.6), cplx(0.7, 0.2);
    const FermionModel generic{{1.5, 1.5}, s, BathSpectralDensity::flat(beta)};
    const auto gg = canonicalize(generic);
    EXPECT_TRUE(gg.primitive);
    EXPECT_GE(gg.rates[0], gg.rates[1]);
    expect_same_spectrum(gg.generator, build_davies_generator(fermion_davies_model(generic)));
}

TEST(Fermion, ZeroModes) {
    const double beta = 1.0;
    // couplings 1 and i excite w_{2k} and w_{2k+1} equally
    Matrix s(2, 1);
    s << 1.0, cplx(0.0, 1.0);
    const FermionModel equal{{0.0}, s, BathSpectralDensity::flat(beta, 0.6)};
    const auto g = canonicalize(equal);
    EXPECT_NEAR(g.rates[0], g.rates_prime[0], 1e-14);
    EXPECT_NEAR(g.rates[0], 1.2, 1e-14);
    EXPECT_LE((g.generator.matrix() - build_davies_generator(fermion_davies_model(equal)).matrix()).norm(), 1e-12);

    const FermionModel single{{0.0}, row({cplx(1.0, 1.0)}), BathSpectralDensity::flat(beta)};
    const auto g1 = canonicalize(single);
    EXPECT_NEAR(g1.rates_prime[0], 4.0, 1e-12);
    EXPECT_NEAR(g1.rates[0], 0.0, 1e-12);
    EXPECT_FALSE(g1.primitive);

    Matrix s3(3, 3);
    s3 << cplx(0.3, 0.4), cplx(-0.5, 0.1), cplx(0.9, 0.0), cplx(0.2, -0.6), cplx(0.7, 0.2), cplx(0.1, 0.1),
        cplx(-0.4, 0.8), cplx(0.0, 0.3), cplx(0.5, -0.2);
    const FermionModel mixed{{0.0, 1.2, 0.0}, s3, BathSpectralDensity::ohmic(beta)};
    const auto gm = canonicalize(mixed);
    for (int k : {0, 2}) EXPECT_GE(gm.rates_prime[static_cast<std::size_t>(k)], gm.rates[static_cast<std::size_t>(k)]);
    EXPECT_GE(gm.rates[0], gm.rates_prime[2]);
    expect_same_spectrum(gm.generator, build_davies_generator(fermion_davies_model(mixed)));
}

TEST(Fermion, NegativeRateRejected) {
    const double beta = 1.0;
    const BathSpectralDensity negative(beta, {[beta](double w) { return w >= 0 ? -1.0 : -std::exp(beta * w); }});
    EXPECT_THROW(canonicalize({{1.0}, row({1.0}), negative}), NegativeRate);
    EXPECT_THROW(canonicalize({{0.0}, row({1.0}), negative}), NegativeRate);
    EXPECT_THROW(canonical_generator({0.0}, {0.5}, {0.2}, 1.0), DomainError);
    EXPECT_THROW(canonical_generator({1.0}, {-0.5}, {-0.5}, 1.0), NegativeRate);
    EXPECT_THROW(canonicalize({{-1.0}, row({1.0}), BathSpectralDensity::flat(1.0)}), DomainError);
}

TEST(Fermion, GibbsProductFormAndReversibility) {
    for (double beta : {0.0, 0.5, 2.0}) {
        const auto g = canonical_generator({0.4, 1.7, 0.0}, {0.6, 0.9, 0.3}, {0.6, 0.9, 0.8}, beta);
        EXPECT_LE((gibbs_product_form(g.majoranas, g.frequencies, beta) - g.gibbs.matrix()).norm(), 1e-10);
        EXPECT_LE(check_detailed_balance(g.generator, g.gibbs), 1e-10);
        const auto a = analyze(g.generator);
        EXPECT_TRUE(a.reversible);
        EXPECT_LE((a.fixed_point.matrix() - g.gibbs.matrix()).norm(), 1e-9);
    }
}

TEST(Fermion, MajoranaDecomposition) {
    const auto g = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    EXPECT_LE(majorana_decomposition_check(g), 1e-12);
    EXPECT_LE(majorana_decomposition_check(two_mode(0.8)), 1e-12);
    EXPECT_EQ(majorana_decomposition_check(canonical_generator({0.0}, {0.3}, {0.7}, 1.0)), 0.0);
}

TEST(Fermion, ModeOperatorsAtZeroFrequency) {
    const auto g = canonical_generator({0.0, 0.0}, {0.3, 0.5}, {0.7, 0.5}, 1.0);
    const auto& w = g.majoranas;
    for (int k = 0; k < 2; ++k)
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b2 = 0; b2 < 2; ++b2) {
                Matrix expected = identity(4);
                if (b1) expected = expected * w[2 * static_cast<std::size_t>(k)];
                if (b2) expected = expected * w[2 * static_cast<std::size_t>(k) + 1];
                EXPECT_LE((mode_operator(g, k, b1, b2) - expected).norm(), 1e-14);
            }
}

TEST(Fermion, ModeBasisIsOrthonormalAndSpanning) {
    const auto single = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    const WeightedContext c1(single.gibbs);
    EXPECT_NEAR(lp_norm(c1, mode_operator(single, 0, 1, 0), 2.0), 1.0, 1e-12);

    for (const auto& g : {two_mode(1.3), canonical_generator({0.0, 1.1}, {0.4, 0.6}, {0.9, 0.6}, 0.7)}) {
        const auto basis = mode_basis(g);
        ASSERT_EQ(basis.ops.size(), 16u);
        const WeightedContext ctx(g.gibbs);
        Matrix gram(16, 16);
        Matrix stacked(16, 16);
        for (int i = 0; i < 16; ++i) {
            stacked.col(i) = vectorize(basis.ops[static_cast<std::size_t>(i)]);
            for (int j = 0; j < 16; ++j)
                gram(i, j) = weighted_inner_complex(ctx, basis.ops[static_cast<std::size_t>(i)], basis.ops[static_cast<std::size_t>(j)]);
        }
        EXPECT_LE((gram - Matrix::Identity(16, 16)).norm(), 1e-10);
        EXPECT_EQ(Eigen::FullPivLU<Matrix>(stacked).rank(), 16);
    }
}

TEST(Fermion, ModeBasisDiagonalizesGenerator) {
    const auto b0 = mode_basis(two_mode(1.0));
    const auto r = verify_block_structure(two_mode(1.0), b0);
    EXPECT_EQ(r.front().eigenvalue, 0.0);
    EXPECT_LE((b0.ops.front() - identity(4)).norm(), 0.0);

    const auto g = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    for (const auto& e : verify_block_structure(g, mode_basis(g)))
        if (e.bits == std::vector<int>{1, 0}) {
            EXPECT_NEAR(e.eigenvalue, -(1 + std::exp(-2.0)) / 2, 1e-15);
        }

    for (const auto& h : {canonical_generator({0.4, 1.7, 0.0}, {0.6, 0.9, 0.3}, {0.6, 0.9, 0.8}, 1.1),
                          canonical_generator({0.0, 0.0}, {0.2, 0.5}, {0.7, 0.6}, 1.0)}) {
        const auto rep = verify_block_structure(h, mode_basis(h));
        EXPECT_EQ(rep.size(), static_cast<std::size_t>(1 << (2 * h.modes)));
        for (const auto& e : rep) EXPECT_LE(e.residual, 1e-10);
    }
}

TEST(Fermion, ZeroModeEigenvaluePairing) {
    // bare w_{2k} decays at rate lambda (set by the w_{2k+1} dissipator) ...
    const auto g = canonical_generator({0.0}, {0.3}, {0.7}, 1.0);
    const Matrix& w1 = g.majoranas[0];
    EXPECT_LE((g.generator.apply(w1) + 0.3 * w1).norm(), 1e-14);
    // ... but the odd-parity basis element for b = (1, 0) is w_{2k} w_{2k+1} w_{2k} = -w_{2k+1}, at rate lambda'
    const auto basis = mode_basis(g);
    EXPECT_LE((basis.ops[2] + g.majoranas[1]).norm(), 1e-14);
    EXPECT_EQ(basis.strings[2], (std::vector<int>{1, 0}));
    EXPECT_NEAR(mode_eigenvalue(g, {1, 0}), -0.7, 1e-15);
    EXPECT_LE((g.generator.apply(basis.ops[2]) + 0.7 * basis.ops[2]).norm(), 1e-14);
    // even-parity string with an odd factor on mode 0 gets the same rate
    const auto g2 = canonical_generator({0.0, 1.0}, {0.3, 0.5}, {0.7, 0.5}, 1.0);
    const std::vector<int> b{1, 0, 1, 0};
    const Matrix f = mode_string_operator(g2, b);
    EXPECT_NEAR(mode_eigenvalue(g2, b), -0.7 - g2.mode_gap(1), 1e-15);
    EXPECT_LE((g2.generator.apply(f) - mode_eigenvalue(g2, b) * f).norm(), 1e-12);
}

TEST(Fermion, QFormSingleMode) {
    const double beta = 1.0, nu = 2.0, x = beta * nu / 2;
    const auto g = canonical_generator({nu}, {1.0}, {1.0}, beta);
    const WeightedContext ctx(g.gibbs);
    const Matrix f11 = mode_operator(g, 0, 1, 1);
    EXPECT_NEAR(q_form(ctx, f11, f11, f11, f11).value.real(), std::cosh(3 * x) / std::cosh(x), 1e-12);
    // XOR of (1,0),(1,0),(0,1),(0,0)-padded strings is (0,1): vanishes
    const auto basis = mode_basis(g);
    EXPECT_LE(q_form(ctx, basis.ops[2], basis.ops[2], basis.ops[1], identity(2)).magnitude, 1e-14);
    for (int n = 0; n <= 2; ++n) {
        const auto r = fermion_q_bound_check(g, basis, n);
        EXPECT_LE(r.max_q, r.bound * (1 + 1e-10));
        EXPECT_LE(r.max_off_rule, 1e-12);
    }
    EXPECT_NEAR(fermion_q_bound_check(g, basis, 2).max_q, std::cosh(3 * x) / std::cosh(x), 1e-12);
}

TEST(Fermion, QFormInfiniteTemperatureSaturates) {
    const auto g = canonical_generator({1.0, 2.0}, {0.5, 0.5}, {0.5, 0.5}, 0.0);
    const auto basis = mode_basis(g);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(fermion_q_bound_check(g, basis, n).max_q, 1.0, 1e-12);
}

TEST(Fermion, QFormExhaustiveTwoModes) {
    for (const auto& g : {two_mode(1.2), canonical_generator({0.0, 1.4}, {0.4, 0.6}, {0.9, 0.6}, 0.9)}) {
        const auto basis = mode_basis(g);
        long total = 0;
        for (int n = 0; n <= 4; ++n) {
            const auto r = fermion_q_bound_check(g, basis, n);
            total += r.tuples;
        }
        EXPECT_EQ(total, 1 + 256 + 1296 + 256 + 1);
    }
    EXPECT_THROW(fermion_q_bound_check(canonical_generator({1, 1, 1}, {1, 1, 1}, {1, 1, 1}, 1.0),
                                       mode_basis(canonical_generator({1, 1, 1}, {1, 1, 1}, {1, 1, 1}, 1.0)), 1),
                 DimensionCap);
}

TEST(Fermion, BlockNormRatio) {
    const auto g0 = canonical_generator({1.0}, {1.0}, {1.0}, 0.0);
    const auto b0 = mode_basis(g0);
    EXPECT_NEAR(fermion_block_norm_check(g0, b0, 0, 20), 1.0, 1e-12);
    const double r1 = fermion_block_norm_check(g0, b0, 1, 1000);
    EXPECT_LE(r1, 256.0);
    EXPECT_GE(r1, 1.0);
    const auto g = two_mode(1.5);
    const auto b = mode_basis(g);
    for (int n = 0; n <= 4; ++n) EXPECT_LE(fermion_block_norm_check(g, b, n, 300), std::pow(2.0, 8 * n) * std::exp(n * 1.5 * 2.0) * (1 + 1e-12));
}

TEST(Fermion, LsiBound) {
    EXPECT_DOUBLE_EQ(bound_fermion_lsi(0.5, 2.0, 1.0).value, 0.03125);
    EXPECT_DOUBLE_EQ(bound_fermion_lsi(0.7, 0.0, 3.0).value, 0.05);
    EXPECT_DOUBLE_EQ(bound_fermion_lsi(0.7, 0.0, 0.1).value, 0.05);
    EXPECT_DOUBLE_EQ(bound_fermion_lsi(0.5, 2.0, 1.0).bracket.upper, 0.5);
    for (double bn : {0.0, 1.0, 5.0}) {
        const double c = fermion_block_constant(1.0, bn);
        EXPECT_LE(bound_fermion_lsi(1.0, bn, 1.0).value, bound_block_lsi(c, 1.0).value);
    }
    EXPECT_THROW(bound_fermion_lsi(0.0, 1.0, 1.0), DomainError);
}

TEST(Fermion, LsiBracketCloses) {
    const auto g = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    const auto report = bound_fermion_lsi(g);
    EXPECT_NEAR(report.value, ((1 + std::exp(-2.0)) / 2) / 16.0, 1e-15);
    const WeightedContext ctx(g.gibbs);
    LsiOptions opt;
    opt.restarts = 32;
    const auto est = estimate_lsi(ctx, g.generator, opt);
    EXPECT_LE(report.value, est.alpha_upper);
    EXPECT_LE(est.alpha_upper, g.min_mode_gap() + 1e-6);
}

TEST(Fermion, BlockPipelineGivesNormTwo) {
    const double beta = 1.0;
    const auto g = canonical_generator({2.0}, {1.0}, {1.0}, beta);
    const double c = fermion_block_constant(beta, g.max_frequency());
    const double lambda = g.min_mode_gap();
    const double t = std::log(2 * c) / lambda;
    EXPECT_NEAR(block_norm_bound(c, lambda, t), 2.0, 1e-12);
    const auto a = analyze(g.generator);
    const auto est = norm_2_to_q(WeightedContext(g.gibbs), evolve(a, t), 4.0);
    EXPECT_LE(est.lower, 2.0 + 1e-6);
}
