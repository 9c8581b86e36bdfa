// lindblad.hpp — Lindblad generators in the Heisenberg picture, detailed balance, spectral gap,
// semigroup exponentials, trace-distance decay and the two generic mixing bounds

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "lsq/operator_core.hpp"
#include "lsq/weighted_lp.hpp"

namespace lsq {

struct LindbladSpec {
    HermitianOperator hamiltonian;
    std::vector<Matrix> lindblad_ops;
};

// L(f) = i[H, f] + sum_k (L_k^dagger f L_k - 1/2 {L_k^dagger L_k, f}).
inline Superoperator build_lindblad(const LindbladSpec& spec) {
    const int d = spec.hamiltonian.dim();
    if (d == 0) throw DimensionMismatch("build_lindblad: empty Hamiltonian");
    const Matrix id = identity(d);
    const Matrix& h = spec.hamiltonian.matrix();
    Matrix m = kI * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& l : spec.lindblad_ops) {
        if (l.rows() != d || l.cols() != d)
            throw DimensionMismatch("build_lindblad: Lindblad operator dimension differs from H");
        const Matrix ll = l.adjoint() * l;
        m += kron(l.transpose(), l.adjoint()) - 0.5 * kron(id, ll) - 0.5 * kron(ll.transpose(), id);
    }
    return {d, std::move(m)};
}

inline void require_unital(const Superoperator& l, const char* who) {
    const Matrix img = l.apply(identity(l.dim()));
    if (max_abs(img) > 1e-10 * std::max(1.0, max_abs(l.matrix())))
        throw NotUnital(std::string(who) + ": generator does not annihilate the identity");
}

// f -> sigma^{1/4} f sigma^{1/4}; its square realizes the weighted inner product.
inline Superoperator quarter_weight(const FullRankState& sigma) {
    const Matrix q = sigma.power(1, 4);
    return sandwich(q, q);
}

inline Superoperator inverse_quarter_weight(const FullRankState& sigma) {
    const Matrix q = sigma.power(-1, 4);
    return sandwich(q, q);
}

// Gamma M Gamma^{-1}; Hermitian exactly when M is self-adjoint in the sigma inner product.
inline Matrix symmetrized_generator(const Superoperator& l, const FullRankState& sigma) {
    return quarter_weight(sigma).matrix() * l.matrix() * inverse_quarter_weight(sigma).matrix();
}

struct DetailedBalanceReport {
    double asymmetry = 0.0;        // ||S - S^dagger||_F of the symmetrized generator
    double sampled_max = 0.0;      // max |<f, L g> - <L f, g>| over sampled Hermitian pairs
};

inline DetailedBalanceReport detailed_balance_report(const Superoperator& l, const FullRankState& sigma,
                                                     int samples = 16, std::uint64_t seed = 7) {
    if (l.dim() != sigma.dim()) throw DimensionMismatch("check_detailed_balance: dimension");
    DetailedBalanceReport r;
    const Matrix s = symmetrized_generator(l, sigma);
    r.asymmetry = (s - s.adjoint()).norm();
    const WeightedContext ctx(sigma);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < samples; ++k) {
        const Matrix f = random_hermitian(l.dim(), rng).matrix();
        const Matrix g = random_hermitian(l.dim(), rng).matrix();
        const cplx a = weighted_inner_complex(ctx, f, l.apply(g));
        const cplx b = weighted_inner_complex(ctx, l.apply(f), g);
        r.sampled_max = std::max(r.sampled_max, std::abs(a - b));
    }
    return r;
}

// Exact asymmetry of the generator in the sigma inner product (zero iff reversible).
inline double check_detailed_balance(const Superoperator& l, const FullRankState& sigma, int samples = 16) {
    require_unital(l, "check_detailed_balance");
    return detailed_balance_report(l, sigma, samples).asymmetry;
}

inline constexpr double kReversibleTol = 1e-9;

struct SemigroupAnalysis {
    Superoperator generator;                 // Heisenberg picture
    FullRankState fixed_point;
    double gap = 0.0;
    bool reversible = false;
    double asymmetry = 0.0;
    Eigen::VectorXcd spectrum;               // sorted by real part, descending
    // reversible path: generator = Gamma^{-1} V diag(eig) V^dagger Gamma
    RealVector sym_eigenvalues;
    Matrix sym_eigenvectors;
    Matrix gamma, gamma_inv;
};

// Fixed point, reversibility and spectral gap. Throws NotPrimitive when the stationary state
// is not unique or not full rank.
inline SemigroupAnalysis analyze(const Superoperator& l) {
    require_unital(l, "analyze");
    const int d = l.dim();
    const Matrix schr = l.matrix().adjoint();
    Eigen::JacobiSVD<Matrix> svd(schr, Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();  // descending
    const Eigen::Index n = sv.size();
    const double kernel_tol = 1e-10 * std::max(1.0, sv(0));
    int kernel_dim = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sv(i) <= kernel_tol) ++kernel_dim;
    if (kernel_dim > 1)
        throw NotPrimitive("analyze: stationary space has dimension " + std::to_string(kernel_dim));

    Matrix rho = unvectorize(svd.matrixV().col(n - 1), d);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-12) throw NotPrimitive("analyze: stationary operator is traceless");
    rho /= tr;
    rho = (0.5 * (rho + rho.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 1e-12)
        throw NotPrimitive("analyze: stationary state is rank deficient (min eigenvalue " +
                           std::to_string(es.eigenvalues()(0)) + ")");
    FullRankState sigma{HermitianOperator(rho)};
    const double stat_residual = (schr * vectorize(sigma.matrix())).norm();
    if (stat_residual > 1e-9 * std::max(1.0, sv(0)))
        throw EigenResidualExceeded("analyze: stationarity residual " + std::to_string(stat_residual));

    SemigroupAnalysis a{l, sigma, 0.0, false, 0.0, {}, {}, {}, {}, {}};
    a.gamma = quarter_weight(sigma).matrix();
    a.gamma_inv = inverse_quarter_weight(sigma).matrix();
    const Matrix s = a.gamma * l.matrix() * a.gamma_inv;
    a.asymmetry = (s - s.adjoint()).norm();
    a.reversible = a.asymmetry <= kReversibleTol * std::max(1.0, s.norm());

    std::vector<cplx> eig;
    if (a.reversible) {
        Eigen::SelfAdjointEigenSolver<Matrix> ses(0.5 * (s + s.adjoint()));
        a.sym_eigenvalues = ses.eigenvalues();
        a.sym_eigenvectors = ses.eigenvectors();
        for (Eigen::Index i = 0; i < n; ++i) eig.emplace_back(a.sym_eigenvalues(i), 0.0);
    } else {
        Eigen::ComplexEigenSolver<Matrix> ces(l.matrix(), false);
        for (Eigen::Index i = 0; i < n; ++i) eig.push_back(ces.eigenvalues()(i));
    }
    std::sort(eig.begin(), eig.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
    a.spectrum = Eigen::Map<Eigen::VectorXcd>(eig.data(), static_cast<Eigen::Index>(eig.size()));

    // drop the eigenvalue closest to zero (the stationary one) and take the slowest remaining
    std::size_t zero = 0;
    for (std::size_t i = 1; i < eig.size(); ++i)
        if (std::abs(eig[i]) < std::abs(eig[zero])) zero = i;
    double slowest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eig.size(); ++i)
        if (i != zero) slowest = std::max(slowest, eig[i].real());
    a.gap = eig.size() > 1 ? std::max(0.0, -slowest) : 0.0;
    return a;
}

// exp(t L), via the symmetrized eigendecomposition when reversible.
inline Superoperator evolve(const SemigroupAnalysis& a, double t) {
    if (t < 0.0) throw DomainError("evolve: negative time");
    const int d = a.generator.dim();
    if (!a.reversible) return {d, (t * a.generator.matrix()).exp()};
    const Eigen::VectorXcd e = (t * a.sym_eigenvalues).array().exp().cast<cplx>();
    return {d, a.gamma_inv * a.sym_eigenvectors * e.asDiagonal() * a.sym_eigenvectors.adjoint() * a.gamma};
}

// exp(t L) by scaling and squaring with a degree-13 Pade approximant.
inline Superoperator evolve(const Superoperator& l, double t) {
    if (t < 0.0) throw DomainError("evolve: negative time");
    return {l.dim(), (t * l.matrix()).exp()};
}

// ||T*_t(rho0) - sigma||_1 at each time.
inline std::vector<double> decay_curve(const SemigroupAnalysis& a, const Matrix& rho0, const std::vector<double>& times) {
    const int d = a.generator.dim();
    if (rho0.rows() != d || rho0.cols() != d) throw DimensionMismatch("decay_curve: state dimension");
    if (!is_hermitian(rho0, 1e-10)) throw DomainError("decay_curve: initial state is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho0 + rho0.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-12 || std::abs(rho0.trace().real() - 1.0) > 1e-10)
        throw DomainError("decay_curve: initial operator is not a density matrix");
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const Matrix rho_t = evolve(a, t).adjoint().apply(rho0);
        out.push_back(trace_norm(rho_t - a.fixed_point.matrix()));
    }
    return out;
}

inline std::vector<double> decay_curve(const Superoperator& l, const Matrix& rho0, const std::vector<double>& times) {
    return decay_curve(analyze(l), rho0, times);
}

// sqrt(||sigma^{-1}||) e^{-t lambda}
inline double mixing_bound_gap(const FullRankState& sigma, double lambda, double t) {
    if (!(lambda > 0.0) || t < 0.0) throw DomainError("mixing_bound_gap: need lambda > 0 and t >= 0");
    return std::sqrt(sigma.inverse_norm()) * std::exp(-t * lambda);
}

// sqrt(2 log ||sigma^{-1}||) e^{-t alpha}
inline double mixing_bound_lsi(const FullRankState& sigma, double alpha, double t) {
    if (!(alpha > 0.0) || t < 0.0) throw DomainError("mixing_bound_lsi: need alpha > 0 and t >= 0");
    return std::sqrt(2.0 * std::log(sigma.inverse_norm())) * std::exp(-t * alpha);
}

} // namespace lsq
