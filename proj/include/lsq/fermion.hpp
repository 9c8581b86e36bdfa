// fermion.hpp — linear fermionic Davies generators: Jordan–Wigner Majoranas, canonical form,
// mode eigen-operator basis, Q-form and block-norm checks, log-Sobolev bound

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lsq/davies.hpp"
#include "lsq/lindblad.hpp"
#include "lsq/lsi_bounds.hpp"
#include "lsq/weighted_lp.hpp"

namespace lsq {

inline constexpr int kMajoranaCap = 6;
inline constexpr int kFermionSuperoperatorCap = 3;
inline constexpr int kFermionEnumerationCap = 2;

// w[2k] = Z^{(x)k} (x) X (x) I..., w[2k+1] = Z^{(x)k} (x) Y (x) I..., 0-indexed modes.
inline std::vector<Matrix> jordan_wigner(int n) {
    if (n < 1) throw DomainError("jordan_wigner: need at least one mode");
    if (n > kMajoranaCap) throw DimensionCap("jordan_wigner: " + std::to_string(n) + " modes exceeds cap " + std::to_string(kMajoranaCap));
    std::vector<Matrix> w;
    for (int k = 0; k < n; ++k)
        for (const Matrix& p : {pauli_x(), pauli_y()}) {
            Matrix m = Matrix::Ones(1, 1);
            for (int j = 0; j < n; ++j) m = kron(m, j < k ? pauli_z() : j == k ? p : identity(2));
            w.push_back(std::move(m));
        }
    return w;
}

// d_k = (w_{2k} + i w_{2k+1}) / 2.
inline Matrix annihilator(const std::vector<Matrix>& w, int k) { return 0.5 * (w[2 * k] + kI * w[2 * k + 1]); }

inline HermitianOperator free_fermion_hamiltonian(const std::vector<Matrix>& w, const std::vector<double>& nu) {
    const Eigen::Index dim = w.front().rows();
    Matrix h = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < nu.size(); ++k) {
        const Matrix d = annihilator(w, static_cast<int>(k));
        h += nu[k] * d.adjoint() * d;
    }
    return HermitianOperator(h);
}

struct FermionModel {
    std::vector<double> frequencies;  // nu_k >= 0
    Matrix couplings;                 // s(alpha, k)
    BathSpectralDensity bath;

    int modes() const { return static_cast<int>(frequencies.size()); }
};

struct CanonicalFermionGenerator {
    int modes = 0;
    std::vector<double> frequencies;
    std::vector<double> rates;        // lambda_k
    std::vector<double> rates_prime;  // lambda'_k for zero modes, equal to lambda_k otherwise
    double beta = 0.0;
    std::vector<Matrix> majoranas;
    Superoperator generator;
    FullRankState gibbs;
    bool primitive = true;

    bool is_zero_mode(int k) const { return frequencies[static_cast<std::size_t>(k)] == 0.0; }
    // Lambda_k = lambda_k (1 + e^{-beta nu_k}) / 2
    double mode_gap(int k) const {
        const auto i = static_cast<std::size_t>(k);
        return rates[i] * (1.0 + std::exp(-beta * frequencies[i])) / 2.0;
    }
    double min_mode_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (int k = 0; k < modes; ++k) g = std::min(g, mode_gap(k));
        return g;
    }
    double max_frequency() const { return *std::max_element(frequencies.begin(), frequencies.end()); }
};

// prod_k (2 cosh(beta nu_k / 2))^{-1} exp(-i beta nu_k w_{2k} w_{2k+1} / 2)
inline Matrix gibbs_product_form(const std::vector<Matrix>& w, const std::vector<double>& nu, double beta) {
    const Eigen::Index dim = w.front().rows();
    Matrix sigma = Matrix::Identity(dim, dim);
    for (std::size_t k = 0; k < nu.size(); ++k) {
        const double x = beta * nu[k] / 2.0;
        // (w w)^2 = -1, so exp(-i x w w) = cosh(x) - i sinh(x) w w
        const Matrix ww = w[2 * k] * w[2 * k + 1];
        const Matrix eta = (std::cosh(x) * Matrix::Identity(dim, dim) - kI * std::sinh(x) * ww) / (2.0 * std::cosh(x));
        sigma = sigma * eta;
    }
    return sigma;
}

// Canonical generator from mode frequencies and rates: for nu_k > 0, jumps sqrt(lambda) d_k and
// sqrt(lambda e^{-beta nu}) d_k^dagger; for nu_k = 0, sqrt(lambda/2) w_{2k+1} and
// sqrt(lambda'/2) w_{2k}.
inline CanonicalFermionGenerator canonical_generator(std::vector<double> nu, std::vector<double> lambda,
                                                     std::vector<double> lambda_prime, double beta) {
    const int n = static_cast<int>(nu.size());
    if (n < 1 || lambda.size() != nu.size() || lambda_prime.size() != nu.size())
        throw DimensionMismatch("canonical_generator: frequency and rate vectors must have equal nonzero length");
    if (n > kFermionSuperoperatorCap)
        throw DimensionCap("canonical_generator: " + std::to_string(n) + " modes exceeds cap " + std::to_string(kFermionSuperoperatorCap));
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("canonical_generator: beta must be finite and >= 0");
    for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (!(nu[i] >= 0.0) || !std::isfinite(nu[i])) throw DomainError("canonical_generator: frequencies must be >= 0");
        if (lambda[i] < 0.0 || lambda_prime[i] < 0.0) throw NegativeRate("canonical_generator: negative rate");
        if (nu[i] > 0.0) lambda_prime[i] = lambda[i];
        else if (lambda_prime[i] < lambda[i]) throw DomainError("canonical_generator: zero mode needs lambda' >= lambda");
    }
    const auto w = jordan_wigner(n);
    LindbladSpec spec{HermitianOperator::zero(static_cast<int>(w.front().rows())), {}};
    bool primitive = true;
    for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        primitive = primitive && lambda[i] > 0.0;
        if (nu[i] > 0.0) {
            const Matrix d = annihilator(w, k);
            spec.lindblad_ops.push_back(std::sqrt(lambda[i]) * d);
            spec.lindblad_ops.push_back(std::sqrt(lambda[i] * std::exp(-beta * nu[i])) * d.adjoint());
        } else {
            spec.lindblad_ops.push_back(std::sqrt(lambda[i] / 2.0) * w[2 * i + 1]);
            spec.lindblad_ops.push_back(std::sqrt(lambda_prime[i] / 2.0) * w[2 * i]);
        }
    }
    Superoperator l = build_lindblad(spec);
    auto gibbs = FullRankState::gibbs(free_fermion_hamiltonian(w, nu), beta);
    if ((gibbs_product_form(w, nu, beta) - gibbs.matrix()).norm() > 1e-10)
        throw GibbsNotStationary("canonical_generator: product form differs from exp(-beta H)/Z");
    if ((l.matrix().adjoint() * vectorize(gibbs.matrix())).norm() > 1e-10 * std::max(1.0, l.matrix().norm()))
        throw GibbsNotStationary("canonical_generator: Gibbs state not stationary");
    return {n, std::move(nu), std::move(lambda), std::move(lambda_prime), beta, w, std::move(l), std::move(gibbs), primitive};
}

namespace detail {

inline void validate_fermion_model(const FermionModel& m) {
    if (m.modes() < 1) throw DomainError("fermion model: need at least one mode");
    if (m.couplings.cols() != m.modes() || m.couplings.rows() < 1)
        throw DimensionMismatch("fermion model: couplings must have one column per mode");
    for (double nu : m.frequencies)
        if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("fermion model: frequencies must be finite and >= 0");
}

// Clamp tiny negative eigenvalues to zero, reject real ones.
inline double checked_rate(double mu, double scale) {
    if (mu < -1e-12 * std::max(1.0, scale)) throw NegativeRate("canonicalize: rate matrix has a negative eigenvalue");
    return std::max(0.0, mu);
}

} // namespace detail

inline double fermion_cluster_tolerance(const std::vector<double>& nu) {
    return 1e-9 * *std::max_element(nu.begin(), nu.end());
}

// Reduces a linearly coupled free-fermion Davies generator to canonical form: per positive
// frequency cluster the rate matrix chi_kl = sum_a G_a(nu) conj(s_ak) s_al is diagonalized; the
// zero-mode Majorana rate matrix is diagonalized orthogonally and its eigenvalues are paired in
// descending order as (lambda'/2, lambda/2).
inline CanonicalFermionGenerator canonicalize(const FermionModel& m) {
    detail::validate_fermion_model(m);
    const int n = m.modes();
    const auto n_alpha = m.couplings.rows();
    const double tol = fermion_cluster_tolerance(m.frequencies);
    std::vector<double> nu(m.frequencies), lambda(static_cast<std::size_t>(n), 0.0), lambda_p(static_cast<std::size_t>(n), 0.0);

    std::vector<int> positive, zero;
    for (int k = 0; k < n; ++k) (m.frequencies[static_cast<std::size_t>(k)] > tol ? positive : zero).push_back(k);
    for (int k : zero) nu[static_cast<std::size_t>(k)] = 0.0;

    for (Eigen::Index a = 0; a < n_alpha; ++a) {
        std::vector<double> probes;
        for (int k : positive) probes.push_back(m.frequencies[static_cast<std::size_t>(k)]);
        if (m.bath.kms_residual(static_cast<std::size_t>(a), probes) > 1e-10)
            throw DomainError("canonicalize: bath density violates the KMS condition for coupling " + std::to_string(a));
    }

    std::stable_sort(positive.begin(), positive.end(),
                     [&](int x, int y) { return m.frequencies[static_cast<std::size_t>(x)] < m.frequencies[static_cast<std::size_t>(y)]; });
    for (std::size_t start = 0; start < positive.size();) {
        std::size_t end = start + 1;
        while (end < positive.size() && m.frequencies[static_cast<std::size_t>(positive[end])] -
                                                m.frequencies[static_cast<std::size_t>(positive[end - 1])] <= tol)
            ++end;
        std::vector<int> cluster(positive.begin() + static_cast<std::ptrdiff_t>(start), positive.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(cluster.begin(), cluster.end());
        const double freq = m.frequencies[static_cast<std::size_t>(cluster.front())];
        const auto c = static_cast<Eigen::Index>(cluster.size());
        Matrix chi = Matrix::Zero(c, c);
        for (Eigen::Index a = 0; a < n_alpha; ++a) {
            const double g = m.bath(static_cast<std::size_t>(a), freq);
            for (Eigen::Index i = 0; i < c; ++i)
                for (Eigen::Index j = 0; j < c; ++j)
                    chi(i, j) += g * std::conj(m.couplings(a, cluster[static_cast<std::size_t>(i)])) * m.couplings(a, cluster[static_cast<std::size_t>(j)]);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(chi, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < c; ++i) {
            const double rate = detail::checked_rate(es.eigenvalues()(c - 1 - i), chi.norm());
            lambda[static_cast<std::size_t>(cluster[static_cast<std::size_t>(i)])] = rate;
        }
        start = end;
    }

    if (!zero.empty()) {
        const auto z = static_cast<Eigen::Index>(2 * zero.size());
        Eigen::MatrixXd chi = Eigen::MatrixXd::Zero(z, z);
        for (Eigen::Index a = 0; a < n_alpha; ++a) {
            const double g = m.bath(static_cast<std::size_t>(a), 0.0);
            Eigen::VectorXd coeff(z);
            for (std::size_t i = 0; i < zero.size(); ++i) {
                const cplx s = m.couplings(a, zero[i]);
                coeff(static_cast<Eigen::Index>(2 * i)) = s.real();
                coeff(static_cast<Eigen::Index>(2 * i + 1)) = -s.imag();
            }
            chi += g * coeff * coeff.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chi, Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < zero.size(); ++i) {
            const auto k = static_cast<std::size_t>(zero[i]);
            lambda_p[k] = 2.0 * detail::checked_rate(es.eigenvalues()(z - 1 - static_cast<Eigen::Index>(2 * i)), chi.norm());
            lambda[k] = 2.0 * detail::checked_rate(es.eigenvalues()(z - 2 - static_cast<Eigen::Index>(2 * i)), chi.norm());
        }
    }
    return canonical_generator(std::move(nu), std::move(lambda), std::move(lambda_p), m.bath.beta());
}

// The same model as a Davies model on Jordan–Wigner modes: H = sum nu_k d_k^dagger d_k,
// couplings S_a = sum_k s_ak d_k + conj(s_ak) d_k^dagger.
inline DaviesModel fermion_davies_model(const FermionModel& m) {
    detail::validate_fermion_model(m);
    if (m.modes() > kFermionSuperoperatorCap) throw DimensionCap("fermion_davies_model: too many modes");
    const auto w = jordan_wigner(m.modes());
    std::vector<HermitianOperator> couplings;
    for (Eigen::Index a = 0; a < m.couplings.rows(); ++a) {
        Matrix s = Matrix::Zero(w.front().rows(), w.front().rows());
        for (int k = 0; k < m.modes(); ++k) {
            const Matrix d = annihilator(w, k);
            s += m.couplings(a, k) * d + std::conj(m.couplings(a, k)) * d.adjoint();
        }
        couplings.emplace_back(s);
    }
    return {free_fermion_hamiltonian(w, m.frequencies), std::move(couplings), m.bath, std::nullopt};
}

// Frobenius distance between the d-operator and Majorana forms of each mode generator.
inline double majorana_decomposition_check(const CanonicalFermionGenerator& g) {
    const auto& w = g.majoranas;
    const int dim = static_cast<int>(w.front().rows());
    double worst = 0.0;
    for (int k = 0; k < g.modes; ++k) {
        if (g.is_zero_mode(k)) continue;
        const auto i = static_cast<std::size_t>(k);
        const double lam = g.rates[i], q = std::exp(-g.beta * g.frequencies[i]);
        const Matrix d = annihilator(w, k);
        const Superoperator d_form = build_lindblad({HermitianOperator::zero(dim), {std::sqrt(lam) * d, std::sqrt(lam * q) * d.adjoint()}});
        const Matrix& a = w[2 * i];
        const Matrix& b = w[2 * i + 1];
        const Superoperator id = Superoperator::identity(dim);
        const Superoperator w_form =
            (sandwich(a, a) + sandwich(b, b) - id * cplx(2.0)) * cplx(lam * (1.0 + q) / 4.0) +
            (sandwich(a, b) - sandwich(b, a) - left_multiply(a * b) - right_multiply(a * b)) * cplx(0.0, lam * (1.0 - q) / 4.0);
        worst = std::max(worst, (d_form.matrix() - w_form.matrix()).norm());
    }
    return worst;
}

// ---- mode operator basis ----------------------------------------------------------------

struct ModeOperatorBasis {
    int modes = 0;
    std::vector<std::vector<int>> strings;  // b_0 ... b_{2N-1}
    std::vector<Matrix> ops;

    static int weight(const std::vector<int>& b) { return std::accumulate(b.begin(), b.end(), 0); }
};

// f_k(b_{2k}, b_{2k+1}) on a single mode.
inline Matrix mode_operator(const CanonicalFermionGenerator& g, int k, int b1, int b2) {
    const auto i = static_cast<std::size_t>(k);
    const Matrix& w1 = g.majoranas[2 * i];
    const Matrix& w2 = g.majoranas[2 * i + 1];
    const Eigen::Index dim = w1.rows();
    const double x = g.beta * g.frequencies[i] / 2.0;
    if (b1 == 0 && b2 == 0) return Matrix::Identity(dim, dim);
    if (b1 == 1 && b2 == 1) {
        // (w1 w2)^2 = -1, so exp(i x w1 w2) = cosh(x) + i sinh(x) w1 w2
        const Matrix ww = w1 * w2;
        const Matrix e = std::cosh(x) * Matrix::Identity(dim, dim) + kI * std::sinh(x) * ww;
        return ww * e;
    }
    return std::sqrt(std::cosh(x)) * (b1 == 1 ? w1 : w2);
}

// f(b) = prod_k f_k for even |b| and prod_k w_{2k} w_{2k+1} f_k for odd |b|.
inline Matrix mode_string_operator(const CanonicalFermionGenerator& g, const std::vector<int>& b) {
    if (static_cast<int>(b.size()) != 2 * g.modes) throw DimensionMismatch("mode_string_operator: bit string length");
    const bool odd = ModeOperatorBasis::weight(b) % 2 == 1;
    const Eigen::Index dim = g.majoranas.front().rows();
    Matrix f = Matrix::Identity(dim, dim);
    for (int k = 0; k < g.modes; ++k) {
        const auto i = static_cast<std::size_t>(k);
        Matrix fk = mode_operator(g, k, b[2 * i], b[2 * i + 1]);
        if (odd) fk = g.majoranas[2 * i] * g.majoranas[2 * i + 1] * fk;
        f = f * fk;
    }
    return f;
}

inline ModeOperatorBasis mode_basis(const CanonicalFermionGenerator& g) {
    if (g.modes > kFermionSuperoperatorCap) throw DimensionCap("mode_basis: too many modes");
    ModeOperatorBasis basis{g.modes, {}, {}};
    const int bits = 2 * g.modes;
    for (int code = 0; code < (1 << bits); ++code) {
        std::vector<int> b(static_cast<std::size_t>(bits));
        for (int j = 0; j < bits; ++j) b[static_cast<std::size_t>(j)] = (code >> (bits - 1 - j)) & 1;
        basis.ops.push_back(mode_string_operator(g, b));
        basis.strings.push_back(std::move(b));
    }
    return basis;
}

// mu(b) = -(sum_{nu_k = 0} lambda'_k b_{2k} + lambda_k b_{2k+1}
//           + sum_{nu_k > 0} lambda_k (1 + e^{-beta nu_k}) / 2 (b_{2k} + b_{2k+1}))
inline double mode_eigenvalue(const CanonicalFermionGenerator& g, const std::vector<int>& b) {
    double mu = 0.0;
    for (int k = 0; k < g.modes; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (g.is_zero_mode(k)) mu -= g.rates_prime[i] * b[2 * i] + g.rates[i] * b[2 * i + 1];
        else mu -= g.mode_gap(k) * (b[2 * i] + b[2 * i + 1]);
    }
    return mu;
}

struct ModeEigenReport {
    std::vector<int> bits;
    double eigenvalue = 0.0;
    double residual = 0.0;
};

// Checks every f(b) is an eigen-operator with eigenvalue mu(b) <= -Lambda |b|.
inline std::vector<ModeEigenReport> verify_block_structure(const CanonicalFermionGenerator& g, const ModeOperatorBasis& basis) {
    const double lam = g.min_mode_gap();
    std::vector<ModeEigenReport> out;
    for (std::size_t i = 0; i < basis.ops.size(); ++i) {
        const double mu = mode_eigenvalue(g, basis.strings[i]);
        const Matrix& f = basis.ops[i];
        const double res = (g.generator.apply(f) - mu * f).norm();
        if (res > 1e-10 * std::max(1.0, f.norm()))
            throw EigenResidualExceeded("verify_block_structure: f(b) is not an eigen-operator, residual " + std::to_string(res));
        if (mu > -lam * ModeOperatorBasis::weight(basis.strings[i]) + 1e-10)
            throw BoundViolated("verify_block_structure: eigenvalue above -Lambda |b|");
        out.push_back({basis.strings[i], mu, res});
    }
    return out;
}

struct FermionQReport {
    int n = 0;
    double max_q = 0.0;
    double bound = 0.0;         // e^{n beta nu}
    double max_off_rule = 0.0;  // largest |Q| over tuples outside the XOR support rule
    long tuples = 0;
};

// Exhaustive Q-form over 4-tuples from the |b| = n block.
inline FermionQReport fermion_q_bound_check(const CanonicalFermionGenerator& g, const ModeOperatorBasis& basis, int n) {
    if (g.modes > kFermionEnumerationCap) throw DimensionCap("fermion_q_bound_check: exhaustive enumeration needs N <= 2");
    if (n < 0 || n > 2 * g.modes) throw DomainError("fermion_q_bound_check: block index out of range");
    const WeightedContext ctx(g.gibbs);
    std::vector<std::size_t> block;
    for (std::size_t i = 0; i < basis.ops.size(); ++i)
        if (ModeOperatorBasis::weight(basis.strings[i]) == n) block.push_back(i);
    FermionQReport r{n, 0.0, std::exp(n * g.beta * g.max_frequency()), 0.0, 0};
    for (auto i1 : block)
        for (auto i2 : block)
            for (auto i3 : block)
                for (auto i4 : block) {
                    const double q = q_form(ctx, basis.ops[i1], basis.ops[i2], basis.ops[i3], basis.ops[i4]).magnitude;
                    bool allowed = true;
                    for (int k = 0; k < g.modes; ++k) {
                        const auto a = static_cast<std::size_t>(2 * k);
                        const int x1 = basis.strings[i1][a] ^ basis.strings[i2][a] ^ basis.strings[i3][a] ^ basis.strings[i4][a];
                        const int x2 = basis.strings[i1][a + 1] ^ basis.strings[i2][a + 1] ^ basis.strings[i3][a + 1] ^ basis.strings[i4][a + 1];
                        allowed = allowed && x1 == x2;
                    }
                    r.max_q = std::max(r.max_q, q);
                    if (!allowed) r.max_off_rule = std::max(r.max_off_rule, q);
                    ++r.tuples;
                }
    if (r.max_q > r.bound * (1.0 + 1e-10)) throw BoundViolated("fermion_q_bound_check: |Q| exceeds e^{n beta nu}");
    if (r.max_off_rule > 1e-12) throw BoundViolated("fermion_q_bound_check: Q nonzero outside the XOR support rule");
    return r;
}

// Maximum of ||f||_4^4 / ||f||_2^4 over random complex combinations in the |b| = n block.
inline double fermion_block_norm_check(const CanonicalFermionGenerator& g, const ModeOperatorBasis& basis, int n,
                                       int samples, unsigned long long seed = 4242) {
    if (g.modes > kFermionEnumerationCap) throw DimensionCap("fermion_block_norm_check: needs N <= 2");
    const WeightedContext ctx(g.gibbs);
    std::vector<std::size_t> block;
    for (std::size_t i = 0; i < basis.ops.size(); ++i)
        if (ModeOperatorBasis::weight(basis.strings[i]) == n) block.push_back(i);
    if (block.empty()) throw DomainError("fermion_block_norm_check: empty block");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    const Eigen::Index dim = basis.ops.front().rows();
    for (int s = 0; s < samples; ++s) {
        Matrix f = Matrix::Zero(dim, dim);
        for (auto i : block) f += cplx(gauss(rng), gauss(rng)) * basis.ops[i];
        worst = std::max(worst, std::pow(lp_norm(ctx, f, 4.0) / lp_norm(ctx, f, 2.0), 4));
    }
    const double bound = std::pow(2.0, 8 * n) * std::exp(n * g.beta * g.max_frequency());
    if (worst > bound * (1.0 + 1e-10)) throw BoundViolated("fermion_block_norm_check: 4-norm ratio exceeds 2^{8n} e^{n beta nu}");
    return worst;
}

// C = 4 e^{beta nu / 4}, the per-excitation 2->4 norm growth in the mode blocks.
inline double fermion_block_constant(double beta, double nu) { return 4.0 * std::exp(beta * nu / 4.0); }

// Lambda / (beta nu + 14) <= alpha <= Lambda.
inline BoundReport bound_fermion_lsi(double lambda, double nu, double beta) {
    if (!(lambda > 0.0) || !(nu >= 0.0) || !(beta >= 0.0)) throw DomainError("bound_fermion_lsi: need Lambda > 0, nu >= 0, beta >= 0");
    return make_report(BoundName::fermion_lsi, {{"Lambda", lambda}, {"nu", nu}, {"beta", beta}}, lambda / (beta * nu + 14.0), lambda);
}

inline BoundReport bound_fermion_lsi(const CanonicalFermionGenerator& g) {
    if (!g.primitive) throw NotPrimitive("bound_fermion_lsi: a mode has zero rate and does not equilibrate");
    return bound_fermion_lsi(g.min_mode_gap(), g.max_frequency(), g.beta);
}

} // namespace lsq
