// operator_core.hpp — dense Hermitian operators, spectral calculus, tensor embedding and
// superoperators in the column-stacking vectorization convention

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "lsq/errors.hpp"

namespace lsq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kHermitianTol = 1e-12;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double rel_tol = kHermitianTol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, max_abs(m));
    return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline Matrix identity(int d) { return Matrix::Identity(d, d); }

inline Matrix pauli_x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix pauli_y() { Matrix m(2, 2); m << 0, -kI, kI, 0; return m; }
inline Matrix pauli_z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }

// |i><j| in dimension d.
inline Matrix ket_bra(int d, int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

class HermitianOperator {
public:
    HermitianOperator() = default;

    // Throws NonHermitianInput unless m = m^dagger within 1e-12 relative to max|m_ij|.
    // The stored matrix is the symmetrized (m + m^dagger)/2.
    explicit HermitianOperator(const Matrix& m) {
        if (m.rows() != m.cols())
            throw NonHermitianInput("HermitianOperator: matrix is not square");
        if (!is_hermitian(m))
            throw NonHermitianInput("HermitianOperator: matrix is not Hermitian within tolerance");
        m_ = 0.5 * (m + m.adjoint());
    }

    static HermitianOperator identity(int d) { return HermitianOperator(Matrix::Identity(d, d)); }
    static HermitianOperator zero(int d) { return HermitianOperator(Matrix::Zero(d, d)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace().real(); }

    HermitianOperator operator+(const HermitianOperator& o) const { return HermitianOperator(m_ + o.m_); }
    HermitianOperator operator-(const HermitianOperator& o) const { return HermitianOperator(m_ - o.m_); }
    HermitianOperator operator*(double s) const { return HermitianOperator(m_ * s); }

private:
    Matrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // unitary, columns

    int dim() const { return static_cast<int>(eigenvalues.size()); }

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
    }
};

inline SpectralDecomposition spectral_decompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw DomainError("spectral_decompose: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// V diag(phi(e)) V^dagger. Throws DomainError if phi is not finite at an eigenvalue.
inline HermitianOperator matrix_function(const SpectralDecomposition& s,
                                         const std::function<double(double)>& phi) {
    RealVector values(s.dim());
    for (int i = 0; i < s.dim(); ++i) {
        values(i) = phi(s.eigenvalues(i));
        if (!std::isfinite(values(i)))
            throw DomainError("matrix_function: function undefined at eigenvalue " +
                              std::to_string(s.eigenvalues(i)));
    }
    Matrix m = s.eigenvectors * values.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator(0.5 * (m + m.adjoint()));
}

// x^r on a positive definite spectrum.
inline HermitianOperator matrix_power(const SpectralDecomposition& s, double r) {
    return matrix_function(s, [r](double x) {
        return x > 0.0 ? std::pow(x, r) : std::numeric_limits<double>::quiet_NaN();
    });
}

inline HermitianOperator matrix_log(const SpectralDecomposition& s) {
    return matrix_function(s, [](double x) {
        return x > 0.0 ? std::log(x) : std::numeric_limits<double>::quiet_NaN();
    });
}

// Rational exponent used as the key of FullRankState's power cache.
struct Exponent {
    int num = 1;
    int den = 1;

    Exponent(int n, int d) : num(n), den(d) {
        if (den == 0) throw DomainError("Exponent: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const int g = std::gcd(std::abs(num), den);
        if (g > 1) { num /= g; den /= g; }
    }
    double value() const { return static_cast<double>(num) / den; }
    bool operator<(const Exponent& o) const { return std::pair(num, den) < std::pair(o.num, o.den); }
};

// Positive definite, unit-trace reference state with a precomputed set of fractional powers.
class FullRankState {
public:
    static constexpr double kTraceTol = 1e-12;

    explicit FullRankState(const HermitianOperator& rho) : rho_(rho), spectral_(spectral_decompose(rho)) {
        if (std::abs(rho.trace() - 1.0) > kTraceTol)
            throw DomainError("FullRankState: trace differs from one by " +
                              std::to_string(std::abs(rho.trace() - 1.0)));
        if (spectral_.eigenvalues(0) <= 0.0)
            throw DomainError("FullRankState: state is not full rank (min eigenvalue " +
                              std::to_string(spectral_.eigenvalues(0)) + ")");
        for (int den : {1, 2, 4, 8})
            for (int sign : {1, -1}) {
                Exponent e(sign, den);
                cache_.emplace(e, matrix_power(spectral_, e.value()).matrix());
            }
    }

    // Normalizes a positive definite matrix to unit trace first.
    static FullRankState from_unnormalized(const Matrix& m) {
        const Matrix h = 0.5 * (m + m.adjoint());
        return FullRankState(HermitianOperator(h / h.trace().real()));
    }

    static FullRankState maximally_mixed(int d) {
        return FullRankState(HermitianOperator(Matrix::Identity(d, d) / static_cast<double>(d)));
    }

    // exp(-beta H) / tr exp(-beta H), computed with a shifted spectrum to avoid overflow.
    static FullRankState gibbs(const HermitianOperator& h, double beta) {
        const auto s = spectral_decompose(h);
        const double e0 = s.eigenvalues.minCoeff();
        const auto w = matrix_function(s, [&](double x) { return std::exp(-beta * (x - e0)); });
        return from_unnormalized(w.matrix());
    }

    int dim() const { return rho_.dim(); }
    const HermitianOperator& op() const { return rho_; }
    const Matrix& matrix() const { return rho_.matrix(); }
    const SpectralDecomposition& spectral() const { return spectral_; }
    double min_eigenvalue() const { return spectral_.eigenvalues(0); }

    // Operator norm of sigma^{-1}.
    double inverse_norm() const { return 1.0 / min_eigenvalue(); }

    Matrix power(Exponent e) const {
        if (auto it = cache_.find(e); it != cache_.end()) return it->second;
        return matrix_power(spectral_, e.value()).matrix();
    }
    Matrix power(int num, int den) const { return power(Exponent(num, den)); }
    Matrix power(double r) const { return matrix_power(spectral_, r).matrix(); }

    bool is_cached(Exponent e) const { return cache_.count(e) != 0; }

private:
    HermitianOperator rho_;
    SpectralDecomposition spectral_;
    std::map<Exponent, Matrix> cache_;
};

// Column-stacking: vec(f)[i + d*j] = f(i, j).
inline Vector vectorize(const Matrix& f) { return Eigen::Map<const Vector>(f.data(), f.size()); }

inline Matrix unvectorize(const Vector& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d)
        throw DimensionMismatch("unvectorize: length is not d^2");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

// Linear map on d x d matrices stored as a d^2 x d^2 matrix acting on vec(f).
class Superoperator {
public:
    Superoperator() = default;

    Superoperator(int d, Matrix m) : d_(d), m_(std::move(m)) {
        if (m_.rows() != static_cast<Eigen::Index>(d) * d || m_.cols() != m_.rows())
            throw DimensionMismatch("Superoperator: matrix is not d^2 x d^2");
    }

    static Superoperator identity(int d) { return {d, Matrix::Identity(d * d, d * d)}; }
    static Superoperator zero(int d) { return {d, Matrix::Zero(d * d, d * d)}; }

    int dim() const { return d_; }
    const Matrix& matrix() const { return m_; }

    Matrix apply(const Matrix& f) const {
        if (f.rows() != d_ || f.cols() != d_) throw DimensionMismatch("Superoperator::apply: operator dimension");
        return unvectorize(m_ * vectorize(f), d_);
    }

    // Hilbert-Schmidt adjoint: tr[A^dagger T(B)] = tr[T*(A)^dagger B].
    Superoperator adjoint() const { return {d_, m_.adjoint()}; }

    // (this o other)(f) = this(other(f)).
    Superoperator operator*(const Superoperator& other) const {
        check_same(other);
        return {d_, m_ * other.m_};
    }
    Superoperator operator+(const Superoperator& other) const {
        check_same(other);
        return {d_, m_ + other.m_};
    }
    Superoperator operator-(const Superoperator& other) const {
        check_same(other);
        return {d_, m_ - other.m_};
    }
    Superoperator operator*(cplx s) const { return {d_, m_ * s}; }

private:
    void check_same(const Superoperator& o) const {
        if (o.d_ != d_) throw DimensionMismatch("Superoperator: dimension mismatch");
    }

    int d_ = 0;
    Matrix m_;
};

// f -> A f B, i.e. B^T (x) A.
inline Superoperator sandwich(const Matrix& a, const Matrix& b) {
    return {static_cast<int>(a.rows()), kron(b.transpose(), a)};
}

inline Superoperator left_multiply(const Matrix& a) { return sandwich(a, identity(static_cast<int>(a.rows()))); }
inline Superoperator right_multiply(const Matrix& b) { return sandwich(identity(static_cast<int>(b.rows())), b); }

// Random complex Gaussian matrix (entries with unit variance in real and imaginary parts).
inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline HermitianOperator random_hermitian(int d, std::mt19937_64& rng) {
    const Matrix a = random_matrix(d, d, rng);
    return HermitianOperator(0.5 * (a + a.adjoint()));
}

// Positive semidefinite A A^dagger with a random rank between 1 and d.
inline HermitianOperator random_psd(int d, std::mt19937_64& rng, int rank = 0) {
    if (rank <= 0) rank = d;
    const Matrix a = random_matrix(d, rank, rng);
    const Matrix p = a * a.adjoint();
    return HermitianOperator(0.5 * (p + p.adjoint()));
}

// Random full-rank state, eigenvalues bounded away from zero by mixing with I/d.
inline FullRankState random_state(int d, std::mt19937_64& rng, double mix = 0.1) {
    Matrix p = random_psd(d, rng).matrix();
    p /= p.trace().real();
    p = (1.0 - mix) * p + mix * Matrix::Identity(d, d) / static_cast<double>(d);
    return FullRankState::from_unnormalized(p);
}

// Samples a linear map on the matrix-unit basis. A linearity probe on random inputs guards
// against nonlinear callables; NonLinearAction is thrown if it fails at 1e-10.
inline Superoperator superop_from_action(const std::function<Matrix(const Matrix&)>& action, int d,
                                         std::uint64_t probe_seed = 0x5eed) {
    const int n = d * d;
    Matrix m(n, n);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const Matrix img = action(ket_bra(d, i, j));
            if (img.rows() != d || img.cols() != d)
                throw DimensionMismatch("superop_from_action: image has wrong dimension");
            m.col(i + d * j) = vectorize(img);
        }

    std::mt19937_64 rng(probe_seed);
    for (int probe = 0; probe < 3; ++probe) {
        const Matrix f = random_matrix(d, d, rng);
        const Matrix g = random_matrix(d, d, rng);
        const Matrix ab = random_matrix(1, 2, rng);
        const cplx a = ab(0, 0), b = ab(0, 1);
        const Matrix lhs = action(a * f + b * g);
        const Matrix rhs = a * action(f) + b * action(g);
        const double scale = 1.0 + std::max(max_abs(lhs), max_abs(rhs));
        if (max_abs(lhs - rhs) > 1e-10 * scale)
            throw NonLinearAction("superop_from_action: linearity probe failed");
    }
    return {d, m};
}

inline int int_pow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// I^{(x) site} (x) local (x) I^{(x)(n_sites - site - 1)}; every site has local.rows() levels.
inline Matrix embed(const Matrix& local, int site, int n_sites) {
    if (site < 0 || site >= n_sites)
        throw IndexError("embed: site " + std::to_string(site) + " outside [0, " + std::to_string(n_sites) + ")");
    const int d = static_cast<int>(local.rows());
    return kron(kron(identity(int_pow(d, site)), local), identity(int_pow(d, n_sites - site - 1)));
}

inline HermitianOperator embed(const HermitianOperator& local, int site, int n_sites) {
    return HermitianOperator(embed(local.matrix(), site, n_sites));
}

// Lifts a superoperator on one d-level site to act on site `site` of an n_sites register
// (site 0 is the most significant tensor factor, matching embed()).
inline Superoperator lift(const Superoperator& local, int site, int n_sites) {
    if (site < 0 || site >= n_sites) throw IndexError("lift: site out of range");
    const int d = local.dim();
    const int total = int_pow(d, n_sites);
    const int stride = int_pow(d, n_sites - site - 1);
    const Eigen::Index n = static_cast<Eigen::Index>(total) * total;
    Matrix m = Matrix::Zero(n, n);
    const Matrix& loc = local.matrix();
    for (int j = 0; j < total; ++j) {
        const int b = (j / stride) % d;
        for (int i = 0; i < total; ++i) {
            const int a = (i / stride) % d;
            const Eigen::Index row = i + static_cast<Eigen::Index>(total) * j;
            for (int bp = 0; bp < d; ++bp)
                for (int ap = 0; ap < d; ++ap) {
                    const cplx v = loc(a + d * b, ap + d * bp);
                    if (v == cplx(0.0)) continue;
                    const int ip = i + (ap - a) * stride;
                    const int jp = j + (bp - b) * stride;
                    m(row, ip + static_cast<Eigen::Index>(total) * jp) = v;
                }
        }
    }
    return {total, std::move(m)};
}

// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

inline double frobenius(const Matrix& m) { return m.norm(); }

} // namespace lsq
