// weighted_lp.hpp — sigma-weighted L_p norms, inner product, Dirichlet form, L_2 entropy,
// quartic forms and multistart estimates of 2->q superoperator norms

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lsq/operator_core.hpp"
#include "lsq/parallel.hpp"

namespace lsq {

class WeightedContext {
public:
    explicit WeightedContext(FullRankState sigma) : sigma_(std::move(sigma)) {}

    const FullRankState& sigma() const { return sigma_; }
    int dim() const { return sigma_.dim(); }

private:
    FullRankState sigma_;
};

namespace detail {

inline void check_dim(const WeightedContext& ctx, const Matrix& f, const char* who) {
    if (f.rows() != ctx.dim() || f.cols() != ctx.dim())
        throw DimensionMismatch(std::string(who) + ": operator dimension does not match sigma");
}

// Schatten p-norm of a square matrix; Hermitian inputs use the eigenvalue route.
inline double schatten(const Matrix& a, double p) {
    RealVector s;
    if (is_hermitian(a, 1e-13)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
        s = es.eigenvalues().cwiseAbs();
    } else {
        Eigen::JacobiSVD<Matrix> svd(a);
        s = svd.singularValues();
    }
    const double smax = s.size() ? s.maxCoeff() : 0.0;
    if (smax == 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
    return smax * std::pow(acc, 1.0 / p);
}

inline void check_exponent(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw InvalidExponent("L_p norm: exponent must be a finite real >= 1, got " + std::to_string(p));
}

} // namespace detail

// tr[|sigma^{1/(2p)} f sigma^{1/(2p)}|^p]^{1/p}. Accepts non-Hermitian f through singular values.
inline double lp_norm(const WeightedContext& ctx, const Matrix& f, double p) {
    detail::check_exponent(p);
    detail::check_dim(ctx, f, "lp_norm");
    const Matrix s = ctx.sigma().power(1.0 / (2.0 * p));
    return detail::schatten(s * f * s, p);
}

inline double lp_norm(const WeightedContext& ctx, const HermitianOperator& f, double p) {
    return lp_norm(ctx, f.matrix(), p);
}

// tr[sigma^{1/2} f^dagger sigma^{1/2} g].
inline cplx weighted_inner_complex(const WeightedContext& ctx, const Matrix& f, const Matrix& g) {
    detail::check_dim(ctx, f, "weighted_inner");
    detail::check_dim(ctx, g, "weighted_inner");
    const Matrix& s = ctx.sigma().power(1, 2);
    return (s * f.adjoint() * s * g).trace();
}

inline double weighted_inner(const WeightedContext& ctx, const HermitianOperator& f, const HermitianOperator& g) {
    return weighted_inner_complex(ctx, f.matrix(), g.matrix()).real();
}

// -<f, L(f)>_sigma for a Heisenberg-picture generator. Real part for non-Hermitian f.
inline double dirichlet_form(const WeightedContext& ctx, const Superoperator& l, const Matrix& f) {
    if (l.dim() != ctx.dim()) throw DimensionMismatch("dirichlet_form: generator dimension");
    const Matrix one = identity(ctx.dim());
    if (max_abs(l.apply(one)) > 1e-10 * std::max(1.0, max_abs(l.matrix())))
        throw NotUnital("dirichlet_form: generator does not annihilate the identity");
    return -weighted_inner_complex(ctx, f, l.apply(f)).real();
}

inline double dirichlet_form(const WeightedContext& ctx, const Superoperator& l, const HermitianOperator& f) {
    return dirichlet_form(ctx, l, f.matrix());
}

// L_2 relative entropy
//   tr[A^2 log A] - 1/2 tr[A^2 log sigma] - 1/2 ||f||_2^2 log ||f||_2^2,   A = sigma^{1/4} f sigma^{1/4},
// with x log x -> 0 below 1e-14.
inline double ent_functional(const WeightedContext& ctx, const HermitianOperator& f) {
    detail::check_dim(ctx, f.matrix(), "ent_functional");
    const auto fs = spectral_decompose(f);
    const double scale = std::max(1.0, fs.eigenvalues.cwiseAbs().maxCoeff());
    if (fs.eigenvalues(0) < -1e-12 * scale)
        throw NegativeInput("ent_functional: argument has eigenvalue " + std::to_string(fs.eigenvalues(0)));

    const Matrix& q = ctx.sigma().power(1, 4);
    const Matrix a = q * f.matrix() * q;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
    double t1 = 0.0;
    double norm2 = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double x = es.eigenvalues()(i);
        if (x > 1e-14) t1 += x * x * std::log(x);
        norm2 += x * x;
    }
    const Matrix log_sigma = matrix_log(ctx.sigma().spectral()).matrix();
    const double t2 = -0.5 * (a * a * log_sigma).trace().real();
    const double t3 = norm2 > 0.0 ? -0.5 * norm2 * std::log(norm2) : 0.0;
    return t1 + t2 + t3;
}

struct QFormResult {
    cplx value;
    double magnitude = 0.0;
};

// tr[s v1^dagger s v2 s v3^dagger s v4] with s = sigma^{1/4}.
inline QFormResult q_form(const WeightedContext& ctx, const Matrix& v1, const Matrix& v2, const Matrix& v3,
                          const Matrix& v4) {
    for (const Matrix* v : {&v1, &v2, &v3, &v4}) detail::check_dim(ctx, *v, "q_form");
    const Matrix& s = ctx.sigma().power(1, 4);
    const cplx value = (s * v1.adjoint() * s * v2 * s * v3.adjoint() * s * v4).trace();
    return {value, std::abs(value)};
}

inline QFormResult q_form(const WeightedContext& ctx, const HermitianOperator& v1, const HermitianOperator& v2,
                          const HermitianOperator& v3, const HermitianOperator& v4) {
    return q_form(ctx, v1.matrix(), v2.matrix(), v3.matrix(), v4.matrix());
}

// Orthonormal (Hilbert-Schmidt) real basis of the d x d Hermitian matrices.
inline std::vector<Matrix> hermitian_basis(int d) {
    std::vector<Matrix> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i) basis.push_back(ket_bra(d, i, i));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            basis.push_back(r * (ket_bra(d, i, j) + ket_bra(d, j, i)));
            basis.push_back(r * (kI * ket_bra(d, j, i) - kI * ket_bra(d, i, j)));
        }
    return basis;
}

inline Matrix combine(const std::vector<Matrix>& basis, const RealVector& x) {
    Matrix f = Matrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t k = 0; k < basis.size(); ++k) f += x(static_cast<Eigen::Index>(k)) * basis[k];
    return f;
}

inline RealVector coordinates(const std::vector<Matrix>& basis, const Matrix& f) {
    RealVector x(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        x(static_cast<Eigen::Index>(k)) = (basis[k].adjoint() * f).trace().real();
    return x;
}

struct NormEstimate {
    double lower = 0.0;             // best ratio found; a certified lower bound
    std::optional<double> upper;    // analytic upper bound when one is known
    Matrix best_f;                  // maximizer with unit 2-norm
    bool converged = false;         // false: ascent stalled before the 1e-8 objective tolerance
};

struct AscentOptions {
    int restarts = 64;
    std::uint64_t seed = 20240601;
    int max_iterations = 400;
    double fd_step = 1e-6;
    double tolerance = 1e-8;
};

// Multistart projected gradient ascent of ||T f||_{q,sigma} / ||f||_{2,sigma} over Hermitian f
// on the unit 2-norm sphere, with central finite-difference gradients.
inline NormEstimate norm_2_to_q(const WeightedContext& ctx, const Superoperator& t, double q,
                                const AscentOptions& opt = {}) {
    if (!(q > 2.0)) throw InvalidExponent("norm_2_to_q: q must exceed 2");
    if (opt.restarts < 1) throw DomainError("norm_2_to_q: restarts must be >= 1");
    if (t.dim() != ctx.dim()) throw DimensionMismatch("norm_2_to_q: map dimension");
    const int d = ctx.dim();
    const auto basis = hermitian_basis(d);
    const Matrix sq = ctx.sigma().power(1.0 / (2.0 * q));
    const Matrix s2 = ctx.sigma().power(1, 4);

    auto two_norm = [&](const Matrix& f) { return detail::schatten(s2 * f * s2, 2.0); };
    auto ratio = [&](const RealVector& x) {
        const Matrix f = combine(basis, x);
        const double n2 = two_norm(f);
        if (n2 == 0.0) return 0.0;
        return detail::schatten(sq * t.apply(f) * sq, q) / n2;
    };
    auto normalize = [&](RealVector x) {
        const double n2 = two_norm(combine(basis, x));
        return RealVector(x / n2);
    };

    struct Run {
        double value = 0.0;
        RealVector x;
        bool converged = false;
    };

    auto ascend = [&](RealVector x) {
        x = normalize(x);
        double value = ratio(x);
        double eta = 1.0;
        const Eigen::Index n = x.size();
        for (int it = 0; it < opt.max_iterations; ++it) {
            RealVector grad(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                RealVector xp = x, xm = x;
                xp(k) += opt.fd_step;
                xm(k) -= opt.fd_step;
                grad(k) = (ratio(xp) - ratio(xm)) / (2.0 * opt.fd_step);
            }
            if (grad.norm() < 1e-12) return Run{value, x, true};
            bool accepted = false;
            while (eta > 1e-14) {
                const RealVector trial = normalize(x + eta * grad / grad.norm());
                const double v = ratio(trial);
                if (v > value) {
                    const double gain = v - value;
                    x = trial;
                    value = v;
                    accepted = true;
                    eta = std::min(2.0 * eta, 1.0);
                    if (gain < opt.tolerance * 1e-2) return Run{value, x, true};
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) return Run{value, x, true};
        }
        return Run{value, x, false};
    };

    // Probes: identity and the eigenprojectors of sigma.
    std::vector<RealVector> starts;
    starts.push_back(coordinates(basis, identity(d)));
    const auto& sp = ctx.sigma().spectral();
    for (int k = 0; k < d; ++k) {
        const Vector v = sp.eigenvectors.col(k);
        starts.push_back(coordinates(basis, v * v.adjoint()));
    }
    for (int r = 0; r < opt.restarts; ++r) {
        std::mt19937_64 rng(opt.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
        std::normal_distribution<double> nd;
        RealVector x(static_cast<Eigen::Index>(basis.size()));
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = nd(rng);
        starts.push_back(x);
    }

    const auto runs = parallel_map<Run>(static_cast<int>(starts.size()), [&](int i) {
        if (i == 0) {
            // the identity is a stationary point; record it without ascending
            const RealVector x = normalize(starts[0]);
            return Run{ratio(x), x, true};
        }
        return ascend(starts[static_cast<std::size_t>(i)]);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].value > runs[best].value) best = i;

    NormEstimate out;
    out.lower = runs[best].value;
    out.best_f = combine(basis, runs[best].x);
    out.converged = runs[best].converged;
    if (std::abs(q - 4.0) < 1e-15) out.upper = std::pow(ctx.sigma().inverse_norm(), 0.25);
    return out;
}

} // namespace lsq
