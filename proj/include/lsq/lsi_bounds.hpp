// lsi_bounds.hpp — log-Sobolev constant brackets: variational upper estimates, closed-form lower
// bounds, and numerical hypercontractivity checks

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "lsq/lindblad.hpp"
#include "lsq/parallel.hpp"
#include "lsq/weighted_lp.hpp"

namespace lsq {

enum class BoundName {
    interpolation,
    interpolation_q4,
    general_lower,
    block_norm_M4,
    block_lsi,
    product_lsi,
    graph_lsi,
    fermion_lsi,
};

inline std::string to_string(BoundName n) {
    switch (n) {
    case BoundName::interpolation: return "interpolation";
    case BoundName::interpolation_q4: return "interpolation_q4";
    case BoundName::general_lower: return "general_lower";
    case BoundName::block_norm_M4: return "block_norm_M4";
    case BoundName::block_lsi: return "block_lsi";
    case BoundName::product_lsi: return "product_lsi";
    case BoundName::graph_lsi: return "graph_lsi";
    case BoundName::fermion_lsi: return "fermion_lsi";
    }
    return "unknown";
}

struct Bracket {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

struct BoundReport {
    BoundName name{};
    std::map<std::string, double> inputs;
    double value = 0.0;
    Bracket bracket;
};

inline BoundReport make_report(BoundName name, std::map<std::string, double> inputs, double value,
                               double upper = std::numeric_limits<double>::infinity()) {
    if (!std::isfinite(value) || value < 0.0)
        throw DomainError(to_string(name) + ": bound is not a finite nonnegative number");
    if (upper < value) upper = value;  // the bracket never inverts; a lower bound above the gap is reported as is
    return {name, std::move(inputs), value, {value, upper}};
}

// alpha >= (1 - 2/q) lambda / (2 (lambda t_q + log M_q + (q - 2)/q)), given ||T_{t_q}||_{2->q} <= M_q.
inline BoundReport bound_interpolation(double lambda, double q, double t_q, double m_q) {
    if (!(q > 2.0)) throw InvalidExponent("bound_interpolation: q must exceed 2");
    if (!(lambda > 0.0) || !(m_q >= 1.0) || !(t_q >= 0.0))
        throw DomainError("bound_interpolation: need lambda > 0, M_q >= 1, t_q >= 0");
    const double value = (1.0 - 2.0 / q) * lambda / (2.0 * (lambda * t_q + std::log(m_q) + (q - 2.0) / q));
    return make_report(BoundName::interpolation, {{"lambda", lambda}, {"q", q}, {"t_q", t_q}, {"M_q", m_q}}, value,
                       lambda);
}

// The q = 4 specialization written out: lambda / (2 (2 lambda t_4 + 2 log M_4 + 1)).
inline BoundReport bound_interpolation_q4(double lambda, double t_4, double m_4) {
    if (!(lambda > 0.0) || !(m_4 >= 1.0) || !(t_4 >= 0.0))
        throw DomainError("bound_interpolation_q4: need lambda > 0, M_4 >= 1, t_4 >= 0");
    const double value = lambda / (2.0 * (2.0 * lambda * t_4 + 2.0 * std::log(m_4) + 1.0));
    return make_report(BoundName::interpolation_q4, {{"lambda", lambda}, {"t_4", t_4}, {"M_4", m_4}}, value, lambda);
}

// lambda / (log ||sigma^{-1}|| + 2) <= alpha <= lambda.
inline BoundReport bound_general(double lambda, double inverse_norm) {
    if (!(lambda > 0.0) || !(inverse_norm >= 1.0)) throw DomainError("bound_general: need lambda > 0, ||sigma^-1|| >= 1");
    return make_report(BoundName::general_lower, {{"lambda", lambda}, {"sigma_inv_norm", inverse_norm}},
                       lambda / (std::log(inverse_norm) + 2.0), lambda);
}

inline BoundReport bound_general(double lambda, const FullRankState& sigma) {
    return bound_general(lambda, sigma.inverse_norm());
}

// M_4 = 1 / (1 - C e^{-lambda t}), valid for t > log(C) / lambda.
inline double block_norm_bound(double c, double lambda, double t) {
    if (!(lambda > 0.0) || !(c > 0.0)) throw DomainError("block_norm_bound: need C > 0 and lambda > 0");
    if (!(t > std::log(c) / lambda)) throw SeriesDiverges("block_norm_bound: need t > log(C)/lambda");
    return 1.0 / (1.0 - c * std::exp(-lambda * t));
}

inline BoundReport block_norm_report(double c, double lambda, double t) {
    return make_report(BoundName::block_norm_M4, {{"C", c}, {"lambda", lambda}, {"t", t}}, block_norm_bound(c, lambda, t));
}

// alpha >= lambda / log(C^4 2^8 e^2), from t_4 = log(2C)/lambda where M_4 = 2.
inline BoundReport bound_block_lsi(double c, double lambda) {
    if (!(c >= 1.0) || !(lambda > 0.0)) throw DomainError("bound_block_lsi: need C >= 1 and lambda > 0");
    const double value = lambda / (4.0 * std::log(c) + 8.0 * std::log(2.0) + 2.0);
    return make_report(BoundName::block_lsi, {{"C", c}, {"lambda", lambda}}, value, lambda);
}

// sigma^{-1/4} |sigma^{1/4} (f - tr[sigma f]) sigma^{1/4}| sigma^{-1/4}: the weighted modulus of
// the centred observable.
inline Matrix weighted_centered_modulus(const WeightedContext& ctx, const Matrix& f) {
    const int d = ctx.dim();
    const Matrix centred = f - (ctx.sigma().matrix() * f).trace() * identity(d);
    const Matrix q = ctx.sigma().power(1, 4), qi = ctx.sigma().power(-1, 4);
    const Matrix a = q * centred * q;
    const auto mod = matrix_function(spectral_decompose(HermitianOperator(0.5 * (a + a.adjoint()))),
                                     [](double x) { return std::abs(x); });
    return qi * mod.matrix() * qi;
}

namespace detail {

struct GslVectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

struct NelderMeadResult {
    RealVector x;
    double value = 0.0;
    bool converged = false;
};

// GSL nmsimplex2 with simplex-size stopping at `tol`.
inline NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& fn, const RealVector& x0,
                                    double step, double tol, int max_iter) {
    const std::size_t n = static_cast<std::size_t>(x0.size());
    struct Ctx {
        const std::function<double(const RealVector&)>* fn;
        std::size_t n;
    } c{&fn, n};
    gsl_multimin_function f;
    f.n = n;
    f.params = &c;
    f.f = [](const gsl_vector* v, void* p) {
        auto* ctx = static_cast<Ctx*>(p);
        RealVector x(static_cast<Eigen::Index>(ctx->n));
        for (std::size_t i = 0; i < ctx->n; ++i) x(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
        const double y = (*ctx->fn)(x);
        return std::isfinite(y) ? y : 1e300;
    };
    std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(n)), ss(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0(static_cast<Eigen::Index>(i)));
    gsl_vector_set_all(ss.get(), step);
    std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    gsl_multimin_fminimizer_set(m.get(), &f, x.get(), ss.get());
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(m.get())) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), tol) == GSL_SUCCESS) {
            converged = true;
            break;
        }
    }
    NelderMeadResult r;
    r.x.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) r.x(static_cast<Eigen::Index>(i)) = gsl_vector_get(m->x, i);
    r.value = m->fval;
    r.converged = converged;
    return r;
}

// Traceless Hermitian basis: off-diagonal generators plus diagonal differences.
inline std::vector<Matrix> traceless_basis(int d) {
    std::vector<Matrix> basis;
    for (const auto& b : hermitian_basis(d))
        if (std::abs(b.trace()) < 1e-15) basis.push_back(b);
    for (int i = 0; i + 1 < d; ++i) basis.push_back((ket_bra(d, i, i) - ket_bra(d, i + 1, i + 1)) / std::sqrt(2.0));
    return basis;
}

} // namespace detail

struct LsiOptions {
    int restarts = 128;
    std::uint64_t seed = 1729;
    double tolerance = 1e-8;
    int max_iterations = 4000;
};

struct LsiEstimate {
    double alpha_upper = std::numeric_limits<double>::infinity();  // best E(f)/Ent(f)
    HermitianOperator witness;                                      // unit 2-norm positive f
    double alpha_lower = 0.0;
    BoundReport lower_report;
    double gap = 0.0;
    int restarts_used = 0;
    bool converged = false;
};

// E(f)/Ent(f) for f = exp(h); infinity when Ent falls below 1e-12.
inline double lsi_ratio(const WeightedContext& ctx, const Superoperator& l, const Matrix& h) {
    // the ratio is invariant under f -> c f, so shift by the top eigenvalue to avoid overflow
    const auto sd = spectral_decompose(HermitianOperator(0.5 * (h + h.adjoint())));
    const double top = sd.eigenvalues(sd.dim() - 1);
    if (!std::isfinite(top)) return std::numeric_limits<double>::infinity();
    const auto f = matrix_function(sd, [top](double x) { return std::exp(x - top); });
    const double norm2 = weighted_inner(ctx, f, f);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) return std::numeric_limits<double>::infinity();
    const HermitianOperator fn(f.matrix() / std::sqrt(norm2));
    const double ent = ent_functional(ctx, fn);
    if (!(ent >= 1e-12)) return std::numeric_limits<double>::infinity();
    return dirichlet_form(ctx, l, fn) / ent;
}

// Variational upper estimate of the log-Sobolev constant by multistart Nelder-Mead over
// f = exp(h), together with the general lower bound from the spectral gap.
inline LsiEstimate estimate_lsi(const WeightedContext& ctx, const Superoperator& l, const LsiOptions& opt = {}) {
    if (l.dim() != ctx.dim()) throw DimensionMismatch("estimate_lsi: generator dimension");
    if (opt.restarts < 1) throw DomainError("estimate_lsi: restarts must be >= 1");
    require_unital(l, "estimate_lsi");
    const Matrix sym = symmetrized_generator(l, ctx.sigma());
    if ((sym - sym.adjoint()).norm() > kReversibleTol * std::max(1.0, sym.norm()))
        throw NotReversible("estimate_lsi: generator is not reversible with respect to sigma");
    const int d = ctx.dim();
    const auto basis = detail::traceless_basis(d);

    // spectral gap and eigen-directions of the symmetrized generator
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.adjoint()));
    const RealVector& ev = es.eigenvalues();
    const double gap = ev.size() > 1 ? -ev(ev.size() - 2) : 0.0;
    if (!(gap > 0.0)) throw NotPrimitive("estimate_lsi: generator has no spectral gap");
    const Matrix gamma_inv = inverse_quarter_weight(ctx.sigma()).matrix();

    LsiEstimate out;
    out.gap = gap;
    out.lower_report = bound_general(gap, ctx.sigma());
    out.alpha_lower = out.lower_report.value;

    double best = std::numeric_limits<double>::infinity();
    Matrix best_h;
    bool best_converged = true;
    auto consider = [&](double v, const Matrix& h, bool converged) {
        if (v < best) {
            best = v;
            best_h = h;
            best_converged = converged;
        }
    };

    // Near-identity probes along the slow eigen-directions: the infimum can sit at f -> 1.
    for (Eigen::Index k = 0; k + 1 < ev.size(); ++k) {
        const Matrix phi = unvectorize(gamma_inv * es.eigenvectors().col(k), d);
        for (const Matrix& dir : {Matrix(0.5 * (phi + phi.adjoint())), Matrix(0.5 * kI * (phi - phi.adjoint()))}) {
            const double n = dir.norm();
            if (n < 1e-12) continue;
            for (double eps : {1e-1, 1e-2, 1e-3, 1e-4})
                for (double sign : {1.0, -1.0}) {
                    const Matrix h = sign * eps * dir / n;
                    consider(lsi_ratio(ctx, l, h), h, true);
                }
        }
    }

    auto objective = [&](const RealVector& x) { return lsi_ratio(ctx, l, combine(basis, x)); };
    struct Run {
        double value = std::numeric_limits<double>::infinity();
        RealVector x;
        bool converged = false;
    };
    const auto runs = parallel_map<Run>(opt.restarts, [&](int r) {
        std::mt19937_64 rng(opt.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> scale(0.05, 3.0);
        const double s = scale(rng);
        RealVector x0(static_cast<Eigen::Index>(basis.size()));
        for (Eigen::Index k = 0; k < x0.size(); ++k) x0(k) = s * nd(rng);
        const auto nm = detail::nelder_mead(objective, x0, 0.5 * s, opt.tolerance, opt.max_iterations);
        return Run{nm.value, nm.x, nm.converged};
    });
    for (const auto& run : runs)
        if (std::isfinite(run.value) && run.value < 1e299) consider(run.value, combine(basis, run.x), run.converged);

    if (!std::isfinite(best)) throw DegenerateWitness("estimate_lsi: every restart ended with Ent(f) < 1e-12");
    const auto sd = spectral_decompose(HermitianOperator(0.5 * (best_h + best_h.adjoint())));
    const double top = sd.eigenvalues(sd.dim() - 1);
    const auto f = matrix_function(sd, [top](double x) { return std::exp(x - top); });
    out.witness = HermitianOperator(f.matrix() / lp_norm(ctx, f, 2.0));
    out.alpha_upper = best;
    out.restarts_used = opt.restarts;
    out.converged = best_converged;
    return out;
}

// Replaces the lower end of the bracket with a model-specific bound.
inline LsiEstimate with_lower_bound(LsiEstimate e, const BoundReport& lower) {
    e.lower_report = lower;
    e.alpha_lower = lower.value;
    return e;
}

inline double hypercontractive_exponent(double alpha, double t) { return 1.0 + std::exp(2.0 * alpha * t); }

struct HypercontractivityReport {
    double max_violation = 0.0;          // max(0, ||T_t f||_{p(t)} - ||f||_2)
    std::vector<double> skipped_times;   // times with p(t) > 64
    int evaluations = 0;
};

// Samples ||T_t f||_{p(t),sigma} - ||f||_{2,sigma} with p(t) = 1 + e^{2 alpha t} over random PSD f
// (the identity included) and the given times.
inline HypercontractivityReport verify_hypercontractivity(const WeightedContext& ctx, const Superoperator& l, double alpha,
                                                          const std::vector<double>& times, int samples = 200,
                                                          std::uint64_t seed = 99) {
    if (!(alpha > 0.0)) throw DomainError("verify_hypercontractivity: alpha must be > 0");
    const int d = ctx.dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> rank(1, d);
    std::vector<Matrix> fs{identity(d)};
    for (int k = 0; k < samples; ++k) fs.push_back(random_psd(d, rng, rank(rng)).matrix());

    HypercontractivityReport rep;
    std::vector<double> norms2;
    for (const auto& f : fs) norms2.push_back(lp_norm(ctx, f, 2.0));
    for (double t : times) {
        const double p = hypercontractive_exponent(alpha, t);
        if (p > 64.0) {
            rep.skipped_times.push_back(t);
            continue;
        }
        const Superoperator tt = evolve(l, t);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const double lhs = lp_norm(ctx, tt.apply(fs[i]), p);
            rep.max_violation = std::max(rep.max_violation, lhs - norms2[i]);
            ++rep.evaluations;
        }
    }
    return rep;
}

// d/dt ||T_t f||_{p(t),sigma} at t = 0 for a differentiable exponent curve with p(0), p'(0):
//   ||f||_2^{-1} (2 p'(0) / p(0)^2 Ent(f) - E(f)),
// where Ent is the L_2 entropy above (half the classical normalization, hence the factor 2).
inline double norm_derivative_at_zero(const WeightedContext& ctx, const Superoperator& l, const HermitianOperator& f,
                                      double p0, double pdot0) {
    const double n = lp_norm(ctx, f, 2.0);
    return (2.0 * pdot0 / (p0 * p0) * ent_functional(ctx, f) - dirichlet_form(ctx, l, f)) / n;
}

// Central difference of t -> ||e^{tL} f||_{p(t),sigma} at 0 with p(t) = 1 + e^{2 alpha t}.
inline double norm_derivative_fd(const WeightedContext& ctx, const Superoperator& l, const HermitianOperator& f,
                                 double alpha, double h = 1e-5) {
    auto value = [&](double t) {
        const Matrix tt = (t * l.matrix()).exp();
        const Matrix img = unvectorize(tt * vectorize(f.matrix()), l.dim());
        return lp_norm(ctx, img, hypercontractive_exponent(alpha, t));
    };
    return (value(h) - value(-h)) / (2.0 * h);
}

} // namespace lsq
