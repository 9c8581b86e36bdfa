// davies.hpp — Davies thermal generators: Bohr-frequency decomposition of couplings, KMS bath
// densities, generator assembly and Gibbs/KMS verification

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lsq/lindblad.hpp"
#include "lsq/operator_core.hpp"

namespace lsq {

// Bath spectral density G(omega) >= 0 per coupling index, at inverse temperature beta.
class BathSpectralDensity {
public:
    using Rule = std::function<double(double)>;

    BathSpectralDensity(double beta, std::vector<Rule> rules, std::string name = "custom")
        : beta_(beta), rules_(std::move(rules)), name_(std::move(name)) {
        if (!(beta_ >= 0.0) || !std::isfinite(beta_)) throw DomainError("bath: beta must be finite and >= 0");
        if (rules_.empty()) throw DomainError("bath: no spectral density supplied");
    }

    // G(omega) = gamma0 for omega >= 0, gamma0 e^{beta omega} for omega < 0.
    static BathSpectralDensity flat(double beta, double gamma0 = 1.0) {
        return {beta, {[=](double w) { return w >= 0.0 ? gamma0 : gamma0 * std::exp(beta * w); }}, "flat"};
    }

    // G(omega) = gamma0 omega / (1 - e^{-beta omega}), with the limit gamma0 / beta at omega = 0.
    static BathSpectralDensity ohmic(double beta, double gamma0 = 1.0) {
        if (!(beta > 0.0)) throw DomainError("ohmic bath: beta must be > 0");
        return {beta,
                {[=](double w) {
                    if (std::abs(beta * w) < 1e-12) return gamma0 / beta;
                    return gamma0 * w / -std::expm1(-beta * w);
                }},
                "ohmic"};
    }

    double beta() const { return beta_; }
    const std::string& name() const { return name_; }

    // Coupling alpha uses rule alpha, or the single shared rule.
    double operator()(std::size_t alpha, double omega) const {
        const auto& rule = rules_.size() == 1 ? rules_.front() : rules_.at(alpha);
        return rule(omega);
    }

    std::size_t rule_count() const { return rules_.size(); }

    // max relative |G(-w) - e^{-beta w} G(w)| over the probes.
    double kms_residual(std::size_t alpha, const std::vector<double>& probes) const {
        double worst = 0.0;
        for (double w : probes) {
            const double lhs = (*this)(alpha, -w);
            const double rhs = std::exp(-beta_ * w) * (*this)(alpha, w);
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        return worst;
    }

private:
    double beta_;
    std::vector<Rule> rules_;
    std::string name_;
};

struct DaviesModel {
    HermitianOperator hamiltonian;
    std::vector<HermitianOperator> couplings;
    BathSpectralDensity bath;
    std::optional<double> bohr_tolerance;  // default 1e-9 x spectral range of H
};

struct BohrDecomposition {
    std::vector<double> frequencies;  // sorted ascending, symmetric about 0
    std::vector<Matrix> components;   // S(omega), same order
    bool ambiguous = false;           // neighbouring clusters closer than 10 x tol
    std::string warning;

    Matrix reconstruct() const {
        Matrix s = Matrix::Zero(components.front().rows(), components.front().cols());
        for (const auto& c : components) s += c;
        return s;
    }

    std::optional<std::size_t> index_of(double omega, double tol = 1e-9) const {
        for (std::size_t i = 0; i < frequencies.size(); ++i)
            if (std::abs(frequencies[i] - omega) <= tol) return i;
        return std::nullopt;
    }
};

inline double default_bohr_tolerance(const SpectralDecomposition& hs) {
    const double range = hs.eigenvalues.maxCoeff() - hs.eigenvalues.minCoeff();
    return 1e-9 * std::max(range, 1.0);
}

// Single-linkage clustering of |eps_k - eps_m| at tol. Returns cluster centres (>= 0) and the
// ambiguity flag.
inline std::pair<std::vector<double>, bool> bohr_clusters(const RealVector& eps, double tol) {
    std::vector<double> diffs;
    const Eigen::Index n = eps.size();
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index m = 0; m < n; ++m) diffs.push_back(std::abs(eps(k) - eps(m)));
    std::sort(diffs.begin(), diffs.end());
    std::vector<std::vector<double>> groups{{diffs.front()}};
    bool ambiguous = false;
    for (std::size_t i = 1; i < diffs.size(); ++i) {
        const double gap = diffs[i] - diffs[i - 1];
        if (gap <= tol) {
            groups.back().push_back(diffs[i]);
        } else {
            if (gap < 10.0 * tol) ambiguous = true;
            groups.push_back({diffs[i]});
        }
    }
    std::vector<double> centres;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double x : g) mean += x;
        mean /= static_cast<double>(g.size());
        centres.push_back(g.front() <= tol ? 0.0 : mean);
    }
    return {centres, ambiguous};
}

// S(omega) = sum_{eps_k - eps_m = omega} <k|S|m> |k><m|, with differences grouped at tol.
// Components that vanish identically are dropped.
inline BohrDecomposition bohr_decompose(const HermitianOperator& h, const HermitianOperator& s,
                                        std::optional<double> tol = std::nullopt) {
    if (h.dim() != s.dim()) throw DimensionMismatch("bohr_decompose: H and S dimensions differ");
    const auto hs = spectral_decompose(h);
    const double t = tol.value_or(default_bohr_tolerance(hs));
    if (!(t > 0.0)) throw DomainError("bohr_decompose: tolerance must be > 0");
    const auto [centres, ambiguous] = bohr_clusters(hs.eigenvalues, t);

    std::vector<double> freqs;
    for (double c : centres) {
        if (c != 0.0) freqs.push_back(-c);
        freqs.push_back(c);
    }
    std::sort(freqs.begin(), freqs.end());

    const int d = h.dim();
    const Matrix& v = hs.eigenvectors;
    const Matrix se = v.adjoint() * s.matrix() * v;  // S in the energy basis
    std::vector<Matrix> comps(freqs.size(), Matrix::Zero(d, d));
    for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
            const double w = hs.eigenvalues(k) - hs.eigenvalues(m);
            std::size_t best = 0;
            for (std::size_t i = 1; i < freqs.size(); ++i)
                if (std::abs(freqs[i] - w) < std::abs(freqs[best] - w)) best = i;
            comps[best](k, m) += se(k, m);
        }

    BohrDecomposition out;
    out.ambiguous = ambiguous;
    if (ambiguous)
        out.warning = "Bohr frequency clusters are closer than 10x the grouping tolerance " + std::to_string(t);
    const double cut = 1e-13 * std::max(1.0, max_abs(s.matrix()));
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (max_abs(comps[i]) <= cut) continue;
        out.frequencies.push_back(freqs[i]);
        out.components.push_back(v * comps[i] * v.adjoint());
    }
    if (out.frequencies.empty()) {
        out.frequencies.push_back(0.0);
        out.components.push_back(Matrix::Zero(d, d));
    }
    return out;
}

// Dimension of the commutant {X : [X, A] = 0 for all A in ops}.
inline int commutant_dimension(const std::vector<Matrix>& ops, int d) {
    if (ops.empty()) return d * d;
    const Matrix id = identity(d);
    Matrix stacked(static_cast<Eigen::Index>(ops.size()) * d * d, d * d);
    for (std::size_t i = 0; i < ops.size(); ++i)
        stacked.middleRows(static_cast<Eigen::Index>(i) * d * d, d * d) =
            kron(id, ops[i]) - kron(ops[i].transpose(), id);
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const RealVector& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv(0));
    int dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++dim;
    return dim + static_cast<int>(d * d - sv.size());
}

inline std::vector<BohrDecomposition> bohr_decompose_all(const DaviesModel& model) {
    std::vector<BohrDecomposition> out;
    for (const auto& s : model.couplings) out.push_back(bohr_decompose(model.hamiltonian, s, model.bohr_tolerance));
    return out;
}

inline void validate_davies_model(const DaviesModel& model) {
    if (model.couplings.empty()) throw DomainError("Davies model: no coupling operators");
    for (const auto& s : model.couplings)
        if (s.dim() != model.hamiltonian.dim()) throw DimensionMismatch("Davies model: coupling dimension differs from H");
    if (model.bath.rule_count() != 1 && model.bath.rule_count() != model.couplings.size())
        throw DimensionMismatch("Davies model: need one spectral density or one per coupling");
}

// Dissipative Davies generator in the Heisenberg picture. The jump operator S(w)^dagger lowers
// the energy by w and carries rate G(w):
//   L(f) = sum_{alpha, w} G(w) (S(w) f S(w)^dagger - 1/2 {S(w) S(w)^dagger, f}).
// The Gibbs state of H at the bath temperature is asserted stationary.
inline Superoperator build_davies_generator(const DaviesModel& model) {
    validate_davies_model(model);
    const auto decomps = bohr_decompose_all(model);
    LindbladSpec spec{HermitianOperator::zero(model.hamiltonian.dim()), {}};
    for (std::size_t a = 0; a < decomps.size(); ++a) {
        std::vector<double> probes;
        for (double w : decomps[a].frequencies) probes.push_back(std::abs(w));
        if (model.bath.kms_residual(a, probes) > 1e-10)
            throw DomainError("Davies model: bath density violates the KMS condition for coupling " + std::to_string(a));
        for (std::size_t i = 0; i < decomps[a].frequencies.size(); ++i) {
            const double g = model.bath(a, decomps[a].frequencies[i]);
            if (g < 0.0 || !std::isfinite(g)) throw NegativeRate("Davies model: negative or non-finite bath rate");
            if (g == 0.0) continue;
            spec.lindblad_ops.push_back(std::sqrt(g) * decomps[a].components[i].adjoint());
        }
    }
    const Superoperator l = build_lindblad(spec);
    const auto gibbs = FullRankState::gibbs(model.hamiltonian, model.bath.beta());
    const double residual = (l.matrix().adjoint() * vectorize(gibbs.matrix())).norm();
    if (residual > 1e-9 * std::max(1.0, l.matrix().norm()))
        throw GibbsNotStationary("Davies generator: Gibbs state not stationary, residual " + std::to_string(residual));
    return l;
}

// Builds and analyzes the generator. Throws NotPrimitive when {H, S^alpha} have a nontrivial
// commutant or the stationary space is degenerate.
inline SemigroupAnalysis build_davies(const DaviesModel& model) {
    const Superoperator l = build_davies_generator(model);
    std::vector<Matrix> ops{model.hamiltonian.matrix()};
    for (const auto& s : model.couplings) ops.push_back(s.matrix());
    const int comm = commutant_dimension(ops, model.hamiltonian.dim());
    if (comm > 1)
        throw NotPrimitive("Davies model: {H, S} commutant has dimension " + std::to_string(comm));
    auto a = analyze(l);
    const auto gibbs = FullRankState::gibbs(model.hamiltonian, model.bath.beta());
    if (trace_norm(a.fixed_point.matrix() - gibbs.matrix()) > 1e-9)
        throw GibbsNotStationary("Davies generator: fixed point differs from the Gibbs state");
    if (!a.reversible) throw InvariantViolation("Davies generator: not reversible with respect to its Gibbs state");
    return a;
}

struct KmsReport {
    double bath_residual = 0.0;   // max relative |G(-w) - e^{-beta w} G(w)|
    double minus_residual = 0.0;  // max ||sigma S(w) - e^{-beta w} S(w) sigma|| / scale
    double plus_residual = 0.0;   // same with e^{+beta w}
    std::string validated_sign;   // "-", "+", "both" or "none" at 1e-10
};

inline KmsReport check_kms_relations(const DaviesModel& model, const std::vector<BohrDecomposition>& decomps) {
    const auto gibbs = FullRankState::gibbs(model.hamiltonian, model.bath.beta());
    const Matrix& sigma = gibbs.matrix();
    const double beta = model.bath.beta();
    KmsReport r;
    for (std::size_t a = 0; a < decomps.size(); ++a) {
        std::vector<double> probes{0.0, 0.5, 1.0, 2.0};
        for (double w : decomps[a].frequencies) probes.push_back(std::abs(w));
        r.bath_residual = std::max(r.bath_residual, model.bath.kms_residual(a, probes));
        for (std::size_t i = 0; i < decomps[a].frequencies.size(); ++i) {
            const double w = decomps[a].frequencies[i];
            const Matrix& s = decomps[a].components[i];
            const double scale = std::max(1e-300, sigma.norm() * s.norm());
            r.minus_residual = std::max(r.minus_residual, (sigma * s - std::exp(-beta * w) * s * sigma).norm() / scale);
            r.plus_residual = std::max(r.plus_residual, (sigma * s - std::exp(beta * w) * s * sigma).norm() / scale);
        }
    }
    const bool minus = r.minus_residual <= 1e-10, plus = r.plus_residual <= 1e-10;
    r.validated_sign = minus && plus ? "both" : minus ? "-" : plus ? "+" : "none";
    return r;
}

inline KmsReport check_kms_relations(const DaviesModel& model) {
    return check_kms_relations(model, bohr_decompose_all(model));
}

} // namespace lsq
