// product_graph.hpp — product semigroups with their excitation-block eigenbases, graph-state
// Hamiltonians and unitaries, the graph Davies semigroup and its bounds

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lsq/davies.hpp"
#include "lsq/lindblad.hpp"
#include "lsq/lsi_bounds.hpp"

namespace lsq {

inline constexpr int kProductDimensionCap = 64;
inline constexpr int kGraphSuperoperatorCap = 3;
inline constexpr int kGraphHamiltonianCap = 6;

// Eigen-operators of one reversible factor, orthonormal in its sigma inner product; index 0 is
// the identity.
struct FactorEigenbasis {
    std::vector<Matrix> ops;
    std::vector<double> eigenvalues;  // descending, eigenvalues[0] = 0
};

inline FactorEigenbasis factor_eigenbasis(const SemigroupAnalysis& a) {
    if (!a.reversible) throw NotReversible("factor_eigenbasis: factor is not reversible");
    const int d = a.generator.dim();
    const Eigen::Index n = a.sym_eigenvalues.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a.sym_eigenvalues(x) > a.sym_eigenvalues(y); });
    FactorEigenbasis fb;
    for (Eigen::Index idx : order) {
        Vector v = a.sym_eigenvectors.col(idx);
        // deterministic phase: largest entry real and positive
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::abs(v(imax)) / v(imax);
        fb.ops.push_back(unvectorize(a.gamma_inv * v, d));
        fb.eigenvalues.push_back(a.sym_eigenvalues(idx));
    }
    fb.ops[0] = identity(d);
    fb.eigenvalues[0] = 0.0;
    return fb;
}

struct ProductLiouvillian {
    std::vector<SemigroupAnalysis> factors;
    Superoperator assembled;
    FullRankState fixed_point;
    double gap = 0.0;  // min over factors
    int local_dim = 0;
};

inline ProductLiouvillian build_product(std::vector<SemigroupAnalysis> factors) {
    if (factors.empty()) throw DomainError("build_product: no factors");
    const int d = factors.front().generator.dim();
    for (const auto& f : factors) {
        if (f.generator.dim() != d) throw DimensionMismatch("build_product: factors must share the local dimension");
        if (!f.reversible) throw NotReversible("build_product: factor is not reversible");
    }
    const int n = static_cast<int>(factors.size());
    if (std::pow(static_cast<double>(d), n) > kProductDimensionCap)
        throw DimensionCap("build_product: register dimension exceeds " + std::to_string(kProductDimensionCap));
    Superoperator total = Superoperator::zero(int_pow(d, n));
    Matrix sigma = Matrix::Ones(1, 1);
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        total = total + lift(factors[static_cast<std::size_t>(k)].generator, k, n);
        sigma = kron(sigma, factors[static_cast<std::size_t>(k)].fixed_point.matrix());
        gap = std::min(gap, factors[static_cast<std::size_t>(k)].gap);
    }
    FullRankState fp = FullRankState::from_unnormalized(sigma);
    const double residual = (total.matrix().adjoint() * vectorize(fp.matrix())).norm();
    if (residual > 1e-9) throw EigenResidualExceeded("build_product: tensor fixed point not stationary");
    return {std::move(factors), std::move(total), std::move(fp), gap, d};
}

struct ExcitationBlock {
    int n = 0;
    std::vector<Matrix> basis;
    std::vector<double> eigenvalues;
    std::vector<std::vector<int>> indices;  // per-site eigen-operator index, 0 = identity
};

// Blocks n = 0..N spanned by tensor products of factor eigen-operators with exactly n
// non-identity sites.
inline std::vector<ExcitationBlock> excitation_blocks(const ProductLiouvillian& p) {
    const int n_sites = static_cast<int>(p.factors.size());
    std::vector<FactorEigenbasis> fb;
    for (const auto& f : p.factors) fb.push_back(factor_eigenbasis(f));
    const int m = p.local_dim * p.local_dim;
    std::vector<ExcitationBlock> blocks(static_cast<std::size_t>(n_sites + 1));
    for (int b = 0; b <= n_sites; ++b) blocks[static_cast<std::size_t>(b)].n = b;
    const int total = int_pow(m, n_sites);
    for (int code = 0; code < total; ++code) {
        std::vector<int> idx(static_cast<std::size_t>(n_sites));
        int c = code, excited = 0;
        for (int k = n_sites - 1; k >= 0; --k) {
            idx[static_cast<std::size_t>(k)] = c % m;
            c /= m;
        }
        Matrix op = Matrix::Ones(1, 1);
        double ev = 0.0;
        for (int k = 0; k < n_sites; ++k) {
            const int i = idx[static_cast<std::size_t>(k)];
            op = kron(op, fb[static_cast<std::size_t>(k)].ops[static_cast<std::size_t>(i)]);
            ev += fb[static_cast<std::size_t>(k)].eigenvalues[static_cast<std::size_t>(i)];
            if (i != 0) ++excited;
        }
        auto& blk = blocks[static_cast<std::size_t>(excited)];
        blk.basis.push_back(std::move(op));
        blk.eigenvalues.push_back(ev);
        blk.indices.push_back(std::move(idx));
    }
    return blocks;
}

struct ProductQReport {
    double max_isolated = 0.0;  // max |Q| over tuples where some site is excited in exactly one argument
    double max_ratio = 0.0;     // max |Q| / s^n over same-block tuples, n <= max_block
    long tuples = 0;
};

// Exhaustive Q-form scan over the excitation basis: vanishing whenever a site is excited in exactly
// one of the four arguments, and |Q| <= s^n inside block n.
inline ProductQReport product_q_check(const ProductLiouvillian& p, int max_block) {
    const auto blocks = excitation_blocks(p);
    const WeightedContext ctx(p.fixed_point);
    double s = 0.0;
    for (const auto& f : p.factors) s = std::max(s, f.fixed_point.inverse_norm());
    std::vector<std::pair<const Matrix*, const std::vector<int>*>> all;
    for (const auto& blk : blocks)
        for (std::size_t i = 0; i < blk.basis.size(); ++i) all.emplace_back(&blk.basis[i], &blk.indices[i]);
    const auto n_sites = p.factors.size();
    ProductQReport r;
    for (const auto& a : all)
        for (const auto& b : all)
            for (const auto& c : all)
                for (const auto& d : all) {
                    const std::array<const std::vector<int>*, 4> idx{a.second, b.second, c.second, d.second};
                    bool isolated = false;
                    std::array<int, 4> weight{};
                    for (std::size_t site = 0; site < n_sites; ++site) {
                        int excited = 0;
                        for (std::size_t j = 0; j < 4; ++j) {
                            const bool on = (*idx[j])[site] != 0;
                            excited += on;
                            weight[j] += on;
                        }
                        isolated = isolated || excited == 1;
                    }
                    const bool same_block = weight[0] == weight[1] && weight[1] == weight[2] && weight[2] == weight[3];
                    if (!isolated && !(same_block && weight[0] <= max_block)) continue;
                    const double q = q_form(ctx, *a.first, *b.first, *c.first, *d.first).magnitude;
                    ++r.tuples;
                    if (isolated) r.max_isolated = std::max(r.max_isolated, q);
                    if (same_block && weight[0] <= max_block) r.max_ratio = std::max(r.max_ratio, q / std::pow(s, weight[0]));
                }
    return r;
}

// C = 2 s^{1/4} d, the per-excitation growth of the 4-norm over the 2-norm inside a block.
inline double product_block_norm_constant(int d, double s) {
    if (d < 2 || !(s >= 1.0)) throw DomainError("product_block_norm_constant: need d >= 2 and s >= 1");
    return 2.0 * std::pow(s, 0.25) * d;
}

// Lambda / (log(d^4 s) + 11) <= alpha <= Lambda, independent of the number of factors.
inline BoundReport bound_product_lsi(double lambda, int d, double s) {
    if (!(lambda > 0.0) || d < 2 || !(s >= 1.0)) throw DomainError("bound_product_lsi: need Lambda > 0, d >= 2, s >= 1");
    return make_report(BoundName::product_lsi, {{"Lambda", lambda}, {"d", static_cast<double>(d)}, {"s", s}},
                       lambda / (std::log(std::pow(d, 4) * s) + 11.0), lambda);
}

inline BoundReport bound_product_lsi(const ProductLiouvillian& p) {
    double s = 0.0;
    for (const auto& f : p.factors) s = std::max(s, f.fixed_point.inverse_norm());
    return bound_product_lsi(p.gap, p.local_dim, s);
}

// ---- graph states ----------------------------------------------------------------------

struct GraphModel {
    int vertices = 1;
    std::vector<std::pair<int, int>> edges;
    double beta = 1.0;
    double g2 = 1.0;

    double g_minus2() const { return std::exp(-2.0 * beta) * g2; }
};

inline void validate_graph(const GraphModel& g, int cap) {
    if (g.vertices < 1) throw DomainError("graph: need at least one vertex");
    if (g.vertices > cap) throw DimensionCap("graph: " + std::to_string(g.vertices) + " vertices exceeds cap " + std::to_string(cap));
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : g.edges) {
        if (u == v) throw DomainError("graph: self-loop at vertex " + std::to_string(u));
        if (u < 0 || v < 0 || u >= g.vertices || v >= g.vertices)
            throw IndexError("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range");
        if (!seen.insert(std::minmax(u, v)).second)
            throw DomainError("graph: duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    if (!(g.beta >= 0.0) || !(g.g2 > 0.0)) throw DomainError("graph: need beta >= 0 and G(2) > 0");
}

// Edge list, one "u v" pair per line, 0-indexed. Blank lines and '#' comments are ignored.
inline std::vector<std::pair<int, int>> parse_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int u = 0, v = 0;
        if (!(ls >> u)) continue;
        std::string rest;
        if (!(ls >> v) || (ls >> rest))
            throw ConfigError("edge list line " + std::to_string(lineno) + ": expected two integers");
        edges.emplace_back(u, v);
    }
    return edges;
}

inline std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list " + path);
    return parse_edge_list(in);
}

// S_j = X_j prod_{k ~ j} Z_k.
inline Matrix graph_stabilizer(const GraphModel& g, int j) {
    const int n = g.vertices;
    Matrix s = embed(pauli_x(), j, n);
    for (auto [u, v] : g.edges) {
        if (u == j) s = s * embed(pauli_z(), v, n);
        if (v == j) s = s * embed(pauli_z(), u, n);
    }
    return s;
}

inline HermitianOperator graph_hamiltonian(const GraphModel& g) {
    validate_graph(g, kGraphHamiltonianCap);
    const int dim = int_pow(2, g.vertices);
    Matrix h = Matrix::Zero(dim, dim);
    for (int j = 0; j < g.vertices; ++j) h += graph_stabilizer(g, j);
    return HermitianOperator(h);
}

// U = (prod CZ_{kj}) H^{(x)N}; maps |0...0> to the graph state and satisfies U^dagger S_j U = Z_j.
inline Matrix graph_unitary(const GraphModel& g) {
    validate_graph(g, kGraphHamiltonianCap);
    const int n = g.vertices, dim = int_pow(2, n);
    Matrix had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    Matrix u = Matrix::Ones(1, 1);
    for (int j = 0; j < n; ++j) u = kron(u, had);
    Matrix cz = Matrix::Identity(dim, dim);
    for (auto [a, b] : g.edges)
        for (int x = 0; x < dim; ++x) {
            const bool ba = (x >> (n - 1 - a)) & 1, bb = (x >> (n - 1 - b)) & 1;
            if (ba && bb) cz(x, x) = -cz(x, x);
        }
    return cz * u;
}

// Local graph-basis generator: jump |0><1| at rate G(2), |1><0| at rate G(-2).
inline SemigroupAnalysis graph_local_factor(double g2, double g_minus2) {
    return analyze(build_lindblad({HermitianOperator::zero(2),
                                   {std::sqrt(g2) * ket_bra(2, 0, 1), std::sqrt(g_minus2) * ket_bra(2, 1, 0)}}));
}

// Graph Davies semigroup in the graph basis: a product of identical local factors.
inline ProductLiouvillian graph_davies(const GraphModel& g) {
    validate_graph(g, kGraphSuperoperatorCap);
    const auto local = graph_local_factor(g.g2, g.g_minus2());
    return build_product(std::vector<SemigroupAnalysis>(static_cast<std::size_t>(g.vertices), local));
}

// f -> U f U^dagger as a superoperator.
inline Superoperator conjugation(const Matrix& u) { return sandwich(u, u.adjoint()); }

// Graph-basis generator rotated to the computational basis: U L(U^dagger f U) U^dagger.
inline Superoperator graph_generator_computational(const GraphModel& g, const ProductLiouvillian& p) {
    const auto c = conjugation(graph_unitary(g));
    return c * p.assembled * c.adjoint();
}

// Direct Davies construction in the computational basis: Hamiltonian -sum_j S_j (its ground
// state is the graph state), couplings Z_j, flat KMS bath with G(2) = g2. With all_paulis the
// couplings are X_j, Y_j, Z_j.
inline DaviesModel graph_davies_direct_model(const GraphModel& g, bool all_paulis = false) {
    validate_graph(g, kGraphSuperoperatorCap);
    std::vector<HermitianOperator> couplings;
    for (int j = 0; j < g.vertices; ++j) {
        if (all_paulis) {
            couplings.emplace_back(embed(pauli_x(), j, g.vertices));
            couplings.emplace_back(embed(pauli_y(), j, g.vertices));
        }
        couplings.emplace_back(embed(pauli_z(), j, g.vertices));
    }
    return {HermitianOperator(-graph_hamiltonian(g).matrix()), std::move(couplings), BathSpectralDensity::flat(g.beta, g.g2), std::nullopt};
}

// (G(2) + G(-2)) / (2 log(e^{2 beta} + 1) + 28) <= alpha <= (G(2) + G(-2)) / 2, for any N.
inline BoundReport bound_graph_lsi(const GraphModel& g) {
    const double g2 = g.g2, gm2 = g.g_minus2();
    if (!(g2 > 0.0)) throw DomainError("bound_graph_lsi: G(2) must be > 0");
    const double value = (g2 + gm2) / (2.0 * std::log(std::exp(2.0 * g.beta) + 1.0) + 28.0);
    return make_report(BoundName::graph_lsi, {{"beta", g.beta}, {"G2", g2}, {"G-2", gm2}}, value, 0.5 * (g2 + gm2));
}

// <0|sigma|0> for the N-fold local Gibbs product.
inline double graph_ground_overlap(int n, double beta) {
    return std::pow(1.0 - 1.0 / (std::exp(2.0 * beta) + 1.0), n);
}

struct PrepTime {
    double beta_required = 0.0;
    double t_epsilon = 0.0;
};

// beta = log(4N/eps)/2 and t = log(4N/eps) log(8N log(4N/eps) / eps^2), in units of 1/G(2).
inline PrepTime prep_time(int n, double eps, double g2 = 1.0) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidEpsilon("prep_time: epsilon must lie in (0, 1)");
    if (n < 1) throw DomainError("prep_time: N must be >= 1");
    if (!(g2 > 0.0)) throw DomainError("prep_time: G(2) must be > 0");
    const double l = std::log(4.0 * n / eps);
    return {0.5 * l, l * std::log(8.0 * n * l / (eps * eps)) / g2};
}

} // namespace lsq
