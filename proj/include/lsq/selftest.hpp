// selftest.hpp — acceptance criteria 1–10 as executable checks with one PASS/FAIL line each

#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "lsq/fermion.hpp"
#include "lsq/product_graph.hpp"

namespace lsq {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace selftest_detail {

// Accumulates named checks; the first failure is kept for the report.
class Checker {
public:
    void le(double value, double limit, const std::string& what) {
        ++count_;
        if (!(value <= limit) && ok_) {
            ok_ = false;
            std::ostringstream os;
            os.precision(17);
            os << what << ": " << value << " > " << limit;
            first_failure_ = os.str();
        }
    }
    void near(double a, double b, double tol, const std::string& what) { le(std::abs(a - b), tol, what); }
    void truth(bool cond, const std::string& what) { le(cond ? 0.0 : 1.0, 0.0, what); }

    bool ok() const { return ok_; }
    std::string summary() const {
        return ok_ ? std::to_string(count_) + " checks" : first_failure_;
    }

private:
    bool ok_ = true;
    int count_ = 0;
    std::string first_failure_;
};

inline SemigroupAnalysis thermal_qubit(double beta) {
    return build_davies({HermitianOperator(pauli_z()), {HermitianOperator(pauli_x())}, BathSpectralDensity::flat(beta), std::nullopt});
}

inline DaviesModel rotated_qubit_model(double beta) {
    const Matrix h = 0.6 * pauli_z() + 0.8 * pauli_x();
    return {HermitianOperator(h), {HermitianOperator(pauli_y()), HermitianOperator(pauli_z())}, BathSpectralDensity::ohmic(beta), std::nullopt};
}

inline GraphModel path_graph(int n, double beta) {
    GraphModel g;
    g.vertices = n;
    for (int j = 0; j + 1 < n; ++j) g.edges.emplace_back(j, j + 1);
    g.beta = beta;
    return g;
}

// Gibbs state exp(-beta H)/Z from the dense matrix exponential, independent of the eigensolver path.
inline Matrix gibbs_by_exponential(const Matrix& h, double beta) {
    const Matrix e = (-beta * h).exp();
    return e / e.trace();
}

inline std::vector<SemigroupAnalysis> product_factors(int k) {
    std::vector<SemigroupAnalysis> out;
    for (int i = 0; i < k; ++i) out.push_back(i % 2 == 0 ? thermal_qubit(1.0) : build_davies(rotated_qubit_model(0.6)));
    return out;
}

inline double max_inverse_norm(const ProductLiouvillian& p) {
    double s = 0.0;
    for (const auto& f : p.factors) s = std::max(s, f.fixed_point.inverse_norm());
    return s;
}

inline void check_balance(Checker& c, const Superoperator& l, const Matrix& gibbs, const std::string& what) {
    const FullRankState sigma = FullRankState::from_unnormalized(gibbs);
    c.le(detailed_balance_report(l, sigma).asymmetry, 1e-10, what + " detailed balance");
    c.le((l.adjoint().apply(gibbs)).norm(), 1e-9, what + " Gibbs stationarity");
}

// ---- criteria ------------------------------------------------------------------------------

inline std::string detailed_balance() {
    Checker c;
    for (double beta : {0.5, 1.0, 2.0})
        check_balance(c, thermal_qubit(beta).generator, gibbs_by_exponential(pauli_z(), beta), "qubit");
    for (int n = 1; n <= 3; ++n) {
        std::vector<GraphModel> graphs{path_graph(n, 1.0)};
        if (n == 3) {
            GraphModel tri = path_graph(3, 0.7);
            tri.edges.emplace_back(0, 2);
            graphs.push_back(tri);
        }
        for (const auto& g : graphs) {
            const auto direct = graph_davies_direct_model(g);
            check_balance(c, build_davies_generator(direct), gibbs_by_exponential(direct.hamiltonian.matrix(), g.beta),
                          "graph direct");
            Matrix local = Matrix::Zero(2, 2);
            local(0, 0) = 1.0;
            local(1, 1) = std::exp(-2.0 * g.beta);
            Matrix prod = Matrix::Ones(1, 1);
            for (int j = 0; j < n; ++j) prod = kron(prod, local);
            check_balance(c, graph_davies(g).assembled, prod / prod.trace(), "graph basis");
        }
    }
    for (const auto& nu : std::vector<std::vector<double>>{{2.0}, {1.0, 2.0}, {0.0, 1.3}}) {
        FermionModel m{nu, Matrix::Ones(1, static_cast<Eigen::Index>(nu.size())), BathSpectralDensity::flat(0.8)};
        m.couplings(0, 0) = cplx(0.7, 0.2);
        const auto g = canonicalize(m);
        const Matrix h = free_fermion_hamiltonian(g.majoranas, nu).matrix();
        check_balance(c, g.generator, gibbs_by_exponential(h, 0.8), "fermion");
        const auto direct = fermion_davies_model(m);
        check_balance(c, build_davies_generator(direct), gibbs_by_exponential(direct.hamiltonian.matrix(), 0.8), "fermion direct");
    }
    for (int k = 1; k <= 3; ++k) {
        const auto p = build_product(product_factors(k));
        Matrix sigma = Matrix::Ones(1, 1);
        for (int i = 0; i < k; ++i)
            sigma = kron(sigma, i % 2 == 0 ? gibbs_by_exponential(pauli_z(), 1.0)
                                           : gibbs_by_exponential(rotated_qubit_model(0.6).hamiltonian.matrix(), 0.6));
        check_balance(c, p.assembled, sigma, "product");
    }
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string eigen_operators() {
    long strings = 0;
    std::vector<CanonicalFermionGenerator> gens{
        canonical_generator({2.0}, {1.0}, {1.0}, 1.0),       canonical_generator({0.0}, {0.6}, {1.1}, 1.0),
        canonical_generator({1.0, 2.0}, {0.8, 0.5}, {0.8, 0.5}, 1.3),
        canonical_generator({0.0, 1.4}, {0.4, 0.6}, {0.9, 0.6}, 0.9)};
    for (const auto& g : gens) {
        const auto basis = mode_basis(g);
        if (static_cast<int>(basis.ops.size()) != int_pow(4, g.modes)) throw BoundViolated("mode basis size");
        strings += static_cast<long>(verify_block_structure(g, basis).size());
    }
    return std::to_string(strings) + " strings";
}

inline std::string bound_arithmetic() {
    Checker c;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lam(0.01, 5.0), tt(0.0, 3.0), mm(1.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double l = lam(rng), t = tt(rng), m = mm(rng);
        const double a = bound_interpolation(l, 4.0, t, m).value, b = bound_interpolation_q4(l, t, m).value;
        c.le(std::abs(a - b), 4 * std::numeric_limits<double>::epsilon() * std::abs(b), "q = 4 specialization");
        const double s = 1.0 + 10.0 * tt(rng);
        c.near(bound_general(l, s).value, bound_interpolation(l, 4.0, 0.0, std::pow(s, 0.25)).value,
               1e-14 * bound_general(l, s).value, "general bound at t = 0");
    }
    GraphModel g = path_graph(3, 1.0);
    const double graph = bound_graph_lsi(g).value;
    c.near(graph, (1.0 + std::exp(-2.0)) / (2.0 * std::log(std::exp(2.0) + 1.0) + 28.0), 1e-15, "graph bound formula");
    c.near(graph, 0.03520, 5e-6, "graph bound at beta = 1");
    c.near(bound_fermion_lsi(0.5, 2.0, 1.0).value, 0.03125, 1e-9, "fermion bound");
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline void bracket_case(Checker& c, const SemigroupAnalysis& a, const BoundReport& lower, const std::string& what,
                         std::ostream* log) {
    LsiOptions opt;
    opt.restarts = 48;
    const auto est = estimate_lsi(WeightedContext(a.fixed_point), a.generator, opt);
    c.le(lower.value, est.alpha_upper + 1e-6, what + " lower <= estimate");
    c.le(est.alpha_upper, a.gap + 1e-6, what + " estimate <= gap");
    if (log) *log << "    " << what << ": [" << lower.value << ", " << est.alpha_upper << "] gap " << a.gap << '\n';
}

inline std::string bracket_closure(std::ostream* log) {
    Checker c;
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto a = thermal_qubit(beta);
        bracket_case(c, a, bound_general(a.gap, a.fixed_point), "qubit beta=" + std::to_string(beta).substr(0, 3), log);
    }
    const auto p = build_product(product_factors(2));
    bracket_case(c, analyze(p.assembled), bound_product_lsi(p), "product K=2", log);
    const GraphModel g = path_graph(2, 1.0);
    bracket_case(c, analyze(graph_davies(g).assembled), bound_graph_lsi(g), "graph N=2", log);
    const auto f = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    bracket_case(c, analyze(f.generator), bound_fermion_lsi(f), "fermion N=1", log);
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string hypercontractivity() {
    Checker c;
    long evaluations = 0;
    const std::vector<double> times{0.1, 0.5, 1.0, 5.0};
    auto check = [&](const SemigroupAnalysis& a, const BoundReport& lower, const std::string& what) {
        if (a.generator.dim() > 8) return;
        const auto r = verify_hypercontractivity(WeightedContext(a.fixed_point), a.generator, lower.value, times, 200);
        c.le(r.max_violation, 1e-9, what);
        c.truth(r.skipped_times.empty(), what + " all times evaluated");
        evaluations += r.evaluations;
    };
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto a = thermal_qubit(beta);
        check(a, bound_general(a.gap, a.fixed_point), "qubit");
    }
    for (int n = 1; n <= 3; ++n) {
        const GraphModel g = path_graph(n, 1.0);
        check(analyze(graph_davies(g).assembled), bound_graph_lsi(g), "graph N=" + std::to_string(n));
    }
    for (int k = 1; k <= 3; ++k) {
        const auto p = build_product(product_factors(k));
        check(analyze(p.assembled), bound_product_lsi(p), "product K=" + std::to_string(k));
    }
    for (const auto& f : {canonical_generator({2.0}, {1.0}, {1.0}, 1.0), canonical_generator({1.0, 2.0}, {0.8, 0.5}, {0.8, 0.5}, 1.3)})
        check(analyze(f.generator), bound_fermion_lsi(f), "fermion");
    if (!c.ok()) throw BoundViolated(c.summary());
    return std::to_string(evaluations) + " evaluations";
}

inline std::string block_norms() {
    Checker c;
    const auto p = build_product(product_factors(2));
    const double s = max_inverse_norm(p);
    const double cp = product_block_norm_constant(2, s);
    const WeightedContext ctx(p.fixed_point);
    std::mt19937_64 rng(505);
    std::normal_distribution<double> gauss;
    for (const auto& blk : excitation_blocks(p))
        for (int k = 0; k < 500; ++k) {
            Matrix f = Matrix::Zero(4, 4);
            for (const auto& phi : blk.basis) f += cplx(gauss(rng), gauss(rng)) * phi;
            c.le(lp_norm(ctx, f, 4.0), std::pow(cp, blk.n) * lp_norm(ctx, f, 2.0) * (1 + 1e-12), "product block");
        }
    const auto g = canonical_generator({1.0, 2.0}, {0.8, 0.5}, {0.8, 0.5}, 1.3);
    const auto basis = mode_basis(g);
    for (int n = 0; n <= 4; ++n)
        c.le(fermion_block_norm_check(g, basis, n, 500),
             std::pow(2.0, 8 * n) * std::exp(n * g.beta * g.max_frequency()) * (1 + 1e-12), "fermion block");

    // M_4 = 2 at t = log(2C)/Lambda dominates the maximized 2 -> 4 norm
    auto pipeline = [&](const SemigroupAnalysis& a, double constant, double lambda, const std::string& what) {
        const double t = std::log(2.0 * constant) / lambda;
        c.near(block_norm_bound(constant, lambda, t), 2.0, 1e-12, what + " M4");
        const auto est = norm_2_to_q(WeightedContext(a.fixed_point), evolve(a, t), 4.0);
        c.le(est.lower, 2.0 + 1e-6, what + " 2->4 norm");
    };
    pipeline(analyze(p.assembled), cp, p.gap, "product");
    const auto f1 = canonical_generator({2.0}, {1.0}, {1.0}, 1.0);
    pipeline(analyze(f1.generator), fermion_block_constant(f1.beta, f1.max_frequency()), f1.min_mode_gap(), "fermion");
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string q_form_rules() {
    Checker c;
    const double beta = 1.0, nu = 2.0, x = beta * nu / 2.0;
    const auto g1 = canonical_generator({nu}, {1.0}, {1.0}, beta);
    const Matrix f11 = mode_operator(g1, 0, 1, 1);
    c.near(q_form(WeightedContext(g1.gibbs), f11, f11, f11, f11).value.real(), std::cosh(3 * x) / std::cosh(x), 1e-10,
           "cosh ratio");
    for (const auto& g : {g1, canonical_generator({1.0, 2.0}, {0.8, 0.5}, {0.8, 0.5}, 1.3),
                          canonical_generator({0.0, 1.4}, {0.4, 0.6}, {0.9, 0.6}, 0.9)}) {
        const auto basis = mode_basis(g);
        for (int n = 0; n <= 2; ++n) {
            const auto r = fermion_q_bound_check(g, basis, n);
            c.le(r.max_off_rule, 1e-12, "XOR rule");
            c.le(r.max_q, r.bound * (1 + 1e-10), "fermion Q ceiling");
        }
    }
    const auto pq = product_q_check(build_product(product_factors(2)), 2);
    c.le(pq.max_isolated, 1e-12, "product single excitation");
    c.le(pq.max_ratio, 1.0 + 1e-10, "product Q ceiling");
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string mixing_and_preparation() {
    Checker c;
    const GraphModel g = path_graph(3, 1.0);
    const auto a = analyze(graph_davies(g).assembled);
    const double alpha = bound_graph_lsi(g).value;
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.25 * i);
    for (const Matrix& rho0 : {ket_bra(8, 7, 7), ket_bra(8, 0, 0), Matrix(identity(8) / 8.0)}) {
        const auto dist = decay_curve(a, rho0, times);
        for (std::size_t i = 0; i < times.size(); ++i)
            c.le(dist[i], mixing_bound_lsi(a.fixed_point, alpha, times[i]) * (1 + 1e-12), "decay below mixing bound");
    }
    const double eps = 0.1;
    const auto pt = prep_time(3, eps);
    GraphModel cold = path_graph(3, pt.beta_required);
    const Superoperator lc = graph_generator_computational(cold, graph_davies(cold));
    const Matrix u = graph_unitary(cold);
    const Matrix target = u * ket_bra(8, 0, 0) * u.adjoint();
    const Matrix rho_t = evolve(lc, pt.t_epsilon).adjoint().apply(identity(8) / 8.0);
    c.le(trace_norm(rho_t - target), eps, "prepared state within epsilon");
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string derivative_identity() {
    Checker c;
    const auto a = thermal_qubit(1.0);
    const WeightedContext ctx(a.fixed_point);
    const double alpha = 0.3;
    std::mt19937_64 rng(74);
    for (int k = 0; k < 50; ++k) {
        const auto f = random_psd(2, rng, 1 + k % 2);
        const double analytic = norm_derivative_at_zero(ctx, a.generator, f, 2.0, 2.0 * alpha);
        const double fd = norm_derivative_fd(ctx, a.generator, f, alpha, 1e-5);
        c.le(std::abs(analytic - fd), 1e-4 * std::max(std::abs(fd), 1e-3), "derivative");
    }
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

inline std::string n_independence(std::ostream* log) {
    Checker c;
    const auto factor = thermal_qubit(1.0);
    std::vector<double> values;
    for (int n = 1; n <= 3; ++n)
        values.push_back(bound_product_lsi(build_product(std::vector<SemigroupAnalysis>(static_cast<std::size_t>(n), factor))).value);
    c.truth(values[0] == values[1] && values[1] == values[2], "bound constant in N");
    const auto p = build_product({factor, factor});
    LsiOptions opt;
    opt.restarts = 48;
    const auto est = estimate_lsi(WeightedContext(p.fixed_point), p.assembled, opt);
    c.le(values[0], est.alpha_upper + 1e-6, "estimate at N=2 respects the bound");
    if (log) *log << "    N-independent bound " << values[0] << ", estimate at N=2 " << est.alpha_upper << '\n';
    if (!c.ok()) throw BoundViolated(c.summary());
    return c.summary();
}

} // namespace selftest_detail

// Runs criteria 1–10. Each line reads "PASS <id> <name> (<detail>, <seconds>s)".
inline std::vector<CriterionResult> run_selftest(std::ostream& out, std::ostream* log = nullptr) {
    using namespace selftest_detail;
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
        {"detailed-balance", detailed_balance},
        {"eigen-operators", eigen_operators},
        {"bound-arithmetic", bound_arithmetic},
        {"bracket-closure", [log] { return bracket_closure(log); }},
        {"hypercontractivity", hypercontractivity},
        {"block-norms", block_norms},
        {"q-form", q_form_rules},
        {"mixing-preparation", mixing_and_preparation},
        {"derivative-identity", derivative_identity},
        {"n-independence", [log] { return n_independence(log); }},
    };
    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        CriterionResult r{static_cast<int>(i + 1), criteria[i].first, false, "", 0.0};
        const auto start = std::chrono::steady_clock::now();
        try {
            r.detail = criteria[i].second();
            r.pass = true;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
        out << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.name << " (" << r.detail << ", " << secs << "s)" << std::endl;
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace lsq
