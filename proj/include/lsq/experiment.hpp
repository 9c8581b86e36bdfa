// experiment.hpp — YAML experiment configs, run/sweep orchestration, CSV and plot-data emission

#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lsq/fermion.hpp"
#include "lsq/parallel.hpp"
#include "lsq/product_graph.hpp"

#ifndef LSQ_VERSION
#define LSQ_VERSION "0.1.0"
#endif

namespace lsq {

inline constexpr const char* kVersion = LSQ_VERSION;

// ---- number formatting --------------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

inline double parse_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    if (first < last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        if (std::string(first, last) == "inf") return std::numeric_limits<double>::infinity();
        if (std::string(first, last) == "-inf") return -std::numeric_limits<double>::infinity();
        if (std::string(first, last) == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw ConfigError("not a number: '" + s + "'");
    }
    return v;
}

// ---- result table ---------------------------------------------------------------------------

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;  // emitted in order
    std::map<std::string, std::string> tags;                   // column -> what it instantiates

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw UnknownColumn("unknown column '" + name + "'");
    }
    std::vector<double> column(const std::string& name) const {
        const auto i = column_index(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
    }
    std::optional<std::string> meta(const std::string& key) const {
        for (const auto& [k, v] : metadata)
            if (k == key) return v;
        return std::nullopt;
    }
};

inline void write_csv(const ResultTable& t, std::ostream& os) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << '\n';
    for (const auto& c : t.columns)
        if (auto it = t.tags.find(c); it != t.tags.end()) os << "# tag." << c << ": " << it->second << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << '\n';
    }
}

inline ResultTable read_csv(std::istream& is) {
    ResultTable t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
            if (key.rfind("tag.", 0) == 0) t.tags[key.substr(4)] = value;
            else t.metadata.emplace_back(key, value);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header) {
            t.columns = cells;
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(t.columns.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_number(c));
        t.rows.push_back(std::move(row));
    }
    if (!header) throw ConfigError("csv has no header line");
    return t;
}

inline ResultTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table " + path);
    return read_csv(in);
}

// Whitespace-separated columns x, y... with a '#' header naming each series.
inline void emit_plotdata(const ResultTable& t, const std::string& x, const std::vector<std::string>& ys, std::ostream& os) {
    std::vector<std::size_t> idx{t.column_index(x)};
    for (const auto& y : ys) idx.push_back(t.column_index(y));
    os << "#";
    for (auto i : idx) os << ' ' << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < idx.size(); ++j) os << (j ? " " : "") << format_number(r[idx[j]]);
        os << '\n';
    }
}

// ---- configuration --------------------------------------------------------------------------

enum class ModelKind { lindblad, davies, graphstate, fermion, product };

inline std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::lindblad: return "lindblad";
    case ModelKind::davies: return "davies";
    case ModelKind::graphstate: return "graphstate";
    case ModelKind::fermion: return "fermion";
    case ModelKind::product: return "product";
    }
    return "?";
}

struct AnalysisFlags {
    bool estimate_lsi = false;
    bool verify_hc = false;
    bool bounds = true;
    bool decay = false;
    bool prep_time = false;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> hc_times{0.1, 0.5, 1.0, 5.0};
    int hc_samples = 200;
    int lsi_restarts = 64;
    double epsilon = 0.1;
};

struct LindbladConfig {
    LindbladSpec spec;
    std::optional<Matrix> initial_state;
};

struct DaviesConfig {
    DaviesModel model;
    std::optional<Matrix> initial_state;
};

struct ProductConfig {
    int sites = 1;
    DaviesModel factor;
};

using ModelConfig = std::variant<LindbladConfig, DaviesConfig, GraphModel, FermionModel, ProductConfig>;

struct ExperimentConfig {
    ModelKind kind = ModelKind::davies;
    ModelConfig model;
    AnalysisFlags analysis;
    std::uint64_t seed = 0;
    std::string output;
    YAML::Node source;  // validated document, echoed into result metadata
};

namespace config_detail {

inline void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

inline const YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& where) {
    const YAML::Node v = node[key];
    if (!v) throw ConfigError(where + ": missing key '" + key + "'");
    return v;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": invalid value");
    }
}

template <class T>
T get_or(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
    const YAML::Node v = node[key];
    return v ? scalar<T>(v, where + "." + key) : fallback;
}

inline std::vector<double> number_list(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence()) throw ConfigError(where + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : node) out.push_back(scalar<double>(x, where));
    return out;
}

inline cplx complex_entry(const YAML::Node& node, const std::string& where) {
    if (node.IsSequence()) {
        if (node.size() != 2) throw ConfigError(where + ": complex entries are [re, im]");
        return {scalar<double>(node[0], where), scalar<double>(node[1], where)};
    }
    return {scalar<double>(node, where), 0.0};
}

// A matrix is a list of rows, each entry a number or [re, im]; "I", "X", "Y", "Z" name Paulis.
inline Matrix matrix(const YAML::Node& node, const std::string& where) {
    if (node.IsScalar()) {
        const auto name = node.as<std::string>();
        if (name == "I") return identity(2);
        if (name == "X") return pauli_x();
        if (name == "Y") return pauli_y();
        if (name == "Z") return pauli_z();
        throw ConfigError(where + ": unknown operator name '" + name + "'");
    }
    if (!node.IsSequence() || node.size() == 0) throw ConfigError(where + ": expected a non-empty list of rows");
    const auto n = static_cast<Eigen::Index>(node.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const YAML::Node row = node[static_cast<std::size_t>(i)];
        if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(where + ": matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = complex_entry(row[static_cast<std::size_t>(j)], where);
    }
    return m;
}

inline HermitianOperator hermitian(const YAML::Node& node, const std::string& where) {
    const Matrix m = matrix(node, where);
    if (!is_hermitian(m, kHermitianTol)) throw ConfigError(where + ": matrix is not Hermitian");
    return HermitianOperator(m);
}

inline std::vector<Matrix> matrix_list(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence()) throw ConfigError(where + ": expected a list of matrices");
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(matrix(node[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline double nonnegative(double v, const std::string& where) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(where + " must be finite and >= 0");
    return v;
}

inline BathSpectralDensity bath(const YAML::Node& node, const std::string& where) {
    check_keys(node, where, {"type", "beta", "gamma0"});
    const auto type = get_or<std::string>(node, "type", "flat", where);
    const double beta = nonnegative(scalar<double>(require(node, "beta", where), where + ".beta"), where + ".beta");
    const double g0 = get_or<double>(node, "gamma0", 1.0, where);
    if (!(g0 > 0.0)) throw ConfigError(where + ".gamma0 must be > 0");
    if (type == "flat") return BathSpectralDensity::flat(beta, g0);
    if (type == "ohmic") return BathSpectralDensity::ohmic(beta, g0);
    throw ConfigError(where + ".type must be 'flat' or 'ohmic'");
}

inline void check_dims(const std::vector<Matrix>& ops, Eigen::Index d, const std::string& where) {
    for (const auto& m : ops)
        if (m.rows() != d) throw ConfigError(where + ": operator dimension differs from the Hamiltonian");
}

inline std::optional<Matrix> initial_state(const YAML::Node& node, Eigen::Index d, const std::string& where) {
    if (!node) return std::nullopt;
    Matrix rho = matrix(node, where);
    if (rho.rows() != d) throw ConfigError(where + ": dimension differs from the Hamiltonian");
    return rho;
}

inline DaviesModel davies_model(const YAML::Node& node, const std::string& where, std::set<std::string> extra = {}) {
    std::set<std::string> keys{"hamiltonian", "couplings", "bath"};
    keys.insert(extra.begin(), extra.end());
    check_keys(node, where, keys);
    DaviesModel m{hermitian(require(node, "hamiltonian", where), where + ".hamiltonian"), {},
                  bath(require(node, "bath", where), where + ".bath"), std::nullopt};
    const YAML::Node cs = require(node, "couplings", where);
    if (!cs.IsSequence() || cs.size() == 0) throw ConfigError(where + ".couplings: expected a non-empty list");
    for (std::size_t i = 0; i < cs.size(); ++i)
        m.couplings.push_back(hermitian(cs[i], where + ".couplings[" + std::to_string(i) + "]"));
    for (const auto& s : m.couplings)
        if (s.dim() != m.hamiltonian.dim()) throw ConfigError(where + ".couplings: dimension differs from the Hamiltonian");
    return m;
}

inline AnalysisFlags analysis(const YAML::Node& node) {
    AnalysisFlags a;
    if (!node) return a;
    check_keys(node, "analysis", {"estimate_lsi", "verify_hc", "bounds", "decay", "prep_time", "times", "hc_times",
                                  "hc_samples", "lsi_restarts", "epsilon"});
    a.estimate_lsi = get_or(node, "estimate_lsi", a.estimate_lsi, "analysis");
    a.verify_hc = get_or(node, "verify_hc", a.verify_hc, "analysis");
    a.bounds = get_or(node, "bounds", a.bounds, "analysis");
    a.decay = get_or(node, "decay", a.decay, "analysis");
    a.prep_time = get_or(node, "prep_time", a.prep_time, "analysis");
    if (node["times"]) a.times = number_list(node["times"], "analysis.times");
    if (node["hc_times"]) a.hc_times = number_list(node["hc_times"], "analysis.hc_times");
    for (double t : a.times) nonnegative(t, "analysis.times entries");
    for (double t : a.hc_times) nonnegative(t, "analysis.hc_times entries");
    a.hc_samples = get_or(node, "hc_samples", a.hc_samples, "analysis");
    a.lsi_restarts = get_or(node, "lsi_restarts", a.lsi_restarts, "analysis");
    a.epsilon = get_or(node, "epsilon", a.epsilon, "analysis");
    if (a.hc_samples < 0 || a.lsi_restarts < 1) throw ConfigError("analysis: hc_samples must be >= 0 and lsi_restarts >= 1");
    if (!(a.epsilon > 0.0 && a.epsilon < 1.0)) throw ConfigError("analysis.epsilon must lie in (0, 1)");
    return a;
}

} // namespace config_detail

// Validates the whole document; relative edge-list paths resolve against base_dir.
inline ExperimentConfig parse_config(const YAML::Node& root, const std::filesystem::path& base_dir = ".") {
    using namespace config_detail;
    check_keys(root, "config", {"kind", "seed", "output", "model", "analysis"});
    ExperimentConfig cfg;
    const auto kind = scalar<std::string>(require(root, "kind", "config"), "config.kind");
    const YAML::Node model = require(root, "model", "config");
    cfg.seed = get_or<std::uint64_t>(root, "seed", 0, "config");
    cfg.output = get_or<std::string>(root, "output", "", "config");
    cfg.analysis = analysis(root["analysis"]);
    cfg.source = YAML::Clone(root);

    if (kind == "lindblad") {
        cfg.kind = ModelKind::lindblad;
        check_keys(model, "model", {"hamiltonian", "lindblad_ops", "initial_state"});
        LindbladConfig lc{{hermitian(require(model, "hamiltonian", "model"), "model.hamiltonian"),
                           matrix_list(require(model, "lindblad_ops", "model"), "model.lindblad_ops")},
                          std::nullopt};
        check_dims(lc.spec.lindblad_ops, lc.spec.hamiltonian.dim(), "model.lindblad_ops");
        lc.initial_state = initial_state(model["initial_state"], lc.spec.hamiltonian.dim(), "model.initial_state");
        cfg.model = std::move(lc);
    } else if (kind == "davies") {
        cfg.kind = ModelKind::davies;
        DaviesConfig dc{davies_model(model, "model", {"initial_state"}), std::nullopt};
        dc.initial_state = initial_state(model["initial_state"], dc.model.hamiltonian.dim(), "model.initial_state");
        cfg.model = std::move(dc);
    } else if (kind == "graphstate") {
        cfg.kind = ModelKind::graphstate;
        check_keys(model, "model", {"vertices", "edges", "edge_file", "beta", "g2"});
        GraphModel g;
        g.vertices = scalar<int>(require(model, "vertices", "model"), "model.vertices");
        g.beta = nonnegative(scalar<double>(require(model, "beta", "model"), "model.beta"), "model.beta");
        g.g2 = get_or(model, "g2", 1.0, "model");
        if (model["edges"] && model["edge_file"]) throw ConfigError("model: give either edges or edge_file, not both");
        if (model["edges"]) {
            if (!model["edges"].IsSequence()) throw ConfigError("model.edges: expected a list of [u, v] pairs");
            for (const auto& e : model["edges"]) {
                if (!e.IsSequence() || e.size() != 2) throw ConfigError("model.edges: expected [u, v] pairs");
                g.edges.emplace_back(scalar<int>(e[0], "model.edges"), scalar<int>(e[1], "model.edges"));
            }
        }
        if (model["edge_file"]) {
            std::filesystem::path p = scalar<std::string>(model["edge_file"], "model.edge_file");
            if (p.is_relative()) p = base_dir / p;
            g.edges = read_edge_list(p.string());
        }
        validate_graph(g, kGraphHamiltonianCap);
        cfg.model = g;
    } else if (kind == "fermion") {
        cfg.kind = ModelKind::fermion;
        check_keys(model, "model", {"frequencies", "couplings", "bath"});
        FermionModel fm{number_list(require(model, "frequencies", "model"), "model.frequencies"), Matrix(),
                        bath(require(model, "bath", "model"), "model.bath")};
        const YAML::Node cs = require(model, "couplings", "model");
        if (!cs.IsSequence() || cs.size() == 0) throw ConfigError("model.couplings: expected a list of rows, one per bath coupling");
        fm.couplings = Matrix::Zero(static_cast<Eigen::Index>(cs.size()), static_cast<Eigen::Index>(fm.frequencies.size()));
        for (std::size_t a = 0; a < cs.size(); ++a) {
            if (!cs[a].IsSequence() || cs[a].size() != fm.frequencies.size())
                throw ConfigError("model.couplings: each row needs one entry per mode");
            for (std::size_t k = 0; k < fm.frequencies.size(); ++k)
                fm.couplings(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) = complex_entry(cs[a][k], "model.couplings");
        }
        for (double nu : fm.frequencies) nonnegative(nu, "model.frequencies entries");
        if (fm.frequencies.empty() || fm.frequencies.size() > static_cast<std::size_t>(kFermionSuperoperatorCap))
            throw ConfigError("model.frequencies: need 1 to " + std::to_string(kFermionSuperoperatorCap) + " modes");
        cfg.model = std::move(fm);
    } else if (kind == "product") {
        cfg.kind = ModelKind::product;
        check_keys(model, "model", {"sites", "factor"});
        ProductConfig pc{scalar<int>(require(model, "sites", "model"), "model.sites"),
                         davies_model(require(model, "factor", "model"), "model.factor")};
        if (pc.sites < 1) throw ConfigError("model.sites must be >= 1");
        cfg.model = std::move(pc);
    } else {
        throw ConfigError("config.kind must be one of lindblad, davies, graphstate, fermion, product");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("cannot read config " + path + ": " + e.what());
    }
    return parse_config(root, std::filesystem::path(path).parent_path());
}

// ---- running ---------------------------------------------------------------------------------

namespace run_detail {

// The semigroup under study together with its certified lower bound.
struct Prepared {
    std::optional<SemigroupAnalysis> analysis;
    std::optional<BoundReport> lower;
    std::optional<Matrix> initial_state;
    std::optional<PrepTime> prep;
    double spectral_gap = 0.0;
};

inline Prepared prepare(const ExperimentConfig& cfg) {
    Prepared p;
    const auto& a = cfg.analysis;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LindbladConfig>) {
                p.analysis = analyze(build_lindblad(m.spec));
                p.initial_state = m.initial_state;
                if (a.bounds) p.lower = bound_general(p.analysis->gap, p.analysis->fixed_point);
            } else if constexpr (std::is_same_v<T, DaviesConfig>) {
                p.analysis = build_davies(m.model);
                p.initial_state = m.initial_state;
                if (a.bounds) p.lower = bound_general(p.analysis->gap, p.analysis->fixed_point);
            } else if constexpr (std::is_same_v<T, GraphModel>) {
                const bool needs_superop = a.decay || a.estimate_lsi || a.verify_hc;
                if (needs_superop || m.vertices <= kGraphSuperoperatorCap) {
                    const auto prod = graph_davies(m);
                    p.analysis = analyze(prod.assembled);
                } else {
                    p.spectral_gap = 0.5 * (m.g2 + m.g_minus2());
                }
                if (a.bounds || a.verify_hc) p.lower = bound_graph_lsi(m);
                if (a.prep_time) p.prep = prep_time(m.vertices, a.epsilon, m.g2);
            } else if constexpr (std::is_same_v<T, FermionModel>) {
                const auto g = canonicalize(m);
                p.analysis = analyze(g.generator);
                if (a.bounds || a.verify_hc) p.lower = bound_fermion_lsi(g);
            } else if constexpr (std::is_same_v<T, ProductConfig>) {
                const auto factor = build_davies(m.factor);
                const auto prod = build_product(std::vector<SemigroupAnalysis>(static_cast<std::size_t>(m.sites), factor));
                p.analysis = analyze(prod.assembled);
                if (a.bounds || a.verify_hc) p.lower = bound_product_lsi(prod);
            }
        },
        cfg.model);
    if (p.analysis) p.spectral_gap = p.analysis->gap;
    if ((a.verify_hc || (a.bounds && a.decay)) && !p.lower && p.analysis)
        p.lower = bound_general(p.analysis->gap, p.analysis->fixed_point);
    return p;
}

inline std::string describe_inputs(const BoundReport& r) {
    std::string s = to_string(r.name);
    for (const auto& [k, v] : r.inputs) s += " " + k + "=" + format_number(v);
    return s;
}

inline void set_flow(YAML::Node node) {
    if (node.IsMap() || node.IsSequence()) node.SetStyle(YAML::EmitterStyle::Flow);
    if (node.IsMap())
        for (auto kv : node) set_flow(kv.second);
    if (node.IsSequence())
        for (auto child : node) set_flow(child);
}

// Single-line flow-style YAML of the configuration.
inline std::string echo(const YAML::Node& node) {
    YAML::Node copy = YAML::Clone(node);
    set_flow(copy);
    YAML::Emitter e;
    e << copy;
    std::string s = e.c_str();
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace run_detail

// Runs one experiment. Columns: spectral_gap, alpha_lower / alpha_bracket_upper (bounds),
// alpha_upper (variational), hc_max_violation, beta_required / t_epsilon (preparation), and with
// decay one row per time with t, trace_distance, gap_mixing_bound, lsi_mixing_bound.
inline ResultTable run(const ExperimentConfig& cfg) {
    using namespace run_detail;
    const auto& a = cfg.analysis;
    Prepared p = prepare(cfg);

    ResultTable t;
    t.metadata = {{"lsq", kVersion}, {"kind", to_string(cfg.kind)}, {"seed", std::to_string(cfg.seed)},
                  {"config", echo(cfg.source)}};
    std::vector<std::pair<std::string, double>> scalars;
    scalars.emplace_back("spectral_gap", p.spectral_gap);
    t.tags["spectral_gap"] = "spectral gap of the generator";
    if (p.lower && a.bounds) {
        scalars.emplace_back("alpha_lower", p.lower->value);
        scalars.emplace_back("alpha_bracket_upper", p.lower->bracket.upper);
        t.tags["alpha_lower"] = "lower bound " + to_string(p.lower->name);
        t.tags["alpha_bracket_upper"] = "upper end of the " + to_string(p.lower->name) + " bracket";
        t.metadata.emplace_back("inputs.alpha_lower", describe_inputs(*p.lower));
    }
    if (a.estimate_lsi) {
        if (!p.analysis) throw DimensionCap("estimate_lsi needs the superoperator");
        LsiOptions opt;
        opt.restarts = a.lsi_restarts;
        opt.seed = cfg.seed;
        const auto est = estimate_lsi(WeightedContext(p.analysis->fixed_point), p.analysis->generator, opt);
        scalars.emplace_back("alpha_upper", est.alpha_upper);
        t.tags["alpha_upper"] = "variational upper estimate of the log-Sobolev constant";
        if (p.lower && p.lower->value > est.alpha_upper + 1e-6)
            throw BoundViolated("certified lower bound exceeds the variational estimate");
    }
    if (a.verify_hc) {
        const auto rep = verify_hypercontractivity(WeightedContext(p.analysis->fixed_point), p.analysis->generator,
                                                   p.lower->value, a.hc_times, a.hc_samples, cfg.seed + 1);
        scalars.emplace_back("hc_max_violation", rep.max_violation);
        t.tags["hc_max_violation"] = "hypercontractivity at the certified lower bound";
        if (rep.max_violation > 1e-9) throw BoundViolated("hypercontractivity violated at the certified lower bound");
    }
    if (p.prep) {
        scalars.emplace_back("beta_required", p.prep->beta_required);
        scalars.emplace_back("t_epsilon", p.prep->t_epsilon);
        t.tags["beta_required"] = "inverse temperature for graph-state preparation";
        t.tags["t_epsilon"] = "graph-state preparation time";
    }

    if (!a.decay) {
        for (const auto& [name, v] : scalars) t.columns.push_back(name);
        std::vector<double> row;
        for (const auto& [name, v] : scalars) row.push_back(v);
        t.rows.push_back(std::move(row));
        return t;
    }

    if (!p.analysis) throw DimensionCap("decay needs the superoperator");
    const auto& an = *p.analysis;
    const int d = an.generator.dim();
    Matrix rho0;
    if (p.initial_state) rho0 = *p.initial_state;
    else if (cfg.kind == ModelKind::graphstate) rho0 = ket_bra(d, d - 1, d - 1);
    else rho0 = ket_bra(d, 0, 0);
    const auto dist = decay_curve(an, rho0, a.times);
    t.columns = {"t", "trace_distance", "gap_mixing_bound"};
    t.tags["trace_distance"] = "trace distance to the fixed point";
    t.tags["gap_mixing_bound"] = "mixing bound from the spectral gap";
    if (p.lower) {
        t.columns.push_back("lsi_mixing_bound");
        t.tags["lsi_mixing_bound"] = "mixing bound from the certified log-Sobolev constant";
    }
    for (const auto& [name, v] : scalars) t.columns.push_back(name);
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        const double ti = a.times[i];
        std::vector<double> row{ti, dist[i], mixing_bound_gap(an.fixed_point, an.gap, ti)};
        if (p.lower) {
            row.push_back(mixing_bound_lsi(an.fixed_point, p.lower->value, ti));
            if (dist[i] > row.back() * (1 + 1e-12)) throw BoundViolated("trace distance exceeds the log-Sobolev mixing bound");
        }
        for (const auto& [name, v] : scalars) row.push_back(v);
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- sweeps ----------------------------------------------------------------------------------

namespace sweep_detail {

inline void find_key(const YAML::Node& node, const std::string& key, const std::string& prefix, std::vector<std::string>& hits) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
        const auto k = kv.first.as<std::string>();
        const std::string path = prefix.empty() ? k : prefix + "." + k;
        if (k == key && kv.second.IsScalar()) hits.push_back(path);
        find_key(kv.second, key, path, hits);
    }
}

// A dotted path, or a bare key that occurs exactly once; "N" aliases sites / vertices.
inline std::string resolve(const YAML::Node& root, const std::string& param) {
    std::vector<std::string> hits;
    if (param.find('.') != std::string::npos) {
        YAML::Node cur = YAML::Clone(root);
        std::stringstream ss(param);
        std::string part;
        while (std::getline(ss, part, '.')) {
            if (!cur.IsMap() || !cur[part]) throw ConfigError("sweep: parameter '" + param + "' not in config");
            cur.reset(cur[part]);
        }
        if (!cur.IsScalar()) throw ConfigError("sweep: parameter '" + param + "' is not a scalar");
        return param;
    }
    for (const std::string& key : param == "N" ? std::vector<std::string>{"sites", "vertices"} : std::vector<std::string>{param})
        find_key(root, key, "", hits);
    if (hits.empty()) throw ConfigError("sweep: parameter '" + param + "' not in config");
    if (hits.size() > 1) throw ConfigError("sweep: parameter '" + param + "' is ambiguous, use a dotted path");
    return hits.front();
}

inline void assign(YAML::Node root, const std::string& path, double value) {
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cur.reset(cur[parts[i]]);
    cur[parts.back()] = format_number(value);
}

} // namespace sweep_detail

// One row per value with every other parameter fixed; row i runs with seed + i and without decay.
inline ResultTable sweep(const YAML::Node& root, const std::string& param, const std::vector<double>& values,
                         const std::filesystem::path& base_dir = ".", std::optional<std::uint64_t> seed = std::nullopt) {
    const ExperimentConfig base = parse_config(root, base_dir);
    const std::string path = sweep_detail::resolve(root, param);
    const std::uint64_t seed0 = seed.value_or(base.seed);
    const auto rows = parallel_map<ResultTable>(static_cast<int>(values.size()), [&](int i) {
        YAML::Node doc = YAML::Clone(root);
        sweep_detail::assign(doc, path, values[static_cast<std::size_t>(i)]);
        doc["seed"] = seed0 + static_cast<std::uint64_t>(i);
        if (doc["analysis"]) doc["analysis"]["decay"] = false;
        return run(parse_config(doc, base_dir));
    });
    ResultTable t;
    t.metadata = {{"lsq", kVersion}, {"kind", to_string(base.kind)}, {"seed", std::to_string(seed0)},
                  {"config", run_detail::echo(root)}, {"sweep", path}};
    ExperimentConfig probe = base;
    probe.analysis.decay = false;
    t.columns = {param};
    t.tags[param] = "swept parameter " + path;
    if (rows.empty()) {
        // header from the unswept configuration's scalar columns
        const auto proto = run(probe);
        for (const auto& c : proto.columns) t.columns.push_back(c);
        for (const auto& [k, v] : proto.tags) t.tags[k] = v;
        return t;
    }
    for (const auto& c : rows.front().columns) t.columns.push_back(c);
    for (const auto& [k, v] : rows.front().tags) t.tags[k] = v;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> row{values[i]};
        for (double v : rows[i].rows.front()) row.push_back(v);
        t.rows.push_back(std::move(row));
        if (auto in = rows[i].meta("inputs.alpha_lower")) t.metadata.emplace_back("inputs.alpha_lower." + std::to_string(i), *in);
    }
    return t;
}

// Recomputes a bound from its logged "name key=value ..." inputs.
inline double reevaluate_bound(const std::string& logged) {
    std::stringstream ss(logged);
    std::string name, kv;
    ss >> name;
    std::map<std::string, double> in;
    while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed bound inputs: " + logged);
        in[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1));
    }
    auto at = [&](const char* k) {
        auto it = in.find(k);
        if (it == in.end()) throw ConfigError("bound inputs lack '" + std::string(k) + "'");
        return it->second;
    };
    if (name == to_string(BoundName::general_lower)) return bound_general(at("lambda"), at("sigma_inv_norm")).value;
    if (name == to_string(BoundName::product_lsi)) return bound_product_lsi(at("Lambda"), static_cast<int>(at("d")), at("s")).value;
    if (name == to_string(BoundName::fermion_lsi)) return bound_fermion_lsi(at("Lambda"), at("nu"), at("beta")).value;
    if (name == to_string(BoundName::graph_lsi)) {
        GraphModel g;
        g.beta = at("beta");
        g.g2 = at("G2");
        return bound_graph_lsi(g).value;
    }
    throw ConfigError("cannot re-evaluate bound '" + name + "'");
}

} // namespace lsq
