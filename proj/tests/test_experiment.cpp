#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsq/experiment.hpp"

using namespace lsq;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LSQ_CLI_PATH;
const fs::path kConfigs = LSQ_CONFIG_DIR;

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("lsq_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig config_from(const std::string& yaml) { return parse_config(YAML::Load(yaml), kConfigs); }

const char* kFermionYaml = R"(
kind: fermion
model:
  frequencies: [2.0]
  couplings: [[1.0]]
  bath: {type: flat, beta: 1.0}
)";

const char* kGraphYaml = R"(
kind: graphstate
model: {vertices: 3, edges: [[0, 1], [1, 2]], beta: 1.0}
analysis: {bounds: true}
)";

const char* kProductYaml = R"(
kind: product
model:
  sites: 1
  factor: {hamiltonian: Z, couplings: [X], bath: {beta: 1.0}}
)";

} // namespace

TEST(Experiment, NumberFormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-300, 0.0352, 1.0, 12345.678901234567})
        EXPECT_EQ(parse_number(format_number(v)), v);
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_THROW(parse_number("1,5"), ConfigError);
}

TEST(Experiment, UnknownKeysRejected) {
    EXPECT_THROW(config_from("kind: davies\nmodle: {}\n"), ConfigError);
    EXPECT_THROW(config_from(std::string(kFermionYaml) + "analysis: {estimate_lsl: true}\n"), ConfigError);
    EXPECT_THROW(config_from(R"(
kind: graphstate
model: {vertices: 2, beta: 1.0, temperature: 3}
)"),
                 ConfigError);
    EXPECT_THROW(config_from("kind: heisenberg\nmodel: {}\n"), ConfigError);
}

TEST(Experiment, ModelValidation) {
    EXPECT_THROW(config_from(R"(
kind: graphstate
model: {vertices: 2, beta: -1.0}
)"),
                 ConfigError);
    EXPECT_THROW(config_from(R"(
kind: davies
model: {hamiltonian: [[0, 1], [0, 0]], couplings: [X], bath: {beta: 1}}
)"),
                 ConfigError);
    EXPECT_THROW(config_from(R"(
kind: davies
model: {hamiltonian: Z, couplings: [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]], bath: {beta: 1}}
)"),
                 ConfigError);
    EXPECT_THROW(config_from(R"(
kind: graphstate
model: {vertices: 3, edges: [[0, 3]], beta: 1}
)"),
                 IndexError);
    const auto cfg = config_from(R"(
kind: davies
model:
  hamiltonian: [[1, [0, 0.5]], [[0, -0.5], -1]]
  couplings: [X]
  bath: {type: ohmic, beta: 0.5}
)");
    const auto& m = std::get<DaviesConfig>(cfg.model).model;
    EXPECT_EQ(m.hamiltonian.matrix()(0, 1), cplx(0, 0.5));
    EXPECT_EQ(m.bath.beta(), 0.5);
}

TEST(Experiment, EdgeFileResolvesRelativeToConfig) {
    const auto cfg = load_config((kConfigs / "graph_cycle6.yaml").string());
    const auto& g = std::get<GraphModel>(cfg.model);
    EXPECT_EQ(g.vertices, 6);
    EXPECT_EQ(g.edges.size(), 6u);
}

TEST(Experiment, GraphRunMatchesLibrary) {
    const auto cfg = load_config((kConfigs / "graph_path3.yaml").string());
    const auto t = run(cfg);
    const std::vector<std::string> expected{"t", "trace_distance", "gap_mixing_bound", "lsi_mixing_bound", "spectral_gap",
                                            "alpha_lower", "alpha_bracket_upper", "beta_required", "t_epsilon"};
    EXPECT_EQ(t.columns, expected);
    const auto& g = std::get<GraphModel>(cfg.model);
    const auto a = analyze(graph_davies(g).assembled);
    const auto dist = decay_curve(a, ket_bra(8, 7, 7), cfg.analysis.times);
    const double alpha = bound_graph_lsi(g).value;
    const auto prep = prep_time(3, 0.1);
    ASSERT_EQ(t.rows.size(), cfg.analysis.times.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double ti = cfg.analysis.times[i];
        EXPECT_EQ(t.rows[i][0], ti);
        EXPECT_NEAR(t.rows[i][1], dist[i], 1e-12);
        EXPECT_DOUBLE_EQ(t.rows[i][2], mixing_bound_gap(a.fixed_point, a.gap, ti));
        EXPECT_DOUBLE_EQ(t.rows[i][3], mixing_bound_lsi(a.fixed_point, alpha, ti));
        EXPECT_LE(t.rows[i][1], t.rows[i][3]);
        EXPECT_DOUBLE_EQ(t.rows[i][5], alpha);
        EXPECT_DOUBLE_EQ(t.rows[i][7], prep.beta_required);
        EXPECT_DOUBLE_EQ(t.rows[i][8], prep.t_epsilon);
    }
    EXPECT_NEAR(t.rows[0][4], 0.5 * (1 + std::exp(-2.0)), 1e-10);
    for (const auto& col : {"alpha_lower", "lsi_mixing_bound", "gap_mixing_bound", "t_epsilon"}) EXPECT_TRUE(t.tags.count(col)) << col;
}

TEST(Experiment, LargeGraphSkipsSuperoperator) {
    const auto t = run(load_config((kConfigs / "graph_cycle6.yaml").string()));
    ASSERT_EQ(t.rows.size(), 1u);
    GraphModel g;
    g.beta = 2.0;
    EXPECT_DOUBLE_EQ(t.rows[0][t.column_index("alpha_lower")], bound_graph_lsi(g).value);
    EXPECT_DOUBLE_EQ(t.rows[0][t.column_index("spectral_gap")], 0.5 * (1 + std::exp(-4.0)));
    EXPECT_DOUBLE_EQ(t.rows[0][t.column_index("t_epsilon")], prep_time(6, 0.05).t_epsilon);
}

TEST(Experiment, FermionRowCarriesBracket) {
    auto cfg = config_from(std::string(kFermionYaml) + "analysis: {estimate_lsi: true, lsi_restarts: 16}\n");
    const auto t = run(cfg);
    ASSERT_EQ(t.rows.size(), 1u);
    const auto g = canonicalize(std::get<FermionModel>(cfg.model));
    const auto bound = bound_fermion_lsi(g);
    const double lower = t.rows[0][t.column_index("alpha_lower")];
    const double upper = t.rows[0][t.column_index("alpha_bracket_upper")];
    EXPECT_DOUBLE_EQ(lower, bound.value);
    EXPECT_DOUBLE_EQ(upper, g.min_mode_gap());
    EXPECT_NEAR(upper, t.rows[0][t.column_index("spectral_gap")], 1e-9);
    EXPECT_NEAR(lower, upper / 16.0, 1e-15);
    const double est = t.rows[0][t.column_index("alpha_upper")];
    EXPECT_LE(lower, est);
    EXPECT_LE(est, upper + 1e-6);
}

TEST(Experiment, HypercontractivityColumn) {
    const auto t = run(load_config((kConfigs / "fermion_two_modes.yaml").string()));
    EXPECT_LE(t.rows[0][t.column_index("hc_max_violation")], 1e-9);
}

TEST(Experiment, SweepBetaOnGraph) {
    const auto t = sweep(YAML::Load(kGraphYaml), "beta", {0.5, 1.0, 2.0});
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.columns.front(), "beta");
    const auto a = t.column("alpha_lower");
    EXPECT_GT(a[0], a[1]);
    EXPECT_GT(a[1], a[2]);
    for (std::size_t i = 0; i < 3; ++i) {
        GraphModel g;
        g.beta = t.rows[i][0];
        EXPECT_DOUBLE_EQ(a[i], bound_graph_lsi(g).value);
    }
    EXPECT_EQ(t.meta("sweep"), "model.beta");
}

TEST(Experiment, SweepProductSitesIsConstant) {
    for (const std::string param : {"N", "sites", "model.sites"}) {
        const auto t = sweep(YAML::Load(kProductYaml), param, {1, 2, 3});
        const auto a = t.column("alpha_lower");
        ASSERT_EQ(a.size(), 3u);
        EXPECT_EQ(a[0], a[1]);
        EXPECT_EQ(a[1], a[2]);
    }
}

TEST(Experiment, SweepParameterResolution) {
    EXPECT_THROW(sweep(YAML::Load(kProductYaml), "gamma", {1}), ConfigError);
    EXPECT_THROW(sweep(YAML::Load(kProductYaml), "model.factor.bath.temperature", {1}), ConfigError);
    const auto t = sweep(YAML::Load(kProductYaml), "model.factor.bath.beta", {0.5, 2.0});
    EXPECT_GT(t.rows[0][t.column_index("alpha_lower")], t.rows[1][t.column_index("alpha_lower")]);
    // a swept value that breaks validation is a config error
    EXPECT_THROW(sweep(YAML::Load(kGraphYaml), "beta", {1.0, -1.0}), ConfigError);
}

TEST(Experiment, EmptySweep) {
    const auto t = sweep(YAML::Load(kGraphYaml), "beta", {});
    EXPECT_TRUE(t.rows.empty());
    EXPECT_EQ(t.columns.front(), "beta");
    EXPECT_NO_THROW(t.column_index("alpha_lower"));
}

TEST(Experiment, CsvRoundTrip) {
    const auto t = run(load_config((kConfigs / "graph_path3.yaml").string()));
    std::stringstream ss;
    write_csv(t, ss);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.tags, t.tags);
    EXPECT_EQ(back.meta("kind"), "graphstate");
    EXPECT_EQ(back.meta("lsq"), std::string(kVersion));
    ASSERT_TRUE(back.meta("config"));
    EXPECT_NO_THROW(parse_config(YAML::Load(*back.meta("config")), kConfigs));
}

TEST(Experiment, PlotData) {
    const auto t = run(load_config((kConfigs / "graph_path3.yaml").string()));
    std::stringstream ss;
    emit_plotdata(t, "t", {"trace_distance", "lsi_mixing_bound"}, ss);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "# t trace_distance lsi_mixing_bound");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(ss, line)) {
        std::istringstream ls(line);
        double x = 0, y1 = 0, y2 = 0;
        ls >> x >> y1 >> y2;
        EXPECT_NEAR(x, t.rows[lines][0], 1e-12);
        EXPECT_NEAR(y1, t.rows[lines][1], 1e-12 * std::max(1.0, std::abs(y1)));
        EXPECT_NEAR(y2, t.rows[lines][3], 1e-12 * std::max(1.0, std::abs(y2)));
        ++lines;
    }
    EXPECT_EQ(lines, t.rows.size());

    ResultTable one{{"a", "b"}, {{1.0, 2.0}}, {}, {}};
    std::stringstream s1;
    emit_plotdata(one, "a", {"b"}, s1);
    EXPECT_EQ(s1.str(), "# a b\n1 2\n");
    EXPECT_THROW(emit_plotdata(one, "a", {"c"}, s1), UnknownColumn);
}

TEST(Experiment, LoggedInputsReproduceBounds) {
    const std::vector<std::string> configs{"graph_path3.yaml", "graph_cycle6.yaml", "fermion_single.yaml",
                                           "fermion_two_modes.yaml", "product_qubits.yaml", "lindblad_amplitude_damping.yaml"};
    for (const auto& name : configs) {
        auto cfg = load_config((kConfigs / name).string());
        cfg.analysis.estimate_lsi = false;
        std::stringstream ss;
        write_csv(run(cfg), ss);
        const auto t = read_csv(ss);
        const auto logged = t.meta("inputs.alpha_lower");
        ASSERT_TRUE(logged) << name;
        const double v = reevaluate_bound(*logged);
        for (double x : t.column("alpha_lower")) EXPECT_NEAR(x, v, 1e-12) << name;
    }
}

TEST(Experiment, CliRunIsBitIdentical) {
    const fs::path a = scratch() / "a.csv", b = scratch() / "b.csv";
    const std::string cfg = (kConfigs / "qubit_davies.yaml").string();
    ASSERT_EQ(cli("run --config " + cfg + " --out " + a.string()), 0);
    ASSERT_EQ(cli("run --config " + cfg + " --out " + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    ASSERT_EQ(cli("run --config " + cfg + " --seed 8 --out " + b.string()), 0);
    EXPECT_NE(slurp(a), slurp(b));
    EXPECT_NE(slurp(b).find("# seed: 8"), std::string::npos);
}

TEST(Experiment, CliConfigErrorExitsTwoWithoutOutput) {
    const fs::path cfg = write_file("neg_beta.yaml", "kind: graphstate\nmodel: {vertices: 2, beta: -1}\n");
    const fs::path out = scratch() / "neg.csv";
    EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_EQ(cli("run --config " + (scratch() / "missing.yaml").string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Experiment, CliSweepAndPlotData) {
    const fs::path cfg = write_file("graph.yaml", kGraphYaml);
    const fs::path table = scratch() / "sweep.csv", plot = scratch() / "sweep.dat", empty = scratch() / "empty.csv";
    ASSERT_EQ(cli("sweep --config " + cfg.string() + " --param beta --values 0.5,1,2 --out " + table.string()), 0);
    const auto t = read_csv_file(table.string());
    EXPECT_EQ(t.rows.size(), 3u);
    ASSERT_EQ(cli("plotdata --table " + table.string() + " --x beta --y alpha_lower --out " + plot.string()), 0);
    EXPECT_EQ(slurp(plot).substr(0, 20), "# beta alpha_lower\n0");
    EXPECT_EQ(cli("plotdata --table " + table.string() + " --x beta --y nonexistent --out " + (scratch() / "x.dat").string()), 2);
    EXPECT_FALSE(fs::exists(scratch() / "x.dat"));
    ASSERT_EQ(cli("sweep --config " + cfg.string() + " --param beta --values '' --out " + empty.string()), 0);
    EXPECT_TRUE(read_csv_file(empty.string()).rows.empty());
    EXPECT_EQ(cli("sweep --config " + cfg.string() + " --param nope --values 1 --out " + empty.string()), 2);
}
