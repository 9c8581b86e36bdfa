#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lsq/lsq.hpp"

namespace {

constexpr int kExitModelError = 2;
constexpr int kExitInvariant = 3;

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(lsq::parse_number(cell.substr(cell.find_first_not_of(" \t"))));
    }
    return out;
}

// Writes to a temporary sibling and renames, so a failed run never leaves a partial file.
template <class Emit>
void write_output(const std::string& path, Emit&& emit) {
    if (path.empty() || path == "-") {
        emit(std::cout);
        return;
    }
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw lsq::ConfigError("cannot write " + path);
        emit(out);
        if (!out) throw lsq::ConfigError("write failed for " + path);
    }
    std::filesystem::rename(tmp, target);
}

YAML::Node load_yaml(const std::string& path) {
    try {
        return YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw lsq::ConfigError("cannot read config " + path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lsq: log-Sobolev analysis of quantum Markov semigroups"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lsq::kVersion));

    std::string config, out, param, values, table, x;
    std::vector<std::string> ys;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run one experiment and write its CSV table");
    run->add_option("--config", config, "YAML experiment config")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out, "Output CSV path (default: config output, else stdout)");

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per parameter value");
    sweep->add_option("--config", config, "YAML experiment config")->required();
    sweep->add_option("--param", param, "Parameter name or dotted path")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--seed", seed, "Base seed; row i uses seed + i");
    sweep->add_option("--out", out, "Output CSV path (default: config output, else stdout)");

    auto* plot = app.add_subcommand("plotdata", "Extract whitespace-separated columns from a CSV table");
    plot->add_option("--table", table, "CSV table written by run or sweep")->required();
    plot->add_option("--x", x, "Abscissa column")->required();
    plot->add_option("--y", ys, "Ordinate columns")->required()->delimiter(',');
    plot->add_option("--out", out, "Output path (default: stdout)");

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
    bool verbose = false;
    selftest->add_flag("-v,--verbose", verbose, "Print bracket details");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = lsq::load_config(config);
            if (seed) cfg.seed = *seed;
            if (seed) cfg.source["seed"] = *seed;
            const auto result = lsq::run(cfg);
            write_output(out.empty() ? cfg.output : out, [&](std::ostream& os) { lsq::write_csv(result, os); });
        } else if (sweep->parsed()) {
            const YAML::Node root = load_yaml(config);
            const auto result = lsq::sweep(root, param, parse_values(values), std::filesystem::path(config).parent_path(), seed);
            const std::string dest = out.empty() ? lsq::parse_config(root, std::filesystem::path(config).parent_path()).output : out;
            write_output(dest, [&](std::ostream& os) { lsq::write_csv(result, os); });
        } else if (plot->parsed()) {
            const auto t = lsq::read_csv_file(table);
            std::ostringstream buffer;
            lsq::emit_plotdata(t, x, ys, buffer);
            write_output(out, [&](std::ostream& os) { os << buffer.str(); });
        } else if (selftest->parsed()) {
            const auto results = lsq::run_selftest(std::cout, verbose ? &std::cerr : nullptr);
            for (const auto& r : results)
                if (!r.pass) return kExitInvariant;
        }
    } catch (const lsq::InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const lsq::ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModelError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModelError;
    }
    return 0;
}
