#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace canex;
using namespace canex::cli;

namespace {

struct Globals {
    std::string config_path;
    std::vector<std::string> assignments;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out_path;
    std::string format = "csv";
};

RunConfig build_config(const Globals& g) {
    RunConfig config;
    if (!g.config_path.empty()) config.load_file(g.config_path);
    for (const auto& a : g.assignments) config.assign(a);
    if (g.seed) {
        config.set("integration.seed", std::to_string(*g.seed));
        config.set("oracle.seed", std::to_string(*g.seed));
    }
    if (g.workers) config.set("integration.workers", std::to_string(*g.workers));
    return config;
}

int emit(const CommandOutput& result, const Globals& g) {
    if (g.out_path.empty()) {
        std::cout << result.body;
        if (!result.summary.empty()) std::cerr << result.summary << "\n";
    } else {
        std::ofstream file(g.out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot write " << g.out_path << "\n";
            return 2;
        }
        file << result.body;
        if (!result.summary.empty()) std::cout << result.summary << "\n";
    }
    return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Canonical cluster expansion toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", g.assignments, "Override a config entry: section.key=value");
    app.add_option("--seed", g.seed, "Seed for every Monte Carlo stage");
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out_path, "Output file (default: standard output)");
    app.add_option("--format", g.format, "csv or records")->check(CLI::IsMember({"csv", "records"}));
    app.fallthrough();

    std::string kind = "connected";
    int n = 4;
    auto* enumerate = app.add_subcommand("enumerate", "List labeled graphs on {1..n} in canonical text form");
    enumerate->add_option("kind", kind, "graphs, connected, two-connected or trees")->required();
    enumerate->add_option("n", n, "Number of vertices")->required();

    auto* coeffs = app.add_subcommand("coeffs", "Expansion coefficients P, B, F per order");
    auto* virial = app.add_subcommand("virial", "Irreducible coefficients, virial coefficients and pressure");
    auto* free_energy = app.add_subcommand("free-energy", "Free-energy density over a density grid");
    auto* kp = app.add_subcommand("kp-check", "Convergence certificate of the configured system");
    std::string suite = "all";
    auto* validate = app.add_subcommand("validate", "Run a validation suite and report PASS/FAIL");
    validate->add_option("suite", suite, "all, cancellation, oracle, kp or limits");

    CLI11_PARSE(app, argc, argv);
    const Format format = g.format == "records" ? Format::records : Format::csv;

    try {
        if (enumerate->parsed()) return emit(cmd_enumerate(kind, n), g);
        const RunConfig config = build_config(g);
        if (coeffs->parsed()) return emit(cmd_coeffs(config, format), g);
        if (virial->parsed()) return emit(cmd_virial(config, format), g);
        if (free_energy->parsed()) return emit(cmd_free_energy(config, format), g);
        if (kp->parsed()) return emit(cmd_kp_check(config, format), g);
        if (validate->parsed()) return emit(cmd_validate(suite, config, format), g);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
