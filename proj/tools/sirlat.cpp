#include <cstdint>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "sirlat/config.hpp"
#include "sirlat/experiments.hpp"

using namespace sirlat;

namespace {

const std::set<std::string> kCommands{"solve", "shape", "simulate", "det", "montecarlo", "paths",
                                      "percolation-check", "validate"};

// Applies [command] of the config file to cfg; sections must name commands.
template <class Cfg>
Cfg load_section(const std::string& path, const std::string& command)
{
    Cfg cfg;
    if (path.empty()) {
        return cfg;
    }
    const Config file = Config::load(path);
    for (const auto& name : file.section_names()) {
        if (!kCommands.count(name)) {
            const std::string where = path + ":" + std::to_string(file.section_line(name));
            if (name.empty()) {
                throw ConfigError(path + ": keys before the first [section] header");
            }
            throw ConfigError(where + ": unknown section [" + name + "]");
        }
    }
    SectionBinder binder(command);
    cfg.bind(binder);
    binder.apply(file);
    return cfg;
}

int report(const CommandResult& r)
{
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    for (const auto& c : r.checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    }
    std::cout << "wrote " << r.manifest.outputs.size() << " files and manifest.txt ("
              << r.manifest.wall_clock_seconds << " s)\n";
    return r.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spatial SIR epidemics on Z^2: solvers, simulators and exact oracles"};
    app.require_subcommand(1);

    std::string config_path;
    RunFlags flags;
    std::string out_dir = "out";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value file with one [section] per command")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "base seed of every random stream");
        sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::Range(1, 1024));
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--paper-scale", flags.paper_scale, "full-size parameters (simulate only; slow)");
    };

    std::map<std::string, CLI::App*> subs;
    const std::map<std::string, std::string> help{
        {"solve", "constants table: iota, kappa, gamma1, layer densities, herd immunity"},
        {"shape", "limiting frontier speed in every direction"},
        {"simulate", "one stochastic run with field snapshots and the shape overlay"},
        {"det", "large-N deterministic fields, frontier layers and the final-size equation"},
        {"montecarlo", "replicate estimates: survival, delay, final profile or layers"},
        {"paths", "exact lattice path counts and the growth-rate comparison"},
        {"percolation-check", "percolation representation against the simulator and exact laws"},
        {"validate", "the invariant and oracle suite at desk scale"},
    };
    for (const auto& name : kCommands) {
        subs[name] = app.add_subcommand(name, help.at(name));
        add_common(subs[name]);
    }

    CLI11_PARSE(app, argc, argv);
    flags.out = out_dir;

    try {
        if (subs["solve"]->parsed()) {
            return report(cmd_solve(load_section<SolveConfig>(config_path, "solve"), flags));
        }
        if (subs["shape"]->parsed()) {
            return report(cmd_shape(load_section<ShapeConfig>(config_path, "shape"), flags));
        }
        if (subs["simulate"]->parsed()) {
            return report(cmd_simulate(load_section<SimulateConfig>(config_path, "simulate"), flags));
        }
        if (subs["det"]->parsed()) {
            return report(cmd_det(load_section<DetConfig>(config_path, "det"), flags));
        }
        if (subs["montecarlo"]->parsed()) {
            return report(cmd_montecarlo(load_section<MonteCarloConfig>(config_path, "montecarlo"), flags));
        }
        if (subs["paths"]->parsed()) {
            return report(cmd_paths(load_section<PathsConfig>(config_path, "paths"), flags));
        }
        if (subs["percolation-check"]->parsed()) {
            return report(
                cmd_percolation_check(load_section<PercolationCheckConfig>(config_path, "percolation-check"), flags));
        }
        return report(cmd_validate(load_section<ValidateConfig>(config_path, "validate"), flags));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
