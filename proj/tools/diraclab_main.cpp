#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "diraclab/config.hpp"
#include "diraclab/runner.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run(const std::string &subcommand, const Options &opt)
{
    using namespace diraclab;
    std::ifstream in(opt.config);
    if (!in) {
        fmt::print(stderr, "error: cannot read config '{}'\n", opt.config);
        return exit_configuration;
    }
    std::ostringstream text;
    text << in.rdbuf();

    RunConfig cfg;
    try {
        cfg = parse_config(text.str(), subcommand);
    } catch (const config_errors &e) {
        for (const auto &i : e.issues()) {
            fmt::print(stderr, "{}:{}: {}: {}\n", opt.config, i.line, i.key.empty() ? "<file>" : i.key, i.reason);
        }
        return exit_configuration;
    } catch (const error &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_configuration;
    }
    if (opt.seed_given) {
        cfg.seed = opt.seed;
        cfg.resolved.emplace_back("run.seed", fmt::format("{}", opt.seed));
    }
    const std::string out = opt.out.empty() ? cfg.output.directory : opt.out;

    const auto res = dispatch(cfg, out);
    for (const auto &v : res.verdicts) {
        fmt::print("{:<32} {:<15}{}\n", v.name, to_string(v.status) , v.informational ? " (informational)" : "");
    }
    if (!res.error.empty()) fmt::print(stderr, "error: {}\n", res.error);
    fmt::print("summary: {}/summary.json (exit {})\n", out, res.exit_code);
    return res.exit_code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Numerical laboratory for the 1+1-D cubic nonlinear Dirac system"};
    app.set_version_flag("--version", std::string(diraclab::version()));
    app.require_subcommand(1);

    Options opt;
    std::string chosen;
    const std::pair<const char *, const char *> commands[] = {
        {"validate", "check the null-structure identity and derive the model constants"},
        {"run", "evolve one solution and check its functional inequalities"},
        {"pair", "evolve a base and a perturbed solution and check the L2 stability bounds"},
        {"cauchy", "evolve a geometric sequence of perturbations and its limit"},
        {"oracle", "grid refinement study against the massless Thirring closed form"},
    };
    for (const auto &[name, what] : commands) {
        auto *sub = app.add_subcommand(name, what);
        sub->add_option("--config", opt.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (overrides [output] directory)");
        sub->add_option("--seed", opt.seed, "seed for sampled constants and cones");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : diraclab::exit_configuration;
    }
    for (auto *sub : app.get_subcommands()) opt.seed_given = sub->count("--seed") > 0;
    try {
        return run(chosen, opt);
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
