#include "fdpfc/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using namespace fdpfc;

    CLI::App app{"F-DPFC simulation and control tool"};
    std::string command;
    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 1;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "one of: " + names)
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("--scenario", scenario_path, "scenario file")->required();
    app.add_option("--out", out_dir, "output directory (default: $FDPFC_OUT, then [outputs] dir, then .)");
    app.add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    CommandContext ctx;
    try {
        ctx.scenario = load_scenario(scenario_path);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kExitUsage;
    }
    ctx.seed = seed;
    if (!out_dir.empty()) {
        ctx.out_dir = out_dir;
    } else if (const char* env = std::getenv("FDPFC_OUT"); env && *env) {
        ctx.out_dir = env;
    } else if (!ctx.scenario.outputs.dir.empty()) {
        ctx.out_dir = ctx.scenario.outputs.dir;
    } else {
        ctx.out_dir = ".";
    }
    return dispatch(command, ctx, std::cout, std::cerr);
}
