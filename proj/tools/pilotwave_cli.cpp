#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "pilotwave/io.hpp"
#include "pilotwave/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pilotwave - wave-packet, pilot-trajectory and classical-limit "
                 "simulator"};
    app.set_version_flag("--version", std::string("pilotwave ") + pilotwave::kVersion);

    bool list_scenarios = false;
    app.add_flag("--list-scenarios", list_scenarios, "list scenario ids and exit");

    std::string print_defaults;
    app.add_option("--print-defaults", print_defaults,
                   "print the default config for a scenario and exit");

    pilotwave::io::RunArgs args;
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario config");
    run_cmd->add_option("config", args.config_path, "scenario config file")
        ->required();
    run_cmd->add_option("--out", args.out_dir, "output directory")->required();
    auto* seed_opt =
        run_cmd->add_option("--seed", seed, "override the config seed");
    run_cmd->add_flag("--force", args.force, "write into a non-empty directory");

    CLI11_PARSE(app, argc, argv);

    if (list_scenarios) {
        for (const auto& id : pilotwave::scenario_ids()) std::printf("%s\n", id.c_str());
        return 0;
    }
    if (!print_defaults.empty()) {
        try {
            std::fputs(pilotwave::io::defaults_text(print_defaults).c_str(), stdout);
            return 0;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return pilotwave::io::kExitSchema;
        }
    }
    if (run_cmd->parsed()) {
        if (*seed_opt) args.seed_override = seed;
        return pilotwave::io::run(args);
    }

    std::fputs(app.help().c_str(), stderr);
    return pilotwave::io::kExitFailure;
}
