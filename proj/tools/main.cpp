#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace gkpmod::cli;
    CLI::App app{"Modular quadrature measurement simulations"};
    std::string command, config_path, out_dir = ".";
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    int threads = -1;
    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "one of: " + names)->required();
    app.add_option("--config", config_path, "JSON config file; missing keys take their defaults");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--threads", threads, "worker threads for shot loops");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", overrides, "dotted-path override, e.g. --set fig_scaling.shots=50");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        RunContext ctx;
        ctx.command = command;
        ctx.config = resolve_config(config_path, overrides);
        ctx.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : ctx.config.at("seed").get<std::uint64_t>();
        ctx.threads = threads > 0 ? threads : get_int(ctx.config, "threads");
        ctx.out_dir = out_dir;
        run_command(ctx);
    } catch (const std::exception& e) {
        int rc = exit_code_for(e);
        nlohmann::json err{{"error", e.what()}, {"exit_code", rc}, {"command", command}};
        std::cerr << err.dump() << "\n";
        return rc;
    }
    return 0;
}
