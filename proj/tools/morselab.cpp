// Command-line front end: morselab <subcommand> [--config PATH] [--key value ...]

#include "morselab/config.hpp"
#include "morselab/errors.hpp"
#include "morselab/report.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

int main(int argc, char** argv) {
    using namespace morselab;

    CLI::App app{"Morse index laboratory for minimal hypersurfaces of revolution"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "file of key=value lines")->check(CLI::ExistingFile);

    std::map<std::string, std::optional<std::string>> overrides;
    for (const auto& key : RunConfig::keys())
        app.add_option("--" + key, overrides[key], "overrides " + key + " (default " + RunConfig{}.get(key) + ")");

    for (const auto& name : subcommand_names()) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = RunConfig::load(config_path);
        if (const char* env = std::getenv("MORSELAB_CACHE_DIR")) config.cache_dir = env;
        for (const auto& key : RunConfig::keys())
            if (overrides[key]) config.set(key, *overrides[key]);
        config.validate();
    } catch (const InputError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const int code = run_subcommand(name, config, std::cerr);
        if (code == exit_check_failed) std::cerr << name << ": check failed\n";
        return code;
    } catch (const InputError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return exit_check_failed;
    }
}
