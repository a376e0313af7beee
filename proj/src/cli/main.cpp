#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ifk/cli/run.hpp"

namespace fs = std::filesystem;
using namespace ifk::cli;

int main(int argc, char** argv) {
    CLI::App app{"Ising and FK-Ising experiments"};
    app.require_subcommand(0, 1);

    RunOptions opt;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
    bool list = false;
    auto add_run_flags = [&](CLI::App* a) {
        a->add_option("--seed", seed, "override the config seed");
        a->add_option("--out", out, "output directory (default: results)");
        a->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    };
    app.add_option("--config", opt.config_path, "run the experiment described by this config");
    app.add_flag("--list", list, "list the experiments");
    add_run_flags(&app);

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", opt.config_path, "config file (key = value or JSON)")->required();
    add_run_flags(run);
    auto* ls = app.add_subcommand("list", "list the experiments");
    auto* schema = app.add_subcommand("schema", "print or write the CSV column documentation");
    std::string schema_dir;
    schema->add_option("--dir", schema_dir, "write <experiment>.json files and columns.md here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kError;
    }

    if (list || ls->parsed()) {
        std::cout << list_text();
        return kOk;
    }
    if (schema->parsed()) {
        if (schema_dir.empty()) {
            std::cout << schema_markdown();
            return kOk;
        }
        fs::create_directories(schema_dir);
        for (const auto& e : registry()) std::ofstream(fs::path(schema_dir) / (e.name + ".json")) << schema_json(e).dump(2) << "\n";
        std::ofstream(fs::path(schema_dir) / "columns.md") << schema_markdown();
        return kOk;
    }
    if (opt.config_path.empty()) {
        std::cerr << app.help();
        return kError;
    }
    auto given = [&](const char* name) {
        auto* a = run->parsed() ? run : &app;
        return a->count(name) > 0;
    };
    if (given("--seed")) opt.seed = seed;
    if (given("--out")) opt.out = out;
    if (given("--threads")) opt.threads = threads;
    return run_main(opt, std::cout, std::cerr);
}
