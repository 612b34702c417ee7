// conefrac <task> --config path [--out dir] [--threads k] [--mesh-level L]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "conefrac/config.hpp"
#include "conefrac/error.hpp"
#include "conefrac/run.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Vanishing orders, spherical eigenpairs, Hardy constants and frequency traces on cones"};
    std::string task;
    std::string config_path;
    conefrac::RunOptions options;
    app.add_option("task", task, "eig | hardy | frequency | solve-ext | smooth-cone | scan")
        ->required()
        ->check(CLI::IsMember(conefrac::task_names()));
    app.add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", options.threads, "threads for module-internal parallelism")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    app.add_option("--mesh-level", options.mesh_level, "refine (L > 0) or coarsen (L < 0) the configured meshes by 2^L")
        ->check(CLI::Range(-4, 4))
        ->capture_default_str();
    app.add_flag_function("--version", [](std::int64_t) {
        std::cout << "conefrac " << conefrac::version_string << "\n";
        std::exit(0);
    }, "print the version and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const conefrac::RunConfig config = conefrac::load_config(config_path, task);
        const conefrac::RunResult result = conefrac::run(config, options);
        std::cout << result.summary.dump(2) << "\n";
        for (const auto& a : result.artifacts) std::cerr << "wrote " << options.out_dir << "/" << a << "\n";
        return 0;
    } catch (const conefrac::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const conefrac::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
