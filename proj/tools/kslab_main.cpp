// kslab <subcommand> --config <path> [--out <dir>] [--threads k]
#include <iostream>

#include "CLI11.hpp"
#include "ksl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Kato smoothing / Strichartz lab for (-Delta)^m + V"};
    app.require_subcommand(1);

    ksl::cli::RunRequest req;
    for (const auto& name : ksl::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " probes");
        sub->add_option("--config", req.config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", req.out, "output directory (overrides the config)");
        sub->add_option("--threads", req.threads, "OpenMP threads (0 = hardware)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", req.quiet, "no progress lines on stderr");
        sub->callback([&req, name] { req.subcommand = name; });
    }
    auto* lp = app.add_subcommand("list_probes", "print the JSON schema of every subcommand");
    auto* dc = app.add_subcommand("default_config", "print a complete YAML config built from the defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : ksl::cli::kExitInvalid;
    }
    if (lp->parsed()) {
        std::cout << ksl::cli::list_probes().dump(2) << "\n";
        return 0;
    }
    if (dc->parsed()) {
        std::cout << ksl::default_config_yaml();
        return 0;
    }
    return ksl::cli::run(req);
}
