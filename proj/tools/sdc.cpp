#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdc/cli.hpp"

int main(int argc, char** argv) {
    sdc::cli::configure_logging();

    CLI::App app{"Predictor feedback design, certification and simulation for delayed boundary control"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    sdc::cli::RunOptions opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "directory for report files");
        sub->add_flag("--no-disturbance", opt.no_disturbance, "set v(t) = 0");
        sub->add_flag("--open-loop", opt.open_loop, "simulate with u = 0");
    };
    for (const char* name : {"validate", "design", "certify", "simulate"})
        add_common(app.add_subcommand(name, std::string(name) + " from a configuration file"), true);
    add_common(app.add_subcommand("case-study", "full pipeline on the built-in reaction-diffusion example"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sdc::cli::kConfigError;
    }

    opt.out_dir = out_dir;
    sdc::cli::Streams io{std::cout, std::cerr};
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "case-study") return sdc::cli::cmd_case_study(opt, io);
    return sdc::cli::run_with_config_file(command, config_path, opt, io);
}
