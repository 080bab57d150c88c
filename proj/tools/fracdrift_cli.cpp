#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracdrift/config.hpp"
#include "fracdrift/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weighted uniqueness and nonuniqueness checks for fractional diffusion with drift"};
    app.footer("Configuration keys:\n" + fracdrift::config_reference() +
               "\nExit status: 0 success or PASS, 1 FAIL, 2 invalid input, 3 numerical failure.");

    std::string config_path;
    std::string out_dir;
    long seed = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "run configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded in the report (overrides seed)");
    app.add_flag("--verbose", verbose, "print the full report instead of a summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fracdrift::exit_usage;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return fracdrift::exit_usage;
    }
    std::stringstream text;
    text << in.rdbuf();

    fracdrift::RunOptions options;
    if (*out_opt) options.out_dir = out_dir;
    if (*seed_opt) options.seed = seed;
    options.verbose = verbose;
    return fracdrift::run_document(text.str(), options, std::cout, std::cerr);
}
