#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evorod/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"evorod scenario runner: viscoelastic torsion of rods with evolving natural configurations"};

    std::string config_path;
    std::string out_dir = ".";
    bool verify_only = false;
    bool quiet = false;

    app.add_option("--config", config_path, "Path to the JSON scenario config")->required();
    app.add_option("--out", out_dir, "Output directory (created if missing)");
    app.add_flag("--verify", verify_only, "Run the invariant checks only; no trace output");
    app.add_flag("--quiet", quiet, "Suppress stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = evorod::scenario::load_config(config_path);
        const auto result = evorod::scenario::run_scenario(config, out_dir, verify_only);
        if (!quiet) {
            std::cout << result.report_text;
            for (const auto& file : result.written_files) {
                std::cout << "wrote " << file << "\n";
            }
        }
        return result.ok ? 0 : 1;
    } catch (const evorod::InvalidParameterError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const evorod::NonconvergenceError& err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 4;
    }
}
