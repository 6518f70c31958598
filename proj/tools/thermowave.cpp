// thermowave: config-driven experiment runner.
//   thermowave <kind> --config <path> [--out <dir>]
//   thermowave --list-catalog

#include <iostream>

#include <CLI11.hpp>

#include "thermowave/errors.hpp"
#include "thermowave/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermowave experiment runner"};
    std::string kind_name;
    std::string config_path;
    std::string out_dir;
    bool list_catalog = false;
    app.add_option("kind", kind_name, "spectrum | table1 | decay | smoothness | homogenize | eps-converge");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
    app.add_flag("--list-catalog", list_catalog, "print the coefficient catalog and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (list_catalog) {
        std::cout << thermowave::catalog_text();
        return 0;
    }
    if (kind_name.empty() || config_path.empty()) {
        std::cerr << "error: expected <kind> --config <path>\n" << app.help();
        return kExitConfig;
    }
    const auto kind = thermowave::parse_kind(kind_name);
    if (!kind) {
        std::cerr << "error: unknown experiment kind '" << kind_name << "'\n";
        return kExitConfig;
    }

    try {
        auto config = thermowave::load_config(config_path, kind);
        if (!out_dir.empty()) config.output_dir = out_dir;
        const auto manifest = thermowave::run(config);
        for (const auto& f : manifest.files) std::cout << f.file << "  " << f.sha256 << "\n";
        return 0;
    } catch (const thermowave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const thermowave::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
