#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermowave/dynamics.hpp"
#include "thermowave/eps_solver.hpp"
#include "thermowave/model.hpp"

namespace thermowave {

enum class ExperimentKind { spectrum, table1, decay, smoothness, homogenize, eps_converge };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);

/// g(x) = amplitude * sin(k pi x) + offset
struct ForcingSpec {
    double amplitude = 0.0;
    int wavenumber = 1;
    double offset = 0.0;

    ScalarFunction function() const;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::spectrum;
    std::filesystem::path output_dir = "out";

    // spectral experiments
    int system = 1;
    double gamma = 0.5;
    int n = 8;
    std::vector<int> n_list{8, 16, 24, 32};
    double tol = 1e-10;
    bool paper_literal_blocks = false;
    bool export_matrix = false;

    // time integration
    double dt = 0.1;
    double T = 100.0;
    int j = 1;
    std::vector<int> j_list{1, 2, 3};
    std::optional<std::array<double, 2>> window;
    std::optional<StateVector> initial_state;

    // homogenization
    std::string name = "case";
    EpsCoefficients coeffs;
    std::size_t cell_grid = std::size_t{1} << 14;
    std::vector<double> epsilons{0.125, 0.0625, 0.03125, 0.015625};
    double lambda = 1.0;
    int cells = 0;
    ForcingSpec f{1.0, 1, 0.0};
    ForcingSpec g{1.0, 1, 0.0};
    ForcingSpec h{1.0, 2, 0.0};
    std::optional<std::array<double, 2>> evolve_dt_T;

    BlockConvention convention() const {
        return paper_literal_blocks ? BlockConvention::literal : BlockConvention::dissipative;
    }
};

/// Default coefficient set: a = b = c = d = 1, gamma = 0.5.
EpsCoefficients default_coefficients();

/// Parses a JSON coefficient descriptor, e.g. {"kind": "affine-cos", "p": 2, "q": 1, "alpha": 0.25}.
/// Without "alpha" the tightest alpha consistent with the sampled range is used.
CoefficientField parse_coefficient(const std::string& name, std::string_view json_text, FieldRole role);

/// Parses the JSON config text. `cli_kind` overrides/must agree with a "kind" key.
/// Throws ConfigError on malformed input.
ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> cli_kind = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> cli_kind = std::nullopt);

struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::size_t bytes = 0;
};

struct Manifest {
    ExperimentKind kind = ExperimentKind::spectrum;
    std::vector<ManifestEntry> files;
};

/// Executes the experiment, writes its CSV/JSON files and manifest.json into
/// config.output_dir, and returns the manifest. Parameter problems surface as
/// ConfigError, numerical failures as NumericalError; both name the stage.
Manifest run(const ExperimentConfig& config);

/// Human-readable list of the coefficient catalog.
std::string catalog_text();

}  // namespace thermowave
