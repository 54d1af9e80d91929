#pragma once

// Named reproductions of the figures and headline numbers, shared by the CLI,
// the Python module and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ionvac/detect.hpp"
#include "ionvac/output.hpp"
#include "ionvac/swap.hpp"

namespace ionvac {

enum class OutputFormat { Csv, Json };

/// Every parameter any experiment reads. Unset optionals take the experiment's default
/// when the config is resolved.
struct ExperimentConfig {
    std::string experiment;
    std::optional<int> n_ions;
    int max_n = 20;
    std::vector<int> group_sizes{1, 3, 5};
    int probe_a = 6;
    int probe_b = 15;
    double duration = 0.8;
    std::vector<double> detuning_grid;  // empty: -6..6 in steps of 0.05
    ExchangeOrdering ordering = ExchangeOrdering::Product;
    int fock_dim = 16;
    double gauge_frequency = std::pow(3.0, 0.25);
    std::string sequence = "V:0.31,W:0.38,V:0.50,W:0.39,V:0.53,W:0.16";
    int n_pairs = 3;
    int restarts = 32;
    std::uint64_t seed = 20050101;
    int threads = 0;
    int max_evaluations = 3000;
    std::vector<double> time_slices;  // empty: 0..0.8 in steps of 0.05
    double front_threshold = 1e-3;
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::Csv;
};

/// The experiments `run_experiment` understands.
const std::vector<std::string>& experiment_names();

/// Throws ConfigError naming the first invalid field. Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& cfg);

/// Fills experiment-specific defaults and validates against the owning module.
ExperimentConfig resolve(const ExperimentConfig& cfg);

/// "a:b:n" (n points from a to b inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& text, const std::string& field);

struct OutputFile {
    std::string name;  // relative to the output directory
    std::string content;
};

struct ExperimentOutput {
    Json summary;
    std::vector<OutputFile> files;
};

/// Runs one named experiment (not repro-all). Nothing is written to disk.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes every file atomically under `dir`; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir);

/// Runs every figure experiment and the acceptance checks, writing the outputs and a
/// manifest.json under cfg.out_dir. Timings go to `log` only, so files are reproducible.
Json run_repro_all(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace ionvac
