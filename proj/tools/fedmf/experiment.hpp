#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedmf/datagen.hpp"
#include "fedmf/error.hpp"
#include "fedmf/resampler.hpp"
#include "fedmf/solver.hpp"

namespace fedmf::cli {

/// Malformed or inconsistent experiment configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class DatasetKind { synthetic, csv, libsvm, manifest };

struct DatasetConfig {
    DatasetKind kind = DatasetKind::synthetic;
    SyntheticSpec synthetic;
    /// When the config gives no synthetic seed it is derived from the master seed.
    bool synthetic_seed_given = false;
    std::filesystem::path path;
    bool has_labels = false;
    char delimiter = ',';
    std::size_t dim = 0;  ///< libsvm only
    std::size_t num_clients = 25;
    PartitionMode partition = PartitionMode::row_split;
    bool center = false;
};

struct BoundsConfig {
    double p_kappa = 1.0 / 6.0;     ///< probability parameter of kappa_p
    double p_frobenius = 0.25;      ///< probability parameter of the Frobenius bound
    double probability = 0.999;     ///< target P for m_for_probability
};

struct ExperimentConfig {
    DatasetConfig dataset;
    std::vector<std::size_t> ranks{5};
    std::vector<unsigned> alphas{0};
    std::vector<Momentum> momenta{Momentum::none};
    SolverConfig solver;
    ResamplePolicy resample;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    BoundsConfig bounds;
    bool secure_aggregation = true;
    double mask_scale = 1.0;
    bool parallel_clients = false;
};

/// Command-line overrides applied on top of a config file.
struct Overrides {
    std::vector<unsigned> alphas;
    std::vector<std::size_t> ranks;
    std::vector<std::string> momenta;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

/// Parse the documented JSON config (schemas/config.schema.json). Relative
/// dataset paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Materialise the configured dataset. Paths are checked here.
FederatedDataset load_dataset(const DatasetConfig& config, std::uint64_t master_seed);

/// Seeds of one (trial) cell; shared by every (alpha, rank, momentum) so
/// variants are paired.
struct CellSeeds {
    std::uint64_t phi_base = 0;
    std::uint64_t init = 0;
};
CellSeeds cell_seeds(std::uint64_t master_seed, std::size_t trial);

/// Write client_NNN.csv shards and manifest.json for a synthetic dataset.
/// Returns the manifest path.
std::filesystem::path cmd_generate(const ExperimentConfig& config);

/// Run every (alpha, rank, momentum, trial) cell. Returns the summary paths.
std::vector<std::filesystem::path> cmd_run(const ExperimentConfig& config);

/// Evaluate every bound for each (alpha, rank) and write bounds.json.
nlohmann::json cmd_bounds(const ExperimentConfig& config);

/// log10 of a squared error, clamped below at -30.
double clamped_log10(double error);

}  // namespace fedmf::cli
