#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedmf/matrix.hpp"

namespace fedmf {

enum class PartitionMode { row_split, by_label, random };

std::string to_string(PartitionMode mode);
/// Accepts "row-split", "by-label", "random".
PartitionMode parse_partition_mode(const std::string& text);

/// N client shards S^i (n_i x d) of a global matrix S.
struct FederatedDataset {
    std::vector<Matrix> shards;
    std::string name;
    PartitionMode partition = PartitionMode::row_split;

    std::size_t num_clients() const noexcept { return shards.size(); }
    std::size_t dim() const noexcept { return shards.empty() ? 0 : shards.front().cols(); }
    std::size_t total_rows() const noexcept;
    /// Vertical concatenation of the shards in client order.
    Matrix stacked() const;
};

/// S = U_X diag(signal_values) V_X^T + E, split row-wise across clients.
struct SyntheticSpec {
    std::size_t num_clients = 25;
    std::size_t rows_per_client = 200;
    std::size_t dim = 200;
    std::size_t true_rank = 5;
    std::vector<double> signal_values{1.0, 1.0, 1.0, 1.0, 1.0};
    double noise_std = 0.0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;
};

/// Deterministic in spec.seed. U_X and V_X are orthonormalized Gaussian
/// n x r_* and d x r_* blocks; E has i.i.d. N(0, noise_std^2) entries.
FederatedDataset generate_synthetic(const SyntheticSpec& spec);

/// Split the rows of `rows` across `num_clients` clients.
///
/// row_split keeps order and gives each client floor(n/N) rows, with the
/// n mod N remainder handed out one per client starting at client 0.
/// random applies a seeded Fisher–Yates shuffle first, then splits the same
/// way. by_label sends every row of a label to one client: distinct labels,
/// sorted ascending, are dealt round-robin to clients; rows keep file order.
FederatedDataset partition(const Matrix& rows, std::optional<std::span<const int>> labels,
                           std::size_t num_clients, PartitionMode mode, std::uint64_t seed);

}  // namespace fedmf
