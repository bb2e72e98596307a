#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedmf/datagen.hpp"
#include "fedmf/matrix.hpp"

namespace fedmf {

/// One simulated client. `rng_seed` drives the client's private draws
/// (the U_0 initialisation of local descent).
struct ClientState {
    std::size_t id = 0;
    Matrix shard;
    std::uint64_t rng_seed = 0;
    std::optional<Matrix> local_u;
};

/// Client ids follow shard order; rng_seed = derive_seed(seed, id).
std::vector<ClientState> make_clients(const FederatedDataset& dataset, std::uint64_t seed);

/// Communication and computation counters for one or more protocol runs.
/// Counters only ever grow.
struct CostLedger {
    std::uint64_t floats_communicated = 0;  ///< uploads + downloads, in doubles
    std::uint64_t aggregation_rounds = 0;
    std::uint64_t server_flops = 0;
    std::vector<std::uint64_t> client_flops;  ///< indexed by client id

    std::uint64_t total_client_flops() const noexcept;
    CostLedger& operator+=(const CostLedger& other);
};

/// Inputs of one secure-aggregation round. A mask_scale of 0 disables the
/// pairwise masks and the round degenerates to a plain sum.
struct AggregationRound {
    std::vector<Matrix> contributions;
    std::uint64_t mask_seed = 0;
    double mask_scale = 1.0;
};

/// What each client actually sends: V^i + sum_{j>i} M_ij - sum_{j<i} M_ji,
/// where M_ij = mask_scale * gaussian(shape, derive_seed(mask_seed, i*N + j))
/// is known only to clients i and j. A single client uploads its raw
/// contribution (there is nobody to share a mask with).
std::vector<Matrix> masked_uploads(const AggregationRound& round);

/// Server side: plain sum of the uploads in client-id order.
Matrix server_sum(std::span<const Matrix> uploads);

/// server_sum(masked_uploads(round)). The pairwise masks cancel, so the
/// result equals the plain sum up to floating-point rounding.
Matrix secure_aggregate(const AggregationRound& round);

/// Copy V to every client and charge N*d*r downloaded floats to the ledger.
std::vector<Matrix> broadcast(const Matrix& v, std::size_t num_clients, CostLedger& ledger);

/// Seed of client `client_id`'s Gaussian block Phi^i for a power_init call
/// with the given seed. Phi is the vertical stack of these blocks.
std::uint64_t phi_seed(std::uint64_t seed, std::size_t client_id) noexcept;

struct PowerInitOptions {
    bool secure_aggregation = true;
    double mask_scale = 1.0;
    /// Run the per-round client work on one thread per client. Results are
    /// bit-identical to the sequential schedule.
    bool parallel_clients = false;
};

struct PowerInitResult {
    Matrix v;  ///< d x r
    CostLedger ledger;
};

/// Distributed randomized power iteration: V = (S^T S)^alpha S^T Phi.
///
/// Round 0: client i uploads (S^i)^T Phi^i. Each of the alpha further rounds
/// broadcasts the current V and client i uploads (S^i)^T (S^i V), evaluated
/// right to left so no d x d matrix exists anywhere. Every round ends with
/// an aggregation and a broadcast, giving alpha + 1 rounds and
/// 2 N d r (alpha + 1) communicated floats.
PowerInitResult power_init(std::span<const ClientState> clients, unsigned alpha, std::size_t r,
                           std::uint64_t seed, const PowerInitOptions& options = {});

}  // namespace fedmf
