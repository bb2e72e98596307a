#include "fedmf/federation.hpp"

#include <algorithm>
#include <string>

#include "fedmf/error.hpp"
#include "fedmf/flops.hpp"
#include "fedmf/linalg.hpp"
#include "fedmf/random.hpp"
#include "parallel.hpp"

namespace fedmf {

namespace {

// Keeps the mask streams disjoint from the Phi streams of the same seed.
constexpr std::uint64_t kMaskDomain = 0x6d61736b;  // "mask"

}  // namespace

std::vector<ClientState> make_clients(const FederatedDataset& dataset, std::uint64_t seed) {
    std::vector<ClientState> clients;
    clients.reserve(dataset.num_clients());
    for (std::size_t i = 0; i < dataset.num_clients(); ++i) {
        clients.push_back(ClientState{i, dataset.shards[i], derive_seed(seed, i), std::nullopt});
    }
    return clients;
}

std::uint64_t CostLedger::total_client_flops() const noexcept {
    std::uint64_t total = 0;
    for (auto f : client_flops) total += f;
    return total;
}

CostLedger& CostLedger::operator+=(const CostLedger& other) {
    floats_communicated += other.floats_communicated;
    aggregation_rounds += other.aggregation_rounds;
    server_flops += other.server_flops;
    if (client_flops.size() < other.client_flops.size()) {
        client_flops.resize(other.client_flops.size(), 0);
    }
    for (std::size_t i = 0; i < other.client_flops.size(); ++i) {
        client_flops[i] += other.client_flops[i];
    }
    return *this;
}

std::vector<Matrix> masked_uploads(const AggregationRound& round) {
    const auto& v = round.contributions;
    if (v.empty()) throw InvalidArgument("secure_aggregate: no contributions");
    for (const auto& c : v) {
        if (c.rows() != v.front().rows() || c.cols() != v.front().cols()) {
            throw InvalidArgument("secure_aggregate: contributions have different shapes");
        }
    }
    std::vector<Matrix> uploads = v;
    const std::size_t n = v.size();
    if (n < 2 || round.mask_scale == 0.0) return uploads;

    const std::size_t rows = v.front().rows();
    const std::size_t cols = v.front().cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Matrix mask = gaussian(rows, cols, derive_seed(round.mask_seed, i * n + j));
            axpy(round.mask_scale, mask, uploads[i]);
            axpy(-round.mask_scale, mask, uploads[j]);
        }
    }
    return uploads;
}

Matrix server_sum(std::span<const Matrix> uploads) {
    if (uploads.empty()) throw InvalidArgument("server_sum: no uploads");
    Matrix total(uploads.front().rows(), uploads.front().cols());
    for (const auto& u : uploads) total += u;
    record_flops(uploads.size() * uploads.front().size());
    return total;
}

Matrix secure_aggregate(const AggregationRound& round) {
    const auto uploads = masked_uploads(round);
    return server_sum(uploads);
}

std::vector<Matrix> broadcast(const Matrix& v, std::size_t num_clients, CostLedger& ledger) {
    ledger.floats_communicated += num_clients * v.size();
    return std::vector<Matrix>(num_clients, v);
}

std::uint64_t phi_seed(std::uint64_t seed, std::size_t client_id) noexcept {
    return derive_seed(seed, client_id);
}

PowerInitResult power_init(std::span<const ClientState> clients, unsigned alpha, std::size_t r,
                           std::uint64_t seed, const PowerInitOptions& options) {
    if (clients.empty()) throw InvalidArgument("power_init: no clients");
    if (r == 0) throw InvalidArgument("power_init: r must be >= 1");
    const std::size_t n_clients = clients.size();
    const std::size_t d = clients.front().shard.cols();
    for (const auto& c : clients) {
        if (c.shard.cols() != d) {
            throw InvalidArgument("power_init: client " + std::to_string(c.id) +
                                  " has a different feature dimension");
        }
    }

    PowerInitResult result;
    CostLedger& ledger = result.ledger;
    ledger.client_flops.assign(n_clients, 0);
    std::vector<FlopCounter> client_counters(n_clients);
    FlopCounter server_counter;

    std::vector<Matrix> local_v(n_clients);
    std::vector<Matrix> held(n_clients);  // V as last received by each client

    for (unsigned round = 0; round <= alpha; ++round) {
        detail::for_each_index(n_clients, options.parallel_clients, [&](std::size_t i) {
            FlopScope scope(&client_counters[i]);
            const Matrix& s = clients[i].shard;
            if (round == 0) {
                const Matrix phi = gaussian(s.rows(), r, phi_seed(seed, clients[i].id));
                local_v[i] = matmul_tn(s, phi);
            } else {
                local_v[i] = matmul_tn(s, matmul(s, held[i]));
            }
        });

        AggregationRound agg;
        agg.contributions = std::move(local_v);
        agg.mask_seed = derive_seed(seed ^ kMaskDomain, round);
        agg.mask_scale = options.secure_aggregation ? options.mask_scale : 0.0;
        const std::vector<Matrix> uploads = masked_uploads(agg);
        ledger.floats_communicated += n_clients * d * r;
        {
            FlopScope scope(&server_counter);
            result.v = server_sum(uploads);
        }
        ++ledger.aggregation_rounds;
        held = broadcast(result.v, n_clients, ledger);
        local_v = std::vector<Matrix>(n_clients);
    }

    for (std::size_t i = 0; i < n_clients; ++i) ledger.client_flops[i] = client_counters[i].value();
    ledger.server_flops = server_counter.value();
    return result;
}

}  // namespace fedmf
