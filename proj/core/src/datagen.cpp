#include "fedmf/datagen.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fedmf/error.hpp"
#include "fedmf/linalg.hpp"
#include "fedmf/random.hpp"

namespace fedmf {

namespace {

// Stream indices for the three independent draws of generate_synthetic.
constexpr std::uint64_t kLeftStream = 1;
constexpr std::uint64_t kRightStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

Matrix gather_rows(const Matrix& src, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), src.cols());
    for (std::size_t k = 0; k < indices.size(); ++k)
        std::copy(src.row(indices[k]).begin(), src.row(indices[k]).end(), out.row(k).begin());
    return out;
}

std::vector<Matrix> split_even(const Matrix& s, std::span<const std::size_t> order,
                               std::size_t num_clients) {
    const std::size_t base = s.rows() / num_clients;
    const std::size_t extra = s.rows() % num_clients;
    std::vector<Matrix> shards;
    shards.reserve(num_clients);
    std::size_t begin = 0;
    for (std::size_t c = 0; c < num_clients; ++c) {
        const std::size_t count = base + (c < extra ? 1 : 0);
        shards.push_back(gather_rows(s, order.subspan(begin, count)));
        begin += count;
    }
    return shards;
}

}  // namespace

std::string to_string(PartitionMode mode) {
    switch (mode) {
        case PartitionMode::row_split: return "row-split";
        case PartitionMode::by_label: return "by-label";
        case PartitionMode::random: return "random";
    }
    return "row-split";
}

PartitionMode parse_partition_mode(const std::string& text) {
    if (text == "row-split") return PartitionMode::row_split;
    if (text == "by-label") return PartitionMode::by_label;
    if (text == "random") return PartitionMode::random;
    throw InvalidArgument("unknown partition mode '" + text + "'");
}

std::size_t FederatedDataset::total_rows() const noexcept {
    std::size_t n = 0;
    for (const auto& s : shards) n += s.rows();
    return n;
}

Matrix FederatedDataset::stacked() const { return vstack(shards); }

void SyntheticSpec::validate() const {
    if (num_clients == 0 || rows_per_client == 0 || dim == 0) {
        throw InvalidArgument("SyntheticSpec: num_clients, rows_per_client and dim must be >= 1");
    }
    if (true_rank == 0) throw InvalidArgument("SyntheticSpec: true_rank must be >= 1");
    if (true_rank > std::min(num_clients * rows_per_client, dim)) {
        throw InvalidArgument("SyntheticSpec: true_rank exceeds min(n, d)");
    }
    if (signal_values.size() != true_rank) {
        throw InvalidArgument("SyntheticSpec: signal_values must have true_rank entries");
    }
    for (double v : signal_values)
        if (!(v > 0.0)) throw InvalidArgument("SyntheticSpec: signal_values must be positive");
    if (!(noise_std >= 0.0)) throw InvalidArgument("SyntheticSpec: noise_std must be >= 0");
}

FederatedDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.num_clients * spec.rows_per_client;
    const std::size_t d = spec.dim;
    const std::size_t r = spec.true_rank;

    const Matrix left = orthonormalize(gaussian(n, r, derive_seed(spec.seed, kLeftStream)));
    const Matrix right = orthonormalize(gaussian(d, r, derive_seed(spec.seed, kRightStream)));

    Matrix scaled_left = left;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < r; ++k) scaled_left(i, k) *= spec.signal_values[k];
    Matrix s = matmul_nt(scaled_left, right);

    if (spec.noise_std > 0.0) {
        axpy(spec.noise_std, gaussian(n, d, derive_seed(spec.seed, kNoiseStream)), s);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    FederatedDataset out;
    out.shards = split_even(s, order, spec.num_clients);
    out.name = "synthetic";
    out.partition = PartitionMode::row_split;
    return out;
}

FederatedDataset partition(const Matrix& rows, std::optional<std::span<const int>> labels,
                           std::size_t num_clients, PartitionMode mode, std::uint64_t seed) {
    if (num_clients == 0) throw InvalidArgument("partition: num_clients must be >= 1");
    if (rows.empty()) throw InvalidArgument("partition: empty matrix");
    const std::size_t n = rows.rows();

    FederatedDataset out;
    out.partition = mode;

    if (mode == PartitionMode::by_label) {
        if (!labels) throw InvalidArgument("partition: by-label mode requires labels");
        if (labels->size() != n) throw InvalidArgument("partition: label count != row count");
        std::map<int, std::size_t> label_client;
        for (int label : *labels) label_client.emplace(label, 0);
        if (label_client.size() < num_clients) {
            throw InvalidArgument("partition: by-label mode needs at least " +
                                  std::to_string(num_clients) + " distinct labels, found " +
                                  std::to_string(label_client.size()));
        }
        std::size_t next = 0;
        for (auto& [label, client] : label_client) client = next++ % num_clients;

        std::vector<std::vector<std::size_t>> members(num_clients);
        for (std::size_t i = 0; i < n; ++i) members[label_client.at((*labels)[i])].push_back(i);
        for (const auto& m : members) out.shards.push_back(gather_rows(rows, m));
        return out;
    }

    if (num_clients > n) {
        throw InvalidArgument("partition: more clients (" + std::to_string(num_clients) +
                              ") than rows (" + std::to_string(n) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (mode == PartitionMode::random) {
        NormalStream stream(seed);
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[stream.uniform_index(i + 1)]);
        }
    }
    out.shards = split_even(rows, order, num_clients);
    return out;
}

}  // namespace fedmf
