#include <gtest/gtest.h>

#include "fedmf/error.hpp"
#include "fedmf/federation.hpp"
#include "fedmf/random.hpp"
#include "test_support.hpp"

using namespace fedmf;
using fedmf::testing::centralized_power;
using fedmf::testing::rel_diff;

namespace {

FederatedDataset small_dataset(std::size_t clients, std::size_t rows, std::size_t d,
                               std::uint64_t seed) {
    SyntheticSpec spec;
    spec.num_clients = clients;
    spec.rows_per_client = rows;
    spec.dim = d;
    spec.true_rank = 3;
    spec.signal_values = {3.0, 2.0, 1.0};
    spec.noise_std = 0.05;
    spec.seed = seed;
    return generate_synthetic(spec);
}

}  // namespace

TEST(SecureAggregation, MaskedSumEqualsPlainSum) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        AggregationRound round;
        Matrix plain(6, 3);
        for (std::size_t i = 0; i < 7; ++i) {
            round.contributions.push_back(gaussian(6, 3, derive_seed(seed, i)));
            plain += round.contributions.back();
        }
        round.mask_seed = seed + 1000;
        const auto uploads = masked_uploads(round);
        ASSERT_EQ(uploads.size(), 7u);
        for (std::size_t i = 0; i < 7; ++i) {
            EXPECT_GT(std::sqrt(frobenius_diff_sq(uploads[i], round.contributions[i])), 0.1);
        }
        EXPECT_LT(rel_diff(secure_aggregate(round), plain), 1e-12);
    }
}

TEST(SecureAggregation, UnmaskedAndSingleClientUploadRawContributions) {
    AggregationRound round;
    round.contributions = {gaussian(2, 2, 1), gaussian(2, 2, 2)};
    round.mask_scale = 0.0;
    EXPECT_EQ(masked_uploads(round), round.contributions);
    AggregationRound single;
    single.contributions = {gaussian(2, 2, 3)};
    EXPECT_EQ(masked_uploads(single), single.contributions);
}

TEST(SecureAggregation, MasksDependOnSeed) {
    AggregationRound a;
    a.contributions = {Matrix(2, 2), Matrix(2, 2)};
    a.mask_seed = 1;
    AggregationRound b = a;
    b.mask_seed = 2;
    EXPECT_NE(masked_uploads(a), masked_uploads(b));
    EXPECT_EQ(masked_uploads(a), masked_uploads(a));
}

TEST(SecureAggregation, RejectsEmptyAndMismatchedShapes) {
    AggregationRound round;
    EXPECT_THROW(secure_aggregate(round), InvalidArgument);
    round.contributions = {Matrix(2, 2), Matrix(2, 3)};
    EXPECT_THROW(secure_aggregate(round), InvalidArgument);
}

TEST(Broadcast, ChargesNdrFloats) {
    CostLedger ledger;
    const auto copies = broadcast(gaussian(10, 3, 1), 4, ledger);
    EXPECT_EQ(copies.size(), 4u);
    EXPECT_EQ(ledger.floats_communicated, 120u);
}

TEST(Clients, SeedsFollowDeriveSeed) {
    const auto ds = small_dataset(3, 5, 6, 1);
    const auto clients = make_clients(ds, 77);
    ASSERT_EQ(clients.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(clients[i].id, i);
        EXPECT_EQ(clients[i].rng_seed, derive_seed(77, i));
        EXPECT_EQ(clients[i].shard, ds.shards[i]);
    }
}

class PowerInitGrid : public ::testing::TestWithParam<std::tuple<unsigned, std::size_t>> {};

TEST_P(PowerInitGrid, MatchesCentralizedPowerIteration) {
    const auto [alpha, n] = GetParam();
    const auto ds = small_dataset(n, 8, 12, 10 + n);
    const auto clients = make_clients(ds, 1);
    const PowerInitResult res = power_init(clients, alpha, 4, 555);
    EXPECT_LT(rel_diff(res.v, centralized_power(ds, alpha, 4, 555)), 1e-10);

    const std::uint64_t d = 12, r = 4;
    EXPECT_EQ(res.ledger.floats_communicated, 2 * n * d * r * (alpha + 1));
    EXPECT_EQ(res.ledger.aggregation_rounds, alpha + 1u);
    EXPECT_EQ(res.ledger.server_flops, (alpha + 1) * n * d * r);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(res.ledger.client_flops[i], (4 * alpha + 2) * 8 * d * r);
    }
}

INSTANTIATE_TEST_SUITE_P(AlphaByClients, PowerInitGrid,
                         ::testing::Combine(::testing::Values(0u, 1u, 2u),
                                            ::testing::Values(std::size_t{1}, std::size_t{4},
                                                              std::size_t{25})));

TEST(PowerInit, ParallelScheduleIsBitIdentical) {
    const auto ds = small_dataset(6, 10, 9, 2);
    const auto clients = make_clients(ds, 0);
    PowerInitOptions par;
    par.parallel_clients = true;
    const auto a = power_init(clients, 2, 3, 8);
    const auto b = power_init(clients, 2, 3, 8, par);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.ledger.client_flops, b.ledger.client_flops);
}

TEST(PowerInit, MaskingDoesNotChangeResultBeyondRounding) {
    const auto ds = small_dataset(5, 10, 9, 3);
    const auto clients = make_clients(ds, 0);
    PowerInitOptions plain;
    plain.secure_aggregation = false;
    const auto a = power_init(clients, 1, 3, 8);
    const auto b = power_init(clients, 1, 3, 8, plain);
    EXPECT_LT(rel_diff(a.v, b.v), 1e-12);
}

TEST(PowerInit, Errors) {
    const auto ds = small_dataset(2, 5, 6, 1);
    auto clients = make_clients(ds, 0);
    EXPECT_THROW(power_init(clients, 0, 0, 1), InvalidArgument);
    EXPECT_THROW(power_init(std::span<const ClientState>{}, 0, 2, 1), InvalidArgument);
    clients[1].shard = Matrix(5, 7);
    EXPECT_THROW(power_init(clients, 0, 2, 1), InvalidArgument);
}

TEST(CostLedger, AccumulatesAndTotals) {
    CostLedger a{10, 1, 5, {1, 2}};
    const CostLedger b{3, 2, 1, {4, 5, 6}};
    a += b;
    EXPECT_EQ(a.floats_communicated, 13u);
    EXPECT_EQ(a.aggregation_rounds, 3u);
    EXPECT_EQ(a.server_flops, 6u);
    EXPECT_EQ(a.client_flops, (std::vector<std::uint64_t>{5, 7, 6}));
    EXPECT_EQ(a.total_client_flops(), 18u);
}
