#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "experiment.hpp"
#include "fedmf/ingest.hpp"
#include "fedmf/linalg.hpp"

using namespace fedmf;
using namespace fedmf::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ExperimentTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fedmf_cli_" +
                std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    static json read_json(const fs::path& p) { return json::parse(slurp(p)); }

    json small_synthetic(double noise = 0.0) const {
        return {{"kind", "synthetic"},
                {"num_clients", 4},
                {"rows_per_client", 12},
                {"dim", 10},
                {"true_rank", 3},
                {"noise_std", noise},
                {"seed", 3}};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(ExperimentTest, DefaultsParseFromEmptyObject) {
    const ExperimentConfig c = parse_config(json::object());
    EXPECT_EQ(c.dataset.kind, DatasetKind::synthetic);
    EXPECT_EQ(c.ranks, (std::vector<std::size_t>{5}));
    EXPECT_EQ(c.alphas, (std::vector<unsigned>{0}));
    EXPECT_EQ(c.trials, 1u);
}

TEST_F(ExperimentTest, ScalarsAndListsAreAccepted) {
    const ExperimentConfig c = parse_config(
        {{"rank", {2, 3}}, {"alpha", 1}, {"momentum", {"none", "nesterov"}},
         {"solver", {{"step_size", "auto"}, {"iterations", 10}}},
         {"resample", {{"mode", "probability"}, {"probability", 0.99}}}});
    EXPECT_EQ(c.ranks, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(c.alphas, (std::vector<unsigned>{1}));
    EXPECT_EQ(c.momenta.size(), 2u);
    EXPECT_FALSE(c.solver.step_size);
    EXPECT_TRUE(std::holds_alternative<TargetProbability>(c.resample.mode));
}

TEST_F(ExperimentTest, ConfigErrors) {
    EXPECT_THROW(parse_config({{"bogus", 1}}), ConfigError);
    EXPECT_THROW(parse_config({{"rank", json::array()}}), ConfigError);
    EXPECT_THROW(parse_config({{"rank", 0}}), ConfigError);
    EXPECT_THROW(parse_config({{"alpha", -1}}), ConfigError);
    EXPECT_THROW(parse_config({{"alpha", "one"}}), ConfigError);
    EXPECT_THROW(parse_config({{"momentum", "heavy"}}), ConfigError);
    EXPECT_THROW(parse_config({{"trials", 0}}), ConfigError);
    EXPECT_THROW(parse_config({{"solver", {{"step_size", -1.0}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"resample", {{"mode", "fixed"}, {"m", 0}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"resample", {{"mode", "threshold"}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"dataset", {{"kind", "csv"}, {"path", "missing.csv"}}}}),
                 ConfigError);
    EXPECT_THROW(parse_config({{"dataset", {{"kind", "parquet"}}}}), ConfigError);
    EXPECT_THROW(parse_config({{"dataset", {{"kind", "synthetic"}, {"true_rank", 0}}}}),
                 ConfigError);
    EXPECT_THROW(parse_config({{"bounds", {{"p_frobenius", 0.6}}}}), ConfigError);
    EXPECT_THROW(load_config(dir_ / "absent.json"), ConfigError);
    std::ofstream(dir_ / "broken.json") << "{ not json";
    EXPECT_THROW(load_config(dir_ / "broken.json"), ConfigError);
}

TEST_F(ExperimentTest, DatasetPathsResolveAgainstConfigDirectory) {
    std::ofstream(dir_ / "data.csv") << "1,2\n3,4\n5,6\n";
    std::ofstream(dir_ / "cfg.json")
        << R"({"dataset": {"kind": "csv", "path": "data.csv", "num_clients": 3}, "rank": 1})";
    const ExperimentConfig c = load_config(dir_ / "cfg.json");
    const FederatedDataset ds = load_dataset(c.dataset, c.seed);
    EXPECT_EQ(ds.num_clients(), 3u);
    EXPECT_EQ(ds.stacked(), (Matrix{{1, 2}, {3, 4}, {5, 6}}));
}

TEST_F(ExperimentTest, OverridesReplaceConfigValues) {
    ExperimentConfig c = parse_config(json::object());
    Overrides o;
    o.alphas = {0, 2};
    o.ranks = {3};
    o.momenta = {"both"};
    o.trials = 4;
    o.seed = 99;
    o.output_dir = dir_;
    apply_overrides(c, o);
    EXPECT_EQ(c.alphas, (std::vector<unsigned>{0, 2}));
    EXPECT_EQ(c.ranks, (std::vector<std::size_t>{3}));
    EXPECT_EQ(c.momenta, (std::vector<Momentum>{Momentum::none, Momentum::nesterov}));
    EXPECT_EQ(c.trials, 4u);
    EXPECT_EQ(c.seed, 99u);
    o.momenta = {"sideways"};
    EXPECT_THROW(apply_overrides(c, o), ConfigError);
}

TEST_F(ExperimentTest, GenerateDefaultSpecWritesTwentyFiveShards) {
    ExperimentConfig c = parse_config(json::object());
    c.output_dir = dir_ / "gen";
    const fs::path manifest = cmd_generate(c);
    const json m = read_json(manifest);
    EXPECT_EQ(m["num_clients"], 25);
    EXPECT_EQ(m["dim"], 200);
    ASSERT_EQ(m["shards"].size(), 25u);
    for (const auto& shard : m["shards"]) {
        const Matrix s = load_csv(c.output_dir / shard.get<std::string>(), false).features;
        EXPECT_EQ(s.rows(), 200u);
        EXPECT_EQ(s.cols(), 200u);
    }
}

TEST_F(ExperimentTest, GenerateIsByteIdenticalAndManifestRoundTrips) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic(0.1)}, {"rank", 2}});
    c.output_dir = dir_ / "a";
    cmd_generate(c);
    c.output_dir = dir_ / "b";
    const fs::path manifest = cmd_generate(c);
    for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
        EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / entry.path().filename()))
            << entry.path().filename();
    }
    const ExperimentConfig from_manifest =
        parse_config({{"dataset", {{"kind", "manifest"}, {"path", manifest.string()}}}});
    const FederatedDataset loaded = load_dataset(from_manifest.dataset, 0);
    const FederatedDataset direct = load_dataset(c.dataset, c.seed);
    ASSERT_EQ(loaded.num_clients(), direct.num_clients());
    EXPECT_EQ(loaded.stacked(), direct.stacked());
}

TEST_F(ExperimentTest, RunExactNoiselessRecoversData) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic()},
                                       {"rank", 3},
                                       {"solver", {{"method", "exact"}}}});
    c.output_dir = dir_;
    const auto summaries = cmd_run(c);
    ASSERT_EQ(summaries.size(), 1u);
    const json s = read_json(summaries[0]);
    EXPECT_LE(s["final_error"].get<double>(), 1e-16 * s["data_norm_sq"].get<double>());
    // The tail of a Gram-based spectrum sits at rounding level, not at zero.
    EXPECT_LE(s["eps_min"].get<double>(), 1e-12 * s["data_norm_sq"].get<double>());
}

TEST_F(ExperimentTest, RunWritesParseableTrajectoriesAndLedger) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic(0.01)},
                                       {"rank", 3},
                                       {"alpha", {0, 2}},
                                       {"momentum", {"none", "nesterov"}},
                                       {"solver", {{"iterations", 15}}},
                                       {"resample", {{"mode", "fixed"}, {"m", 3}}},
                                       {"trials", 2}});
    c.output_dir = dir_;
    const auto summaries = cmd_run(c);
    ASSERT_EQ(summaries.size(), 8u);
    for (const auto& path : summaries) {
        const json s = read_json(path);
        const unsigned alpha = s["cell"]["alpha"];
        const std::uint64_t draws = s["draws"].size();
        EXPECT_EQ(draws, 3u);
        EXPECT_EQ(s["ledger"]["floats_communicated"].get<std::uint64_t>(),
                  2u * 4 * 10 * 3 * (alpha + 1) * draws);
        const LabeledTable t = load_csv(dir_ / s["trajectory"].get<std::string>(), false);
        EXPECT_EQ(t.features.rows(), 16u);
        EXPECT_EQ(t.features.cols(), 3u);
        EXPECT_EQ(t.features(15, 1), s["final_global_loss"].get<double>());
        EXPECT_TRUE(fs::exists(dir_ / s["timing"].get<std::string>()));
    }
}

TEST_F(ExperimentTest, PairedTrialsShareSeedsAcrossMomentum) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic(0.01)},
                                       {"rank", 3},
                                       {"momentum", {"none", "nesterov"}},
                                       {"solver", {{"iterations", 5}}}});
    c.output_dir = dir_;
    const auto summaries = cmd_run(c);
    ASSERT_EQ(summaries.size(), 2u);
    const json a = read_json(summaries[0]);
    const json b = read_json(summaries[1]);
    EXPECT_EQ(a["seeds"], b["seeds"]);
    EXPECT_EQ(a["kappa"], b["kappa"]);
}

TEST_F(ExperimentTest, RerunIsByteIdentical) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic(0.01)},
                                       {"rank", 2},
                                       {"solver", {{"iterations", 8}}},
                                       {"seed", 17}});
    c.output_dir = dir_ / "one";
    const auto first = cmd_run(c);
    c.output_dir = dir_ / "two";
    cmd_run(c);
    for (const auto& path : first) {
        EXPECT_EQ(slurp(path), slurp(dir_ / "two" / path.filename()));
        const std::string csv = read_json(path)["trajectory"];
        EXPECT_EQ(slurp(dir_ / "one" / csv), slurp(dir_ / "two" / csv));
    }
    c.seed = 18;
    c.output_dir = dir_ / "three";
    const auto other = cmd_run(c);
    EXPECT_NE(slurp(first[0]), slurp(other[0]));
}

TEST_F(ExperimentTest, BoundsReportOnTwoLevelDataset) {
    ExperimentConfig c = parse_config(
        {{"dataset",
          {{"kind", "synthetic"}, {"num_clients", 5}, {"rows_per_client", 40}, {"dim", 40},
           {"true_rank", 5}, {"noise_std", 1e-6}, {"seed", 7}}},
         {"rank", {5, 40}},
         {"alpha", {0, 1}}});
    c.output_dir = dir_;
    const json report = cmd_bounds(c);
    EXPECT_EQ(report["m_for_probability"], 10);
    ASSERT_EQ(report["entries"].size(), 4u);
    for (const auto& e : report["entries"]) {
        if (e["rank"] == 5) {
            const auto& app = e["variants"]["appendix"];
            EXPECT_TRUE(app["kappa_p_terms"]["first_term_dominates"].get<bool>());
            EXPECT_GT(app["kappa_p_sq"].get<double>(), 0.0);
            EXPECT_TRUE(e["variants"].contains("main_text"));
        } else {
            EXPECT_EQ(e["eps_min"].get<double>(), 0.0);
        }
    }
    EXPECT_TRUE(fs::exists(dir_ / "bounds.json"));
}

TEST_F(ExperimentTest, RankAboveDimIsAConfigError) {
    ExperimentConfig c = parse_config({{"dataset", small_synthetic()}, {"rank", 3}});
    c.ranks = {11};
    c.output_dir = dir_;
    EXPECT_THROW(cmd_run(c), ConfigError);
}

TEST(ClampedLog10, FloorsAtMinusThirty) {
    EXPECT_EQ(clamped_log10(0.0), -30.0);
    EXPECT_EQ(clamped_log10(1e-40), -30.0);
    EXPECT_DOUBLE_EQ(clamped_log10(100.0), 2.0);
}
