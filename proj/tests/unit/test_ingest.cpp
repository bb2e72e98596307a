#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "fedmf/error.hpp"
#include "fedmf/ingest.hpp"
#include "fedmf/linalg.hpp"

using namespace fedmf;
namespace fs = std::filesystem;

namespace {

class IngestTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fedmf_ingest_" + std::string(::testing::UnitTest::GetInstance()
                                                   ->current_test_info()
                                                   ->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    std::size_t error_line(const fs::path& p, bool labels = false) {
        try {
            load_csv(p, labels);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(IngestTest, CsvParsesNumbersAndLabels) {
    const auto p = write("a.csv", "1,0.5,2\n# comment\n\n-1,3e-2, 4\n");
    const LabeledTable t = load_csv(p, true);
    ASSERT_TRUE(t.labels);
    EXPECT_EQ(*t.labels, (std::vector<int>{1, -1}));
    EXPECT_EQ(t.features, (Matrix{{0.5, 2}, {0.03, 4}}));
    const LabeledTable u = load_csv(p, false);
    EXPECT_FALSE(u.labels);
    EXPECT_EQ(u.features.cols(), 3u);
}

TEST_F(IngestTest, CsvCustomDelimiter) {
    const auto p = write("b.tsv", "1\t2\n3\t4\n");
    EXPECT_EQ(load_csv(p, false, '\t').features, (Matrix{{1, 2}, {3, 4}}));
}

TEST_F(IngestTest, CsvErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line(write("r.csv", "1,2\n3,4\n5\n")), 3u);
    EXPECT_EQ(error_line(write("n.csv", "1,2\n\nx,4\n")), 3u);
    EXPECT_EQ(error_line(write("l.csv", "1,2\nfoo,4\n"), true), 2u);
    EXPECT_THROW(load_csv(write("e.csv", "# only a comment\n"), false), ParseError);
    EXPECT_THROW(load_csv(dir_ / "missing.csv", false), ParseError);
    EXPECT_THROW(load_csv(write("nan.csv", "1,nan\n"), false), ParseError);
    EXPECT_THROW(load_csv(write("lo.csv", "1\n"), true), ParseError);
}

TEST_F(IngestTest, CsvRoundTripIsBitExact) {
    Matrix m = gaussian(13, 7, 21);
    m(0, 0) = 1e-300;
    m(1, 1) = -std::numeric_limits<double>::max();
    m(2, 2) = 0.1;
    const std::vector<int> labels{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, -12};
    const auto p = dir_ / "rt.csv";
    write_csv(p, LabeledTable{m, labels});
    const LabeledTable back = load_csv(p, true);
    EXPECT_EQ(back.features, m);
    EXPECT_EQ(*back.labels, labels);
    write_csv(dir_ / "plain.csv", m, ';');
    EXPECT_EQ(load_csv(dir_ / "plain.csv", false, ';').features, m);
}

TEST_F(IngestTest, LibsvmParsesSparseRows) {
    const auto p = write("a.svm", "+1 1:0.5 3:2\n-1 2:1.5  # trailing comment\n\n1.0 3:-1\n");
    const LabeledTable t = load_libsvm(p, 3);
    EXPECT_EQ(*t.labels, (std::vector<int>{1, -1, 1}));
    EXPECT_EQ(t.features, (Matrix{{0.5, 0, 2}, {0, 1.5, 0}, {0, 0, -1}}));
}

TEST_F(IngestTest, LibsvmErrors) {
    auto line_of = [&](const std::string& name, const std::string& text) -> std::size_t {
        try {
            load_libsvm(write(name, text), 3);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("idx.svm", "1 1:1\n1 4:1\n"), 2u);
    EXPECT_EQ(line_of("zero.svm", "1 0:1\n"), 1u);
    EXPECT_EQ(line_of("pair.svm", "1 1:1\n1 2-1\n"), 2u);
    EXPECT_EQ(line_of("lab.svm", "a 1:1\n"), 1u);
    EXPECT_THROW(load_libsvm(write("empty.svm", "\n"), 3), ParseError);
    EXPECT_THROW(load_libsvm(write("dim.svm", "1 1:1\n"), 0), InvalidArgument);
}

TEST_F(IngestTest, LibsvmRoundTrip) {
    Matrix m(4, 5);
    m(0, 1) = 0.25;
    m(2, 4) = -3.5;
    m(3, 0) = 1e-17;
    const LabeledTable t{m, std::vector<int>{1, -1, 1, -1}};
    write_libsvm(dir_ / "rt.svm", t);
    const LabeledTable back = load_libsvm(dir_ / "rt.svm", 5);
    EXPECT_EQ(back.features, m);
    EXPECT_EQ(*back.labels, *t.labels);
    EXPECT_THROW(write_libsvm(dir_ / "x.svm", LabeledTable{m, std::nullopt}), InvalidArgument);
}

TEST(Ingest, CenterColumnsRemovesMeans) {
    const Matrix c = center_columns(Matrix{{1, 10}, {3, 20}, {5, 60}});
    EXPECT_EQ(c, (Matrix{{-2, -20}, {0, -10}, {2, 30}}));
}

TEST(Ingest, FormatDoubleIsShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-2.0), "-2");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
