#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fedmf/error.hpp"
#include "fedmf/matrix.hpp"

using fedmf::InvalidArgument;
using fedmf::Matrix;

TEST(Matrix, DefaultIsEmpty) {
    const Matrix m;
    EXPECT_TRUE(m.empty());
    EXPECT_EQ(m.rows(), 0u);
    EXPECT_EQ(m.cols(), 0u);
}

TEST(Matrix, SizedConstructorZeroFills) {
    const Matrix m(3, 4);
    EXPECT_EQ(m.size(), 12u);
    for (double x : m.data()) EXPECT_EQ(x, 0.0);
}

TEST(Matrix, RejectsZeroDimension) {
    EXPECT_THROW(Matrix(0, 3), InvalidArgument);
    EXPECT_THROW(Matrix(3, 0), InvalidArgument);
}

TEST(Matrix, DataConstructorValidatesLengthAndFiniteness) {
    EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), InvalidArgument);
    EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
    EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::infinity()}), InvalidArgument);
    const Matrix m(2, 2, {1.0, 2.0, 3.0, 4.0});
    EXPECT_EQ(m(1, 0), 3.0);
}

TEST(Matrix, InitializerListIsRowMajor) {
    const Matrix m{{1, 2, 3}, {4, 5, 6}};
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m(0, 2), 3.0);
    EXPECT_EQ(m.row(1)[1], 5.0);
}

TEST(Matrix, RaggedInitializerListThrows) {
    EXPECT_THROW((Matrix{{1, 2}, {3}}), InvalidArgument);
}

TEST(Matrix, IdentityAndDiagonal) {
    const Matrix i3 = Matrix::identity(3);
    EXPECT_EQ(i3, (Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    const double vals[] = {2.0, 5.0};
    EXPECT_EQ(Matrix::diagonal(vals), (Matrix{{2, 0}, {0, 5}}));
    EXPECT_EQ(Matrix::diagonal(3, 2, vals), (Matrix{{2, 0}, {0, 5}, {0, 0}}));
}

TEST(Matrix, EqualityComparesShapeAndValues) {
    EXPECT_NE((Matrix{{1, 2}}), (Matrix{{1}, {2}}));
    EXPECT_EQ((Matrix{{1, 2}}), (Matrix{{1, 2}}));
}
