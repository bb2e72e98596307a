#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedmf/matrix.hpp"

namespace fedmf {

/// Singular values sorted non-increasing, all >= 0.
struct Spectrum {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    /// 1-based access matching the usual sigma_i indexing; 0 past the end.
    double sigma(std::size_t i) const noexcept {
        return i >= 1 && i <= values.size() ? values[i - 1] : 0.0;
    }
    double max() const noexcept { return values.empty() ? 0.0 : values.front(); }
};

struct SymEigResult {
    std::vector<double> eigenvalues;  ///< descending
    Matrix eigenvectors;              ///< column k pairs with eigenvalues[k]
};

/// Relative eigenvalue cutoff used by pinv_gram: lambda <= kPinvTolerance *
/// lambda_max is treated as zero.
inline constexpr double kPinvTolerance = 1e-12;

/// Relative singular-value cutoff below which condition_number and
/// orthonormalize report rank deficiency.
inline constexpr double kRankTolerance = 1e-12;

// --- construction ---------------------------------------------------------

/// rows x cols matrix of i.i.d. N(0, 1) entries, filled row-major from
/// NormalStream(seed). Bit-identical for identical (rows, cols, seed).
Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed);

Matrix transpose(const Matrix& a);
/// Stack matrices with equal column counts on top of each other.
Matrix vstack(std::span<const Matrix> blocks);
/// Rows [begin, end) of `a`.
Matrix row_block(const Matrix& a, std::size_t begin, std::size_t end);
/// Columns [0, count) of `a`.
Matrix leading_columns(const Matrix& a, std::size_t count);

// --- products (all report 2*m*k*n flops) ----------------------------------

Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T * b without forming a^T.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * b^T without forming b^T.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * a.
Matrix gram(const Matrix& a);

// --- elementwise ------------------------------------------------------------

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix& operator+=(Matrix& a, const Matrix& b);
Matrix& operator-=(Matrix& a, const Matrix& b);
/// y += s * x
void axpy(double s, const Matrix& x, Matrix& y);

// --- norms and spectra ------------------------------------------------------

double frobenius_sq(const Matrix& a);
/// ||a - b||_F^2 without materialising the difference.
double frobenius_diff_sq(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);

/// Cyclic Jacobi eigensolver for symmetric matrices.
/// Throws InvalidArgument if `a` is not square or ||a - a^T||_F > 1e-9 ||a||_F.
SymEigResult sym_eig(const Matrix& a);

/// Singular values from the eigenvalues of the smaller Gram matrix
/// (a^T a or a a^T), negatives clamped to zero.
Spectrum singular_values(const Matrix& a);

/// sigma_max / sigma_min. Throws RankDeficient when sigma_min <=
/// kRankTolerance * sigma_max.
double condition_number(const Matrix& a);

/// Orthonormal basis of span(a) by modified Gram–Schmidt with one
/// reorthogonalisation pass. Requires rows >= cols and full column rank.
Matrix orthonormalize(const Matrix& a);

/// Moore–Penrose pseudo-inverse of a symmetric PSD matrix through its
/// eigendecomposition, eigenvalues <= kPinvTolerance * lambda_max dropped.
Matrix pinv_gram(const Matrix& g);

}  // namespace fedmf
