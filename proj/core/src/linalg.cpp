#include "fedmf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fedmf/error.hpp"
#include "fedmf/flops.hpp"
#include "fedmf/random.hpp"

namespace fedmf {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument(std::string(op) + ": shape mismatch " + shape(a) + " vs " +
                              shape(b));
    }
}

void record_product(std::size_t m, std::size_t k, std::size_t n) {
    record_flops(2ULL * m * k * n);
}

}  // namespace

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw InvalidArgument("gaussian: zero dimension");
    NormalStream stream(seed);
    std::vector<double> data(rows * cols);
    for (double& x : data) x = stream.next();
    return Matrix(rows, cols, std::move(data));
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix vstack(std::span<const Matrix> blocks) {
    if (blocks.empty()) throw InvalidArgument("vstack: no blocks");
    const std::size_t cols = blocks.front().cols();
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        if (b.cols() != cols) throw InvalidArgument("vstack: column count mismatch");
        rows += b.rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& b : blocks) data.insert(data.end(), b.data().begin(), b.data().end());
    return Matrix(rows, cols, std::move(data));
}

Matrix row_block(const Matrix& a, std::size_t begin, std::size_t end) {
    if (begin >= end || end > a.rows()) throw InvalidArgument("row_block: bad row range");
    const auto first = a.data().begin() + static_cast<std::ptrdiff_t>(begin * a.cols());
    const auto last = a.data().begin() + static_cast<std::ptrdiff_t>(end * a.cols());
    return Matrix(end - begin, a.cols(), std::vector<double>(first, last));
}

Matrix leading_columns(const Matrix& a, std::size_t count) {
    if (count == 0 || count > a.cols()) throw InvalidArgument("leading_columns: bad count");
    Matrix out(a.rows(), count);
    for (std::size_t i = 0; i < a.rows(); ++i)
        std::copy_n(a.row(i).begin(), count, out.row(i).begin());
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw InvalidArgument("matmul: inner dimension mismatch " + shape(a) + " * " + shape(b));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c.row(i).data();
        const double* ai = a.row(i).data();
        for (std::size_t l = 0; l < k; ++l) {
            const double s = ai[l];
            const double* bl = b.row(l).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += s * bl[j];
        }
    }
    record_product(m, k, n);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw InvalidArgument("matmul_tn: row count mismatch " + shape(a) + "^T * " + shape(b));
    }
    const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
    Matrix c(m, n);
    for (std::size_t l = 0; l < k; ++l) {
        const double* al = a.row(l).data();
        const double* bl = b.row(l).data();
        for (std::size_t i = 0; i < m; ++i) {
            const double s = al[i];
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += s * bl[j];
        }
    }
    record_product(m, k, n);
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw InvalidArgument("matmul_nt: column count mismatch " + shape(a) + " * " + shape(b) +
                              "^T");
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.row(i).data();
        double* ci = c.row(i).data();
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.row(j).data();
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += ai[l] * bj[l];
            ci[j] = s;
        }
    }
    record_product(m, k, n);
    return c;
}

Matrix gram(const Matrix& a) {
    const std::size_t n = a.cols();
    Matrix g(n, n);
    for (std::size_t l = 0; l < a.rows(); ++l) {
        const double* al = a.row(l).data();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = al[i];
            double* gi = g.row(i).data();
            for (std::size_t j = i; j < n; ++j) gi[j] += s * al[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    record_product(n, a.rows(), n);
    return g;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    c += b;
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    c -= b;
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& x : c.data()) x *= s;
    return c;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator+=");
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
    return a;
}

Matrix& operator-=(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator-=");
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) ad[i] -= bd[i];
    return a;
}

void axpy(double s, const Matrix& x, Matrix& y) {
    require_same_shape(x, y, "axpy");
    auto xd = x.data();
    auto yd = y.data();
    for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += s * xd[i];
}

double frobenius_sq(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return s;
}

double frobenius_diff_sq(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_diff_sq");
    auto ad = a.data();
    auto bd = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < ad.size(); ++i) {
        const double d = ad[i] - bd[i];
        s += d * d;
    }
    return s;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

SymEigResult sym_eig(const Matrix& input) {
    if (input.rows() != input.cols()) {
        throw InvalidArgument("sym_eig: matrix is not square (" + shape(input) + ")");
    }
    const std::size_t n = input.rows();
    const double norm = std::sqrt(frobenius_sq(input));
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = input(i, j) - input(j, i);
            asym += 2.0 * d * d;
        }
    if (std::sqrt(asym) > 1e-9 * norm) throw InvalidArgument("sym_eig: matrix is not symmetric");

    // Symmetrise exactly so the rotations below only need one triangle's worth
    // of bookkeeping to stay consistent.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    Matrix v = Matrix::identity(n);

    // An off-diagonal entry is negligible once it is below eps relative to the
    // geometric mean of its two diagonal entries. This is stronger than an
    // off(A) <= 1e-12 ||A||_F stop and keeps small eigenvalues of
    // positive-definite Gram matrices relatively accurate.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double abs_floor = 1e-30 * norm;
    constexpr int max_sweeps = 100;
    std::uint64_t rotations = 0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (std::abs(apq) <= abs_floor ||
                    std::abs(apq) <= eps * std::sqrt(std::abs(app) * std::abs(aqq))) {
                    continue;
                }
                rotated = true;
                ++rotations;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    const double nkp = c * akp - s * akq;
                    const double nkq = s * akp + c * akq;
                    a(k, p) = a(p, k) = nkp;
                    a(k, q) = a(q, k) = nkq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        if (!rotated) break;
    }
    record_flops(rotations * 10ULL * n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SymEigResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        result.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, k) = v(i, order[k]);
    }
    return result;
}

Spectrum singular_values(const Matrix& a) {
    if (a.empty()) return {};
    const Matrix g = a.rows() >= a.cols() ? gram(a) : gram(transpose(a));
    const SymEigResult eig = sym_eig(g);
    Spectrum s;
    s.values.reserve(eig.eigenvalues.size());
    for (double lambda : eig.eigenvalues) s.values.push_back(std::sqrt(std::max(lambda, 0.0)));
    return s;
}

double condition_number(const Matrix& a) {
    const Spectrum s = singular_values(a);
    const double smax = s.max();
    const double smin = s.values.empty() ? 0.0 : s.values.back();
    // The spectrum comes from a Gram matrix, so the cutoff is applied to the
    // squared values where the eigensolver's resolution lives.
    if (smax == 0.0 || smin * smin <= kRankTolerance * smax * smax) {
        throw RankDeficient("condition_number: matrix is numerically rank deficient", smin);
    }
    return smax / smin;
}

Matrix orthonormalize(const Matrix& a) {
    if (a.rows() < a.cols()) throw InvalidArgument("orthonormalize: more columns than rows");
    const std::size_t m = a.rows(), n = a.cols();
    Matrix q = a;
    double max_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += q(i, j) * q(i, j);
        max_norm = std::max(max_norm, std::sqrt(s));
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += q(i, k) * q(i, j);
                for (std::size_t i = 0; i < m; ++i) q(i, j) -= dot * q(i, k);
            }
        }
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += q(i, j) * q(i, j);
        const double norm = std::sqrt(s);
        if (norm <= kRankTolerance * max_norm || norm == 0.0) {
            throw RankDeficient("orthonormalize: columns are linearly dependent", norm);
        }
        for (std::size_t i = 0; i < m; ++i) q(i, j) /= norm;
    }
    record_flops(8ULL * m * n * n);
    return q;
}

Matrix pinv_gram(const Matrix& g) {
    const SymEigResult eig = sym_eig(g);
    const std::size_t n = g.rows();
    Matrix out(n, n);
    const double lambda_max = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
    if (lambda_max <= 0.0) return out;
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = eig.eigenvalues[k];
        if (lambda <= kPinvTolerance * lambda_max) continue;
        const double inv = 1.0 / lambda;
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = eig.eigenvectors(i, k) * inv;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * eig.eigenvectors(j, k);
        }
    }
    return out;
}

}  // namespace fedmf
