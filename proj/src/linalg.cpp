#include "mprk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mprk {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::assign_zero(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    a_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows(), rhs.cols());
    for (int i = 0; i < lhs.rows(); ++i) {
        for (int k = 0; k < lhs.cols(); ++k) {
            const double v = lhs(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < rhs.cols(); ++j) out(i, j) += v * rhs(k, j);
        }
    }
    return out;
}

Matrix operator+(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows(), lhs.cols());
    for (int i = 0; i < lhs.rows(); ++i)
        for (int j = 0; j < lhs.cols(); ++j) out(i, j) = lhs(i, j) + rhs(i, j);
    return out;
}

Matrix operator-(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows(), lhs.cols());
    for (int i = 0; i < lhs.rows(); ++i)
        for (int j = 0; j < lhs.cols(); ++j) out(i, j) = lhs(i, j) - rhs(i, j);
    return out;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = s * m(i, j);
    return out;
}

Vec operator*(const Matrix& m, const Vec& v) {
    Vec out(static_cast<size_t>(m.rows()), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

double max_abs(const Matrix& m) {
    double r = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

double max_abs_diff(const Matrix& lhs, const Matrix& rhs) {
    double r = 0.0;
    for (int i = 0; i < lhs.rows(); ++i)
        for (int j = 0; j < lhs.cols(); ++j) r = std::max(r, std::abs(lhs(i, j) - rhs(i, j)));
    return r;
}

double inf_norm(const Vec& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

double inf_norm_diff(const Vec& lhs, const Vec& rhs) {
    double r = 0.0;
    for (size_t i = 0; i < lhs.size(); ++i) r = std::max(r, std::abs(lhs[i] - rhs[i]));
    return r;
}

namespace {

// In-place LU with partial pivoting. Ties keep the current row, so the
// diagonal never moves on column-diagonally-dominant Patankar matrices.
void lu_factor(Matrix& m, std::vector<int>& perm) {
    const int n = m.rows();
    if (n != m.cols()) throw ValidationError("solve_dense: matrix is not square");
    const double pivot_floor = 1e-14 * max_abs(m);

    perm.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int c = 0; c < n; ++c) {
        int p = c;
        double best = std::abs(m(c, c));
        for (int r = c + 1; r < n; ++r) {
            const double v = std::abs(m(r, c));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (!(best > pivot_floor)) {
            throw SingularMatrixError("solve_dense: pivot " + std::to_string(best) +
                                      " in column " + std::to_string(c + 1) +
                                      " below threshold");
        }
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(c, j), m(p, j));
            std::swap(perm[c], perm[p]);
        }
        const double inv_pivot = 1.0 / m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double l = m(r, c) * inv_pivot;
            m(r, c) = l;
            if (l == 0.0) continue;
            for (int j = c + 1; j < n; ++j) m(r, j) -= l * m(c, j);
        }
    }
}

void lu_solve(const Matrix& lu, const std::vector<int>& perm, const Vec& rhs, Vec& x) {
    const int n = lu.rows();
    x.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = rhs[perm[i]];
    for (int i = 1; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
}

}  // namespace

Vec solve_dense(Matrix m, Vec rhs) {
    if (static_cast<int>(rhs.size()) != m.rows())
        throw ValidationError("solve_dense: rhs length does not match matrix");
    std::vector<int> perm;
    lu_factor(m, perm);
    Vec x;
    lu_solve(m, perm, rhs, x);
    return x;
}

void solve_dense_in_place(Matrix& m, const Vec& rhs, Vec& x,
                          std::vector<int>& perm_scratch) {
    if (static_cast<int>(rhs.size()) != m.rows())
        throw ValidationError("solve_dense: rhs length does not match matrix");
    lu_factor(m, perm_scratch);
    lu_solve(m, perm_scratch, rhs, x);
}

Matrix solve_dense(Matrix m, Matrix rhs) {
    if (rhs.rows() != m.rows())
        throw ValidationError("solve_dense: rhs rows do not match matrix");
    std::vector<int> perm;
    lu_factor(m, perm);
    Matrix x(rhs.rows(), rhs.cols());
    Vec col(static_cast<size_t>(rhs.rows()));
    Vec sol;
    for (int j = 0; j < rhs.cols(); ++j) {
        for (int i = 0; i < rhs.rows(); ++i) col[i] = rhs(i, j);
        lu_solve(m, perm, col, sol);
        for (int i = 0; i < rhs.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

std::array<double, 2> eigenvalues_2x2(const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2)
        throw ValidationError("eigenvalues_2x2: matrix is not 2x2");
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double disc = tr * tr - 4.0 * det;
    // Tolerate rounding-level negative discriminants from symmetric pairs.
    if (disc < 0.0) {
        if (disc < -1e-12 * std::max(1.0, tr * tr))
            throw DomainError("eigenvalues_2x2: complex eigenvalue pair");
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    // Stable evaluation: compute the large root first, the other via the det.
    const double big = (tr >= 0.0) ? 0.5 * (tr + root) : 0.5 * (tr - root);
    const double small = (big != 0.0) ? det / big : 0.5 * (tr + root);
    std::array<double, 2> ev{small, big};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
}

}  // namespace mprk
