#pragma once

#include <array>
#include <vector>

#include "mprk/errors.hpp"

namespace mprk {

using Vec = std::vector<double>;

/// Dense row-major matrix. The systems in this library are tiny (N <= 10),
/// so there is no sparsity machinery and all storage is by value.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    /// Reshape to rows x cols and zero all entries; keeps capacity.
    void assign_zero(int rows, int cols);

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator+(const Matrix& lhs, const Matrix& rhs);
Matrix operator-(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(double s, const Matrix& m);
Vec operator*(const Matrix& m, const Vec& v);

/// Largest absolute entry.
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& lhs, const Matrix& rhs);

/// Infinity norm of a vector.
double inf_norm(const Vec& v);
double inf_norm_diff(const Vec& lhs, const Vec& rhs);

/// Solve M x = rhs by Gaussian elimination with partial pivoting.
/// Throws SingularMatrixError when a pivot falls below 1e-14 * max|M|.
Vec solve_dense(Matrix m, Vec rhs);

/// Same factorization applied to a matrix right-hand side (column by column).
Matrix solve_dense(Matrix m, Matrix rhs);

/// Allocation-free variant for step loops: factors m in place (m is
/// destroyed) and writes the solution of the original system into x.
void solve_dense_in_place(Matrix& m, const Vec& rhs, Vec& x,
                          std::vector<int>& perm_scratch);

/// Eigenvalues of a 2x2 matrix via the closed-form quadratic, sorted
/// ascending. Throws DomainError when the pair is genuinely complex.
std::array<double, 2> eigenvalues_2x2(const Matrix& m);

}  // namespace mprk
