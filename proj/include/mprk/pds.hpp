#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mprk/linalg.hpp"

namespace mprk {

/// Strictly positive state vector with its time stamp.
struct State {
    Vec y;
    double t = 0.0;
};

/// Throws ValidationError unless every component of y is strictly positive
/// and finite.
void require_positive(const Vec& y, const char* what);

/// Production-destruction system given by its elementwise rates
///   y_i' = sum_{j != i} (p_ij(t, y) - d_ij(t, y)).
/// Rates must be nonnegative for positive states and vanish on the diagonal.
/// A conservative system satisfies d_ij = p_ji for all i != j.
class GeneralPDS {
public:
    virtual ~GeneralPDS() = default;

    virtual int n_species() const = 0;
    /// p_ij(t, y), the rate at which species i is produced from species j.
    virtual double production(double t, const Vec& y, int i, int j) const = 0;
    /// d_ij(t, y), the rate at which species i is destroyed toward species j.
    virtual double destruction(double t, const Vec& y, int i, int j) const = 0;
    virtual bool conservative() const = 0;
};

/// One line of a validation report.
struct InvariantCheck {
    std::string name;
    bool passed = true;
    std::string detail;  // offending index and value when failed
};

struct ValidationReport {
    std::vector<InvariantCheck> checks;
    bool ok = true;

    std::string summary() const;
};

/// Positive conservative linear system y' = A y with A - diag(A) >= 0 and
/// 1^T A = 0. Columns must sum to zero within 1e-13 (scaled by max|a_ij|
/// when that exceeds 1).
class LinearPDS {
public:
    explicit LinearPDS(Matrix rate_matrix);

    const Matrix& rate_matrix() const { return a_; }
    int n_species() const { return a_.rows(); }

    ValidationReport validate() const;

private:
    Matrix a_;
};

/// Report-only check of the LinearPDS invariants on a raw matrix.
ValidationReport validate_linear(const Matrix& rate_matrix);

/// Production-destruction view of a linear system: p_ij(y) = a_ij y_j for
/// i != j and d_ij = p_ji, hence conservative.
class LinearGeneralPDS final : public GeneralPDS {
public:
    explicit LinearGeneralPDS(LinearPDS sys) : sys_(std::move(sys)) {}

    int n_species() const override { return sys_.n_species(); }
    double production(double, const Vec& y, int i, int j) const override {
        return i == j ? 0.0 : sys_.rate_matrix()(i, j) * y[j];
    }
    double destruction(double, const Vec& y, int i, int j) const override {
        return i == j ? 0.0 : sys_.rate_matrix()(j, i) * y[i];
    }
    bool conservative() const override { return true; }

    const LinearPDS& system() const { return sys_; }

private:
    LinearPDS sys_;
};

/// Throws ValidationError naming the failing invariant when sys is invalid.
LinearGeneralPDS linear_as_general(const LinearPDS& sys);

/// The 2x2 family
///   y' = [[-a, b], [a, -b]] y,   a, b >= 0,
/// with nonzero eigenvalue lambda = -(a + b) and steady states s (b, a)^T.
struct TwoSpeciesSystem {
    double a = 0.0;
    double b = 0.0;

    TwoSpeciesSystem(double a, double b);

    Matrix rate_matrix() const;
    LinearPDS as_linear() const { return LinearPDS(rate_matrix()); }
    double eigenvalue() const { return -(a + b); }
};

/// s (b, a)^T scaled so the components sum to total_mass.
/// Throws DomainError for the degenerate system a = b = 0.
State steady_state_two_species(const TwoSpeciesSystem& sys, double total_mass);

}  // namespace mprk
