#pragma once

#include <functional>
#include <optional>

#include "mprk/linalg.hpp"
#include "mprk/mprk22.hpp"
#include "mprk/pds.hpp"

namespace mprk {

/// Stability function R(z), z = dt * lambda, of the MPRK22(alpha) fixed-point
/// iteration on conservative linear systems. Three closed-form branches:
///
///   alpha >= 1/2 :  (-z^2 - 2 alpha z + 2) / (2 (1 - alpha z)(1 - z))
///   0 < alpha < 1/2 and alpha < 0: rational forms with poles on the
///   positive axis only; those branches are restricted to z <= 0.
///
/// The alpha < 0 branch is evaluated in its expanded polynomial form, which
/// has fewer cancellation-prone subexpressions than the nested one.
/// Throws DomainError at poles and outside the branch domain.
double stability_function(double alpha, double z);

/// lim_{z -> -inf} R(z) = -(alpha + 2) / (2 alpha (alpha - 1)) for alpha < 0.
double r_limit_negative_alpha(double alpha);

/// Critical argument with R(z*) = -1; finite only in the conditionally
/// stable ranges alpha in (0, 1/2) and (-1/2, 0). Stability requires
/// z* < z < 0 there. Throws DomainError elsewhere.
double z_star(double alpha);

enum class StabilityClass { Stable, Marginal, Unstable };
const char* to_string(StabilityClass c);

struct StabilityReport {
    double r_value = 0.0;
    double modulus = 0.0;
    StabilityClass classification = StabilityClass::Marginal;
    std::optional<double> z_star;  // only for conditionally stable regimes
    SignRegime regime = SignRegime::NonnegativeAll;
};

/// Evaluates R(dt * lambda) and classifies by modulus with a 1e-12 band
/// around |R| = 1 (separates the structural eigenvalue 1 from rounding).
/// Requires lambda <= 0.
StabilityReport classify(double alpha, double dt, double lambda);

/// The five Jacobians of the stage/update residual maps Psi(u, v) and
/// Phi(u, v, w) at (y*, y*, y*), for alpha < 0 and a steady state A y* = 0.
/// Built from A and diag(y*) A^T diag(y*)^{-1}.
struct ImplicitJacobians {
    Matrix du_psi;
    Matrix dv_psi;
    Matrix du_phi;
    Matrix dv_phi;
    Matrix dw_phi;
};

ImplicitJacobians psi_phi_jacobians(const LinearPDS& sys, const Vec& y_star,
                                    double dt, double alpha);

/// Jacobian of the one-step map at the fixed point via implicit
/// differentiation:
///   Dg = -(DwPhi)^{-1} (DuPhi - DvPhi (DvPsi)^{-1} DuPsi).
Matrix dg_implicit(const ImplicitJacobians& jacs);

/// Closed-form Dg(y*) for the 2x2 family and alpha < 0; its eigenvalues
/// are {R(0), R(dt lambda)} = {1, R(-dt (a+b))}.
Matrix dg_analytic_2x2(const TwoSpeciesSystem& sys, double dt, double alpha);

/// Central finite differences of an arbitrary one-step map, column j =
/// (g(p + h e_j) - g(p - h e_j)) / (2h). The independent oracle for the
/// analytic Jacobians above.
Matrix fd_jacobian(const std::function<Vec(const Vec&)>& map, const Vec& point,
                   double h);

}  // namespace mprk
