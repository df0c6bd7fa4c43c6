#include "mprk/stability.hpp"

#include <cmath>
#include <sstream>

namespace mprk {

namespace {

constexpr double kMarginalBand = 1e-12;

void check_factor(double value, double scale, double alpha, double z) {
    if (std::abs(value) <= 1e-14 * std::max(1.0, std::abs(scale))) {
        std::ostringstream os;
        os << "stability_function: pole at alpha = " << alpha << ", z = " << z;
        throw DomainError(os.str());
    }
}

double r_high(double alpha, double z) {  // alpha >= 1/2
    const double f1 = 1.0 - alpha * z;
    const double f2 = 1.0 - z;
    check_factor(f1, alpha * z, alpha, z);
    check_factor(f2, z, alpha, z);
    return (-z * z - 2.0 * alpha * z + 2.0) / (2.0 * f1 * f2);
}

double r_mid(double alpha, double z) {  // 0 < alpha < 1/2
    const double inner = -1.0 + alpha * z;
    const double outer = -1.0 + (-1.0 + 1.0 / alpha) * z;
    check_factor(inner, alpha * z, alpha, z);
    check_factor(outer, (1.0 / alpha - 1.0) * z, alpha, z);
    const double c1 = 2.0 - 5.0 / (2.0 * alpha) + 1.0 / (alpha * alpha);
    const double c2 = 3.0 / (2.0 * alpha) - 1.0 / (alpha * alpha);
    return -(1.0 + c1 * z - c2 * z / inner) / outer;
}

double r_neg(double alpha, double z) {  // alpha < 0, polynomial form
    check_factor(1.0 + alpha * z, alpha * z, alpha, z);
    check_factor(-1.0 + (1.0 - 1.0 / alpha) * z, (1.0 - 1.0 / alpha) * z, alpha, z);
    const double num = -(alpha + 2.0) * z * z - (2.0 * alpha * alpha + 2.0) * z - 2.0 * alpha;
    const double den = (2.0 * alpha * alpha - 2.0 * alpha) * z * z +
                       (-2.0 * alpha * alpha + 2.0 * alpha - 2.0) * z - 2.0 * alpha;
    return num / den;
}

}  // namespace

double stability_function(double alpha, double z) {
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw ValidationError("stability_function: MPRK22 is not defined for alpha = 0");
    if (!std::isfinite(z)) throw DomainError("stability_function: z must be finite");
    if (alpha >= 0.5) return r_high(alpha, z);
    if (z > 0.0)
        throw DomainError("stability_function: branch for alpha < 1/2 is restricted to z <= 0");
    if (alpha > 0.0) return r_mid(alpha, z);
    return r_neg(alpha, z);
}

double r_limit_negative_alpha(double alpha) {
    if (!(alpha < 0.0)) throw DomainError("r_limit_negative_alpha: requires alpha < 0");
    return -(alpha + 2.0) / (2.0 * alpha * (alpha - 1.0));
}

double z_star(double alpha) {
    if (alpha > 0.0 && alpha < 0.5) {
        const double rad = 4.0 * std::pow(alpha, 4) + 12.0 * std::pow(alpha, 3) -
                           11.0 * alpha * alpha - 4.0 * alpha + 4.0;
        return (-2.0 * alpha * alpha + 3.0 * alpha - 2.0 - std::sqrt(rad)) /
               (6.0 * alpha * alpha - 7.0 * alpha + 2.0);
    }
    if (alpha > -0.5 && alpha < 0.0) {
        const double rad = 4.0 * std::pow(alpha, 4) + 4.0 * std::pow(alpha, 3) -
                           3.0 * alpha * alpha - 12.0 * alpha + 4.0;
        return (2.0 * alpha * alpha - alpha + 2.0 + std::sqrt(rad)) /
               (2.0 * alpha * alpha - 3.0 * alpha - 2.0);
    }
    std::ostringstream os;
    os << "z_star: alpha = " << alpha
       << " is outside the conditionally stable ranges (0, 0.5) and (-0.5, 0)";
    throw DomainError(os.str());
}

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::Stable: return "stable";
        case StabilityClass::Marginal: return "marginal";
        case StabilityClass::Unstable: return "unstable";
    }
    return "?";
}

StabilityReport classify(double alpha, double dt, double lambda) {
    if (!(dt > 0.0)) throw DomainError("classify: dt must be positive");
    if (!(lambda <= 0.0)) throw DomainError("classify: lambda must be nonpositive");
    const MPRKParams params(alpha);

    StabilityReport report;
    report.regime = params.regime;
    const double z = dt * lambda;
    report.r_value = stability_function(alpha, z);
    report.modulus = std::abs(report.r_value);
    if (report.modulus < 1.0 - kMarginalBand)
        report.classification = StabilityClass::Stable;
    else if (report.modulus <= 1.0 + kMarginalBand)
        report.classification = StabilityClass::Marginal;
    else
        report.classification = StabilityClass::Unstable;
    if ((alpha > 0.0 && alpha < 0.5) || (alpha > -0.5 && alpha < 0.0))
        report.z_star = z_star(alpha);
    return report;
}

ImplicitJacobians psi_phi_jacobians(const LinearPDS& sys, const Vec& y_star,
                                    double dt, double alpha) {
    if (!(alpha < 0.0))
        throw DomainError("psi_phi_jacobians: the implicit forms are the alpha < 0 case");
    if (!(dt > 0.0)) throw DomainError("psi_phi_jacobians: dt must be positive");
    require_positive(y_star, "psi_phi_jacobians: y_star");
    const Matrix& a = sys.rate_matrix();
    const int n = a.rows();
    if (static_cast<int>(y_star.size()) != n)
        throw ValidationError("psi_phi_jacobians: y_star length does not match the system");

    const Vec residual = a * y_star;
    const double tol = 1e-10 * std::max(1.0, max_abs(a) * inf_norm(y_star));
    if (inf_norm(residual) > tol) {
        std::ostringstream os;
        os << "psi_phi_jacobians: y_star is not a steady state, |A y*|_inf = "
           << inf_norm(residual);
        throw ValidationError(os.str());
    }

    // s = diag(y*) A^T diag(y*)^{-1}
    Matrix s(n, n);
    for (int i = 0; i < n; ++i)
        for (int q = 0; q < n; ++q) s(i, q) = y_star[i] * a(q, i) / y_star[q];

    const Matrix eye = Matrix::identity(n);
    const double inv_a = 1.0 / alpha;
    const double inv_2a = 1.0 / (2.0 * alpha);
    const double inv_2a2 = 1.0 / (2.0 * alpha * alpha);

    ImplicitJacobians j;
    j.du_psi = eye + (alpha * dt) * (a + s);
    j.dv_psi = (-1.0 * eye) - (alpha * dt) * s;
    j.du_phi = eye + dt * ((inv_a - inv_2a2) * a - (-inv_2a + inv_2a2) * s);
    j.dv_phi = dt * ((-inv_2a + inv_2a2) * a + inv_2a2 * s);
    j.dw_phi = (-1.0 * eye) + dt * ((1.0 - inv_2a) * a - inv_2a * s);
    return j;
}

Matrix dg_implicit(const ImplicitJacobians& jacs) {
    // -(DwPhi)^{-1} (DuPhi - DvPhi (DvPsi)^{-1} DuPsi)
    const Matrix inner = solve_dense(jacs.dv_psi, jacs.du_psi);
    const Matrix rhs = jacs.du_phi - jacs.dv_phi * inner;
    return -1.0 * solve_dense(jacs.dw_phi, rhs);
}

Matrix dg_analytic_2x2(const TwoSpeciesSystem& sys, double dt, double alpha) {
    if (!(alpha < 0.0)) throw DomainError("dg_analytic_2x2: requires alpha < 0");
    if (!(dt > 0.0)) throw DomainError("dg_analytic_2x2: dt must be positive");
    if (!(sys.a + sys.b > 0.0))
        throw DomainError("dg_analytic_2x2: degenerate system a = b = 0");

    const Matrix a = sys.rate_matrix();
    const Matrix eye = Matrix::identity(2);
    const double inv_a = 1.0 / alpha;
    const double inv_a2 = 1.0 / (alpha * alpha);

    const Matrix outer = (-1.0 * eye) + (dt * (1.0 - inv_a)) * a;
    const Matrix mid = solve_dense((-1.0 * eye) - (alpha * dt) * a,
                                   eye + (2.0 * alpha * dt) * a);
    const Matrix inner = eye + (dt * (1.5 * inv_a - inv_a2)) * a -
                         (dt * (-0.5 * inv_a + inv_a2)) * (a * mid);
    return -1.0 * solve_dense(outer, inner);
}

Matrix fd_jacobian(const std::function<Vec(const Vec&)>& map, const Vec& point,
                   double h) {
    if (!(h > 0.0)) throw DomainError("fd_jacobian: h must be positive");
    const int n = static_cast<int>(point.size());
    for (int j = 0; j < n; ++j) {
        if (!(point[j] > h))
            throw DomainError("fd_jacobian: point must exceed h componentwise");
    }

    Matrix jac(n, n);
    Vec probe = point;
    for (int j = 0; j < n; ++j) {
        Vec plus, minus;
        try {
            probe[j] = point[j] + h;
            plus = map(probe);
            probe[j] = point[j] - h;
            minus = map(probe);
            probe[j] = point[j];
        } catch (const Error& e) {
            std::ostringstream os;
            os << "fd_jacobian: map failed at probe along component " << (j + 1) << ": "
               << e.what();
            throw Error(os.str());
        }
        for (int i = 0; i < n; ++i) jac(i, j) = (plus[i] - minus[i]) / (2.0 * h);
    }
    return jac;
}

}  // namespace mprk
