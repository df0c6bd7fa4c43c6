#include "mprk/pds.hpp"

#include <cmath>
#include <sstream>

namespace mprk {

void require_positive(const Vec& y, const char* what) {
    for (size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
            std::ostringstream os;
            os << what << ": component " << (i + 1) << " = " << y[i]
               << " is not strictly positive";
            throw ValidationError(os.str());
        }
    }
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "pass" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << '\n';
    }
    return os.str();
}

ValidationReport validate_linear(const Matrix& a) {
    ValidationReport report;
    auto add = [&report](std::string name, bool passed, std::string detail) {
        report.checks.push_back({std::move(name), passed, std::move(detail)});
        report.ok = report.ok && report.checks.back().passed;
    };

    if (a.rows() != a.cols() || a.rows() == 0) {
        add("square", false,
            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
        return report;
    }
    add("square", true, {});

    const int n = a.rows();
    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j < n && ok; ++j) {
                if (i != j && !(a(i, j) >= 0.0)) {
                    ok = false;
                    std::ostringstream os;
                    os << "entry (" << (i + 1) << "," << (j + 1) << ") = " << a(i, j)
                       << " < 0";
                    detail = os.str();
                }
            }
        }
        add("off-diagonal nonnegative", ok, detail);
    }
    {
        const double tol = 1e-13 * std::max(1.0, max_abs(a));
        bool ok = true;
        std::string detail;
        for (int j = 0; j < n && ok; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += a(i, j);
            if (!(std::abs(s) <= tol)) {
                ok = false;
                std::ostringstream os;
                os << "column " << (j + 1) << " sums to " << s;
                detail = os.str();
            }
        }
        add("columns sum to zero", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < n && ok; ++i) {
            if (!(a(i, i) <= 0.0)) {
                ok = false;
                std::ostringstream os;
                os << "diagonal (" << (i + 1) << "," << (i + 1) << ") = " << a(i, i)
                   << " > 0";
                detail = os.str();
            }
        }
        add("diagonal nonpositive", ok, detail);
    }
    return report;
}

LinearPDS::LinearPDS(Matrix rate_matrix) : a_(std::move(rate_matrix)) {
    if (a_.rows() != a_.cols() || a_.rows() == 0)
        throw ValidationError("LinearPDS: rate matrix must be square and nonempty");
}

ValidationReport LinearPDS::validate() const { return validate_linear(a_); }

LinearGeneralPDS linear_as_general(const LinearPDS& sys) {
    const ValidationReport report = sys.validate();
    if (!report.ok) {
        for (const auto& c : report.checks) {
            if (!c.passed)
                throw ValidationError("linear_as_general: " + c.name + " violated (" +
                                      c.detail + ")");
        }
    }
    return LinearGeneralPDS(sys);
}

TwoSpeciesSystem::TwoSpeciesSystem(double a, double b) : a(a), b(b) {
    if (!(a >= 0.0) || !(b >= 0.0))
        throw ValidationError("TwoSpeciesSystem: rates must be nonnegative");
}

Matrix TwoSpeciesSystem::rate_matrix() const {
    Matrix m(2, 2);
    m(0, 0) = -a;
    m(0, 1) = b;
    m(1, 0) = a;
    m(1, 1) = -b;
    return m;
}

State steady_state_two_species(const TwoSpeciesSystem& sys, double total_mass) {
    if (!(total_mass > 0.0))
        throw DomainError("steady_state_two_species: total mass must be positive");
    if (sys.a + sys.b <= 0.0)
        throw DomainError(
            "steady_state_two_species: degenerate system a = b = 0, every state is steady");
    const double s = total_mass / (sys.a + sys.b);
    return State{Vec{s * sys.b, s * sys.a}, 0.0};
}

}  // namespace mprk
