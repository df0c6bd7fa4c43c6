#include "mprk/mprk22.hpp"

#include <cmath>
#include <sstream>

namespace mprk {

namespace {

constexpr double kUnderflowFloor = 1e-300;

// Patankar weights divide by state components; denormal states poison the
// solve, so anything below the floor is a step failure rather than a NaN
// factory further down.
void check_state(const Vec& y, const char* what) {
    for (size_t i = 0; i < y.size(); ++i) {
        const double v = y[i];
        if (!std::isfinite(v) || v <= 0.0) {
            std::ostringstream os;
            os << what << ": non-positive component " << (i + 1) << " = " << v
               << " (M-matrix property violated)";
            throw StepError(os.str(), -1, static_cast<int>(i));
        }
        if (v < kUnderflowFloor) {
            std::ostringstream os;
            os << what << ": component " << (i + 1) << " = " << v
               << " fell below the underflow guard";
            throw StepError(os.str(), -1, static_cast<int>(i));
        }
    }
}

void neumaier_add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
        comp += (sum - t) + x;
    else
        comp += (x - t) + sum;
    sum = t;
}

// Re-evaluates the implicit relation x = y^n + F(x) at the solved x in flux
// form with compensated row sums. Mathematically the identity map on the
// exact solution; numerically it pins 1^T x to 1^T y^n at machine precision
// even when dt * rates is large, because paired production/destruction terms
// enter as one double with opposite signs. Falls back to the plain solution
// if cancellation noise would break strict positivity.
void conservative_flux_update(const GeneralPDS& pds, std::span<const StageEval> stages,
                              const Vec& denom, double dt, const Vec& y_n, Vec& x,
                              Vec& sum, Vec& comp) {
    const int n = pds.n_species();
    sum.assign(y_n.begin(), y_n.end());
    comp.assign(static_cast<size_t>(n), 0.0);

    if (pds.conservative()) {
        for (const StageEval& st : stages) {
            const double w = st.weight * dt;
            if (w == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const int g = gamma_index(j, i, st.weight);
                    const double term =
                        w * pds.production(st.t, *st.y, i, j) * (x[g] / denom[g]);
                    neumaier_add(sum[i], comp[i], term);
                    neumaier_add(sum[j], comp[j], -term);
                }
            }
        }
    } else {
        for (const StageEval& st : stages) {
            const double w = st.weight * dt;
            if (w == 0.0) continue;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const int g = gamma_index(j, i, st.weight);
                    const int h = gamma_index(i, j, st.weight);
                    neumaier_add(sum[i], comp[i],
                                 w * pds.production(st.t, *st.y, i, j) * (x[g] / denom[g]));
                    neumaier_add(sum[i], comp[i],
                                 -w * pds.destruction(st.t, *st.y, i, j) * (x[h] / denom[h]));
                }
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        const double v = sum[i] + comp[i];
        if (!(v > 0.0) || !std::isfinite(v)) return;  // keep the solver output
        sum[i] = v;
    }
    x.assign(sum.begin(), sum.end());
}

}  // namespace

MPRKParams::MPRKParams(double alpha) : alpha(alpha) {
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw ValidationError("MPRK22 is not defined for alpha = 0");
    a21 = alpha;
    b2 = 1.0 / (2.0 * alpha);
    b1 = 1.0 - b2;
    if (alpha >= 0.5)
        regime = SignRegime::NonnegativeAll;
    else if (alpha > 0.0)
        regime = SignRegime::NegativeB1;
    else
        regime = SignRegime::NegativeA21B2;
}

int gamma_index(int i, int j, double theta) { return theta >= 0.0 ? i : j; }

void sigma_weights_into(const Vec& y_n, const Vec& y_stage, double a21, Vec& out) {
    out.resize(y_n.size());
    if (a21 == 1.0) {  // exponents (0, 1)
        out.assign(y_stage.begin(), y_stage.end());
        return;
    }
    const double e_n = 1.0 - 1.0 / a21;
    const double e_stage = 1.0 / a21;
    for (size_t i = 0; i < y_n.size(); ++i) {
        const double v = std::exp(e_n * std::log(y_n[i]) + e_stage * std::log(y_stage[i]));
        if (!std::isfinite(v) || v <= 0.0) {
            std::ostringstream os;
            os << "sigma_weights: component " << (i + 1) << " overflowed to " << v;
            throw StepError(os.str(), -1, static_cast<int>(i));
        }
        out[i] = v;
    }
}

Vec sigma_weights(const Vec& y_n, const Vec& y_stage, double a21) {
    require_positive(y_n, "sigma_weights: y_n");
    require_positive(y_stage, "sigma_weights: y_stage");
    Vec out;
    sigma_weights_into(y_n, y_stage, a21, out);
    return out;
}

void assemble_patankar_matrix(const GeneralPDS& pds, std::span<const StageEval> stages,
                              const Vec& denom, double dt, Matrix& out) {
    const int n = pds.n_species();
    out.assign_zero(n, n);
    for (int i = 0; i < n; ++i) out(i, i) = 1.0;

    for (size_t k = 0; k < stages.size(); ++k) {
        const StageEval& st = stages[k];
        const double w = st.weight * dt;
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const int g = gamma_index(j, i, st.weight);
                const int h = gamma_index(i, j, st.weight);
                const double prod = w * (pds.production(st.t, *st.y, i, j) / denom[g]);
                const double dest = w * (pds.destruction(st.t, *st.y, i, j) / denom[h]);
                if (!std::isfinite(prod) || !std::isfinite(dest)) {
                    std::ostringstream os;
                    os << "assemble_patankar_matrix: non-finite contribution at pair ("
                       << (i + 1) << "," << (j + 1) << "), weight group " << (k + 1);
                    throw StepError(os.str());
                }
                out(i, g) -= prod;
                out(i, h) += dest;
            }
        }
    }
}

void mprk22_step_into(const GeneralPDS& pds, const Vec& y, double t, double dt,
                      const MPRKParams& params, StepWorkspace& ws, Vec& out) {
    check_state(y, "mprk22_step: input state");

    const StageEval stage[1] = {{&y, t, params.a21}};
    assemble_patankar_matrix(pds, stage, y, dt, ws.system_matrix);
    ws.rhs.assign(y.begin(), y.end());
    solve_dense_in_place(ws.system_matrix, ws.rhs, ws.y_stage, ws.perm);
    conservative_flux_update(pds, stage, y, dt, y, ws.y_stage, ws.rhs, ws.next);
    check_state(ws.y_stage, "mprk22_step: stage solution");

    sigma_weights_into(y, ws.y_stage, params.a21, ws.sigma);

    const StageEval update[2] = {{&y, t, params.b1},
                                 {&ws.y_stage, t + params.a21 * dt, params.b2}};
    assemble_patankar_matrix(pds, update, ws.sigma, dt, ws.system_matrix);
    ws.rhs.assign(y.begin(), y.end());
    solve_dense_in_place(ws.system_matrix, ws.rhs, out, ws.perm);
    conservative_flux_update(pds, update, ws.sigma, dt, y, out, ws.rhs, ws.next);
    check_state(out, "mprk22_step: update solution");
}

State mprk22_step(const GeneralPDS& pds, const State& y_n, double dt,
                  const MPRKParams& params, StepWorkspace& ws) {
    if (!(dt > 0.0)) throw DomainError("mprk22_step: dt must be positive");
    if (static_cast<int>(y_n.y.size()) != pds.n_species())
        throw ValidationError("mprk22_step: state length does not match the system");
    Vec out;
    mprk22_step_into(pds, y_n.y, y_n.t, dt, params, ws, out);
    return State{std::move(out), y_n.t + dt};
}

State mprk22_step(const GeneralPDS& pds, const State& y_n, double dt,
                  const MPRKParams& params) {
    StepWorkspace ws;
    return mprk22_step(pds, y_n, dt, params, ws);
}

std::vector<State> integrate(const GeneralPDS& pds, const State& y0, double dt,
                             long steps, const MPRKParams& params) {
    if (steps < 0) throw DomainError("integrate: step count must be nonnegative");
    std::vector<State> trajectory;
    trajectory.reserve(static_cast<size_t>(steps) + 1);
    trajectory.push_back(y0);
    StepWorkspace ws;
    for (long k = 0; k < steps; ++k) {
        try {
            trajectory.push_back(mprk22_step(pds, trajectory.back(), dt, params, ws));
        } catch (const StepError& e) {
            throw StepError(std::string(e.what()), k, e.component);
        } catch (const Error& e) {
            throw StepError(std::string(e.what()), k);
        }
        trajectory.back().t = y0.t + static_cast<double>(k + 1) * dt;
    }
    return trajectory;
}

}  // namespace mprk
