#pragma once

#include <span>
#include <vector>

#include "mprk/pds.hpp"

namespace mprk {

/// Sign pattern of the Butcher coefficients a21 = alpha, b1 = 1 - 1/(2 alpha),
/// b2 = 1/(2 alpha). The three cases route Patankar weights differently.
enum class SignRegime {
    NonnegativeAll,  // alpha >= 1/2: a21, b1, b2 >= 0
    NegativeB1,      // 0 < alpha < 1/2: b1 < 0
    NegativeA21B2,   // alpha < 0: a21 < 0 and b2 < 0
};

struct MPRKParams {
    double alpha;
    double a21;
    double b1;
    double b2;
    SignRegime regime;

    /// Throws ValidationError for alpha = 0 (the scheme is undefined there).
    explicit MPRKParams(double alpha);
};

/// Index function selecting which species supplies the Patankar weight.
/// Returns i for theta >= 0 and j for theta < 0.
int gamma_index(int i, int j, double theta);

/// Stage-interpolated Patankar denominators
///   sigma_i = (y_i^n)^(1 - 1/a21) (y_i^stage)^(1/a21),
/// computed through exp/log so negative and fractional exponents stay robust.
/// Throws StepError (with the component index) if a weight is not finite.
Vec sigma_weights(const Vec& y_n, const Vec& y_stage, double a21);

/// One weighted evaluation point of the right-hand side.
struct StageEval {
    const Vec* y;   // state the rates are evaluated at
    double t;       // evaluation time
    double weight;  // RK weight theta_k
};

/// Builds M so that the implicit stage/update relation reads M x = y^n:
/// for each weight theta_k and each pair (i, j), the production term
/// theta_k dt p_ij contributes -theta_k dt p_ij / denom_g to entry (i, g)
/// with g = gamma_index(j, i, theta_k), and the destruction term contributes
/// +theta_k dt d_ij / denom_h to entry (i, h) with h = gamma_index(i, j,
/// theta_k). The diagonal starts at 1. For conservative systems every column
/// of M sums to one, which makes M a nonsingular M-matrix.
void assemble_patankar_matrix(const GeneralPDS& pds, std::span<const StageEval> stages,
                              const Vec& denom, double dt, Matrix& out);

/// Scratch space reused across steps; each concurrent walker owns one.
struct StepWorkspace {
    Vec y_stage;
    Vec sigma;
    Matrix system_matrix;
    Vec rhs;
    Vec next;
    std::vector<int> perm;
};

/// One MPRK22(alpha) step: solve the stage system with weight {a21} and
/// denominators y^n, form sigma, then solve the single combined update
/// system with weights {b1, b2}. Unconditionally positive; conserves
/// 1^T y for conservative systems.
State mprk22_step(const GeneralPDS& pds, const State& y_n, double dt,
                  const MPRKParams& params, StepWorkspace& ws);
State mprk22_step(const GeneralPDS& pds, const State& y_n, double dt,
                  const MPRKParams& params);

/// Allocation-free core used by the scan loops.
void mprk22_step_into(const GeneralPDS& pds, const Vec& y, double t, double dt,
                      const MPRKParams& params, StepWorkspace& ws, Vec& out);

/// sigma_weights without the positivity revalidation, writing into out.
void sigma_weights_into(const Vec& y_n, const Vec& y_stage, double a21, Vec& out);

/// Fixed-step trajectory of steps+1 states starting at y0 with t_n = n dt.
/// Step failures are rethrown as StepError carrying the failing step index.
std::vector<State> integrate(const GeneralPDS& pds, const State& y0, double dt,
                             long steps, const MPRKParams& params);

}  // namespace mprk
