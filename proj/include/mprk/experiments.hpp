#pragma once

#include <optional>
#include <vector>

#include "mprk/mprk22.hpp"
#include "mprk/pds.hpp"

namespace mprk {

/// Stable/unstable binning of the distance d = |y* - y^M|_inf. The gap
/// between the thresholds makes the abrupt transition detectable; anything
/// landing inside it is flagged for manual review instead of silently binned.
constexpr double kStableDistance = 1e-6;
constexpr double kUnstableDistance = 1e-2;

/// One run of the symmetric two-species relaxation problem
///   y' = [[-a, a], [a, -a]] y,  y^0 = (1/2 + delta, 1/2 - delta).
struct ExperimentConfig {
    double a = 20.0;      // relaxation rate, 1/time
    double delta = 0.0;   // initial offset from the steady state, in [0, 0.5)
    double alpha = -0.5;  // scheme parameter, nonzero
    double dt = 1.0;
    long steps = 10000;
};

/// (1/2 + delta, 1/2 - delta). Throws DomainError outside [0, 0.5).
Vec initial_value(double delta);

/// (1/2)(1,1) + delta e^{-2 a t} (1,-1), the closed-form solution.
Vec exact_solution(double delta, double a, double t);

enum class CellClass : unsigned char { Stable, Flagged, Unstable, Diverged };
const char* to_string(CellClass c);

CellClass classify_distance(double d);

struct FixedPointResult {
    Vec final_state;
    double d = 0.0;  // |y* - y^M|_inf against y* = (1/2, 1/2)
    bool diverged = false;
    long failed_step = -1;
    double mass_drift = 0.0;     // |1^T y^M - 1^T y^0|
    double min_component = 0.0;  // over all iterates
};

FixedPointResult run_fixed_point_experiment(const ExperimentConfig& cfg);

/// Grid of distances d(alpha, delta). Cells are independent; the scan runs
/// them on a worker pool with one workspace per worker, and results are
/// identical for every thread count.
struct ScanResult {
    std::vector<double> alpha_axis;
    std::vector<double> delta_axis;
    std::vector<double> d_values;      // row-major: [alpha index][delta index]
    std::vector<CellClass> classes;
    std::vector<Vec> final_states;     // spurious limits stay inspectable
    long steps_used = 0;
    double max_mass_drift = 0.0;
    double min_component = 0.0;

    size_t index(size_t ai, size_t di) const { return ai * delta_axis.size() + di; }
    double d(size_t ai, size_t di) const { return d_values[index(ai, di)]; }
    CellClass cell_class(size_t ai, size_t di) const { return classes[index(ai, di)]; }
};

/// n equidistant samples of (lo, hi) with half-spacing offset, endpoints
/// excluded: lo + (k + 1/2) (hi - lo) / n.
std::vector<double> half_offset_grid(double lo, double hi, int n);

/// n equidistant samples of [lo, hi], endpoints included.
std::vector<double> inclusive_grid(double lo, double hi, int n);

/// delta sweep at fixed alpha; the delta grid is half_offset_grid(0, 0.5, n).
/// threads <= 0 selects the available hardware parallelism.
ScanResult scan_delta(double alpha, double a, double dt, long steps, int n_samples,
                      int threads = 0);

/// Full (alpha, delta) map. Rejects grids containing alpha = 0.
ScanResult scan_alpha_delta(std::vector<double> alpha_axis, std::vector<double> delta_axis,
                            double a, double dt, long steps, int threads = 0);

struct AlphaStar {
    double value = 0.0;
    double uncertainty = 0.0;  // grid spacing
};

/// Boundary of the unstable band among columns with alpha <= -1/2: midpoint
/// between the last all-stable column and the first column containing an
/// unstable cell. Empty when no such column exists.
std::optional<AlphaStar> extract_alpha_star(const ScanResult& scan);

struct ConvergenceRow {
    double dt = 0.0;
    double error = 0.0;
    std::optional<double> order;  // empty on the first row and around failures
    bool diverged = false;
};

/// Errors against the closed-form solution at the fixed horizon, with the
/// experimental order of convergence between consecutive step sizes.
/// dt_list must hold at least three strictly decreasing positive entries.
std::vector<ConvergenceRow> convergence_order(double alpha, double a, double delta,
                                              const std::vector<double>& dt_list,
                                              double horizon = 1.0);

}  // namespace mprk
