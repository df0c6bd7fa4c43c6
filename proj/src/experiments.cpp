#include "mprk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace mprk {

Vec initial_value(double delta) {
    if (!(delta >= 0.0 && delta < 0.5)) {
        std::ostringstream os;
        os << "initial_value: delta = " << delta
           << " outside [0, 0.5); positive initial data requires delta < 1/2";
        throw DomainError(os.str());
    }
    return Vec{0.5 + delta, 0.5 - delta};
}

Vec exact_solution(double delta, double a, double t) {
    const double decay = delta * std::exp(-2.0 * a * t);
    return Vec{0.5 + decay, 0.5 - decay};
}

const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::Stable: return "stable";
        case CellClass::Flagged: return "flagged";
        case CellClass::Unstable: return "unstable";
        case CellClass::Diverged: return "diverged";
    }
    return "?";
}

CellClass classify_distance(double d) {
    if (!std::isfinite(d)) return CellClass::Diverged;
    if (d < kStableDistance) return CellClass::Stable;
    if (d > kUnstableDistance) return CellClass::Unstable;
    return CellClass::Flagged;
}

namespace {

struct CellOutcome {
    Vec final_state;
    bool diverged = false;
    long failed_step = -1;
    double mass_drift = 0.0;
    double min_component = 0.0;
};

double mass(const Vec& y) {
    double s = 0.0;
    for (double v : y) s += v;
    return s;
}

// Marches one cell for `steps` steps. Once the float map reaches an exact
// fixed point or an exact 2-cycle the remaining iterates are determined, so
// the loop finishes early with the identical final state.
CellOutcome run_cell(const GeneralPDS& pds, const MPRKParams& params, const Vec& y0,
                     double dt, long steps, StepWorkspace& ws) {
    CellOutcome out;
    Vec y = y0, prev, next;
    bool have_prev = false;
    double min_comp = *std::min_element(y.begin(), y.end());
    const double mass0 = mass(y);

    for (long k = 0; k < steps; ++k) {
        try {
            mprk22_step_into(pds, y, static_cast<double>(k) * dt, dt, params, ws, next);
        } catch (const Error&) {
            out.diverged = true;
            out.failed_step = k;
            break;
        }
        for (double v : next) min_comp = std::min(min_comp, v);
        if (next == y) break;  // fixed point of the float map
        if (have_prev && next == prev) {
            // exact 2-cycle prev <-> y; parity of the leftover steps decides
            const long remaining = steps - (k + 1);
            if (remaining % 2 == 0) y = next;
            break;
        }
        prev = y;
        have_prev = true;
        std::swap(y, next);
    }

    out.min_component = min_comp;
    out.mass_drift = std::abs(mass(y) - mass0);
    out.final_state = std::move(y);
    return out;
}

int resolve_threads(int threads, size_t cells) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(cells, 1)));
}

ScanResult run_scan(std::vector<double> alpha_axis, std::vector<double> delta_axis,
                    double a, double dt, long steps, int threads) {
    if (!(a > 0.0)) throw ValidationError("scan: rate a must be positive");
    if (!(dt > 0.0)) throw ValidationError("scan: dt must be positive");
    if (steps < 1) throw ValidationError("scan: step count must be at least 1");
    for (double al : alpha_axis) {
        if (al == 0.0 || !std::isfinite(al))
            throw ValidationError("scan: MPRK22 undefined at alpha=0");
    }
    for (double d : delta_axis) {
        if (!(d > 0.0 && d < 0.5))
            throw ValidationError("scan: delta samples must lie inside (0, 0.5)");
    }

    ScanResult scan;
    scan.alpha_axis = std::move(alpha_axis);
    scan.delta_axis = std::move(delta_axis);
    scan.steps_used = steps;
    const size_t cells = scan.alpha_axis.size() * scan.delta_axis.size();
    scan.d_values.assign(cells, 0.0);
    scan.classes.assign(cells, CellClass::Stable);
    scan.final_states.assign(cells, Vec{});

    const LinearGeneralPDS pds = linear_as_general(TwoSpeciesSystem(a, a).as_linear());
    const Vec y_star{0.5, 0.5};

    std::vector<double> drift(cells, 0.0);
    std::vector<double> min_comp(cells, 1.0);

    auto worker = [&](size_t begin, size_t end) {
        StepWorkspace ws;
        for (size_t c = begin; c < end; ++c) {
            const size_t ai = c / scan.delta_axis.size();
            const size_t di = c % scan.delta_axis.size();
            const MPRKParams params(scan.alpha_axis[ai]);
            const Vec y0 = initial_value(scan.delta_axis[di]);
            CellOutcome cell = run_cell(pds, params, y0, dt, steps, ws);
            drift[c] = cell.mass_drift;
            min_comp[c] = cell.min_component;
            if (cell.diverged) {
                scan.d_values[c] = std::numeric_limits<double>::quiet_NaN();
                scan.classes[c] = CellClass::Diverged;
            } else {
                scan.d_values[c] = inf_norm_diff(cell.final_state, y_star);
                scan.classes[c] = classify_distance(scan.d_values[c]);
            }
            scan.final_states[c] = std::move(cell.final_state);
        }
    };

    const int n_threads = resolve_threads(threads, cells);
    if (n_threads <= 1) {
        worker(0, cells);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        const size_t chunk = (cells + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const size_t begin = std::min(cells, static_cast<size_t>(t) * chunk);
            const size_t end = std::min(cells, begin + chunk);
            pool.emplace_back([&, begin, end] {
                try {
                    worker(begin, end);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    scan.max_mass_drift = *std::max_element(drift.begin(), drift.end());
    scan.min_component = *std::min_element(min_comp.begin(), min_comp.end());
    return scan;
}

}  // namespace

FixedPointResult run_fixed_point_experiment(const ExperimentConfig& cfg) {
    if (!(cfg.a > 0.0)) throw ValidationError("run_fixed_point_experiment: a must be positive");
    if (!(cfg.dt > 0.0)) throw ValidationError("run_fixed_point_experiment: dt must be positive");
    if (cfg.steps < 0) throw ValidationError("run_fixed_point_experiment: steps must be nonnegative");
    const MPRKParams params(cfg.alpha);
    const LinearGeneralPDS pds = linear_as_general(TwoSpeciesSystem(cfg.a, cfg.a).as_linear());
    const Vec y0 = initial_value(cfg.delta);

    StepWorkspace ws;
    CellOutcome cell = run_cell(pds, params, y0, cfg.dt, cfg.steps, ws);

    FixedPointResult result;
    result.diverged = cell.diverged;
    result.failed_step = cell.failed_step;
    result.mass_drift = cell.mass_drift;
    result.min_component = cell.min_component;
    result.d = cell.diverged ? std::numeric_limits<double>::quiet_NaN()
                             : inf_norm_diff(cell.final_state, Vec{0.5, 0.5});
    result.final_state = std::move(cell.final_state);
    return result;
}

std::vector<double> half_offset_grid(double lo, double hi, int n) {
    if (n < 1) throw ValidationError("half_offset_grid: need at least one sample");
    const double h = (hi - lo) / static_cast<double>(n);
    std::vector<double> grid(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) grid[k] = lo + (static_cast<double>(k) + 0.5) * h;
    return grid;
}

std::vector<double> inclusive_grid(double lo, double hi, int n) {
    if (n < 2) throw ValidationError("inclusive_grid: need at least two samples");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> grid(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) grid[k] = lo + static_cast<double>(k) * h;
    grid.back() = hi;
    return grid;
}

ScanResult scan_delta(double alpha, double a, double dt, long steps, int n_samples,
                      int threads) {
    if (n_samples < 2) throw ValidationError("scan_delta: need at least two delta samples");
    return run_scan({alpha}, half_offset_grid(0.0, 0.5, n_samples), a, dt, steps, threads);
}

ScanResult scan_alpha_delta(std::vector<double> alpha_axis, std::vector<double> delta_axis,
                            double a, double dt, long steps, int threads) {
    if (alpha_axis.empty() || delta_axis.empty())
        throw ValidationError("scan_alpha_delta: axes must be nonempty");
    return run_scan(std::move(alpha_axis), std::move(delta_axis), a, dt, steps, threads);
}

std::optional<AlphaStar> extract_alpha_star(const ScanResult& scan) {
    const size_t na = scan.alpha_axis.size();
    std::optional<size_t> first_unstable;
    for (size_t ai = 0; ai < na; ++ai) {
        if (scan.alpha_axis[ai] > -0.5) break;  // band boundary lives at alpha <= -1/2
        bool unstable = false;
        for (size_t di = 0; di < scan.delta_axis.size(); ++di) {
            const CellClass c = scan.cell_class(ai, di);
            if (c == CellClass::Unstable || c == CellClass::Diverged) {
                unstable = true;
                break;
            }
        }
        if (unstable) {
            first_unstable = ai;
            break;
        }
    }
    if (!first_unstable || *first_unstable == 0) return std::nullopt;

    const double lo = scan.alpha_axis[*first_unstable - 1];
    const double hi = scan.alpha_axis[*first_unstable];
    return AlphaStar{0.5 * (lo + hi), hi - lo};
}

std::vector<ConvergenceRow> convergence_order(double alpha, double a, double delta,
                                              const std::vector<double>& dt_list,
                                              double horizon) {
    if (dt_list.size() < 3)
        throw ValidationError("convergence_order: need at least three step sizes");
    for (size_t i = 0; i < dt_list.size(); ++i) {
        if (!(dt_list[i] > 0.0))
            throw ValidationError("convergence_order: step sizes must be positive");
        if (i > 0 && !(dt_list[i] < dt_list[i - 1]))
            throw ValidationError("convergence_order: step sizes must be strictly decreasing");
    }
    if (!(horizon > 0.0)) throw ValidationError("convergence_order: horizon must be positive");

    const MPRKParams params(alpha);
    const LinearGeneralPDS pds = linear_as_general(TwoSpeciesSystem(a, a).as_linear());
    const Vec y0 = initial_value(delta);

    std::vector<ConvergenceRow> rows;
    rows.reserve(dt_list.size());
    StepWorkspace ws;
    for (double dt : dt_list) {
        ConvergenceRow row;
        row.dt = dt;
        const long steps = std::max<long>(1, std::lround(horizon / dt));
        const double t_end = static_cast<double>(steps) * dt;
        Vec y = y0, next;
        try {
            for (long k = 0; k < steps; ++k) {
                mprk22_step_into(pds, y, static_cast<double>(k) * dt, dt, params, ws, next);
                std::swap(y, next);
            }
            row.error = inf_norm_diff(y, exact_solution(delta, a, t_end));
        } catch (const Error&) {
            row.diverged = true;
            row.error = std::numeric_limits<double>::quiet_NaN();
        }
        if (!rows.empty() && !row.diverged && !rows.back().diverged) {
            const double ratio = rows.back().dt / dt;
            if (rows.back().error > 0.0 && row.error > 0.0 && ratio > 1.0)
                row.order = std::log(rows.back().error / row.error) / std::log(ratio);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mprk
