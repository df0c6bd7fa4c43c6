// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mprk/experiments.hpp"
#include "mprk/mprk22.hpp"
#include "mprk/pds.hpp"
#include "mprk/stability.hpp"
#include "support/oracles.hpp"

using namespace mprk;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;

    void require(bool ok, const std::string& detail) {
        if (!ok && pass) {
            pass = false;
            note = detail;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// 1. positivity + conservation on 1000 randomized conservative systems
// ---------------------------------------------------------------------------
Outcome criterion_positivity_conservation() {
    Outcome out;
    std::mt19937_64 rng(20240881);
    const double alphas[8] = {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
    std::uniform_real_distribution<double> log_dt(-3.0, 3.0);
    std::uniform_real_distribution<double> y_init(0.5, 2.0);

    StepWorkspace ws;
    for (int s = 0; s < 1000 && out.pass; ++s) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix a = oracles::random_conservative_matrix(rng, n, 1000.0);
        const LinearGeneralPDS pds = linear_as_general(LinearPDS(a));
        const MPRKParams params(alphas[rng() % 8]);
        const double dt = std::pow(10.0, log_dt(rng));

        Vec y(static_cast<size_t>(n));
        for (auto& v : y) v = y_init(rng);

        for (int step = 0; step < 2 && out.pass; ++step) {
            double mass_before = 0.0;
            for (double v : y) mass_before += v;
            State next;
            try {
                next = mprk22_step(pds, State{y, 0.0}, dt, params, ws);
            } catch (const Error& e) {
                out.require(false, std::string("step failed: ") + e.what());
                break;
            }
            double mass_after = 0.0;
            for (int i = 0; i < n; ++i) {
                out.require(ws.y_stage[i] > 0.0, "stage component not positive");
                out.require(next.y[i] > 0.0, "update component not positive");
                mass_after += next.y[i];
            }
            out.require(std::abs(mass_after - mass_before) <= 1e-12 * mass_before,
                        "relative mass drift " +
                            fmt(std::abs(mass_after - mass_before) / mass_before) +
                            " at dt=" + fmt(dt) + " alpha=" + fmt(params.alpha));
            y = next.y;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2. M-matrix structure of every assembled system in the same suite
// ---------------------------------------------------------------------------
Outcome criterion_m_matrix_structure() {
    Outcome out;
    std::mt19937_64 rng(20240882);
    const double alphas[8] = {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
    std::uniform_real_distribution<double> log_dt(-3.0, 3.0);
    std::uniform_real_distribution<double> y_init(0.5, 2.0);

    auto check_matrix = [&](const Matrix& m) {
        // Entries reach ~1e7 here, so the unit column sums are verified at
        // the matrix's own floating-point scale.
        const double scale = std::max(1.0, max_abs(m));
        for (int j = 0; j < m.rows(); ++j) {
            out.require(m(j, j) >= 1.0, "diagonal below one");
            double col = 0.0;
            for (int i = 0; i < m.rows(); ++i) {
                if (i != j) out.require(m(i, j) <= 0.0, "positive off-diagonal");
                col += m(i, j);
            }
            out.require(std::abs(col - 1.0) <= 1e-12 * scale,
                        "column sum off by " + fmt(std::abs(col - 1.0)) +
                            " at scale " + fmt(scale));
        }
    };

    StepWorkspace ws;
    for (int s = 0; s < 1000 && out.pass; ++s) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix a = oracles::random_conservative_matrix(rng, n, 1000.0);
        const LinearGeneralPDS pds = linear_as_general(LinearPDS(a));
        const MPRKParams params(alphas[rng() % 8]);
        const double dt = std::pow(10.0, log_dt(rng));

        Vec y(static_cast<size_t>(n));
        for (auto& v : y) v = y_init(rng);

        const StageEval stage[1] = {{&y, 0.0, params.a21}};
        Matrix m_stage;
        assemble_patankar_matrix(pds, stage, y, dt, m_stage);
        check_matrix(m_stage);

        const Vec y2 = solve_dense(m_stage, y);
        Vec sigma;
        sigma_weights_into(y, y2, params.a21, sigma);
        const StageEval update[2] = {{&y, 0.0, params.b1}, {&y2, 0.0, params.b2}};
        Matrix m_update;
        assemble_patankar_matrix(pds, update, sigma, dt, m_update);
        check_matrix(m_update);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 3. second order on the relaxation problem for five alpha values
// ---------------------------------------------------------------------------
Outcome criterion_order() {
    Outcome out;
    std::vector<double> dt_list;
    for (int k = 3; k <= 10; ++k) dt_list.push_back(std::pow(2.0, -k));
    for (double alpha : {-1.0, -0.5, 0.25, 0.5, 1.0}) {
        const auto rows = convergence_order(alpha, 1.0, 0.25, dt_list, 1.0);
        const auto& order = rows.back().order;
        out.require(order.has_value(), "missing order at alpha=" + fmt(alpha));
        if (order)
            out.require(*order >= 1.9 && *order <= 2.1,
                        "observed order " + fmt(*order) + " at alpha=" + fmt(alpha));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 4. stability-function identities
// ---------------------------------------------------------------------------
Outcome criterion_stability_identities() {
    Outcome out;
    std::mt19937_64 rng(20240884);
    std::uniform_real_distribution<double> log_mag(std::log10(1e-3), std::log10(4.0));

    for (int k = 0; k < 100; ++k) {
        const double alpha = (k % 2 ? 1.0 : -1.0) * std::pow(10.0, log_mag(rng));
        out.require(std::abs(stability_function(alpha, 0.0) - 1.0) <= 1e-14,
                    "R(0) != 1 at alpha=" + fmt(alpha));
    }

    std::uniform_real_distribution<double> open(0.005, 0.495);
    for (int k = 0; k < 50; ++k) {
        const double ap = open(rng);
        out.require(std::abs(stability_function(ap, z_star(ap)) + 1.0) <= 1e-9,
                    "R(z*) != -1 at alpha=" + fmt(ap));
        const double an = -open(rng) * 0.999;  // stay inside (-0.5, 0)
        out.require(std::abs(stability_function(an, z_star(an)) + 1.0) <= 1e-9,
                    "R(z*) != -1 at alpha=" + fmt(an));
    }

    std::uniform_real_distribution<double> neg(-4.0, -1e-3);
    for (int k = 0; k < 50; ++k) {
        const double alpha = neg(rng);
        out.require(std::abs(stability_function(alpha, -1e8) -
                             r_limit_negative_alpha(alpha)) <= 1e-6,
                    "limit mismatch at alpha=" + fmt(alpha));
    }

    std::vector<double> z_grid(10000);
    for (int k = 0; k < 10000; ++k)
        z_grid[k] = -std::pow(10.0, -6.0 + 12.0 * k / 9999.0);
    for (double alpha : {-0.1, -0.25, -0.5, -1.0, -2.0, -4.0}) {
        const double limit = r_limit_negative_alpha(alpha);
        double prev = -2.0;
        for (auto it = z_grid.rbegin(); it != z_grid.rend(); ++it) {
            const double r = stability_function(alpha, *it);
            out.require(r > prev, "R not increasing at alpha=" + fmt(alpha));
            out.require(r > limit && r < 1.0, "R outside (limit, 1)");
            prev = r;
        }
    }

    for (double alpha : {-4.0, -2.0, -1.0, -0.5, 0.5, 0.75, 1.0, 2.0, 4.0}) {
        for (double z : z_grid)
            out.require(std::abs(stability_function(alpha, z)) < 1.0,
                        "|R| >= 1 at alpha=" + fmt(alpha) + ", z=" + fmt(z));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 5. Jacobian equivalences at y* = (1/2, 1/2)
// ---------------------------------------------------------------------------
Outcome criterion_jacobians() {
    Outcome out;
    const TwoSpeciesSystem sys(1.0, 1.0);
    const LinearPDS lin = sys.as_linear();
    const LinearGeneralPDS pds = linear_as_general(lin);
    const Vec star{0.5, 0.5};
    const double h = 1e-6;

    for (double alpha : {-1.0, -0.5}) {
        const MPRKParams params(alpha);
        for (double dt : {0.1, 1.0, 10.0}) {
            const Matrix analytic = dg_analytic_2x2(sys, dt, alpha);

            auto map = [&](const Vec& y) {
                return mprk22_step(pds, State{y, 0.0}, dt, params).y;
            };
            out.require(max_abs_diff(fd_jacobian(map, star, h), analytic) <= 1e-6,
                        "fd vs analytic at alpha=" + fmt(alpha) + ", dt=" + fmt(dt));

            const ImplicitJacobians jacs = psi_phi_jacobians(lin, star, dt, alpha);
            out.require(max_abs_diff(dg_implicit(jacs), analytic) <= 1e-12,
                        "implicit vs analytic at alpha=" + fmt(alpha) + ", dt=" + fmt(dt));

            const Matrix& a = lin.rate_matrix();
            using oracles::fd_block;
            const Matrix fd_du_psi = fd_block(
                [&](const Vec& u) { return oracles::stage_residual(a, u, star, dt, alpha); },
                star, h);
            const Matrix fd_dv_psi = fd_block(
                [&](const Vec& v) { return oracles::stage_residual(a, star, v, dt, alpha); },
                star, h);
            const Matrix fd_du_phi = fd_block(
                [&](const Vec& u) {
                    return oracles::update_residual(a, u, star, star, dt, alpha);
                },
                star, h);
            const Matrix fd_dv_phi = fd_block(
                [&](const Vec& v) {
                    return oracles::update_residual(a, star, v, star, dt, alpha);
                },
                star, h);
            const Matrix fd_dw_phi = fd_block(
                [&](const Vec& w) {
                    return oracles::update_residual(a, star, star, w, dt, alpha);
                },
                star, h);
            out.require(max_abs_diff(jacs.du_psi, fd_du_psi) <= 1e-6, "du_psi vs fd");
            out.require(max_abs_diff(jacs.dv_psi, fd_dv_psi) <= 1e-6, "dv_psi vs fd");
            out.require(max_abs_diff(jacs.du_phi, fd_du_phi) <= 1e-6, "du_phi vs fd");
            out.require(max_abs_diff(jacs.dv_phi, fd_dv_phi) <= 1e-6, "dv_phi vs fd");
            out.require(max_abs_diff(jacs.dw_phi, fd_dw_phi) <= 1e-6, "dw_phi vs fd");

            const auto ev = eigenvalues_2x2(analytic);
            const double r = stability_function(alpha, dt * sys.eigenvalue());
            out.require(std::abs(ev[1] - 1.0) <= 1e-8, "unit eigenvalue missing");
            out.require(std::abs(ev[0] - r) <= 1e-8, "eigenvalue != R(dt lambda)");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 6. spurious fixed point at a = 20, alpha = -0.5, dt = 1
// ---------------------------------------------------------------------------
Outcome criterion_spurious_fixed_point() {
    Outcome out;
    ExperimentConfig cfg;
    cfg.a = 20.0;
    cfg.alpha = -0.5;
    cfg.dt = 1.0;
    cfg.steps = 10000;

    cfg.delta = 0.23;
    const FixedPointResult near = run_fixed_point_experiment(cfg);
    out.require(!near.diverged && near.d <= 1e-6,
                "delta=0.23 did not converge to the steady state, d=" + fmt(near.d));

    cfg.delta = 0.24;
    const FixedPointResult far = run_fixed_point_experiment(cfg);
    out.require(!far.diverged && far.d >= 1e-2,
                "delta=0.24 not spurious, d=" + fmt(far.d));
    out.require(std::abs(far.final_state[0] - 0.5) >= 1e-2, "final state is (1/2, 1/2)");
    return out;
}

// ---------------------------------------------------------------------------
// 7. critical delta at a = 200 inside [0.05, 0.07]
// ---------------------------------------------------------------------------
Outcome criterion_critical_delta() {
    Outcome out;
    const ScanResult scan = scan_delta(-0.5, 200.0, 1.0, 10000, 200);
    size_t first_unstable = scan.delta_axis.size();
    for (size_t di = 0; di < scan.delta_axis.size(); ++di) {
        if (scan.cell_class(0, di) == CellClass::Unstable) {
            first_unstable = di;
            break;
        }
    }
    out.require(first_unstable > 0 && first_unstable < scan.delta_axis.size(),
                "no stable-to-unstable transition found");
    if (out.pass) {
        const double mid = 0.5 * (scan.delta_axis[first_unstable - 1] +
                                  scan.delta_axis[first_unstable]);
        out.require(mid >= 0.05 && mid <= 0.07,
                    "transition at delta=" + fmt(mid) + " outside [0.05, 0.07]");
        for (size_t di = 0; di < first_unstable; ++di)
            out.require(scan.cell_class(0, di) == CellClass::Stable,
                        "non-stable cell below the transition");
    }
    return out;
}

// ---------------------------------------------------------------------------
// 8. alpha* boundary from the zoomed band, plus the alpha >= 1/2 companion
// ---------------------------------------------------------------------------
Outcome criterion_alpha_star() {
    Outcome out;
    const auto alpha_axis = inclusive_grid(-0.60, -0.50, 201);  // resolution 5e-4
    const auto delta_axis = half_offset_grid(0.0, 0.5, 160);
    const ScanResult zoom =
        scan_alpha_delta(alpha_axis, delta_axis, 200.0, 1.0, 10000, 8);

    const auto star = extract_alpha_star(zoom);
    out.require(star.has_value(), "no alpha* boundary found in the band");
    if (star)
        out.require(star->value >= -0.57 && star->value <= -0.55,
                    "alpha* = " + fmt(star->value) + " outside [-0.57, -0.55]");

    const ScanResult companion = scan_alpha_delta(
        inclusive_grid(0.5, 2.0, 16), delta_axis, 200.0, 1.0, 10000, 8);
    for (size_t ai = 0; ai < companion.alpha_axis.size(); ++ai)
        for (size_t di = 0; di < companion.delta_axis.size(); ++di)
            out.require(companion.cell_class(ai, di) == CellClass::Stable,
                        "unstable cell at alpha=" + fmt(companion.alpha_axis[ai]));
    return out;
}

// ---------------------------------------------------------------------------
// 9. conditional-stability dynamics around z*(alpha)
// ---------------------------------------------------------------------------
Outcome criterion_conditional_dynamics() {
    Outcome out;
    for (double alpha : {0.25, -0.25}) {
        const double zs = z_star(alpha);
        const MPRKParams params(alpha);

        auto max_deviation_within = [&](double z_target, int max_steps, double stop_above,
                                        double stop_below) {
            // dt = 1, lambda = -2a = z_target
            const TwoSpeciesSystem sys(-z_target / 2.0, -z_target / 2.0);
            const LinearGeneralPDS pds = linear_as_general(sys.as_linear());
            StepWorkspace ws;
            Vec y{0.5 + 1e-8, 0.5 - 1e-8};
            double dev = 1e-8;
            Vec next;
            for (int k = 0; k < max_steps; ++k) {
                mprk22_step_into(pds, y, 0.0, 1.0, params, ws, next);
                std::swap(y, next);
                dev = std::abs(y[0] - 0.5);
                if (dev >= stop_above || dev <= stop_below) break;
            }
            return dev;
        };

        const double grown = max_deviation_within(1.1 * zs, 200, 1e-7, 0.0);
        out.require(grown >= 1e-7,
                    "perturbation did not grow x10 at alpha=" + fmt(alpha) +
                        " (reached " + fmt(grown) + ")");

        const double decayed = max_deviation_within(0.9 * zs, 200, 1.0, 1e-10);
        out.require(decayed <= 1e-10,
                    "perturbation did not decay below 1e-10 at alpha=" + fmt(alpha) +
                        " (reached " + fmt(decayed) + ")");
    }
    return out;
}

// ---------------------------------------------------------------------------
// 10. byte-identical scan output across thread counts (through the CLI)
// ---------------------------------------------------------------------------
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome criterion_determinism() {
    Outcome out;
    const std::string cli = MPRK_CLI_PATH;
    const std::string base = " scan-alpha-delta --alpha-min -0.56 --alpha-max -0.50"
                             " --alpha-samples 7 --delta-samples 24 --a 200 --dt 1"
                             " --steps 5000";
    const struct {
        const char* threads;
        const char* path;
    } runs[] = {{"1", "/tmp/mprk_acc_t1.csv"},
                {"2", "/tmp/mprk_acc_t2.csv"},
                {"8", "/tmp/mprk_acc_t8.csv"}};
    for (const auto& r : runs) {
        const std::string cmd =
            cli + base + " --threads " + r.threads + " --out " + r.path;
        out.require(std::system(cmd.c_str()) == 0, "scan invocation failed");
    }
    const std::string t1 = slurp(runs[0].path);
    out.require(!t1.empty(), "empty scan output");
    out.require(t1 == slurp(runs[1].path), "threads=1 vs threads=2 outputs differ");
    out.require(t1 == slurp(runs[2].path), "threads=1 vs threads=8 outputs differ");
    return out;
}

struct Criterion {
    int id;
    const char* label;
    std::function<Outcome()> run;
    double budget_seconds;  // 0 = no stated budget
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "positivity + conservation, 1000 random systems", criterion_positivity_conservation, 10.0},
        {2, "M-matrix structure of assembled systems", criterion_m_matrix_structure, 0.0},
        {3, "second-order convergence, five alpha values", criterion_order, 1.0},
        {4, "stability-function identities", criterion_stability_identities, 0.0},
        {5, "Jacobian equivalences at the fixed point", criterion_jacobians, 0.0},
        {6, "spurious fixed point at a=20 (delta 0.23 vs 0.24)", criterion_spurious_fixed_point, 0.1},
        {7, "critical delta at a=200 inside [0.05, 0.07]", criterion_critical_delta, 5.0},
        {8, "alpha* in [-0.57, -0.55] plus stable companion scan", criterion_alpha_star, 180.0},
        {9, "conditional-stability growth/decay around z*", criterion_conditional_dynamics, 0.0},
        {10, "byte-identical scans across thread counts", criterion_determinism, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.note = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
            outcome.pass = false;
            if (outcome.note.empty())
                outcome.note = "runtime " + fmt(seconds) + " s exceeds budget " +
                               fmt(c.budget_seconds) + " s";
        }
        std::printf("%s  %2d  %-52s %8.2f s%s%s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                    c.label, seconds, outcome.note.empty() ? "" : "  -- ",
                    outcome.note.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
