// Command-line frontend: trajectory integration, stability queries, and the
// delta / (alpha, delta) fixed-point scans, all emitting deterministic CSV.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mprk/csv.hpp"
#include "mprk/experiments.hpp"
#include "mprk/mprk22.hpp"
#include "mprk/pds.hpp"
#include "mprk/stability.hpp"

namespace {

using mprk::format_double;
using mprk::Vec;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Provenance comment for output files. Performance and routing knobs
// (--threads, --out) do not affect the computed rows and are filtered so
// that reruns with different worker counts stay byte-identical.
std::string join_invocation(int argc, char** argv) {
    std::ostringstream os;
    os << '#';
    for (int i = 0; i < argc; ++i) {
        const std::string_view arg(argv[i]);
        if (arg == "--threads" || arg == "--out") {
            ++i;  // skip the value too
            continue;
        }
        if (arg.starts_with("--threads=") || arg.starts_with("--out=")) continue;
        os << ' ' << arg;
    }
    return os.str();
}

// Output sink: --out PATH or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw mprk::ValidationError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

int resolve_threads(int flag_value) {
    // The environment variable takes precedence over the flag.
    if (const char* env = std::getenv("MPRK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
        std::cerr << "warning: ignoring unparsable MPRK_THREADS='" << env << "'\n";
    }
    return flag_value;
}

const char* class_of_modulus(double modulus) {
    if (modulus < 1.0 - 1e-12) return "stable";
    if (modulus <= 1.0 + 1e-12) return "marginal";
    return "unstable";
}

struct IntegrateArgs {
    double alpha = -0.5;
    double dt = 1.0;
    long steps = 10000;
    std::optional<double> a, b, delta;
    std::string matrix_path;
    std::string y0_list;
    std::string out;
};

int run_integrate(const IntegrateArgs& args, const std::string& provenance) {
    const bool two_species_group = args.a || args.b || args.delta;
    const bool matrix_group = !args.matrix_path.empty() || !args.y0_list.empty();
    if (two_species_group == matrix_group) {
        std::cerr << "error: use exactly one of the (--a/--b/--delta) or (--matrix/--y0) "
                     "input groups\n";
        return kExitUsage;
    }

    std::unique_ptr<mprk::GeneralPDS> pds;
    Vec y0;
    if (two_species_group) {
        if (!args.a) {
            std::cerr << "error: --a is required for the two-species system\n";
            return kExitUsage;
        }
        const mprk::TwoSpeciesSystem sys(*args.a, args.b.value_or(*args.a));
        pds = std::make_unique<mprk::LinearGeneralPDS>(mprk::linear_as_general(sys.as_linear()));
        y0 = mprk::initial_value(args.delta.value_or(0.0));
    } else {
        if (args.matrix_path.empty() || args.y0_list.empty()) {
            std::cerr << "error: --matrix and --y0 must be given together\n";
            return kExitUsage;
        }
        const mprk::Matrix a = mprk::read_matrix_csv_file(args.matrix_path);
        pds = std::make_unique<mprk::LinearGeneralPDS>(
            mprk::linear_as_general(mprk::LinearPDS(a)));
        y0 = mprk::parse_double_list(args.y0_list, "--y0");
        if (static_cast<int>(y0.size()) != a.rows()) {
            std::cerr << "error: --y0 has " << y0.size() << " entries for a " << a.rows()
                      << "x" << a.rows() << " matrix\n";
            return kExitUsage;
        }
        mprk::require_positive(y0, "--y0");
    }

    const mprk::MPRKParams params(args.alpha);
    std::vector<mprk::State> trajectory;
    try {
        trajectory = mprk::integrate(*pds, mprk::State{y0, 0.0}, args.dt, args.steps, params);
    } catch (const mprk::StepError& e) {
        std::cerr << "error: integration failed at step " << e.step_index << ": " << e.what()
                  << "\n";
        return kExitRuntime;
    }

    Output out(args.out);
    std::ostream& os = out.stream();
    os << provenance << '\n';
    os << "step,t";
    for (size_t i = 1; i <= y0.size(); ++i) os << ",y_" << i;
    os << ",mass\n";
    for (size_t n = 0; n < trajectory.size(); ++n) {
        const mprk::State& s = trajectory[n];
        double mass = 0.0;
        for (double v : s.y) mass += v;
        os << n << ',' << format_double(s.t);
        for (double v : s.y) os << ',' << format_double(v);
        os << ',' << format_double(mass) << '\n';
    }
    return 0;
}

void write_scan_rows(std::ostream& os, const mprk::ScanResult& scan, bool with_alpha) {
    for (size_t ai = 0; ai < scan.alpha_axis.size(); ++ai) {
        for (size_t di = 0; di < scan.delta_axis.size(); ++di) {
            if (with_alpha) os << format_double(scan.alpha_axis[ai]) << ',';
            os << format_double(scan.delta_axis[di]) << ','
               << format_double(scan.d(ai, di)) << ','
               << to_string(scan.cell_class(ai, di)) << '\n';
        }
    }
}

struct ScanDeltaArgs {
    double alpha = -0.5;
    double a = 20.0;
    double dt = 1.0;
    long steps = 10000;
    int samples = 200;
    int threads = 0;
    std::string out;
};

int run_scan_delta(const ScanDeltaArgs& args, const std::string& provenance) {
    const mprk::ScanResult scan = mprk::scan_delta(args.alpha, args.a, args.dt, args.steps,
                                                   args.samples, resolve_threads(args.threads));
    Output out(args.out);
    std::ostream& os = out.stream();
    os << provenance << '\n';
    os << "delta,d,class\n";
    write_scan_rows(os, scan, /*with_alpha=*/false);
    return 0;
}

struct ScanAlphaDeltaArgs {
    double alpha_min = -2.0;
    double alpha_max = 2.0;
    int alpha_samples = 241;
    int delta_samples = 160;
    double a = 200.0;
    double dt = 1.0;
    long steps = 10000;
    int threads = 0;
    bool explicit_alpha_grid = false;
    std::string out;
};

int run_scan_alpha_delta(const ScanAlphaDeltaArgs& args, const std::string& provenance) {
    // The default grid spans (-2, 2) with a quarter-cell offset: a symmetric
    // uniform grid with an odd sample count would contain alpha = 0, where
    // the scheme is undefined. Explicit grids are endpoint-inclusive.
    std::vector<double> alpha_axis;
    if (args.explicit_alpha_grid) {
        alpha_axis = mprk::inclusive_grid(args.alpha_min, args.alpha_max, args.alpha_samples);
    } else {
        const double h = (args.alpha_max - args.alpha_min) / args.alpha_samples;
        alpha_axis.resize(args.alpha_samples);
        for (int k = 0; k < args.alpha_samples; ++k)
            alpha_axis[k] = args.alpha_min + (k + 0.25) * h;
    }
    const std::vector<double> delta_axis = mprk::half_offset_grid(0.0, 0.5, args.delta_samples);

    const mprk::ScanResult scan = mprk::scan_alpha_delta(alpha_axis, delta_axis, args.a, args.dt,
                                                         args.steps, resolve_threads(args.threads));
    Output out(args.out);
    std::ostream& os = out.stream();
    os << provenance << '\n';
    os << "alpha,delta,d,class\n";
    write_scan_rows(os, scan, /*with_alpha=*/true);
    if (const auto star = mprk::extract_alpha_star(scan)) {
        os << "# alpha_star," << format_double(star->value) << ','
           << format_double(star->uncertainty) << '\n';
    }
    return 0;
}

struct StabilityArgs {
    double alpha = 0.0;
    std::optional<double> z, dt, lambda;
    std::optional<double> zmin, zmax;
    std::optional<int> n;
    std::string out;
};

int run_stability(const StabilityArgs& args, const std::string& provenance) {
    Output out(args.out);
    std::ostream& os = out.stream();

    if (args.n) {  // sweep mode
        if (!args.zmin || !args.zmax || *args.n < 2) {
            std::cerr << "error: sweep mode needs --zmin, --zmax and --n >= 2\n";
            return kExitUsage;
        }
        const std::vector<double> grid = mprk::inclusive_grid(*args.zmin, *args.zmax, *args.n);
        os << provenance << '\n';
        os << "z,R\n";
        for (double z : grid) {
            os << format_double(z) << ',';
            try {
                os << format_double(mprk::stability_function(args.alpha, z));
            } catch (const mprk::DomainError&) {
                os << "pole";
            }
            os << '\n';
        }
        return 0;
    }

    std::optional<double> z = args.z;
    if (!z && args.dt && args.lambda) z = *args.dt * *args.lambda;

    if (!z) {  // no argument: report the critical z* alone
        const double zs = mprk::z_star(args.alpha);
        os << provenance << '\n';
        os << "z_star\n" << format_double(zs) << '\n';
        return 0;
    }

    const double r = mprk::stability_function(args.alpha, *z);
    const double modulus = std::abs(r);
    std::optional<double> zs;
    if ((args.alpha > 0.0 && args.alpha < 0.5) || (args.alpha > -0.5 && args.alpha < 0.0))
        zs = mprk::z_star(args.alpha);
    os << provenance << '\n';
    os << "R,|R|,class,z_star\n";
    os << format_double(r) << ',' << format_double(modulus) << ',' << class_of_modulus(modulus)
       << ',' << (zs ? format_double(*zs) : "") << '\n';
    return 0;
}

struct ConvergenceArgs {
    double alpha = 1.0;
    double a = 1.0;
    double delta = 0.25;
    double horizon = 1.0;
    std::string dt_list;
    std::string out;
};

int run_convergence(const ConvergenceArgs& args, const std::string& provenance) {
    std::vector<double> dt_list;
    if (args.dt_list.empty()) {
        for (int k = 3; k <= 10; ++k) dt_list.push_back(std::pow(2.0, -k));
    } else {
        dt_list = mprk::parse_double_list(args.dt_list, "--dt-list");
    }

    const auto rows = mprk::convergence_order(args.alpha, args.a, args.delta, dt_list,
                                              args.horizon);
    Output out(args.out);
    std::ostream& os = out.stream();
    os << provenance << '\n';
    os << "dt,error,order\n";
    bool any_diverged = false;
    for (const auto& row : rows) {
        os << format_double(row.dt) << ',';
        if (row.diverged) {
            os << "diverged,";
            any_diverged = true;
        } else {
            os << format_double(row.error) << ',';
        }
        if (row.order) os << format_double(*row.order);
        os << '\n';
    }
    if (any_diverged) std::cerr << "warning: some step sizes diverged; rows flagged\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string provenance = join_invocation(argc, argv);

    CLI::App app{"MPRK22(alpha) positivity-preserving integrators for "
                 "production-destruction systems: trajectories, linear stability, "
                 "and fixed-point parameter scans"};
    app.require_subcommand(1);

    IntegrateArgs ia;
    CLI::App* integrate = app.add_subcommand(
        "integrate", "Integrate a trajectory and write step,t,y_1..y_N,mass CSV");
    integrate->add_option("--alpha", ia.alpha, "scheme parameter alpha (nonzero)")
        ->capture_default_str();
    integrate->add_option("--dt", ia.dt, "time step size (time units)")->capture_default_str();
    integrate->add_option("--steps", ia.steps, "number of steps M")->capture_default_str();
    integrate->add_option("--a", ia.a, "two-species rate a (1/time)");
    integrate->add_option("--b", ia.b, "two-species rate b (1/time, default: a)");
    integrate->add_option("--delta", ia.delta, "initial offset delta in [0, 0.5)");
    integrate->add_option("--matrix", ia.matrix_path, "path to an NxN rate-matrix CSV file");
    integrate->add_option("--y0", ia.y0_list, "comma-separated positive initial state");
    integrate->add_option("--out", ia.out, "output CSV path (default: stdout)");

    ScanDeltaArgs sda;
    CLI::App* scan_delta = app.add_subcommand(
        "scan-delta", "Sweep delta on (0, 0.5) and report d = |y* - y^M|_inf per sample");
    scan_delta->add_option("--alpha", sda.alpha, "scheme parameter alpha (nonzero)")
        ->capture_default_str();
    scan_delta->add_option("--a", sda.a, "relaxation rate a (1/time)")->capture_default_str();
    scan_delta->add_option("--dt", sda.dt, "time step size")->capture_default_str();
    scan_delta->add_option("--steps", sda.steps, "steps per sample M")->capture_default_str();
    scan_delta->add_option("--samples", sda.samples, "number of delta samples (>= 2)")
        ->capture_default_str();
    scan_delta->add_option("--threads", sda.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    scan_delta->add_option("--out", sda.out, "output CSV path (default: stdout)");

    ScanAlphaDeltaArgs sad;
    CLI::App* scan_ad = app.add_subcommand(
        "scan-alpha-delta", "Scan the (alpha, delta) grid and extract the alpha* boundary");
    auto* opt_amin = scan_ad->add_option("--alpha-min", sad.alpha_min, "smallest alpha")
                         ->capture_default_str();
    auto* opt_amax = scan_ad->add_option("--alpha-max", sad.alpha_max, "largest alpha")
                         ->capture_default_str();
    auto* opt_an = scan_ad->add_option("--alpha-samples", sad.alpha_samples,
                                       "number of alpha samples")
                       ->capture_default_str();
    scan_ad->add_option("--delta-samples", sad.delta_samples, "number of delta samples")
        ->capture_default_str();
    scan_ad->add_option("--a", sad.a, "relaxation rate a (1/time)")->capture_default_str();
    scan_ad->add_option("--dt", sad.dt, "time step size")->capture_default_str();
    scan_ad->add_option("--steps", sad.steps, "steps per cell M")->capture_default_str();
    scan_ad->add_option("--threads", sad.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    scan_ad->add_option("--out", sad.out, "output CSV path (default: stdout)");

    StabilityArgs sta;
    CLI::App* stability = app.add_subcommand(
        "stability", "Evaluate the stability function R(z), z* and the classification");
    stability->add_option("--alpha", sta.alpha, "scheme parameter alpha (nonzero)")->required();
    stability->add_option("--z", sta.z, "argument z = dt*lambda (dimensionless)");
    stability->add_option("--dt", sta.dt, "time step size (with --lambda)");
    stability->add_option("--lambda", sta.lambda, "system eigenvalue (with --dt)");
    stability->add_option("--zmin", sta.zmin, "sweep start");
    stability->add_option("--zmax", sta.zmax, "sweep end");
    stability->add_option("--n", sta.n, "sweep sample count (enables sweep mode)");
    stability->add_option("--out", sta.out, "output CSV path (default: stdout)");

    ConvergenceArgs ca;
    CLI::App* convergence = app.add_subcommand(
        "convergence", "Experimental order of convergence against the exact solution");
    convergence->add_option("--alpha", ca.alpha, "scheme parameter alpha (nonzero)")
        ->capture_default_str();
    convergence->add_option("--a", ca.a, "relaxation rate a (1/time)")->capture_default_str();
    convergence->add_option("--delta", ca.delta, "initial offset in [0, 0.5)")
        ->capture_default_str();
    convergence->add_option("--horizon", ca.horizon, "integration horizon T (time units)")
        ->capture_default_str();
    convergence->add_option("--dt-list", ca.dt_list,
                            "comma-separated decreasing step sizes (default: 2^-3..2^-10)");
    convergence->add_option("--out", ca.out, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    sad.explicit_alpha_grid =
        opt_amin->count() > 0 || opt_amax->count() > 0 || opt_an->count() > 0;

    try {
        if (integrate->parsed()) return run_integrate(ia, provenance);
        if (scan_delta->parsed()) return run_scan_delta(sda, provenance);
        if (scan_ad->parsed()) return run_scan_alpha_delta(sad, provenance);
        if (stability->parsed()) return run_stability(sta, provenance);
        if (convergence->parsed()) return run_convergence(ca, provenance);
    } catch (const mprk::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mprk::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mprk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
