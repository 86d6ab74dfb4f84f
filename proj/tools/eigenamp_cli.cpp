// Command-line front end: single runs, DLAC comparisons, Monte-Carlo sweeps,
// power-law fits, and the self-verification suite.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eigenamp/dlac.hpp"
#include "eigenamp/errors.hpp"
#include "eigenamp/harness.hpp"
#include "eigenamp/io.hpp"
#include "eigenamp/rng.hpp"
#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/statevector_engine.hpp"

namespace {

using namespace eigenamp;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;       // bad input or internal error
constexpr int kExitUnconverged = 2;   // run hit max_iter, or verify found violations

// Writes through a stream chosen by `path` ("-" = stdout).
void with_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw DomainError("cannot open output file " + path);
    }
    writer(file);
}

struct ModelOptions {
    std::string model = "ladder";
    int n = 100;
    double e0 = 0.0;   // 0 = use 1/n
    double gap = 0.0;  // 0 = use 1/n (random model)
    std::uint64_t seed = 1;
};

Spectrum build_spectrum(const ModelOptions& options) {
    if (options.model == "ladder") {
        const double e0 = options.e0 > 0.0 ? options.e0 : 1.0 / options.n;
        return make_ladder_spectrum(options.n, e0);
    }
    if (options.model == "random") {
        const double gap = options.gap > 0.0 ? options.gap : 1.0 / options.n;
        return make_random_spectrum(options.n, gap, derive_seed(options.seed, 1));
    }
    throw DomainError("unknown model '" + options.model + "' (expected ladder or random)");
}

InitialOverlaps build_overlaps(const ModelOptions& options) {
    // The ladder benchmark starts from the uniform superposition; the random
    // model draws a random unit overlap vector from the run seed.
    if (options.model == "ladder") {
        return uniform_overlaps(options.n);
    }
    return random_overlaps(options.n, derive_seed(options.seed, 2));
}

void add_model_flags(CLI::App* cmd, ModelOptions& options) {
    cmd->add_option("--model", options.model, "Spectrum model: ladder or random")
        ->check(CLI::IsMember({"ladder", "random"}));
    cmd->add_option("--n", options.n, "Hilbert-space dimension")->check(CLI::Range(2, 1 << 26));
    cmd->add_option("--e0", options.e0, "Ladder ground energy (default 1/n)");
    cmd->add_option("--gap", options.gap, "Gap between the two lowest levels (default 1/n)");
    cmd->add_option("--seed", options.seed, "Random seed");
}

int run_command(const ModelOptions& model, const RunConfig& config, const std::string& engine,
                const std::string& out, const std::string& format) {
    const Spectrum spectrum = build_spectrum(model);
    const InitialOverlaps overlaps = build_overlaps(model);
    const RunResult result = engine == "statevector"
                                 ? run_until_statevector(spectrum, overlaps, config)
                                 : run_until(spectrum, overlaps, config);
    with_output(out, [&](std::ostream& stream) {
        if (format == "json") {
            write_run_json(stream, result);
        } else {
            write_trace_csv(stream, result);
        }
    });
    if (!result.converged) {
        std::cerr << "not converged after " << result.n_c << " iterations\n";
        return kExitUnconverged;
    }
    std::cerr << "converged: n_c = " << result.n_c << "\n";
    return kExitOk;
}

int dlac_compare_command(const ModelOptions& model, const RunConfig& config,
                         const std::string& out, const std::string& dlac_out) {
    const Spectrum spectrum = build_spectrum(model);
    const InitialOverlaps overlaps = build_overlaps(model);
    const RunResult amplifier = run_until(spectrum, overlaps, config);
    const RunResult cooling = dlac_run(spectrum, overlaps.fractions0(), config);
    with_output(out, [&](std::ostream& stream) { write_trace_csv(stream, amplifier); });
    const std::string dlac_path = dlac_out.empty() ? out + ".dlac.csv" : dlac_out;
    with_output(dlac_path, [&](std::ostream& stream) { write_trace_csv(stream, cooling); });
    std::cerr << "amplifier n_c = " << amplifier.n_c << ", cooling n_c = " << cooling.n_c << "\n";
    return amplifier.converged && cooling.converged ? kExitOk : kExitUnconverged;
}

int emit_sweep(const SweepOutcome& outcome, const std::string& out, const std::string& format,
               const std::string& fit_out) {
    with_output(out, [&](std::ostream& stream) {
        if (format == "json") {
            write_sweep_json(stream, outcome.rows, outcome.fit.a, outcome.fit.b,
                             outcome.fit.r_squared);
        } else {
            write_sweep_csv(stream, outcome.rows);
        }
    });
    with_output(fit_out, [&](std::ostream& stream) {
        write_fit_json(stream, outcome.fit.a, outcome.fit.b, outcome.fit.r_squared);
    });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lowest-eigenstate amplification toolkit"};
    app.require_subcommand(1);

    // --- run ---
    ModelOptions run_model;
    RunConfig run_config;
    std::string run_engine = "spectral";
    std::string run_out = "-";
    std::string run_format = "csv";
    CLI::App* run_cmd = app.add_subcommand("run", "Run one amplification and emit its trace");
    add_model_flags(run_cmd, run_model);
    run_cmd->add_option("--tau", run_config.tau, "Evolution-time scaling in (0, 1]");
    run_cmd->add_option("--epsilon", run_config.epsilon, "Target error: stop at f >= 1 - epsilon");
    run_cmd->add_option("--max-iter", run_config.max_iter, "Iteration cap (0 = analytic default)");
    run_cmd->add_option("--engine", run_engine, "spectral or statevector")
        ->check(CLI::IsMember({"spectral", "statevector"}));
    run_cmd->add_option("--out", run_out, "Output path ('-' = stdout)");
    run_cmd->add_option("--format", run_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // --- dlac-compare ---
    ModelOptions dlac_model;
    RunConfig dlac_config;
    std::string dlac_out_main = "trace.csv";
    std::string dlac_out_baseline;
    CLI::App* dlac_cmd = app.add_subcommand(
        "dlac-compare", "Run the amplifier and the cooling baseline from the same start");
    add_model_flags(dlac_cmd, dlac_model);
    dlac_cmd->add_option("--tau", dlac_config.tau, "Evolution-time scaling in (0, 1]");
    dlac_cmd->add_option("--epsilon", dlac_config.epsilon, "Target error");
    dlac_cmd->add_option("--max-iter", dlac_config.max_iter, "Iteration cap (0 = default)");
    dlac_cmd->add_option("--out", dlac_out_main, "Amplifier trace path");
    dlac_cmd->add_option("--dlac-out", dlac_out_baseline,
                         "Baseline trace path (default: <out>.dlac.csv)");

    // --- sweep-n ---
    SweepSpec n_spec;
    n_spec.n_values = default_n_grid();
    std::string n_engine = "spectral";
    std::string n_out = "-";
    std::string n_format = "csv";
    std::string n_fit_out = "-";
    CLI::App* sweep_n_cmd =
        app.add_subcommand("sweep-n", "Iteration count versus dimension, D = N^-x");
    sweep_n_cmd->add_option("--n", n_spec.n_values, "Dimension grid (repeatable)");
    sweep_n_cmd->add_option("--gap-exponent", n_spec.gap_exponent, "Exponent x in D = N^-x");
    sweep_n_cmd->add_option("--trials", n_spec.trials, "Trials per grid point");
    sweep_n_cmd->add_option("--seed", n_spec.master_seed, "Master seed");
    sweep_n_cmd->add_option("--tau", n_spec.tau, "Evolution-time scaling");
    sweep_n_cmd->add_option("--epsilon", n_spec.epsilon, "Target error");
    sweep_n_cmd->add_option("--max-iter", n_spec.max_iter, "Iteration cap (0 = default)");
    sweep_n_cmd->add_option("--threads", n_spec.threads, "Worker threads (0 = all cores)");
    sweep_n_cmd->add_option("--engine", n_engine, "spectral or statevector")
        ->check(CLI::IsMember({"spectral", "statevector"}));
    sweep_n_cmd->add_option("--out", n_out, "Sweep table path");
    sweep_n_cmd->add_option("--format", n_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_n_cmd->add_option("--fit-out", n_fit_out, "Fit JSON path");

    // --- sweep-eps ---
    SweepSpec eps_spec;
    eps_spec.eps_values = default_eps_grid();
    eps_spec.fixed_n = 10;
    std::string eps_engine = "spectral";
    std::string eps_out = "-";
    std::string eps_format = "csv";
    std::string eps_fit_out = "-";
    CLI::App* sweep_eps_cmd =
        app.add_subcommand("sweep-eps", "Iteration count versus target error at fixed N");
    sweep_eps_cmd->add_option("--n", eps_spec.fixed_n, "Fixed dimension");
    sweep_eps_cmd->add_option("--gap", eps_spec.fixed_gap, "Fixed gap (default 1/N)");
    sweep_eps_cmd->add_option("--eps", eps_spec.eps_values, "Epsilon grid (repeatable)");
    sweep_eps_cmd->add_option("--trials", eps_spec.trials, "Trials per grid point");
    sweep_eps_cmd->add_option("--seed", eps_spec.master_seed, "Master seed");
    sweep_eps_cmd->add_option("--tau", eps_spec.tau, "Evolution-time scaling");
    sweep_eps_cmd->add_option("--max-iter", eps_spec.max_iter, "Iteration cap (0 = default)");
    sweep_eps_cmd->add_option("--threads", eps_spec.threads, "Worker threads (0 = all cores)");
    sweep_eps_cmd->add_option("--engine", eps_engine, "spectral or statevector")
        ->check(CLI::IsMember({"spectral", "statevector"}));
    sweep_eps_cmd->add_option("--out", eps_out, "Sweep table path");
    sweep_eps_cmd->add_option("--format", eps_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_eps_cmd->add_option("--fit-out", eps_fit_out, "Fit JSON path");

    // --- fit ---
    std::string fit_in;
    std::string fit_out_path = "-";
    CLI::App* fit_cmd = app.add_subcommand("fit", "Power-law fit of a two-column CSV (x, y)");
    fit_cmd->add_option("--in", fit_in, "Input CSV (plain x,y or a sweep table)")->required();
    fit_cmd->add_option("--out", fit_out_path, "Fit JSON path");

    // --- verify ---
    VerifyOptions verify_options;
    std::string verify_out = "-";
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run the full invariant and cross-engine suite");
    verify_cmd->add_option("--runs", verify_options.randomized_runs, "Randomized trace runs");
    verify_cmd->add_option("--samples", verify_options.falsifier_samples,
                           "Fixed-point candidates to sample");
    verify_cmd->add_option("--instances", verify_options.cross_instances,
                           "Cross-engine instances");
    verify_cmd->add_option("--iters", verify_options.cross_iterations,
                           "Iterations per cross-engine instance");
    verify_cmd->add_option("--seed", verify_options.seed, "Suite seed");
    verify_cmd->add_flag("--inject-fault", verify_options.inject_fault,
                         "Corrupt one trace to prove the checker notices");
    verify_cmd->add_option("--out", verify_out, "Violation report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return run_command(run_model, run_config, run_engine, run_out, run_format);
        }
        if (dlac_cmd->parsed()) {
            return dlac_compare_command(dlac_model, dlac_config, dlac_out_main,
                                        dlac_out_baseline);
        }
        if (sweep_n_cmd->parsed()) {
            n_spec.engine = n_engine == "statevector" ? EngineKind::statevector
                                                      : EngineKind::spectral;
            return emit_sweep(sweep_n(n_spec), n_out, n_format, n_fit_out);
        }
        if (sweep_eps_cmd->parsed()) {
            eps_spec.engine = eps_engine == "statevector" ? EngineKind::statevector
                                                          : EngineKind::spectral;
            return emit_sweep(sweep_eps(eps_spec), eps_out, eps_format, eps_fit_out);
        }
        if (fit_cmd->parsed()) {
            std::ifstream in(fit_in);
            if (!in) {
                throw DomainError("cannot open input file " + fit_in);
            }
            std::vector<std::pair<double, double>> points;
            std::string line;
            bool sweep_schema = false;
            while (std::getline(in, line)) {
                if (line.empty()) {
                    continue;
                }
                if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' &&
                    line[0] != '+' && line[0] != '.') {
                    sweep_schema = line.rfind("axis,mean_nc", 0) == 0;
                    continue;  // header line
                }
                std::istringstream fields(line);
                std::string x_text, y_text;
                std::getline(fields, x_text, ',');
                std::getline(fields, y_text, ',');
                points.emplace_back(std::stod(x_text), std::stod(y_text));
            }
            (void)sweep_schema;  // both layouts put (x, y) in the first two columns
            const FitResult fit = fit_loglog(points);
            with_output(fit_out_path, [&](std::ostream& stream) {
                write_fit_json(stream, fit.a, fit.b, fit.r_squared);
            });
            return kExitOk;
        }
        if (verify_cmd->parsed()) {
            const VerifyReport report = run_verification(verify_options);
            std::cerr << "runs checked:            " << report.runs_checked << "\n"
                      << "max cross-engine dev:    " << report.max_cross_engine_deviation << "\n"
                      << "max phase dev:           " << report.max_phase_deviation << "\n"
                      << "max branch dev:          " << report.max_branch_deviation << "\n"
                      << "min fixed-point residual:" << report.min_fixed_point_residual << "\n"
                      << "violations:              " << report.violations.size() << "\n";
            with_output(verify_out,
                        [&](std::ostream& stream) { write_violations_json(stream, report.violations); });
            return report.violations.empty() ? kExitOk : kExitUnconverged;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
