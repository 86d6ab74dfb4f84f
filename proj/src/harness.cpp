#include "eigenamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "eigenamp/dlac.hpp"
#include "eigenamp/errors.hpp"
#include "eigenamp/rng.hpp"
#include "eigenamp/statevector_engine.hpp"

namespace eigenamp {

FitResult fit_loglog(const std::vector<std::pair<double, double>>& points) {
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw DomainError("log-log fit needs strictly positive coordinates");
        }
    }
    std::vector<double> xs;
    for (const auto& [x, y] : points) {
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) {
            xs.push_back(x);
        }
    }
    if (xs.size() < 2) {
        throw InsufficientAbscissae("log-log fit needs at least two distinct abscissae, got " +
                                    std::to_string(xs.size()));
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        sx += std::log10(x);
        sy += std::log10(y);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log10(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log10(y) - my);
    }
    FitResult fit;
    fit.a = sxy / sxx;
    fit.b = my - fit.a * mx;
    fit.n_points = static_cast<int>(points.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [x, y] : points) {
        const double ly = std::log10(y);
        const double predicted = fit.a * std::log10(x) + fit.b;
        ss_res += (ly - predicted) * (ly - predicted);
        ss_tot += (ly - my) * (ly - my);
    }
    // A flat exact fit (all residuals zero) is a perfect fit even when the
    // total variance vanishes.
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

std::vector<int> default_n_grid() { return {10, 16, 25, 40, 63, 100}; }

std::vector<double> default_eps_grid() {
    // 8 log-spaced points from 0.003 to 0.3.
    std::vector<double> grid(8);
    const double lo = std::log10(0.003);
    const double hi = std::log10(0.3);
    for (int j = 0; j < 8; ++j) {
        grid[static_cast<std::size_t>(j)] = std::pow(10.0, lo + (hi - lo) * j / 7.0);
    }
    return grid;
}

namespace {

struct TrialOutcome {
    long n_c = 0;
    bool converged = false;
};

int resolve_threads(int requested) {
    int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(threads, 1);
    // EIGENAMP_THREADS caps (never raises) the worker count.
    if (const char* env = std::getenv("EIGENAMP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            threads = std::min(threads, cap);
        }
    }
    return threads;
}

// Iteration count of one statevector evolution, without keeping a trace.
TrialOutcome counted_statevector_run(const Spectrum& spectrum, const InitialOverlaps& overlaps,
                                     const RunConfig& config) {
    const EvolutionOperator op(spectrum, config.tau);
    const long max_iter = config.max_iter > 0
                              ? config.max_iter
                              : default_max_iter(spectrum, config.tau, config.epsilon);
    const double target = 1.0 - config.epsilon;
    CompositeState psi = build_initial_composite(overlaps);
    long iter = 0;
    double f0 = fractions_of(psi)[0];
    while (f0 < target && iter < max_iter) {
        psi = step_closed_form(psi, op);
        f0 = fractions_of(psi)[0];
        ++iter;
    }
    return TrialOutcome{f0 >= target ? iter : max_iter, f0 >= target};
}

struct TrialPlan {
    int n = 0;
    double gap = 0.0;
    double epsilon = 0.0;
};

// Run `spec.trials` trials for each plan point across a worker pool and
// aggregate in fixed trial order, so output is identical at any thread count.
std::vector<SweepRow> run_points(const SweepSpec& spec, const std::vector<TrialPlan>& plan,
                                 const std::vector<double>& axis) {
    const std::size_t points = plan.size();
    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    std::vector<std::vector<TrialOutcome>> outcomes(points,
                                                    std::vector<TrialOutcome>(trials));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_trial = [&](std::size_t point, std::size_t trial) {
        const TrialPlan& p = plan[point];
        const std::uint64_t child =
            derive_seed(spec.master_seed, (static_cast<std::uint64_t>(point) << 32) | trial);
        const Spectrum spectrum = make_random_spectrum(p.n, p.gap, derive_seed(child, 1));
        const InitialOverlaps overlaps = random_overlaps(p.n, derive_seed(child, 2));
        RunConfig config;
        config.tau = spec.tau;
        config.epsilon = p.epsilon;
        config.max_iter = spec.max_iter;
        config.seed = child;
        if (spec.engine == EngineKind::statevector) {
            outcomes[point][trial] = counted_statevector_run(spectrum, overlaps, config);
        } else {
            const CountedRun run = run_counted(spectrum, overlaps, config);
            outcomes[point][trial] = TrialOutcome{run.n_c, run.converged};
        }
    };

    auto worker = [&] {
        const std::size_t total = points * trials;
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t job = next.fetch_add(1, std::memory_order_relaxed);
            if (job >= total) {
                return;
            }
            try {
                run_trial(job / trials, job % trials);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const int thread_count = resolve_threads(spec.threads);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    std::vector<SweepRow> rows(points);
    for (std::size_t p = 0; p < points; ++p) {
        SweepRow row;
        row.axis = axis[p];
        row.trials_total = static_cast<long>(trials);
        double sum = 0.0;
        for (const TrialOutcome& outcome : outcomes[p]) {
            if (outcome.converged) {
                row.trials_converged += 1;
                sum += static_cast<double>(outcome.n_c);
            }
        }
        if (row.trials_converged > 0) {
            row.mean_nc = sum / static_cast<double>(row.trials_converged);
            double ss = 0.0;
            for (const TrialOutcome& outcome : outcomes[p]) {
                if (outcome.converged) {
                    const double d = static_cast<double>(outcome.n_c) - row.mean_nc;
                    ss += d * d;
                }
            }
            row.std_nc = std::sqrt(ss / static_cast<double>(row.trials_converged));
        }
        rows[p] = row;
    }
    return rows;
}

FitResult fit_rows(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<double, double>> points;
    for (const SweepRow& row : rows) {
        // Points with no convergent trials (or an all-zero mean, which a
        // log fit cannot take) are dropped rather than guessed at.
        if (row.trials_converged > 0 && row.mean_nc > 0.0) {
            points.emplace_back(row.axis, row.mean_nc);
        }
    }
    return fit_loglog(points);
}

void validate_common(const SweepSpec& spec) {
    if (spec.trials < 1) {
        throw DomainError("sweep needs at least one trial per point");
    }
    if (!(spec.tau > 0.0) || spec.tau > 1.0) {
        throw DomainError("tau must lie in (0, 1]");
    }
}

template <typename T>
void require_strictly_monotone(const std::vector<T>& axis, const char* what) {
    if (axis.empty()) {
        throw DomainError(std::string(what) + " axis is empty");
    }
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t j = 1; j < axis.size(); ++j) {
        increasing = increasing && axis[j] > axis[j - 1];
        decreasing = decreasing && axis[j] < axis[j - 1];
    }
    if (!increasing && !decreasing) {
        throw DomainError(std::string(what) + " axis must be strictly monotone");
    }
}

}  // namespace

SweepOutcome sweep_n(const SweepSpec& spec) {
    validate_common(spec);
    require_strictly_monotone(spec.n_values, "dimension");
    if (!(spec.gap_exponent > 0.0)) {
        throw DomainError("gap exponent must be positive");
    }
    if (!(spec.epsilon > 0.0) || !(spec.epsilon < 1.0)) {
        throw DomainError("epsilon must lie in (0, 1)");
    }
    std::vector<TrialPlan> plan;
    std::vector<double> axis;
    for (const int n : spec.n_values) {
        if (n < 2) {
            throw InvalidDimension("sweep dimension must be >= 2");
        }
        plan.push_back(TrialPlan{n, std::pow(static_cast<double>(n), -spec.gap_exponent),
                                 spec.epsilon});
        axis.push_back(static_cast<double>(n));
    }
    SweepOutcome out;
    out.rows = run_points(spec, plan, axis);
    out.fit = fit_rows(out.rows);
    return out;
}

SweepOutcome sweep_eps(const SweepSpec& spec) {
    validate_common(spec);
    require_strictly_monotone(spec.eps_values, "epsilon");
    if (spec.fixed_n < 2) {
        throw InvalidDimension("accuracy sweep needs a fixed dimension >= 2");
    }
    const double gap = spec.fixed_gap > 0.0 ? spec.fixed_gap : 1.0 / spec.fixed_n;
    std::vector<TrialPlan> plan;
    std::vector<double> axis;
    for (const double eps : spec.eps_values) {
        if (!(eps > 0.0) || !(eps < 1.0)) {
            throw DomainError("epsilon values must lie in (0, 1)");
        }
        plan.push_back(TrialPlan{spec.fixed_n, gap, eps});
        axis.push_back(eps);
    }
    SweepOutcome out;
    out.rows = run_points(spec, plan, axis);
    out.fit = fit_rows(out.rows);
    return out;
}

namespace {

// Randomized instance shapes for the verification suites.
int pick_dimension(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.uniform01() * static_cast<double>(hi - lo + 1));
}

double log_uniform(Rng& rng, double lo, double hi) {
    return std::pow(10.0, rng.uniform(std::log10(lo), std::log10(hi)));
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
    if (options.randomized_runs < 1 || options.cross_instances < 1 ||
        options.cross_iterations < 1 || options.falsifier_samples < 1) {
        throw DomainError("verification counts must all be positive");
    }
    VerifyReport report;
    auto flag = [&](std::string name, long iter, double magnitude) {
        report.violations.push_back(Violation{std::move(name), iter, magnitude});
    };

    // --- Randomized trace-invariant runs (spectral engine) ---
    for (long r = 0; r < options.randomized_runs; ++r) {
        Rng shape(derive_seed(options.seed, 1000 + static_cast<std::uint64_t>(r)));
        const int n = pick_dimension(shape, 2, 128);
        const double gap_cap = std::min(0.3, 0.5 * (1.0 - 2.0 / (10.0 * n)));
        const double gap = log_uniform(shape, 0.01, gap_cap);
        RunConfig config;
        config.tau = shape.uniform01() < 0.5 ? 1.0 : shape.uniform(0.5, 1.0);
        config.epsilon = log_uniform(shape, 0.01, 0.3);
        config.seed = shape.next_u64();
        const Spectrum spectrum = make_random_spectrum(n, gap, shape.next_u64());
        const InitialOverlaps overlaps = random_overlaps(n, shape.next_u64());

        RunResult result = run_until(spectrum, overlaps, config);
        if (options.inject_fault && r == 0) {
            // Damage the middle of the first trace: the checker must notice.
            TraceRow& row = result.trace[result.trace.size() / 2];
            row.w_mag += 0.01;
            row.gsq_0 -= 0.01;
        }
        for (Violation& v : check_run_invariants(result, spectrum, config.tau)) {
            report.violations.push_back(std::move(v));
        }
        composite_spectrum(spectrum, config.tau);  // throws InternalError on disorder
        report.runs_checked += 1;
    }

    // --- Three-way engine cross-check plus statevector properties ---
    for (int inst = 0; inst < options.cross_instances; ++inst) {
        Rng shape(derive_seed(options.seed, 2000 + static_cast<std::uint64_t>(inst)));
        const int n = pick_dimension(shape, 2, 32);
        const double gap = log_uniform(shape, 0.02, 0.3);
        const double tau = shape.uniform01() < 0.5 ? 1.0 : shape.uniform(0.5, 1.0);
        const Spectrum spectrum = make_random_spectrum(n, gap, shape.next_u64());
        const InitialOverlaps overlaps = random_overlaps(n, shape.next_u64());

        const PhaseTable table = PhaseTable::build(spectrum, tau);
        const EvolutionOperator op(spectrum, tau);
        AmplifierState spectral = initial_state(overlaps, table);
        std::vector<CompositeState> history;
        history.push_back(build_initial_composite(overlaps));
        CompositeState closed = history.back();

        // Dense step unitarity, once per instance.
        {
            const Eigen::MatrixXcd t = explicit_step_matrix(closed, op);
            const double dev = (t * t.adjoint() -
                                Eigen::MatrixXcd::Identity(t.rows(), t.cols()))
                                   .cwiseAbs()
                                   .maxCoeff();
            if (dev > 1e-9) {
                flag("step-unitarity", 0, dev);
            }
        }

        for (int i = 1; i <= options.cross_iterations; ++i) {
            spectral = iterate(std::move(spectral), overlaps, table);
            closed = step_closed_form(closed, op);
            history.push_back(step_explicit(history, op));

            const Eigen::ArrayXd f_spectral = spectral.fractions;
            const Eigen::ArrayXd f_closed = fractions_of(closed);
            const Eigen::ArrayXd f_explicit = fractions_of(history.back());
            const double dev = std::max((f_spectral - f_closed).abs().maxCoeff(),
                                        (f_closed - f_explicit).abs().maxCoeff());
            report.max_cross_engine_deviation =
                std::max(report.max_cross_engine_deviation, dev);
            if (dev > 1e-9) {
                flag("cross-engine-fractions", i, dev);
            }

            // The reflection expectation keeps a fixed pi/4 phase.
            const Complex w = u_expectation(op, closed);
            const double phase_dev = std::abs(std::arg(w) - 0.25 * kPi);
            report.max_phase_deviation = std::max(report.max_phase_deviation, phase_dev);
            if (phase_dev > 1e-9) {
                flag("expectation-phase", i, phase_dev);
            }

            // Both ancilla branches stay equally likely.
            for (int branch = 0; branch < 2; ++branch) {
                const double p = closed.block(branch).squaredNorm();
                const double branch_dev = std::abs(p - 0.5);
                report.max_branch_deviation =
                    std::max(report.max_branch_deviation, branch_dev);
                if (branch_dev > 1e-10) {
                    flag("branch-probability", i, branch_dev);
                }
            }

            // The ancilla-1 block mirrors the conjugate of the ancilla-0
            // block: amp0_k conj(gamma0_k) == conj(amp1_k) gamma0_k.
            for (int k = 0; k < n; ++k) {
                const Complex g = overlaps.gamma0()[k];
                const Complex a0 = closed.amplitudes()[k];
                const Complex a1 = closed.amplitudes()[n + k];
                const double scale =
                    std::max(std::abs(a0) * std::abs(g), std::abs(a1) * std::abs(g));
                if (scale < 1e-150) {
                    continue;  // level underflowed; both sides are numerically void
                }
                const double structure_dev =
                    std::abs(a0 * std::conj(g) - std::conj(a1) * g) / scale;
                if (structure_dev > 1e-9) {
                    flag("conjugate-block", i, structure_dev);
                }
            }
        }

        // Composite energies must interleave in order, and a propagator built
        // from them must reproduce apply_u's diagonal phases.
        const CompositeSpectrum composite = composite_spectrum(spectrum, tau);
        for (int j = 0; j < 2 * n; ++j) {
            const auto [bit, k] = composite.labels[static_cast<std::size_t>(j)];
            const Complex expected = std::polar(1.0, composite.energies[j]);
            const Complex actual = bit == 0 ? op.phase0()[k] : op.phase1()[k];
            const double dev = std::abs(expected - actual);
            if (dev > 1e-12) {
                flag("composite-phases", j, dev);
            }
        }
    }

    // --- Fixed-point falsifier ---
    report.min_fixed_point_residual =
        falsify_nontrivial_fixed_points(options.falsifier_samples,
                                        derive_seed(options.seed, 3000), 1.0);
    if (report.min_fixed_point_residual <= 1e-7) {
        flag("fixed-point-floor", 0, 1e-7 - report.min_fixed_point_residual);
    }

    return report;
}

}  // namespace eigenamp
