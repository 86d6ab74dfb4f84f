#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "eigenamp/io.hpp"
#include "eigenamp/proof_check.hpp"
#include "eigenamp/spectral_engine.hpp"

namespace eigenamp {

enum class EngineKind { spectral, statevector };

// Power-law fit log10(y) = A log10(x) + B by ordinary least squares.
struct FitResult {
    double a = 0.0;
    double b = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};
FitResult fit_loglog(const std::vector<std::pair<double, double>>& points);

// Monte-Carlo sweep description. For dimension sweeps the gap is tied to the
// dimension as D = N^(-gap_exponent); for accuracy sweeps the dimension is
// fixed and the gap defaults to 1/N unless fixed_gap is set.
struct SweepSpec {
    std::vector<int> n_values;         // dimension axis (sweep over N)
    std::vector<double> eps_values;    // accuracy axis (sweep over epsilon)
    double gap_exponent = 1.0;
    int fixed_n = 0;
    double fixed_gap = 0.0;            // 0 = derive as 1/fixed_n
    int trials = 100;
    std::uint64_t master_seed = 1;
    double tau = 1.0;
    double epsilon = 0.01;             // threshold for dimension sweeps
    long max_iter = 0;                 // 0 = per-spectrum analytic default
    EngineKind engine = EngineKind::spectral;
    int threads = 0;                   // 0 = hardware concurrency
};

// Aggregated sweep: one row per axis point plus the power-law fit over the
// per-point mean iteration counts (non-convergent trials are excluded from
// the means and reported in the row counts).
struct SweepOutcome {
    std::vector<SweepRow> rows;
    FitResult fit;
};

SweepOutcome sweep_n(const SweepSpec& spec);
SweepOutcome sweep_eps(const SweepSpec& spec);

// Default sweep grids.
std::vector<int> default_n_grid();       // {10, 16, 25, 40, 63, 100}
std::vector<double> default_eps_grid();  // 8 log-spaced points in [0.003, 0.3]

// Full self-verification: randomized trace-invariant runs, the three-way
// engine cross-check, statevector phase/branch/structure properties, the
// fixed-point falsifier, and composite-spectrum ordering. A pristine build
// reports zero violations. `inject_fault` corrupts one recorded trace before
// checking, to prove the checker actually detects damage.
struct VerifyOptions {
    long randomized_runs = 100;
    long falsifier_samples = 100000;
    int cross_instances = 20;
    int cross_iterations = 50;
    std::uint64_t seed = 20240915;
    bool inject_fault = false;
};

struct VerifyReport {
    std::vector<Violation> violations;
    long runs_checked = 0;
    double max_cross_engine_deviation = 0.0;
    double max_phase_deviation = 0.0;
    double max_branch_deviation = 0.0;
    double min_fixed_point_residual = 0.0;
};

VerifyReport run_verification(const VerifyOptions& options);

}  // namespace eigenamp
