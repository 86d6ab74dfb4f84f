#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <vector>

#include "eigenamp/spectrum.hpp"

namespace eigenamp {

// Per-level quantities fixed by (spectrum, tau), precomputed once per run so
// the O(n) iteration body touches no transcendental functions:
//   cos_term[k]   = cos(pi (1 - tau lambda_k) / 4)
//   step_phase[k] = exp(-i pi (1 - tau lambda_k) / 4)
struct PhaseTable {
    double tau = 0.0;
    Eigen::ArrayXd cos_term;
    Eigen::ArrayXcd step_phase;

    static PhaseTable build(const Spectrum& spectrum, double tau);
};

// Snapshot of the amplifier after `iter` reflection steps, tracked in the
// eigenbasis. `gamma_big[k]` is the accumulated per-level amplitude
// multiplier (1 for every level at iter 0); `fractions[k]` is the level
// occupation |gamma0_k|^2 |gamma_big_k|^2 of the current normalized state.
struct AmplifierState {
    long iter = 0;
    Eigen::ArrayXcd gamma_big;
    Eigen::ArrayXd fractions;
    double w_mag = 0.0;       // |<psi|U|psi>| of the current state
    double xi = 0.0;          // gain/suppression boundary implied by w_mag
    double norm_drift = 0.0;  // |sum_k fractions_k - 1|
};

// Termination policy for a run.
struct RunConfig {
    double tau = 1.0;
    double epsilon = 0.01;     // stop once fractions[0] >= 1 - epsilon
    long max_iter = 0;         // 0 = derive a bound-based default
    std::uint64_t seed = 0;    // carried through to outputs; the recursion is deterministic
};

// One row of the iteration trace; mirrors the CSV schema emitted by the CLI.
struct TraceRow {
    long iter = 0;
    double f_lambda0 = 0.0;
    double f_lambda1 = 0.0;
    double gsq_0 = 1.0;  // |step multiplier|^2 for the lowest level (1 at iter 0)
    double gsq_1 = 1.0;
    double w_mag = 0.0;
    double xi = 0.0;
    double norm_drift = 0.0;
};

struct RunResult {
    long n_c = 0;  // iterations used; equals max_iter when not converged
    bool converged = false;
    std::vector<TraceRow> trace;  // row i describes the state after i steps
};

// Scalar building blocks of the recursion. All are pure functions of the
// current |W| (written w below), one eigenvalue, and tau.

// Expectation magnitude |<psi|U|psi>| = sum_k f_k cos_term_k of a state with
// level fractions f.
double w_magnitude(const Eigen::ArrayXd& fractions, const PhaseTable& table);

// Offset w - cos_term(lambda) controlling whether a level is amplified
// (negative) or suppressed (positive).
double delta(double w, double lambda, double tau);

// Per-level amplitude multiplier (4w^2 - 1) - 2 w exp(-i pi (1 - tau lambda)/4)
// applied by one reflection step.
Complex gamma_step(double w, double lambda, double tau);

// Level at which |gamma_step| crosses 1: levels below xi gain weight, levels
// above lose it. Requires w^2 >= 1/2 (true from the first step onward).
double boundary_factor(double w, double tau);

// Advance one reflection step. Consumes the state by value (callers move it
// in) so buffers are recycled. Throws NumericalDegradation if the tracked
// fractions drift from unit sum by more than 1e-6.
AmplifierState iterate(AmplifierState state, const InitialOverlaps& overlaps,
                       const PhaseTable& table);

// Initial snapshot (iter 0) for the given overlaps.
AmplifierState initial_state(const InitialOverlaps& overlaps, const PhaseTable& table);

// Run until fractions[0] >= 1 - epsilon or max_iter steps, collecting the
// trace. The trace always holds n_c + 1 rows (row 0 is the initial state).
RunResult run_until(const Spectrum& spectrum, const InitialOverlaps& overlaps,
                    const RunConfig& config);

// Trace-free variant for bulk sweeps: identical termination semantics but
// keeps only the terminal snapshot, so memory stays O(n) however many steps
// the run takes.
struct CountedRun {
    long n_c = 0;
    bool converged = false;
    AmplifierState final_state;
};
CountedRun run_counted(const Spectrum& spectrum, const InitialOverlaps& overlaps,
                       const RunConfig& config);

// Normalized eigenbasis amplitudes of the ancilla-0 and ancilla-1 branches
// implied by the accumulated multipliers: branch 0 carries gamma0_k Gamma_k,
// branch 1 carries gamma0_k conj(Gamma_k), each renormalized separately.
struct BranchAmplitudes {
    Eigen::ArrayXcd branch0;
    Eigen::ArrayXcd branch1;
};
BranchAmplitudes final_state(const AmplifierState& state, const InitialOverlaps& overlaps);

// Default iteration cap when RunConfig.max_iter is 0: twice the analytic
// iteration bound for the spectrum's gap plus slack, clamped to at least 64.
long default_max_iter(const Spectrum& spectrum, double tau, double epsilon);

}  // namespace eigenamp
