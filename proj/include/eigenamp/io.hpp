#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eigenamp/proof_check.hpp"
#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"

namespace eigenamp {

// Shortest round-trip decimal form of a double (17 significant digits never
// needed when fewer reproduce the value). All CSV output goes through this
// so files are bit-identical across runs.
std::string format_double(double value);

// Iteration trace as CSV: header
//   iter,f_lambda0,f_lambda1,gsq_0,gsq_1,w_mag,xi,norm_drift
// followed by one row per recorded iteration.
void write_trace_csv(std::ostream& out, const RunResult& result);

// Full run as JSON: {"n_c":..., "converged":..., "trace":[{...}, ...]}.
void write_run_json(std::ostream& out, const RunResult& result);

// Aggregated sweep results; `axis` is N for dimension sweeps and epsilon for
// accuracy sweeps.
struct SweepRow {
    double axis = 0.0;
    double mean_nc = 0.0;
    double std_nc = 0.0;
    long trials_converged = 0;
    long trials_total = 0;
};

// Sweep table as CSV: header axis,mean_nc,std_nc,trials_converged,trials_total.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Same table plus the fit, as one JSON document {"rows":[...], "fit":{...}}.
void write_sweep_json(std::ostream& out, const std::vector<SweepRow>& rows, double a, double b,
                      double r_squared);

// Spectrum round-trip: {"n":..., "eigenvalues":[...]}.
void write_spectrum_json(std::ostream& out, const Spectrum& spectrum);
Spectrum read_spectrum_json(std::istream& in);

// Overlap round-trip: {"gamma0_re":[...], "gamma0_im":[...]}.
void write_overlaps_json(std::ostream& out, const InitialOverlaps& overlaps);
InitialOverlaps read_overlaps_json(std::istream& in);

// Violation report: [{"invariant":..., "iter":..., "magnitude":...}, ...].
void write_violations_json(std::ostream& out, const std::vector<Violation>& violations);

// Power-law fit coefficients: {"A":..., "B":..., "r2":...}.
void write_fit_json(std::ostream& out, double a, double b, double r_squared);

}  // namespace eigenamp
