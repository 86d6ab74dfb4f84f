#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"

namespace eigenamp {

// Full 2N-dimensional amplitude vector of ancilla (x) system, stored as two
// ancilla-major blocks [ancilla-0 | ancilla-1]. Amplitudes are expressed in
// the system EIGENBASIS throughout this engine: the basis rotation is applied
// once when the state is built, which keeps every operator diagonal or
// rank-one afterwards. Unit norm is validated at construction.
class CompositeState {
public:
    explicit CompositeState(Eigen::VectorXcd amplitudes);

    int system_dim() const { return static_cast<int>(amplitudes_.size() / 2); }
    int total_dim() const { return static_cast<int>(amplitudes_.size()); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    // Ancilla-0 and ancilla-1 sub-blocks (each of length N).
    Eigen::VectorXcd block(int ancilla_bit) const;

private:
    Eigen::VectorXcd amplitudes_;
};

// The one-step propagator: ancilla-0 block advanced by e^{+i pi tau lambda/4}
// per eigencomponent, ancilla-1 block by i e^{-i pi tau lambda/4}. Diagonal
// in the composite eigenbasis, so application costs O(N).
class EvolutionOperator {
public:
    EvolutionOperator(const Spectrum& spectrum, double tau);

    int system_dim() const { return static_cast<int>(phase0_.size()); }
    double tau() const { return tau_; }
    const Eigen::ArrayXcd& phase0() const { return phase0_; }
    const Eigen::ArrayXcd& phase1() const { return phase1_; }
    // Dense 2N x 2N matrix form, for the explicit-product step.
    Eigen::MatrixXcd dense() const;

private:
    double tau_;
    Eigen::ArrayXcd phase0_;
    Eigen::ArrayXcd phase1_;
};

// (|0> + |1>)/sqrt(2) on the ancilla, tensored with the system state whose
// eigenbasis amplitudes are the given overlaps.
CompositeState build_initial_composite(const InitialOverlaps& overlaps);
// Same, but from a computational-basis state plus its eigenbasis rotation.
CompositeState build_initial_composite(const RotationMatrix& rotation,
                                       const ComputationalState& state);

// One application of the propagator (diagonal phase multiply per block).
CompositeState apply_u(const EvolutionOperator& op, const CompositeState& psi);

// Expectation <psi|U|psi>; its magnitude is the w that drives the recursion
// and its phase is pi/4 throughout a run.
Complex u_expectation(const EvolutionOperator& op, const CompositeState& psi);

// One reflection step via the closed form (4|W|^2 - 1) psi - 2 conj(W) U psi
// with W = <psi|U|psi>. Throws NumericalDegradation if the output norm
// deviates from 1 by more than 1e-8.
CompositeState step_closed_form(const CompositeState& psi, const EvolutionOperator& op);

// One reflection step by brute force: materializes R = 1 - 2|psi><psi| and U
// as dense matrices, forms T = R U R U^dagger, and applies it to the last
// state in `history`. Refuses dimensions above `dense_dim_limit` (the default
// keeps the cubic-cost products sub-second). Exists purely as an independent
// oracle for step_closed_form.
CompositeState step_explicit(const std::vector<CompositeState>& history,
                             const EvolutionOperator& op, int dense_dim_limit = 64);

// Dense T = R U R U^dagger for the reflection about `psi`; exposed so tests
// can check unitarity of the assembled product directly.
Eigen::MatrixXcd explicit_step_matrix(const CompositeState& psi, const EvolutionOperator& op,
                                      int dense_dim_limit = 64);

// Collapse the ancilla to `branch` (0 or 1): returns the branch probability
// and the renormalized N-dimensional system state (eigenbasis amplitudes).
struct MeasurementOutcome {
    double probability = 0.0;
    Eigen::VectorXcd system_state;
};
MeasurementOutcome measure_ancilla(const CompositeState& psi, int branch);

// Level-occupation fractions |<lambda_k|state>|^2. The composite overload
// sums the two ancilla blocks; the computational-basis overload projects
// through the rotation first.
Eigen::ArrayXd fractions_of(const CompositeState& psi);
Eigen::ArrayXd fractions_of(const Eigen::VectorXcd& system_state, const RotationMatrix& rotation);

// Run the closed-form statevector evolution with the same termination and
// trace semantics as the spectral run_until. The gsq_* trace columns hold
// the per-step fraction ratios f_i/f_{i-1}, which equal the squared step
// multipliers of the recursion.
RunResult run_until_statevector(const Spectrum& spectrum, const InitialOverlaps& overlaps,
                                const RunConfig& config);

// Debug dump: header {dim, iter} as two little-endian int64, then 2N
// little-endian (re, im) float64 pairs. Reader round-trips the writer.
void dump_composite(std::ostream& out, const CompositeState& psi, long iter);
struct CompositeDump {
    long iter = 0;
    CompositeState state;
};
CompositeDump load_composite(std::istream& in);

}  // namespace eigenamp
