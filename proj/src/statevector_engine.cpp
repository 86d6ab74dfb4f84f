#include "eigenamp/statevector_engine.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "eigenamp/errors.hpp"

namespace eigenamp {

namespace {

constexpr double kStateNormTol = 1e-10;
constexpr double kStepNormLimit = 1e-8;
constexpr double kDriftLimit = 1e-6;

// Squared amplitudes below this are snapped to exact zero so suppressed
// levels never linger in the subnormal range (microcode-assist territory on
// many hosts). Matches the spectral engine's threshold.
constexpr double kHardUnderflow = 1e-300;

void validate_run_config(const RunConfig& config) {
    if (!(config.tau > 0.0) || config.tau > 1.0) {
        throw DomainError("tau must lie in (0, 1], got " + std::to_string(config.tau));
    }
    if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0)) {
        throw DomainError("epsilon must lie in (0, 1), got " + std::to_string(config.epsilon));
    }
    if (config.max_iter < 0) {
        throw DomainError("max_iter must be nonnegative (0 selects the default)");
    }
}

}  // namespace

CompositeState::CompositeState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 4 || amplitudes_.size() % 2 != 0) {
        throw ShapeError("composite state needs an even dimension of at least 4, got " +
                         std::to_string(amplitudes_.size()));
    }
    const double deviation = std::abs(amplitudes_.squaredNorm() - 1.0);
    if (deviation > kStateNormTol) {
        throw DomainError("composite state norm^2 deviates from 1 by " +
                          std::to_string(deviation));
    }
}

Eigen::VectorXcd CompositeState::block(int ancilla_bit) const {
    if (ancilla_bit != 0 && ancilla_bit != 1) {
        throw DomainError("ancilla bit must be 0 or 1");
    }
    const Eigen::Index n = amplitudes_.size() / 2;
    return amplitudes_.segment(ancilla_bit * n, n);
}

EvolutionOperator::EvolutionOperator(const Spectrum& spectrum, double tau) : tau_(tau) {
    if (!(tau > 0.0) || tau > 1.0) {
        throw DomainError("tau must lie in (0, 1], got " + std::to_string(tau));
    }
    const int n = spectrum.size();
    phase0_.resize(n);
    phase1_.resize(n);
    for (int k = 0; k < n; ++k) {
        const double angle = 0.25 * kPi * tau * spectrum.lambda(k);
        phase0_[k] = std::polar(1.0, angle);
        phase1_[k] = std::polar(1.0, 0.5 * kPi - angle);
    }
}

Eigen::MatrixXcd EvolutionOperator::dense() const {
    const Eigen::Index n = phase0_.size();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        u(k, k) = phase0_[k];
        u(n + k, n + k) = phase1_[k];
    }
    return u;
}

CompositeState build_initial_composite(const InitialOverlaps& overlaps) {
    const Eigen::Index n = overlaps.size();
    Eigen::VectorXcd amplitudes(2 * n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    amplitudes.head(n) = overlaps.gamma0().matrix() * inv_sqrt2;
    amplitudes.tail(n) = overlaps.gamma0().matrix() * inv_sqrt2;
    return CompositeState(std::move(amplitudes));
}

CompositeState build_initial_composite(const RotationMatrix& rotation,
                                       const ComputationalState& state) {
    return build_initial_composite(overlaps_from_state(rotation, state));
}

CompositeState apply_u(const EvolutionOperator& op, const CompositeState& psi) {
    const Eigen::Index n = op.system_dim();
    if (psi.system_dim() != n) {
        throw ShapeError("operator dimension " + std::to_string(n) +
                         " does not match state dimension " + std::to_string(psi.system_dim()));
    }
    Eigen::VectorXcd amplitudes(2 * n);
    amplitudes.head(n) =
        (psi.amplitudes().head(n).array() * op.phase0()).matrix();
    amplitudes.tail(n) =
        (psi.amplitudes().tail(n).array() * op.phase1()).matrix();
    return CompositeState(std::move(amplitudes));
}

Complex u_expectation(const EvolutionOperator& op, const CompositeState& psi) {
    const Eigen::Index n = op.system_dim();
    if (psi.system_dim() != n) {
        throw ShapeError("operator/state dimension mismatch in expectation");
    }
    // U is diagonal here, so <psi|U|psi> = sum_j |psi_j|^2 phase_j.
    const auto head = psi.amplitudes().head(n).array();
    const auto tail = psi.amplitudes().tail(n).array();
    return (head.abs2() * op.phase0()).sum() + (tail.abs2() * op.phase1()).sum();
}

CompositeState step_closed_form(const CompositeState& psi, const EvolutionOperator& op) {
    // The reflection is about the unit-norm state, so the expectation must be
    // taken with respect to it as well. Using the raw quadratic form would let
    // the ~1e-16 norm error feed back through the coefficients, where it
    // compounds by roughly 1 + 4|w|^2(4|w|^2 - 1) per step.
    const Complex w = u_expectation(op, psi) / psi.amplitudes().squaredNorm();
    const CompositeState u_psi = apply_u(op, psi);
    const double coeff = 4.0 * std::norm(w) - 1.0;
    Eigen::VectorXcd amplitudes =
        coeff * psi.amplitudes() - 2.0 * std::conj(w) * u_psi.amplitudes();
    for (Eigen::Index j = 0; j < amplitudes.size(); ++j) {
        if (std::norm(amplitudes[j]) < kHardUnderflow) {
            amplitudes[j] = Complex(0.0, 0.0);
        }
    }
    const double deviation = std::abs(amplitudes.squaredNorm() - 1.0);
    if (deviation > kStepNormLimit) {
        throw NumericalDegradation("reflection step lost unitarity; norm^2 off by " +
                                   std::to_string(deviation));
    }
    return CompositeState(std::move(amplitudes));
}

Eigen::MatrixXcd explicit_step_matrix(const CompositeState& psi, const EvolutionOperator& op,
                                      int dense_dim_limit) {
    const Eigen::Index dim = psi.total_dim();
    if (dim > dense_dim_limit) {
        throw RefuseDense("dense step requires dimension <= " + std::to_string(dense_dim_limit) +
                          ", got " + std::to_string(dim));
    }
    if (op.system_dim() != psi.system_dim()) {
        throw ShapeError("operator/state dimension mismatch in dense step");
    }
    // Householder projector of the normalized state; dividing by the squared
    // norm keeps the reflection exactly involutory even when the stored
    // amplitudes carry rounding-level norm error.
    const Eigen::MatrixXcd reflection =
        Eigen::MatrixXcd::Identity(dim, dim) -
        (2.0 / psi.amplitudes().squaredNorm()) * (psi.amplitudes() * psi.amplitudes().adjoint());
    const Eigen::MatrixXcd u = op.dense();
    return reflection * u * reflection * u.adjoint();
}

CompositeState step_explicit(const std::vector<CompositeState>& history,
                             const EvolutionOperator& op, int dense_dim_limit) {
    if (history.empty()) {
        throw ShapeError("step_explicit needs at least the current state in its history");
    }
    const CompositeState& previous = history.back();
    const Eigen::MatrixXcd t = explicit_step_matrix(previous, op, dense_dim_limit);
    return CompositeState(t * previous.amplitudes());
}

MeasurementOutcome measure_ancilla(const CompositeState& psi, int branch) {
    if (branch != 0 && branch != 1) {
        throw DomainError("measurement branch must be 0 or 1");
    }
    MeasurementOutcome out;
    const Eigen::VectorXcd block = psi.block(branch);
    out.probability = block.squaredNorm();
    if (out.probability <= 0.0) {
        throw DegenerateMeasurement("ancilla branch " + std::to_string(branch) +
                                    " has zero probability");
    }
    out.system_state = block / std::sqrt(out.probability);
    return out;
}

Eigen::ArrayXd fractions_of(const CompositeState& psi) {
    const Eigen::Index n = psi.system_dim();
    return psi.amplitudes().head(n).array().abs2() + psi.amplitudes().tail(n).array().abs2();
}

Eigen::ArrayXd fractions_of(const Eigen::VectorXcd& system_state, const RotationMatrix& rotation) {
    return rotation.to_eigenbasis(system_state).array().abs2();
}

RunResult run_until_statevector(const Spectrum& spectrum, const InitialOverlaps& overlaps,
                                const RunConfig& config) {
    validate_run_config(config);
    if (spectrum.size() != overlaps.size()) {
        throw ShapeError("spectrum and overlaps dimensions differ");
    }
    const EvolutionOperator op(spectrum, config.tau);
    const long max_iter = config.max_iter > 0
                              ? config.max_iter
                              : default_max_iter(spectrum, config.tau, config.epsilon);
    const double target = 1.0 - config.epsilon;

    CompositeState psi = build_initial_composite(overlaps);
    Eigen::ArrayXd fractions = fractions_of(psi);

    auto make_row = [&](long iter, double gsq_0, double gsq_1, double w_mag) {
        TraceRow row;
        row.iter = iter;
        row.f_lambda0 = fractions[0];
        row.f_lambda1 = fractions[1];
        row.gsq_0 = gsq_0;
        row.gsq_1 = gsq_1;
        row.w_mag = w_mag;
        row.xi = boundary_factor(w_mag, config.tau);
        row.norm_drift = std::abs(fractions.sum() - 1.0);
        if (row.norm_drift > kDriftLimit) {
            throw NumericalDegradation("fraction sum drifted by " + std::to_string(row.norm_drift) +
                                       " at iteration " + std::to_string(iter));
        }
        return row;
    };

    // Expectation of the normalized state, like the coefficients inside
    // step_closed_form.
    auto w_of = [&op](const CompositeState& state) {
        return std::abs(u_expectation(op, state)) / state.amplitudes().squaredNorm();
    };

    RunResult out;
    out.trace.push_back(make_row(0, 1.0, 1.0, w_of(psi)));
    if (fractions[0] >= target) {
        out.n_c = 0;
        out.converged = true;
        return out;
    }
    for (long i = 1; i <= max_iter; ++i) {
        const double f0_prev = fractions[0];
        const double f1_prev = fractions[1];
        psi = step_closed_form(psi, op);
        fractions = fractions_of(psi);
        // The per-level fraction ratio measures the squared step multiplier.
        // Once a suppressed level underflows the ratio is 0/0; report 1.
        const double gsq_0 = f0_prev > 0.0 ? fractions[0] / f0_prev : 1.0;
        const double gsq_1 = f1_prev > 0.0 ? fractions[1] / f1_prev : 1.0;
        out.trace.push_back(make_row(i, gsq_0, gsq_1, w_of(psi)));
        if (fractions[0] >= target) {
            out.n_c = i;
            out.converged = true;
            return out;
        }
    }
    out.n_c = max_iter;
    out.converged = false;
    return out;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "composite dumps assume a little-endian host");

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T read_raw(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) {
        throw ShapeError("truncated composite dump");
    }
    return value;
}

}  // namespace

void dump_composite(std::ostream& out, const CompositeState& psi, long iter) {
    write_raw<std::int64_t>(out, psi.total_dim());
    write_raw<std::int64_t>(out, iter);
    for (Eigen::Index j = 0; j < psi.total_dim(); ++j) {
        write_raw<double>(out, psi.amplitudes()[j].real());
        write_raw<double>(out, psi.amplitudes()[j].imag());
    }
}

CompositeDump load_composite(std::istream& in) {
    const auto dim = read_raw<std::int64_t>(in);
    const auto iter = read_raw<std::int64_t>(in);
    if (dim < 4 || dim % 2 != 0 || dim > (std::int64_t(1) << 30)) {
        throw ShapeError("composite dump header carries invalid dimension " +
                         std::to_string(dim));
    }
    Eigen::VectorXcd amplitudes(dim);
    for (std::int64_t j = 0; j < dim; ++j) {
        const double re = read_raw<double>(in);
        const double im = read_raw<double>(in);
        amplitudes[j] = Complex(re, im);
    }
    return CompositeDump{iter, CompositeState(std::move(amplitudes))};
}

}  // namespace eigenamp
