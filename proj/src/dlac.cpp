#include "eigenamp/dlac.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "eigenamp/errors.hpp"

namespace eigenamp {

namespace {

void validate_fractions(const Eigen::ArrayXd& fractions) {
    if (fractions.size() < 2) {
        throw InvalidDimension("cooling baseline needs at least two levels");
    }
    if ((fractions < 0.0).any()) {
        throw DomainError("fractions must be nonnegative");
    }
    if (std::abs(fractions.sum() - 1.0) > 1e-12) {
        throw DomainError("fractions must sum to 1 within 1e-12, got " +
                          std::to_string(fractions.sum()));
    }
}

Eigen::ArrayXd cooling_weights(const Spectrum& spectrum, double tau) {
    if (!(tau > 0.0) || tau > 1.0) {
        throw DomainError("tau must lie in (0, 1], got " + std::to_string(tau));
    }
    // Squared amplitude attenuation per step.
    return (-0.5 * kPi * tau * spectrum.eigenvalues()).exp();
}

// Matches the amplifier engine: fractions this small are snapped to exact
// zero so suppressed levels never linger in the subnormal range, where
// arithmetic can cost a microcode assist per operation.
constexpr double kHardUnderflow = 1e-300;

// One cooling step with precomputed weights.
void apply_cooling(DlacState& state, const Eigen::ArrayXd& weights) {
    state.fractions *= weights;
    const double total = state.fractions.sum();
    if (!(total > 0.0)) {
        throw DegenerateState("all fractions underflowed to zero during cooling");
    }
    state.fractions /= total;
    state.fractions = (state.fractions < kHardUnderflow).select(0.0, state.fractions);
    state.iter += 1;
}

}  // namespace

DlacState dlac_initial(const Eigen::ArrayXd& fractions0) {
    validate_fractions(fractions0);
    return DlacState{0, fractions0};
}

DlacState dlac_step(DlacState state, const Spectrum& spectrum, double tau) {
    if (state.fractions.size() != spectrum.size()) {
        throw ShapeError("state and spectrum dimensions differ");
    }
    apply_cooling(state, cooling_weights(spectrum, tau));
    return state;
}

RunResult dlac_run(const Spectrum& spectrum, const Eigen::ArrayXd& fractions0,
                   const RunConfig& config) {
    if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0)) {
        throw DomainError("epsilon must lie in (0, 1), got " + std::to_string(config.epsilon));
    }
    if (fractions0.size() != spectrum.size()) {
        throw ShapeError("initial fractions and spectrum dimensions differ");
    }
    const Eigen::ArrayXd weights = cooling_weights(spectrum, config.tau);
    const long max_iter = config.max_iter > 0
                              ? config.max_iter
                              : default_max_iter(spectrum, config.tau, config.epsilon);
    const double target = 1.0 - config.epsilon;

    DlacState state = dlac_initial(fractions0);
    auto make_row = [&](double gsq_0, double gsq_1) {
        TraceRow row;
        row.iter = state.iter;
        row.f_lambda0 = state.fractions[0];
        row.f_lambda1 = state.fractions[1];
        row.gsq_0 = gsq_0;
        row.gsq_1 = gsq_1;
        row.w_mag = 0.0;
        row.xi = 0.0;
        row.norm_drift = std::abs(state.fractions.sum() - 1.0);
        return row;
    };

    RunResult out;
    out.trace.push_back(make_row(1.0, 1.0));
    if (state.fractions[0] >= target) {
        out.n_c = 0;
        out.converged = true;
        return out;
    }
    for (long i = 1; i <= max_iter; ++i) {
        apply_cooling(state, weights);
        out.trace.push_back(make_row(weights[0], weights[1]));
        if (state.fractions[0] >= target) {
            out.n_c = i;
            out.converged = true;
            return out;
        }
    }
    out.n_c = max_iter;
    out.converged = false;
    return out;
}

}  // namespace eigenamp
