#pragma once

#include <Eigen/Core>

#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"

namespace eigenamp {

// Best-case algorithmic-cooling baseline: every step attenuates each level's
// amplitude by e^{-pi tau lambda_k / 4} (fraction by the square) and then
// renormalizes, i.e. all post-selection measurements are assumed to succeed.
struct DlacState {
    long iter = 0;
    Eigen::ArrayXd fractions;
};

DlacState dlac_initial(const Eigen::ArrayXd& fractions0);

// One cooling step. Throws DegenerateState if every fraction underflows.
DlacState dlac_step(DlacState state, const Spectrum& spectrum, double tau);

// Iterate to fractions[0] >= 1 - epsilon or max_iter, with the same trace
// schema as the amplifier engines. The gsq_* columns carry the squared
// cooling factors e^{-pi tau lambda/2} of the two lowest levels, and the
// w_mag/xi columns are 0 (the baseline has no reflection expectation).
RunResult dlac_run(const Spectrum& spectrum, const Eigen::ArrayXd& fractions0,
                   const RunConfig& config);

}  // namespace eigenamp
