#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"

namespace eigenamp {

// One failed inequality in a checked trace. Violations are data, not
// exceptions: a clean run yields an empty list.
struct Violation {
    std::string invariant;
    long iter = 0;
    double magnitude = 0.0;  // how far past the tolerated bound
};

// Evaluate every analytic guarantee of the amplifier recursion against a
// recorded trace:
//   w-lower-bound / w-upper-bound   w_i within the spectrum's cosine range
//   w-above-half                    w_i^2 >= 1/2
//   w-monotone                      w_i nonincreasing
//   ground-fraction-monotone        f_i(lambda_0) nondecreasing
//   ground-multiplier               squared step multiplier of level 0 >= 1
//   xi-bounds / xi-monotone         boundary factor range and direction
//   group-classification            multiplier >=1 iff lambda <= previous xi
//   multiplier-identity             |gamma|^2 == 1 + 4w(4w^2-1)(w - cos term)
//   norm-drift                      fraction sum within 1e-6 of 1
// Checks involving the lambda_1 multiplier are skipped once the level's
// fraction underflows past 1e-200 (ratio-based traces lose meaning there).
std::vector<Violation> check_run_invariants(const RunResult& result, const Spectrum& spectrum,
                                            double tau);

// Hypothetical nontrivial convergence point: the amplification would stall
// with weights u_l spread over several surviving levels. The stall condition
// requires every surviving level's cosine to equal their weighted mean,
// which distinct eigenvalues can never satisfy.
struct FixedPointCandidate {
    Eigen::ArrayXd lambdas;  // k'+1 surviving eigenvalues
    Eigen::ArrayXd weights;  // u_l >= 0, summing to 1
    double tau = 1.0;
};

// Largest deviation |mean(c) - c_l| over the candidate's cosines; zero iff
// the stall condition holds. Independent of the weights (they only label the
// candidate) and permutation-invariant in the (lambda, weight) pairs.
double fixed_point_residual(const FixedPointCandidate& candidate);

// Sample `n_samples` random candidates with at least two surviving levels
// (up to nine) and pairwise eigenvalue gaps >= min_gap; returns the smallest
// residual seen. The cosine's strict monotonicity gives the analytic floor
// (c(1) - c(1 - min_gap)) / 2; an InternalError is thrown if any sample ever
// lands below it, since that would mean the residual arithmetic is broken.
double falsify_nontrivial_fixed_points(long n_samples, std::uint64_t seed, double tau,
                                       double min_gap = 1e-3);

// The analytic residual floor described above.
double fixed_point_floor(double tau, double min_gap);

// Energy levels of ancilla (x) system under the propagator's generator:
// level (0, k) sits at pi tau lambda_k / 4 and level (1, k) at
// pi/2 - pi tau lambda_k / 4, which interleave into one ascending chain.
struct CompositeSpectrum {
    Eigen::ArrayXd energies;                    // ascending, length 2N
    std::vector<std::pair<int, int>> labels;    // (ancilla bit, system index)
};

// Build and order-check the composite spectrum. The chain must satisfy
// E_0 < E_1 <= ... <= E_{2N-2} < E_{2N-1}; a violation indicates a corrupted
// input spectrum and raises InternalError.
CompositeSpectrum composite_spectrum(const Spectrum& spectrum, double tau);

// Analytic iteration-count ceiling (2/pi) / (tau * gap * epsilon). Valid as
// a guarantee only when the two lowest eigenvalues are small (the derivation
// drops higher-order terms); kSmallEigenvaluePremise is the default cutoff
// below which callers treat the bound as binding.
inline constexpr double kSmallEigenvaluePremise = 0.05;
double nc_upper_bound(double tau, double gap, double epsilon);

}  // namespace eigenamp
