#include "eigenamp/proof_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigenamp/errors.hpp"
#include "eigenamp/rng.hpp"

namespace eigenamp {

namespace {

// Tolerances, chosen once here: 1e-12 for quantities compared at machine
// precision, 1e-9 for the xi axis (the arccos amplifies w noise near 1),
// 1e-6 for the fraction-sum drift budget of long runs.
constexpr double kTight = 1e-12;
constexpr double kXiTol = 1e-9;
constexpr double kDriftTol = 1e-6;
// Below this fraction, ratio-derived multiplier columns are meaningless.
constexpr double kFractionFloor = 1e-200;

double cos_term(double tau, double lambda) {
    return std::cos(0.25 * kPi * (1.0 - tau * lambda));
}

}  // namespace

std::vector<Violation> check_run_invariants(const RunResult& result, const Spectrum& spectrum,
                                            double tau) {
    if (result.trace.empty()) {
        throw ShapeError("trace is empty; nothing to check");
    }
    const double c_low = cos_term(tau, spectrum.lambda_min());
    const double c_high = cos_term(tau, spectrum.lambda_max());
    const double c_0 = c_low;
    const double c_1 = cos_term(tau, spectrum.lambda(1));

    std::vector<Violation> violations;
    auto flag = [&](const char* name, long iter, double magnitude) {
        violations.push_back(Violation{name, iter, magnitude});
    };

    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const TraceRow& row = result.trace[i];
        if (row.w_mag < c_low - kTight) {
            flag("w-lower-bound", row.iter, c_low - row.w_mag);
        }
        if (row.w_mag > c_high + kTight) {
            flag("w-upper-bound", row.iter, row.w_mag - c_high);
        }
        if (row.w_mag * row.w_mag < 0.5 - kTight) {
            flag("w-above-half", row.iter, 0.5 - row.w_mag * row.w_mag);
        }
        if (row.xi < spectrum.lambda_min() - kXiTol) {
            flag("xi-bounds", row.iter, spectrum.lambda_min() - row.xi);
        }
        if (row.xi > spectrum.lambda_max() + kXiTol) {
            flag("xi-bounds", row.iter, row.xi - spectrum.lambda_max());
        }
        if (row.norm_drift > kDriftTol) {
            flag("norm-drift", row.iter, row.norm_drift - kDriftTol);
        }
        if (i == 0) {
            continue;
        }
        const TraceRow& prev = result.trace[i - 1];
        if (row.f_lambda0 < prev.f_lambda0 - kTight) {
            flag("ground-fraction-monotone", row.iter, prev.f_lambda0 - row.f_lambda0);
        }
        if (row.w_mag > prev.w_mag + kTight) {
            flag("w-monotone", row.iter, row.w_mag - prev.w_mag);
        }
        if (row.xi > prev.xi + kXiTol) {
            flag("xi-monotone", row.iter, row.xi - prev.xi);
        }
        if (row.gsq_0 < 1.0 - kTight) {
            flag("ground-multiplier", row.iter, 1.0 - row.gsq_0);
        }
        // Per-level multiplier checks against the previous row's w and xi.
        const double w_prev = prev.w_mag;
        const double coeff = 4.0 * w_prev * (4.0 * w_prev * w_prev - 1.0);
        const struct {
            double lambda;
            double cos;
            double gsq;
            bool alive;
        } levels[2] = {
            {spectrum.lambda(0), c_0, row.gsq_0, true},
            {spectrum.lambda(1), c_1, row.gsq_1, prev.f_lambda1 > kFractionFloor},
        };
        for (const auto& level : levels) {
            if (!level.alive) {
                continue;
            }
            const double expected = 1.0 + coeff * (w_prev - level.cos);
            if (std::abs(level.gsq - expected) > kTight) {
                flag("multiplier-identity", row.iter, std::abs(level.gsq - expected) - kTight);
            }
            if (level.lambda <= prev.xi - kXiTol && level.gsq < 1.0 - kTight) {
                flag("group-classification", row.iter, 1.0 - level.gsq);
            }
            if (level.lambda >= prev.xi + kXiTol && level.gsq > 1.0 + kTight) {
                flag("group-classification", row.iter, level.gsq - 1.0);
            }
        }
    }
    return violations;
}

double fixed_point_residual(const FixedPointCandidate& candidate) {
    const Eigen::Index m = candidate.lambdas.size();
    if (m < 1) {
        throw InvalidDimension("candidate needs at least one surviving level");
    }
    if (candidate.weights.size() != m) {
        throw ShapeError("weights and lambdas must have equal length");
    }
    if ((candidate.weights < 0.0).any()) {
        throw DomainError("weights must be nonnegative");
    }
    if (std::abs(candidate.weights.sum() - 1.0) > 1e-12) {
        throw DomainError("weights must sum to 1 within 1e-12");
    }
    if (!(candidate.tau > 0.0) || candidate.tau > 1.0) {
        throw DomainError("tau must lie in (0, 1]");
    }
    if ((candidate.lambdas <= 0.0).any() || (candidate.lambdas > 1.0).any()) {
        throw DomainError("candidate eigenvalues must lie in (0, 1]");
    }
    Eigen::ArrayXd cosines(m);
    for (Eigen::Index l = 0; l < m; ++l) {
        cosines[l] = cos_term(candidate.tau, candidate.lambdas[l]);
    }
    const double mean = cosines.mean();
    return (cosines - mean).abs().maxCoeff();
}

double fixed_point_floor(double tau, double min_gap) {
    // Cosine range of the two closest admissible eigenvalues, at the flat end
    // of the curve (lambda near 1); half the range bounds the residual.
    return 0.5 * (cos_term(tau, 1.0) - cos_term(tau, 1.0 - min_gap));
}

double falsify_nontrivial_fixed_points(long n_samples, std::uint64_t seed, double tau,
                                       double min_gap) {
    if (n_samples < 1) {
        throw DomainError("need at least one sample");
    }
    if (!(tau > 0.0) || tau > 1.0) {
        throw DomainError("tau must lie in (0, 1]");
    }
    if (!(min_gap > 0.0) || min_gap >= 0.5) {
        throw DomainError("min_gap must lie in (0, 0.5)");
    }
    const double floor = fixed_point_floor(tau, min_gap);
    Rng rng(seed);
    double min_residual = std::numeric_limits<double>::infinity();
    for (long s = 0; s < n_samples; ++s) {
        // Two to nine surviving levels with pairwise gaps >= min_gap.
        const int m = 2 + static_cast<int>(rng.uniform01() * 8.0);
        Eigen::ArrayXd lambdas(m);
        while (true) {
            for (int l = 0; l < m; ++l) {
                lambdas[l] = 1.0 - rng.uniform01();  // uniform in (0, 1]
            }
            std::sort(lambdas.data(), lambdas.data() + m);
            bool spaced = true;
            for (int l = 1; l < m; ++l) {
                spaced = spaced && (lambdas[l] - lambdas[l - 1] >= min_gap);
            }
            if (spaced) {
                break;
            }
        }
        // Uniform random weight simplex (exponential trick).
        Eigen::ArrayXd weights(m);
        for (int l = 0; l < m; ++l) {
            double u = 0.0;
            do {
                u = rng.uniform01();
            } while (u == 0.0);
            weights[l] = -std::log(u);
        }
        weights /= weights.sum();
        const double residual = fixed_point_residual(FixedPointCandidate{lambdas, weights, tau});
        if (residual < floor) {
            throw InternalError("fixed-point residual " + std::to_string(residual) +
                                " fell below its analytic floor " + std::to_string(floor));
        }
        min_residual = std::min(min_residual, residual);
    }
    return min_residual;
}

CompositeSpectrum composite_spectrum(const Spectrum& spectrum, double tau) {
    if (!(tau > 0.0) || tau > 1.0) {
        throw DomainError("tau must lie in (0, 1]");
    }
    const int n = spectrum.size();
    CompositeSpectrum out;
    out.energies.resize(2 * n);
    out.labels.resize(2 * n);
    for (int k = 0; k < n; ++k) {
        const double base = 0.25 * kPi * tau * spectrum.lambda(k);
        out.energies[k] = base;
        out.labels[k] = {0, k};
        out.energies[2 * n - 1 - k] = 0.5 * kPi - base;
        out.labels[2 * n - 1 - k] = {1, k};
    }
    // Ascending chain, strict at both ends (the gap between the two lowest
    // eigenvalues is strict, and it reappears mirrored at the top).
    for (int j = 1; j < 2 * n; ++j) {
        if (out.energies[j] < out.energies[j - 1]) {
            throw InternalError("composite energies out of order at index " + std::to_string(j));
        }
    }
    if (!(out.energies[0] < out.energies[1]) ||
        !(out.energies[2 * n - 2] < out.energies[2 * n - 1])) {
        throw InternalError("composite spectrum lost the strict gap at its ends");
    }
    return out;
}

double nc_upper_bound(double tau, double gap, double epsilon) {
    if (!(tau > 0.0) || !(gap > 0.0) || !(epsilon > 0.0)) {
        throw DomainError("tau, gap, and epsilon must all be positive");
    }
    return (2.0 / kPi) / (tau * gap * epsilon);
}

}  // namespace eigenamp
