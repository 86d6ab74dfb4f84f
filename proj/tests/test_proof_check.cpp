#include "doctest.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "eigenamp/errors.hpp"
#include "eigenamp/proof_check.hpp"
#include "eigenamp/spectral_engine.hpp"
#include "eigenamp/spectrum.hpp"
#include "eigenamp/statevector_engine.hpp"

using namespace eigenamp;

namespace {

// 50-digit reference values, rounded to double.
constexpr double kRes02_08 = 0.08933567311009515;   // residual for lambda = {0.2, 0.8}
constexpr double kRes02_07 = 0.0816764630113646;    // residual for lambda = {0.2, 0.7}
constexpr double kFloorMilli = 1.5421256083984926e-07;  // floor(tau = 1, min_gap = 1e-3)

Spectrum two_level() {
    Eigen::ArrayXd lams(2);
    lams << 0.2, 0.8;
    return Spectrum(lams);
}

RunResult clean_two_level_run(double epsilon) {
    RunConfig config;
    config.epsilon = epsilon;
    return run_until(two_level(), uniform_overlaps(2), config);
}

bool has_violation(const std::vector<Violation>& violations, const std::string& name) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.invariant == name; });
}

FixedPointCandidate pair_candidate(double l0, double l1) {
    FixedPointCandidate candidate;
    candidate.lambdas = Eigen::ArrayXd(2);
    candidate.lambdas << l0, l1;
    candidate.weights = Eigen::ArrayXd::Constant(2, 0.5);
    candidate.tau = 1.0;
    return candidate;
}

}  // namespace

TEST_CASE("clean traces from every engine pass all invariants") {
    const std::vector<Violation> none = check_run_invariants(clean_two_level_run(0.012),
                                                             two_level(), 1.0);
    CHECK(none.empty());

    Eigen::ArrayXd lams(4);
    lams << 0.1, 0.35, 0.6, 0.85;
    const Spectrum ladder(lams);
    RunConfig config;
    config.epsilon = 0.01;
    CHECK(check_run_invariants(run_until(ladder, uniform_overlaps(4), config), ladder, 1.0)
              .empty());

    const Spectrum random = make_random_spectrum(16, 0.05, 7);
    const InitialOverlaps overlaps = random_overlaps(16, 8);
    CHECK(check_run_invariants(run_until(random, overlaps, config), random, 1.0).empty());
    CHECK(check_run_invariants(run_until_statevector(random, overlaps, config), random, 1.0)
              .empty());
}

TEST_CASE("corrupted traces are flagged by name") {
    const Spectrum s = two_level();

    RunResult bumped_w = clean_two_level_run(0.012);
    bumped_w.trace[1].w_mag += 0.01;
    std::vector<Violation> violations = check_run_invariants(bumped_w, s, 1.0);
    CHECK(has_violation(violations, "multiplier-identity"));

    RunResult climbing_w = clean_two_level_run(0.012);
    climbing_w.trace[1].w_mag += 0.1;  // now above the iteration-0 value
    violations = check_run_invariants(climbing_w, s, 1.0);
    CHECK(has_violation(violations, "w-monotone"));

    RunResult weak_ground = clean_two_level_run(0.012);
    weak_ground.trace[1].gsq_0 = 0.98;
    violations = check_run_invariants(weak_ground, s, 1.0);
    CHECK(has_violation(violations, "ground-multiplier"));

    RunResult dipped = clean_two_level_run(0.012);
    dipped.trace[2].f_lambda0 = dipped.trace[1].f_lambda0 - 1e-3;
    violations = check_run_invariants(dipped, s, 1.0);
    CHECK(has_violation(violations, "ground-fraction-monotone"));

    RunResult drifted = clean_two_level_run(0.012);
    drifted.trace[2].norm_drift = 1e-3;
    violations = check_run_invariants(drifted, s, 1.0);
    CHECK(has_violation(violations, "norm-drift"));

    RunResult runaway = clean_two_level_run(0.012);
    runaway.trace[1].w_mag = 0.9999;  // above cos(pi (1 - 0.8)/4)
    violations = check_run_invariants(runaway, s, 1.0);
    CHECK(has_violation(violations, "w-upper-bound"));

    RunResult empty;
    CHECK_THROWS_AS(check_run_invariants(empty, s, 1.0), ShapeError);
}

TEST_CASE("stall residual matches the frozen two-level values") {
    CHECK(fixed_point_residual(pair_candidate(0.2, 0.8)) ==
          doctest::Approx(kRes02_08).epsilon(1e-14));
    CHECK(fixed_point_residual(pair_candidate(0.2, 0.7)) ==
          doctest::Approx(kRes02_07).epsilon(1e-14));

    // The residual ignores the weight labels entirely.
    FixedPointCandidate skewed = pair_candidate(0.2, 0.8);
    skewed.weights << 0.9, 0.1;
    CHECK(fixed_point_residual(skewed) == fixed_point_residual(pair_candidate(0.2, 0.8)));

    // A single surviving level always stalls: residual exactly zero.
    FixedPointCandidate trivial;
    trivial.lambdas = Eigen::ArrayXd::Constant(1, 0.3);
    trivial.weights = Eigen::ArrayXd::Constant(1, 1.0);
    CHECK(fixed_point_residual(trivial) == 0.0);
}

TEST_CASE("stall candidates are validated") {
    FixedPointCandidate candidate = pair_candidate(0.2, 0.8);

    candidate.weights = Eigen::ArrayXd::Constant(3, 1.0 / 3.0);
    CHECK_THROWS_AS(fixed_point_residual(candidate), ShapeError);

    candidate = pair_candidate(0.2, 0.8);
    candidate.weights << 0.8, 0.1;  // sums to 0.9
    CHECK_THROWS_AS(fixed_point_residual(candidate), DomainError);

    candidate = pair_candidate(0.2, 0.8);
    candidate.weights << 1.2, -0.2;
    CHECK_THROWS_AS(fixed_point_residual(candidate), DomainError);

    candidate = pair_candidate(0.2, 1.1);  // eigenvalue outside (0, 1]
    CHECK_THROWS_AS(fixed_point_residual(candidate), DomainError);

    candidate = pair_candidate(0.2, 0.8);
    candidate.tau = 0.0;
    CHECK_THROWS_AS(fixed_point_residual(candidate), DomainError);

    FixedPointCandidate empty;
    empty.lambdas = Eigen::ArrayXd(0);
    empty.weights = Eigen::ArrayXd(0);
    CHECK_THROWS_AS(fixed_point_residual(empty), InvalidDimension);
}

TEST_CASE("analytic residual floor is sharp for adjacent pairs") {
    CHECK(fixed_point_floor(1.0, 1e-3) == doctest::Approx(kFloorMilli).epsilon(1e-12));

    // Floor formula: half the cosine drop across the minimum gap at the top
    // of the eigenvalue range, where the cosine is flattest.
    const double expected = 0.5 * (std::cos(0.0) - std::cos(0.125 * kPi));
    CHECK(fixed_point_floor(1.0, 0.5) == doctest::Approx(expected).epsilon(1e-14));

    // Every concrete residual sits above the floor for its own gap.
    CHECK(fixed_point_residual(pair_candidate(0.2, 0.7)) > fixed_point_floor(1.0, 0.499));
}

TEST_CASE("randomized stall search never lands below the floor") {
    const double best = falsify_nontrivial_fixed_points(2000, 31, 1.0, 1e-3);
    CHECK(best > fixed_point_floor(1.0, 1e-3));
    CHECK(best < 1.0);

    // Deterministic in the seed.
    CHECK(falsify_nontrivial_fixed_points(2000, 31, 1.0, 1e-3) == best);
    CHECK(falsify_nontrivial_fixed_points(2000, 32, 1.0, 1e-3) != best);

    CHECK_THROWS_AS(falsify_nontrivial_fixed_points(0, 31, 1.0, 1e-3), DomainError);
    CHECK_THROWS_AS(falsify_nontrivial_fixed_points(10, 31, 1.0, 0.5), DomainError);
}

TEST_CASE("composite energy levels interleave into an ascending chain") {
    const CompositeSpectrum cs = composite_spectrum(two_level(), 1.0);
    REQUIRE(cs.energies.size() == 4);

    // pi tau lambda / 4 for the ancilla-0 block, pi/2 minus that for the
    // ancilla-1 block, sorted: 0.05 pi, 0.2 pi, 0.3 pi, 0.45 pi.
    CHECK(cs.energies[0] == doctest::Approx(0.15707963267948966).epsilon(1e-15));
    CHECK(cs.energies[1] == doctest::Approx(0.6283185307179586).epsilon(1e-15));
    CHECK(cs.energies[2] == doctest::Approx(0.9424777960769379).epsilon(1e-15));
    CHECK(cs.energies[3] == doctest::Approx(1.413716694115407).epsilon(1e-15));

    REQUIRE(cs.labels.size() == 4);
    CHECK(cs.labels[0] == std::pair<int, int>(0, 0));
    CHECK(cs.labels[1] == std::pair<int, int>(0, 1));
    CHECK(cs.labels[2] == std::pair<int, int>(1, 1));
    CHECK(cs.labels[3] == std::pair<int, int>(1, 0));

    // Interior equalities are legitimate (lambda_k + lambda_j = 2/tau cases);
    // the ladder with e0 = 0.25 pins its top level at 1 and meets its mirror.
    const CompositeSpectrum tied = composite_spectrum(make_ladder_spectrum(4, 0.25), 1.0);
    CHECK(tied.energies[3] == tied.energies[4]);
    for (int j = 1; j < tied.energies.size(); ++j) {
        CHECK(tied.energies[j] >= tied.energies[j - 1]);
    }
    CHECK(tied.energies[0] < tied.energies[1]);
    CHECK(tied.energies[6] < tied.energies[7]);
}

TEST_CASE("iteration ceiling matches the closed form") {
    CHECK(nc_upper_bound(1.0, 0.1, 0.01) == doctest::Approx(636.6197723675814).epsilon(1e-15));
    CHECK(nc_upper_bound(1.0, 0.01, 0.01) == doctest::Approx(6366.197723675813).epsilon(1e-15));
    CHECK(nc_upper_bound(0.5, 0.1, 0.01) == doctest::Approx(1273.2395447351628).epsilon(1e-15));

    CHECK_THROWS_AS(nc_upper_bound(0.0, 0.1, 0.01), DomainError);
    CHECK_THROWS_AS(nc_upper_bound(1.0, 0.0, 0.01), DomainError);
    CHECK_THROWS_AS(nc_upper_bound(1.0, 0.1, 0.0), DomainError);
}
