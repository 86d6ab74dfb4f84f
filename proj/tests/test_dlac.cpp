#include "doctest.h"

#include <Eigen/Core>

#include <cmath>

#include "eigenamp/dlac.hpp"
#include "eigenamp/errors.hpp"
#include "eigenamp/spectrum.hpp"

using namespace eigenamp;

namespace {

// 50-digit reference values for the two-level system lambda = {0.2, 0.8},
// tau = 1, uniform start, rounded to double.
constexpr double kWeight0 = 0.7304026910486456;   // e^{-pi 0.2 / 2}
constexpr double kWeight1 = 0.2846095433360293;   // e^{-pi 0.8 / 2}
constexpr double kCoolF1_0 = 0.7195998888539836;  // ground fraction after one step
constexpr double kCoolF1_1 = 0.2804001111460164;
constexpr double kCoolF10 = 0.9999193069943163;  // ground fraction after ten steps

Spectrum two_level() {
    Eigen::ArrayXd lams(2);
    lams << 0.2, 0.8;
    return Spectrum(lams);
}

Eigen::ArrayXd half_half() {
    Eigen::ArrayXd f(2);
    f << 0.5, 0.5;
    return f;
}

}  // namespace

TEST_CASE("cooling start validates its fraction vector") {
    const DlacState state = dlac_initial(half_half());
    CHECK(state.iter == 0);
    CHECK(state.fractions[0] == 0.5);

    Eigen::ArrayXd single(1);
    single << 1.0;
    CHECK_THROWS_AS(dlac_initial(single), InvalidDimension);

    Eigen::ArrayXd negative(2);
    negative << 1.2, -0.2;
    CHECK_THROWS_AS(dlac_initial(negative), DomainError);

    Eigen::ArrayXd unnormalized(2);
    unnormalized << 0.6, 0.6;
    CHECK_THROWS_AS(dlac_initial(unnormalized), DomainError);
}

TEST_CASE("one cooling step attenuates and renormalizes") {
    const Spectrum s = two_level();
    DlacState state = dlac_initial(half_half());
    state = dlac_step(std::move(state), s, 1.0);

    CHECK(state.iter == 1);
    CHECK(state.fractions[0] == doctest::Approx(kCoolF1_0).epsilon(1e-13));
    CHECK(state.fractions[1] == doctest::Approx(kCoolF1_1).epsilon(1e-13));
    CHECK(state.fractions.sum() == doctest::Approx(1.0).epsilon(1e-15));

    DlacState mismatched = dlac_initial(half_half());
    CHECK_THROWS_AS(dlac_step(std::move(mismatched), make_ladder_spectrum(3, 0.1), 1.0),
                    ShapeError);

    DlacState bad_tau = dlac_initial(half_half());
    CHECK_THROWS_AS(dlac_step(std::move(bad_tau), s, 0.0), DomainError);
}

TEST_CASE("two-level cooling reaches the closed-form fraction in ten steps") {
    // With uniform start the ground fraction is sigma^i / (sigma^i + 1) with
    // sigma = e^{pi tau (lambda_1 - lambda_0) / 2}; at epsilon = 1e-4 the
    // crossing lands exactly on iteration 10.
    RunConfig config;
    config.epsilon = 1e-4;
    const RunResult result = dlac_run(two_level(), half_half(), config);

    CHECK(result.converged);
    CHECK(result.n_c == 10);
    REQUIRE(result.trace.size() == 11);
    CHECK(result.trace.back().f_lambda0 == doctest::Approx(kCoolF10).epsilon(1e-13));

    const double sigma = std::exp(0.5 * kPi * 0.6);
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const double power = std::pow(sigma, static_cast<double>(i));
        CHECK(result.trace[i].f_lambda0 == doctest::Approx(power / (power + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("cooling trace mirrors the amplifier schema") {
    RunConfig config;
    config.epsilon = 0.01;
    const RunResult result = dlac_run(two_level(), half_half(), config);

    const TraceRow& first = result.trace.front();
    CHECK(first.iter == 0);
    CHECK(first.f_lambda0 == 0.5);
    CHECK(first.gsq_0 == 1.0);
    CHECK(first.gsq_1 == 1.0);

    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        const TraceRow& row = result.trace[i];
        CHECK(row.iter == static_cast<long>(i));
        // gsq columns carry the constant squared cooling factors; the
        // reflection-specific columns stay zeroed.
        CHECK(row.gsq_0 == doctest::Approx(kWeight0).epsilon(1e-15));
        CHECK(row.gsq_1 == doctest::Approx(kWeight1).epsilon(1e-15));
        CHECK(row.w_mag == 0.0);
        CHECK(row.xi == 0.0);
        CHECK(row.norm_drift < 1e-15);
    }
}

TEST_CASE("cooling is monotone on a multi-level ladder") {
    Eigen::ArrayXd lams(4);
    lams << 0.1, 0.35, 0.6, 0.85;
    const Spectrum s(lams);
    const Eigen::ArrayXd f0 = Eigen::ArrayXd::Constant(4, 0.25);

    RunConfig config;
    config.epsilon = 0.01;
    const RunResult result = dlac_run(s, f0, config);
    CHECK(result.converged);
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        CHECK(result.trace[i].f_lambda0 > result.trace[i - 1].f_lambda0);
    }
    // The first excited fraction rises transiently (renormalization feeds it
    // from the faster-decaying upper levels) but ends below the epsilon cap.
    CHECK(result.trace.back().f_lambda1 < 0.01);

    Eigen::ArrayXd wrong_size(3);
    wrong_size << 0.5, 0.3, 0.2;
    CHECK_THROWS_AS(dlac_run(s, wrong_size, config), ShapeError);

    RunConfig bad_eps;
    bad_eps.epsilon = 1.0;
    CHECK_THROWS_AS(dlac_run(s, f0, bad_eps), DomainError);
}
