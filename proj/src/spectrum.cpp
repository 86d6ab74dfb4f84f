#include "eigenamp/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "eigenamp/errors.hpp"
#include "eigenamp/rng.hpp"

namespace eigenamp {

namespace {

// Shared unitarity tolerance for constructed rotations.
constexpr double kUnitarityTol = 1e-10;
// Unit-norm tolerance for states and overlap vectors.
constexpr double kNormTol = 1e-12;

}  // namespace

Spectrum::Spectrum(Eigen::ArrayXd eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    const auto n = eigenvalues_.size();
    if (n < 2) {
        throw InvalidDimension("spectrum needs at least two levels, got " + std::to_string(n));
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lam = eigenvalues_[k];
        if (!std::isfinite(lam) || lam <= 0.0 || lam > 1.0) {
            throw DomainError("eigenvalue " + std::to_string(k) + " = " + std::to_string(lam) +
                              " outside (0, 1]");
        }
        if (k > 0 && lam < eigenvalues_[k - 1]) {
            throw DomainError("eigenvalues not sorted ascending at index " + std::to_string(k));
        }
    }
    if (eigenvalues_[1] <= eigenvalues_[0]) {
        throw DomainError("two lowest eigenvalues must be separated by a strictly positive gap");
    }
}

Spectrum make_ladder_spectrum(int n, double e0) {
    if (n < 2) {
        throw InvalidDimension("ladder spectrum needs n >= 2, got " + std::to_string(n));
    }
    // The top rung is e0 + (n-1)/n, so e0 may not exceed 1/n.
    if (!(e0 > 0.0) || e0 > 1.0 / n) {
        throw InvalidGroundEnergy("ladder ground energy must lie in (0, 1/n], got " +
                                  std::to_string(e0));
    }
    Eigen::ArrayXd lambdas(n);
    for (int k = 0; k < n; ++k) {
        // Clamp so accumulated rounding can never push the top rung past 1.
        lambdas[k] = std::min(e0 + static_cast<double>(k) / n, 1.0);
    }
    return Spectrum(std::move(lambdas));
}

Spectrum make_random_spectrum(int n, double d, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidDimension("random spectrum needs n >= 2, got " + std::to_string(n));
    }
    const double margin = 1.0 / (10.0 * n);
    if (!(d > 0.0) || d >= 1.0 - 2.0 * margin) {
        throw InfeasibleGap("gap " + std::to_string(d) + " leaves no room in (0, 1] for n = " +
                            std::to_string(n));
    }
    Rng rng(seed);
    // lambda_0 follows the law of the smallest of n uniform draws on (0, 1]
    // (inversion of P(min > t) = (1 - t)^n), the marginal a model whose n
    // levels are all drawn uniformly induces on its lowest level. Sampling
    // the whole feasible range uniformly instead would overweight slow
    // near-1 ground levels and distort the iteration-count statistics.
    // Redraw until the forced gap fits; the floor only rejects draws so
    // close to zero they would be numerically meaningless.
    constexpr double kGroundFloor = 1e-9;
    double lambda0 = 0.0;
    do {
        lambda0 = 1.0 - std::pow(1.0 - rng.uniform01(), 1.0 / n);
    } while (!(lambda0 > kGroundFloor) || lambda0 + d > 1.0);
    const double lambda1 = lambda0 + d;
    Eigen::ArrayXd lambdas(n);
    lambdas[0] = lambda0;
    lambdas[1] = lambda1;
    for (int k = 2; k < n; ++k) {
        lambdas[k] = rng.uniform(lambda1, 1.0);
    }
    std::sort(lambdas.data() + 2, lambdas.data() + n);
    return Spectrum(std::move(lambdas));
}

ComputationalState::ComputationalState(Eigen::VectorXcd amplitudes)
    : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 2) {
        throw InvalidDimension("state needs at least two amplitudes");
    }
    const double norm_sq = amplitudes_.squaredNorm();
    if (std::abs(norm_sq - 1.0) > kNormTol) {
        throw DomainError("state norm^2 deviates from 1 by " +
                          std::to_string(std::abs(norm_sq - 1.0)));
    }
}

ComputationalState ComputationalState::uniform(int n) {
    if (n < 2) {
        throw InvalidDimension("uniform state needs n >= 2, got " + std::to_string(n));
    }
    return ComputationalState(
        Eigen::VectorXcd::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
}

RotationMatrix::RotationMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw ShapeError("rotation matrix must be square");
    }
    if (matrix_.rows() < 2) {
        throw InvalidDimension("rotation matrix needs dimension >= 2");
    }
    const Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
    const double deviation =
        (gram - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff();
    if (deviation > kUnitarityTol) {
        throw DomainError("rotation matrix not unitary; max deviation " +
                          std::to_string(deviation));
    }
}

Eigen::VectorXcd RotationMatrix::to_eigenbasis(const Eigen::VectorXcd& amplitudes) const {
    if (amplitudes.size() != matrix_.rows()) {
        throw ShapeError("state dimension does not match rotation dimension");
    }
    return matrix_.adjoint() * amplitudes;
}

std::vector<Eigen::MatrixXcd> su_generators(int n) {
    if (n < 2) {
        throw InvalidDimension("generator basis needs n >= 2, got " + std::to_string(n));
    }
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(n) * n - 1);
    const Complex i_unit(0.0, 1.0);
    // Real symmetric pair matrices.
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
            g(j, k) = 1.0;
            g(k, j) = 1.0;
            out.push_back(std::move(g));
        }
    }
    // Imaginary antisymmetric pair matrices.
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
            g(j, k) = -i_unit;
            g(k, j) = i_unit;
            out.push_back(std::move(g));
        }
    }
    // Diagonal matrices diag(1, ..., 1, -l, 0, ..., 0) / sqrt(l(l+1)/2).
    for (int l = 1; l < n; ++l) {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int j = 0; j < l; ++j) {
            g(j, j) = scale;
        }
        g(l, l) = -scale * l;
        out.push_back(std::move(g));
    }
    return out;
}

Eigen::MatrixXcd su_generator_combination(int n, const Eigen::VectorXd& params) {
    if (n < 2) {
        throw InvalidDimension("generator basis needs n >= 2, got " + std::to_string(n));
    }
    if (params.size() != static_cast<Eigen::Index>(n) * n - 1) {
        throw ShapeError("expected " + std::to_string(static_cast<long long>(n) * n - 1) +
                         " generator coefficients, got " + std::to_string(params.size()));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const Complex i_unit(0.0, 1.0);
    Eigen::Index idx = 0;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double p = params[idx++];
            m(j, k) += p;
            m(k, j) += p;
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double p = params[idx++];
            m(j, k) += -i_unit * p;
            m(k, j) += i_unit * p;
        }
    }
    for (int l = 1; l < n; ++l) {
        const double p = params[idx++];
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int j = 0; j < l; ++j) {
            m(j, j) += p * scale;
        }
        m(l, l) += -p * scale * l;
    }
    return m;
}

RotationMatrix rotation_from_parameters(int n, const Eigen::VectorXd& params) {
    const Eigen::MatrixXcd exponent = su_generator_combination(n, params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(exponent);
    if (solver.info() != Eigen::Success) {
        throw InternalError("eigendecomposition of rotation exponent failed");
    }
    // exp(-i H) = E exp(-i diag) E^dagger for Hermitian H.
    Eigen::VectorXcd phases(n);
    for (int k = 0; k < n; ++k) {
        phases[k] = std::polar(1.0, -solver.eigenvalues()[k]);
    }
    Eigen::MatrixXcd v =
        solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    return RotationMatrix(std::move(v));
}

RotationMatrix make_random_rotation(int n, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidDimension("rotation needs n >= 2, got " + std::to_string(n));
    }
    Rng rng(seed);
    Eigen::VectorXd params(static_cast<Eigen::Index>(n) * n - 1);
    for (Eigen::Index m = 0; m < params.size(); ++m) {
        params[m] = rng.uniform(-kPi, kPi);
    }
    return rotation_from_parameters(n, params);
}

InitialOverlaps::InitialOverlaps(Eigen::ArrayXcd gamma0) : gamma0_(std::move(gamma0)) {
    if (gamma0_.size() < 2) {
        throw InvalidDimension("overlap vector needs at least two levels");
    }
    fractions0_ = gamma0_.abs2();
    const double total = fractions0_.sum();
    if (std::abs(total - 1.0) > kNormTol) {
        throw DomainError("overlap fractions sum to " + std::to_string(total) +
                          ", expected 1 within 1e-12");
    }
    if (!(fractions0_[0] > 0.0)) {
        throw DegenerateState("initial state has zero overlap with the lowest level");
    }
}

InitialOverlaps overlaps_from_state(const RotationMatrix& rotation,
                                    const ComputationalState& state) {
    if (rotation.size() != state.size()) {
        throw ShapeError("rotation and state dimensions differ");
    }
    return InitialOverlaps(rotation.to_eigenbasis(state.amplitudes()).array());
}

InitialOverlaps uniform_overlaps(int n) {
    if (n < 2) {
        throw InvalidDimension("uniform overlaps need n >= 2, got " + std::to_string(n));
    }
    return InitialOverlaps(
        Eigen::ArrayXcd::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
}

InitialOverlaps random_overlaps(int n, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidDimension("random overlaps need n >= 2, got " + std::to_string(n));
    }
    Rng rng(seed);
    Eigen::ArrayXcd gamma(n);
    do {
        for (int k = 0; k < n; ++k) {
            gamma[k] = Complex(rng.normal(), rng.normal());
        }
        // Redraw in the (measure-zero) event of a vanishing ground overlap.
    } while (std::abs(gamma[0]) == 0.0);
    gamma /= std::sqrt(gamma.abs2().sum());
    return InitialOverlaps(std::move(gamma));
}

}  // namespace eigenamp
