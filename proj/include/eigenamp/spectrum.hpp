#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <vector>

namespace eigenamp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Eigenvalues of the simulated Hamiltonian after rescaling: sorted ascending,
// all strictly positive, none above 1, and a strictly positive gap between
// the two lowest levels. Construction validates every invariant; instances
// are immutable afterwards.
class Spectrum {
public:
    explicit Spectrum(Eigen::ArrayXd eigenvalues);

    int size() const { return static_cast<int>(eigenvalues_.size()); }
    double lambda(int k) const { return eigenvalues_[k]; }
    double lambda_min() const { return eigenvalues_[0]; }
    double lambda_max() const { return eigenvalues_[eigenvalues_.size() - 1]; }
    double gap() const { return eigenvalues_[1] - eigenvalues_[0]; }
    const Eigen::ArrayXd& eigenvalues() const { return eigenvalues_; }

private:
    Eigen::ArrayXd eigenvalues_;
};

// Evenly spaced benchmark spectrum: lambda_k = e0 + k/n for k = 0..n-1, with
// the top value clamped to 1 so rounding can never push it past the cap.
Spectrum make_ladder_spectrum(int n, double e0);

// Random spectrum with a prescribed gap `d` between the two lowest levels:
// lambda_0 distributed as the minimum of n uniform draws on (0, 1]
// (concentrating near 1/n, as when every level of the model is drawn
// uniformly), redrawn until lambda_0 + d <= 1; lambda_1 = lambda_0 + d; the
// remaining n-2 values uniform in [lambda_1, 1] and sorted. Deterministic
// in `seed`.
Spectrum make_random_spectrum(int n, double d, std::uint64_t seed);

// System register state expressed in the computational basis.
class ComputationalState {
public:
    explicit ComputationalState(Eigen::VectorXcd amplitudes);

    // Equal amplitude 1/sqrt(n) on every basis vector.
    static ComputationalState uniform(int n);

    int size() const { return static_cast<int>(amplitudes_.size()); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

private:
    Eigen::VectorXcd amplitudes_;
};

// Unitary change of basis between the computational basis and the Hamiltonian
// eigenbasis. Column k of `matrix()` is eigenvector k expressed in the
// computational basis, so matrix().adjoint() maps computational-basis
// amplitudes to eigenbasis amplitudes.
class RotationMatrix {
public:
    explicit RotationMatrix(Eigen::MatrixXcd matrix);

    int size() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    // Eigenbasis amplitudes of a computational-basis state.
    Eigen::VectorXcd to_eigenbasis(const Eigen::VectorXcd& amplitudes) const;

private:
    Eigen::MatrixXcd matrix_;
};

// Traceless Hermitian generator basis for n-level systems (the generalized
// Gell-Mann matrices), normalized so trace(G_a G_b) = 2 delta_ab. Ordering:
// all real symmetric pair matrices (j < k, lexicographic), then all imaginary
// antisymmetric pair matrices (same order), then the n - 1 diagonal ones.
std::vector<Eigen::MatrixXcd> su_generators(int n);

// Hermitian combination sum_m params[m] * G_m without materializing the
// generator list; params.size() must equal n*n - 1.
Eigen::MatrixXcd su_generator_combination(int n, const Eigen::VectorXd& params);

// exp(-i * sum_m params[m] * G_m), evaluated through the eigendecomposition
// of the Hermitian exponent. Deterministic test hook for known parameters.
RotationMatrix rotation_from_parameters(int n, const Eigen::VectorXd& params);

// Random eigenbasis rotation: generator coefficients drawn uniform in
// [-pi, pi). Deterministic in `seed`.
RotationMatrix make_random_rotation(int n, std::uint64_t seed);

// Eigenbasis overlaps gamma_k of the initial system state, i.e. the
// amplitudes <lambda_k|phi_0>. Stores |gamma_k|^2 alongside since the
// amplification engines consume both. Requires unit norm and a nonzero
// ground-level overlap.
class InitialOverlaps {
public:
    explicit InitialOverlaps(Eigen::ArrayXcd gamma0);

    int size() const { return static_cast<int>(gamma0_.size()); }
    const Eigen::ArrayXcd& gamma0() const { return gamma0_; }
    // Initial level-occupation fractions |gamma_k|^2.
    const Eigen::ArrayXd& fractions0() const { return fractions0_; }

private:
    Eigen::ArrayXcd gamma0_;
    Eigen::ArrayXd fractions0_;
};

// Overlaps of a computational-basis state under a given eigenbasis rotation.
InitialOverlaps overlaps_from_state(const RotationMatrix& rotation,
                                    const ComputationalState& state);

// Equal overlap 1/sqrt(n) on every level (what a uniform computational state
// sees when the rotation is the identity).
InitialOverlaps uniform_overlaps(int n);

// Overlaps of a Haar-like random unit vector: i.i.d. complex Gaussian entries
// normalized to unit length. Statistically equivalent to rotating a fixed
// state by a random unitary, at O(n) cost instead of O(n^3). Deterministic
// in `seed`.
InitialOverlaps random_overlaps(int n, std::uint64_t seed);

}  // namespace eigenamp
