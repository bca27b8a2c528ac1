#pragma once

#include "densecode/linalg.hpp"

#include <vector>

namespace densecode {

constexpr double kStateNormTol = 1e-10;

// Unit-norm amplitude vector over a composite space.
class PureState {
public:
    explicit PureState(ComplexVector v);

    const ComplexVector& vector() const { return vector_; }
    const Vector& amplitudes() const { return vector_.vec; }
    const HilbertSpace& space() const { return vector_.space; }

private:
    ComplexVector vector_;
};

// Hermitian, PSD, unit-trace operator. Validated on construction
// (Hermiticity 1e-10, eigenvalues >= -1e-10, trace 1 +/- 1e-10).
class DensityOperator {
public:
    explicit DensityOperator(ComplexOperator op);

    static DensityOperator from_pure(const PureState& psi);

    const ComplexOperator& op() const { return operator_; }
    const Matrix& matrix() const { return operator_.mat; }
    const HilbertSpace& space() const { return operator_.space; }

    // eigenvalues clipped at -1e-10 -> 0 and renormalized, descending
    Eigen::VectorXd spectrum() const;

private:
    ComplexOperator operator_;
};

struct SchmidtDecomposition {
    Eigen::VectorXd coefficients;  // descending, sum of squares 1
    std::vector<Vector> left_basis;
    std::vector<Vector> right_basis;
    HilbertSpace left_space;
    HilbertSpace right_space;

    double lambda_max() const { return coefficients.size() ? coefficients(0) * coefficients(0) : 0.0; }
};

// Schmidt decomposition across `cut` (left side) vs. the remaining
// subsystems. Coefficients come from the SVD of the amplitude matrix
// reshaped along the cut, so ordering is deterministic for fixed input.
SchmidtDecomposition schmidt_decompose(const PureState& psi, const std::vector<int>& cut);

// S(rho) = -Tr rho log2 rho, in bits. Eigenvalues below 1e-12 contribute 0.
double von_neumann_entropy(const DensityOperator& rho);

// F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// (1/sqrt(d)) sum_i |i>|i> on dims (d, d).
PureState maximally_entangled(int d);

// True when every descending partial sum of p dominates q's (tolerance 1e-9).
// Inputs are nonnegative spectra summing to 1 +/- 1e-9, zero-padded to a
// common length.
bool majorizes(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Reduction of a pure state onto `keep` without forming the global projector.
DensityOperator reduced_density(const PureState& psi, const std::vector<int>& keep);

// Trace norm ||rho - sigma||_1 (sum of absolute eigenvalues of the difference).
double trace_norm_distance(const Matrix& rho, const Matrix& sigma);

struct UhlmannResult {
    PureState state;     // purification of I/d_B across the cut, same subsystem order as the input
    double overlap;      // |<psiPrime|state>|, real and nonnegative by phase choice
};

// The purification Phi of I/d_B on the b_cut side maximizing |<psiPrime|Phi>|.
// Closed form: polar isometry of the (rest x d_B) amplitude matrix; the
// maximal overlap squared equals F(psiPrime_B, I/d_B).
UhlmannResult closest_maximally_entangled_purification(const PureState& psi_prime,
                                                       const std::vector<int>& b_cut);

namespace detail {

// clip spectrum at -1e-10 (error below), zero entries < 1e-12, renormalize
Eigen::VectorXd clean_spectrum(const Eigen::VectorXd& raw);

double entropy_of_spectrum(const Eigen::VectorXd& spectrum);

}  // namespace detail

}  // namespace densecode
