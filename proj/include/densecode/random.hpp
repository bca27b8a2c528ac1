#pragma once

#include "densecode/linalg.hpp"
#include "densecode/states.hpp"

#include <cstdint>

namespace densecode {

// Identifies one reproducible sample stream. The same (seed, stream) pair
// always yields the bit-identical sequence, independent of scheduling.
struct Seed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    Seed with_stream(std::uint64_t s) const { return Seed{seed, s}; }
};

// Counter-based generator (splitmix64 finalizer over key + counter).
// std::normal_distribution is implementation-defined, so normals come from
// an explicit Box-Muller transform to keep streams bit-stable everywhere.
class Prng {
public:
    explicit Prng(Seed s);

    std::uint64_t next_u64();
    double next_unit();           // uniform in (0, 1]
    double next_normal();         // N(0, 1)
    Complex next_complex_normal();  // CN(0, 1): real/imag ~ N(0, 1/2)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Haar unitary via QR of a complex Ginibre matrix with the R-diagonal
// phase fix.
ComplexOperator haar_unitary(int d, Seed seed);

// First r columns of a Haar unitary (d x r Haar isometry).
Matrix haar_isometry(int d, int r, Seed seed);

PureState haar_state(const HilbertSpace& space, Seed seed);

// Haar state on dims (d_A1, d_S) with its Schmidt spectrum deterministically
// waterfilled so that the largest eigenvalue of the S-reduction is at most
// lambda_max; sampled Schmidt bases are kept.
PureState bounded_schmidt_state(int d_A1, int d_S, double lambda_max, Seed seed);

namespace detail {

// waterfill a descending probability vector to the cap, preserving ratios
// below the capped prefix; sum stays 1
Eigen::VectorXd waterfill_spectrum(Eigen::VectorXd descending, double cap);

}  // namespace detail

}  // namespace densecode
